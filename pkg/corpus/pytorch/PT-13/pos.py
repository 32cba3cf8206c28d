import torch


class Scale(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x, factor):
        ctx.factor = factor  # expect[PT-13]
        return x * factor

    @staticmethod
    def backward(ctx, grad):
        return grad * 2.0, None
