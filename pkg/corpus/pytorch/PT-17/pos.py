import torch


class Double(torch.autograd.Function):
    def forward(self, x):  # expect[PT-17]
        self.save_for_backward(x)  # expect[PT-17]
        return x * 2

    def backward(self, grad):  # expect[PT-17]
        return grad * 2
