import torch


def hessian_term(loss, params):
    grads = torch.autograd.grad(loss, params)
    second = torch.autograd.grad(grads[0].sum(), params)  # expect[PT-24]
    return second
