import torch


def hessian_term(loss, params):
    grads = torch.autograd.grad(loss, params, create_graph=True)
    second = torch.autograd.grad(grads[0].sum(), params)
    return second
