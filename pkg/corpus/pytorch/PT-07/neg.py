import torch


def attach_probe(module, fn):
    handle = module.register_forward_hook(fn)
    handle.remove()
