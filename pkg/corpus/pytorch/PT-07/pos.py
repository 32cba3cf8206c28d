import torch


def attach_probe(module, fn):
    module.register_forward_hook(fn)  # expect[PT-07]
