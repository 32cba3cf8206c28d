import torch


def export_snapshot(module, sample):
    traced = torch.jit.trace(module, sample)
    return traced
