import torch


def release(shape):
    workspace = torch.zeros(shape)
    result = workspace.sum().item()
    del workspace  # expect[PT-27]
    return result
