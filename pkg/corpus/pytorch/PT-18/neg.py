import torch


def power_iterate(mat, steps):
    out = torch.matmul(mat, mat)
    for _ in range(steps):
        print(out.shape)
    return out
