import torch


def power_iterate(mat, steps):
    acc = mat
    for _ in range(steps):
        acc = torch.matmul(acc, mat)  # expect[PT-18]
    return acc
