import torch
import torch.distributed as dist


def reshard(ranks, steps):
    for _ in range(steps):
        group = dist.new_group(ranks)  # expect[PT-28]
        torch.distributed.barrier(group)
