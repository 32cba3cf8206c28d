import torch


def gather(encode, batches):
    out = torch.zeros(1)
    for batch in batches:
        out = torch.cat([out, encode(batch)])  # expect[PT-11]
    return out
