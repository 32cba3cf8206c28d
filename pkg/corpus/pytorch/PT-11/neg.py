import torch


def gather(encode, batches):
    parts = []
    for batch in batches:
        parts.append(encode(batch))
    return torch.cat(parts)
