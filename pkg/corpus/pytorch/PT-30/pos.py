import torch


def export_snapshots(module, samples):
    traces = []
    for sample in samples:
        traces.append(torch.jit.trace(module, sample))  # expect[PT-30]
    return traces
