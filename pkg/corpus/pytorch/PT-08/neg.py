import torch
from torch.utils.data import DataLoader


def sweep(dataset, model):
    loader = DataLoader(dataset, batch_size=32, num_workers=2, persistent_workers=True)
    for epoch in range(3):
        for batch in loader:
            model(batch)
