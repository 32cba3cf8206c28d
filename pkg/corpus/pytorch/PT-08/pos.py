import torch
from torch.utils.data import DataLoader


def sweep(dataset, model):
    for epoch in range(3):
        loader = DataLoader(dataset, batch_size=32)  # expect[PT-08]
        for batch in loader:
            model(batch)
