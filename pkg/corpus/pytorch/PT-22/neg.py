import torch
from torch.utils.data import DataLoader

dataset = list(range(4096))
loader = DataLoader(dataset, batch_size=256)
