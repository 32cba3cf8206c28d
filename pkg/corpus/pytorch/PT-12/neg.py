import torch

weights = torch.randn(1000, 1000)
print(weights.sum())
