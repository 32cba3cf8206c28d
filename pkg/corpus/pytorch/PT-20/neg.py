import torch
from torch import nn


class Encoder(nn.Module):
    def __init__(self):
        super().__init__()
        self.register_buffer("last_hidden", torch.zeros(1))

    def forward(self, x):
        hidden = x * 2
        return hidden
