import torch
from torch import nn


class Encoder(nn.Module):
    def forward(self, x):
        self.last_hidden = x * 2  # expect[PT-20]
        return self.last_hidden
