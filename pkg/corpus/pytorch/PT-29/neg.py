import torch
from torch import nn


class Encoder(nn.Module):
    def forward(self, x):
        return x


def train(optimizer, loader):
    encoder = Encoder()
    for batch in loader:
        optimizer.zero_grad()
        loss = encoder(batch).sum()
        loss.backward()
        optimizer.step()
