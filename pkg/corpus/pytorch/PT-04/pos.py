import torch


def train(model, optimizer, loader):
    for batch in loader:
        loss = model(batch).sum()
        loss.backward()  # expect[PT-04]
        optimizer.step()
