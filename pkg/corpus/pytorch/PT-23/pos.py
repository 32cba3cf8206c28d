import torch


def train(model, optimizer, loader):
    for batch in loader:
        optimizer.zero_grad()
        loss = model(batch).sum()
        loss.backward(retain_graph=True)  # expect[PT-23]
        optimizer.step()
