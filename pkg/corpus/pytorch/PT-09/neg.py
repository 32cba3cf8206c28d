import torch


def train(model, optimizer, loader):
    total = 0
    for batch in loader:
        optimizer.zero_grad()
        loss = model(batch).sum()
        loss.backward()
        optimizer.step()
        total += loss.item()
    return total
