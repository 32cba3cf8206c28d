import torch


def score(model, batch):
    model.eval()
    with torch.no_grad():
        return model(batch)
