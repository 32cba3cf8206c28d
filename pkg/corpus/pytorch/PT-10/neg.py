import torch


def run(model, pairs):
    for left, right in pairs:
        model(left, right)
