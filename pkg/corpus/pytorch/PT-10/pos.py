import torch


def run(model, image_loader, text_loader):
    for left, right in zip(image_loader, text_loader):  # expect[PT-10]
        model(left, right)
