import torch


class Trainer:
    def __init__(self, model):
        self.model = model
        self.model.owner = self  # expect[PT-16]
