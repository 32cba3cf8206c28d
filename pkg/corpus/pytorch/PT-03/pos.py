import itertools

import torch


def refresh(states):
    for state in itertools.cycle(states):  # expect[PT-03]
        torch.add(state, 1)
