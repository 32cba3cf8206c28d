import torch


def record(replay_buffer, state, action):
    transition = torch.stack([state, action])
    replay_buffer.append(transition.detach().cpu())
