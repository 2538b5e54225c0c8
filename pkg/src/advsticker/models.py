"""Three-branch sticker/shape generator and per-branch shape critic.

Each generator branch maps a 32-d normal noise vector through shared
Basic Layers (FC 32->16000, reshape 5x5x640, two upsample+conv blocks to
20x20x160) and then two separate heads (Shape Layers, Sticker Layers)
ending in tanh, producing an 80x80x3 sticker and an 80x80x1 shape mask.
The critic mirrors the shape head downwards (four conv+pool blocks to
5x5x640, then FC 16000->1) and uses only per-sample normalization so the
gradient penalty stays well-defined per sample.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn

from .checkpoint import load_checkpoint, save_checkpoint

NOISE_DIM = 32
MASK_SIZE = 80
DEFAULT_BRANCHES = 3


def _up_block(cin: int, cout: int) -> list[nn.Module]:
    return [
        nn.BatchNorm2d(cin),
        nn.ReLU(),
        nn.Upsample(scale_factor=2, mode="nearest"),
        nn.Conv2d(cin, cout, 3, padding=1),
    ]


class GeneratorBranch(nn.Module):
    def __init__(self):
        super().__init__()
        self.fc = nn.Linear(NOISE_DIM, 16000)
        self.fc_bn = nn.BatchNorm1d(16000)
        # 5x5x640 -> 10x10x64 -> 20x20x160
        self.basic = nn.Sequential(*_up_block(640, 64), *_up_block(64, 160))
        self.sticker_head = self._head(3)
        self.shape_head = self._head(1)

    @staticmethod
    def _head(out_channels: int) -> nn.Sequential:
        # 20x20x160 -> 40x40x32 -> 80x80x16 -> 80x80xC
        return nn.Sequential(
            *_up_block(160, 32),
            *_up_block(32, 16),
            nn.Conv2d(16, out_channels, 3, padding=1),
            nn.Tanh(),
        )

    def forward(self, noise: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        h = torch.relu(self.fc_bn(self.fc(noise)))
        h = h.view(-1, 640, 5, 5)
        h = self.basic(h)
        return self.sticker_head(h), self.shape_head(h)


class Generator(nn.Module):
    """Branch outputs: list of (sticker mx3x80x80, shape mx1x80x80) in [-1,1]."""

    def __init__(self, branch_count: int = DEFAULT_BRANCHES):
        super().__init__()
        if branch_count < 1:
            raise ValueError("branch_count must be >= 1")
        self.branch_count = branch_count
        self.branches = nn.ModuleList(GeneratorBranch() for _ in range(branch_count))

    def forward(self, noise: torch.Tensor) -> list[tuple[torch.Tensor, torch.Tensor]]:
        if noise.ndim != 2 or noise.shape[1] != NOISE_DIM:
            raise ValueError(f"noise must be (m, {NOISE_DIM}), got {tuple(noise.shape)}")
        return [branch(noise) for branch in self.branches]


class CriticBranch(nn.Module):
    def __init__(self):
        super().__init__()
        layers: list[nn.Module] = []
        chans = [1, 16, 32, 64, 640]
        for cin, cout in zip(chans[:-1], chans[1:]):
            layers += [
                nn.Conv2d(cin, cout, 3, padding=1),
                nn.GroupNorm(1, cout),  # per-sample LayerNorm over C,H,W
                nn.ReLU(),
                nn.MaxPool2d(2),
            ]
        self.features = nn.Sequential(*layers)
        self.final_norm = nn.LayerNorm((640, 5, 5))
        self.fc = nn.Linear(16000, 1)

    def forward(self, masks: torch.Tensor) -> torch.Tensor:
        if masks.ndim != 4 or masks.shape[1:] != (1, MASK_SIZE, MASK_SIZE):
            raise ValueError(
                f"masks must be (m, 1, {MASK_SIZE}, {MASK_SIZE}), got {tuple(masks.shape)}"
            )
        h = self.features(masks)
        h = torch.relu(self.final_norm(h))
        return self.fc(h.flatten(1)).squeeze(1)


class Critic(nn.Module):
    def __init__(self, branch_count: int = DEFAULT_BRANCHES):
        super().__init__()
        self.branch_count = branch_count
        self.branches = nn.ModuleList(CriticBranch() for _ in range(branch_count))

    def forward(self, masks: torch.Tensor, branch: int = 0) -> torch.Tensor:
        return self.branches[branch](masks)


def init_params(seed: int, branch_count: int = DEFAULT_BRANCHES) -> tuple[Generator, Critic]:
    """Seeded construction of a generator/critic pair."""
    torch.manual_seed(seed)
    return Generator(branch_count), Critic(branch_count)


def sample_noise(m: int, seed: int) -> torch.Tensor:
    gen = torch.Generator().manual_seed(seed)
    return torch.randn(m, NOISE_DIM, generator=gen)


def _descriptor(kind: str, model: nn.Module, extra: dict | None = None) -> dict:
    d = {"kind": kind, "branch_count": model.branch_count}
    if extra:
        d.update(extra)
    return d


def save_models(
    path: str | Path, generator: Generator, critic: Critic, extra: dict | None = None
) -> None:
    state = {f"g.{k}": v for k, v in generator.state_dict().items()}
    state.update({f"d.{k}": v for k, v in critic.state_dict().items()})
    save_checkpoint(path, _descriptor("gan", generator, extra), state)


def load_models(path: str | Path) -> tuple[Generator, Critic, dict]:
    descriptor, state = load_checkpoint(path)
    if descriptor.get("kind") != "gan":
        raise ValueError(f"checkpoint is not a GAN checkpoint: {descriptor}")
    n = descriptor["branch_count"]
    generator, critic = Generator(n), Critic(n)
    generator.load_state_dict(
        {k[2:]: v for k, v in state.items() if k.startswith("g.")}
    )
    critic.load_state_dict({k[2:]: v for k, v in state.items() if k.startswith("d.")})
    return generator, critic, descriptor
