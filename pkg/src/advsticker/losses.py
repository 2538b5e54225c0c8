"""Scalar objectives: WGAN-GP critic loss, generator shape loss,
dodging/impersonation adversarial loss, total variation, and the combined
generator objective."""

from __future__ import annotations

from dataclasses import dataclass

import torch

PROB_FLOOR = 1e-12
TV_EPS = 1e-12  # stabilizer inside the square root; keeps gradients finite at flat pixels


@dataclass
class GPConfig:
    gp_lambda: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.gp_lambda <= 0:
            raise ValueError("lambda must be positive")


@dataclass
class LossWeights:
    alpha: float = 100.0
    beta: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("loss weights must be nonnegative")


def interpolate(real: torch.Tensor, fake: torch.Tensor, eps: torch.Tensor) -> torch.Tensor:
    """Straight-line mix per sample: eps*real + (1-eps)*fake."""
    if real.shape != fake.shape:
        raise ValueError(f"shape mismatch: {tuple(real.shape)} vs {tuple(fake.shape)}")
    if eps.ndim != 1 or eps.shape[0] != real.shape[0]:
        raise ValueError("eps must have one entry per sample")
    e = eps.view(-1, *([1] * (real.ndim - 1)))
    return e * real + (1.0 - e) * fake


def gradient_penalty(critic, interpolated: torch.Tensor, gp_lambda: float) -> torch.Tensor:
    """lambda * mean_i (||d D(s_i)/d s_i||_2 - 1)^2 over the batch."""
    x = interpolated.detach().requires_grad_(True)
    scores = critic(x)
    (grads,) = torch.autograd.grad(
        scores.sum(), x, create_graph=torch.is_grad_enabled()
    )
    norms = grads.flatten(1).norm(2, dim=1)
    return gp_lambda * ((norms - 1.0) ** 2).mean()


def critic_loss(critic, fake_masks, real_masks, gp: GPConfig, eps: torch.Tensor | None = None):
    """Wasserstein critic objective with gradient penalty.

    `fake_masks`/`real_masks` are lists with one (m,1,H,W) batch per branch;
    each branch's critic scores its own branch's masks, and branch losses
    are summed.
    """
    if len(fake_masks) != len(real_masks):
        raise ValueError("per-branch fake/real batch counts differ")
    if len(fake_masks) != critic.branch_count:
        raise ValueError(
            f"{len(fake_masks)} branches vs critic with {critic.branch_count}"
        )
    total = fake_masks[0].new_zeros(())
    for b, (fake, real) in enumerate(zip(fake_masks, real_masks)):
        if eps is None:
            e = torch.rand(real.shape[0], generator=torch.Generator().manual_seed(gp.seed + b))
        else:
            e = eps
        mixed = interpolate(real, fake.detach(), e)
        sub = critic.branches[b]
        total = total + sub(fake).mean() - sub(real).mean() + gradient_penalty(
            sub, mixed, gp.gp_lambda
        )
    return total


def generator_shape_loss(critic, fake_masks) -> torch.Tensor:
    """-mean critic score of crafted masks, summed over branches."""
    total = fake_masks[0].new_zeros(())
    for b, fake in enumerate(fake_masks):
        total = total - critic.branches[b](fake).mean()
    return total


def adversarial_loss(frs, perturbed_images, spec) -> torch.Tensor:
    """Classification objective for a batch of perturbed face images.

    `frs` is any callable mapping images to class probabilities; `spec`
    carries the attack mode and labels.  Dodging: -mean CE at the
    attacker's class (minimizing pushes its probability down).
    Impersonating: +mean CE at the target class.
    """
    probs = frs(perturbed_images)
    return adversarial_loss_from_probs(
        probs, spec.mode, getattr(spec, "attacker_label", None),
        getattr(spec, "target_label", None),
    )


def adversarial_loss_from_probs(probs: torch.Tensor, mode: str,
                                attacker_label: int | None = None,
                                target_label: int | None = None) -> torch.Tensor:
    n_classes = probs.shape[-1]
    if mode == "dodging":
        if attacker_label is None or not 0 <= attacker_label < n_classes:
            raise ValueError(f"attacker label {attacker_label} outside class set")
        p = probs[:, attacker_label]
        return -(-torch.log(p.clamp_min(PROB_FLOOR))).mean()
    if mode == "impersonating":
        if target_label is None or not 0 <= target_label < n_classes:
            raise ValueError(f"target label {target_label} outside class set")
        p = probs[:, target_label]
        return (-torch.log(p.clamp_min(PROB_FLOOR))).mean()
    raise ValueError(f"unknown attack mode {mode!r}")


def tv_loss(stickers: torch.Tensor | list[torch.Tensor]) -> torch.Tensor:
    """Total variation: sum over pixels of sqrt(dh^2 + dv^2) per channel,
    omitting out-of-range neighbor terms; summed over branches."""
    if isinstance(stickers, (list, tuple)):
        return sum((tv_loss(s) for s in stickers), start=torch.zeros(()))
    x = stickers
    if x.ndim == 3:  # HxWxC or CxHxW both reduce the same way
        x = x.unsqueeze(0)
    elif x.ndim == 2:
        x = x.unsqueeze(0).unsqueeze(0)
    dh = x[..., :, :-1] - x[..., :, 1:]
    dv = x[..., :-1, :] - x[..., 1:, :]
    both = torch.sqrt(dh[..., :-1, :] ** 2 + dv[..., :, :-1] ** 2 + TV_EPS)
    h_only = torch.sqrt(dh[..., -1:, :] ** 2 + TV_EPS)
    v_only = torch.sqrt(dv[..., :, -1:] ** 2 + TV_EPS)
    return both.sum() + h_only.sum() + v_only.sum()


def total_generator_loss(shape_loss, adv_loss, tv, weights: LossWeights) -> torch.Tensor:
    out = shape_loss + weights.alpha * adv_loss + weights.beta * tv
    val = out if isinstance(out, torch.Tensor) else torch.as_tensor(out)
    if not torch.isfinite(val).all():
        raise FloatingPointError("non-finite generator loss; training diverged")
    return out
