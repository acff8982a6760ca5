"""Targeted L-infinity attack: three losses plus momentum, translation-
invariant gradient smoothing, and diverse-input transformation.

All losses are written so that lower is better for the attacker; the
optimizer descends.  The update per iteration is

    g        <- d loss(di_transform(x)) / dx          (through the ensemble)
    g        <- ti_smooth(g)
    momentum <- mu * momentum + g / ||g||_1
    x        <- project_linf(x - step * sign(momentum), original, eps)

Epsilon and the step size live in the [0, 1] pixel domain (16 and 2 on the
0-255 scale become 16/255 and 2/255).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image
from scipy import ndimage

from .dataset import ImageRecord
from .errors import AttackDivergedError, ValidationError
from .models import Ensemble, member_logits_t, writable_f32

__all__ = [
    "LossKind",
    "AttackConfig",
    "PerturbationState",
    "AttackTrace",
    "loss_ce",
    "loss_logit",
    "loss_po_trip",
    "poincare_distance",
    "angular_distance",
    "gaussian_kernel",
    "ti_smooth",
    "di_transform",
    "mi_accumulate",
    "project_linf",
    "run_attack",
    "quantize_to_uint8",
    "save_adversarial_png",
    "write_trace_csv",
]


class LossKind(str, Enum):
    CE = "ce"
    PO_TRIP = "potrip"
    LOGIT = "logit"


@dataclass(frozen=True)
class AttackConfig:
    loss_kind: LossKind = LossKind.LOGIT
    epsilon: float = 16 / 255
    step_size: float = 2 / 255
    iterations: int = 300
    momentum_mu: float = 1.0
    ti_kernel_radius: int = 2  # 0 disables smoothing (5x5 kernel at the default)
    di_probability: float = 0.7  # 0 disables diverse inputs
    di_max_scale: float = 1.1
    potrip_lambda: float = 0.01
    potrip_gamma: float = 0.007
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if not 0.0 < self.step_size <= 1.0:
            raise ValidationError(f"step_size must be in (0, 1], got {self.step_size}")
        if self.iterations < 1:
            raise ValidationError("iterations must be >= 1")
        if self.momentum_mu < 0:
            raise ValidationError("momentum_mu must be >= 0")
        if self.ti_kernel_radius < 0:
            raise ValidationError("ti_kernel_radius must be >= 0")
        if not 0.0 <= self.di_probability <= 1.0:
            raise ValidationError("di_probability must be in [0, 1]")
        if self.di_max_scale <= 1.0:
            raise ValidationError("di_max_scale must be > 1")
        if self.potrip_lambda < 0 or self.potrip_gamma < 0:
            raise ValidationError("potrip_lambda and potrip_gamma must be >= 0")


@dataclass
class PerturbationState:
    momentum: np.ndarray
    iteration: int = 0

    @classmethod
    def zeros_like(cls, image: np.ndarray) -> "PerturbationState":
        return cls(momentum=np.zeros_like(image, dtype=np.float64), iteration=0)


# ---------------------------------------------------------------------------
# losses (torch, differentiable w.r.t. the logits)

def _check_index(logits: torch.Tensor, index: int, what: str) -> None:
    if not 0 <= index < logits.shape[-1]:
        raise ValidationError(f"{what} index {index} out of [0, {logits.shape[-1]})")


def loss_ce(logits: torch.Tensor, target: int) -> torch.Tensor:
    """Cross-entropy towards the target class: -log softmax(logits)[target]."""
    _check_index(logits, target, "target")
    return -F.log_softmax(logits, dim=-1)[target]


def loss_logit(logits: torch.Tensor, target: int) -> torch.Tensor:
    """Negated target logit; the gradient is -1 at the target, 0 elsewhere."""
    _check_index(logits, target, "target")
    return -logits[target]


def poincare_distance(u: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
    """arccosh(1 + 2||u-v||^2 / ((1-||u||^2)(1-||v||^2))) for points in the unit ball."""
    delta = 2.0 * torch.sum((u - v) ** 2) / ((1.0 - torch.sum(u**2)) * (1.0 - torch.sum(v**2)))
    return torch.acosh(1.0 + delta)


def angular_distance(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """1 - |a . b| / (||a||_2 ||b||_2)."""
    return 1.0 - torch.abs(torch.dot(a, b)) / (torch.norm(a, p=2) * torch.norm(b, p=2))


_POTRIP_XI = 1e-4  # shrinks the one-hot anchor strictly inside the unit ball
_POTRIP_U_MAX = 1.0 - 1e-5


def loss_po_trip(
    logits: torch.Tensor,
    target: int,
    gt: int,
    lam: float = 0.01,
    gamma: float = 0.007,
) -> torch.Tensor:
    """Poincare-distance loss plus a triplet term pushing away from the ground truth."""
    _check_index(logits, target, "target")
    _check_index(logits, gt, "gt")
    if target == gt:
        raise ValidationError("target and gt must differ")
    l1 = torch.sum(torch.abs(logits))
    if l1.item() == 0.0:
        raise ValidationError("degenerate input: ||logits||_1 is zero")
    u = logits / l1
    u_norm = torch.norm(u, p=2)
    if u_norm.item() >= _POTRIP_U_MAX:
        u = u * (_POTRIP_U_MAX / u_norm)
    one_hot_t = torch.zeros_like(logits)
    one_hot_t[target] = 1.0
    one_hot_g = torch.zeros_like(logits)
    one_hot_g[gt] = 1.0
    v = one_hot_t * (1.0 - _POTRIP_XI)
    po = poincare_distance(u, v)
    trip = torch.clamp(
        angular_distance(logits, one_hot_t) - angular_distance(logits, one_hot_g) + gamma,
        min=0.0,
    )
    return po + lam * trip


def make_loss(config: AttackConfig, target: int, gt: int):
    """Bind the configured loss to the record's label indices."""
    if config.loss_kind is LossKind.CE:
        return lambda logits: loss_ce(logits, target)
    if config.loss_kind is LossKind.LOGIT:
        return lambda logits: loss_logit(logits, target)
    return lambda logits: loss_po_trip(
        logits, target, gt, config.potrip_lambda, config.potrip_gamma
    )


# ---------------------------------------------------------------------------
# transfer-technique primitives

def gaussian_kernel(radius: int, sigma: float | None = None) -> np.ndarray:
    """Truncated Gaussian of side 2*radius+1, entries >= 0 summing to 1."""
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    if radius == 0:
        return np.ones((1, 1), dtype=np.float64)
    if sigma is None:
        sigma = radius / np.sqrt(3.0)
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    kernel = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def ti_smooth(grad: np.ndarray, radius: int) -> np.ndarray:
    """Per-channel convolution with the truncated Gaussian, zero-padded borders."""
    if grad.ndim != 3:
        raise ValidationError(f"gradient must be (H, W, C), got shape {grad.shape}")
    if radius == 0:
        return grad
    kernel = gaussian_kernel(radius)
    out = np.empty_like(grad, dtype=np.float64)
    for c in range(grad.shape[2]):
        out[:, :, c] = ndimage.convolve(
            grad[:, :, c].astype(np.float64), kernel, mode="constant", cval=0.0
        )
    return out


def _di_transform_t(
    image: torch.Tensor,
    probability: float,
    max_scale: float,
    rng: np.random.Generator,
) -> torch.Tensor:
    """Diverse-input transform on a (3, H, W) tensor, differentiable."""
    if probability <= 0.0:
        return image
    width = image.shape[-1]
    padded_side = int(width * max_scale)
    if padded_side <= width:
        return image
    if rng.random() >= probability:
        return image
    resized_side = int(rng.integers(width, padded_side))
    x = image.unsqueeze(0)
    x = F.interpolate(x, size=(resized_side, resized_side), mode="bilinear", align_corners=False)
    rem = padded_side - resized_side
    pad_top = int(rng.integers(0, rem + 1))
    pad_left = int(rng.integers(0, rem + 1))
    x = F.pad(x, (pad_left, rem - pad_left, pad_top, rem - pad_top), value=0.0)
    # back to the native width so fixed-input ensemble members accept it
    x = F.interpolate(x, size=(width, width), mode="bilinear", align_corners=False)
    return x.squeeze(0)


def di_transform(
    image: np.ndarray,
    probability: float,
    max_scale: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Random resize + zero-pad + resize back; identity with probability 1-p."""
    if not 0.0 <= probability <= 1.0:
        raise ValidationError("probability must be in [0, 1]")
    if max_scale <= 1.0:
        raise ValidationError("max_scale must be > 1")
    t = torch.from_numpy(writable_f32(image)).permute(2, 0, 1)
    out = _di_transform_t(t, probability, max_scale, rng)
    if out is t:
        return image
    return out.permute(1, 2, 0).numpy().astype(image.dtype)


def mi_accumulate(state: PerturbationState, grad: np.ndarray, mu: float) -> PerturbationState:
    """momentum <- mu * momentum + grad / ||grad||_1 (L1 over all pixels).

    A zero gradient contributes nothing: the momentum simply decays by mu.
    Callers treat that case as a stalled-gradient event, not an error.
    """
    if grad.shape != state.momentum.shape:
        raise ValidationError(
            f"gradient shape {grad.shape} != momentum shape {state.momentum.shape}"
        )
    l1 = np.abs(grad).sum()
    if l1 == 0.0:
        momentum = mu * state.momentum
    else:
        momentum = mu * state.momentum + grad / l1
    return PerturbationState(momentum=momentum, iteration=state.iteration + 1)


def project_linf(adv: np.ndarray, original: np.ndarray, epsilon: float) -> np.ndarray:
    """Clamp per pixel to [original - eps, original + eps], then to [0, 1]."""
    if adv.shape != original.shape:
        raise ValidationError(f"shape mismatch: {adv.shape} vs {original.shape}")
    out = np.clip(adv, original - epsilon, original + epsilon)
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# the attack loop

@dataclass
class AttackTrace:
    image_id: str
    loss_kind: LossKind
    losses: list[float] = field(default_factory=list)
    target_logit_means: list[float] = field(default_factory=list)
    stalled_iterations: list[int] = field(default_factory=list)
    final_target_ranks: list[int] = field(default_factory=list)  # one per member, 1 = top


def run_attack(
    record: ImageRecord, config: AttackConfig, ensemble: Ensemble
) -> tuple[np.ndarray, AttackTrace]:
    """Optimize a targeted adversarial image under the L-infinity budget.

    Deterministic: identical (record, config, ensemble) pairs give
    bit-identical outputs.  Raises AttackDivergedError if the loss or
    gradient turns non-finite, naming the iteration.
    """
    target = record.target_label.class_index
    gt = record.gt_label.class_index
    if target >= ensemble.num_classes or gt >= ensemble.num_classes:
        raise ValidationError(
            f"record labels ({gt}, {target}) exceed ensemble vocabulary "
            f"size {ensemble.num_classes}"
        )
    loss_fn = make_loss(config, target, gt)
    rng = np.random.default_rng(config.rng_seed)
    original = record.pixels.astype(np.float32)
    x = original.copy()
    state = PerturbationState.zeros_like(x)
    trace = AttackTrace(image_id=record.id, loss_kind=config.loss_kind)

    for it in range(config.iterations):
        x_t = torch.from_numpy(x).permute(2, 0, 1).requires_grad_(True)
        x_in = _di_transform_t(x_t, config.di_probability, config.di_max_scale, rng)
        members = member_logits_t(ensemble, x_in)
        logits = torch.stack(members).mean(dim=0)
        loss = loss_fn(logits)
        if not torch.isfinite(loss):
            raise AttackDivergedError(it, "loss")
        (grad_t,) = torch.autograd.grad(loss, x_t)
        grad = grad_t.permute(1, 2, 0).numpy().astype(np.float64)
        if not np.isfinite(grad).all():
            raise AttackDivergedError(it, "gradient")

        trace.losses.append(float(loss.item()))
        with torch.no_grad():
            trace.target_logit_means.append(
                float(np.mean([m[target].item() for m in members]))
            )
        g = ti_smooth(grad, config.ti_kernel_radius)
        if np.abs(g).sum() == 0.0:
            trace.stalled_iterations.append(it)
        state = mi_accumulate(state, g, config.momentum_mu)
        x = project_linf(
            x - config.step_size * np.sign(state.momentum), original, config.epsilon
        ).astype(np.float32)

    with torch.no_grad():
        final_members = member_logits_t(ensemble, torch.from_numpy(x).permute(2, 0, 1))
    for m in final_members:
        order = torch.argsort(m, descending=True)
        trace.final_target_ranks.append(int((order == target).nonzero().item()) + 1)
    return x, trace


# ---------------------------------------------------------------------------
# artifact output

def quantize_to_uint8(image: np.ndarray) -> np.ndarray:
    """8-bit quantization applied before any evaluation of attack outputs."""
    return np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)


def save_adversarial_png(path: str | Path, image: np.ndarray) -> None:
    Image.fromarray(quantize_to_uint8(image), mode="RGB").save(path, format="PNG")


def write_trace_csv(path: str | Path, trace: AttackTrace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "loss", "target_logit_mean"])
        for i, (loss, tlm) in enumerate(zip(trace.losses, trace.target_logit_means)):
            writer.writerow([i, f"{loss:.6f}", f"{tlm:.6f}"])
