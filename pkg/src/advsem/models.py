"""Differentiable source models whose averaged logits drive the attack.

Two flavours share one interface: tiny deterministic conv nets for tests
and desk-scale runs, and the pretrained torchvision classifiers
(ResNet-50, DenseNet-121, VGG-16, Inception-v3) for the full pipeline.
Models are read-only after construction; forward and gradient calls are
safe to issue concurrently from independent attack workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ValidationError

__all__ = [
    "SourceModel",
    "Ensemble",
    "ensemble_logits",
    "member_logits_t",
    "ensemble_logits_t",
    "pixel_gradient",
    "tiny_conv_model",
    "linear_probe_model",
    "build_registry_ensemble",
]

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class SourceModel:
    name: str
    input_width: int
    num_classes: int
    module: nn.Module
    # per-channel input normalization applied after resizing to input_width
    mean: tuple[float, float, float] = (0.0, 0.0, 0.0)
    std: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def forward_t(self, image: torch.Tensor) -> torch.Tensor:
        """Logits for a (3, H, W) tensor in [0, 1], resized to this model's width."""
        x = image.unsqueeze(0)
        if x.shape[-1] != self.input_width or x.shape[-2] != self.input_width:
            x = F.interpolate(
                x, size=(self.input_width, self.input_width),
                mode="bilinear", align_corners=False,
            )
        mean = torch.tensor(self.mean, dtype=x.dtype).view(1, 3, 1, 1)
        std = torch.tensor(self.std, dtype=x.dtype).view(1, 3, 1, 1)
        out = self.module((x - mean) / std)
        return out.squeeze(0)


@dataclass(frozen=True)
class Ensemble:
    members: tuple[SourceModel, ...]

    def __post_init__(self):
        if not self.members:
            raise ValidationError("ensemble must have at least one member")
        sizes = {m.num_classes for m in self.members}
        if len(sizes) != 1:
            raise ValidationError(f"members disagree on vocabulary size: {sorted(sizes)}")

    @property
    def num_classes(self) -> int:
        return self.members[0].num_classes


def _to_chw_tensor(image: np.ndarray) -> torch.Tensor:
    if image.ndim != 3 or image.shape[2] != 3 or image.shape[0] != image.shape[1]:
        raise ValidationError(f"image must be a square (H, W, 3) raster, got {image.shape}")
    if image.min() < 0.0 or image.max() > 1.0:
        raise ValidationError("image values must lie in [0, 1]")
    return torch.from_numpy(writable_f32(image)).permute(2, 0, 1).to(torch.float32)


def writable_f32(image: np.ndarray) -> np.ndarray:
    """Contiguous float32 copy-on-need (dataset pixel buffers are read-only)."""
    buf = np.ascontiguousarray(image, dtype=np.float32)
    if not buf.flags.writeable:
        buf = buf.copy()
    return buf


def member_logits_t(ensemble: Ensemble, image: torch.Tensor) -> list[torch.Tensor]:
    return [m.forward_t(image) for m in ensemble.members]


def ensemble_logits_t(ensemble: Ensemble, image: torch.Tensor) -> torch.Tensor:
    return torch.stack(member_logits_t(ensemble, image)).mean(dim=0)


def ensemble_logits(ensemble: Ensemble, image: np.ndarray) -> np.ndarray:
    """Arithmetic mean of member logits for a (H, W, 3) raster in [0, 1]."""
    with torch.no_grad():
        out = ensemble_logits_t(ensemble, _to_chw_tensor(image))
    return out.numpy().astype(np.float64)


def pixel_gradient(
    ensemble: Ensemble,
    image: np.ndarray,
    loss: Callable[[torch.Tensor], torch.Tensor],
) -> np.ndarray:
    """Gradient of ``loss(ensemble_logits(image))`` w.r.t. the image pixels."""
    x = _to_chw_tensor(image).requires_grad_(True)
    value = loss(ensemble_logits_t(ensemble, x))
    (grad,) = torch.autograd.grad(value, x)
    out = grad.permute(1, 2, 0).numpy().astype(np.float64)
    if not np.isfinite(out).all():
        raise ValidationError("non-finite pixel gradient")
    return out


class _TinyConvNet(nn.Module):
    def __init__(self, num_classes: int, generator: torch.Generator):
        super().__init__()
        self.conv1 = nn.Conv2d(3, 8, kernel_size=5, stride=4)
        self.conv2 = nn.Conv2d(8, 16, kernel_size=3, stride=2)
        self.pool = nn.AdaptiveAvgPool2d(4)
        self.fc = nn.Linear(16 * 16, num_classes)
        for p in self.parameters():
            nn.init.normal_(p, mean=0.0, std=0.35, generator=generator)

    def forward(self, x):
        x = torch.tanh(self.conv1(x))
        x = torch.tanh(self.conv2(x))
        x = self.pool(x).flatten(1)
        return self.fc(x)


def tiny_conv_model(
    name: str = "tiny",
    seed: int = 0,
    num_classes: int = 10,
    input_width: int = 64,
) -> SourceModel:
    """A small deterministic conv net; weights depend only on the seed."""
    gen = torch.Generator().manual_seed(seed)
    module = _TinyConvNet(num_classes, gen).eval()
    for p in module.parameters():
        p.requires_grad_(False)
    return SourceModel(name=name, input_width=input_width, num_classes=num_classes, module=module)


class _LinearProbe(nn.Module):
    def __init__(self, matrix: torch.Tensor):
        super().__init__()
        self.register_buffer("matrix", matrix)

    def forward(self, x):
        return x.flatten(1) @ self.matrix.T


def linear_probe_model(matrix: np.ndarray, input_width: int) -> SourceModel:
    """logits = matrix @ flattened pixels; useful for closed-form gradient checks."""
    num_classes, n = matrix.shape
    if n != 3 * input_width * input_width:
        raise ValidationError(f"matrix has {n} columns, expected {3 * input_width * input_width}")
    module = _LinearProbe(torch.from_numpy(matrix.astype(np.float32))).eval()
    return SourceModel(
        name="linear_probe", input_width=input_width, num_classes=num_classes, module=module
    )


# Canonical preprocessing for each registry architecture.
_REGISTRY_BUILDERS: dict[str, tuple[Callable[[], nn.Module], int]] = {}


def _torchvision_builder(arch: str):
    import torchvision.models as tv

    return {
        "resnet50": tv.resnet50,
        "densenet121": tv.densenet121,
        "vgg16": tv.vgg16,
        "inception_v3": lambda **kw: tv.inception_v3(init_weights=False, **kw),
    }[arch]


_DEFAULT_WIDTHS = {"resnet50": 224, "densenet121": 224, "vgg16": 224, "inception_v3": 299}


def build_registry_ensemble(registry: dict) -> Ensemble:
    """Build the pretrained ensemble from a registry config mapping.

    ``registry`` maps model name -> {arch, weights_path, input_width?}.
    Weights are loaded from local files only; this path is never exercised
    by the test suite (tiny models stand in at desk scale).
    """
    members = []
    for name, spec in registry.items():
        arch = spec["arch"]
        if arch not in _DEFAULT_WIDTHS:
            raise ValidationError(f"model {name!r}: unknown arch {arch!r}")
        builder = _torchvision_builder(arch)
        module = builder(weights=None, num_classes=1000)
        weights_path = spec.get("weights_path")
        if not weights_path:
            raise ValidationError(f"model {name!r}: registry entry needs weights_path")
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        module.load_state_dict(state)
        module.eval()
        for p in module.parameters():
            p.requires_grad_(False)
        members.append(
            SourceModel(
                name=name,
                input_width=int(spec.get("input_width", _DEFAULT_WIDTHS[arch])),
                num_classes=1000,
                module=module,
                mean=_IMAGENET_MEAN,
                std=_IMAGENET_STD,
            )
        )
    return Ensemble(tuple(members))
