"""Frozen toy encoders producing patch-level feature sequences.

Each non-text modality gets a linear patch embedder with fixed
Gaussian-initialized weights derived from the config seed. The encoders never
train; only the projection on top of them learns, so encoding quality is
irrelevant to the mechanism tests while determinism is load-bearing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .config import Modality, ModelConfig
from .errors import InvalidInputError, WrongModalityError


@dataclass
class RawSample:
    modality: Modality
    payload: np.ndarray | str


@dataclass
class ModalityFeatureBlock:
    modality: Modality
    features: torch.Tensor  # (N, feature_dim)

    @property
    def n(self) -> int:
        return self.features.shape[0]


def _frozen_linear(in_dim: int, out_dim: int, gen: torch.Generator) -> nn.Linear:
    layer = nn.Linear(in_dim, out_dim)
    with torch.no_grad():
        layer.weight.copy_(
            torch.randn(out_dim, in_dim, generator=gen) / in_dim**0.5
        )
        layer.bias.copy_(torch.randn(out_dim, generator=gen) * 0.01)
    layer.requires_grad_(False)
    return layer


class ToyEncoders(nn.Module):
    """Per-modality frozen patch embedders. Pure function of (payload, seed)."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        d = cfg.feature_dim
        gen = torch.Generator().manual_seed(cfg.seed + 17)
        self.image = _frozen_linear(cfg.image_patch * cfg.image_patch * 3, d, gen)
        self.audio = _frozen_linear(cfg.audio_window, d, gen)
        self.video = _frozen_linear(cfg.video_patch * cfg.video_patch * 3, d, gen)

    def _patchify(self, sample: RawSample) -> torch.Tensor:
        cfg = self.cfg
        payload = np.asarray(sample.payload, dtype=np.float32)
        if not np.isfinite(payload).all():
            raise InvalidInputError("payload contains non-finite values")
        if sample.modality == Modality.IMAGE:
            expected = (cfg.image_size, cfg.image_size, 3)
            if payload.shape != expected:
                raise InvalidInputError(
                    f"image payload shape {payload.shape}, expected {expected}"
                )
            p = cfg.image_patch
            g = cfg.image_size // p
            patches = payload.reshape(g, p, g, p, 3).transpose(0, 2, 1, 3, 4)
            return torch.from_numpy(patches.reshape(g * g, p * p * 3).copy())
        if sample.modality == Modality.AUDIO:
            if payload.shape != (cfg.audio_len,):
                raise InvalidInputError(
                    f"audio payload shape {payload.shape}, expected ({cfg.audio_len},)"
                )
            w = cfg.audio_window
            return torch.from_numpy(payload.reshape(-1, w).copy())
        if sample.modality == Modality.VIDEO:
            expected = (cfg.video_frames, cfg.video_size, cfg.video_size, 3)
            if payload.shape != expected:
                raise InvalidInputError(
                    f"video payload shape {payload.shape}, expected {expected}"
                )
            p = cfg.video_patch
            g = cfg.video_size // p
            frames = payload.reshape(cfg.video_frames, g, p, g, p, 3)
            frames = frames.transpose(0, 1, 3, 2, 4, 5)
            return torch.from_numpy(
                frames.reshape(cfg.video_frames * g * g, p * p * 3).copy()
            )
        raise WrongModalityError(f"cannot patchify modality {sample.modality}")

    def encode(self, sample: RawSample) -> ModalityFeatureBlock:
        if sample.modality == Modality.TEXT:
            raise WrongModalityError("text is tokenized, not encoded")
        patches = self._patchify(sample)
        embedder: nn.Linear = getattr(self, sample.modality.value)
        with torch.no_grad():
            features = embedder(patches)
        return ModalityFeatureBlock(sample.modality, features)
