"""Minimal transformer building blocks shared by the grouping projector and
the core LLM. Everything here operates on unbatched (S, dim) sequences."""

from __future__ import annotations

import math
from typing import Callable, Optional

import torch
from torch import nn
import torch.nn.functional as F


class MultiHeadSelfAttention(nn.Module):
    def __init__(self, dim: int, heads: int, causal: bool = False):
        super().__init__()
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.heads = heads
        self.head_dim = dim // heads
        self.causal = causal
        self.q = nn.Linear(dim, dim)
        self.k = nn.Linear(dim, dim)
        self.v = nn.Linear(dim, dim)
        self.out = nn.Linear(dim, dim)

    def forward(
        self,
        x: torch.Tensor,
        q_delta: Optional[Callable] = None,
        v_delta: Optional[Callable] = None,
    ) -> torch.Tensor:
        s, dim = x.shape
        q = self.q(x)
        v = self.v(x)
        if q_delta is not None:
            q = q + q_delta(x)
        if v_delta is not None:
            v = v + v_delta(x)
        k = self.k(x)

        def split(t):
            return t.view(s, self.heads, self.head_dim).transpose(0, 1)

        q, k, v = split(q), split(k), split(v)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        if self.causal:
            mask = torch.triu(
                torch.ones(s, s, dtype=torch.bool, device=x.device), diagonal=1
            )
            scores = scores.masked_fill(mask, float("-inf"))
        attn = scores.softmax(dim=-1)
        merged = (attn @ v).transpose(0, 1).reshape(s, dim)
        return self.out(merged)


class TransformerBlock(nn.Module):
    """Pre-norm block: x + attn(ln(x)), then x + mlp(ln(x))."""

    def __init__(self, dim: int, heads: int, mlp_ratio: int = 4, causal: bool = False):
        super().__init__()
        self.ln1 = nn.LayerNorm(dim)
        self.attn = MultiHeadSelfAttention(dim, heads, causal=causal)
        self.ln2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, mlp_ratio * dim),
            nn.GELU(),
            nn.Linear(mlp_ratio * dim, dim),
        )

    def forward(self, x, q_delta=None, v_delta=None):
        x = x + self.attn(self.ln1(x), q_delta=q_delta, v_delta=v_delta)
        x = x + self.mlp(self.ln2(x))
        return x


class LoRAAdapter(nn.Module):
    """Low-rank additive delta for one weight matrix: (alpha/r) * B @ A.

    B starts at zero, so a fresh adapter is an exact identity on the forward
    pass; the base matrix is never touched.
    """

    def __init__(self, d_in: int, d_out: int, rank: int, alpha: float):
        super().__init__()
        self.rank = rank
        self.alpha = alpha
        self.A = nn.Parameter(torch.randn(rank, d_in) * 0.02)
        self.B = nn.Parameter(torch.zeros(d_out, rank))

    @property
    def scale(self) -> float:
        return self.alpha / self.rank

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.linear(F.linear(x, self.A), self.B) * self.scale
