"""Central configuration, validation, and parameter-budget accounting.

The desk-scale defaults below are deliberately tiny so that overfit and
gradient checks run in seconds. Every knob that a test or the CLI touches
lives here; anything derived (vocabulary layout, patch counts) is computed
from these fields, never stored separately.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, DegenerateInputError, InvalidInputError


class Modality(str, enum.Enum):
    TEXT = "text"
    IMAGE = "image"
    AUDIO = "audio"
    VIDEO = "video"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: Modalities that carry signal tokens, in vocabulary-layout order.
SIGNAL_MODALITIES = (Modality.IMAGE, Modality.AUDIO, Modality.VIDEO)


def _default_signal_counts() -> dict[Modality, int]:
    return {
        Modality.TEXT: 0,
        Modality.IMAGE: 5,
        Modality.AUDIO: 9,
        Modality.VIDEO: 25,
    }


@dataclass
class ModelConfig:
    seed: int = 0

    # encoder feature space and grouping
    feature_dim: int = 64
    grouping_stages: int = 2
    stage_sizes: tuple[int, ...] = (8, 4)
    grouping_mlp_ratio: int = 2

    # signal-token counts per modality (text must be 0)
    signal_counts: dict[Modality, int] = field(default_factory=_default_signal_counts)

    # core language model
    llm_layers: int = 4
    llm_heads: int = 4
    llm_dim: int = 128
    llm_max_len: int = 512
    lora_rank: int = 8
    lora_alpha: float = 16.0

    # per-modality output projection (paper profile is 512/4/4/4/0.1; desk shrinks)
    outproj_hidden: int = 64
    outproj_heads: int = 4
    outproj_enc_layers: int = 2
    outproj_dec_layers: int = 2
    outproj_dropout: float = 0.1

    # conditioner space consumed by the diffusion decoders
    cond_queries: int = 8
    cond_dim: int = 16

    # toy raw-payload shapes
    image_size: int = 16
    image_patch: int = 4
    audio_len: int = 64
    audio_window: int = 8
    video_frames: int = 2
    video_size: int = 8
    video_patch: int = 4

    # toy diffusion
    diffusion_steps: int = 100
    beta_start: float = 1e-4
    beta_end: float = 0.02
    diffusion_hidden: int = 64

    def __post_init__(self) -> None:
        self.stage_sizes = tuple(int(m) for m in self.stage_sizes)
        self.signal_counts = {Modality(k): int(v) for k, v in self.signal_counts.items()}

    # -- patch-count arithmetic ------------------------------------------
    def token_count(self, modality: Modality) -> int:
        if modality == Modality.IMAGE:
            return (self.image_size // self.image_patch) ** 2
        if modality == Modality.AUDIO:
            return self.audio_len // self.audio_window
        if modality == Modality.VIDEO:
            return self.video_frames * (self.video_size // self.video_patch) ** 2
        raise InvalidInputError(f"no patch tokens for modality {modality}")

    # -- (de)serialization ------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d["stage_sizes"] = list(self.stage_sizes)
        d["signal_counts"] = {m.value: c for m, c in self.signal_counts.items()}
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModelConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "signal_counts" in kwargs:
            counts = kwargs["signal_counts"]
            if not isinstance(counts, Mapping):
                raise ConfigError("signal_counts must be a mapping")
            valid = {m.value for m in Modality}
            bad = set(counts) - valid
            if bad:
                raise ConfigError(f"unknown signal_counts keys: {sorted(bad)}")
            kwargs["signal_counts"] = {Modality(k): int(v) for k, v in counts.items()}
        if "stage_sizes" in kwargs:
            kwargs["stage_sizes"] = tuple(kwargs["stage_sizes"])
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "ModelConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def content_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_config(cfg: ModelConfig) -> ValidationReport:
    """Collect every invariant violation; an empty report means the config is usable."""
    v: list[str] = []

    def positive(name: str, value) -> None:
        if value <= 0:
            v.append(f"{name} must be positive, got {value}")

    for name in (
        "feature_dim", "grouping_stages", "llm_layers", "llm_heads", "llm_dim",
        "llm_max_len", "lora_rank", "outproj_hidden", "outproj_heads",
        "outproj_enc_layers", "outproj_dec_layers", "cond_queries", "cond_dim",
        "image_size", "image_patch", "audio_len", "audio_window",
        "video_frames", "video_size", "video_patch", "diffusion_steps",
        "diffusion_hidden",
    ):
        positive(name, getattr(cfg, name))

    if len(cfg.stage_sizes) != cfg.grouping_stages:
        v.append(
            f"stage_sizes has {len(cfg.stage_sizes)} entries, expected {cfg.grouping_stages}"
        )
    if any(m < 1 for m in cfg.stage_sizes):
        v.append("every stage size must be >= 1")
    if any(a <= b for a, b in zip(cfg.stage_sizes, cfg.stage_sizes[1:])):
        v.append("stage sizes must decrease strictly")

    counts = cfg.signal_counts
    missing = [m.value for m in Modality if m not in counts]
    if missing:
        v.append(f"signal_counts missing modalities: {missing}")
    if counts.get(Modality.TEXT, 0) != 0:
        v.append("text must have 0 signal tokens")
    for m in SIGNAL_MODALITIES:
        if counts.get(m, 0) < 1:
            v.append(f"{m.value} signal count must be >= 1")

    if not (0.0 <= cfg.outproj_dropout < 1.0):
        v.append(f"outproj_dropout must be in [0, 1), got {cfg.outproj_dropout}")
    if cfg.llm_dim % cfg.llm_heads != 0:
        v.append("llm_dim must be divisible by llm_heads")
    if cfg.outproj_hidden % cfg.outproj_heads != 0:
        v.append("outproj_hidden must be divisible by outproj_heads")
    if cfg.image_size % cfg.image_patch != 0:
        v.append("image_size must be divisible by image_patch")
    if cfg.audio_len % cfg.audio_window != 0:
        v.append("audio_len must be divisible by audio_window")
    if cfg.video_size % cfg.video_patch != 0:
        v.append("video_size must be divisible by video_patch")
    if not (0.0 < cfg.beta_start <= cfg.beta_end < 1.0):
        v.append("betas must satisfy 0 < beta_start <= beta_end < 1")

    return ValidationReport(v)


def ensure_valid(cfg: ModelConfig) -> ModelConfig:
    report = validate_config(cfg)
    if not report.valid:
        raise ConfigError("; ".join(report.violations))
    return cfg


# ---------------------------------------------------------------------------
# Parameter budget accounting
# ---------------------------------------------------------------------------

ROLES = ("frozen", "trainable")


@dataclass(frozen=True)
class BudgetEntry:
    name: str
    count: int
    role: str


@dataclass
class ParamBudget:
    entries: list[BudgetEntry]
    trainable_total: int
    frozen_total: int
    ratio: float

    def table(self) -> str:
        width = max(len(e.name) for e in self.entries)
        lines = [f"{'component':<{width}}  {'params':>14}  role"]
        for e in self.entries:
            lines.append(f"{e.name:<{width}}  {e.count:>14,}  {e.role}")
        lines.append(
            f"{'total':<{width}}  trainable={self.trainable_total:,} "
            f"frozen={self.frozen_total:,} ratio={self.ratio:.6f}"
        )
        return "\n".join(lines)


def param_budget(entries: Iterable[Sequence]) -> ParamBudget:
    """Fold (name, count, role) triples into totals and the trainable ratio.

    The ratio is trainable / (trainable + frozen), computed in exact integer
    arithmetic before the single float division.
    """
    parsed: list[BudgetEntry] = []
    for name, count, role in entries:
        count = int(count)
        if count < 0:
            raise InvalidInputError(f"negative parameter count for {name}")
        if role not in ROLES:
            raise InvalidInputError(f"role must be one of {ROLES}, got {role!r}")
        parsed.append(BudgetEntry(str(name), count, role))
    trainable = sum(e.count for e in parsed if e.role == "trainable")
    frozen = sum(e.count for e in parsed if e.role == "frozen")
    total = trainable + frozen
    if total == 0:
        raise DegenerateInputError("all parameter counts are zero; ratio undefined")
    return ParamBudget(parsed, trainable, frozen, trainable / total)


#: Published-scale component sizes used by the CLI's --paper-scale budget.
#: Trainable: the grouped input projection, the low-rank LLM adapters, and the
#: three per-modality output projections. Frozen: the shared multimodal
#: encoder, the 7B language backbone, and the three diffusion decoders.
PAPER_SCALE_ENTRIES: tuple[tuple[str, int, str], ...] = (
    ("input projection (grouping)", 28_000_000, "trainable"),
    ("llm low-rank adapters", 33_000_000, "trainable"),
    ("output projection (image)", 31_000_000, "trainable"),
    ("output projection (audio)", 31_000_000, "trainable"),
    ("output projection (video)", 32_000_000, "trainable"),
    ("multimodal encoder", 1_200_000_000, "frozen"),
    ("language backbone", 7_000_000_000, "frozen"),
    ("image diffusion decoder", 1_300_000_000, "frozen"),
    ("video diffusion decoder", 1_800_000_000, "frozen"),
    ("audio diffusion decoder", 975_000_000, "frozen"),
)
