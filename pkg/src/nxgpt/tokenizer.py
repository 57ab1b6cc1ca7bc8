"""Character-level tokenizer and the signal-token vocabulary layout.

Plain text covers a fixed 96-symbol set (printable ASCII plus newline). The
ids are laid out as::

    0        <pad>
    1        <bos>
    2        <eos>
    3..98    characters
    99..     signal tokens, one contiguous run per modality
             (image, then audio, then video)

Tokenizing plain text can never produce a signal id: the literal string
"[IMG_0]" comes out as seven character ids. Signal ids enter a sequence only
through explicit construction (training targets, generation).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .config import Modality, SIGNAL_MODALITIES
from .errors import TokenizationError

CHARSET = "".join(chr(c) for c in range(32, 127)) + "\n"  # 96 symbols
PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
CHAR_BASE = 3
TEXT_VOCAB_SIZE = CHAR_BASE + len(CHARSET)  # 99

_CHAR_TO_ID = {ch: CHAR_BASE + i for i, ch in enumerate(CHARSET)}

SIGNAL_PREFIX = {
    Modality.IMAGE: "IMG",
    Modality.AUDIO: "AUD",
    Modality.VIDEO: "VID",
}


@dataclass(frozen=True)
class SignalVocabulary:
    """Contiguous signal-token id ranges appended after the text vocabulary."""

    counts: tuple[tuple[Modality, int], ...]
    starts: tuple[tuple[Modality, int], ...]

    @classmethod
    def from_counts(cls, counts: Mapping[Modality, int]) -> "SignalVocabulary":
        if counts.get(Modality.TEXT, 0) != 0:
            raise TokenizationError("text cannot have signal tokens")
        norm = []
        starts = []
        cursor = TEXT_VOCAB_SIZE
        for mod in SIGNAL_MODALITIES:
            count = int(counts.get(mod, 0))
            if count < 1:
                raise TokenizationError(f"{mod.value} needs at least one signal token")
            norm.append((mod, count))
            starts.append((mod, cursor))
            cursor += count
        return cls(tuple(norm), tuple(starts))

    @property
    def count_map(self) -> dict[Modality, int]:
        return dict(self.counts)

    @property
    def start_map(self) -> dict[Modality, int]:
        return dict(self.starts)

    @property
    def vocab_size(self) -> int:
        return TEXT_VOCAB_SIZE + sum(c for _, c in self.counts)

    def range_of(self, modality: Modality) -> range:
        start = self.start_map[modality]
        return range(start, start + self.count_map[modality])

    def run_ids(self, modality: Modality) -> list[int]:
        return list(self.range_of(modality))

    def is_signal(self, token_id: int) -> bool:
        return TEXT_VOCAB_SIZE <= token_id < self.vocab_size

    def modality_of(self, token_id: int) -> Modality:
        for mod, start in self.starts:
            if start <= token_id < start + self.count_map[mod]:
                return mod
        raise TokenizationError(f"id {token_id} is not a signal token")

    def index_of(self, token_id: int) -> int:
        return token_id - self.start_map[self.modality_of(token_id)]

    def token_text(self, token_id: int) -> str:
        mod = self.modality_of(token_id)
        return f"[{SIGNAL_PREFIX[mod]}_{self.index_of(token_id)}]"


class CharTokenizer:
    """Deterministic character tokenizer over the fixed symbol set."""

    def __init__(self, vocab: SignalVocabulary):
        self.vocab = vocab

    def tokenize(self, text: str) -> list[int]:
        ids = []
        for ch in text:
            tid = _CHAR_TO_ID.get(ch)
            if tid is None:
                raise TokenizationError(f"unsupported character {ch!r}")
            ids.append(tid)
        return ids

    def detokenize(self, ids: Iterable[int]) -> str:
        chars = []
        for tid in ids:
            if not (CHAR_BASE <= tid < TEXT_VOCAB_SIZE):
                raise TokenizationError(f"id {tid} is not a plain character")
            chars.append(CHARSET[tid - CHAR_BASE])
        return "".join(chars)

    def display(self, ids: Iterable[int]) -> str:
        """Human-readable rendering including specials; for logs and debugging."""
        parts = []
        for tid in ids:
            if tid == PAD_ID:
                parts.append("<pad>")
            elif tid == BOS_ID:
                parts.append("<bos>")
            elif tid == EOS_ID:
                parts.append("<eos>")
            elif CHAR_BASE <= tid < TEXT_VOCAB_SIZE:
                parts.append(CHARSET[tid - CHAR_BASE])
            else:
                parts.append(self.vocab.token_text(tid))
        return "".join(parts)
