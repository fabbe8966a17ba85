"""Output symbol inventory and the CTC collapse map.

Symbol ids follow a fixed order: ``a``-``z`` (0-25), then the space
(written ``<sp>`` in files), ``&``, ``'``, ``.``, ``@`` (26-30) and finally
the CTC blank (31).
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

SPACE_TOKEN = "<sp>"
BLANK_TOKEN = "<blank>"

DEFAULT_SYMBOLS = tuple(string.ascii_lowercase) + (" ", "&", "'", ".", "@")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...] = DEFAULT_SYMBOLS

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be unique")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def blank_id(self) -> int:
        return len(self.symbols)

    @property
    def size_with_blank(self) -> int:
        return len(self.symbols) + 1

    def encode(self, text: str) -> tuple[int, ...]:
        """Map text to symbol ids, case-folding first.

        Raises ``ValueError`` naming the first character outside the alphabet.
        """
        ids = []
        for pos, ch in enumerate(text.lower()):
            try:
                ids.append(self._index[ch])
            except KeyError:
                raise ValueError(
                    f"character {ch!r} at position {pos} is not in the alphabet"
                ) from None
        return tuple(ids)

    def decode(self, labels: Sequence[int]) -> str:
        out = []
        for i in labels:
            if not 0 <= i < len(self.symbols):
                raise ValueError(f"label id {i} is not a non-blank symbol")
            out.append(self.symbols[i])
        return "".join(out)

    def tokens(self, with_blank: bool = True) -> list[str]:
        """Whitespace-free symbol names, as written into file headers."""
        toks = [SPACE_TOKEN if s == " " else s for s in self.symbols]
        if with_blank:
            toks.append(BLANK_TOKEN)
        return toks

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Alphabet":
        toks = list(tokens)
        if toks and toks[-1] == BLANK_TOKEN:
            toks = toks[:-1]
        return cls(tuple(" " if t == SPACE_TOKEN else t for t in toks))


ALPHABET = Alphabet()


def collapse(path: Sequence[int], blank: int) -> tuple[int, ...]:
    """Merge runs of identical labels, then drop blanks."""
    out = []
    prev = None
    for k in path:
        if k != prev and k != blank:
            out.append(int(k))
        prev = k
    return tuple(out)


def repeat_count(labels: Sequence[int]) -> int:
    """Number of adjacent equal pairs; each one forces a blank frame in CTC."""
    return sum(1 for a, b in zip(labels, labels[1:]) if a == b)


def min_frames(labels: Sequence[int]) -> int:
    """Shortest path length whose collapse can be ``labels``."""
    return len(labels) + repeat_count(labels)
