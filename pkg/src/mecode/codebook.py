"""Codeword and codebook value types shared by the optimizers and the codec.

A codebook stores its entries in original symbol order, so encoding symbol
``i`` is a plain index lookup. Probability-sorted views exist only inside
the optimizers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import ValidationError

CODEBOOK_KINDS = ("fixed", "prefix")


@dataclass(frozen=True)
class Codeword:
    """Non-empty binary word stored as a string of '0'/'1' characters."""

    bits: str

    def __post_init__(self) -> None:
        if not self.bits:
            raise ValidationError("bits: codeword must not be empty")
        if set(self.bits) - {"0", "1"}:
            raise ValidationError(
                f"bits: codeword may contain only '0' and '1', got {self.bits!r}"
            )

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits

    def n0(self) -> int:
        """Count of zero bits."""
        return self.bits.count("0")

    def n1(self) -> int:
        """Count of one bits."""
        return self.bits.count("1")


def as_codeword(value: Codeword | str) -> Codeword:
    return value if isinstance(value, Codeword) else Codeword(value)


def prefix_free(words: Iterable[str]) -> bool:
    """True iff no word in the collection is a prefix of another.

    Sorting makes the check linear: if a word prefixes any other, it also
    prefixes its immediate successor in sorted order.
    """
    ws = sorted(str(w) for w in words)
    return all(not ws[i + 1].startswith(ws[i]) for i in range(len(ws) - 1))


@dataclass(frozen=True)
class Codebook:
    """Symbol-indexed codeword table, either fixed length or prefix-free.

    ``entries[i]`` is the codeword for symbol ``i``. For ``kind="fixed"``
    all entries share the common length ``n``; for ``kind="prefix"`` the
    entries are pairwise prefix-free.
    """

    kind: str
    entries: tuple[Codeword, ...]
    n: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in CODEBOOK_KINDS:
            raise ValidationError(f"kind: must be one of {CODEBOOK_KINDS}, got {self.kind!r}")
        entries = tuple(as_codeword(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValidationError("entries: codebook must contain at least one codeword")
        seen = {e.bits for e in entries}
        if len(seen) != len(entries):
            raise ValidationError("entries: codewords must be distinct")
        if self.kind == "fixed":
            lengths = {len(e) for e in entries}
            if len(lengths) != 1:
                raise ValidationError("entries: fixed codebook requires equal-length codewords")
            common = lengths.pop()
            if self.n is None:
                object.__setattr__(self, "n", common)
            elif self.n != common:
                raise ValidationError(f"n: declared length {self.n} != entry length {common}")
        else:
            if self.n is not None:
                raise ValidationError("n: only meaningful for fixed codebooks")
            if not prefix_free(e.bits for e in entries):
                raise ValidationError("entries: prefix codebook has a codeword prefixing another")

    @property
    def m(self) -> int:
        """Number of symbols covered."""
        return len(self.entries)

    def max_length(self) -> int:
        return max(len(e) for e in self.entries)


def is_prefix_free(cb: Codebook | Iterable[str]) -> bool:
    """Pairwise prefix-freedom of a codebook or a plain word collection."""
    if isinstance(cb, Codebook):
        return prefix_free(e.bits for e in cb.entries)
    return prefix_free(cb)


def kraft_sum(cb: Codebook) -> Fraction:
    """Exact sum of 2**(-len) over all entries; <= 1 for any prefix-free set."""
    return sum((Fraction(1, 2 ** len(e)) for e in cb.entries), Fraction(0))


def codebook_to_json(cb: Codebook) -> str:
    doc: dict = {"kind": cb.kind, "entries": [e.bits for e in cb.entries]}
    if cb.kind == "fixed":
        doc["n"] = cb.n
    return json.dumps(doc, sort_keys=True)


def codebook_from_json(text: str) -> Codebook:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"codebook JSON is malformed: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("codebook JSON must be an object")
    unknown = set(doc) - {"kind", "n", "entries"}
    if unknown:
        raise ValidationError(f"codebook JSON has unknown fields: {sorted(unknown)}")
    if "kind" not in doc or "entries" not in doc:
        raise ValidationError("codebook JSON requires 'kind' and 'entries'")
    if not isinstance(doc["entries"], list):
        raise ValidationError("entries: must be a list of bit strings")
    entries = tuple(Codeword(str(e)) for e in doc["entries"])
    n = doc.get("n")
    if n is not None and not isinstance(n, int):
        raise ValidationError(f"n: must be an integer, got {n!r}")
    return Codebook(kind=doc["kind"], entries=entries, n=n)
