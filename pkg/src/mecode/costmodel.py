"""Asymmetric per-bit transmission cost model and symbol source.

The cost model is kept dimensionless: per-bit energies beta0/beta1 are in
arbitrary "energy units" and only their ratio gamma = beta1/beta0 drives
the optimizers. The rfid module converts physical watts and seconds into
these units.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .codebook import Codeword, as_codeword
from .errors import ValidationError

PROB_SUM_TOL = 1e-9
UNIFORM_TOL = 1e-12


@dataclass(frozen=True)
class CostModel:
    """Per-bit energies and durations, normalized so beta0 <= beta1.

    If constructed with beta0 > beta1, the two bit roles are exchanged
    (energies and durations together) and ``swapped`` records that the
    codec must invert bits at the channel boundary.

    A zero beta0 is legal and means sending a zero bit is free; ``gamma``
    is then flagged infinite rather than computed.
    """

    beta0: float
    beta1: float
    t0: float
    t1: float
    swapped: bool = False

    def __post_init__(self) -> None:
        for name in ("beta0", "beta1", "t0", "t1"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{name}: must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(f"{name}: must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.beta0 < 0:
            raise ValidationError(f"beta0: must be >= 0, got {self.beta0}")
        if self.beta1 <= 0:
            raise ValidationError(f"beta1: must be > 0, got {self.beta1}")
        if self.t0 <= 0:
            raise ValidationError(f"t0: must be > 0, got {self.t0}")
        if self.t1 <= 0:
            raise ValidationError(f"t1: must be > 0, got {self.t1}")
        if self.beta0 > self.beta1:
            b0, b1 = self.beta1, self.beta0
            d0, d1 = self.t1, self.t0
            object.__setattr__(self, "beta0", b0)
            object.__setattr__(self, "beta1", b1)
            object.__setattr__(self, "t0", d0)
            object.__setattr__(self, "t1", d1)
            object.__setattr__(self, "swapped", True)

    @property
    def delta_beta(self) -> float:
        """beta1 - beta0, >= 0 after normalization."""
        return self.beta1 - self.beta0

    @property
    def gamma_is_infinite(self) -> bool:
        """Explicit flag for the beta0 = 0 limit (free zero bits)."""
        return self.beta0 == 0.0

    @property
    def gamma(self) -> float:
        """Cost ratio beta1/beta0; math.inf when beta0 = 0."""
        if self.gamma_is_infinite:
            return math.inf
        return self.beta1 / self.beta0


def model_from_gamma(gamma: float, t0: float = 1.0, t1: float = 1.0, beta0: float = 1.0) -> CostModel:
    """Cost model with the given ratio; gamma = inf maps to beta0 = 0."""
    if math.isinf(gamma):
        return CostModel(0.0, 1.0, t0, t1)
    if gamma < 1.0:
        raise ValidationError(f"gamma: must be >= 1 (canonical orientation), got {gamma}")
    return CostModel(beta0, beta0 * gamma, t0, t1)


def cost_model_to_json(cm: CostModel) -> str:
    """Serialize in the orientation the caller originally supplied."""
    if cm.swapped:
        doc = {"beta0": cm.beta1, "beta1": cm.beta0, "t0": cm.t1, "t1": cm.t0}
    else:
        doc = {"beta0": cm.beta0, "beta1": cm.beta1, "t0": cm.t0, "t1": cm.t1}
    return json.dumps(doc, sort_keys=True)


def cost_model_from_json(text: str) -> CostModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"cost model JSON is malformed: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("cost model JSON must be an object")
    required = {"beta0", "beta1", "t0", "t1"}
    unknown = set(doc) - required
    if unknown:
        raise ValidationError(f"cost model JSON has unknown fields: {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise ValidationError(f"cost model JSON is missing fields: {sorted(missing)}")
    return CostModel(doc["beta0"], doc["beta1"], doc["t0"], doc["t1"])


@dataclass(frozen=True)
class SymbolSource:
    """An M-symbol source with probabilities kept sorted ascending.

    ``probs[j]`` is the j-th smallest probability and ``order[j]`` the
    original symbol index it belongs to, so user-facing symbol order is
    recoverable.
    """

    probs: tuple[float, ...]
    order: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.probs)

    @property
    def is_uniform(self) -> bool:
        return self.probs[-1] - self.probs[0] <= UNIFORM_TOL

    def probs_by_symbol(self) -> tuple[float, ...]:
        """Probabilities in original symbol order."""
        out = [0.0] * self.m
        for p, idx in zip(self.probs, self.order):
            out[idx] = p
        return tuple(out)

    def ranks_by_probability(self) -> tuple[int, ...]:
        """Symbol indices from most to least probable; ties keep index order."""
        by_symbol = self.probs_by_symbol()
        return tuple(sorted(range(self.m), key=lambda i: (-by_symbol[i], i)))


def symbol_source(probs: Iterable[float]) -> SymbolSource:
    """Build a source from probabilities given in symbol order."""
    values = [float(p) for p in probs]
    if len(values) < 2:
        raise ValidationError(f"probs: need at least 2 symbols, got {len(values)}")
    for i, p in enumerate(values):
        if not math.isfinite(p) or p < 0:
            raise ValidationError(f"probs[{i}]: must be a finite probability >= 0, got {p!r}")
    total = math.fsum(values)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValidationError(f"probs: must sum to 1 within {PROB_SUM_TOL}, got {total!r}")
    ordering = sorted(range(len(values)), key=lambda i: (values[i], i))
    return SymbolSource(
        probs=tuple(values[i] for i in ordering),
        order=tuple(ordering),
    )


def uniform_source(m: int) -> SymbolSource:
    """Equiprobable source over m >= 2 symbols."""
    if not isinstance(m, int) or isinstance(m, bool):
        raise ValidationError(f"m: must be an integer, got {m!r}")
    if m < 2:
        raise ValidationError(f"m: must be >= 2, got {m}")
    return symbol_source([1.0 / m] * m)


def as_source(source: SymbolSource | int) -> SymbolSource:
    """Accept either a SymbolSource or a symbol count (treated as uniform)."""
    if isinstance(source, SymbolSource):
        return source
    return uniform_source(source)


def source_to_json(src: SymbolSource) -> str:
    return json.dumps({"probs": list(src.probs_by_symbol())})


def source_from_json(text: str) -> SymbolSource:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"source JSON is malformed: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("source JSON must be an object")
    unknown = set(doc) - {"probs"}
    if unknown:
        raise ValidationError(f"source JSON has unknown fields: {sorted(unknown)}")
    if "probs" not in doc or not isinstance(doc["probs"], list):
        raise ValidationError("source JSON requires a 'probs' list")
    return symbol_source(doc["probs"])


def codeword_cost(cw: Codeword | str, cm: CostModel) -> float:
    """Transmission energy of one codeword: beta0*N0 + beta1*N1."""
    word = as_codeword(cw)
    return cm.beta0 * word.n0() + cm.beta1 * word.n1()


def codeword_duration(cw: Codeword | str, cm: CostModel) -> float:
    """On-air time of one codeword: t0*N0 + t1*N1 seconds."""
    word = as_codeword(cw)
    return cm.t0 * word.n0() + cm.t1 * word.n1()


def assign_to_symbols(words_cheapest_first: Sequence[str], src: SymbolSource) -> tuple[str, ...]:
    """Map codewords (cheapest first) onto symbols, cheapest to most probable.

    Returns the entry list in original symbol order. Probability ties keep
    ascending symbol index, so uniform sources get a stable, reproducible
    assignment.
    """
    if len(words_cheapest_first) != src.m:
        raise ValidationError(
            f"words: expected {src.m} codewords, got {len(words_cheapest_first)}"
        )
    entries = [""] * src.m
    for word, symbol in zip(words_cheapest_first, src.ranks_by_probability()):
        entries[symbol] = str(word)
    return tuple(entries)
