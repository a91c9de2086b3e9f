"""Optimal fixed-length minimum-energy codebooks.

For a block length n the cheapest selection of m codewords is the m words
of smallest popcount. The average cost of that selection under a uniform
source has a closed form built from exact binomial layer counts, and the
optimizer simply scans block lengths n in [ceil(log2 m), n_max] for the
argmin. All combinatorial quantities use exact big-integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .codebook import Codebook
from .costmodel import CostModel, SymbolSource, as_source, assign_to_symbols
from .errors import InfeasibleError, ValidationError


def _check_feasible(n: int, m: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"n: must be an integer >= 1, got {n!r}")
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise ValidationError(f"m: must be an integer >= 2, got {m!r}")
    if 2**n < m:
        raise InfeasibleError(f"block length n={n} has only {2**n} codewords, need m={m}")


def l_min(n: int, m: int) -> int:
    """Smallest popcount bound l such that words of weight <= l cover m symbols."""
    _check_feasible(n, m)
    covered = 0
    for l in range(n + 1):
        covered += math.comb(n, l)
        if covered >= m:
            return l
    raise AssertionError("unreachable: 2**n >= m guarantees coverage")


def min_weight_sum(n: int, m: int) -> int:
    """Exact minimum total popcount over any m distinct n-bit words.

    Fills whole weight layers 0, 1, ... and tops up from the first layer
    that overshoots m.
    """
    bound = l_min(n, m)
    full_count = sum(math.comb(n, k) for k in range(bound))
    full_weight = sum(i * math.comb(n, i) for i in range(bound))
    return full_weight + bound * (m - full_count)


def fixed_cost(n: int, m: int, cm: CostModel) -> float:
    """Average cost of the optimal m-word fixed-length code, uniform source.

    Equals n*beta0 + delta_beta * W / m with W the exact minimum total
    popcount, so beta0 = 0 needs no special casing.
    """
    weight = min_weight_sum(n, m)
    return n * cm.beta0 + cm.delta_beta * weight / m


def _next_same_weight(v: int) -> int:
    """Next larger integer with the same popcount (works on big ints)."""
    c = v & -v
    r = v + c
    return (((r ^ v) >> 2) // c) | r


def cheapest_words(n: int, m: int) -> list[str]:
    """The m cheapest n-bit words: popcount ascending, numeric value ascending."""
    _check_feasible(n, m)
    words: list[str] = []
    weight = 0
    while len(words) < m:
        take = min(math.comb(n, weight), m - len(words))
        v = (1 << weight) - 1
        for i in range(take):
            words.append(format(v, f"0{n}b"))
            if i + 1 < take:
                v = _next_same_weight(v)
        weight += 1
    return words


def _assignment_cost(n: int, m: int, cm: CostModel, probs_desc: Sequence[float]) -> float:
    """Average cost of the cheapest m-word selection for a general source.

    Cheapest codewords pair with the largest probabilities; iterating the
    popcount layers avoids materializing the codewords.
    """
    bound = l_min(n, m)
    total = 0.0
    idx = 0
    for w in range(bound + 1):
        if w < bound:
            count = math.comb(n, w)
        else:
            count = m - idx
        cost_w = n * cm.beta0 + w * cm.delta_beta
        for _ in range(count):
            total += probs_desc[idx] * cost_w
            idx += 1
    return total


@dataclass(frozen=True)
class FixedScanRow:
    n: int
    lmin: int
    cost: float


@dataclass(frozen=True)
class FixedScan:
    """Cost of the best fixed-length code at every scanned block length."""

    n_min: int
    n_max: int
    rows: tuple[FixedScanRow, ...]
    n_opt: int

    @property
    def costs(self) -> tuple[float, ...]:
        return tuple(r.cost for r in self.rows)

    def best_cost(self) -> float:
        return self.rows[self.n_opt - self.n_min].cost


def scan_to_csv_rows(scan: FixedScan) -> list[str]:
    lines = ["n,lmin,cost"]
    lines += [f"{r.n},{r.lmin},{r.cost!r}" for r in scan.rows]
    return lines


def optimize_fixed(
    source: SymbolSource | int,
    cm: CostModel,
    n_max: int | None = None,
) -> tuple[Codebook, FixedScan]:
    """Scan block lengths and materialize the optimal fixed-length codebook.

    Ties between block lengths resolve to the smaller n (better rate).
    The emitted codebook assigns cheaper codewords to more probable
    symbols; within a popcount layer codewords are used in ascending
    numeric order.
    """
    src = as_source(source)
    m = src.m
    n_min = (m - 1).bit_length()
    if n_max is None:
        n_max = m - 1
    if not isinstance(n_max, int) or isinstance(n_max, bool):
        raise ValidationError(f"n_max: must be an integer, got {n_max!r}")
    if n_max < n_min:
        raise InfeasibleError(f"n_max={n_max} is below the minimum feasible length {n_min}")

    uniform = src.is_uniform
    probs_desc = tuple(reversed(src.probs)) if not uniform else ()

    rows: list[FixedScanRow] = []
    n_opt = n_min
    best = math.inf
    for n in range(n_min, n_max + 1):
        if uniform:
            cost = fixed_cost(n, m, cm)
        else:
            cost = _assignment_cost(n, m, cm, probs_desc)
        rows.append(FixedScanRow(n=n, lmin=l_min(n, m), cost=cost))
        if cost < best:
            best = cost
            n_opt = n

    words = cheapest_words(n_opt, m)
    entries = assign_to_symbols(words, src)
    codebook = Codebook(kind="fixed", entries=entries, n=n_opt)
    scan = FixedScan(n_min=n_min, n_max=n_max, rows=tuple(rows), n_opt=n_opt)
    return codebook, scan
