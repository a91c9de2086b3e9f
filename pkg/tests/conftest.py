import random

import pytest

import mecode as mc

# Reference 8-symbol codebooks used throughout: the gamma=5 fixed-length
# identity code and the cost-equivalent prefix code with the same entries
# as the published mapping table (symbol order preserved).
TABLE4_FIXED_WORDS = tuple(format(i, "03b") for i in range(8))
TABLE4_PREFIX_WORDS = ("11", "10", "01", "001", "0001", "00001", "000001", "000000")


@pytest.fixture
def gamma5() -> mc.CostModel:
    return mc.CostModel(1.0, 5.0, 1.0, 1.0)


@pytest.fixture
def table4_fixed() -> mc.Codebook:
    return mc.Codebook(kind="fixed", entries=TABLE4_FIXED_WORDS)


@pytest.fixture
def table4_prefix() -> mc.Codebook:
    return mc.Codebook(kind="prefix", entries=TABLE4_PREFIX_WORDS)


def random_source(rng: random.Random, m: int) -> mc.SymbolSource:
    raw = [rng.random() + 0.05 for _ in range(m)]
    total = sum(raw)
    return mc.symbol_source([v / total for v in raw])
