import random

import pytest

import mecode as mc
from mecode.errors import DecodeError, ValidationError

from conftest import random_source


def make_random_prefix_codebook(rng: random.Random, m: int, max_len: int = 16) -> mc.Codebook:
    """Random full prefix code: start from {0, 1} and split random leaves."""
    words = ["0", "1"]
    while len(words) < m:
        candidates = [w for w in words if len(w) < max_len]
        w = candidates[rng.randrange(len(candidates))]
        words.remove(w)
        words.extend([w + "0", w + "1"])
    rng.shuffle(words)
    return mc.Codebook(kind="prefix", entries=tuple(words))


class TestBitStream:
    def test_bytes_round_trip(self):
        rng = random.Random(1)
        for length in (0, 1, 7, 8, 9, 63, 64, 65, 1000):
            bits = "".join(rng.choice("01") for _ in range(length))
            bs = mc.BitStream(bits)
            assert mc.BitStream.from_bytes(bs.to_bytes()) == bs

    def test_header_is_eight_little_endian_bytes(self):
        data = mc.BitStream("101").to_bytes()
        assert data[:8] == (3).to_bytes(8, "little")
        assert data[8:] == bytes([0b10100000])

    def test_header_validation(self):
        with pytest.raises(ValidationError, match="header"):
            mc.BitStream.from_bytes(b"\x01")
        bad = (9).to_bytes(8, "little") + b"\xff"  # 9 bits need 2 bytes
        with pytest.raises(ValidationError, match="bits"):
            mc.BitStream.from_bytes(bad)

    def test_rejects_nonbinary(self):
        with pytest.raises(ValidationError):
            mc.BitStream("012")


class TestEncode:
    def test_prefix_example(self, table4_prefix):
        assert mc.encode([7, 7], table4_prefix).bits == "000000000000"

    def test_fixed_example(self, table4_fixed):
        assert mc.encode([0, 1, 2], table4_fixed).bits == "000001010"

    def test_empty(self, table4_prefix):
        assert mc.encode([], table4_prefix).bits == ""

    def test_out_of_range(self, table4_fixed):
        with pytest.raises(ValidationError, match="symbols\\[1\\]"):
            mc.encode([0, 8], table4_fixed)


class TestDecode:
    def test_prefix_example(self, table4_prefix):
        assert mc.decode(mc.BitStream("11" "10" "01" "001"), table4_prefix) == [0, 1, 2, 3]

    def test_fixed_length_mismatch(self, table4_fixed):
        with pytest.raises(DecodeError) as err:
            mc.decode(mc.BitStream("0000000"), table4_fixed)
        assert err.value.bit_offset == 6

    def test_prefix_dangling_suffix(self, table4_prefix):
        with pytest.raises(DecodeError) as err:
            mc.decode(mc.BitStream("11" "00"), table4_prefix)
        assert err.value.bit_offset == 2

    def test_prefix_unmatched_path(self):
        # the only word under "0" is "00", so "01" is a dead branch
        cb = mc.Codebook(kind="prefix", entries=("00", "1"))
        with pytest.raises(DecodeError) as err:
            mc.decode(mc.BitStream("1" "01"), cb)
        assert err.value.bit_offset == 1

    def test_round_trip_fixed_and_prefix(self, table4_fixed, table4_prefix):
        rng = random.Random(42)
        symbols = [rng.randrange(8) for _ in range(10_000)]
        for cb in (table4_fixed, table4_prefix):
            assert mc.decode(mc.encode(symbols, cb), cb) == symbols

    def test_round_trip_random_codebooks(self):
        rng = random.Random(7)
        for _ in range(20):
            m = rng.randint(2, 24)
            cb = make_random_prefix_codebook(rng, m)
            symbols = [rng.randrange(m) for _ in range(500)]
            assert mc.decode(mc.encode(symbols, cb), cb) == symbols

    def test_online_decoding_at_boundaries(self, table4_prefix):
        rng = random.Random(3)
        symbols = [rng.randrange(8) for _ in range(50)]
        bits = mc.encode(symbols, table4_prefix).bits
        offset = 0
        for count, s in enumerate(symbols, start=1):
            offset += len(table4_prefix.entries[s])
            assert mc.decode(mc.BitStream(bits[:offset]), table4_prefix) == symbols[:count]


class TestChannelInversion:
    def test_swapped_model_inverts_on_air(self, table4_prefix):
        swapped = mc.CostModel(5, 1, 1, 1)
        assert swapped.swapped
        plain = mc.encode([7], table4_prefix).bits
        on_air = mc.encode([7], table4_prefix, swapped).bits
        assert on_air == plain.translate(str.maketrans("01", "10"))

    def test_round_trip_with_inversion(self, table4_prefix, table4_fixed):
        swapped = mc.CostModel(5, 1, 1, 1)
        rng = random.Random(8)
        symbols = [rng.randrange(8) for _ in range(1000)]
        for cb in (table4_prefix, table4_fixed):
            assert mc.decode(mc.encode(symbols, cb, swapped), cb, swapped) == symbols

    def test_stream_cost_invariant_under_inversion(self, table4_prefix):
        swapped = mc.CostModel(5, 1, 1, 1)
        canonical = mc.CostModel(1, 5, 1, 1)
        symbols = [0, 3, 7, 5]
        inverted_stream = mc.encode(symbols, table4_prefix, swapped)
        plain_stream = mc.encode(symbols, table4_prefix, canonical)
        assert mc.stream_cost(inverted_stream, table4_prefix, swapped) == mc.stream_cost(
            plain_stream, table4_prefix, canonical
        )


class TestStreamCost:
    def test_all_symbols_once(self, table4_prefix, gamma5):
        assert mc.stream_cost(list(range(8)), table4_prefix, gamma5) == 62.0

    def test_empty(self, table4_prefix, gamma5):
        assert mc.stream_cost([], table4_prefix, gamma5) == 0.0
        assert mc.stream_cost(mc.BitStream(""), table4_prefix, gamma5) == 0.0

    def test_single_fixed_word(self, table4_fixed, gamma5):
        assert mc.stream_cost([0], table4_fixed, gamma5) == 3 * gamma5.beta0

    def test_matches_sum_of_codeword_costs(self, table4_prefix, gamma5):
        rng = random.Random(12)
        symbols = [rng.randrange(8) for _ in range(200)]
        expected = sum(mc.codeword_cost(table4_prefix.entries[s], gamma5) for s in symbols)
        assert mc.stream_cost(symbols, table4_prefix, gamma5) == pytest.approx(expected, rel=1e-12)
        stream = mc.encode(symbols, table4_prefix)
        assert mc.stream_cost(stream, table4_prefix, gamma5) == pytest.approx(expected, rel=1e-12)


class TestEmpiricalCost:
    def test_sampled_cost_approaches_average(self, gamma5):
        rng = random.Random(0)
        src = random_source(rng, 8)
        cb = mc.optimize_prefix(src, gamma5, dp=7)
        expected = mc.average_cost(src, cb, gamma5)
        n = 20_000
        weights = src.probs_by_symbol()
        symbols = rng.choices(range(8), weights=weights, k=n)
        empirical = mc.stream_cost(symbols, cb, gamma5) / n
        assert abs(empirical - expected) / expected < 0.05
