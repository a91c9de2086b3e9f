"""Bitstream encoder/decoder for fixed-length and prefix codebooks.

Streams serialize as an 8-byte little-endian bit-length header followed by
the bits packed MSB-first, so byte padding is never ambiguous. When a cost
model carries the swapped flag (caller supplied beta0 > beta1), the codec
inverts bits at the channel boundary so the canonical codebook still
produces channel-correct output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .codebook import Codebook
from .costmodel import CostModel
from .errors import DecodeError, ValidationError

_INVERT = str.maketrans("01", "10")


@dataclass(frozen=True)
class BitStream:
    """Immutable bit sequence stored as a '0'/'1' string."""

    bits: str

    def __post_init__(self) -> None:
        if set(self.bits) - {"0", "1"}:
            raise ValidationError("bits: stream may contain only '0' and '1'")

    def __len__(self) -> int:
        return len(self.bits)

    def to_bytes(self) -> bytes:
        header = len(self.bits).to_bytes(8, "little")
        padded = self.bits + "0" * (-len(self.bits) % 8)
        payload = bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))
        return header + payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitStream":
        if len(data) < 8:
            raise ValidationError(f"stream: missing 8-byte length header, got {len(data)} bytes")
        length = int.from_bytes(data[:8], "little")
        payload = data[8:]
        expected = (length + 7) // 8
        if len(payload) != expected:
            raise ValidationError(
                f"stream: header declares {length} bits ({expected} bytes), got {len(payload)} bytes"
            )
        bits = "".join(format(b, "08b") for b in payload)[:length]
        return cls(bits)


def _channel_transform(bits: str, cm: CostModel | None) -> str:
    if cm is not None and cm.swapped:
        return bits.translate(_INVERT)
    return bits


def encode(symbols: Iterable[int], cb: Codebook, cm: CostModel | None = None) -> BitStream:
    """Concatenate the codewords of the given symbol indices."""
    parts: list[str] = []
    m = cb.m
    for pos, symbol in enumerate(symbols):
        if not isinstance(symbol, int) or isinstance(symbol, bool):
            raise ValidationError(f"symbols[{pos}]: must be an integer, got {symbol!r}")
        if not 0 <= symbol < m:
            raise ValidationError(f"symbols[{pos}]: index {symbol} out of range [0, {m})")
        parts.append(cb.entries[symbol].bits)
    return BitStream(_channel_transform("".join(parts), cm))


def decode(bs: BitStream, cb: Codebook, cm: CostModel | None = None) -> list[int]:
    """Recover the symbol sequence; inverse of encode for both kinds."""
    bits = _channel_transform(bs.bits, cm)
    if cb.kind == "fixed":
        return _decode_fixed(bits, cb)
    return _decode_prefix(bits, cb)


def _decode_fixed(bits: str, cb: Codebook) -> list[int]:
    n = cb.n
    assert n is not None
    if len(bits) % n != 0:
        raise DecodeError(
            f"stream length {len(bits)} is not a multiple of the block length {n}",
            len(bits) - len(bits) % n,
        )
    table = {e.bits: i for i, e in enumerate(cb.entries)}
    out: list[int] = []
    for offset in range(0, len(bits), n):
        chunk = bits[offset : offset + n]
        symbol = table.get(chunk)
        if symbol is None:
            raise DecodeError(f"block {chunk!r} is not in the codebook", offset)
        out.append(symbol)
    return out


def _decode_prefix(bits: str, cb: Codebook) -> list[int]:
    table = {e.bits: i for i, e in enumerate(cb.entries)}
    prefixes = {e.bits[:k] for e in cb.entries for k in range(1, len(e.bits))}
    out: list[int] = []
    start = 0
    current = ""
    for pos, bit in enumerate(bits):
        current += bit
        symbol = table.get(current)
        if symbol is not None:
            out.append(symbol)
            current = ""
            start = pos + 1
        elif current not in prefixes:
            raise DecodeError(f"bits {current!r} match no codeword", start)
    if current:
        raise DecodeError(f"stream ends inside codeword prefix {current!r}", start)
    return out


def stream_cost(
    data: BitStream | Sequence[int],
    cb: Codebook,
    cm: CostModel,
) -> float:
    """Total transmission energy of a stream or of an encoded symbol sequence.

    A BitStream is costed bit by bit (undoing the channel inversion first,
    if the model carries one); a symbol sequence is costed through its
    codewords without materializing the stream.
    """
    if isinstance(data, BitStream):
        bits = _channel_transform(data.bits, cm)
        return cm.beta0 * bits.count("0") + cm.beta1 * bits.count("1")
    n0 = n1 = 0
    m = cb.m
    for pos, symbol in enumerate(data):
        if not isinstance(symbol, int) or isinstance(symbol, bool):
            raise ValidationError(f"symbols[{pos}]: must be an integer, got {symbol!r}")
        if not 0 <= symbol < m:
            raise ValidationError(f"symbols[{pos}]: index {symbol} out of range [0, {m})")
        entry = cb.entries[symbol]
        n0 += entry.n0()
        n1 += entry.n1()
    return cm.beta0 * n0 + cm.beta1 * n1
