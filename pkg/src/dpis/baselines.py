"""Comparison schemes: Pixel Indicator and RGB intensity-based variable bits.

Both rotate the indicator channel R, G, B, R, ... with the pixel index, never
write the indicator, and prefix the message with the same 32-bit length
header as the DPIS codec.  "Channel 1" and "channel 2" are the first and
second cyclic successors of the indicator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .codec import HEADER_BITS, CapacityReport
from .core import BitCursor, as_image, read_low_bits, write_low_bits
from .errors import CapacityError, MalformedPayload

# Per-pixel allocation: list of (channel index, bit count) in write order.
Allocation = list[tuple[int, int]]


def pi_allocation(pixel: Sequence[int], ind: int) -> Allocation:
    ch1, ch2 = (ind + 1) % 3, (ind + 2) % 3
    code = int(pixel[ind]) & 0b11
    return {
        0b00: [],
        0b01: [(ch2, 2)],
        0b10: [(ch1, 2)],
        0b11: [(ch1, 2), (ch2, 2)],
    }[code]


@dataclass(frozen=True)
class PartitionSchema:
    """Static intensity partition: inclusive ``(low, high, bits)`` ranges over 0..255."""

    ranges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        ranges = tuple(sorted((int(lo), int(hi), int(b)) for lo, hi, b in self.ranges))
        object.__setattr__(self, "ranges", ranges)
        if not ranges:
            raise ValueError("schema needs at least one range")
        expect = 0
        prev_bits = 8
        for lo, hi, bits in ranges:
            if lo != expect:
                kind = "overlap" if lo < expect else "gap"
                raise ValueError(f"schema ranges {kind} at intensity {min(lo, expect)}")
            if hi < lo:
                raise ValueError(f"empty range {lo}..{hi}")
            if not 1 <= bits <= 4:
                raise ValueError(f"bits must be in 1..4, got {bits}")
            if bits > prev_bits:
                raise ValueError("bits must not increase with intensity")
            prev_bits = bits
            expect = hi + 1
        if expect != 256:
            raise ValueError(f"schema stops at {expect - 1}, must cover 0..255")

    @property
    def max_bits(self) -> int:
        return max(b for _, _, b in self.ranges)

    def bits_for(self, value: int) -> int:
        """Bits carried by a channel, looked up on its value with the low ``max_bits`` cleared."""
        m = int(value) & (0xFF ^ ((1 << self.max_bits) - 1))
        for lo, hi, bits in self.ranges:
            if lo <= m <= hi:
                return bits
        raise AssertionError("unreachable: schema covers 0..255")

    @classmethod
    def parse(cls, text: str) -> "PartitionSchema":
        """Parse ``"0-63:4,64-127:3,128-255:2"``."""
        ranges = []
        for part in text.split(","):
            span, _, bits = part.strip().partition(":")
            lo, _, hi = span.partition("-")
            try:
                ranges.append((int(lo), int(hi), int(bits)))
            except ValueError:
                raise ValueError(f"bad schema entry {part!r}") from None
        return cls(tuple(ranges))

    def __str__(self) -> str:
        return ",".join(f"{lo}-{hi}:{b}" for lo, hi, b in self.ranges)


DEFAULT_SCHEMA = PartitionSchema(((0, 63, 4), (64, 127, 3), (128, 255, 2)))


def ivb_allocation(schema: PartitionSchema) -> Callable[[Sequence[int], int], Allocation]:
    def alloc(pixel, ind):
        ch1, ch2 = (ind + 1) % 3, (ind + 2) % 3
        return [(ch1, schema.bits_for(pixel[ch1])), (ch2, schema.bits_for(pixel[ch2]))]

    return alloc


def write_allocation(pixel: np.ndarray, alloc: Allocation, cursor: BitCursor) -> None:
    """Write the next payload bits into ``pixel`` in place, stopping once the cursor is exhausted."""
    for ch, bits in alloc:
        if cursor.remaining <= 0:
            return
        pixel[ch] = write_low_bits(int(pixel[ch]), bits, cursor.read(bits))


def _walk(flat: np.ndarray, allocate) -> Iterator[tuple[int, Allocation]]:
    for i in range(flat.shape[0]):
        yield i, allocate(flat[i], i % 3)


def _capacity(flat, allocate) -> int:
    return sum(b for _, alloc in _walk(flat, allocate) for _, b in alloc)


def _embed(cover, message: bytes, allocate) -> tuple[np.ndarray, CapacityReport]:
    cover = as_image(cover)
    stego = cover.copy()
    flat = stego.reshape(-1, 3)
    cursor = BitCursor(len(message).to_bytes(4, "big") + bytes(message))
    need = len(cursor)
    capacity = _capacity(flat, allocate)
    if need > capacity:
        raise CapacityError(f"payload needs {need} bits but the image holds {capacity}")
    utilized = 0
    for i, alloc in _walk(flat, allocate):
        if cursor.remaining <= 0:
            break
        if alloc:
            utilized += 1
        write_allocation(flat[i], alloc, cursor)
    report = CapacityReport(
        total_pixels=flat.shape[0],
        utilized_pixels=utilized,
        skipped_pixels=0,
        capacity_bits=capacity,
        used_bits=need,
    )
    return stego, report


def _extract(stego, allocate) -> bytes:
    flat = as_image(stego).reshape(-1, 3)
    out = BitCursor()
    target = HEADER_BITS
    for i, alloc in _walk(flat, allocate):
        for ch, bits in alloc:
            out.write(read_low_bits(int(flat[i, ch]), bits), bits)
        if out.pos >= target:
            if target == HEADER_BITS:
                length = int.from_bytes(out.getvalue()[:4], "big")
                target = HEADER_BITS + 8 * length
                if target > 8 * flat.shape[0]:
                    raise MalformedPayload(f"header claims {length} bytes, more than the image can hold")
            if out.pos >= target:
                return out.getvalue()[4 : target // 8]
    raise MalformedPayload("ran out of pixels before the payload ended")


def pi_capacity(image) -> int:
    return _capacity(as_image(image).reshape(-1, 3), pi_allocation)


def pi_embed(cover, message: bytes) -> tuple[np.ndarray, CapacityReport]:
    return _embed(cover, message, pi_allocation)


def pi_extract(stego) -> bytes:
    return _extract(stego, pi_allocation)


def ivb_capacity(image, schema: PartitionSchema = DEFAULT_SCHEMA) -> int:
    return _capacity(as_image(image).reshape(-1, 3), ivb_allocation(schema))


def ivb_embed(cover, schema: PartitionSchema, message: bytes) -> tuple[np.ndarray, CapacityReport]:
    return _embed(cover, message, ivb_allocation(schema))


def ivb_extract(stego, schema: PartitionSchema) -> bytes:
    return _extract(stego, ivb_allocation(schema))
