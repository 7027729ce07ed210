"""Channel arithmetic, bit helpers and the per-pixel embedding decision.

Images are plain ``numpy`` arrays of shape ``(height, width, 3)`` and dtype
``uint8``; pixel ``(x, y)`` lives at ``image[y, x]`` and traversal is
row-major from the top-left corner.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

DEFAULT_THRESHOLD = 128
KEY_VERSION = 1
HIGH_NIBBLE = 0xF0


class Channel(enum.IntEnum):
    R = 0
    G = 1
    B = 2

    @property
    def succ(self) -> "Channel":
        return Channel((self + 1) % 3)

    @property
    def pred(self) -> "Channel":
        return Channel((self - 1) % 3)


def channel_offset(c: Channel, direction: int) -> Channel:
    """Cyclic neighbour of ``c`` in R -> G -> B -> R order (``direction`` is +1 or -1)."""
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction!r}")
    return Channel((int(c) + direction) % 3)


class Pixel(NamedTuple):
    r: int
    g: int
    b: int


def as_image(obj) -> np.ndarray:
    """Validate/convert ``obj`` into a ``(h, w, 3)`` uint8 array."""
    arr = np.asarray(obj)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) RGB array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must have positive width and height")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"pixel values must be 8-bit unsigned, got {arr.dtype}")
    return arr


def masked(v: int) -> int:
    return v & HIGH_NIBBLE


def lsb(v: int) -> int:
    return v & 1


def set_lsb(v: int, bit: int) -> int:
    return (v & 0xFE) | (bit & 1)


def write_low_bits(v: int, k: int, bits: int) -> int:
    if not 1 <= k <= 8:
        raise ValueError(f"k must be in 1..8, got {k}")
    if not 0 <= bits < (1 << k):
        raise ValueError(f"{bits} does not fit in {k} bits")
    mask = (1 << k) - 1
    return (v & ~mask & 0xFF) | bits


def read_low_bits(v: int, k: int) -> int:
    if not 1 <= k <= 8:
        raise ValueError(f"k must be in 1..8, got {k}")
    return v & ((1 << k) - 1)


@dataclass(frozen=True)
class StegoKey:
    """Shared secret: the indicator schedule plus the 3-vs-4 bit threshold."""

    indicator_sequence: tuple[Channel, ...]
    threshold: int = DEFAULT_THRESHOLD
    version: int = KEY_VERSION

    def __post_init__(self):
        seq = tuple(Channel(c) for c in self.indicator_sequence)
        object.__setattr__(self, "indicator_sequence", seq)
        if len(seq) < 3:
            raise ValueError(f"indicator sequence needs length >= 3, got {len(seq)}")
        if not 0 <= self.threshold <= 255:
            raise ValueError(f"threshold must be in 0..255, got {self.threshold}")

    @classmethod
    def from_string(cls, text: str, threshold: int = DEFAULT_THRESHOLD) -> "StegoKey":
        return cls(tuple(Channel[ch] for ch in text), threshold)

    def __str__(self) -> str:
        return "".join(c.name for c in self.indicator_sequence)

    def __len__(self) -> int:
        return len(self.indicator_sequence)

    def as_array(self) -> np.ndarray:
        return np.array([int(c) for c in self.indicator_sequence], dtype=np.int8)


class Skip:
    """Plan for a pixel whose indicator channel is strictly the lowest."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Skip"


SKIP = Skip()


@dataclass(frozen=True)
class Embed:
    data_channel: Channel
    flag_channel: Channel
    bit_count: int
    indicator_lsb: int
    flag_lsb: int


PixelPlan = Union[Skip, Embed]


def plan_pixel(p: Sequence[int], indicator: Channel, threshold: int = DEFAULT_THRESHOLD) -> PixelPlan:
    """Decide what a DPIS embedder does with one pixel.

    Every comparison uses high-nibble-masked values, so the decision is the
    same before and after the low bits have been rewritten.
    """
    indicator = Channel(indicator)
    after, before = indicator.succ, indicator.pred
    m_ind = masked(p[indicator])
    m_after = masked(p[after])
    m_before = masked(p[before])

    if m_ind < m_after and m_ind < m_before:
        return SKIP

    if m_before < m_after:
        data, flag, ind_bit = before, after, 1
    else:
        data, flag, ind_bit = after, before, 0
    bits = 4 if masked(p[data]) < threshold else 3
    return Embed(data, flag, bits, ind_bit, 1 if bits == 4 else 0)


class BitCursor:
    """MSB-first bit reader/writer over a growable byte buffer."""

    def __init__(self, data: bytes | bytearray = b""):
        self.buf = bytearray(data)
        self.pos = 0

    def __len__(self) -> int:
        return len(self.buf) * 8

    @property
    def remaining(self) -> int:
        return len(self) - self.pos

    def seek(self, pos: int) -> None:
        if not 0 <= pos <= len(self):
            raise ValueError(f"bit position {pos} out of range")
        self.pos = pos

    def read(self, k: int) -> int:
        """Return the next ``k`` bits as an integer; bits past the end read as 0."""
        value = 0
        for _ in range(k):
            byte_i, bit_i = divmod(self.pos, 8)
            bit = (self.buf[byte_i] >> (7 - bit_i)) & 1 if byte_i < len(self.buf) else 0
            value = (value << 1) | bit
            self.pos += 1
        return value

    def write(self, value: int, k: int) -> None:
        for shift in range(k - 1, -1, -1):
            byte_i, bit_i = divmod(self.pos, 8)
            while byte_i >= len(self.buf):
                self.buf.append(0)
            if (value >> shift) & 1:
                self.buf[byte_i] |= 0x80 >> bit_i
            else:
                self.buf[byte_i] &= ~(0x80 >> bit_i) & 0xFF
            self.pos += 1

    def getvalue(self) -> bytes:
        return bytes(self.buf)
