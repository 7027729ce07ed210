"""Whole-image DPIS embedding, extraction, capacity scanning and key generation."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import Channel, StegoKey, as_image
from .errors import CapacityError, MalformedPayload

log = logging.getLogger(__name__)

HEADER_BITS = 32
MAX_BITS_PER_PIXEL = 4


@dataclass(frozen=True)
class CapacityReport:
    total_pixels: int
    utilized_pixels: int
    skipped_pixels: int
    capacity_bits: int
    used_bits: int = 0

    @property
    def utilization_percent(self) -> float:
        return 100.0 * self.utilized_pixels / self.total_pixels if self.total_pixels else 0.0

    @property
    def bits_per_utilized_pixel(self) -> float:
        return self.used_bits / self.utilized_pixels if self.utilized_pixels else 0.0

    def as_dict(self) -> dict:
        return {
            "total_pixels": self.total_pixels,
            "utilized_pixels": self.utilized_pixels,
            "skipped_pixels": self.skipped_pixels,
            "capacity_bits": self.capacity_bits,
            "used_bits": self.used_bits,
            "utilization_percent": f"{self.utilization_percent:.2f}",
        }


class EmbedResult(NamedTuple):
    stego: np.ndarray
    skipped_positions: list
    report: CapacityReport


def keygen(length: int, seed: int) -> StegoKey:
    """Draw a random indicator sequence.

    The first three entries are a random permutation of R, G, B and the rest
    are independent uniform draws, so every position is marginally uniform and
    the number of reachable keys is ``keyspace_count(length)``.
    """
    if length < 3:
        raise ValueError(f"indicator length must be >= 3, got {length}")
    rng = np.random.default_rng(seed)
    head = rng.permutation(3)
    tail = rng.integers(0, 3, size=length - 3)
    return StegoKey(tuple(Channel(int(c)) for c in np.concatenate([head, tail])))


def payload_bits(message: bytes) -> np.ndarray:
    """32-bit big-endian byte length followed by the message, MSB first, as 0/1 array."""
    if len(message) >= 1 << HEADER_BITS:
        raise CapacityError("message longer than the 32-bit length header allows")
    blob = len(message).to_bytes(4, "big") + bytes(message)
    return np.unpackbits(np.frombuffer(blob, dtype=np.uint8))


def _flat(image: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(image).reshape(-1, 3)


def plan_image(image, key: StegoKey):
    """Per-pixel trace: ``(indicator, skip, data_channel, flag_channel, bit_count)`` arrays."""
    image = as_image(image)
    seq = key.as_array()
    flat = _flat(image)
    skip, data, flag, bits = kernels.plan_pixels(flat, seq, key.threshold)
    indicator = seq[np.arange(flat.shape[0]) % seq.shape[0]]
    return indicator, skip, data, flag, bits


def capacity_scan(image, key: StegoKey) -> CapacityReport:
    _, skip, _, _, bits = plan_image(image, key)
    n_skip = int(skip.sum())
    return CapacityReport(
        total_pixels=skip.shape[0],
        utilized_pixels=skip.shape[0] - n_skip,
        skipped_pixels=n_skip,
        capacity_bits=int(bits.astype(np.int64).sum()),
    )


def max_message_bytes(image, key: StegoKey) -> int:
    cap = capacity_scan(image, key).capacity_bits
    return max(cap - HEADER_BITS, -8) // 8


def embed(cover, key: StegoKey, message: bytes) -> EmbedResult:
    cover = as_image(cover)
    capacity = capacity_scan(cover, key)
    payload = payload_bits(message)
    if payload.shape[0] > capacity.capacity_bits:
        raise CapacityError(
            f"payload needs {payload.shape[0]} bits but the image holds {capacity.capacity_bits}"
        )
    stego = cover.copy()
    flat = _flat(stego)
    traversed, utilized, skipped = kernels.embed_bits(flat, key.as_array(), key.threshold, payload)
    width = cover.shape[1]
    positions = [(int(i % width), int(i // width)) for i in skipped]
    log.debug("embedded %d bits over %d pixels (%d skipped)", payload.shape[0], traversed, len(positions))
    report = CapacityReport(
        total_pixels=capacity.total_pixels,
        utilized_pixels=int(utilized),
        skipped_pixels=len(positions),
        capacity_bits=capacity.capacity_bits,
        used_bits=int(payload.shape[0]),
    )
    return EmbedResult(flat.reshape(cover.shape), positions, report)


def _bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def extract(stego, key: StegoKey) -> bytes:
    stego = as_image(stego)
    flat = _flat(stego)
    seq = key.as_array()
    head, count = kernels.extract_bits(flat, seq, HEADER_BITS, True, 0)
    if count < HEADER_BITS:
        raise MalformedPayload("image too small to hold a length header")
    length = _bits_to_int(head)
    need = HEADER_BITS + 8 * length
    if need > MAX_BITS_PER_PIXEL * flat.shape[0]:
        raise MalformedPayload(f"header claims {length} bytes, more than the image can hold")
    bits, count = kernels.extract_bits(flat, seq, need, True, 0)
    if count < need:
        raise MalformedPayload(f"header claims {length} bytes but only {(count - HEADER_BITS) // 8} are recoverable")
    return np.packbits(bits[HEADER_BITS:]).tobytes()
