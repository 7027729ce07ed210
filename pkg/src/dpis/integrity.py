"""Tamper detection from a sample of pixels the embedder left untouched."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import as_image
from .errors import DimensionMismatch

MANIFEST_VERSION = 1
DEFAULT_SAMPLE_SIZE = 64


class Entry(NamedTuple):
    x: int
    y: int
    r: int
    g: int
    b: int


@dataclass(frozen=True)
class IntegrityManifest:
    width: int
    height: int
    entries: tuple[Entry, ...]
    # not serialised; provenance only
    sample_seed: Optional[int] = field(default=None, compare=False)
    version: int = MANIFEST_VERSION

    def __post_init__(self):
        entries = tuple(Entry(*map(int, e)) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        for e in entries:
            if not (0 <= e.x < self.width and 0 <= e.y < self.height):
                raise ValueError(f"manifest entry ({e.x}, {e.y}) outside {self.width}x{self.height}")
            if not all(0 <= v <= 255 for v in (e.r, e.g, e.b)):
                raise ValueError(f"manifest entry ({e.x}, {e.y}) has out-of-range values")
            if (e.x, e.y) in seen:
                raise ValueError(f"duplicate manifest entry at ({e.x}, {e.y})")
            seen.add((e.x, e.y))


@dataclass(frozen=True)
class Verification:
    mismatches: tuple[tuple[int, int], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def __bool__(self) -> bool:
        return self.ok


def build_manifest(
    stego,
    skipped_positions: Sequence[tuple[int, int]],
    sample_size: Optional[int] = DEFAULT_SAMPLE_SIZE,
    seed: int = 0,
) -> IntegrityManifest:
    """Record the exact RGB values of a seeded sample of skipped pixels.

    ``sample_size=None`` tracks every skipped pixel.  Entries are stored in
    row-major order.
    """
    stego = as_image(stego)
    h, w = stego.shape[:2]
    positions = sorted(set((int(x), int(y)) for x, y in skipped_positions), key=lambda p: (p[1], p[0]))
    for x, y in positions:
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"skipped position ({x}, {y}) outside {w}x{h}")
    take = len(positions) if sample_size is None else min(sample_size, len(positions))
    if take < len(positions):
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(len(positions), size=take, replace=False))
        positions = [positions[i] for i in chosen]
    entries = tuple(Entry(x, y, *map(int, stego[y, x])) for x, y in positions)
    return IntegrityManifest(w, h, entries, sample_seed=seed)


def verify_manifest(image, manifest: IntegrityManifest) -> Verification:
    image = as_image(image)
    h, w = image.shape[:2]
    if (w, h) != (manifest.width, manifest.height):
        raise DimensionMismatch(f"image is {w}x{h}, manifest expects {manifest.width}x{manifest.height}")
    bad = tuple(
        (e.x, e.y) for e in manifest.entries if tuple(int(v) for v in image[e.y, e.x]) != (e.r, e.g, e.b)
    )
    return Verification(bad)
