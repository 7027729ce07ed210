"""Seeded synthetic covers that look roughly like photographs.

Smooth, channel-correlated colour fields with a little sensor-like noise.
Used by the tests, the capacity comparison and the benchmark, since real
test photographs are not shipped with the package.
"""
import numpy as np


def _smooth_field(rng, height, width, cells):
    grid = rng.random((cells + 1, cells + 1))
    ys = np.linspace(0, cells, height)
    xs = np.linspace(0, cells, width)
    rows = np.array([np.interp(xs, np.arange(cells + 1), g) for g in grid])
    return np.array([np.interp(ys, np.arange(cells + 1), rows[:, j]) for j in range(width)]).T


def photo_like(height: int = 128, width: int = 128, seed: int = 0, noise: float = 3.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    luma = 40 + 180 * _smooth_field(rng, height, width, cells=int(rng.integers(3, 8)))
    out = np.empty((height, width, 3))
    for c in range(3):
        tint = 0.6 + 0.8 * _smooth_field(rng, height, width, cells=int(rng.integers(2, 5)))
        out[:, :, c] = luma * tint + rng.normal(0, noise, (height, width))
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def random_image(height: int = 64, width: int = 64, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 256, (height, width, 3), dtype=np.uint8)
