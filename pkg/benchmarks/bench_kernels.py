"""Time the numba and numpy kernel backends against each other.

    python benchmarks/bench_kernels.py --size 512 --repeat 5

Each kernel is called once untimed first, so numba compilation (or cache
loading) is excluded.  Outputs of the two backends are compared before any
timing is reported.
"""
import argparse
import time

import numpy as np

from dpis.codec import keygen, payload_bits
from dpis.kernels import available_backends
from dpis.synth import photo_like


def best_of(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases(size, candidates, seed):
    rng = np.random.default_rng(seed)
    pixels = photo_like(size, size, seed=seed).reshape(-1, 3).copy()
    seq = keygen(20, seed).as_array()
    threshold = 128

    numpy_mod = available_backends()["numpy"]
    skip, _, _, bits = numpy_mod.plan_pixels(pixels, seq, threshold)
    # fill about 90% of the capacity so the embed loop covers most of the image
    budget = int(bits[~skip].sum() * 0.9) // 8 - 4
    payload = payload_bits(bytes(rng.integers(0, 256, budget, dtype=np.uint8)))
    nbits = payload.size

    stego = pixels.copy()
    numpy_mod.embed_bits(stego, seq, threshold, payload)
    batch = np.stack([keygen(20, 1000 + i).as_array() for i in range(candidates)])
    small = 32 + 8 * 64

    return {
        "plan_pixels": lambda m: m.plan_pixels(pixels, seq, threshold),
        "embed_bits": lambda m: m.embed_bits(pixels.copy(), seq, threshold, payload),
        "extract_bits": lambda m: m.extract_bits(stego, seq, nbits, True, 0),
        "extract_batch": lambda m: m.extract_batch(stego, batch, small),
    }


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=512, help="square cover side in pixels")
    ap.add_argument("--candidates", type=int, default=2000, help="keys per extract_batch call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    cases = build_cases(args.size, args.candidates, args.seed)
    print(f"cover {args.size}x{args.size}, backends: {', '.join(backends)}")
    if "numba" not in backends:
        print("numba is not installed; only the numpy backend will be timed")

    print(f"{'kernel':<14}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for kernel, call in cases.items():
        results = {name: call(mod) for name, mod in backends.items()}
        ref = results["numpy"]
        if not all(same(ref, r) for r in results.values()):
            raise SystemExit(f"{kernel}: backends disagree")
        times = {name: best_of(lambda m=mod: call(m), args.repeat) for name, mod in backends.items()}
        row = f"{kernel:<14}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values())
        if "numba" in times:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
