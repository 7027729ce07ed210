"""Both kernel backends against the scalar rules and against each other."""
import numpy as np
import pytest

from dpis import kernels
from dpis.codec import payload_bits
from oracles import embed_oracle, plan_oracle

BACKENDS = kernels.available_backends()


def _flat(img):
    return np.ascontiguousarray(img).reshape(-1, 3)


def test_backend_selection_is_known():
    assert kernels.BACKEND in BACKENDS


def test_plan_pixels_matches_oracle(backend, rng):
    px = rng.integers(0, 256, size=(5000, 3), dtype=np.uint8)
    seq = rng.integers(0, 3, size=13).astype(np.int8)
    skip, data, flag, bits = backend.plan_pixels(px, seq, 128)
    for i in range(px.shape[0]):
        expect = plan_oracle(px[i].tolist(), int(seq[i % 13]))
        if expect is None:
            assert skip[i] and bits[i] == 0
        else:
            assert not skip[i]
            assert (data[i], flag[i], bits[i]) == expect[:3]


def test_embed_matches_oracle(backend, rng):
    for trial in range(10):
        img = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
        seq = rng.integers(0, 3, size=int(rng.integers(3, 25))).astype(np.int8)
        msg = bytes(rng.integers(0, 256, size=int(rng.integers(0, 40)), dtype=np.uint8))
        stego = img.copy()
        backend.embed_bits(_flat(stego), seq, 128, payload_bits(msg))
        np.testing.assert_array_equal(stego, embed_oracle(img, seq.tolist(), msg))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="numba not installed")
class TestBackendsAgree:
    def test_plan(self, rng):
        px = rng.integers(0, 256, size=(20_000, 3), dtype=np.uint8)
        seq = rng.integers(0, 3, size=20).astype(np.int8)
        for thr in (0, 100, 128, 255):
            a = BACKENDS["numba"].plan_pixels(px, seq, thr)
            b = BACKENDS["numpy"].plan_pixels(px, seq, thr)
            for x, y in zip(a, b):
                np.testing.assert_array_equal(x, y)

    def test_embed(self, rng):
        for _ in range(20):
            img = rng.integers(0, 256, size=(40, 40, 3), dtype=np.uint8)
            seq = rng.integers(0, 3, size=20).astype(np.int8)
            payload = rng.integers(0, 2, size=int(rng.integers(1, 2000))).astype(np.uint8)
            a, b = _flat(img.copy()), _flat(img.copy())
            ra = BACKENDS["numba"].embed_bits(a, seq, 128, payload)
            rb = BACKENDS["numpy"].embed_bits(b, seq, 128, payload)
            np.testing.assert_array_equal(a, b)
            assert ra[:2] == rb[:2]
            np.testing.assert_array_equal(ra[2], rb[2])

    @pytest.mark.parametrize("honor_skip, fixed", [(True, 0), (False, 0), (True, 1), (True, 2), (False, 4)])
    def test_extract_modes(self, rng, honor_skip, fixed):
        img = rng.integers(0, 256, size=(30, 30, 3), dtype=np.uint8)
        seq = rng.integers(0, 3, size=7).astype(np.int8)
        for nbits in (0, 1, 32, 999, 10_000):
            a = BACKENDS["numba"].extract_bits(_flat(img), seq, nbits, honor_skip, fixed)
            b = BACKENDS["numpy"].extract_bits(_flat(img), seq, nbits, honor_skip, fixed)
            assert a[1] == b[1]
            np.testing.assert_array_equal(a[0], b[0])

    def test_batch(self, rng):
        img = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
        cands = rng.integers(0, 3, size=(50, 9)).astype(np.int8)
        a = BACKENDS["numba"].extract_batch(_flat(img), cands, 200)
        b = BACKENDS["numpy"].extract_batch(_flat(img), cands, 200)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])


def test_extract_inverts_embed(backend, rng):
    img = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
    seq = rng.integers(0, 3, size=11).astype(np.int8)
    payload = rng.integers(0, 2, size=1500).astype(np.uint8)
    flat = _flat(img.copy())
    backend.embed_bits(flat, seq, 128, payload)
    bits, count = backend.extract_bits(flat, seq, payload.shape[0], True, 0)
    assert count == payload.shape[0]
    np.testing.assert_array_equal(bits, payload)


def test_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path

    script = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    bench = runpy.run_path(str(script))
    bench["main"](["--size", "24", "--candidates", "4", "--repeat", "1"])
    out = capsys.readouterr().out
    for name in ("plan_pixels", "embed_bits", "extract_bits", "extract_batch"):
        assert name in out
