import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dpis import kernels
from dpis.analysis import enumerate_patterns
from dpis.codec import (
    HEADER_BITS,
    capacity_scan,
    embed,
    extract,
    keygen,
    max_message_bytes,
    payload_bits,
    plan_image,
)
from dpis.core import SKIP, Channel, StegoKey, plan_pixel
from dpis.errors import CapacityError, MalformedPayload
from dpis.synth import photo_like, random_image
from oracles import capacity_oracle

MESSAGE = b"Pondicherry University Computer Science Dept"


class TestKeygen:
    def test_deterministic(self):
        assert keygen(20, 99) == keygen(20, 99)
        assert keygen(20, 99) != keygen(20, 100)

    def test_length(self):
        key = keygen(3, 5)
        assert len(key) == 3
        assert set(key.indicator_sequence) <= set(Channel)
        assert key.threshold == 128

    def test_too_short(self):
        with pytest.raises(ValueError):
            keygen(2, 0)

    def test_keys_lie_in_pattern_space(self):
        space = set(enumerate_patterns(5))
        for seed in range(200):
            assert tuple(int(c) for c in keygen(5, seed).indicator_sequence) in space

    def test_positions_marginally_uniform(self):
        seqs = np.array([keygen(6, s).as_array() for s in range(3000)])
        for pos in range(6):
            freq = np.bincount(seqs[:, pos], minlength=3) / len(seqs)
            assert np.all(np.abs(freq - 1 / 3) < 0.04)


class TestCapacity:
    def test_flat_grey(self):
        img = np.full((10, 10, 3), 128, dtype=np.uint8)
        report = capacity_scan(img, keygen(7, 1))
        assert report.capacity_bits == 300
        assert report.skipped_pixels == 0
        assert report.utilized_pixels == 100

    def test_single_skipped_pixel(self):
        img = np.array([[[10, 200, 200]]], dtype=np.uint8)
        report = capacity_scan(img, StegoKey.from_string("RGB"))
        assert report.capacity_bits == 0
        assert report.skipped_pixels == 1

    def test_matches_oracle(self, rng):
        for seed in range(5):
            img = random_image(20, 17, seed)
            key = keygen(int(rng.integers(3, 30)), seed)
            expect = capacity_oracle(img, [int(c) for c in key.indicator_sequence], key.threshold)
            assert capacity_scan(img, key).capacity_bits == expect

    def test_too_small_for_header(self):
        img = np.full((2, 4, 3), 200, dtype=np.uint8)
        key = keygen(3, 0)
        assert capacity_scan(img, key).capacity_bits < HEADER_BITS
        with pytest.raises(CapacityError):
            embed(img, key, b"")

    def test_report_accounting(self):
        img = photo_like(48, 48, seed=3)
        key = keygen(20, 3)
        cover_report = capacity_scan(img, key)
        stego, skipped, report = embed(img, key, b"x" * 100)
        assert report.used_bits == HEADER_BITS + 800
        assert report.skipped_pixels == len(skipped)
        assert report.utilized_pixels + report.skipped_pixels <= report.total_pixels
        assert report.capacity_bits == cover_report.capacity_bits
        assert 3 <= report.bits_per_utilized_pixel <= 4


class TestRoundTrip:
    def test_empty_message(self):
        img = random_image(8, 8, 1)
        key = keygen(5, 1)
        stego, _, report = embed(img, key, b"")
        assert report.used_bits == HEADER_BITS
        assert extract(stego, key) == b""

    def test_one_pixel_cannot_hold_header(self):
        with pytest.raises(CapacityError):
            embed(np.full((1, 1, 3), 100, dtype=np.uint8), keygen(3, 0), b"A")

    def test_reference_message(self):
        img = random_image(128, 128, 7)
        key = keygen(20, 7)
        assert extract(embed(img, key, MESSAGE).stego, key) == MESSAGE

    def test_full_capacity(self):
        img = photo_like(40, 40, seed=1)
        key = keygen(20, 1)
        n = max_message_bytes(img, key)
        msg = bytes(np.random.default_rng(0).integers(0, 256, n, dtype=np.uint8))
        stego, _, _ = embed(img, key, msg)
        assert extract(stego, key) == msg
        with pytest.raises(CapacityError):
            embed(img, key, msg + b"!")

    def test_capacity_is_exactly_consumable(self):
        # a raw payload of exactly capacity_bits walks every embeddable pixel and no more
        img = random_image(30, 30, 4)
        key = keygen(20, 4)
        report = capacity_scan(img, key)
        flat = img.copy().reshape(-1, 3)
        payload = np.random.default_rng(4).integers(0, 2, report.capacity_bits).astype(np.uint8)
        _, utilized, skipped = kernels.embed_bits(flat, key.as_array(), key.threshold, payload)
        assert utilized == report.utilized_pixels
        bits, count = kernels.extract_bits(flat, key.as_array(), report.capacity_bits + 10, True, 0)
        assert count == report.capacity_bits
        np.testing.assert_array_equal(bits[:count], payload)
        n = max_message_bytes(img, key)
        assert 0 <= report.capacity_bits - (HEADER_BITS + 8 * n) < 8

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(
        arrays(np.uint8, st.tuples(st.integers(4, 24), st.integers(4, 24), st.just(3))),
        st.text("RGB", min_size=3, max_size=25),
        st.integers(0, 255),
        st.binary(max_size=40),
    )
    def test_property(self, img, seq, threshold, msg):
        key = StegoKey.from_string(seq, threshold)
        cap = capacity_scan(img, key).capacity_bits
        if HEADER_BITS + 8 * len(msg) > cap:
            with pytest.raises(CapacityError):
                embed(img, key, msg)
            return
        stego, skipped, _ = embed(img, key, msg)
        assert extract(stego, key) == msg
        _check_delta(img, stego, key)


def _check_delta(cover, stego, key):
    ind, skip, data, flag, bits = plan_image(cover, key)
    c = cover.reshape(-1, 3).astype(int)
    s = stego.reshape(-1, 3).astype(int)
    changed = np.flatnonzero(np.any(c != s, axis=1))
    assert not skip[changed].any()
    rows = np.arange(c.shape[0])
    allowed = np.zeros_like(c)
    allowed[rows, ind] = 1
    allowed[rows[~skip], flag[~skip]] = 1
    allowed[rows[~skip], data[~skip]] = 0x0F
    assert np.all(((c ^ s) & ~allowed) == 0)


class TestInvariants:
    def test_delta_bound_and_plan_stability(self, rng):
        for seed in range(20):
            img = random_image(32, 32, seed)
            key = keygen(20, seed)
            n = int(rng.integers(0, max_message_bytes(img, key) + 1))
            stego, skipped, _ = embed(img, key, bytes(rng.integers(0, 256, n, dtype=np.uint8)))
            _check_delta(img, stego, key)
            a = plan_image(img, key)
            b = plan_image(stego, key)
            for x, y in zip(a[1:4], b[1:4]):
                np.testing.assert_array_equal(x, y)
            w = img.shape[1]
            for x, y in skipped:
                assert a[1][y * w + x]
                assert np.array_equal(img[y, x], stego[y, x])

    def test_schedule_advances_on_every_pixel(self):
        img = random_image(9, 11, 2)
        key = StegoKey.from_string("RRGBGBBRG")
        ind, skip, *_ = plan_image(img, key)
        assert skip.any()
        seq = [int(c) for c in key.indicator_sequence]
        assert ind.tolist() == [seq[i % len(seq)] for i in range(99)]
        flat = img.reshape(-1, 3)
        for i in range(99):
            assert bool(skip[i]) == (plan_pixel(flat[i].tolist(), Channel(seq[i % 9])) is SKIP)

    def test_trailing_pixels_untouched(self):
        img = random_image(64, 64, 9)
        key = keygen(20, 9)
        stego, _, report = embed(img, key, b"hi")
        diff = np.flatnonzero(np.any(img.reshape(-1, 3) != stego.reshape(-1, 3), axis=1))
        _, skip, *_ = plan_image(img, key)
        last_used = int(np.flatnonzero(~skip)[report.utilized_pixels - 1])
        assert diff.max() <= last_used


class TestExtractFailures:
    def test_wrong_key_garbles(self):
        img = random_image(128, 128, 11)
        key = keygen(20, 11)
        stego = embed(img, key, MESSAGE).stego
        seq = list(str(key))
        garbled = 0
        for pos in range(20):
            for alt in "RGB":
                if alt == seq[pos]:
                    continue
                wrong = StegoKey.from_string("".join(seq[:pos] + [alt] + seq[pos + 1:]))
                try:
                    garbled += extract(stego, wrong) != MESSAGE
                except MalformedPayload:
                    garbled += 1
        assert garbled == 40

    def test_never_embedded_image_is_total(self, rng):
        for seed in range(50):
            img = random_image(16, 16, seed)
            try:
                out = extract(img, keygen(20, seed))
            except MalformedPayload:
                continue
            assert isinstance(out, bytes)

    def test_tiny_image(self):
        with pytest.raises(MalformedPayload):
            extract(np.zeros((1, 1, 3), dtype=np.uint8), keygen(3, 0))

    def test_header_layout(self):
        bits = payload_bits(b"\x01")
        assert bits.tolist() == [0] * 31 + [1] + [0] * 7 + [1]
