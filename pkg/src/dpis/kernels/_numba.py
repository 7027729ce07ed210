"""Loop kernels compiled with numba.

Pixel arrays are flattened to ``(N, 3)`` uint8 in row-major order and the
indicator sequence is an int8 array of channel indices consumed cyclically.
"""
import numpy as np
from numba import njit

_MASK = 0xF0


@njit(cache=True, inline="always")
def _decide(r0, r1, r2, ind, threshold):
    # returns (bit_count, data_channel, flag_channel); bit_count 0 means skip
    px = (r0 & _MASK, r1 & _MASK, r2 & _MASK)
    after = (ind + 1) % 3
    before = (ind + 2) % 3
    m_ind = px[ind]
    m_after = px[after]
    m_before = px[before]
    if m_ind < m_after and m_ind < m_before:
        return 0, -1, -1
    if m_before < m_after:
        data, flag = before, after
        m_data = m_before
    else:
        data, flag = after, before
        m_data = m_after
    if m_data < threshold:
        return 4, data, flag
    return 3, data, flag


@njit(cache=True)
def plan_pixels(pixels, seq, threshold):
    n_pix = pixels.shape[0]
    n = seq.shape[0]
    skip = np.zeros(n_pix, dtype=np.bool_)
    data = np.full(n_pix, -1, dtype=np.int8)
    flag = np.full(n_pix, -1, dtype=np.int8)
    bits = np.zeros(n_pix, dtype=np.int8)
    for i in range(n_pix):
        bc, d, f = _decide(pixels[i, 0], pixels[i, 1], pixels[i, 2], seq[i % n], threshold)
        if bc == 0:
            skip[i] = True
        else:
            data[i] = d
            flag[i] = f
            bits[i] = bc
    return skip, data, flag, bits


@njit(cache=True)
def embed_bits(pixels, seq, threshold, payload):
    """Write ``payload`` (array of 0/1) into ``pixels`` in place.

    Returns ``(pixels_traversed, pixels_utilized, skipped_indices)``.  The
    caller has already verified capacity.
    """
    n_pix = pixels.shape[0]
    n = seq.shape[0]
    total = payload.shape[0]
    skipped = np.empty(n_pix, dtype=np.int64)
    n_skipped = 0
    utilized = 0
    pos = 0
    i = 0
    while i < n_pix and pos < total:
        ind = seq[i % n]
        bc, d, f = _decide(pixels[i, 0], pixels[i, 1], pixels[i, 2], ind, threshold)
        if bc == 0:
            skipped[n_skipped] = i
            n_skipped += 1
        else:
            value = 0
            for _ in range(bc):
                bit = payload[pos] if pos < total else 0
                value = (value << 1) | bit
                pos += 1
            ind_bit = 0 if d == (ind + 1) % 3 else 1
            flag_bit = 1 if bc == 4 else 0
            low = (1 << bc) - 1
            pixels[i, ind] = (pixels[i, ind] & 0xFE) | ind_bit
            pixels[i, f] = (pixels[i, f] & 0xFE) | flag_bit
            pixels[i, d] = (pixels[i, d] & (0xFF ^ low)) | value
            utilized += 1
        i += 1
    return i, utilized, skipped[:n_skipped].copy()


@njit(cache=True)
def extract_bits(pixels, seq, nbits, honor_skip, fixed_bits):
    """Read up to ``nbits`` payload bits; returns ``(bits, count)``.

    ``honor_skip=False`` reads every pixel; ``fixed_bits > 0`` ignores the
    flag channel and always reads that many bits.
    """
    n_pix = pixels.shape[0]
    n = seq.shape[0]
    out = np.zeros(nbits, dtype=np.uint8)
    pos = 0
    i = 0
    while i < n_pix and pos < nbits:
        r0 = pixels[i, 0]
        r1 = pixels[i, 1]
        r2 = pixels[i, 2]
        ind = seq[i % n]
        i += 1
        if honor_skip:
            bc, d, f = _decide(r0, r1, r2, ind, 0)
            if bc == 0:
                continue
        px = (r0, r1, r2)
        if px[ind] & 1:
            d = (ind + 2) % 3
            f = (ind + 1) % 3
        else:
            d = (ind + 1) % 3
            f = (ind + 2) % 3
        if fixed_bits > 0:
            bc = fixed_bits
        else:
            bc = 4 if px[f] & 1 else 3
        v = px[d]
        for j in range(bc - 1, -1, -1):
            if pos >= nbits:
                break
            out[pos] = (v >> j) & 1
            pos += 1
    return out, pos


@njit(cache=True)
def extract_batch(pixels, candidates, nbits):
    m = candidates.shape[0]
    out = np.zeros((m, nbits), dtype=np.uint8)
    counts = np.zeros(m, dtype=np.int64)
    for c in range(m):
        bits, count = extract_bits(pixels, candidates[c], nbits, True, 0)
        out[c, :] = bits
        counts[c] = count
    return out, counts
