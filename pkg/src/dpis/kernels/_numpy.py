"""Vectorised numpy equivalents of the numba kernels (same signatures)."""
import numpy as np

_MASK = np.uint8(0xF0)
_J = np.arange(4)


def _schedule(seq, start, stop):
    return seq[np.arange(start, stop) % seq.shape[0]].astype(np.int64)


def _decide(pixels, ind, threshold):
    rows = np.arange(pixels.shape[0])
    m = (pixels & _MASK).astype(np.int16)
    after = (ind + 1) % 3
    before = (ind + 2) % 3
    m_ind, m_after, m_before = m[rows, ind], m[rows, after], m[rows, before]
    skip = (m_ind < m_after) & (m_ind < m_before)
    use_before = m_before < m_after
    data = np.where(use_before, before, after)
    flag = np.where(use_before, after, before)
    m_data = np.where(use_before, m_before, m_after)
    bits = np.where(m_data < threshold, 4, 3)
    bits[skip] = 0
    return skip, data, flag, bits


def plan_pixels(pixels, seq, threshold):
    ind = _schedule(seq, 0, pixels.shape[0])
    skip, data, flag, bits = _decide(pixels, ind, threshold)
    data = np.where(skip, -1, data).astype(np.int8)
    flag = np.where(skip, -1, flag).astype(np.int8)
    return skip, data, flag, bits.astype(np.int8)


def _chunk_values(bit_counts, starts, payload):
    """Integer formed by each pixel's slice of ``payload`` (MSB first, zero padded)."""
    padded = np.concatenate([payload.astype(np.int64), np.zeros(4, dtype=np.int64)])
    value = np.zeros(bit_counts.shape[0], dtype=np.int64)
    for j in range(4):
        valid = j < bit_counts
        bit = padded[np.minimum(starts + j, padded.shape[0] - 1)]
        shift = np.maximum(bit_counts - 1 - j, 0)
        value |= np.where(valid, bit << shift, 0)
    return value


def embed_bits(pixels, seq, threshold, payload):
    n_pix = pixels.shape[0]
    total = payload.shape[0]
    if total == 0:
        return 0, 0, np.empty(0, dtype=np.int64)
    ind = _schedule(seq, 0, n_pix)
    skip, data, flag, bits = _decide(pixels, ind, threshold)
    consumed = np.cumsum(bits)
    end = min(int(np.searchsorted(consumed, total)) + 1, n_pix)

    skipped = np.flatnonzero(skip[:end]).astype(np.int64)
    rows = np.flatnonzero(~skip[:end])
    bc = bits[rows].astype(np.int64)
    starts = consumed[rows] - bc
    value = _chunk_values(bc, starts, payload)

    ind, data, flag = ind[rows], data[rows], flag[rows]
    ind_bit = (data != (ind + 1) % 3).astype(np.uint8)
    flag_bit = (bc == 4).astype(np.uint8)
    low = (1 << bc) - 1
    pixels[rows, ind] = (pixels[rows, ind] & 0xFE) | ind_bit
    pixels[rows, flag] = (pixels[rows, flag] & 0xFE) | flag_bit
    pixels[rows, data] = ((pixels[rows, data] & (0xFF ^ low)) | value).astype(np.uint8)
    return end, rows.shape[0], skipped


def _read_chunk(pixels, ind, honor_skip, fixed_bits):
    rows = np.arange(pixels.shape[0])
    if honor_skip:
        keep = ~_decide(pixels, ind, 0)[0]
        pixels, ind, rows = pixels[keep], ind[keep], rows[: int(keep.sum())]
    ind_lsb = pixels[rows, ind] & 1
    data = np.where(ind_lsb == 1, (ind + 2) % 3, (ind + 1) % 3)
    flag = np.where(ind_lsb == 1, (ind + 1) % 3, (ind + 2) % 3)
    if fixed_bits > 0:
        bc = np.full(rows.shape[0], fixed_bits, dtype=np.int64)
    else:
        bc = np.where(pixels[rows, flag] & 1, 4, 3).astype(np.int64)
    v = pixels[rows, data].astype(np.int64)
    width = int(bc.max()) if bc.shape[0] else 0
    j = np.arange(width)
    shifts = bc[:, None] - 1 - j[None, :]
    grid = (v[:, None] >> np.maximum(shifts, 0)) & 1
    return grid[shifts >= 0].astype(np.uint8)


def extract_bits(pixels, seq, nbits, honor_skip, fixed_bits):
    n_pix = pixels.shape[0]
    per_pixel = fixed_bits if fixed_bits > 0 else 3
    chunk = nbits // per_pixel + 64
    parts = []
    have = 0
    start = 0
    while start < n_pix and have < nbits:
        stop = min(n_pix, start + chunk)
        got = _read_chunk(pixels[start:stop], _schedule(seq, start, stop), honor_skip, fixed_bits)
        parts.append(got)
        have += got.shape[0]
        start = stop
        chunk *= 2
    stream = np.concatenate(parts) if parts else np.empty(0, dtype=np.uint8)
    count = min(nbits, stream.shape[0])
    out = np.zeros(nbits, dtype=np.uint8)
    out[:count] = stream[:count]
    return out, count


def extract_batch(pixels, candidates, nbits):
    m = candidates.shape[0]
    out = np.zeros((m, nbits), dtype=np.uint8)
    counts = np.zeros(m, dtype=np.int64)
    for c in range(m):
        out[c], counts[c] = extract_bits(pixels, candidates[c], nbits, True, 0)
    return out, counts
