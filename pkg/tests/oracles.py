"""Independent reference implementations used only by the tests.

Written from the rules directly, without sharing code with ``dpis``.
"""

NAMES = "RGB"


def plan_oracle(pixel, indicator, threshold=128):
    """Rule-table reading of the per-pixel decision.

    Returns ``None`` for a skipped pixel, else
    ``(data, flag, bit_count, indicator_lsb, flag_lsb)`` with channel indices.
    """
    hi = [v // 16 * 16 for v in pixel]
    others = [c for c in range(3) if c != indicator]
    if all(hi[indicator] < hi[c] for c in others):
        return None
    succ = (indicator + 1) % 3
    pred = (indicator - 1) % 3
    # lower masked value wins; ties go to the successor
    ranked = sorted([(hi[succ], 0, succ), (hi[pred], 1, pred)])
    data = ranked[0][2]
    flag = ranked[1][2]
    bit_count = 4 if hi[data] < threshold else 3
    return data, flag, bit_count, 0 if data == succ else 1, 1 if bit_count == 4 else 0


def capacity_oracle(image, seq, threshold=128):
    h, w, _ = image.shape
    total = 0
    for i in range(h * w):
        y, x = divmod(i, w)
        plan = plan_oracle([int(v) for v in image[y, x]], seq[i % len(seq)], threshold)
        if plan is not None:
            total += plan[2]
    return total


def message_bits(message):
    header = len(message).to_bytes(4, "big")
    return [(byte >> (7 - k)) & 1 for byte in header + bytes(message) for k in range(8)]


def embed_oracle(cover, seq, message, threshold=128):
    """Straight per-pixel reading of the embedding flow; returns the stego array."""
    bits = message_bits(message)
    stego = cover.copy()
    h, w, _ = cover.shape
    pos = 0
    for i in range(h * w):
        if pos >= len(bits):
            break
        y, x = divmod(i, w)
        px = [int(v) for v in stego[y, x]]
        ind = seq[i % len(seq)]
        plan = plan_oracle(px, ind, threshold)
        if plan is None:
            continue
        data, flag, count, ind_lsb, flag_lsb = plan
        chunk = 0
        for _ in range(count):
            chunk = chunk * 2 + (bits[pos] if pos < len(bits) else 0)
            pos += 1
        px[ind] = px[ind] - px[ind] % 2 + ind_lsb
        px[flag] = px[flag] - px[flag] % 2 + flag_lsb
        px[data] = px[data] - px[data] % (1 << count) + chunk
        stego[y, x] = px
    return stego


def pi_rule_table(indicator_value):
    """Pixel Indicator: (bits into channel 1, bits into channel 2) from the indicator's low two bits."""
    return {"00": (0, 0), "01": (0, 2), "10": (2, 0), "11": (2, 2)}[format(indicator_value % 4, "02b")]
