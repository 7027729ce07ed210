"""Image I/O and the text formats for keys and integrity manifests.

Key file::

    DPISKEY v1
    indicator=RGBBGR...
    threshold=128

Manifest file::

    DPISMANIFEST v1
    dims=<w>x<h>
    count=<M>
    <x> <y> <r> <g> <b>      (M lines)
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import Channel, StegoKey, as_image
from .errors import CorruptFile, DpisError, ParseError, UnsupportedFormat
from .integrity import Entry, IntegrityManifest

KEY_MAGIC = "DPISKEY v1"
MANIFEST_MAGIC = "DPISMANIFEST v1"

LOSSLESS_FORMATS = {"PNG", "BMP", "TIFF", "PPM"}
_SAVE_FORMATS = {".png": "PNG", ".bmp": "BMP", ".tif": "TIFF", ".tiff": "TIFF", ".ppm": "PPM"}
_LOSSY_TIFF = {"jpeg", "tiff_jpeg", "webp"}

_UINT = re.compile(r"0|[1-9][0-9]*")


# -- images -------------------------------------------------------------------


def load_image(path) -> np.ndarray:
    try:
        img = Image.open(path)
    except UnidentifiedImageError as exc:
        raise CorruptFile(f"{path}: not a recognised raster image") from exc
    with img:
        if img.format not in LOSSLESS_FORMATS:
            raise UnsupportedFormat(f"{path}: {img.format} is not a lossless raster format")
        if img.format == "TIFF" and str(img.info.get("compression", "raw")).lower() in _LOSSY_TIFF:
            raise UnsupportedFormat(f"{path}: TIFF uses lossy compression")
        if img.mode != "RGB":
            raise UnsupportedFormat(f"{path}: mode {img.mode}, expected 8-bit RGB without alpha or palette")
        try:
            img.load()
        except (OSError, SyntaxError) as exc:
            raise CorruptFile(f"{path}: {exc}") from exc
        return np.array(img, dtype=np.uint8)


def save_image(image, path) -> None:
    """Write ``image`` losslessly; the format comes from the file extension."""
    image = as_image(image)
    path = Path(path)
    fmt = _SAVE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise UnsupportedFormat(f"{path}: refusing to write {path.suffix or 'extension-less'} output; "
                                f"use one of {', '.join(sorted(_SAVE_FORMATS))}")
    Image.fromarray(image, mode="RGB").save(path, format=fmt)
    if not np.array_equal(load_image(path), image):
        raise DpisError(f"{path}: written pixels do not read back identically")


# -- keys ---------------------------------------------------------------------


def _split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _field(lineno: int, line: str, allowed: set[str]) -> tuple[str, str]:
    name, sep, value = line.partition("=")
    if not sep:
        raise ParseError(lineno, f"expected name=value, got {line!r}")
    if name not in allowed:
        raise ParseError(lineno, f"unknown field {name!r}")
    return name, value


def _uint(lineno: int, value: str, what: str, hi: int | None = None) -> int:
    if not _UINT.fullmatch(value):
        raise ParseError(lineno, f"{what} must be a non-negative decimal integer, got {value!r}")
    n = int(value)
    if hi is not None and n > hi:
        raise ParseError(lineno, f"{what} must be <= {hi}, got {n}")
    return n


def parse_key(text: str) -> StegoKey:
    lines = _split_lines(text)
    if not lines or lines[0] != KEY_MAGIC:
        raise ParseError(1, f"expected magic line {KEY_MAGIC!r}")
    seen: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        name, value = _field(lineno, line, {"indicator", "threshold"})
        if name in seen:
            raise ParseError(lineno, f"duplicate field {name!r}")
        seen[name] = (lineno, value)
    for name in ("indicator", "threshold"):
        if name not in seen:
            raise ParseError(len(lines) + 1, f"missing field {name!r}")

    lineno, indicator = seen["indicator"]
    bad = sorted(set(indicator) - {"R", "G", "B"})
    if bad:
        raise ParseError(lineno, f"indicator may only contain R, G, B; found {''.join(bad)!r}")
    if len(indicator) < 3:
        raise ParseError(lineno, f"indicator needs length >= 3, got {len(indicator)}")
    lineno, raw = seen["threshold"]
    threshold = _uint(lineno, raw, "threshold", 255)
    return StegoKey(tuple(Channel[c] for c in indicator), threshold)


def serialize_key(key: StegoKey) -> str:
    return f"{KEY_MAGIC}\nindicator={key}\nthreshold={key.threshold}\n"


# -- manifests ----------------------------------------------------------------


def parse_manifest(text: str) -> IntegrityManifest:
    lines = _split_lines(text)
    if not lines or lines[0] != MANIFEST_MAGIC:
        raise ParseError(1, f"expected magic line {MANIFEST_MAGIC!r}")
    if len(lines) < 3:
        raise ParseError(len(lines) + 1, "missing dims/count header lines")

    _, dims = _field(2, lines[1], {"dims"})
    w_raw, sep, h_raw = dims.partition("x")
    if not sep:
        raise ParseError(2, f"dims must look like <w>x<h>, got {dims!r}")
    width, height = _uint(2, w_raw, "width"), _uint(2, h_raw, "height")
    if width < 1 or height < 1:
        raise ParseError(2, "dimensions must be positive")

    _, raw = _field(3, lines[2], {"count"})
    count = _uint(3, raw, "count")
    body = lines[3:]
    if len(body) != count:
        raise ParseError(3, f"count={count} but {len(body)} entry lines follow")

    entries = []
    seen = set()
    for lineno, line in enumerate(body, start=4):
        parts = line.split(" ")
        if len(parts) != 5:
            raise ParseError(lineno, f"expected '<x> <y> <r> <g> <b>', got {line!r}")
        x, y, r, g, b = (_uint(lineno, p, "entry field") for p in parts)
        if x >= width or y >= height:
            raise ParseError(lineno, f"position ({x}, {y}) outside {width}x{height}")
        if max(r, g, b) > 255:
            raise ParseError(lineno, "channel values must be <= 255")
        if (x, y) in seen:
            raise ParseError(lineno, f"duplicate position ({x}, {y})")
        seen.add((x, y))
        entries.append(Entry(x, y, r, g, b))
    return IntegrityManifest(width, height, tuple(entries))


def serialize_manifest(manifest: IntegrityManifest) -> str:
    lines = [
        MANIFEST_MAGIC,
        f"dims={manifest.width}x{manifest.height}",
        f"count={len(manifest.entries)}",
    ]
    lines.extend(f"{e.x} {e.y} {e.r} {e.g} {e.b}" for e in manifest.entries)
    return "\n".join(lines) + "\n"


def read_key(path) -> StegoKey:
    return parse_key(Path(path).read_text(encoding="ascii"))


def write_key(key: StegoKey, path) -> None:
    Path(path).write_text(serialize_key(key), encoding="ascii", newline="\n")


def read_manifest(path) -> IntegrityManifest:
    return parse_manifest(Path(path).read_text(encoding="ascii"))


def write_manifest(manifest: IntegrityManifest, path) -> None:
    Path(path).write_text(serialize_manifest(manifest), encoding="ascii", newline="\n")
