"""Dynamic-pattern RGB image steganography with baselines, attacks and tamper checks."""
from .codec import CapacityReport, capacity_scan, embed, extract, keygen
from .core import Channel, StegoKey, plan_pixel
from .errors import (
    CapacityError,
    CorruptFile,
    DimensionMismatch,
    DpisError,
    MalformedPayload,
    ParseError,
    UnsupportedFormat,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapacityError",
    "CapacityReport",
    "Channel",
    "CorruptFile",
    "DimensionMismatch",
    "DpisError",
    "MalformedPayload",
    "ParseError",
    "StegoKey",
    "UnsupportedFormat",
    "capacity_scan",
    "embed",
    "extract",
    "keygen",
    "plan_pixel",
]
