"""Exception hierarchy shared by the codec, file formats and CLI."""


class DpisError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(DpisError):
    """The payload (header + message) does not fit in the cover image."""


class MalformedPayload(DpisError):
    """Recovered bit stream is inconsistent with its own length header."""


class DimensionMismatch(DpisError):
    pass


class UnsupportedFormat(DpisError):
    """Raster is lossy, paletted, has alpha, or is not 8-bit RGB."""


class CorruptFile(DpisError):
    pass


class ParseError(DpisError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
