"""Exception hierarchy shared by every bsbnet module."""


class BsbError(Exception):
    """Base class for all bsbnet errors."""


class DimensionError(BsbError, ValueError):
    pass


class DivergenceError(BsbError, ArithmeticError):
    """A non-finite value appeared in the dynamics."""


class EnumerationBoundError(BsbError, ValueError):
    """Exhaustive enumeration refused because 2**d is too large."""


class PatternError(BsbError, ValueError):
    """A pattern set violates saturation, dimension or uniqueness rules."""


class EncodingError(BsbError, ValueError):
    """A password or image could not be encoded to a bipolar vector."""


class ImageFormatError(BsbError, ValueError):
    """Malformed ASCII PPM/PGM input.

    ``offset`` is the byte offset at which parsing failed.
    """

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class UnsupportedFormatError(ImageFormatError):
    pass


class MaxvalError(ImageFormatError):
    pass


class TruncatedImageError(ImageFormatError):
    pass


class DimensionOverflowError(ImageFormatError):
    pass


class StoreError(BsbError):
    """Base class for store/network file problems."""


class StoreFormatError(StoreError):
    """Wrong magic or wrong content kind."""


class StoreVersionError(StoreError):
    pass


class StoreCorruptError(StoreError):
    """Checksum mismatch, truncation, or inconsistent payload."""


class PartialWriteError(StoreError):
    """Writing the file failed part way; the previous file is left intact."""


class DuplicateUserError(BsbError, KeyError):
    pass


class UnknownUserError(BsbError, KeyError):
    pass
