"""Encoding of passwords and images as saturated bipolar vectors.

Binary 0 maps to -1 and 1 maps to +1. Text uses one byte per character
(Latin-1 code point, most significant bit first), right-padded with zero
bits to the requested width. NUL is rejected so that padding can never be
confused with password content, which keeps the encoding injective.

Images are ASCII PPM (``P3``) or PGM (``P2``) with maxval 255. Pixels are
binarized by integer luminance ``(299 r + 587 g + 114 b + 500) // 1000``
(round half up) compared against a threshold with ``>=``.
"""
from dataclasses import dataclass
import io
import os

import numpy as np

from .errors import (
    DimensionOverflowError,
    EncodingError,
    ImageFormatError,
    MaxvalError,
    TruncatedImageError,
    UnsupportedFormatError,
)

__all__ = [
    "BinaryMatrix",
    "RgbImage",
    "text_to_bipolar",
    "bipolar_to_text",
    "binary_to_bipolar",
    "bipolar_to_binary",
    "image_to_binary",
    "image_to_bipolar",
    "read_image",
    "write_image",
    "format_bipolar",
    "parse_bipolar",
    "MAX_PIXELS",
]

BITS_PER_CHAR = 8
MAX_PIXELS = 1 << 24
_WHITESPACE = b" \t\r\n\v\f"


@dataclass(frozen=True)
class BinaryMatrix:
    rows: int
    cols: int
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(v) for v in self.bits)
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if len(bits) != self.rows * self.cols:
            raise ValueError(f"{len(bits)} bits for a {self.rows}x{self.cols} matrix")
        if any(v not in (0, 1) for v in bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def to_array(self):
        return np.array(self.bits, dtype=np.int8).reshape(self.rows, self.cols)


@dataclass(frozen=True)
class RgbImage:
    width: int
    height: int
    pixels: tuple  # row-major (r, g, b) triples

    def __post_init__(self):
        pixels = tuple(tuple(int(c) for c in p) for p in self.pixels)
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")
        if len(pixels) != self.width * self.height:
            raise ValueError(f"{len(pixels)} pixels for a {self.width}x{self.height} image")
        for p in pixels:
            if len(p) != 3 or any(c < 0 or c > 255 for c in p):
                raise ValueError(f"bad pixel {p!r}")
        object.__setattr__(self, "pixels", pixels)

    def is_gray(self):
        return all(r == g == b for r, g, b in self.pixels)


def text_to_bipolar(password, width):
    if not password:
        raise EncodingError("password is empty")
    codes = [ord(ch) for ch in password]
    for pos, code in enumerate(codes):
        if code == 0 or code > 255:
            raise EncodingError(f"character {password[pos]!r} at position {pos} is outside the 8-bit code")
    needed = BITS_PER_CHAR * len(codes)
    if width < needed:
        raise EncodingError(f"width {width} too small; {len(codes)} characters need {needed} bits")
    bits = np.unpackbits(np.array(codes, dtype=np.uint8))
    out = -np.ones(width)
    out[:needed] = 2.0 * bits - 1.0
    return out


def bipolar_to_text(x):
    """Inverse of :func:`text_to_bipolar` (padding and trailing partial bytes dropped)."""
    bits = (np.asarray(x) > 0).astype(np.uint8)
    n = bits.size // BITS_PER_CHAR * BITS_PER_CHAR
    codes = np.packbits(bits[:n])
    return "".join(chr(c) for c in codes if c)


def binary_to_bipolar(m):
    return 2.0 * np.array(m.bits, dtype=np.float64) - 1.0


def bipolar_to_binary(x, rows, cols):
    x = np.asarray(x)
    if x.size != rows * cols:
        raise ValueError(f"vector of length {x.size} does not fill {rows}x{cols}")
    if not np.all(np.abs(x) == 1.0):
        raise ValueError("vector is not saturated")
    return BinaryMatrix(rows, cols, tuple(int(v > 0) for v in x))


def image_to_binary(img, threshold=128):
    if not (0 <= threshold <= 255) or int(threshold) != threshold:
        raise ValueError(f"threshold must be an integer in 0..255, got {threshold!r}")
    px = np.array(img.pixels, dtype=np.int64).reshape(-1, 3)
    lum = (299 * px[:, 0] + 587 * px[:, 1] + 114 * px[:, 2] + 500) // 1000
    return BinaryMatrix(img.height, img.width, tuple((lum >= threshold).astype(int)))


def image_to_bipolar(img, threshold=128):
    return binary_to_bipolar(image_to_binary(img, threshold))


class _Tokens:
    """Whitespace/comment tokenizer over the plain netpbm grammar."""

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def next(self, what):
        data, n = self.data, len(self.data)
        pos = self.pos
        while pos < n:
            ch = data[pos : pos + 1]
            if ch in _WHITESPACE and ch:
                pos += 1
            elif ch == b"#":
                while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                break
        if pos >= n:
            self.pos = pos
            raise TruncatedImageError(f"unexpected end of data, expected {what}", pos)
        start = pos
        while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
            pos += 1
        self.pos = pos
        return data[start:pos], start

    def integer(self, what):
        tok, start = self.next(what)
        if not tok.isdigit():
            raise ImageFormatError(f"expected {what}, found {tok[:16]!r}", start)
        return int(tok), start


def read_image(source):
    """Parse an ASCII PPM/PGM image from a path, bytes, or binary stream."""
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("ascii")

    toks = _Tokens(data)
    if len(data) < 2:
        raise TruncatedImageError("missing magic number", 0)
    magic = data[:2]
    if magic not in (b"P2", b"P3"):
        raise UnsupportedFormatError(
            f"unsupported format {magic!r}; only ASCII P2 (PGM) and P3 (PPM) are read", 0
        )
    if len(data) > 2 and data[2:3] not in _WHITESPACE and data[2:3] != b"#":
        raise UnsupportedFormatError(f"bad magic {data[:3]!r}", 0)
    toks.pos = 2
    width, off = toks.integer("width")
    height, _ = toks.integer("height")
    if width < 1 or height < 1:
        raise ImageFormatError(f"image dimensions must be positive, got {width}x{height}", off)
    if width * height > MAX_PIXELS:
        raise DimensionOverflowError(f"{width}x{height} exceeds the {MAX_PIXELS}-pixel limit", off)
    maxval, off = toks.integer("maxval")
    if maxval != 255:
        raise MaxvalError(f"maxval must be 255, got {maxval}", off)

    channels = 3 if magic == b"P3" else 1
    samples = []
    for k in range(width * height * channels):
        value, off = toks.integer(f"sample {k}")
        if value > maxval:
            raise ImageFormatError(f"sample {value} exceeds maxval {maxval}", off)
        samples.append(value)
    if channels == 1:
        pixels = tuple((v, v, v) for v in samples)
    else:
        pixels = tuple(tuple(samples[i : i + 3]) for i in range(0, len(samples), 3))
    return RgbImage(width, height, pixels)


def write_image(img, fmt=None):
    """Serialize as ASCII netpbm bytes. ``fmt`` defaults to P2 for gray images."""
    if fmt is None:
        fmt = "P2" if img.is_gray() else "P3"
    if fmt == "P2" and not img.is_gray():
        raise ValueError("P2 output requires a gray image")
    if fmt not in ("P2", "P3"):
        raise ValueError(f"unsupported output format {fmt!r}")
    out = io.StringIO()
    out.write(f"{fmt}\n{img.width} {img.height}\n255\n")
    for row in range(img.height):
        px = img.pixels[row * img.width : (row + 1) * img.width]
        if fmt == "P2":
            out.write(" ".join(str(p[0]) for p in px))
        else:
            out.write(" ".join(f"{r} {g} {b}" for r, g, b in px))
        out.write("\n")
    return out.getvalue().encode("ascii")


def format_bipolar(x, cols=None):
    """Render as space-separated +1/-1 tokens; ``cols`` splits into rows."""
    toks = []
    for v in np.asarray(x, dtype=np.float64):
        if v == 1.0:
            toks.append("+1")
        elif v == -1.0:
            toks.append("-1")
        else:
            toks.append(repr(float(v)))
    if not cols:
        return " ".join(toks)
    return "\n".join(" ".join(toks[i : i + cols]) for i in range(0, len(toks), cols))


def parse_bipolar(line):
    """Parse whitespace-separated +1/-1 (or 1/-1) tokens."""
    vals = []
    for tok in line.split():
        if tok in ("+1", "1"):
            vals.append(1.0)
        elif tok == "-1":
            vals.append(-1.0)
        else:
            raise EncodingError(f"bad bipolar token {tok!r}")
    if not vals:
        raise EncodingError("empty pattern")
    return np.array(vals)
