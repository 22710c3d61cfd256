"""Minimal 8-bit PGM (P5 binary / P2 ASCII) reader and canonical writer."""

from __future__ import annotations

import re
from typing import BinaryIO

import numpy as np


class PGMError(ValueError):
    pass


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*([^\s#]+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def loads_pgm(data: bytes) -> np.ndarray:
    """Parse PGM bytes into an ``(H, W)`` uint8 array."""
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P2"):
        raise PGMError(f"unsupported magic {magic!r}; expected P5 or P2")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PGMError("malformed PGM header") from None
    if width <= 0 or height <= 0:
        raise PGMError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise PGMError(f"maxval must be 255, got {maxval}")
    n = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        payload = data[pos + 1 : pos + 1 + n]
        if len(payload) != n:
            raise PGMError(f"truncated raster: expected {n} bytes, got {len(payload)}")
        pixels = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < n:
            raise PGMError(f"truncated raster: expected {n} samples, got {len(body)}")
        values = np.array([int(v) for v in body[:n]])
        if values.min() < 0 or values.max() > 255:
            raise PGMError("sample out of range 0..255")
        pixels = values.astype(np.uint8)
    return pixels.reshape(height, width).copy()


def load_pgm(source: BinaryIO) -> np.ndarray:
    return loads_pgm(source.read())


def dumps_pgm(img: np.ndarray) -> bytes:
    img = np.asarray(img)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise PGMError("image must be a 2-D uint8 array")
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img).tobytes()


def save_pgm(img: np.ndarray, sink: BinaryIO) -> int:
    """Write canonical P5; returns the number of bytes written."""
    return sink.write(dumps_pgm(img))


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return load_pgm(fh)


def write_pgm(img: np.ndarray, path) -> int:
    with open(path, "wb") as fh:
        return save_pgm(img, fh)
