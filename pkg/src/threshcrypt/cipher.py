"""Bit-padding image cipher: keystream XOR followed by two quadrant shuffles.

Images are ``(H, W)`` uint8 arrays with even sides. Pixel bits are laid
out row-major, most significant bit first, and keystream bit ``i`` meets
image bit ``i``.
"""

from __future__ import annotations

import numpy as np

from .prng import KeySet, as_bits, generate_keystream


def _check_image(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("image must be a 2-D uint8 array")
    return img


def _check_even(img: np.ndarray) -> None:
    h, w = img.shape
    if h % 2 or w % 2:
        raise ValueError(f"image sides must be even, got {w}x{h}")


def image_to_bits(img) -> np.ndarray:
    return np.unpackbits(np.ascontiguousarray(_check_image(img)).ravel())


def bits_to_image(bits, width: int, height: int) -> np.ndarray:
    bits = as_bits(bits)
    if bits.size != 8 * width * height:
        raise ValueError(f"expected {8 * width * height} bits for {width}x{height}, got {bits.size}")
    return np.packbits(bits).reshape(height, width)


def xor_bits(a, b) -> np.ndarray:
    a, b = as_bits(a), as_bits(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return a ^ b


def quadrant_column_shuffle(img) -> np.ndarray:
    """Swap odd local columns of TL/TR with the preceding even columns of BR/BL.

    Quadrants are ``(H/2) x (W/2)``. For odd local index ``j``, TL column
    ``j`` trades places with BR column ``j-1`` and TR column ``j`` with BL
    column ``j-1``. The map is an involution.
    """
    img = _check_image(img)
    _check_even(img)
    h, w = img.shape
    hh, hw = h // 2, w // 2
    odd = np.arange(1, hw, 2)
    even = odd - 1
    top, bot = slice(0, hh), slice(hh, h)
    out = img.copy()
    out[top, odd] = img[bot, hw + even]
    out[bot, hw + even] = img[top, odd]
    out[top, hw + odd] = img[bot, even]
    out[bot, even] = img[top, hw + odd]
    return out


def quadrant_row_shuffle(img) -> np.ndarray:
    """Swap odd local rows of TL/TR with the preceding even rows of BR/BL."""
    img = _check_image(img)
    _check_even(img)
    h, w = img.shape
    hh, hw = h // 2, w // 2
    odd = np.arange(1, hh, 2)
    even = odd - 1
    left, right = slice(0, hw), slice(hw, w)
    out = img.copy()
    out[odd, left] = img[hh + even, right]
    out[hh + even, right] = img[odd, left]
    out[odd, right] = img[hh + even, left]
    out[hh + even, left] = img[odd, right]
    return out


def encrypt(img, key: KeySet) -> np.ndarray:
    img = _check_image(img)
    _check_even(img)
    h, w = img.shape
    stream = generate_keystream(key, 8 * w * h)
    mixed = bits_to_image(xor_bits(image_to_bits(img), stream), w, h)
    return quadrant_row_shuffle(quadrant_column_shuffle(mixed))


def decrypt(img, key: KeySet) -> np.ndarray:
    img = _check_image(img)
    _check_even(img)
    h, w = img.shape
    mixed = quadrant_column_shuffle(quadrant_row_shuffle(img))
    stream = generate_keystream(key, 8 * w * h)
    return bits_to_image(xor_bits(image_to_bits(mixed), stream), w, h)
