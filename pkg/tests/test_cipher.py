import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from threshcrypt import cipher, pgm
from threshcrypt.prng import generate_keystream, load_preset

even = st.integers(1, 12).map(lambda v: 2 * v)


@st.composite
def even_images(draw):
    h, w = draw(even), draw(even)
    return draw(arrays(np.uint8, (h, w)))


# -- PGM ---------------------------------------------------------------------


def test_load_p5_minimal():
    img = pgm.loads_pgm(b"P5 2 2 255\n" + bytes([1, 2, 3, 4]))
    np.testing.assert_array_equal(img, [[1, 2], [3, 4]])


def test_load_p5_with_comments():
    data = b"P5\n# made by hand\n3 1\n# depth\n255\n" + bytes([9, 8, 7])
    np.testing.assert_array_equal(pgm.loads_pgm(data), [[9, 8, 7]])


def test_load_p2():
    img = pgm.loads_pgm(b"P2\n2 2\n255\n0 255\n# row two\n17 4\n")
    np.testing.assert_array_equal(img, [[0, 255], [17, 4]])


@pytest.mark.parametrize(
    "data",
    [
        b"P5 2 2 65535\n" + bytes(8),
        b"P6 1 1 255\n" + bytes(3),
        b"P5 2 2 255\n" + bytes(3),
        b"P5 2\n",
        b"P5 x 2 255\n" + bytes(4),
        b"P2 1 2 255\n7\n",
    ],
)
def test_load_rejects_bad_files(data):
    with pytest.raises(pgm.PGMError):
        pgm.loads_pgm(data)


def test_save_canonical_bytes():
    buf = io.BytesIO()
    n = pgm.save_pgm(np.zeros((1, 1), dtype=np.uint8), buf)
    assert buf.getvalue() == b"P5\n1 1\n255\n\x00"
    assert n == len(buf.getvalue())


@settings(max_examples=50)
@given(arrays(np.uint8, st.tuples(st.integers(1, 20), st.integers(1, 20))))
def test_pgm_roundtrip(img):
    data = pgm.dumps_pgm(img)
    h, w = img.shape
    assert len(data) == len(f"P5\n{w} {h}\n255\n") + w * h
    assert data == pgm.dumps_pgm(img)
    np.testing.assert_array_equal(pgm.loads_pgm(data), img)


# -- bit layout --------------------------------------------------------------


def test_image_to_bits_msb_first():
    np.testing.assert_array_equal(cipher.image_to_bits(np.array([[0x80]], dtype=np.uint8)), [1, 0, 0, 0, 0, 0, 0, 0])
    assert not cipher.image_to_bits(np.zeros((4, 4), dtype=np.uint8)).any()
    bits = cipher.image_to_bits(np.array([[1, 2]], dtype=np.uint8))
    np.testing.assert_array_equal(bits, [0] * 7 + [1] + [0] * 6 + [1, 0])


@given(even_images())
def test_bits_image_roundtrip(img):
    h, w = img.shape
    np.testing.assert_array_equal(cipher.bits_to_image(cipher.image_to_bits(img), w, h), img)


def test_bits_to_image_length_mismatch():
    with pytest.raises(ValueError):
        cipher.bits_to_image(np.zeros(15, dtype=np.uint8), 1, 2)


def test_xor_bits():
    a = np.random.default_rng(0).integers(0, 2, 999).astype(np.uint8)
    b = np.random.default_rng(1).integers(0, 2, 999).astype(np.uint8)
    assert not cipher.xor_bits(a, a).any()
    np.testing.assert_array_equal(cipher.xor_bits(a, np.zeros_like(a)), a)
    np.testing.assert_array_equal(cipher.xor_bits(cipher.xor_bits(a, b), b), a)
    with pytest.raises(ValueError):
        cipher.xor_bits(a, b[:-1])


# -- shuffles ----------------------------------------------------------------


def grid4():
    return np.arange(16, dtype=np.uint8).reshape(4, 4)


def test_column_shuffle_hand_trace():
    out = cipher.quadrant_column_shuffle(grid4())
    # TL local column 1 (global 1, rows 0-1) <-> BR local column 0 (global 2, rows 2-3)
    # TR local column 1 (global 3, rows 0-1) <-> BL local column 0 (global 0, rows 2-3)
    expected = np.array(
        [
            [0, 10, 2, 8],
            [4, 14, 6, 12],
            [3, 9, 1, 11],
            [7, 13, 5, 15],
        ],
        dtype=np.uint8,
    )
    np.testing.assert_array_equal(out, expected)


def test_row_shuffle_hand_trace():
    out = cipher.quadrant_row_shuffle(grid4())
    # TL local row 1 (global row 1, cols 0-1) <-> BR local row 0 (global row 2, cols 2-3)
    # TR local row 1 (global row 1, cols 2-3) <-> BL local row 0 (global row 2, cols 0-1)
    expected = np.array(
        [
            [0, 1, 2, 3],
            [10, 11, 8, 9],
            [6, 7, 4, 5],
            [12, 13, 14, 15],
        ],
        dtype=np.uint8,
    )
    np.testing.assert_array_equal(out, expected)


@given(even_images())
def test_shuffles_are_involutions_and_permutations(img):
    for fn in (cipher.quadrant_column_shuffle, cipher.quadrant_row_shuffle):
        out = fn(img)
        np.testing.assert_array_equal(fn(out), img)
        np.testing.assert_array_equal(np.sort(out, axis=None), np.sort(img, axis=None))


@pytest.mark.parametrize("shape", [(3, 4), (4, 5), (1, 1)])
def test_odd_sides_rejected(shape):
    img = np.zeros(shape, dtype=np.uint8)
    with pytest.raises(ValueError):
        cipher.quadrant_column_shuffle(img)
    with pytest.raises(ValueError):
        cipher.encrypt(img, load_preset("A"))


# -- encrypt / decrypt -------------------------------------------------------


def test_encrypt_follows_the_six_steps():
    img = np.random.default_rng(3).integers(0, 256, (8, 6)).astype(np.uint8)
    key = load_preset("B")
    stream = generate_keystream(key, 8 * img.size)
    mixed = cipher.bits_to_image(cipher.image_to_bits(img) ^ stream, 6, 8)
    expected = cipher.quadrant_row_shuffle(cipher.quadrant_column_shuffle(mixed))
    np.testing.assert_array_equal(cipher.encrypt(img, key), expected)


@pytest.mark.parametrize("name", "ABCD")
@pytest.mark.parametrize("shape", [(2, 2), (16, 16), (256, 256), (6, 10)])
def test_roundtrip(name, shape):
    img = np.random.default_rng(sum(shape)).integers(0, 256, shape).astype(np.uint8)
    key = load_preset(name)
    enc = cipher.encrypt(img, key)
    np.testing.assert_array_equal(enc, cipher.encrypt(img, key))
    np.testing.assert_array_equal(cipher.decrypt(enc, key), img)


def test_roundtrip_all_zero_image():
    img = np.zeros((8, 8), dtype=np.uint8)
    key = load_preset("C")
    np.testing.assert_array_equal(cipher.decrypt(cipher.encrypt(img, key), key), img)


def test_ciphertext_differs_from_natural_plaintext(camera):
    enc = cipher.encrypt(camera, load_preset("A"))
    assert np.mean(enc != camera) >= 0.99


def test_wrong_key_scrambles_decryption(camera):
    key = load_preset("A")
    enc = cipher.encrypt(camera, key)
    wrong = cipher.decrypt(enc, key.with_x0(key.x0 + 1e-14))
    assert np.mean(wrong != camera) >= 0.99
