"""Threshold bit rules and the two-orbit keystream generator.

Two partitions of [0, 1] are supported:

* segmentation: 2**(k-1) equal blocks, each cut by the threshold ``c``
  applied to the fractional part of ``x * 2**(k-1)``;
* self-similarity: a depth-``k`` binary split tree whose root is ``c``.

The 2D rules emit 0 when both coordinates carry the same label and 1
otherwise, i.e. the XOR of the two 1D labels.
"""

from __future__ import annotations

import enum
import functools
import io
import math
import struct
from dataclasses import dataclass, replace
from typing import BinaryIO, TextIO

import numpy as np

from . import kernels
from .maps import DEFAULT_BURN_IN, MapKind, MapSpec, iterate

KEY_DECIMALS = 14
MAX_DEPTH = 24

# Calibration orbit used to estimate conditional block means of a map.
CALIBRATION_X0 = 0.3141592653589793
CALIBRATION_SAMPLES = 1 << 20


class Method(enum.Enum):
    SEGMENTATION = "segmentation"
    SELF_SIMILARITY = "self_similarity"


class SplitRule(enum.Enum):
    """How the self-similar tree places the cuts below its root.

    ``ergodic`` cuts every block at the mean of the map's invariant
    density restricted to that block (the threshold functional applied
    block-wise). ``relative`` cuts every block at the fraction ``c`` of
    its width, so each block is a scaled copy of [0, 1].
    """

    ERGODIC = "ergodic"
    RELATIVE = "relative"


# -- scalar bit rules --------------------------------------------------------


def bit_basic(x: float, c: float) -> int:
    """0 below the threshold, 1 at or above it."""
    return 0 if x < c else 1


def bit_segmentation_1d(x: float, c: float, k: int) -> int:
    v = x * 2.0 ** (k - 1)
    return 0 if v - math.floor(v) <= c else 1


def bit_segmentation_2d(x: float, y: float, c: float, c_prime: float, k: int) -> int:
    return bit_segmentation_1d(x, c, k) ^ bit_segmentation_1d(y, c_prime, k)


def label_self_similar_1d(x: float, c: float, k: int) -> int:
    """Label of ``x`` in the relative self-similar partition of depth ``k``.

    Each of the first ``k - 1`` levels narrows ``[lo, hi)`` to the side of
    ``lo + c*(hi - lo)`` that holds ``x``; the last cut decides the bit.
    """
    lo, hi = 0.0, 1.0
    for _ in range(k - 1):
        t = lo + c * (hi - lo)
        if x <= t:
            hi = t
        else:
            lo = t
    return 0 if x <= lo + c * (hi - lo) else 1


def bit_self_similar_2d(x: float, y: float, c: float, c_prime: float, k: int) -> int:
    return label_self_similar_1d(x, c, k) ^ label_self_similar_1d(y, c_prime, k)


# -- split trees -------------------------------------------------------------


def relative_tree(c: float, k: int) -> np.ndarray:
    """Breadth-first cut points of the relative partition (``2**k - 1`` nodes)."""
    _check_depth(k)
    splits = np.empty(2**k - 1)
    bounds = [(0.0, 1.0)]
    node = 0
    for _ in range(k):
        nxt = []
        for lo, hi in bounds:
            t = lo + c * (hi - lo)
            splits[node] = t
            node += 1
            nxt += [(lo, t), (t, hi)]
        bounds = nxt
    return splits


def ergodic_tree_from_samples(samples: np.ndarray, c: float, k: int) -> np.ndarray:
    """Cut points from conditional sample means, root pinned at ``c``.

    A block with no samples falls back to its relative cut.
    """
    _check_depth(k)
    ordered = np.sort(np.asarray(samples, dtype=np.float64))
    csum = np.concatenate(([0.0], np.cumsum(ordered)))
    splits = np.empty(2**k - 1)
    splits[0] = c
    bounds = [(0.0, c, 1.0)]
    node = 1
    for _ in range(1, k):
        nxt = []
        for lo, mid, hi in bounds:
            for a, b in ((lo, mid), (mid, hi)):
                i = np.searchsorted(ordered, a, side="right")
                j = np.searchsorted(ordered, b, side="right")
                t = (csum[j] - csum[i]) / (j - i) if j > i else a + c * (b - a)
                splits[node] = t
                node += 1
                nxt.append((a, t, b))
        bounds = nxt
    return splits


@functools.lru_cache(maxsize=32)
def ergodic_tree(spec: MapSpec, c: float, k: int) -> np.ndarray:
    """Ergodic split tree of ``spec`` sampled along a fixed calibration orbit."""
    samples, _ = iterate(spec, CALIBRATION_X0, CALIBRATION_SAMPLES, skip=DEFAULT_BURN_IN)
    tree = ergodic_tree_from_samples(samples, c, k)
    tree.setflags(write=False)
    return tree


def tree_label(x: float, splits: np.ndarray) -> int:
    depth = int(math.log2(len(splits) + 1))
    node = 0
    for _ in range(depth - 1):
        node = 2 * node + (1 if x <= splits[node] else 2)
    return 0 if x <= splits[node] else 1


def _check_depth(k: int) -> None:
    if not 1 <= k <= MAX_DEPTH:
        raise ValueError(f"depth k must lie in [1, {MAX_DEPTH}], got {k}")


# -- vectorised labels -------------------------------------------------------


def segmentation_labels(xs: np.ndarray, c: float, k: int) -> np.ndarray:
    return kernels.segmentation_labels(np.ascontiguousarray(xs, dtype=np.float64), float(c), int(k))


def tree_labels(xs: np.ndarray, splits: np.ndarray) -> np.ndarray:
    depth = int(math.log2(len(splits) + 1))
    return kernels.tree_labels(
        np.ascontiguousarray(xs, dtype=np.float64), np.ascontiguousarray(splits), depth
    )


# -- keys --------------------------------------------------------------------


@dataclass(frozen=True)
class KeySet:
    """Complete secret for one keystream."""

    method: Method
    x0: float
    y0: float
    map_x: MapSpec
    map_y: MapSpec
    c: float
    c_prime: float
    k: int
    burn_in: int = DEFAULT_BURN_IN
    split_rule: SplitRule = SplitRule.RELATIVE

    def __post_init__(self):
        if isinstance(self.method, str):
            object.__setattr__(self, "method", Method(self.method))
        if isinstance(self.split_rule, str):
            object.__setattr__(self, "split_rule", SplitRule(self.split_rule))
        for name in ("x0", "y0", "c", "c_prime"):
            value = float(getattr(self, name))
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
            object.__setattr__(self, name, value)
        _check_depth(self.k)
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be non-negative, got {self.burn_in}")

    def with_x0(self, x0: float) -> "KeySet":
        return replace(self, x0=x0)

    def trees(self) -> tuple[np.ndarray, np.ndarray]:
        """Split trees for the x and y coordinates (self-similarity only)."""
        if self.split_rule is SplitRule.RELATIVE:
            return relative_tree(self.c, self.k), relative_tree(self.c_prime, self.k)
        return ergodic_tree(self.map_x, self.c, self.k), ergodic_tree(self.map_y, self.c_prime, self.k)


class KeyFormatError(ValueError):
    pass


_KEY_FIELDS = (
    "method", "x0", "y0", "map_x_kind", "map_x_param", "map_y_kind",
    "map_y_param", "c", "c_prime", "k", "burn_in", "split_rule",
)
_OPTIONAL_FIELDS = {"split_rule": SplitRule.RELATIVE.value}


def _fmt_real(v: float) -> str:
    return f"{v:.{KEY_DECIMALS}f}"


def dump_key(key: KeySet, fp: TextIO) -> None:
    values = {
        "method": key.method.value,
        "x0": _fmt_real(key.x0),
        "y0": _fmt_real(key.y0),
        "map_x_kind": key.map_x.kind.value,
        "map_x_param": _fmt_real(key.map_x.param),
        "map_y_kind": key.map_y.kind.value,
        "map_y_param": _fmt_real(key.map_y.param),
        "c": _fmt_real(key.c),
        "c_prime": _fmt_real(key.c_prime),
        "k": str(key.k),
        "burn_in": str(key.burn_in),
        "split_rule": key.split_rule.value,
    }
    for name in _KEY_FIELDS:
        if _OPTIONAL_FIELDS.get(name) == values[name]:
            continue
        fp.write(f"{name} = {values[name]}\n")


def dumps_key(key: KeySet) -> str:
    buf = io.StringIO()
    dump_key(key, buf)
    return buf.getvalue()


def load_key(fp: TextIO) -> KeySet:
    """Parse a ``name = value`` key file and validate it as key material."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(fp, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not value:
            raise KeyFormatError(f"line {lineno}: expected 'name = value'")
        if name not in _KEY_FIELDS:
            raise KeyFormatError(f"line {lineno}: unknown field {name!r}")
        if name in raw:
            raise KeyFormatError(f"line {lineno}: duplicate field {name!r}")
        raw[name] = value
    for name, default in _OPTIONAL_FIELDS.items():
        raw.setdefault(name, default)
    missing = [n for n in _KEY_FIELDS if n not in raw]
    if missing:
        raise KeyFormatError(f"missing fields: {', '.join(missing)}")
    try:
        map_x = MapSpec(MapKind(raw["map_x_kind"]), float(raw["map_x_param"]))
        map_y = MapSpec(MapKind(raw["map_y_kind"]), float(raw["map_y_param"]))
        map_x.check_key_range()
        map_y.check_key_range()
        return KeySet(
            method=Method(raw["method"]),
            x0=float(raw["x0"]),
            y0=float(raw["y0"]),
            map_x=map_x,
            map_y=map_y,
            c=float(raw["c"]),
            c_prime=float(raw["c_prime"]),
            k=int(raw["k"]),
            burn_in=int(raw["burn_in"]),
            split_rule=SplitRule(raw["split_rule"]),
        )
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from exc


def loads_key(text: str) -> KeySet:
    return load_key(io.StringIO(text))


def random_key(method: Method, seed: int | None = None) -> KeySet:
    """Draw a key at the 14-decimal grid, reusing the preset map families."""
    rng = np.random.default_rng(seed)
    grid = lambda lo, hi: round(float(rng.uniform(lo, hi)), KEY_DECIMALS)  # noqa: E731
    if method is Method.SEGMENTATION:
        lo, hi = 3.99996, 4.0
        return KeySet(
            method, grid(0.01, 0.99), grid(0.01, 0.99),
            MapSpec.logistic(grid(lo, hi)), MapSpec.logistic(grid(lo, hi)),
            0.5, 0.5, int(rng.integers(2, 6)),
        )
    return KeySet(
        method, grid(0.01, 0.99), grid(0.01, 0.99),
        MapSpec.one_param(0.75), MapSpec.one_param(1.5),
        0.436, 0.634, int(rng.integers(3, 6)),
    )


# -- keystream ---------------------------------------------------------------


def generate_keystream(key: KeySet, n_bits: int) -> np.ndarray:
    """Return ``n_bits`` keystream bits as a uint8 array of 0/1.

    Both orbits first discard ``key.burn_in`` states, then advance in
    lockstep; bit ``i`` is derived from the ``burn_in + i + 1``-th iterate
    of each orbit.
    """
    if n_bits < 1:
        raise ValueError(f"n_bits must be at least 1, got {n_bits}")
    xs, _ = iterate(key.map_x, key.x0, n_bits, skip=key.burn_in)
    ys, _ = iterate(key.map_y, key.y0, n_bits, skip=key.burn_in)
    if key.method is Method.SEGMENTATION:
        lx = segmentation_labels(xs, key.c, key.k)
        ly = segmentation_labels(ys, key.c_prime, key.k)
    else:
        tx, ty = key.trees()
        lx = tree_labels(xs, tx)
        ly = tree_labels(ys, ty)
    return lx ^ ly


# -- bit containers ----------------------------------------------------------


def as_bits(bits) -> np.ndarray:
    """Coerce a sequence of 0/1 values (or a '0'/'1' string) to a uint8 array."""
    if isinstance(bits, str):
        return parse_ascii(bits)
    arr = np.asarray(bits)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit values must be 0 or 1")
    return arr.astype(np.uint8, copy=False)


def pack_bits(bits) -> bytes:
    """MSB-first packing; the final partial byte is zero padded on the right."""
    return np.packbits(as_bits(bits)).tobytes()


def unpack_bits(data: bytes, n_bits: int) -> np.ndarray:
    if n_bits > 8 * len(data):
        raise ValueError(f"{len(data)} bytes cannot hold {n_bits} bits")
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=n_bits)


def parse_ascii(text: str | bytes) -> np.ndarray:
    if isinstance(text, str):
        text = text.encode("ascii")
    raw = np.frombuffer(text, dtype=np.uint8)
    bits = raw - ord("0")
    if raw.size and bits.max() > 1:
        raise ValueError("ASCII bitstream may contain only '0' and '1'")
    return bits.astype(np.uint8)


_HEADER = struct.Struct("<Q")


def write_bitstream(bits, fp: BinaryIO, fmt: str = "raw") -> int:
    """Write bits as ``raw`` (8-byte LE bit count + packed bytes) or ``ascii``.

    Returns the number of bytes written.
    """
    bits = as_bits(bits)
    if fmt == "ascii":
        return fp.write((bits + ord("0")).astype(np.uint8).tobytes())
    if fmt == "raw":
        return fp.write(_HEADER.pack(bits.size)) + fp.write(pack_bits(bits))
    raise ValueError(f"unknown bitstream format {fmt!r}")


def read_bitstream(fp: BinaryIO, fmt: str = "auto") -> np.ndarray:
    data = fp.read()
    if fmt == "auto":
        fmt = "ascii" if data and set(data) <= {ord("0"), ord("1")} else "raw"
    if fmt == "ascii":
        return parse_ascii(data.strip())
    if fmt != "raw":
        raise ValueError(f"unknown bitstream format {fmt!r}")
    if len(data) < _HEADER.size:
        raise ValueError("raw bitstream is missing its 8-byte length header")
    (n_bits,) = _HEADER.unpack_from(data)
    payload = data[_HEADER.size:]
    if len(payload) != (n_bits + 7) // 8:
        raise ValueError(f"raw bitstream declares {n_bits} bits but carries {len(payload)} bytes")
    return unpack_bits(payload, n_bits)


# -- presets -----------------------------------------------------------------

_SEG = Method.SEGMENTATION
_SS = Method.SELF_SIMILARITY

PRESETS = {
    "A": KeySet(_SEG, 0.2, 0.6, MapSpec.logistic(4.0), MapSpec.logistic(3.99997), 0.5, 0.5, 3),
    "B": KeySet(_SEG, 0.7, 0.3, MapSpec.logistic(3.99998), MapSpec.logistic(3.99996), 0.5, 0.5, 4),
    "C": KeySet(_SS, 0.4, 0.8, MapSpec.one_param(0.75), MapSpec.one_param(1.5), 0.436, 0.634, 3),
    "D": KeySet(_SS, 0.6, 0.3, MapSpec.one_param(0.75), MapSpec.one_param(1.5), 0.436, 0.634, 4),
}


def load_preset(name: str) -> KeySet:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None

