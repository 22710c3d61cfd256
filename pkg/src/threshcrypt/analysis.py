"""Security metrics for ciphered images.

Histogram and mean intensity, chi-square uniformity, adjacent-pixel
correlation, NPCR/UACI and key-space size.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .cipher import encrypt
from .prng import KeySet, Method
from .stats import igamc

# Knuth's MMIX multiplier/increment, modulus 2**64.
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


class Direction(enum.Enum):
    HORIZONTAL = (0, 1)
    VERTICAL = (1, 0)
    DIAGONAL = (1, 1)

    @property
    def label(self) -> str:
        return self.name.lower()


class UndefinedCorrelationError(ArithmeticError):
    """Correlation requested for a sample with zero variance."""


def histogram(img) -> np.ndarray:
    return np.bincount(np.asarray(img, dtype=np.uint8).ravel(), minlength=256)


def mean_intensity(img) -> float:
    return float(np.mean(img, dtype=np.float64))


def chi_square_uniformity(counts) -> tuple[float, float]:
    """Chi-square statistic against a flat 256-bin histogram and its p-value."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if counts.shape != (256,) or total <= 0:
        raise ValueError("need 256 counts with a positive total")
    expected = total / 256
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, igamc(255 / 2, stat / 2)


def lcg_stream(seed: int):
    """Yield 32-bit outputs of ``s <- a*s + c mod 2**64`` (upper half of the state)."""
    state = seed & _MASK64
    while True:
        state = (LCG_MULTIPLIER * state + LCG_INCREMENT) & _MASK64
        yield state >> 32


def adjacent_pairs(img, direction: Direction, n_pairs: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n_pairs`` adjacent pixel pairs (with replacement) using :func:`lcg_stream`.

    The anchor of each pair is pixel ``(i, j)`` with ``i = u mod (H - di)``
    and ``j = v mod (W - dj)`` for consecutive generator outputs ``u, v``;
    its partner is ``(i + di, j + dj)``.
    """
    img = np.asarray(img)
    h, w = img.shape
    di, dj = direction.value
    rows, cols = h - di, w - dj
    if rows <= 0 or cols <= 0:
        raise ValueError(f"image too small for {direction.label} pairs")
    draws = lcg_stream(seed)
    ii = np.empty(n_pairs, dtype=np.int64)
    jj = np.empty(n_pairs, dtype=np.int64)
    for p in range(n_pairs):
        ii[p] = next(draws) % rows
        jj[p] = next(draws) % cols
    return img[ii, jj].astype(np.float64), img[ii + di, jj + dj].astype(np.float64)


def pearson(x, y) -> float:
    """Correlation with population (1/N) moments."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx, dy = x - x.mean(), y - y.mean()
    var_x, var_y = np.mean(dx * dx), np.mean(dy * dy)
    if var_x == 0 or var_y == 0:
        raise UndefinedCorrelationError("correlation undefined: a sample has zero variance")
    return float(np.mean(dx * dy) / (math.sqrt(var_x) * math.sqrt(var_y)))


def correlation_adjacent(img, direction: Direction = Direction.HORIZONTAL, n_pairs: int = 2000, seed: int = 0) -> float:
    return pearson(*adjacent_pairs(img, direction, n_pairs, seed))


def _check_pair(c1, c2) -> tuple[np.ndarray, np.ndarray]:
    c1, c2 = np.asarray(c1), np.asarray(c2)
    if c1.shape != c2.shape:
        raise ValueError(f"dimension mismatch: {c1.shape} vs {c2.shape}")
    return c1, c2


def npcr(c1, c2) -> float:
    c1, c2 = _check_pair(c1, c2)
    return 100.0 * np.count_nonzero(c1 != c2) / c1.size


def uaci(c1, c2) -> float:
    c1, c2 = _check_pair(c1, c2)
    diff = np.abs(c1.astype(np.int64) - c2.astype(np.int64))
    return 100.0 * float(diff.sum()) / (255.0 * c1.size)


def secret_reals(key: KeySet) -> int:
    """Continuous secret parameters: two initial conditions plus two map/threshold reals."""
    if key.method in (Method.SEGMENTATION, Method.SELF_SIMILARITY):
        return 4
    raise ValueError(f"unknown method {key.method}")


def key_space_bits(key: KeySet | int, precision: float = 1e-14) -> float:
    """log2 of the key space: ``n_reals * log2(1 / precision)``.

    ``key`` may be a :class:`KeySet` or the number of secret reals directly.
    """
    if not 0 < precision < 1:
        raise ValueError(f"precision must lie in (0, 1), got {precision}")
    n = key if isinstance(key, int) else secret_reals(key)
    return n * math.log2(1 / precision)


def perturb_one_pixel(img) -> np.ndarray:
    """Copy of ``img`` with the least significant bit of pixel (0, 0) flipped."""
    out = np.array(img, dtype=np.uint8, copy=True)
    out[0, 0] ^= 1
    return out


@dataclass
class AnalysisReport:
    histogram: np.ndarray
    mean_intensity: float
    plain_mean_intensity: float
    chi_square: float
    chi_square_p: float
    correlations: dict[str, dict[str, float]] = field(default_factory=dict)
    npcr_percent: float = 0.0
    uaci_percent: float = 0.0
    key_space_bits: float = 0.0
    scatter: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    def to_text(self) -> str:
        lines = [
            f"mean_intensity_plain\t{self.plain_mean_intensity:.4f}",
            f"mean_intensity_cipher\t{self.mean_intensity:.4f}",
            f"chi_square\t{self.chi_square:.4f}",
            f"chi_square_p\t{self.chi_square_p:.6f}",
        ]
        for d in Direction:
            for which in ("plain", "cipher"):
                lines.append(f"correlation_{d.label}_{which}\t{self.correlations[which][d.label]:.6f}")
        lines += [
            f"npcr_percent\t{self.npcr_percent:.12g}",
            f"uaci_percent\t{self.uaci_percent:.12g}",
            f"key_space_bits\t{self.key_space_bits:.2f}",
        ]
        return "\n".join(lines) + "\n"

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        buf.write("value,count\n")
        for v, n in enumerate(self.histogram):
            buf.write(f"{v},{int(n)}\n")
        return buf.getvalue()

    def scatter_csv(self) -> str:
        """Sampled adjacent pairs as ``image,direction,x,y`` rows."""
        buf = io.StringIO()
        buf.write("image,direction,x,y\n")
        for name, (xs, ys) in self.scatter.items():
            which, direction = name.split(":")
            for a, b in zip(xs, ys):
                buf.write(f"{which},{direction},{int(a)},{int(b)}\n")
        return buf.getvalue()


def analyze(plain, cipher, key: KeySet, seed: int = 0, n_pairs: int = 2000) -> AnalysisReport:
    """Compute every metric for a plain/cipher pair.

    NPCR and UACI compare ``cipher`` with the encryption of ``plain`` after
    flipping the LSB of pixel (0, 0).
    """
    plain, cipher = _check_pair(plain, cipher)
    counts = histogram(cipher)
    stat, p = chi_square_uniformity(counts)
    correlations: dict[str, dict[str, float]] = {"plain": {}, "cipher": {}}
    scatter = {}
    for which, img in (("plain", plain), ("cipher", cipher)):
        for d in Direction:
            xs, ys = adjacent_pairs(img, d, n_pairs, seed)
            scatter[f"{which}:{d.label}"] = (xs, ys)
            try:
                correlations[which][d.label] = pearson(xs, ys)
            except UndefinedCorrelationError:
                correlations[which][d.label] = float("nan")
    other = encrypt(perturb_one_pixel(plain), key)
    return AnalysisReport(
        histogram=counts,
        mean_intensity=mean_intensity(cipher),
        plain_mean_intensity=mean_intensity(plain),
        chi_square=stat,
        chi_square_p=p,
        correlations=correlations,
        npcr_percent=npcr(cipher, other),
        uaci_percent=uaci(cipher, other),
        key_space_bits=key_space_bits(key),
        scatter=scatter,
    )
