"""SP800-22 randomness tests (frequency family, runs, cusum, ApEn, serial).

Every test takes a 1-D array of 0/1 values and returns its p-value(s).
Streams below a test's minimum length raise :class:`InsufficientDataError`.
Tests that are not implemented here are listed by :func:`run_suite` as
``external``; feed them the output of :func:`export_ascii`.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from scipy import special

from . import kernels
from .prng import as_bits

ALPHA = 0.01

# Category probabilities for the longest run of ones in 128-bit blocks,
# categories: <=4, 5, 6, 7, 8, >=9.
LONGEST_RUN_PROBS = (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)
LONGEST_RUN_BLOCK = 128

MIN_LENGTH = {
    "frequency": 100,
    "block_frequency": LONGEST_RUN_BLOCK,
    "runs": 100,
    "longest_run": 6272,
    "cumulative_sums_forward": 100,
    "cumulative_sums_reverse": 100,
    "approximate_entropy": 1 << 12,
    "serial": 1 << 20,
}

EXTERNAL_TESTS = (
    "dft",
    "binary_matrix_rank",
    "non_overlapping_template",
    "overlapping_template",
    "universal",
    "linear_complexity",
    "random_excursions",
    "random_excursions_variant",
)


class InsufficientDataError(ValueError):
    pass


def erfc(x: float) -> float:
    """Complementary error function."""
    return math.erfc(x)


def igamc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)``."""
    if not a > 0 or not x >= 0:
        raise ValueError(f"igamc needs a > 0 and x >= 0, got a={a}, x={x}")
    return float(special.gammaincc(a, x))


def _require(bits: np.ndarray, n_min: int, name: str) -> None:
    if bits.size < n_min:
        raise InsufficientDataError(f"{name} needs at least {n_min} bits, got {bits.size}")


def _clip(p: float) -> float:
    return min(1.0, max(0.0, float(p)))


def frequency_test(bits) -> float:
    bits = as_bits(bits)
    _require(bits, 100, "frequency test")
    n = bits.size
    s = 2 * int(np.count_nonzero(bits)) - n
    return erfc(abs(s) / math.sqrt(2 * n))


def block_frequency_test(bits, M: int = 128) -> float:
    bits = as_bits(bits)
    _require(bits, M, "block frequency test")
    if M < 20:
        warnings.warn(f"block size M={M} is below the recommended minimum of 20", stacklevel=2)
    n_blocks = bits.size // M
    ones = bits[: n_blocks * M].reshape(n_blocks, M).sum(axis=1, dtype=np.int64)
    chi2 = 4.0 * M * float(np.sum((ones / M - 0.5) ** 2))
    return igamc(n_blocks / 2, chi2 / 2)


def runs_test(bits) -> float:
    """Runs test; returns 0.0 when the frequency prerequisite fails."""
    bits = as_bits(bits)
    _require(bits, 100, "runs test")
    n = bits.size
    pi = np.count_nonzero(bits) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return 0.0
    v_obs = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    num = abs(v_obs - 2 * n * pi * (1 - pi))
    return erfc(num / (2 * math.sqrt(2 * n) * pi * (1 - pi)))


def longest_run_counts(bits) -> np.ndarray:
    """Per-category block counts for the 128-bit longest-run test."""
    bits = as_bits(bits)
    runs = kernels.longest_runs(np.ascontiguousarray(bits), LONGEST_RUN_BLOCK)
    return np.bincount(np.clip(runs, 4, 9) - 4, minlength=6)


def longest_run_pvalue(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    expected = counts.sum() * np.asarray(LONGEST_RUN_PROBS)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return igamc((len(LONGEST_RUN_PROBS) - 1) / 2, chi2 / 2)


def longest_run_test(bits) -> float:
    bits = as_bits(bits)
    _require(bits, 6272, "longest run test")
    return longest_run_pvalue(longest_run_counts(bits))


def _tdiv(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def cumulative_sums_test(bits, mode: str = "forward") -> float:
    """Cumulative sums test, ``mode`` is ``"forward"`` or ``"reverse"``."""
    bits = as_bits(bits)
    _require(bits, 100, "cumulative sums test")
    if mode not in ("forward", "reverse"):
        raise ValueError(f"mode must be 'forward' or 'reverse', got {mode!r}")
    steps = 2 * bits.astype(np.int64) - 1
    if mode == "reverse":
        steps = steps[::-1]
    n = bits.size
    z = int(np.max(np.abs(np.cumsum(steps))))
    rn = math.sqrt(n)
    k = np.arange(_tdiv(_tdiv(-n, z) + 1, 4), _tdiv(_tdiv(n, z) - 1, 4) + 1)
    sum1 = np.sum(special.ndtr((4 * k + 1) * z / rn) - special.ndtr((4 * k - 1) * z / rn))
    k = np.arange(_tdiv(_tdiv(-n, z) - 3, 4), _tdiv(_tdiv(n, z) - 1, 4) + 1)
    sum2 = np.sum(special.ndtr((4 * k + 3) * z / rn) - special.ndtr((4 * k + 1) * z / rn))
    return _clip(1.0 - sum1 + sum2)


def pattern_counts(bits: np.ndarray, m: int) -> np.ndarray:
    """Counts of all overlapping m-bit patterns, wrapping around the end."""
    n = bits.size
    if m == 0:
        return np.array([n], dtype=np.int64)
    ext = np.concatenate([bits, bits[: m - 1]]).astype(np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for j in range(m):
        codes = (codes << 1) | ext[j : j + n]
    return np.bincount(codes, minlength=1 << m)


def approximate_entropy_test(bits, m: int = 2) -> float:
    bits = as_bits(bits)
    _require(bits, 1 << 12, "approximate entropy test")
    n = bits.size
    if m < 1:
        raise ValueError("m must be at least 1")
    if m >= int(math.log2(n)) - 5:
        warnings.warn(f"m={m} is too large for n={n}", stacklevel=2)

    def phi(mm):
        p = pattern_counts(bits, mm) / n
        p = p[p > 0]
        return float(np.sum(p * np.log(p)))

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2) - apen)
    return igamc(2.0 ** (m - 1), max(chi2, 0.0) / 2)


def default_serial_m(n: int) -> int:
    return min(16, int(math.log2(n)) - 3)


def serial_test(bits, m: int | None = None) -> tuple[float, float]:
    """Serial test returning ``(p1, p2)`` from the first and second ψ² differences."""
    bits = as_bits(bits)
    _require(bits, 32, "serial test")
    n = bits.size
    if m is None:
        m = default_serial_m(n)
    if m < 2:
        raise ValueError("m must be at least 2")
    if n < MIN_LENGTH["serial"]:
        warnings.warn(f"serial test is recommended for at least 2**20 bits, got {n}", stacklevel=2)

    def psi2(mm):
        if mm <= 0:
            return 0.0
        counts = pattern_counts(bits, mm)
        return (2.0**mm / n) * float(np.dot(counts, counts)) - n

    s0, s1, s2 = psi2(m), psi2(m - 1), psi2(m - 2)
    d1 = s0 - s1
    d2 = s0 - 2 * s1 + s2
    return igamc(2.0 ** (m - 2), max(d1, 0.0) / 2), igamc(2.0 ** (m - 3), max(d2, 0.0) / 2)


# -- suite -------------------------------------------------------------------


@dataclass
class TestRecord:
    __test__ = False

    name: str
    status: str  # pass | fail | skipped | external
    p_values: tuple[float, ...] = ()


@dataclass
class TestReport:
    __test__ = False

    n_bits: int
    alpha: float
    records: list[TestRecord] = field(default_factory=list)

    @property
    def executed(self) -> list[TestRecord]:
        return [r for r in self.records if r.status in ("pass", "fail")]

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.executed)

    def __getitem__(self, name: str) -> TestRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_text(self) -> str:
        """One ``test<TAB>p_value<TAB>verdict`` line per p-value."""
        lines = []
        for r in self.records:
            if not r.p_values:
                lines.append(f"{r.name}\t-\t{r.status}")
            elif len(r.p_values) == 1:
                lines.append(f"{r.name}\t{r.p_values[0]:.6f}\t{r.status}")
            else:
                for i, p in enumerate(r.p_values, 1):
                    lines.append(f"{r.name}_p{i}\t{p:.6f}\t{r.status}")
        lines.append(f"overall\t-\t{'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        """One JSON object per line: test, verdict, p_values, n_bits, alpha."""
        out = []
        for r in self.records:
            rec = {"test": r.name, "verdict": r.status, "p_values": list(r.p_values),
                   "n_bits": self.n_bits, "alpha": self.alpha}
            out.append(json.dumps(rec))
        return "\n".join(out) + "\n"


_SUITE = (
    ("frequency", lambda b: (frequency_test(b),)),
    ("block_frequency", lambda b: (block_frequency_test(b, 128),)),
    ("runs", lambda b: (runs_test(b),)),
    ("longest_run", lambda b: (longest_run_test(b),)),
    ("cumulative_sums_forward", lambda b: (cumulative_sums_test(b, "forward"),)),
    ("cumulative_sums_reverse", lambda b: (cumulative_sums_test(b, "reverse"),)),
    ("approximate_entropy", lambda b: (approximate_entropy_test(b, 2),)),
    ("serial", lambda b: serial_test(b, 16)),
)


def run_suite(bits, alpha: float = ALPHA) -> TestReport:
    """Run every implemented test whose length minimum the stream meets.

    A test passes when all of its p-values are at least ``alpha``.
    """
    bits = as_bits(bits)
    report = TestReport(n_bits=int(bits.size), alpha=alpha)
    for name, fn in _SUITE:
        if bits.size < MIN_LENGTH[name]:
            report.records.append(TestRecord(name, "skipped"))
            continue
        ps = tuple(float(p) for p in fn(bits))
        report.records.append(TestRecord(name, "pass" if min(ps) >= alpha else "fail", ps))
    for name in EXTERNAL_TESTS:
        report.records.append(TestRecord(name, "external"))
    return report


def export_ascii(bits, sink: TextIO) -> int:
    """Write bits as newline-free '0'/'1' characters; returns the count written."""
    bits = as_bits(bits)
    text = (bits + ord("0")).astype(np.uint8).tobytes().decode("ascii")
    sink.write(text)
    return len(text)
