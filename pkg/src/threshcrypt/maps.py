"""Chaotic interval maps, orbit iteration and threshold estimation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_BURN_IN = 1000

# Admissible logistic parameters for key material.
LOGISTIC_KEY_RANGE = (3.99996, 4.0)


class DegenerateOrbitError(ArithmeticError):
    """An orbit left (0, 1) or hit a point that collapses it."""

    def __init__(self, message: str, step: int | None = None, state: float | None = None):
        super().__init__(message)
        self.step = step
        self.state = state


class MapKind(enum.Enum):
    LOGISTIC = "logistic"
    ONE_PARAM = "one_param"

    @property
    def code(self) -> int:
        return kernels.LOGISTIC if self is MapKind.LOGISTIC else kernels.ONE_PARAM


@dataclass(frozen=True)
class MapSpec:
    """A map family plus its control parameter (``r`` or ``alpha``)."""

    kind: MapKind
    param: float

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", MapKind(self.kind))
        object.__setattr__(self, "param", float(self.param))
        if not math.isfinite(self.param):
            raise ValueError(f"map parameter must be finite, got {self.param}")
        if self.kind is MapKind.LOGISTIC and not 0.0 < self.param <= 4.0:
            raise ValueError(f"logistic r must lie in (0, 4], got {self.param}")
        if self.kind is MapKind.ONE_PARAM and not self.param > 0.0:
            raise ValueError(f"alpha must be positive, got {self.param}")

    @classmethod
    def logistic(cls, r: float) -> "MapSpec":
        return cls(MapKind.LOGISTIC, r)

    @classmethod
    def one_param(cls, alpha: float) -> "MapSpec":
        return cls(MapKind.ONE_PARAM, alpha)

    def check_key_range(self) -> None:
        """Stricter check applied to parameters loaded as key material."""
        lo, hi = LOGISTIC_KEY_RANGE
        if self.kind is MapKind.LOGISTIC and not lo <= self.param <= hi:
            raise ValueError(f"logistic key parameter must lie in [{lo}, {hi}], got {self.param}")

    def step(self, x: float) -> float:
        if self.kind is MapKind.LOGISTIC:
            return logistic_step(x, self.param)
        return one_param_step(x, self.param)


def _check_unit(x: float) -> None:
    if not 0.0 < x < 1.0:
        raise ValueError(f"state must lie in (0, 1), got {x!r}")


def logistic_step(x: float, r: float) -> float:
    """One logistic step ``r*x*(1-x)``.

    ``x = 0.5`` with ``r = 4`` returns exactly 1.0; orbit drivers reject it.
    """
    _check_unit(x)
    return r * x * (1.0 - x)


def one_param_step(x: float, alpha: float) -> float:
    """One step of ``a^2 (2x-1)^2 / (4x(1-x) + a^2 (2x-1)^2)``.

    The map sends 1/2 to 0; orbit drivers treat anything within
    ``1e-12`` of 1/2 as degenerate.
    """
    _check_unit(x)
    d = 2.0 * x - 1.0
    t = alpha * alpha * (d * d)
    return t / (4.0 * x * (1.0 - x) + t)


def iterate(spec: MapSpec, x0: float, n: int, skip: int = 0) -> tuple[np.ndarray, float]:
    """Run ``skip + n`` steps from ``x0`` and return the last ``n`` states.

    Raises :class:`DegenerateOrbitError` with the 0-based failing step.
    """
    if n < 0 or skip < 0:
        raise ValueError("step counts must be non-negative")
    _check_unit(x0)
    values, state, fail = kernels.orbit(spec.kind.code, spec.param, float(x0), int(skip), int(n))
    if fail >= 0:
        raise DegenerateOrbitError(
            f"{spec.kind.value} orbit from x0={x0!r} degenerated at step {fail} (state {state!r})",
            step=int(fail),
            state=float(state),
        )
    return values, float(state)


@dataclass(frozen=True)
class Orbit:
    """Immutable orbit snapshot; :meth:`advance` returns a new one."""

    spec: MapSpec
    state: float
    steps_taken: int = 0

    def __post_init__(self):
        _check_unit(self.state)

    def advance(self, n: int = 1) -> "Orbit":
        return advance(self, n)


def advance(orbit: Orbit, n: int) -> Orbit:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return orbit
    try:
        _, state = iterate(orbit.spec, orbit.state, 0, skip=n)
    except DegenerateOrbitError as exc:
        step = orbit.steps_taken + exc.step
        raise DegenerateOrbitError(
            f"orbit degenerated at step {step} (state {exc.state!r})", step=step, state=exc.state
        ) from None
    return Orbit(orbit.spec, state, orbit.steps_taken + n)


def estimate_threshold(
    spec: MapSpec, x0: float, n_samples: int = 10**6, burn_in: int = DEFAULT_BURN_IN
) -> float:
    """Estimate the threshold ``c = ∫ f(x) f*(x) dx`` as an orbit time average.

    By invariance of ``f*`` the integral equals the mean of the invariant
    density, which ergodicity lets us read off a single long orbit.

    Parameters
    ----------
    spec : MapSpec
        Map to sample.
    x0 : float
        Initial condition in (0, 1).
    n_samples : int
        Orbit points averaged after the transient; at least 10**5.
    burn_in : int
        Transient steps discarded first.
    """
    if n_samples < 10**5:
        raise ValueError(f"n_samples must be at least 1e5, got {n_samples}")
    values, _ = iterate(spec, x0, n_samples, skip=burn_in)
    return math.fsum(values) / n_samples
