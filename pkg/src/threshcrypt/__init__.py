"""Chaotic pseudorandom bits from generalized threshold functions, and an image cipher built on them."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .cipher import decrypt, encrypt
from .maps import DegenerateOrbitError, MapKind, MapSpec, Orbit, estimate_threshold
from .prng import KeySet, Method, SplitRule, generate_keystream, load_preset
from .stats import run_suite

__all__ = [
    "BACKEND",
    "DegenerateOrbitError",
    "KeySet",
    "MapKind",
    "MapSpec",
    "Method",
    "Orbit",
    "SplitRule",
    "decrypt",
    "encrypt",
    "estimate_threshold",
    "generate_keystream",
    "load_preset",
    "run_suite",
]
