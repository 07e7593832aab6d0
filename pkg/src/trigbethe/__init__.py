"""Nested Bethe vectors for trigonometric gl(N) chains."""

from .kernels import BACKEND
from .repchain import ChainSpec
from .scalars import Kernel, PoleError, RationalSampler
from .bethe import BetheSpec, bethe_state, build_bethe, dual_state

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BetheSpec",
    "ChainSpec",
    "Kernel",
    "PoleError",
    "RationalSampler",
    "bethe_state",
    "build_bethe",
    "dual_state",
]
