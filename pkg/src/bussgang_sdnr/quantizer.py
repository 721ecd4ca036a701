"""Memoryless nonlinearities: the mid-rise uniform quantizer and two
analytic reference nonlinearities used as oracles.

A nonlinearity here is any callable on numpy arrays with a ``breakpoints``
attribute that lists its jump locations (for quadrature splitting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bussgang_sdnr.errors import DomainError


@dataclass(frozen=True)
class MidRiseQuantizer:
    """Uniform mid-rise quantizer with ``levels`` outputs spaced ``delta`` apart.

    Outputs are the odd multiples of delta/2 up to the saturation value
    (levels - 1) * delta / 2. Cells are left-open and right-closed, so an
    input exactly on a threshold maps to the lower cell, and 0 maps to
    -delta/2.
    """

    levels: int
    delta: float

    def __post_init__(self):
        if self.levels < 2 or self.levels & (self.levels - 1):
            raise DomainError(f"levels must be a power of two >= 2, got {self.levels}", quantity="levels")
        if not self.delta > 0 or not math.isfinite(self.delta):
            raise DomainError(f"delta must be positive, got {self.delta}", quantity="delta")

    @classmethod
    def from_bits(cls, bits: int, delta: float) -> "MidRiseQuantizer":
        if bits < 1:
            raise DomainError(f"bits must be >= 1, got {bits}", quantity="bits")
        return cls(2**bits, delta)

    @property
    def bits(self) -> int:
        return self.levels.bit_length() - 1

    @property
    def saturation(self) -> float:
        return (self.levels - 1) * self.delta / 2

    @property
    def threshold_indices(self) -> np.ndarray:
        """Integers j of the interior thresholds j*delta, ascending."""
        half = self.levels // 2
        return np.arange(-(half - 1), half)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.thresholds()

    def levels_array(self) -> np.ndarray:
        half = self.levels // 2
        return (np.arange(-half, half) + 0.5) * self.delta

    def thresholds(self) -> np.ndarray:
        return self.threshold_indices * self.delta

    def __call__(self, x):
        return quantize(self, x)


def quantize(q: MidRiseQuantizer, x):
    """Quantize ``x`` (scalar or array) by index arithmetic."""
    half = q.levels // 2
    xa = np.asarray(x, dtype=float)
    k = np.ceil(xa / q.delta) - 1.0
    # the division can round across a threshold; settle k*delta < x <= (k+1)*delta exactly
    k = np.where(xa <= k * q.delta, k - 1.0, k)
    k = np.where(xa > (k + 1.0) * q.delta, k + 1.0, k)
    k = np.clip(k, -half, half - 1)
    y = (k + 0.5) * q.delta
    return float(y) if np.ndim(x) == 0 else y


def levels(q: MidRiseQuantizer) -> np.ndarray:
    return q.levels_array()


def thresholds(q: MidRiseQuantizer) -> np.ndarray:
    return q.thresholds()


class Identity:
    """f(x) = x."""

    breakpoints = ()

    def __call__(self, x):
        return np.asarray(x, dtype=float) * 1.0

    def __repr__(self):
        return "Identity()"


@dataclass(frozen=True)
class HardLimiter:
    """f(x) = c * sign(x), with f(0) = -c to match the quantizer convention."""

    c: float = 1.0

    @property
    def breakpoints(self):
        return (0.0,)

    def __call__(self, x):
        return np.where(np.asarray(x, dtype=float) > 0, self.c, -self.c)
