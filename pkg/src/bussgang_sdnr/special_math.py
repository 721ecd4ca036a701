"""Special functions, Gaussian-weighted quadrature and seeded random streams.

Everything here works elementwise on numpy arrays as well as on Python
floats. ``erf`` is computed locally so results do not depend on the
platform libm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from bussgang_sdnr.errors import ConvergenceError, DomainError

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# |x| below this uses the all-positive series, above it the erfc continued
# fraction. Past 6 erf(x) rounds to 1 in double precision.
_SERIES_LIMIT = 2.5
_SATURATION = 6.0
_SERIES_MAX_TERMS = 120
_CF_TERMS = 80


def _as_output(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def _erf_series(x):
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))
    # All terms are positive, so there is no cancellation.
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for n in range(1, _SERIES_MAX_TERMS):
        term = term * (2.0 * x2 / (2 * n + 1))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return _TWO_OVER_SQRT_PI * np.exp(-x2) * total


def _erfc_continued_fraction(x):
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    t = x.copy()
    for k in range(_CF_TERMS, 0, -1):
        t = x + (0.5 * k) / t
    return _INV_SQRT_PI * np.exp(-x * x) / t


def erf(x):
    """Error function, accurate to about 1e-15 absolute.

    Odd symmetry is exact: the magnitude is computed from ``|x|`` and the
    sign is reapplied afterwards.
    """
    arr = np.asarray(x, dtype=float)
    ax = np.abs(arr).reshape(-1)
    out = np.ones_like(ax)

    low = ax < _SERIES_LIMIT
    if np.any(low):
        out[low] = _erf_series(ax[low])
    mid = (ax >= _SERIES_LIMIT) & (ax < _SATURATION)
    if np.any(mid):
        out[mid] = 1.0 - _erfc_continued_fraction(ax[mid])

    out = np.copysign(out, arr.reshape(-1)).reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def normal_pdf(x, sigma):
    """Zero-mean Gaussian density with standard deviation ``sigma``."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}", quantity="normal_pdf")
    z = np.asarray(x, dtype=float) / sigma
    return _as_output(_INV_SQRT_2PI / sigma * np.exp(-0.5 * z * z), x)


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-9
    max_subdivisions: int = 200_000
    integration_halfwidth_sigmas: float = 8.0
    # Floor for integrals whose true value is zero (odd moments and the like).
    absolute_tolerance: float = 1e-15

    def __post_init__(self):
        if not self.relative_tolerance > 0:
            raise DomainError("relative_tolerance must be positive", quantity="quadrature")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1", quantity="quadrature")
        if self.integration_halfwidth_sigmas < 4:
            raise DomainError("integration half-width must be at least 4 sigma", quantity="quadrature")


DEFAULT_QUADRATURE = QuadratureSpec()

_INITIAL_SEGMENTS = 16


def integrate_gaussian_expectation(
    g: Callable[[np.ndarray], np.ndarray],
    mean: float,
    sigma: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    breakpoints: Iterable[float] = (),
) -> float:
    """Return E[g(X)] for X ~ N(mean, sigma^2) by adaptive Simpson quadrature.

    The window is ``mean +- k*sigma`` with ``k`` taken from ``spec``. Points in
    ``breakpoints`` that fall inside the window become forced interval edges,
    which is what lets piecewise-constant integrands (quantizer outputs)
    converge. ``g`` must accept and return numpy arrays.

    Function values at forced edges are taken a few ulps inside each piece,
    so a jump located exactly on an edge is seen as a one-sided limit.

    Raises ConvergenceError if ``spec.max_subdivisions`` is exhausted.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}", quantity="quadrature")

    half = spec.integration_halfwidth_sigmas * sigma
    lo, hi = mean - half, mean + half
    edges = np.linspace(lo, hi, _INITIAL_SEGMENTS + 1)
    inner = np.asarray([b for b in breakpoints if lo < b < hi], dtype=float)
    if inner.size:
        # grid edges a rounding error away from a jump would be read on the wrong side
        gap = np.min(np.abs(edges[:, None] - inner[None, :]), axis=1)
        keep = gap > 1e-6 * (hi - lo) / _INITIAL_SEGMENTS
        keep[[0, -1]] = True
        edges = np.unique(np.concatenate([edges[keep], inner]))
    length = hi - lo

    def h(x):
        z = (x - mean) / sigma
        return np.asarray(g(x), dtype=float) * (_INV_SQRT_2PI / sigma) * np.exp(-0.5 * z * z)

    a = edges[:-1]
    b = edges[1:]
    nudge_a = 8 * np.finfo(float).eps * np.maximum(np.abs(a), sigma)
    nudge_b = 8 * np.finfo(float).eps * np.maximum(np.abs(b), sigma)
    fa = h(a + nudge_a)
    fb = h(b - nudge_b)
    m = 0.5 * (a + b)
    fm = h(m)

    accepted = 0.0
    accepted_abs = 0.0
    n_intervals = a.size
    while True:
        width = b - a
        q1 = 0.5 * (a + m)
        q3 = 0.5 * (m + b)
        fq1 = h(q1)
        fq3 = h(q3)
        whole = width / 6.0 * (fa + 4.0 * fm + fb)
        left = width / 12.0 * (fa + 4.0 * fq1 + fm)
        right = width / 12.0 * (fm + 4.0 * fq3 + fb)
        halves = left + right
        err = np.abs(halves - whole) / 15.0

        scale = accepted_abs + np.sum(np.abs(left) + np.abs(right))
        target = max(spec.relative_tolerance * scale, spec.absolute_tolerance)
        ok = err <= target * (width / length)

        corrected = halves + (halves - whole) / 15.0
        accepted += float(np.sum(corrected[ok]))
        accepted_abs += float(np.sum(np.abs(left[ok]) + np.abs(right[ok])))

        todo = ~ok
        if not np.any(todo):
            return accepted

        n_intervals += int(np.count_nonzero(todo))
        if n_intervals > spec.max_subdivisions:
            estimate = accepted + float(np.sum(corrected[todo]))
            bound = float(np.sum(err[todo]))
            raise ConvergenceError(
                f"quadrature did not converge within {spec.max_subdivisions} subdivisions",
                estimate=estimate,
                error_bound=bound,
            )

        a_t, m_t, b_t = a[todo], m[todo], b[todo]
        a = np.concatenate([a_t, m_t])
        b = np.concatenate([m_t, b_t])
        fa = np.concatenate([fa[todo], fm[todo]])
        fb = np.concatenate([fm[todo], fb[todo]])
        m = np.concatenate([q1[todo], q3[todo]])
        fm = np.concatenate([fq1[todo], fq3[todo]])


_UINT64 = 2**64


@dataclass(frozen=True)
class RngStream:
    """Descriptor of one reproducible random stream.

    Substream rule: stream ``(seed, i)`` is generated by PCG64 seeded from
    ``SeedSequence(seed, spawn_key=(i,))``. Distinct ``i`` give independent
    streams.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < _UINT64:
            raise DomainError("seed must be a 64-bit unsigned integer", quantity="seed")
        if self.stream_index < 0:
            raise DomainError("stream_index must be non-negative", quantity="seed")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seq))


def sample_normal(stream: RngStream, sigma: float, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. N(0, sigma^2) samples from a fresh copy of ``stream``."""
    if sigma < 0:
        raise DomainError("sigma must be non-negative", quantity="sample_normal")
    if n < 1:
        raise DomainError("n must be at least 1", quantity="sample_normal")
    if sigma == 0:
        return np.zeros(n)
    return sigma * stream.generator().standard_normal(n)
