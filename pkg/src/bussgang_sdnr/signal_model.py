"""Signal distributions, the additive Gaussian noise model and the law of
the composite quantizer input x = s + n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Union

import numpy as np

from bussgang_sdnr.errors import DomainError
from bussgang_sdnr.special_math import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    RngStream,
    integrate_gaussian_expectation,
)

PROBABILITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Gaussian:
    sigma_s: float
    name: str = "gaussian"

    def __post_init__(self):
        if not self.sigma_s > 0:
            raise DomainError(f"sigma_s must be positive, got {self.sigma_s}", quantity="sigma_s")


@dataclass(frozen=True)
class Discrete:
    """Finite distribution given as parallel tuples of levels and probabilities."""

    levels: tuple
    probs: tuple
    name: str = "discrete"

    def __post_init__(self):
        lv = tuple(float(v) for v in self.levels)
        pr = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "probs", pr)
        if not lv or len(lv) != len(pr):
            raise DomainError("levels and probs must be non-empty and of equal length", quantity="distribution")
        if not all(math.isfinite(v) for v in lv):
            raise DomainError("levels must be finite", quantity="distribution")
        if any(not p > 0 for p in pr):
            raise DomainError("probabilities must be positive", quantity="distribution")
        if abs(math.fsum(pr) - 1.0) > PROBABILITY_TOLERANCE:
            raise DomainError(f"probabilities sum to {math.fsum(pr)!r}, not 1", quantity="distribution")
        if math.fsum(p * v * v for v, p in zip(lv, pr)) <= 0:
            raise DomainError("signal power must be positive", quantity="signal_power")

    @property
    def points(self):
        return list(zip(self.levels, self.probs))

    @property
    def is_symmetric(self) -> bool:
        pmf = dict(zip(self.levels, self.probs))
        return all(math.isclose(pmf.get(-v, 0.0), p, rel_tol=0, abs_tol=PROBABILITY_TOLERANCE) for v, p in pmf.items())


SignalDistribution = Union[Gaussian, Discrete]


def binary(amplitude: float) -> Discrete:
    """Equiprobable +-A."""
    if not amplitude > 0:
        raise DomainError("amplitude must be positive", quantity="amplitude")
    return Discrete((-amplitude, amplitude), (0.5, 0.5), name="binary")


def pam4(amplitude: float) -> Discrete:
    """Equiprobable +-A, +-3A."""
    if not amplitude > 0:
        raise DomainError("amplitude must be positive", quantity="amplitude")
    a = amplitude
    return Discrete((-3 * a, -a, a, 3 * a), (0.25,) * 4, name="pam4")


def load_discrete(path) -> Discrete:
    """Read a ``level,prob`` file (one pair per line, ``#`` starts a comment)."""
    levels, probs = [], []
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise DomainError(f"{path}:{lineno}: expected 'level,prob'", quantity="distribution")
        try:
            levels.append(float(parts[0]))
            probs.append(float(parts[1]))
        except ValueError:
            raise DomainError(f"{path}:{lineno}: non-numeric entry", quantity="distribution") from None
    return Discrete(tuple(levels), tuple(probs))


def signal_power(d: SignalDistribution) -> float:
    if isinstance(d, Gaussian):
        return d.sigma_s**2
    return math.fsum(p * v * v for v, p in zip(d.levels, d.probs))


def signal_mean(d: SignalDistribution) -> float:
    if isinstance(d, Gaussian):
        return 0.0
    return math.fsum(p * v for v, p in zip(d.levels, d.probs))


@dataclass(frozen=True)
class NoiseModel:
    sigma_n: float

    def __post_init__(self):
        if not self.sigma_n >= 0 or not math.isfinite(self.sigma_n):
            raise DomainError(f"sigma_n must be non-negative, got {self.sigma_n}", quantity="sigma_n")


class Snr(NamedTuple):
    linear: float
    db: float


def input_snr(d: SignalDistribution, noise: NoiseModel) -> Snr:
    """E[s^2] / sigma_n^2. Noise-free input reports +inf in both scales."""
    if noise.sigma_n == 0:
        return Snr(math.inf, math.inf)
    linear = signal_power(d) / noise.sigma_n**2
    return Snr(linear, 10.0 * math.log10(linear) if linear > 0 else -math.inf)


def sigma_n_for_snr_db(d: SignalDistribution, snr_db: float) -> float:
    return math.sqrt(signal_power(d) / 10.0 ** (snr_db / 10.0))


def sample_signal(d: SignalDistribution, stream: RngStream, n: int) -> np.ndarray:
    if n < 1:
        raise DomainError("n must be at least 1", quantity="sample_signal")
    gen = stream.generator()
    if isinstance(d, Gaussian):
        return d.sigma_s * gen.standard_normal(n)
    return gen.choice(np.asarray(d.levels), size=n, p=np.asarray(d.probs))


@dataclass(frozen=True)
class GaussianMixture:
    """Finite mixture of Gaussians; a component with sigma 0 is a point mass.

    ``components`` holds ``(weight, mean, sigma)`` triples.
    """

    components: tuple

    @property
    def second_moment(self) -> float:
        return math.fsum(w * (mu * mu + s * s) for w, mu, s in self.components)

    def expectation(
        self,
        g: Callable[[np.ndarray], np.ndarray],
        spec: QuadratureSpec = DEFAULT_QUADRATURE,
        breakpoints: Iterable[float] = (),
    ) -> float:
        bps = tuple(breakpoints)
        total = []
        for w, mu, s in self.components:
            if s == 0:
                total.append(w * float(np.asarray(g(np.array([mu])))[0]))
            else:
                total.append(w * integrate_gaussian_expectation(g, mu, s, spec, bps))
        return math.fsum(total)


@dataclass(frozen=True)
class NoisyInput:
    signal: SignalDistribution
    noise: NoiseModel

    @property
    def power(self) -> float:
        return signal_power(self.signal) + self.noise.sigma_n**2

    def input_law(self) -> GaussianMixture:
        sn = self.noise.sigma_n
        if isinstance(self.signal, Gaussian):
            return GaussianMixture(((1.0, 0.0, math.hypot(self.signal.sigma_s, sn)),))
        return GaussianMixture(tuple((p, v, sn) for v, p in zip(self.signal.levels, self.signal.probs)))
