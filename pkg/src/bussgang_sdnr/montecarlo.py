"""Monte Carlo estimates of the Bussgang coefficients, SDNR and uncoded BER.

Samples are produced in ``batches`` independent chunks. Chunk ``b`` draws
the signal from stream ``(seed, 2b)`` and the noise from ``(seed, 2b + 1)``,
so results do not depend on how chunks are scheduled across workers.
Standard errors come from the spread of the per-batch estimates (batch
means); the SDNR error is propagated from the batch (alpha, gamma) pairs by
linearisation. Every error is floored at the summation rounding level, so
configurations with no sampling spread still get a positive error.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from bussgang_sdnr.bussgang import ZERO_DISTORTION_RTOL
from bussgang_sdnr.errors import DomainError
from bussgang_sdnr.signal_model import SignalDistribution, binary, sample_signal
from bussgang_sdnr.special_math import RngStream, sample_normal

MIN_SAMPLES = 10_000
DEFAULT_BATCHES = 100


@dataclass(frozen=True)
class McEstimate:
    value: float
    standard_error: float
    n_samples: int
    seed: int

    def contains(self, x: float, k: float = 3.0) -> bool:
        if x == self.value:
            return True
        return abs(x - self.value) <= k * self.standard_error


@dataclass(frozen=True)
class McReport:
    alpha_s_hat: McEstimate
    gamma_s_hat: McEstimate
    sdnr_hat: McEstimate
    distortion_signal_correlation: McEstimate


def _batch_sizes(n: int, batches: int) -> list[int]:
    base, extra = divmod(n, batches)
    return [base + (1 if b < extra else 0) for b in range(batches)]


def _draw(d, sigma_n, seed, b, size):
    s = sample_signal(d, RngStream(seed, 2 * b), size)
    n = sample_normal(RngStream(seed, 2 * b + 1), sigma_n, size)
    return s, n


def _run_batches(fn, sizes, workers):
    jobs = list(enumerate(sizes))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: fn(*job), jobs))
    return [fn(b, size) for b, size in jobs]


def _validate(n_samples, sigma_n, batches):
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be >= {MIN_SAMPLES}, got {n_samples}", quantity="n_samples")
    if sigma_n < 0:
        raise DomainError("sigma_n must be non-negative", quantity="sigma_n")
    if batches < 2 or batches > n_samples:
        raise DomainError("batches must be in [2, n_samples]", quantity="batches")


def _sdnr(a, g):
    # same zero-distortion rule as the analytic formulas
    if a == 0:
        return 0.0
    ratio = g / (a * a)
    if ratio - 1.0 <= ZERO_DISTORTION_RTOL * max(ratio, 1.0):
        return math.inf
    return 1.0 / (ratio - 1.0)


def _rounding_floor(value, n):
    return n * np.finfo(float).eps * abs(value)


def _estimate(total, per_batch, n, seed):
    per_batch = np.asarray(per_batch, dtype=float)
    se = float(np.std(per_batch, ddof=1) / math.sqrt(per_batch.size))
    return McEstimate(float(total), float(max(se, _rounding_floor(total, n))), n, seed)


def _sdnr_estimate(a, g, a_b, g_b, n, seed):
    value = _sdnr(a, g)
    if math.isinf(value):
        return McEstimate(value, 0.0, n, seed)
    dist = g - a * a
    grad = np.array([2.0 * a * g, -a * a]) / dist**2
    cov = np.cov(np.vstack([a_b, g_b]), ddof=1) / len(a_b)
    se = math.sqrt(max(float(grad @ cov @ grad), 0.0))
    return McEstimate(value, float(max(se, _rounding_floor(value, n))), n, seed)


def estimate_coefficients(q, d: SignalDistribution, sigma_n: float, n_samples: int, seed: int,
                          batches: int = DEFAULT_BATCHES, workers: int | None = None) -> McReport:
    """Empirical alpha_s, gamma_s, SDNR and distortion/signal correlation.

    ``q`` may be any vectorised nonlinearity (pass ``Identity()`` to bypass
    quantization). SDNR is the plug-in of the pooled alpha_s, gamma_s.
    """
    _validate(n_samples, sigma_n, batches)

    def one(b, size):
        s, n = _draw(d, sigma_n, seed, b, size)
        y = np.asarray(q(s + n), dtype=float)
        return float(np.dot(y, s)), float(np.dot(y, y)), float(np.dot(s, s))

    sums = np.array(_run_batches(one, _batch_sizes(n_samples, batches), workers))
    sys_b, syy_b, sss_b = sums[:, 0], sums[:, 1], sums[:, 2]
    sys, syy, sss = math.fsum(sys_b), math.fsum(syy_b), math.fsum(sss_b)

    a = sys / sss
    g = syy / sss
    a_b = sys_b / sss_b
    g_b = syy_b / sss_b

    def corr(ys, yy, ss):
        # delta = y - a s with the pooled a
        ds = ys - a * ss
        dd = yy - 2 * a * ys + a * a * ss
        if dd <= 0:
            return 0.0
        return ds / math.sqrt(dd * ss)

    corr_b = [corr(*row) for row in sums]
    return McReport(
        alpha_s_hat=_estimate(a, a_b, n_samples, seed),
        gamma_s_hat=_estimate(g, g_b, n_samples, seed),
        sdnr_hat=_sdnr_estimate(a, g, a_b, g_b, n_samples, seed),
        distortion_signal_correlation=_estimate(corr(sys, syy, sss), corr_b, n_samples, seed),
    )


def binary_decisions(q, amplitude: float, sigma_n: float, n_samples: int, seed: int,
                     quantizer_enabled: bool = True, batches: int = DEFAULT_BATCHES):
    """Transmitted and detected signs for uncoded +-A over AWGN.

    Detection is ``y > 0``, which maps an exact zero to the negative symbol,
    the same way the quantizer treats x = 0.
    """
    if not amplitude > 0:
        raise DomainError("amplitude must be positive", quantity="amplitude")
    _validate(n_samples, sigma_n, batches)
    d = binary(amplitude)
    sent, decided = [], []
    for b, size in enumerate(_batch_sizes(n_samples, batches)):
        s, n = _draw(d, sigma_n, seed, b, size)
        x = s + n
        y = q(x) if quantizer_enabled else x
        sent.append(s > 0)
        decided.append(np.asarray(y) > 0)
    return np.concatenate(sent), np.concatenate(decided)


def binary_error_count(q, amplitude, sigma_n, n_samples, seed, quantizer_enabled=True) -> int:
    sent, decided = binary_decisions(q, amplitude, sigma_n, n_samples, seed, quantizer_enabled)
    return int(np.count_nonzero(sent != decided))


def ber_uncoded_binary(q, amplitude: float, sigma_n: float, n_samples: int, seed: int,
                       quantizer_enabled: bool = True) -> float:
    """Bit error ratio of sign detection, with or without the quantizer."""
    return binary_error_count(q, amplitude, sigma_n, n_samples, seed, quantizer_enabled) / n_samples
