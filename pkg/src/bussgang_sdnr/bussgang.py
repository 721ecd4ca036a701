"""Bussgang coefficients, conditional quantizer moments and SDNR.

Two coefficient conventions are used throughout:

* x-referenced: alpha_x = E[y x] / E[x^2], gamma_x = E[y^2] / E[x^2], with x
  the full quantizer input;
* s-referenced: alpha_s = E[y s] / E[s^2], gamma_s = E[y^2] / E[s^2], with s
  the signal component of x = s + n.

The s-referenced route goes through the closed-form conditional moments
``mu_y_given_s`` / ``mu_y2_given_s``; the x-referenced route integrates the
nonlinearity against the input law directly. Keeping the two paths apart
is what makes the cross-checks in the test-suite meaningful.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from bussgang_sdnr.errors import DegenerateError, DomainError
from bussgang_sdnr.quantizer import MidRiseQuantizer, quantize
from bussgang_sdnr.signal_model import (
    Discrete,
    Gaussian,
    GaussianMixture,
    NoiseModel,
    NoisyInput,
    SignalDistribution,
    signal_power,
)
from bussgang_sdnr.special_math import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    erf,
    integrate_gaussian_expectation,
)

_SQRT2 = math.sqrt(2.0)

# Relative slack below which gamma - alpha^2 counts as zero distortion.
ZERO_DISTORTION_RTOL = 1e-9


class Convention(str, enum.Enum):
    X_REFERENCED = "XReferenced"
    S_REFERENCED = "SReferenced"


class Theorem(str, enum.Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"


@dataclass(frozen=True)
class BussgangCoefficients:
    alpha: float
    gamma: float
    convention: Convention
    # E[x^2] or E[s^2], whichever the coefficients are referenced to.
    reference_power: float = 1.0


@dataclass(frozen=True)
class SdnrReport:
    sdnr_linear: float
    sdnr_db: float
    coefficients: BussgangCoefficients
    theorem_used: Theorem
    distortion_power: float
    zero_distortion: bool = False


# -- conditional moments ---------------------------------------------------


def _erf_terms(q: MidRiseQuantizer, sigma_n: float, s):
    s = np.asarray(s, dtype=float)
    j = q.threshold_indices
    z = (s[..., None] - j * q.delta) / (sigma_n * _SQRT2)
    return j, erf(z)


def mu_y_given_s(q: MidRiseQuantizer, sigma_n: float, s):
    """E[y | s] with y = q(s + n), n ~ N(0, sigma_n^2).

    One erf term per interior threshold j*delta, j = -(M/2-1) .. M/2-1.
    """
    if sigma_n < 0:
        raise DomainError("sigma_n must be non-negative", quantity="sigma_n")
    if sigma_n == 0:
        return quantize(q, s)
    _, e = _erf_terms(q, sigma_n, s)
    out = 0.5 * q.delta * e.sum(axis=-1)
    return float(out) if np.ndim(s) == 0 else out


def mu_y2_given_s(q: MidRiseQuantizer, sigma_n: float, s):
    """E[y^2 | s]; saturates at ((M-1) delta / 2)^2 for large |s|."""
    if sigma_n < 0:
        raise DomainError("sigma_n must be non-negative", quantity="sigma_n")
    if sigma_n == 0:
        y = quantize(q, s)
        return y * y
    j, e = _erf_terms(q, sigma_n, s)
    out = q.saturation**2 + q.delta**2 * (j * e).sum(axis=-1)
    return float(out) if np.ndim(s) == 0 else out


# -- x-referenced coefficients ----------------------------------------------


def _input_power(p_x: GaussianMixture) -> float:
    power = p_x.second_moment
    if not power > 0:
        raise DomainError("input has zero second moment", quantity="E[x^2]")
    return power


def alpha_x(f, p_x: GaussianMixture, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[x f(x)] / E[x^2] under the input law ``p_x``."""
    power = _input_power(p_x)
    return p_x.expectation(lambda x: x * f(x), spec, f.breakpoints) / power


def gamma_x(f, p_x: GaussianMixture, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[f(x)^2] / E[x^2] under the input law ``p_x``."""
    power = _input_power(p_x)
    return p_x.expectation(lambda x: np.square(f(x)), spec, f.breakpoints) / power


def x_coefficients(f, p_x: GaussianMixture, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> BussgangCoefficients:
    return BussgangCoefficients(
        alpha_x(f, p_x, spec), gamma_x(f, p_x, spec), Convention.X_REFERENCED, p_x.second_moment
    )


def input_law(d: SignalDistribution, sigma_n: float) -> GaussianMixture:
    return NoisyInput(d, NoiseModel(sigma_n)).input_law()


# -- s-referenced coefficients ----------------------------------------------


def _signal_expectation(d: SignalDistribution, g, sigma_n, q, spec) -> float:
    if isinstance(d, Gaussian):
        # mu_{y|s} is only piecewise constant when sigma_n = 0; splitting at
        # the thresholds is harmless otherwise.
        return integrate_gaussian_expectation(g, 0.0, d.sigma_s, spec, q.thresholds())
    values = np.asarray(g(np.asarray(d.levels)), dtype=float)
    return math.fsum(p * v for p, v in zip(d.probs, values))


def _check_signal(d: SignalDistribution, sigma_n: float) -> float:
    if sigma_n < 0:
        raise DomainError("sigma_n must be non-negative", quantity="sigma_n")
    power = signal_power(d)
    if not power > 0:
        raise DomainError("signal has zero power", quantity="E[s^2]")
    return power


def alpha_s(q: MidRiseQuantizer, d: SignalDistribution, sigma_n: float,
            spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[y s] / E[s^2], averaging s * E[y|s] over the signal law."""
    power = _check_signal(d, sigma_n)
    return _signal_expectation(d, lambda s: s * mu_y_given_s(q, sigma_n, s), sigma_n, q, spec) / power


def gamma_s(q: MidRiseQuantizer, d: SignalDistribution, sigma_n: float,
            spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[y^2] / E[s^2], averaging E[y^2|s] over the signal law."""
    power = _check_signal(d, sigma_n)
    return _signal_expectation(d, lambda s: mu_y2_given_s(q, sigma_n, s), sigma_n, q, spec) / power


def s_coefficients(q: MidRiseQuantizer, d: SignalDistribution, sigma_n: float,
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> BussgangCoefficients:
    return BussgangCoefficients(
        alpha_s(q, d, sigma_n, spec), gamma_s(q, d, sigma_n, spec), Convention.S_REFERENCED, signal_power(d)
    )


def alpha_s_binary(q: MidRiseQuantizer, amplitude: float, sigma_n: float) -> float:
    # Shortcut for +-A: uses oddness of mu_{y|s}.
    return mu_y_given_s(q, sigma_n, amplitude) / amplitude


def gamma_s_binary(q: MidRiseQuantizer, amplitude: float, sigma_n: float) -> float:
    return mu_y2_given_s(q, sigma_n, amplitude) / amplitude**2


def alpha_s_pam4(q: MidRiseQuantizer, amplitude: float, sigma_n: float) -> float:
    a = amplitude
    return (3 * mu_y_given_s(q, sigma_n, 3 * a) + mu_y_given_s(q, sigma_n, a)) / (10 * a)


def gamma_s_pam4(q: MidRiseQuantizer, amplitude: float, sigma_n: float) -> float:
    a = amplitude
    return (mu_y2_given_s(q, sigma_n, 3 * a) + mu_y2_given_s(q, sigma_n, a)) / (10 * a * a)


def expected_yn(f, d: SignalDistribution, sigma_n: float,
                spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[f(s + n) n] by direct quadrature over the noise.

    For a Gaussian signal the inner average over s is done in closed form
    when ``f`` is a mid-rise quantizer (E[f(s + n) | n] is the erf sum with
    sigma_s in the role of the noise), and by nested quadrature otherwise.
    """
    if not sigma_n > 0:
        raise DomainError("expected_yn needs sigma_n > 0", quantity="E[yn]")
    if isinstance(d, Discrete):
        terms = [
            p * integrate_gaussian_expectation(lambda x, s=s: f(x) * (x - s), s, sigma_n, spec, f.breakpoints)
            for s, p in zip(d.levels, d.probs)
        ]
        return math.fsum(terms)

    if isinstance(f, MidRiseQuantizer):
        def inner(n):
            return mu_y_given_s(f, d.sigma_s, n)
    else:
        def inner(n):
            return np.array([
                integrate_gaussian_expectation(f, float(v), d.sigma_s, spec, f.breakpoints) for v in n
            ])
    return integrate_gaussian_expectation(lambda n: n * inner(n), 0.0, sigma_n, spec)


@dataclass(frozen=True)
class DirectDecomposition:
    alpha_s: float
    gamma_s: float
    mse: float
    sdnr_linear: float


def direct_decomposition(f, d: SignalDistribution, sigma_n: float,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> DirectDecomposition:
    """alpha_s, gamma_s and the MSE E[(y - alpha_s s)^2] by integrating over the
    input law, without the conditional-moment erf sums.

    For a Gaussian signal, s given x is Gaussian with mean k x and variance
    tau^2, k = P / (P + sigma_n^2), tau^2 = P sigma_n^2 / (P + sigma_n^2).
    """
    power = _check_signal(d, sigma_n)
    bps = f.breakpoints
    if isinstance(d, Gaussian):
        total = power + sigma_n**2
        k = power / total
        tau2 = power * sigma_n**2 / total
        sx = math.sqrt(total)
        e_ys = integrate_gaussian_expectation(lambda x: f(x) * k * x, 0.0, sx, spec, bps)
        e_y2 = integrate_gaussian_expectation(lambda x: np.square(f(x)), 0.0, sx, spec, bps)
        a = e_ys / power
        mse = integrate_gaussian_expectation(
            lambda x: np.square(f(x)) - 2 * a * f(x) * k * x + a * a * (k * k * x * x + tau2),
            0.0, sx, spec, bps,
        )
    else:
        law = input_law(d, sigma_n)
        e_ys = _conditional_sum(d, law, lambda x, s: f(x) * s, spec, bps)
        e_y2 = law.expectation(lambda x: np.square(f(x)), spec, bps)
        a = e_ys / power
        mse = _conditional_sum(d, law, lambda x, s: np.square(f(x) - a * s), spec, bps)
    sdnr = a * a * power / mse if mse > 0 else math.inf
    return DirectDecomposition(a, e_y2 / power, mse, sdnr)


def _conditional_sum(d: Discrete, law: GaussianMixture, g, spec, bps) -> float:
    # sum_k p_k E[g(x, s_k) | s = s_k]
    terms = []
    for (w, mu, sig), s in zip(law.components, d.levels):
        if sig == 0:
            terms.append(w * float(np.asarray(g(np.array([mu]), s))[0]))
        else:
            terms.append(w * integrate_gaussian_expectation(lambda x, s=s: g(x, s), mu, sig, spec, bps))
    return math.fsum(terms)


# -- SDNR -------------------------------------------------------------------


def _db(linear: float) -> float:
    if math.isinf(linear):
        return math.inf
    return 10.0 * math.log10(linear)


def _report(coeffs, denominator, theorem, distortion_power) -> SdnrReport:
    if coeffs.alpha == 0:
        raise DegenerateError("Bussgang gain alpha is zero", quantity="alpha")
    scale = max(coeffs.gamma / coeffs.alpha**2, 1.0)
    if denominator <= ZERO_DISTORTION_RTOL * scale:
        if denominator < -ZERO_DISTORTION_RTOL * scale:
            raise DomainError(
                f"negative distortion (gamma/alpha^2 form {denominator!r}); inconsistent coefficients",
                quantity="distortion_power",
            )
        return SdnrReport(math.inf, math.inf, coeffs, theorem, 0.0, zero_distortion=True)
    linear = 1.0 / denominator
    return SdnrReport(linear, _db(linear), coeffs, theorem, max(distortion_power, 0.0))


def sdnr_noiseless(coeffs: BussgangCoefficients) -> SdnrReport:
    """Noiseless input: SDNR = 1 / (gamma_x / alpha_x^2 - 1)."""
    if coeffs.convention is not Convention.X_REFERENCED:
        raise DomainError("noiseless SDNR needs x-referenced coefficients", quantity="convention")
    if coeffs.alpha == 0:
        raise DegenerateError("Bussgang gain alpha_x is zero", quantity="alpha_x")
    a, g = coeffs.alpha, coeffs.gamma
    return _report(coeffs, g / a**2 - 1.0, Theorem.T1, (g - a * a) * coeffs.reference_power)


def sdnr_noisy(coeffs: BussgangCoefficients) -> SdnrReport:
    """Noisy input, any signal law: SDNR = 1 / (gamma_s / alpha_s^2 - 1)."""
    if coeffs.convention is not Convention.S_REFERENCED:
        raise DomainError("noisy SDNR needs s-referenced coefficients", quantity="convention")
    if coeffs.alpha == 0:
        raise DegenerateError("Bussgang gain alpha_s is zero", quantity="alpha_s")
    a, g = coeffs.alpha, coeffs.gamma
    return _report(coeffs, g / a**2 - 1.0, Theorem.T2, (g - a * a) * coeffs.reference_power)


def sdnr_gaussian_form(coeffs: BussgangCoefficients, signal_pow: float, sigma_n: float) -> SdnrReport:
    """1 / ((gamma_x / alpha_x^2)(1 + sigma_n^2 / sigma_s^2) - 1).

    Exact only for a Gaussian signal. Applying it to other signal laws is
    allowed so the resulting error can be measured.
    """
    if coeffs.convention is not Convention.X_REFERENCED:
        raise DomainError("Gaussian-form SDNR needs x-referenced coefficients", quantity="convention")
    if coeffs.alpha == 0:
        raise DegenerateError("Bussgang gain alpha_x is zero", quantity="alpha_x")
    if not signal_pow > 0:
        raise DomainError("signal has zero power", quantity="E[s^2]")
    a, g = coeffs.alpha, coeffs.gamma
    growth = 1.0 + sigma_n**2 / signal_pow
    distortion = (g * growth - a * a) * signal_pow
    return _report(coeffs, g / a**2 * growth - 1.0, Theorem.T3, distortion)


def sdnr_gaussian(f, sigma_s: float, sigma_n: float,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> SdnrReport:
    """SDNR for a Gaussian signal from x-referenced coefficients under
    x ~ N(0, sigma_s^2 + sigma_n^2)."""
    d = Gaussian(sigma_s)
    if sigma_n < 0:
        raise DomainError("sigma_n must be non-negative", quantity="sigma_n")
    coeffs = x_coefficients(f, input_law(d, sigma_n), spec)
    return sdnr_gaussian_form(coeffs, sigma_s**2, sigma_n)


def sdnr(q: MidRiseQuantizer, d: SignalDistribution, sigma_n: float,
         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> SdnrReport:
    """The applicable SDNR for a quantizer and signal law.

    Noise-free input uses the noiseless formula; otherwise the s-referenced
    formula, which holds for every signal law.
    """
    if sigma_n == 0:
        return sdnr_noiseless(x_coefficients(q, input_law(d, 0.0), spec))
    return sdnr_noisy(s_coefficients(q, d, sigma_n, spec))
