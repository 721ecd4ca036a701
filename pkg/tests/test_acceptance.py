"""End-to-end acceptance checks, one printed PASS/FAIL line per sub-check.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import hashlib
import itertools
import math
import time

import numpy as np
import pytest

from bussgang_sdnr import (
    Gaussian,
    MidRiseQuantizer,
    alpha_s,
    alpha_x,
    binary,
    direct_decomposition,
    expected_yn,
    gamma_x,
    input_law,
    mu_y2_given_s,
    mu_y_given_s,
    optimize_delta,
    pam4,
    quantize,
    s_coefficients,
    sdnr,
    sdnr_gaussian,
    sdnr_gaussian_form,
    sdnr_noisy,
    signal_power,
    x_coefficients,
)
from bussgang_sdnr.cli import run
from bussgang_sdnr.montecarlo import binary_error_count, estimate_coefficients
from bussgang_sdnr.special_math import QuadratureSpec, integrate_gaussian_expectation

SIGMA_N = math.sqrt(0.5)
SEED = 1
TIGHT = QuadratureSpec(relative_tolerance=1e-12)
GRID = list(itertools.product([2, 4, 8, 16], [0.1, 0.5, 1.0], [0.1, 0.5, 0.9]))
SIGNALS = (binary(1.0), pam4(math.sqrt(0.2)), Gaussian(1.0))
# relative gap between the Gaussian-form and exact SDNR for the binary
# headline case, set from the brute-force oracle value 0.602
GAUSSIAN_FORM_GAP_FLOOR = 0.5


class Checks:
    def __init__(self, criterion, capsys):
        self.criterion = criterion
        self.capsys = capsys
        self.failed = []

    def __call__(self, label, ok, detail=""):
        ok = bool(ok)
        with self.capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {self.criterion}: {label} {detail}".rstrip(), end="")
        if not ok:
            self.failed.append(label)

    def finish(self):
        assert not self.failed, f"criterion {self.criterion} failed: {self.failed}"


@pytest.fixture
def checks(request, capsys):
    return Checks(request.node.name.split("_")[1], capsys)


def test_01_headline_optimum(checks):
    t0 = time.perf_counter()
    opt = optimize_delta(8, binary(1.0), SIGMA_N, (0.01, 2.0))
    elapsed = time.perf_counter() - t0
    checks("delta* = 0.175 +- 0.01", abs(opt.delta_star - 0.175) <= 0.01, f"(got {opt.delta_star:.5f})")
    checks("SDNR* = 3.63 +- 0.05 linear", abs(opt.sdnr_star - 3.63) <= 0.05, f"(got {opt.sdnr_star:.5f})")
    checks("SDNR* = 5.1 +- 0.1 dB", abs(opt.sdnr_db - 5.1) <= 0.1, f"(got {opt.sdnr_db:.4f} dB)")
    checks("runtime <= 10 s", elapsed <= 10, f"({elapsed:.2f} s)")
    checks.finish()


def test_02_truncation_level(checks):
    opt = optimize_delta(8, binary(1.0), SIGMA_N, (0.01, 2.0))
    trunc = 7 * opt.delta_star / 2
    checks("(M-1) delta*/2 = 0.6125 +- 0.035", abs(trunc - 0.6125) <= 0.035, f"(got {trunc:.5f})")
    checks.finish()


def test_03_sdnr_exceeds_input_snr(checks):
    opt = optimize_delta(8, binary(1.0), SIGMA_N, (0.01, 2.0))
    snr = signal_power(binary(1.0)) / SIGMA_N**2
    checks("SDNR* > input SNR 2.0", opt.sdnr_star > snr, f"(SDNR* {opt.sdnr_star:.5f}, SNR {snr:.5f})")
    checks.finish()


def test_04_pam4_optimum(checks):
    b = optimize_delta(8, binary(1.0), SIGMA_N, (0.01, 2.0))
    p = optimize_delta(8, pam4(math.sqrt(0.2)), SIGMA_N, (0.01, 2.0))
    checks("4PAM delta* > binary delta*", p.delta_star > b.delta_star,
           f"({p.delta_star:.5f} vs {b.delta_star:.5f})")
    checks("4PAM SDNR* > 1.0", p.sdnr_star > 1.0, f"(got {p.sdnr_star:.5f})")
    checks("4PAM SDNR* < 2.0", p.sdnr_star < 2.0, f"(got {p.sdnr_star:.5f})")
    checks.finish()


def test_05_conditional_moment_quadrature(checks):
    t0 = time.perf_counter()
    worst1 = worst2 = 0.0
    for M, delta, sn in GRID:
        q = MidRiseQuantizer(M, delta)
        for s in q.saturation * np.linspace(-1.5, 1.5, 21):
            ref1 = integrate_gaussian_expectation(q, s, sn, TIGHT, q.thresholds())
            ref2 = integrate_gaussian_expectation(lambda x: q(x) ** 2, s, sn, TIGHT, q.thresholds())
            # mu_{y|s} crosses zero; the smallest output magnitude delta/2 sets the scale there
            worst1 = max(worst1, abs(mu_y_given_s(q, sn, s) - ref1) / max(abs(ref1), delta / 2))
            worst2 = max(worst2, abs(mu_y2_given_s(q, sn, s) - ref2) / ref2)
    elapsed = time.perf_counter() - t0
    checks("mu_y|s matches quadrature within 1e-8 relative", worst1 <= 1e-8, f"(worst {worst1:.2e})")
    checks("mu_y2|s matches quadrature within 1e-8 relative", worst2 <= 1e-8, f"(worst {worst2:.2e})")
    checks("runtime <= 30 s", elapsed <= 30, f"({elapsed:.2f} s)")
    checks.finish()


def test_06_gamma_identity(checks):
    for d in SIGNALS:
        worst = 0.0
        for M, delta, sn in GRID:
            q = MidRiseQuantizer(M, delta)
            gs = s_coefficients(q, d, sn, TIGHT).gamma
            gx = gamma_x(q, input_law(d, sn), TIGHT)
            worst = max(worst, abs(gs - gx * (1 + sn**2 / signal_power(d))) / gs)
        checks(f"gamma_s = gamma_x (1 + sn^2/ss^2) within 1e-8, {d.name}", worst <= 1e-8, f"(worst {worst:.2e})")
    checks.finish()


def test_07_gaussian_alpha_equality(checks):
    d = Gaussian(1.0)
    worst_a = worst_t = 0.0
    for M, delta, sn in GRID:
        q = MidRiseQuantizer(M, delta)
        worst_a = max(worst_a, abs(alpha_s(q, d, sn) - alpha_x(q, input_law(d, sn))))
        t3 = sdnr_gaussian(q, 1.0, sn).sdnr_linear
        t2 = sdnr_noisy(s_coefficients(q, d, sn)).sdnr_linear
        worst_t = max(worst_t, abs(t3 - t2) / t2)
    checks("|alpha_s - alpha_x| <= 1e-6, gaussian", worst_a <= 1e-6, f"(worst {worst_a:.2e})")
    checks("Gaussian-form SDNR = exact SDNR within 1e-6 relative", worst_t <= 1e-6, f"(worst {worst_t:.2e})")
    checks.finish()


def test_08_non_gaussian_divergence(checks):
    q, d = MidRiseQuantizer(8, 0.175), binary(1.0)
    exact = sdnr_noisy(s_coefficients(q, d, SIGMA_N)).sdnr_linear
    form = sdnr_gaussian_form(x_coefficients(q, input_law(d, SIGMA_N)), 1.0, SIGMA_N).sdnr_linear
    gap = abs(form - exact) / exact
    checks(f"relative gap > {GAUSSIAN_FORM_GAP_FLOOR}", gap > GAUSSIAN_FORM_GAP_FLOOR,
           f"(gap {gap:.4f}: {form:.5f} vs {exact:.5f})")
    checks.finish()


def test_09_monte_carlo_agreement(checks):
    misses = []
    for (M, delta, sn), d in itertools.product(GRID, SIGNALS):
        q = MidRiseQuantizer(M, delta)
        c = s_coefficients(q, d, sn)
        rep = estimate_coefficients(q, d, sn, 1_000_000, SEED)
        for name, value, est in (("alpha_s", c.alpha, rep.alpha_s_hat), ("gamma_s", c.gamma, rep.gamma_s_hat),
                                 ("sdnr", sdnr(q, d, sn).sdnr_linear, rep.sdnr_hat)):
            if not est.contains(value):
                misses.append(f"{d.name} M={M} delta={delta} sn={sn} {name}")
    checks("analytic inside 3 SE at N=1e6 for every grid configuration", not misses,
           f"({len(GRID) * len(SIGNALS)} configurations, misses: {misses or 'none'})")

    t0 = time.perf_counter()
    head = estimate_coefficients(MidRiseQuantizer(8, 0.175), binary(1.0), SIGMA_N, 10_000_000, SEED).sdnr_hat
    elapsed = time.perf_counter() - t0
    checks("N=1e7 headline SDNR = 3.63 +- 0.05", abs(head.value - 3.63) <= 0.05,
           f"(got {head.value:.5f} +- {head.standard_error:.5f})")
    checks("headline run <= 60 s", elapsed <= 60, f"({elapsed:.2f} s)")
    checks.finish()


def test_10_ber_invariance(checks):
    q, n = MidRiseQuantizer(8, 0.175), 10_000_000
    on = binary_error_count(q, 1.0, SIGMA_N, n, SEED, quantizer_enabled=True)
    off = binary_error_count(q, 1.0, SIGMA_N, n, SEED, quantizer_enabled=False)
    p = 0.5 * math.erfc(1.0)
    se = math.sqrt(p * (1 - p) / n)
    checks("equal error counts with and without quantizer", on == off, f"({on} vs {off})")
    checks("unquantized BER = 0.0786 +- 3 SE", abs(off / n - p) <= 3 * se,
           f"(got {off / n:.6f}, reference {p:.6f}, SE {se:.1e})")
    checks.finish()


def test_11_property_suites(checks, tmp_path):
    rng = np.random.default_rng(SEED)
    quantizers = [MidRiseQuantizer(M, delta) for M, delta, _ in GRID[::3]]

    x = rng.uniform(-30, 30, 100_000)
    xs = np.sort(x)
    sym = mono = member = True
    for q in quantizers:
        # thresholds themselves are excluded: cells are closed on the right
        free = ~np.isin(x, q.thresholds())
        sym &= np.array_equal(quantize(q, -x[free]), -quantize(q, x[free]))
        mono &= bool(np.all(np.diff(quantize(q, xs)) >= 0))
        y = quantize(q, x)
        member &= bool(np.all(np.isin(y, q.levels_array())))
    checks("quantizer odd symmetry", sym)
    checks("quantizer monotone", mono)
    checks("quantizer outputs are levels", member)

    odd = even = sat = True
    for M, delta, sn in GRID:
        q = MidRiseQuantizer(M, delta)
        s = np.linspace(0, 2 * q.saturation, 201)
        odd &= bool(np.allclose(mu_y_given_s(q, sn, -s), -mu_y_given_s(q, sn, s), rtol=0, atol=1e-13))
        even &= bool(np.allclose(mu_y2_given_s(q, sn, -s), mu_y2_given_s(q, sn, s), rtol=1e-13, atol=0))
        far = q.saturation + 8 * sn
        sat &= abs(mu_y_given_s(q, sn, far) - q.saturation) <= 1e-12
    checks("mu_y|s odd", odd)
    checks("mu_y2|s even", even)
    checks("saturation limit within 1e-12", sat)

    cs_ok, orth, eq12 = True, 0.0, 0.0
    for (M, delta, sn), d in itertools.product(GRID, SIGNALS):
        q = MidRiseQuantizer(M, delta)
        for c in (s_coefficients(q, d, sn), x_coefficients(q, input_law(d, sn))):
            cs_ok &= c.gamma >= c.alpha**2
        p = signal_power(d)
        direct = direct_decomposition(q, d, sn, TIGHT)
        orth = max(orth, abs(direct.alpha_s - alpha_s(q, d, sn, TIGHT)))
        rhs = alpha_x(q, input_law(d, sn)) * (1 + sn**2 / p) - expected_yn(q, d, sn) / p
        eq12 = max(eq12, abs(alpha_s(q, d, sn) - rhs))
    checks("gamma >= alpha^2 everywhere", cs_ok)
    checks("analytic distortion-signal orthogonality <= 1e-8", orth <= 1e-8, f"(worst {orth:.2e} E[s^2])")
    checks("alpha_s = alpha_x(1+sn^2/ss^2) - E[yn]/ss^2 within 1e-6", eq12 <= 1e-6, f"(worst {eq12:.2e})")

    n = 1_000_000
    worst = max(abs(estimate_coefficients(MidRiseQuantizer(8, 0.175), d, SIGMA_N, n, SEED)
                    .distortion_signal_correlation.value) for d in SIGNALS)
    checks("empirical orthogonality <= 3/sqrt(N)", worst <= 3 / math.sqrt(n), f"(worst {worst:.2e})")

    digests = set()
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        run(["simulate", "--levels", "8", "--delta", "0.175", "--sigma-n", str(SIGMA_N),
             "--samples", "100000", "--seed", "11", "-o", str(out)])
        digests.add(hashlib.sha256(out.read_bytes()).hexdigest())
    checks("byte-identical reruns under a fixed seed", len(digests) == 1)
    checks.finish()
