"""Command-line front end.

Subcommands: coeffs, sdnr, mu, sweep, optimize, simulate, figure.
Exit codes: 0 ok, 2 usage, 3 numerical domain, 4 quadrature
non-convergence, 5 output I/O. Failures print one line on stderr:

    error=<kind> quantity=<name> message=<text>
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from bussgang_sdnr import __version__
from bussgang_sdnr.bussgang import (
    expected_yn,
    input_law,
    s_coefficients,
    sdnr_gaussian_form,
    sdnr_noiseless,
    sdnr_noisy,
    x_coefficients,
)
from bussgang_sdnr.errors import ConvergenceError, DomainError, UsageError
from bussgang_sdnr.montecarlo import binary_error_count, estimate_coefficients
from bussgang_sdnr.output import Table, serialize
from bussgang_sdnr.quantizer import MidRiseQuantizer
from bussgang_sdnr.signal_model import (
    Gaussian,
    NoiseModel,
    binary,
    input_snr,
    load_discrete,
    pam4,
    sigma_n_for_snr_db,
    signal_power,
)
from bussgang_sdnr.special_math import QuadratureSpec
from bussgang_sdnr.sweep import emit_figure_data, make_grid, optimize_delta, sweep_delta

SEED_ENV = "BUSSGANG_SDNR_SEED"
DEFAULT_SEED = 1

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4, 5

# Keys that travel through ``--config`` (the ``config`` block of JSON output).
CONFIG_KEYS = ("levels", "bits", "delta", "signal", "amplitude", "sigma_s", "sigma_n",
               "samples", "seed", "lo", "hi", "step", "rtol", "max_subdivisions", "theorem")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, delta=True):
    g = p.add_argument_group("quantizer and signal")
    size = g.add_mutually_exclusive_group()
    size.add_argument("--bits", type=int, help="bits per sample m (levels = 2**m)")
    size.add_argument("--levels", type=int, help="number of levels M, a power of two")
    if delta:
        g.add_argument("--delta", type=float, help="quantization interval")
    g.add_argument("--signal", help="gaussian | binary | pam4 | discrete:<path>")
    g.add_argument("--amplitude", type=float, help="A for binary / pam4")
    g.add_argument("--sigma-s", type=float, help="standard deviation of a gaussian signal")
    noise = g.add_mutually_exclusive_group()
    noise.add_argument("--sigma-n", type=float, help="noise standard deviation")
    noise.add_argument("--snr-db", type=float, help="derive sigma-n from the signal power")
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default=None)
    o.add_argument("-o", "--output", help="write here instead of stdout")
    p.add_argument("--config", help="JSON file whose 'config' block supplies defaults")
    p.add_argument("--rtol", type=float, help="quadrature relative tolerance (default 1e-9)")
    p.add_argument("--max-subdivisions", type=int, help="quadrature interval budget (default 200000)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bussgang-sdnr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("coeffs", help="Bussgang coefficients, both conventions")
    _common(p)
    p.add_argument("--check", action="store_true",
                   help="verify the coefficient identities and fail with exit 3 if violated")

    p = sub.add_parser("sdnr", help="signal to distortion plus noise ratio")
    _common(p)
    p.add_argument("--theorem", choices=("auto", "T1", "T2", "T3"),
                   help="T1 noise-free, T2 exact noisy, T3 Gaussian form; auto picks from the inputs")

    p = sub.add_parser("mu", help="conditional output moments against s")
    _common(p)
    p.add_argument("--lo", type=float, help="first s (default -5)")
    p.add_argument("--hi", type=float, help="last s (default 5)")
    p.add_argument("--step", type=float, help="s step (default 0.05)")

    for name, text in (("sweep", "sweep delta over a grid"), ("optimize", "SDNR-optimal delta")):
        p = sub.add_parser(name, help=text)
        _common(p, delta=False)
        p.add_argument("--lo", type=float, help="smallest delta (default 0.01)")
        p.add_argument("--hi", type=float, help="largest delta (default 2.0)")
        if name == "sweep":
            p.add_argument("--step", type=float, help="delta step (default 0.005)")

    p = sub.add_parser("simulate", help="Monte Carlo estimates")
    _common(p)
    p.add_argument("--samples", type=int, help="number of samples (default 1e6)")
    p.add_argument("--seed", type=int, help=f"seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--ber", action="store_true", help="also run the uncoded binary BER experiment")

    p = sub.add_parser("figure", help="curve data for figures 1-4")
    p.add_argument("figure_id", type=int)
    _common(p)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--step", type=float)
    return parser


def _apply_config(args):
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    data = data.get("config", data)
    size_given = args.bits is not None or args.levels is not None
    for key in CONFIG_KEYS:
        if key in ("bits", "levels") and size_given:
            continue
        if key in data and hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, data[key])


def _levels(args, required=True):
    if args.bits is not None and args.levels is not None:
        raise UsageError("give exactly one of --bits and --levels")
    if args.bits is not None:
        if args.bits < 1:
            raise UsageError("--bits must be >= 1")
        return 2**args.bits
    if args.levels is None:
        if required:
            raise UsageError("one of --bits or --levels is required")
        return None
    if args.levels < 2 or args.levels & (args.levels - 1):
        raise UsageError(f"--levels must be a power of two, got {args.levels}")
    return args.levels


def _signal(args):
    kind = args.signal or "binary"
    if kind == "gaussian":
        if args.amplitude is not None:
            raise UsageError("--amplitude does not apply to a gaussian signal")
        sigma_s = 1.0 if args.sigma_s is None else args.sigma_s
        if not sigma_s > 0:
            raise UsageError("--sigma-s must be positive")
        return Gaussian(sigma_s)
    if args.sigma_s is not None:
        raise UsageError(f"--sigma-s does not apply to a {kind.split(':')[0]} signal")
    if kind in ("binary", "pam4"):
        amplitude = 1.0 if args.amplitude is None else args.amplitude
        if not amplitude > 0:
            raise UsageError("--amplitude must be positive")
        return binary(amplitude) if kind == "binary" else pam4(amplitude)
    if kind.startswith("discrete:"):
        if args.amplitude is not None:
            raise UsageError("--amplitude does not apply to a discrete file signal")
        try:
            return load_discrete(kind.split(":", 1)[1])
        except OSError as exc:
            raise UsageError(f"cannot read distribution file: {exc}") from None
    raise UsageError(f"unknown signal {kind!r}")


def _sigma_n(args, d):
    if args.snr_db is not None:
        return sigma_n_for_snr_db(d, args.snr_db)
    sigma_n = 0.0 if args.sigma_n is None else args.sigma_n
    if sigma_n < 0:
        raise UsageError("--sigma-n must be non-negative")
    return sigma_n


def _spec(args):
    overrides = {}
    if args.rtol is not None:
        overrides["relative_tolerance"] = args.rtol
    if args.max_subdivisions is not None:
        overrides["max_subdivisions"] = args.max_subdivisions
    try:
        return QuadratureSpec(**overrides)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _delta(args):
    if args.delta is None:
        raise UsageError(f"--delta is required by {args.subcommand}")
    if not args.delta > 0:
        raise UsageError("--delta must be positive")
    return args.delta


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"${SEED_ENV} must be an integer") from None
    return DEFAULT_SEED


def _config_block(args, levels, d, sigma_n, **extra):
    cfg = {"subcommand": args.subcommand, "levels": levels, "signal": args.signal or "binary"}
    if isinstance(d, Gaussian):
        cfg["sigma_s"] = d.sigma_s
    elif d.name in ("binary", "pam4"):
        cfg["amplitude"] = _default(args.amplitude, 1.0)
    cfg["sigma_n"] = sigma_n
    for key in ("rtol", "max_subdivisions"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    cfg.update(extra)
    return cfg


def _coefficient_block(c):
    return {"alpha": c.alpha, "gamma": c.gamma, "convention": c.convention.value,
            "reference_power": c.reference_power}


def cmd_coeffs(args):
    levels, d = _levels(args), _signal(args)
    sigma_n, delta, spec = _sigma_n(args, d), _delta(args), _spec(args)
    q = MidRiseQuantizer(levels, delta)
    cs = s_coefficients(q, d, sigma_n, spec)
    cx = x_coefficients(q, input_law(d, sigma_n), spec)
    snr = input_snr(d, NoiseModel(sigma_n))
    out = {
        "config": _config_block(args, levels, d, sigma_n, delta=delta),
        "s_referenced": _coefficient_block(cs),
        "x_referenced": _coefficient_block(cx),
        "expected_yn": expected_yn(q, d, sigma_n, spec) if sigma_n > 0 else 0.0,
        "input_snr_linear": snr.linear,
        "input_snr_db": snr.db,
    }
    if args.check:
        growth = 1.0 + sigma_n**2 / signal_power(d)
        checks = {"gamma_s_equals_gamma_x_scaled": abs(cs.gamma - cx.gamma * growth) <= 1e-8 * cs.gamma,
                  "gamma_at_least_alpha_squared": cs.gamma >= cs.alpha**2 and cx.gamma >= cx.alpha**2}
        if sigma_n == 0:
            checks["alpha_s_equals_alpha_x"] = abs(cs.alpha - cx.alpha) <= 1e-8 * max(abs(cx.alpha), 1e-300)
            checks["gamma_s_equals_gamma_x"] = abs(cs.gamma - cx.gamma) <= 1e-8 * cx.gamma
        out["checks"] = checks
        if not all(checks.values()):
            failed = ",".join(k for k, v in checks.items() if not v)
            raise DomainError(f"coefficient identity check failed: {failed}", quantity=failed)
    return out


def cmd_sdnr(args):
    levels, d = _levels(args), _signal(args)
    sigma_n, delta, spec = _sigma_n(args, d), _delta(args), _spec(args)
    q = MidRiseQuantizer(levels, delta)
    theorem = args.theorem or "auto"
    if theorem == "auto":
        theorem = "T1" if sigma_n == 0 else ("T3" if isinstance(d, Gaussian) else "T2")
    if theorem == "T1":
        if sigma_n != 0:
            raise UsageError("T1 applies to noise-free input only (sigma-n 0)")
        report = sdnr_noiseless(x_coefficients(q, input_law(d, 0.0), spec))
    elif theorem == "T2":
        report = sdnr_noisy(s_coefficients(q, d, sigma_n, spec))
    else:
        report = sdnr_gaussian_form(x_coefficients(q, input_law(d, sigma_n), spec), signal_power(d), sigma_n)
    return {"config": _config_block(args, levels, d, sigma_n, delta=delta, theorem=theorem),
            "report": report}


def cmd_mu(args):
    from bussgang_sdnr.bussgang import mu_y2_given_s, mu_y_given_s

    levels, d = _levels(args), _signal(args)
    sigma_n, delta = _sigma_n(args, d), _delta(args)
    q = MidRiseQuantizer(levels, delta)
    s = make_grid(_default(args.lo, -5.0), _default(args.hi, 5.0), _default(args.step, 0.05))
    m1, m2 = mu_y_given_s(q, sigma_n, s), mu_y2_given_s(q, sigma_n, s)
    return Table(("s", "mu_y_given_s", "mu_y2_given_s"),
                 [(float(a), float(b), float(c)) for a, b, c in zip(s, m1, m2)])


def _default(v, fallback):
    return fallback if v is None else v


def cmd_sweep(args):
    levels, d = _levels(args), _signal(args)
    sigma_n = _sigma_n(args, d)
    grid = make_grid(_default(args.lo, 0.01), _default(args.hi, 2.0), _default(args.step, 0.005))
    if grid[0] <= 0:
        raise UsageError("delta grid must be positive")
    result = sweep_delta(levels, d, sigma_n, grid, _spec(args))
    result.config = _config_block(args, levels, d, sigma_n, lo=float(grid[0]), hi=float(grid[-1]),
                                  step=_default(args.step, 0.005))
    return result


def cmd_optimize(args):
    levels, d = _levels(args), _signal(args)
    sigma_n = _sigma_n(args, d)
    bracket = (_default(args.lo, 0.01), _default(args.hi, 2.0))
    if not 0 < bracket[0] < bracket[1]:
        raise UsageError("bracket needs 0 < lo < hi")
    opt = optimize_delta(levels, d, sigma_n, bracket, _spec(args))
    return {
        "config": _config_block(args, levels, d, sigma_n, lo=bracket[0], hi=bracket[1]),
        "delta_star": opt.delta_star,
        "sdnr_star": opt.sdnr_star,
        "sdnr_star_db": opt.sdnr_db,
        "truncation_level": (levels - 1) * opt.delta_star / 2,
        "at_boundary": opt.at_boundary,
    }


def cmd_simulate(args):
    levels, d = _levels(args), _signal(args)
    sigma_n, delta = _sigma_n(args, d), _delta(args)
    samples = _default(args.samples, 1_000_000)
    seed = _seed(args)
    q = MidRiseQuantizer(levels, delta)
    out = {
        "config": _config_block(args, levels, d, sigma_n, delta=delta, samples=samples, seed=seed),
        "report": estimate_coefficients(q, d, sigma_n, samples, seed),
    }
    if args.ber:
        if d.name != "binary":
            raise UsageError("--ber needs a binary signal")
        amplitude = max(d.levels)
        on = binary_error_count(q, amplitude, sigma_n, samples, seed, True)
        off = binary_error_count(q, amplitude, sigma_n, samples, seed, False)
        out["ber"] = {"errors_quantized": on, "errors_unquantized": off,
                      "ber_quantized": on / samples, "ber_unquantized": off / samples,
                      "n_samples": samples, "seed": seed}
    return out


def cmd_figure(args):
    overrides = {
        "levels": _levels(args, required=False),
        "delta": getattr(args, "delta", None),
        "amplitude": args.amplitude,
        "sigma_n": args.sigma_n,
        "lo": args.lo, "hi": args.hi, "step": args.step,
    }
    return emit_figure_data(args.figure_id, overrides, _spec(args))


COMMANDS = {
    "coeffs": (cmd_coeffs, "json"),
    "sdnr": (cmd_sdnr, "json"),
    "mu": (cmd_mu, "csv"),
    "sweep": (cmd_sweep, "csv"),
    "optimize": (cmd_optimize, "json"),
    "simulate": (cmd_simulate, "json"),
    "figure": (cmd_figure, "csv"),
}


def _fail(kind, quantity, message, code):
    text = " ".join(str(message).split())
    print(f"error={kind} quantity={quantity or '-'} message={text}", file=sys.stderr)
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required")
        _apply_config(args)
        func, default_format = COMMANDS[args.subcommand]
        result = func(args)
        payload = serialize(result, args.format or default_format)
    except UsageError as exc:
        return _fail("usage", None, exc, EXIT_USAGE)
    except ConvergenceError as exc:
        return _fail("convergence", "quadrature", f"{exc} (estimate={exc.estimate!r}, "
                     f"error_bound={exc.error_bound!r})", EXIT_CONVERGENCE)
    except DomainError as exc:
        return _fail("domain", exc.quantity, exc, EXIT_DOMAIN)

    try:
        if args.output:
            with open(args.output, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except OSError as exc:
        return _fail("io", "output", exc, EXIT_IO)
    return EXIT_OK


def main():
    sys.exit(run())
