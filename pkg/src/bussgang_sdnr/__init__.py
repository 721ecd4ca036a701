"""Bussgang decomposition and SDNR of a uniform mid-rise quantizer for
Gaussian and discrete (binary, 4-PAM, arbitrary PMF) signals."""

__version__ = "0.1.0"

from bussgang_sdnr.bussgang import (  # noqa: E402
    BussgangCoefficients,
    Convention,
    SdnrReport,
    Theorem,
    alpha_s,
    alpha_x,
    direct_decomposition,
    expected_yn,
    gamma_s,
    gamma_x,
    input_law,
    mu_y2_given_s,
    mu_y_given_s,
    s_coefficients,
    sdnr,
    sdnr_gaussian,
    sdnr_gaussian_form,
    sdnr_noiseless,
    sdnr_noisy,
    x_coefficients,
)
from bussgang_sdnr.quantizer import HardLimiter, Identity, MidRiseQuantizer, quantize  # noqa: E402
from bussgang_sdnr.signal_model import (  # noqa: E402
    Discrete,
    Gaussian,
    NoiseModel,
    NoisyInput,
    binary,
    input_snr,
    load_discrete,
    pam4,
    signal_power,
)
from bussgang_sdnr.sweep import emit_figure_data, optimize_delta, sweep_delta  # noqa: E402
