import math

import pytest

from bussgang_sdnr import MidRiseQuantizer, binary, pam4

SIGMA_N = math.sqrt(0.5)
HEADLINE_DELTA = 0.175

# Brute-force oracle values for binary A=1, M=8, delta=0.175, sigma_n=sqrt(0.5):
# scipy.integrate.quad over the two-component Gaussian input law, one
# integral per quantizer cell, no erf sums involved.
ORACLE_ALPHA_S = 0.48613474967599646
ORACLE_GAMMA_S = 0.30893437443861127
ORACLE_ALPHA_X = 0.417503541783828
ORACLE_GAMMA_X = 0.20595624962574086
ORACLE_E_YN = 0.14012056299974546
ORACLE_SDNR_T2 = 3.254861918406753
ORACLE_SDNR_T3_FORM = 1.2947743073528721


@pytest.fixture
def headline_quantizer():
    return MidRiseQuantizer(8, HEADLINE_DELTA)


@pytest.fixture
def binary_signal():
    return binary(1.0)


@pytest.fixture
def pam4_signal():
    return pam4(math.sqrt(0.2))
