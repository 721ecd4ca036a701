import math

import numpy as np
import pytest

from bussgang_sdnr.errors import DomainError
from bussgang_sdnr.signal_model import (
    Discrete,
    Gaussian,
    NoiseModel,
    NoisyInput,
    binary,
    input_snr,
    load_discrete,
    pam4,
    sample_signal,
    sigma_n_for_snr_db,
    signal_mean,
    signal_power,
)
from bussgang_sdnr.special_math import RngStream, sample_normal

SIGMA_N = math.sqrt(0.5)
N = 1_000_000


def test_signal_power():
    assert signal_power(binary(1.0)) == 1.0
    assert signal_power(pam4(math.sqrt(0.2))) == pytest.approx(1.0, rel=1e-15)
    assert signal_power(Gaussian(2.0)) == 4.0
    assert signal_power(pam4(1.0)) == 5.0


def test_input_snr_3db_setup():
    snr = input_snr(binary(1.0), NoiseModel(SIGMA_N))
    assert snr.linear == pytest.approx(2.0, rel=1e-15)
    assert snr.db == pytest.approx(3.0103, abs=1e-4)
    assert input_snr(pam4(math.sqrt(0.2)), NoiseModel(SIGMA_N)).linear == pytest.approx(2.0, rel=1e-14)


def test_input_snr_limits():
    assert input_snr(binary(1.0), NoiseModel(0.0)).linear == math.inf
    assert input_snr(binary(1.0), NoiseModel(1e6)).linear < 1e-11


def test_sigma_n_from_snr_db():
    assert sigma_n_for_snr_db(binary(1.0), 10 * math.log10(2.0)) == pytest.approx(SIGMA_N, rel=1e-14)


def test_noise_model_validation():
    with pytest.raises(DomainError):
        NoiseModel(-0.1)


@pytest.mark.parametrize("levels,probs", [
    ((1.0,), (0.9,)),
    ((1.0, -1.0), (0.5, 0.0)),
    ((0.0,), (1.0,)),
    ((), ()),
    ((1.0, 2.0), (1.0,)),
])
def test_discrete_validation(levels, probs):
    with pytest.raises(DomainError):
        Discrete(levels, probs)


def test_symmetry_flag():
    assert binary(1.0).is_symmetric and pam4(0.3).is_symmetric
    assert not Discrete((1.0, -2.0), (0.5, 0.5)).is_symmetric
    assert signal_mean(pam4(0.3)) == 0.0


def test_support_of_draws():
    s = sample_signal(binary(1.0), RngStream(3), 10_000)
    assert set(np.unique(s)) == {-1.0, 1.0}
    s = sample_signal(pam4(1.0), RngStream(3), 10_000)
    assert set(np.unique(s)) == {-3.0, -1.0, 1.0, 3.0}


def test_binary_draw_statistics():
    s = sample_signal(binary(1.0), RngStream(11), N)
    assert abs(s.mean()) <= 3 / math.sqrt(N)
    p_plus = np.mean(s > 0)
    assert abs(p_plus - 0.5) <= 3 * math.sqrt(0.25 / N)


def test_sampling_deterministic():
    stream = RngStream(5, 1)
    assert np.array_equal(sample_signal(pam4(1.0), stream, 100), sample_signal(pam4(1.0), stream, 100))


@pytest.mark.parametrize("d", [binary(1.0), pam4(math.sqrt(0.2)), Gaussian(0.8)], ids=lambda d: d.name)
def test_power_additivity(d):
    s = sample_signal(d, RngStream(9, 0), N)
    n = sample_normal(RngStream(9, 1), SIGMA_N, N)
    x2 = (s + n) ** 2
    expected = NoisyInput(d, NoiseModel(SIGMA_N)).power
    assert abs(x2.mean() - expected) <= 3 * x2.std() / math.sqrt(N)
    assert abs(s.mean()) <= 3 * s.std() / math.sqrt(N)


def test_input_law_components():
    law = NoisyInput(binary(2.0), NoiseModel(0.5)).input_law()
    assert law.components == ((0.5, -2.0, 0.5), (0.5, 2.0, 0.5))
    assert law.second_moment == pytest.approx(4.25)
    g = NoisyInput(Gaussian(0.6), NoiseModel(0.8)).input_law()
    assert g.components[0][2] == pytest.approx(1.0)


def test_load_discrete(tmp_path):
    path = tmp_path / "pmf.txt"
    path.write_text("# three-level signal\n-1,0.25\n0.5, 0.5  # middle\n\n2,0.25\n")
    d = load_discrete(path)
    assert d.levels == (-1.0, 0.5, 2.0)
    assert d.probs == (0.25, 0.5, 0.25)


@pytest.mark.parametrize("text", ["1,0.5\n-1,0.4\n", "1;0.5\n", "a,b\n", "1,0.5,3\n"])
def test_load_discrete_rejects_bad_files(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(DomainError):
        load_discrete(path)
