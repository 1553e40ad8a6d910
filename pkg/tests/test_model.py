import math

import numpy as np
import pytest

from cirsim import ParameterError, drift, exact_mean, exact_variance, make_model
from cirsim.model import read_param_file


@pytest.fixture
def kappa2():
    return make_model(2, 0.05, 0.2, 4e-4)


def test_kappa2_derived_fields(kappa2):
    m = kappa2
    assert m.alpha == pytest.approx(0.045, abs=0)
    assert m.beta == -1.0
    assert m.gamma == 0.1
    assert m.y0 == 0.02
    assert m.a == pytest.approx(0.2, rel=1e-15)
    assert m.assumption_2_1 and m.feller


def test_kappa1_regime_flags():
    m = make_model(1, 0.05, 0.2, 4e-4)
    assert m.alpha == pytest.approx(0.02, rel=1e-15)
    assert m.beta == -0.5
    assert m.a == pytest.approx(0.4, rel=1e-15)
    assert m.feller and not m.assumption_2_1


@pytest.mark.parametrize(
    "bad",
    [
        dict(kappa=2, lam=0.05, sigma=0, x0=1),
        dict(kappa=-2, lam=0.05, sigma=0.2, x0=1),
        dict(kappa=2, lam=0.0, sigma=0.2, x0=1),
        dict(kappa=2, lam=0.05, sigma=0.2, x0=-1e-9),
        dict(kappa=math.nan, lam=0.05, sigma=0.2, x0=1),
        dict(kappa=2, lam=math.inf, sigma=0.2, x0=1),
    ],
)
def test_rejects_out_of_domain_parameters(bad):
    with pytest.raises(ParameterError):
        make_model(bad["kappa"], bad["lam"], bad["sigma"], bad["x0"])


def test_drift_values(kappa2):
    assert drift(kappa2, 0.02) == pytest.approx(2.23, rel=1e-14)
    assert drift(kappa2, 1.0) == pytest.approx(-0.955, rel=1e-14)
    with pytest.raises(ParameterError):
        drift(kappa2, 0.0)


def test_drift_vanishes_at_equilibrium(kappa2):
    ystar = math.sqrt(-kappa2.alpha / kappa2.beta)
    scale = kappa2.alpha / ystar + abs(kappa2.beta) * ystar
    assert abs(drift(kappa2, ystar)) < 1e-14 * scale


def test_transform_round_trip_over_random_draws():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        kappa, lam, x0 = rng.uniform(0.05, 5.0, size=3)
        sigma = rng.uniform(0.01, 2.0)
        m = make_model(kappa, lam, sigma, x0)
        assert 8.0 * m.alpha + sigma * sigma == pytest.approx(4.0 * kappa * lam, rel=1e-14)
        assert -2.0 * m.beta == kappa
        assert 2.0 * m.gamma == sigma
        assert m.beta < 0.0
        assert (m.alpha > 0.0) == (4.0 * kappa * lam > sigma * sigma)
        # the stronger drift condition implies the positivity condition
        if m.assumption_2_1:
            assert m.feller


def test_moments_at_zero_and_in_the_limit(kappa2):
    assert exact_mean(kappa2, 0.0) == kappa2.x0
    assert exact_variance(kappa2, 0.0) == 0.0
    assert exact_mean(kappa2, 100.0) == pytest.approx(0.05, rel=1e-12)
    assert exact_variance(kappa2, 100.0) == pytest.approx(5e-4, rel=1e-12)


def test_mean_at_t1_matches_closed_form(kappa2):
    # 0.05 + (4e-4 - 0.05) * exp(-2), evaluated at 50-digit precision beforehand
    assert exact_mean(kappa2, 1.0) == pytest.approx(0.04328736995146401, rel=1e-14)
    assert exact_variance(kappa2, 1.0) == pytest.approx(3.7475869336253743e-4, rel=1e-13)


def test_moments_reject_negative_time(kappa2):
    with pytest.raises(ParameterError):
        exact_mean(kappa2, -1e-9)
    with pytest.raises(ParameterError):
        exact_variance(kappa2, -1.0)


def test_read_param_file(tmp_path):
    cfg = tmp_path / "params.cfg"
    cfg.write_text("# comment\nkappa = 1.5\nlambda=0.07\n\nsigma=0.3\nx0 = 0.01\n")
    params = read_param_file(cfg)
    assert params == {"kappa": 1.5, "lambda": 0.07, "sigma": 0.3, "x0": 0.01}


def test_read_param_file_rejects_junk(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("kappa=1.0\nmystery=3\n")
    with pytest.raises(ParameterError):
        read_param_file(bad)
    bad.write_text("kappa=not-a-number\n")
    with pytest.raises(ParameterError):
        read_param_file(bad)
    bad.write_text("kappa 1.0\n")
    with pytest.raises(ParameterError):
        read_param_file(bad)
