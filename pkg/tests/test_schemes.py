import math

import numpy as np
import pytest

from cirsim import EulerVariant, backstop_map, euler_variant_step, explicit_map, make_model, sia_map
from cirsim.schemes import euler_variant_output, euler_variant_raw


@pytest.fixture
def kappa2():
    return make_model(2, 0.05, 0.2, 4e-4)


def test_explicit_map_examples(kappa2):
    ystar = math.sqrt(0.045)
    assert explicit_map(kappa2, ystar, 0.0, 0.3) == pytest.approx(ystar, abs=1e-14)
    assert explicit_map(kappa2, 0.02, 0.0, 2.0**-10) == pytest.approx(0.022177734375, rel=1e-12)
    assert explicit_map(kappa2, 0.02, -0.3, 2.0**-10) == pytest.approx(-0.007822265625, rel=1e-12)
    with pytest.raises(ValueError):
        explicit_map(kappa2, 0.0, 0.0, 0.01)
    with pytest.raises(ValueError):
        explicit_map(kappa2, -0.1, 0.0, 0.01)


def test_backstop_map_examples(kappa2):
    # reference values evaluated at 50-digit precision beforehand
    assert backstop_map(kappa2, 0.1, 0.0, 0.01) == pytest.approx(0.10332209161173042, rel=1e-12)
    out = backstop_map(kappa2, 0.1, -10.0, 0.01)
    assert out == pytest.approx(4.997197588491577e-4, rel=1e-10)
    assert out > 0.0


def test_backstop_requires_positive_alpha():
    degenerate = make_model(1.0, 0.05, 1.0, 4e-4)  # 4*kappa*lambda < sigma^2
    assert degenerate.alpha < 0
    with pytest.raises(ValueError):
        backstop_map(degenerate, 0.1, 0.0, 0.01)


def test_backstop_positivity_fuzz(kappa2):
    rng = np.random.default_rng(1)
    n = 100_000
    y = rng.uniform(1e-12, 10.0, n)
    dw = rng.uniform(-20.0, 20.0, n)
    h = rng.uniform(1e-12, 1.0, n)
    out = backstop_map(kappa2, y, dw, h)
    assert np.all(out > 0.0)


def test_backstop_solves_its_implicit_relation(kappa2):
    rng = np.random.default_rng(2)
    n = 100_000
    y = rng.uniform(1e-6, 10.0, n)
    dw = rng.uniform(-20.0, 20.0, n)
    h = rng.uniform(1e-6, 1.0, n)
    out = backstop_map(kappa2, y, dw, h)
    residual = out - y - h * (kappa2.alpha / out + kappa2.beta * out) - kappa2.gamma * dw
    assert np.max(np.abs(residual)) < 1e-12


def test_sia_map_examples(kappa2):
    assert sia_map(kappa2, 0.1, 0.0, 1e-12) == pytest.approx(0.1, rel=1e-9)
    assert sia_map(kappa2, 0.1, 0.0, 0.01) == pytest.approx(0.10346534653465347, rel=1e-12)
    assert sia_map(kappa2, 0.02, -0.5, 2.0**-10) < 0.0  # flagged for retake by the controller
    with pytest.raises(ValueError):
        sia_map(kappa2, 0.0, 0.0, 0.01)


def test_sia_matches_explicit_to_second_order(kappa2):
    # with no noise the two maps differ by O(h^2)
    y = 0.1
    hs = 2.0 ** -np.arange(6, 16)
    gaps = np.array([abs(sia_map(kappa2, y, 0.0, h) - explicit_map(kappa2, y, 0.0, h)) for h in hs])
    slope = np.polyfit(np.log(hs), np.log(gaps), 1)[0]
    assert slope >= 1.9


def test_transform_drift_consistency(kappa2):
    # 2*y*f(y) + gamma^2 = kappa*(lambda - y^2): the squared process recovers the original drift
    rng = np.random.default_rng(3)
    y = rng.uniform(1e-3, 5.0, 1000)
    lhs = 2.0 * y * (kappa2.alpha / y + kappa2.beta * y) + kappa2.gamma**2
    rhs = kappa2.kappa * (kappa2.lam - y * y)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


def test_euler_variant_g_functions(kappa2):
    # PT truncates only under the square root, HM uses |x|, FT truncates everywhere it can
    x, dw, h = -0.5, 0.7, 0.01
    pt = euler_variant_step(kappa2, EulerVariant.PARTIALLY_TRUNCATED, x, dw, h)
    assert pt == x + h * 2 * (0.05 - x)  # sqrt(0) kills the noise, drift sees raw x
    hm = euler_variant_step(kappa2, EulerVariant.HIGHAM_MAO, x, dw, h)
    assert hm == x + h * 2 * (0.05 - x) + 0.2 * math.sqrt(0.5) * dw
    ft_raw = euler_variant_raw(kappa2, EulerVariant.FULLY_TRUNCATED, x, dw, h)
    assert ft_raw == x + h * 2 * 0.05  # truncation kills both the state feedback and the noise
    assert euler_variant_output(EulerVariant.FULLY_TRUNCATED, ft_raw) == 0.0
    assert euler_variant_step(kappa2, EulerVariant.FULLY_TRUNCATED, x, dw, h) == 0.0


def test_euler_variant_examples(kappa2):
    assert euler_variant_step(kappa2, EulerVariant.HIGHAM_MAO, 0.04, 0.0, 0.01) == pytest.approx(
        0.0402, rel=1e-14
    )
    for variant in EulerVariant:
        assert euler_variant_step(kappa2, variant, 0.05, 0.0, 0.01) == pytest.approx(
            0.05, rel=1e-14
        )  # lambda is the drift fixed point


def test_explicit_euler_rejects_negative_state(kappa2):
    with pytest.raises(ValueError):
        euler_variant_step(kappa2, EulerVariant.EXPLICIT_EULER, -0.01, 0.0, 0.01)


def test_fully_truncated_nonnegative_fuzz(kappa2):
    rng = np.random.default_rng(4)
    n = 100_000
    x = rng.uniform(-5.0, 5.0, n)
    dw = rng.uniform(-20.0, 20.0, n)
    h = rng.uniform(1e-6, 1.0, n)
    out = euler_variant_step(kappa2, EulerVariant.FULLY_TRUNCATED, x, dw, h)
    assert np.all(out >= 0.0)
