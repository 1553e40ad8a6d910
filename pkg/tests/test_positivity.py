import math

import numpy as np
import pytest

from cirsim import (
    PositivityQuery,
    StepStrategy,
    StrategyKind,
    g_function,
    hmax_bound,
    make_model,
    one_step_neg_prob,
)
from cirsim.experiments import prob_surface_rows
from cirsim.positivity import GDomainError

SIGMA, LAM = 0.2, 0.05

# (rho, kappa, eps) -> published 4-significant-digit bound
BOUND_TABLE = {
    (64, 2.0, 1e-2): 3.594e-3,
    (64, 2.0, 1e-4): 3.547e-3,
    (64, 2.0, 1e-6): 3.506e-3,
    (64, 1.0, 1e-2): 5.454e-3,
    (64, 1.0, 1e-4): 5.341e-3,
    (64, 1.0, 1e-6): 5.246e-3,
    (256, 2.0, 1e-2): 5.800e-4,
    (256, 2.0, 1e-4): 5.755e-4,
    (256, 2.0, 1e-6): 5.716e-4,
    (256, 1.0, 1e-2): 8.912e-4,
    (256, 1.0, 1e-4): 8.804e-4,
    (256, 1.0, 1e-6): 8.710e-4,
}


def query(rho, kappa, eps, convention="as-printed"):
    model = make_model(kappa, LAM, SIGMA, 4e-4)
    strategy = StepStrategy(StrategyKind.TWO_SIDED, 1, 1.0, rho)
    return PositivityQuery(model, strategy, eps, 1.0, convention)


def sig4_unit(x: float) -> float:
    """One unit in the fourth significant digit of x."""
    return 10.0 ** (math.floor(math.log10(x)) - 3)


@pytest.fixture
def kappa2():
    return make_model(2, LAM, SIGMA, 4e-4)


def test_one_step_prob_vanishes_for_tiny_steps(kappa2):
    s = StepStrategy(StrategyKind.ONE_SIDED, 1, 1e-6, 64)
    assert one_step_neg_prob(kappa2, s, 1.5) < 1e-300


def test_one_step_prob_frozen_value(kappa2):
    # Phi((-0.05 - 0.85*0.0125... ) / (0.1*sqrt(0.025))) at 50-digit precision
    s = StepStrategy(StrategyKind.ONE_SIDED, 1, 0.5, 64)
    assert one_step_neg_prob(kappa2, s, 0.05) == pytest.approx(3.299234478248477e-6, rel=1e-9)


def test_one_step_prob_domain(kappa2):
    s = StepStrategy(StrategyKind.ONE_SIDED, 1, 0.5, 64)
    with pytest.raises(ValueError):
        one_step_neg_prob(kappa2, s, s.h_min)
    with pytest.raises(ValueError):
        one_step_neg_prob(kappa2, StepStrategy(StrategyKind.TWO_SIDED, 1, 0.5, 64), 0.5)


def test_surface_peaks_at_large_steps_and_states_near_or_above_one(kappa2):
    rows = prob_surface_rows(kappa2, r=1, rho=64, h_max_values=np.linspace(0.01, 1.0, 20), n_y=40)
    arr = np.array(rows)
    y, h, p = arr[:, 0], arr[:, 1], arr[:, 2]
    assert np.all((p >= 0.0) & (p <= 1.0))
    top = np.argmax(p)
    assert h[top] == h.max()
    assert y[top] >= 1.0


def test_g_is_positive_near_zero():
    q = query(64, 2.0, 1e-2)
    assert g_function(q, 1e-6) > 0.0


def test_g_changes_sign_at_the_tabulated_bound():
    q = query(64, 2.0, 1e-2)
    b = 3.594e-3
    assert g_function(q, b * (1 - 1e-3)) > 0.0
    assert g_function(q, b * (1 + 1e-3)) < 0.0
    assert g_function(q, 0.5) < 0.0


def test_g_domain_checks():
    q = query(64, 2.0, 1e-2)
    with pytest.raises(ValueError):
        g_function(q, 0.0)
    with pytest.raises(ValueError):
        g_function(q, 1.0)
    # degenerate floating-point of (1-eps)^p: p*log1p(-eps) underflows to 0
    tiny = query(64, 2.0, 1e-300)
    with pytest.raises(GDomainError):
        g_function(tiny, 1e-307)


def test_query_validation(kappa2):
    one = StepStrategy(StrategyKind.ONE_SIDED, 1, 1.0, 64)
    two = StepStrategy(StrategyKind.TWO_SIDED, 1, 1.0, 64)
    with pytest.raises(ValueError):
        PositivityQuery(kappa2, one, 1e-2)  # R must be finite
    with pytest.raises(ValueError):
        PositivityQuery(kappa2, two, 0.0)
    with pytest.raises(ValueError):
        PositivityQuery(kappa2, two, 1.0)
    with pytest.raises(ValueError):
        PositivityQuery(kappa2, two, 1e-2, convention="bogus")


@pytest.mark.parametrize("convention", ["as-printed", "nmax"])
@pytest.mark.parametrize("key", sorted(BOUND_TABLE))
def test_published_bounds_to_four_significant_digits(key, convention):
    rho, kappa, eps = key
    expected = BOUND_TABLE[key]
    bound = hmax_bound(query(rho, kappa, eps, convention))
    assert not bound.saturated
    assert abs(bound.value - expected) < sig4_unit(expected)


def test_bound_brackets_the_sign_change():
    bound = hmax_bound(query(64, 1.0, 1e-4)).value
    q = query(64, 1.0, 1e-4)
    delta = 1e-8 * bound
    assert g_function(q, bound - delta) > 0.0
    assert g_function(q, bound + delta) <= 0.0


def test_bound_monotone_in_eps_and_rho():
    for kappa in (1.0, 2.0):
        b = [hmax_bound(query(64, kappa, eps)).value for eps in (1e-6, 1e-4, 1e-2)]
        assert b[0] < b[1] < b[2]
        for eps in (1e-6, 1e-4, 1e-2):
            assert hmax_bound(query(256, kappa, eps)).value < hmax_bound(query(64, kappa, eps)).value


def test_saturated_bound_when_overshoot_risk_is_negligible():
    # nearly deterministic dynamics: gamma so small that g stays positive on all of (0, 1)
    model = make_model(0.01, LAM, 1e-4, 4e-4)
    strategy = StepStrategy(StrategyKind.TWO_SIDED, 1, 1.0, 4)
    bound = hmax_bound(PositivityQuery(model, strategy, 0.5))
    assert bound.saturated
    assert bound.value == 1.0
