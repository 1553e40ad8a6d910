import numpy as np
import pytest

from cirsim import PathDriver
from cirsim.driver import LATTICE


def test_same_tick_is_bit_identical():
    d = PathDriver(2024, 5, 12)
    for tick in (0, 1, 17, 4095):
        assert d.gaussian_at(tick) == d.gaussian_at(tick)
    fresh = PathDriver(2024, 5, 12)
    assert fresh.gaussian_at(1234) == d.gaussian_at(1234)


def test_vectorized_gaussians_match_scalar_queries():
    d = PathDriver(11, 3, 8)
    ticks = np.arange(d.n_ticks)
    bulk = d.gaussian_at(ticks)
    assert bulk.shape == (256,)
    for t in (0, 1, 2, 128, 255):
        assert bulk[t] == d.gaussian_at(t)


def test_gaussian_moments_over_a_million_ticks():
    d = PathDriver(2024, 0, 20)
    g = d.gaussian_at(np.arange(d.n_ticks))
    n = d.n_ticks
    assert abs(g.mean()) < 3.3 * n**-0.5  # 3.3 standard errors
    assert abs(g.var() - 1.0) < 0.005


def test_tick_domain_errors():
    d = PathDriver(1, 1, 10)
    with pytest.raises(ValueError):
        d.gaussian_at(-1)
    with pytest.raises(ValueError):
        d.gaussian_at(d.n_ticks)
    with pytest.raises(ValueError):
        d.increment(5, 4)
    with pytest.raises(ValueError):
        d.increment(0, d.n_ticks + 1)
    with pytest.raises(ValueError):
        d.increment(-1, 4)


def test_constructor_validation():
    with pytest.raises(ValueError):
        PathDriver(-1, 0, 10)
    with pytest.raises(ValueError):
        PathDriver(0, 2**64, 10)
    with pytest.raises(ValueError):
        PathDriver(0, 0, 0)
    with pytest.raises(ValueError):
        PathDriver(0, 0, 10, horizon=0.0)


def test_empty_increment_is_zero():
    d = PathDriver(3, 9, 10)
    assert d.increment(77, 77) == 0.0


def test_increments_are_lattice_multiples():
    d = PathDriver(3, 9, 12)
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = sorted(rng.integers(0, d.n_ticks + 1, size=2))
        w = d.increment(int(a), int(b))
        assert w == round(w / LATTICE) * LATTICE


def test_chunked_accumulation_is_bit_exact():
    d = PathDriver(99, 2, 12)
    whole = d.increment(0, d.n_ticks)
    rng = np.random.default_rng(42)
    for _ in range(50):
        n_cuts = int(rng.integers(1, 40))
        cuts = np.unique(rng.integers(0, d.n_ticks + 1, size=n_cuts))
        bounds = np.concatenate(([0], cuts, [d.n_ticks]))
        acc = 0.0
        for a, b in zip(bounds[:-1], bounds[1:]):
            acc += d.increment(int(a), int(b))
        assert acc == whole


def test_terminal_variance_across_paths():
    n_paths = 10_000
    w = np.array([PathDriver(7, i, 10).increment(0, 1024) for i in range(n_paths)])
    assert abs(w.var() - 1.0) < 0.05  # Var W(T) = T = 1, within 5%
    # neighbouring path indices are uncorrelated
    corr = np.corrcoef(w[:-1], w[1:])[0, 1]
    assert abs(corr) < 0.05


def test_resolutions_nest_exactly():
    # the same (seed, path) at K and K+1 shares every coarse-lattice value bit-for-bit
    for k in (6, 10, 14):
        coarse = PathDriver(31337, 4, k).lattice_values()
        fine = PathDriver(31337, 4, k + 1).lattice_values()
        assert np.array_equal(coarse, fine[::2])


def test_horizon_scales_variance():
    w = np.array([PathDriver(12, i, 8, horizon=4.0).increment(0, 256) for i in range(4000)])
    assert abs(w.var() - 4.0) < 0.2
