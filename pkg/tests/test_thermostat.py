import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paulimag import thermostat as th
from paulimag.errors import DegenerateFit, EmptyPolytope, NoRootAboveOne, OutOfRange, RangeError
from paulimag.polytope import EQ, Polytope, Row

M = (3, 1, -1, -3)
A_IRON = Fraction(35, 24)
MU_SAT = np.array([11 / 16, 11 / 48, 1 / 12, 0.0])


@pytest.fixture(scope="module")
def iron():
    return th.bcc_problem(A_IRON)


@pytest.fixture(scope="module")
def spherical(d7):
    return th.ThermalProblem(d7.restrict((Fraction(7, 5),) * 5), M)


@pytest.fixture(scope="module")
def iron_path():
    return th.evolve(A_IRON, np.linspace(0.0, 3.0, 61))


# gibbs


def test_gibbs_infinite_temperature_is_uniform():
    assert np.allclose(th.gibbs(0.0, M), 0.25, atol=0, rtol=1e-15)


def test_gibbs_ground_state_limit():
    mu = th.gibbs(50.0, M)
    assert abs(mu[0] - 1) <= 1e-20
    assert np.all(mu[1:] <= 1e-20)


def test_gibbs_weights_at_half_log_two():
    mu = th.gibbs(0.5 * math.log(2), M)
    w = np.array([8, 4, 2, 1]) / 15
    assert np.allclose(mu, w, rtol=1e-14, atol=0)


# single states


def test_iron_at_zero_beta_is_uniform(iron):
    st = iron.minimize(0.0)
    assert st.active_facets == ()
    assert st.regime == 1
    assert np.allclose(st.mu, 0.25, atol=1e-15)


def test_iron_freezes_at_saturation(iron):
    st = iron.minimize(10.0)
    assert np.max(np.abs(st.mu - MU_SAT)) <= 1e-6
    assert st.residual <= 1e-12


@pytest.mark.parametrize("beta", [0.3, 0.8, 1.5, 3.0])
def test_iron_matches_grid_oracle(iron, beta):
    st = iron.minimize(beta)
    f_grid, _ = th.grid_minimum(iron.poly, M, beta)
    f = th.free_energy(st.mu, M, beta)
    assert f <= f_grid + 1e-12
    assert f_grid - f <= 1e-5


@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_spherical_matches_grid_oracle(spherical, beta):
    st = spherical.minimize(beta)
    f_grid, _ = th.grid_minimum(spherical.poly, M, beta)
    f = th.free_energy(st.mu, M, beta)
    assert f <= f_grid + 1e-12
    assert f_grid - f <= 1e-5


@pytest.mark.parametrize("beta", [0.5, 2.0, 5.0, 20.0, 50.0])
def test_spherical_states_satisfy_kkt(spherical, beta):
    # this polytope has a degenerate vertex at (3/5, 1/5, 1/5, 0)
    st = spherical.minimize(beta)
    assert spherical.kkt_residual(st) <= 1e-8
    assert st.residual <= 1e-12
    assert np.all(spherical.C @ st.mu <= 1e-12)


def test_spherical_approaches_the_unique_vertex(spherical):
    st = spherical.minimize(50.0)
    assert np.max(np.abs(st.mu - [0.6, 0.2, 0.2, 0.0])) <= 1e-9


def test_empty_polytope_rejected():
    rows = [Row((1, 1, 1, 1), 1, EQ), Row((-1, 0, 0, 0), -2)]
    rows += [Row(tuple(-1 if j == i else 0 for j in range(4)), 0) for i in range(4)]
    with pytest.raises(EmptyPolytope):
        th.ThermalProblem(Polytope(("m1", "m2", "m3", "m4"), rows), M)


@settings(max_examples=15)
@given(beta=st.floats(0.0, 4.0), k=st.integers(0, 3))
def test_independent_starts_agree(iron, beta, k):
    cold = iron.minimize(beta)
    warm_sets = [(), (5,), (9,), (5, 9)]
    warm = iron.minimize(beta, warm_sets[k], {j: 1.0 for j in warm_sets[k]})
    assert np.max(np.abs(cold.mu - warm.mu)) <= 1e-10


@settings(max_examples=15)
@given(beta=st.floats(0.0, 6.0))
def test_kkt_residual_small(iron, beta):
    st = iron.minimize(beta)
    assert iron.kkt_residual(st) <= 1e-8
    assert all(g <= 0 for g in st.multipliers)


# critical points


def test_critical_betas_for_iron():
    b1, b2 = th.critical_betas(A_IRON)
    assert abs(b1 - 0.55429) <= 1e-5
    assert abs(b2 - 1.02359) <= 1e-5


def test_critical_betas_coincide_at_spherical_endpoint():
    b1, b2 = th.critical_betas(Fraction(7, 5))
    assert abs(b1 - 0.5 * math.log(2)) <= 1e-12
    assert abs(b2 - 0.5 * math.log(2)) <= 1e-12


def test_second_critical_beta_diverges_near_upper_limit():
    near = th.critical_betas(Fraction(19, 13) - Fraction(1, 10**6))[1]
    assert near > th.critical_betas(Fraction(29, 20))[1] + 2


@pytest.mark.parametrize("a", [Fraction(13, 10), Fraction(19, 13), Fraction(3, 2)])
def test_critical_betas_range(a):
    with pytest.raises(RangeError):
        th.critical_betas(a)


def test_no_root_above_one_is_a_distinct_error():
    assert issubclass(NoRootAboveOne, Exception)
    assert NoRootAboveOne.reason != RangeError.reason


# trajectories


def test_iron_transitions_match_closed_forms(iron_path):
    b1, b2 = th.critical_betas(A_IRON)
    acts = [t for t in iron_path.transitions if t.kind == "activate"]
    assert len(acts) == 2
    assert abs(acts[0].beta - b1) <= 1e-4
    assert abs(acts[1].beta - b2) <= 1e-4
    assert [t.printed_row for t in acts] == [2, 0]


def test_regime_one_is_gibbs(iron_path):
    b1 = th.critical_betas(A_IRON)[0]
    early = [s for s in iron_path if s.beta < b1]
    assert early
    for s in early:
        assert s.regime == 1
        assert np.max(np.abs(s.mu - th.gibbs(s.beta, M))) <= 1e-10


def test_regimes_are_monotone(iron_path):
    regimes = [s.regime for s in iron_path]
    assert regimes == sorted(regimes)
    assert set(regimes) == {1, 2, 3}


def test_multipliers_vanish_at_activation(iron):
    b1, b2 = th.critical_betas(A_IRON)
    for b in (b1, b2):
        after = iron.minimize(b + 1e-7)
        assert min(abs(g) for g in after.multipliers) <= 1e-5


def test_entropy_falls_and_moment_rises(iron_path):
    ent = [s.entropy for s in iron_path]
    mom = [s.moment(M) for s in iron_path]
    assert all(y <= x + 1e-12 for x, y in zip(ent, ent[1:]))
    assert all(y >= x - 1e-12 for x, y in zip(mom, mom[1:]))


def test_trajectory_states_satisfy_kkt(iron, iron_path):
    for s in iron_path:
        assert iron.kkt_residual(s) <= 1e-8


def test_first_activation_over_fifty_occupancies():
    lo, hi = Fraction(7, 5), Fraction(19, 13)
    for i in range(50):
        a = lo + (hi - lo) * Fraction(i, 50)
        b1 = th.critical_betas(a)[0]
        path = th.evolve(a, np.linspace(0.05, 1.5, 8))
        first = min(t.beta for t in path.transitions if t.kind == "activate")
        assert abs(first - b1) <= 1e-6, a


def test_trajectory_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        th.evolve(A_IRON, [1.0, 0.5])


# Weiss curve


def test_crossover_moments_for_iron():
    out = th.crossover_moments(A_IRON)
    assert abs(out["M1_over_Msat"] - 0.95585) <= 1e-4
    assert abs(out["M2_over_Msat"] - 0.99296) <= 1e-4
    assert out["M_sat"] == pytest.approx(53 / 24)


def test_weiss_curve_limits():
    curve = th.weiss_curve(A_IRON, [0.01, 0.5, 1.0, 1.2])
    m = [p.m_reduced for p in curve["constrained"]]
    assert m[0] == pytest.approx(1.0, abs=1e-6)
    assert m[2] == 0.0 and m[3] == 0.0
    assert 0 < m[1] < 1
    pure = [p.m_reduced for p in curve["unconstrained"]]
    assert pure[2] == 0.0 and pure[0] == pytest.approx(1.0, abs=1e-6)


def test_weiss_curve_regimes_fall_with_temperature():
    grid = np.linspace(0.05, 1.1, 15)
    pts = th.weiss_curve(A_IRON, grid)["constrained"]
    regimes = [p.regime for p in pts]
    assert regimes == sorted(regimes, reverse=True)
    m = [p.m_reduced for p in pts]
    assert all(y <= x + 1e-12 for x, y in zip(m, m[1:]))


def test_weiss_curve_rejects_nonpositive_temperature():
    with pytest.raises(RangeError):
        th.weiss_curve(A_IRON, [0.0, 0.5])


# data handling


def _linear_series(tc=1043.0, n=200):
    temps = np.linspace(0.0, tc * 0.999, n)
    return th.DataSeries(tuple(zip(temps, 1 - temps / tc)))


def test_crossover_temperatures_on_linear_data():
    data = _linear_series()
    t1, t2 = th.crossover_temperatures((0.95585, 0.99296), data)
    assert t1 == pytest.approx(1043 * (1 - 0.95585), rel=1e-9)
    assert t2 == pytest.approx(1043 * (1 - 0.99296), rel=1e-9)


def test_crossover_out_of_range():
    temps = np.linspace(500.0, 1000.0, 20)
    data = th.DataSeries(tuple(zip(temps, 1 - temps / 1043)))
    with pytest.raises(OutOfRange):
        th.crossover_temperatures((0.95585, 0.99296), data)


def test_baseline_recovers_pure_quadratic():
    temps = np.linspace(10.0, 300.0, 30)
    data = th.DataSeries(tuple(zip(temps, 3e-6 * temps**2 + 0.7)))
    fit = th.fit_quadratic_baseline(data)
    assert fit["a2"] == pytest.approx(3e-6, rel=1e-9)
    assert fit["a0"] == pytest.approx(0.7, rel=1e-12)
    assert np.max(np.abs(fit["residual"].y)) <= 1e-12


def test_baseline_residual_shows_step():
    temps = np.arange(10.0, 400.0, 10.0)
    vals = 1e-5 * temps**2 + np.where(temps > 200, 0.05, 0.0)
    data = th.DataSeries(tuple(zip(temps, vals)))
    fit = th.fit_quadratic_baseline(data, window=(0.0, 195.0))
    resid = fit["residual"]
    assert np.max(np.abs(resid.y[resid.x < 200])) <= 1e-10
    assert np.all(np.abs(resid.y[resid.x > 200] - 0.05) <= 1e-10)
    assert th.residual_kink(resid) in (200.0, 210.0)


def test_baseline_needs_three_temperatures():
    data = th.DataSeries(((1.0, 1.0), (2.0, 4.0), (3.0, 9.0)))
    with pytest.raises(DegenerateFit):
        th.fit_quadratic_baseline(data, window=(0.0, 2.5))


def test_data_series_csv_round_trip():
    text = "# iron, reduced units\nT_kelvin,value\n300,0.95\n# midpoint\n600,0.8\n900,0.5\n"
    data = th.DataSeries.from_csv(text)
    assert data.points == ((300.0, 0.95), (600.0, 0.8), (900.0, 0.5))
    assert th.DataSeries.from_csv(data.to_csv()).points == data.points


def test_data_series_rejects_repeated_temperature():
    with pytest.raises(ValueError):
        th.DataSeries(((1.0, 0.5), (1.0, 0.4)))
