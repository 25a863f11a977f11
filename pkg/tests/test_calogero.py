from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SYSTEMS, separated_theta
from sle0.calogero import (
    PhaseState,
    constants_table,
    cs_hamiltonian,
    evolve_cs,
    hamiltonian_partials,
    lax,
    lax_offset,
    momenta,
    null_hamiltonians,
    poisson_matrix,
    prefactor_report,
)
from sle0.loewner import Schedule, evolve, rhs
from sle0.stationary import SolverOptions, SystemConfig, null_vector_residual, solve_stationary


def random_state(rng, n):
    return PhaseState(separated_theta(rng, n, 0.2), 2.0 * rng.standard_normal(n))


def stationary_states():
    out = []
    rng = np.random.default_rng(3)
    for n, m, eta in [(2, 0, 0.0), (2, 1, 0.0), (3, 1, 0.0), (3, 0, 0.5), (4, 2, 0.0), (4, 1, -0.7)]:
        th = separated_theta(rng, n, 0.5)
        out += [s.config for s in solve_stationary(th, m, eta, SolverOptions(restarts=4))[:2]]
    return out


def test_momenta_are_velocities():
    cfg = SYSTEMS["cube_two"]
    st_ = momenta(cfg)
    dtheta, _, _ = rhs(evolve(cfg, Schedule.common(), 1e-3, 1e-3).state(0), Schedule.common(), 0.0)
    np.testing.assert_allclose(st_.p, dtheta, atol=1e-12)


# the cube systems collide near t = 0.2, so they are run over a shorter window
@pytest.mark.parametrize("key,T", [("chord_plus", 0.2), ("rays_odd", 0.2), ("cube_one", 0.1), ("cube_two", 0.1)])
def test_cs_agrees_with_loewner(key, T):
    cfg = SYSTEMS[key]
    a = evolve(cfg, Schedule.common(), T, 1e-3)
    b = evolve_cs(momenta(cfg), T, 1e-3)
    assert a.stop_reason is None and b.stop_reason is None
    assert np.max(np.abs(a.theta - b.theta)) < 1e-6


def test_hamiltonians_conserved_along_cs():
    cfg = SYSTEMS["cube_one"]
    s = evolve_cs(momenta(cfg), 0.1, 1e-3)
    H = np.array([null_hamiltonians(s.state(k)) for k in range(len(s.t))])
    assert np.max(np.abs(H - H[0])) < 1e-7
    E = [cs_hamiltonian(s.state(k)) for k in range(len(s.t))]
    assert np.ptp(E) < 1e-7


def test_cs_time_reversible():
    st_ = random_state(np.random.default_rng(0), 3)
    fwd = evolve_cs(st_, 0.05, 1e-3)
    back = evolve_cs(fwd.state(len(fwd.t) - 1), -0.05, 1e-3)
    np.testing.assert_allclose(back.theta[-1], st_.theta, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6))
def test_lax_identity_with_shift(seed, n):
    lp = lax(random_state(np.random.default_rng(seed), n))
    assert lp.lax_defect < 1e-10 * max(1.0, np.abs(lp.L).max() ** 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_lax_literal_identity_offset(n):
    lp = lax(random_state(np.random.default_rng(n), n))
    assert lp.lax_defect_literal == pytest.approx(lax_offset(n), abs=1e-9)
    assert lax_offset(n) == 2 * comb(n - 1, 2)


def test_L2_one_vanishes_only_without_charges_and_spin():
    for cfg in stationary_states():
        norm = lax(momenta(cfg)).L2_one_norm
        if cfg.m == 0 and cfg.eta == 0:
            assert norm < 1e-8
        else:
            assert norm > 1e-2


def test_partials_match_finite_differences():
    st_ = random_state(np.random.default_rng(11), 4)
    dp, dth = hamiltonian_partials(st_)
    h = 1e-6
    for l in range(4):
        e = np.zeros(4)
        e[l] = h
        fd_p = (null_hamiltonians(PhaseState(st_.theta, st_.p + e))
                - null_hamiltonians(PhaseState(st_.theta, st_.p - e))) / (2 * h)
        fd_t = (null_hamiltonians(PhaseState(st_.theta + e, st_.p))
                - null_hamiltonians(PhaseState(st_.theta - e, st_.p))) / (2 * h)
        np.testing.assert_allclose(dp[:, l], fd_p, atol=1e-6)
        np.testing.assert_allclose(dth[:, l], fd_t, atol=1e-5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 5))
def test_bracket_prefactor(seed, n):
    st_ = random_state(np.random.default_rng(seed), n)
    P = poisson_matrix(st_)
    H = null_hamiltonians(st_)
    j, k = 0, n - 1
    s2 = np.sin(0.5 * (st_.theta[j] - st_.theta[k])) ** 2
    assert P[j, k] == pytest.approx((H[k] - H[j]) / s2, rel=1e-8, abs=1e-8)


def test_prefactor_report_picks_inverse_sine_squared():
    rng = np.random.default_rng(2)
    rep = prefactor_report([random_state(rng, 3) for _ in range(30)])
    assert rep.best == "1/sin^2"
    assert rep.residual_inv_f2 > 1e-2


def test_brackets_vanish_on_stationary_states():
    for cfg in stationary_states():
        assert np.max(np.abs(poisson_matrix(momenta(cfg)))) < 1e-9


def test_hamiltonians_equal_at_stationary_states():
    for cfg in stationary_states():
        h = null_vector_residual(cfg)[0]
        H = null_hamiltonians(momenta(cfg))
        n = cfg.n
        np.testing.assert_allclose(H, h + 1.5 * (n - 1) - comb(n - 1, 2), atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 7))
def test_sum_of_hamiltonians(seed, n):
    st_ = random_state(np.random.default_rng(seed), n)
    diff = null_hamiltonians(st_).sum() - cs_hamiltonian(st_)
    assert diff == pytest.approx(n * (n - 1) * (8 - n) / 3, abs=1e-7)


def test_constants_table():
    cfg = SYSTEMS["cube_two"]
    h = null_vector_residual(cfg)[0]
    t = constants_table(cfg, h)
    assert t["H_j_spread"] < 1e-9
    assert t["H_j_measured"][0] == pytest.approx(t["H_j_fit"], abs=1e-9)
    assert t["H_measured"] == pytest.approx(t["H_reference"], abs=1e-9)
    assert t["H_measured"] == pytest.approx(t["energy_reference"], abs=1e-9)
    assert t["H_j_reference"] != pytest.approx(t["H_j_fit"])


def test_energy_formula_fails_with_spin():
    cfg = solve_stationary((0.0, 2.0), 1, 0.8)[0].config
    t = constants_table(cfg, null_vector_residual(cfg)[0])
    assert t["H_measured"] == pytest.approx(t["H_reference"], abs=1e-9)
    assert abs(t["H_measured"] - t["energy_reference"]) > 1e-3


def test_collision_stops_cs():
    s = evolve_cs(momenta(SYSTEMS["unit_pair"]), 0.3, 1e-3)
    assert s.stop_reason is not None


def test_csv_header():
    s = evolve_cs(momenta(SYSTEMS["chord_plus"]), 0.01, 1e-3)
    assert s.to_csv().splitlines()[0] == "t,theta_1,theta_2,p_1,p_2"


def test_single_particle_has_one_hamiltonian():
    st_ = momenta(SystemConfig((0.3,)))
    assert null_hamiltonians(st_).shape == (1,)
