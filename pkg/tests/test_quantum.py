import json

import numpy as np
import pytest
import sympy as sp

from conftest import separated_theta
from sle0.quantum import (
    classical_drift_limit,
    cs_eigen_check,
    cs_value,
    expected_eigenvalue,
    expected_h,
    log_derivatives,
    log_fermionic_ground,
    null_operator_residual,
    null_operator_values,
)
from sle0.stationary import pairwise_cot

KAPPAS = [2.0, 8.0 / 3.0, 4.0]


def symbolic_null_value(theta_vals, kappa, j):
    """(L_j psi)/psi for the product of sines, evaluated exactly by sympy."""
    n = len(theta_vals)
    th = sp.symbols(f"t0:{n}", real=True)
    k = sp.nsimplify(kappa)
    psi = sp.Mul(*[sp.sin((th[a] - th[b]) / 2) ** (2 / k) for a in range(n) for b in range(a + 1, n)])
    expr = k / 2 * sp.diff(psi, th[j], 2)
    for l in range(n):
        if l == j:
            continue
        expr += sp.cot((th[l] - th[j]) / 2) * sp.diff(psi, th[l])
        expr -= (6 - k) / (2 * k) / (2 * sp.sin((th[l] - th[j]) / 2) ** 2) * psi
    val = (expr / psi).subs(dict(zip(th, theta_vals)))
    return float(sp.N(val, 30))


@pytest.mark.parametrize("kappa", KAPPAS)
@pytest.mark.parametrize("n", [2, 3])
def test_null_operator_constant(n, kappa):
    th = separated_theta(np.random.default_rng(n), n, 0.5)
    vals = null_operator_values(th, kappa)
    np.testing.assert_allclose(vals, expected_h(n, kappa), atol=1e-5)


def test_symbolic_oracle_agrees():
    th = [0.3, 1.7, 4.0]
    for kappa in (2.0, 4.0):
        exact = symbolic_null_value(th, kappa, 1)
        assert exact == pytest.approx(expected_h(3, kappa), abs=1e-12)
        assert null_operator_values(th, kappa)[1] == pytest.approx(exact, abs=1e-6)


@pytest.mark.parametrize("kappa", KAPPAS)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_cs_eigenvalue(n, kappa):
    th = separated_theta(np.random.default_rng(10 + n), n, 0.5)
    rep = cs_eigen_check(th, kappa)
    assert rep.eigenvalue_measured == pytest.approx(expected_eigenvalue(n, kappa), abs=1e-5)
    assert rep.max_residual < 1e-5


def test_n2_kappa2_closed_form():
    th = np.array([0.4, 2.9])
    assert null_operator_values(th, 2.0) == pytest.approx([-0.75, -0.75], abs=1e-6)
    assert expected_h(2, 2.0) == -0.75


def test_stencil_orders():
    th = np.array([0.2, 2.1, 4.4])
    errs3 = [abs(null_operator_residual(th, 8 / 3, 0, h, stencil=3)) for h in (2e-3, 1e-3)]
    errs5 = [abs(null_operator_residual(th, 8 / 3, 0, h, stencil=5)) for h in (2e-2, 1e-2)]
    assert errs3[0] / errs3[1] == pytest.approx(4, rel=0.05)
    assert errs5[0] / errs5[1] == pytest.approx(16, rel=0.1)


def test_derivatives_of_log_psi():
    th = np.array([0.1, 1.5, 3.0])
    g, _ = log_derivatives(lambda t: log_fermionic_ground(t, 2.0), th)
    exact = (2.0 / 2.0) * 0.5 * pairwise_cot(th).sum(axis=1)
    np.testing.assert_allclose(g, exact, atol=1e-9)


def test_classical_limit_is_m0_drift():
    th = np.array([0.1, 1.5, 3.0, 5.2])
    for kappa in (0.5, 2.0, 6.0):
        np.testing.assert_allclose(classical_drift_limit(th, kappa), pairwise_cot(th).sum(axis=1), atol=1e-12)


def test_tiny_step_warns():
    with pytest.warns(RuntimeWarning):
        log_derivatives(lambda t: float(np.sum(t ** 2)), np.array([0.1, 0.2]), step=1e-9)


def test_bad_inputs():
    with pytest.raises(ValueError):
        log_fermionic_ground([0.0, 1.0], -1.0)
    with pytest.raises(ValueError):
        log_fermionic_ground([1.0, 1.0], 2.0)
    with pytest.raises(ValueError):
        log_derivatives(lambda t: 0.0, np.array([0.0]), stencil=4)


def test_report_json():
    rep = cs_eigen_check(np.array([0.0, 2.0, 4.0]), 4.0)
    d = json.loads(rep.to_json())
    assert d["n"] == 3 and d["kappa"] == 4.0
    assert cs_value(np.array([0.0, 2.0, 4.0]), 4.0) == pytest.approx(d["eigenvalue_measured"])
