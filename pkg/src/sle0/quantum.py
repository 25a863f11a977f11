"""Finite-difference checks of the kappa > 0 null-vector and Calogero-Sutherland claims.

Everything acts on log(psi): first and second derivatives of psi/psi are
assembled from derivatives of log(psi), so psi itself is never formed.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .stationary import pairwise_cot, pairwise_inv_sin2, wrap_angle

LogPsi = Callable[[np.ndarray], float]


def log_fermionic_ground(theta, kappa: float) -> float:
    """sum_{i<j} (2/kappa) log|sin((theta_i - theta_j)/2)|, the m = 0 solution."""
    theta = np.asarray(theta, dtype=float)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    iu = np.triu_indices(len(theta), 1)
    s = np.abs(np.sin(0.5 * (theta[:, None] - theta[None, :])))[iu]
    if np.any(s == 0.0):
        raise ValueError("coincident angles")
    return float((2.0 / kappa) * np.sum(np.log(s)))


def _stencil_derivs(fn: LogPsi, theta: np.ndarray, j: int, step: float, stencil: int):
    e = np.zeros_like(theta)
    e[j] = step
    f0 = fn(theta)
    if stencil == 3:
        fp, fm = fn(theta + e), fn(theta - e)
        return (fp - fm) / (2 * step), (fp - 2 * f0 + fm) / step ** 2
    if stencil == 5:
        fp, fm = fn(theta + e), fn(theta - e)
        fpp, fmm = fn(theta + 2 * e), fn(theta - 2 * e)
        d1 = (-fpp + 8 * fp - 8 * fm + fmm) / (12 * step)
        d2 = (-fpp + 16 * fp - 30 * f0 + 16 * fm - fmm) / (12 * step ** 2)
        return d1, d2
    raise ValueError("stencil must be 3 or 5")


def log_derivatives(fn: LogPsi, theta, step: float = 1e-4, stencil: int = 5):
    """Gradient and diagonal second derivatives of log(psi) by central differences."""
    theta = np.asarray(theta, dtype=float)
    if step < 1e-7:
        warnings.warn(f"fd_step={step:g} is small enough for cancellation to dominate", RuntimeWarning)
    out = [_stencil_derivs(fn, theta, j, step, stencil) for j in range(len(theta))]
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def null_operator_values(theta, kappa: float, fd_step: float = 1e-4, logpsi: LogPsi | None = None,
                         stencil: int = 5) -> np.ndarray:
    """(L_j psi)/psi for every j, with

    L_j = (kappa/2) d_j^2 + sum_{k != j} [cot((theta_k - theta_j)/2) d_k
          - ((6 - kappa)/(2 kappa)) / (2 sin^2((theta_k - theta_j)/2))].
    """
    theta = np.asarray(theta, dtype=float)
    fn = logpsi or (lambda t: log_fermionic_ground(t, kappa))
    g, d2 = log_derivatives(fn, theta, fd_step, stencil)
    second = d2 + g * g  # psi''/psi
    f = pairwise_cot(theta)  # f[j, k] = cot((theta_j - theta_k)/2) = -cot((theta_k - theta_j)/2)
    drift = -(f @ g)
    pot = -((6.0 - kappa) / (2.0 * kappa)) * 0.5 * pairwise_inv_sin2(theta).sum(axis=1)
    return 0.5 * kappa * second + drift + pot


def expected_h(n: int, kappa: float, m: int = 0) -> float:
    return (1.0 - (n - 2 * m) ** 2) / (2.0 * kappa)


def null_operator_residual(theta, kappa: float, j: int, fd_step: float = 1e-4, stencil: int = 5) -> float:
    vals = null_operator_values(theta, kappa, fd_step, stencil=stencil)
    return float(vals[j] - expected_h(len(theta), kappa))


def expected_eigenvalue(n: int, kappa: float) -> float:
    return (n / kappa) * (-expected_h(n, kappa) + (n * n - 1) / (6.0 * kappa))


def cs_value(theta, kappa: float, fd_step: float = 1e-4, logpsi: LogPsi | None = None,
             stencil: int = 5) -> float:
    """(H psi~)/psi~ for psi~ = Phi_{1/kappa}^{-1} psi and

    H = -sum_j (1/2) d_j^2 + (beta(beta - 2)/16) sum_{j<k} 1/sin^2((theta_j - theta_k)/2),
    beta = 8/kappa, the positive Calogero-Sutherland operator.
    """
    theta = np.asarray(theta, dtype=float)
    base = logpsi or (lambda t: log_fermionic_ground(t, kappa))

    def tilde(t):
        return base(t) + log_fermionic_ground(t, kappa)  # Phi_{1/kappa}^{-1} = prod sin^{2/kappa}

    g, d2 = log_derivatives(tilde, theta, fd_step, stencil)
    beta = 8.0 / kappa
    iu = np.triu_indices(len(theta), 1)
    return float(-0.5 * np.sum(d2 + g * g) + beta * (beta - 2.0) / 16.0 * pairwise_inv_sin2(theta)[iu].sum())


@dataclass
class QuantumCheckReport:
    kappa: float
    n: int
    h_measured: float
    h_expected: float
    eigenvalue_measured: float
    eigenvalue_expected: float
    max_residual: float  # worst of the null-operator spread and the eigenvalue error

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def cs_eigen_check(theta, kappa: float, fd_step: float = 1e-4) -> QuantumCheckReport:
    theta = np.asarray(theta, dtype=float)
    n = len(theta)
    vals = null_operator_values(theta, kappa, fd_step)
    h_exp = expected_h(n, kappa)
    E = cs_value(theta, kappa, fd_step)
    E_exp = expected_eigenvalue(n, kappa)
    resid = max(float(np.max(np.abs(vals - h_exp))), abs(E - E_exp))
    return QuantumCheckReport(kappa, n, float(vals.mean()), h_exp, E, E_exp, resid)


def classical_drift_limit(theta, kappa: float) -> np.ndarray:
    """kappa * d_j log psi from the exact gradient; equals the m = 0 drift sum_k cot."""
    theta = np.asarray(theta, dtype=float)
    d = wrap_angle(theta[:, None] - theta[None, :])
    np.fill_diagonal(d, np.pi)
    grad = (2.0 / kappa) * 0.5 / np.tan(0.5 * d)
    np.fill_diagonal(grad, 0.0)
    return kappa * grad.sum(axis=1)
