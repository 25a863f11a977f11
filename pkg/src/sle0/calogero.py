"""Classical Calogero-Sutherland description of stationary SLE(0) systems.

With p_j = U_j + sum_k cot((theta_j - theta_k)/2) the growth points of the
common-parametrization flow become particles of the trigonometric CS system
H = sum p_j^2/2 - sum_{j<k} 4/sin^2((theta_j - theta_k)/2).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb

import numpy as np

from .stationary import SystemConfig, drift_U, pairwise_cot, pairwise_inv_sin2, wrap_angle
from .loewner import CollisionStop, COLLISION_TOL, TWO_PI


@dataclass
class PhaseState:
    theta: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.p = np.asarray(self.p, dtype=float)

    @property
    def n(self) -> int:
        return len(self.theta)


def momenta(config: SystemConfig) -> PhaseState:
    theta = np.array(config.theta)
    U = drift_U(config)
    return PhaseState(theta, U + pairwise_cot(theta).sum(axis=1))


def _f(theta) -> np.ndarray:
    return pairwise_cot(np.asarray(theta, dtype=float))


def null_hamiltonians(state: PhaseState) -> np.ndarray:
    """All H_j = p_j^2/2 - sum_k (p_j + p_k) f_jk + sum_{k != l} f_jk f_jl - 2 sum_k f_jk^2."""
    f = _f(state.theta)
    p = state.p
    S = f.sum(axis=1)
    F2 = (f * f).sum(axis=1)
    return 0.5 * p * p - p * S - f @ p + (S * S - F2) - 2.0 * F2


def null_hamiltonian(state: PhaseState, j: int) -> float:
    return float(null_hamiltonians(state)[j])


def cs_hamiltonian(state: PhaseState) -> float:
    iu = np.triu_indices(state.n, 1)
    return float(0.5 * np.sum(state.p ** 2) - 4.0 * pairwise_inv_sin2(state.theta)[iu].sum())


# Lax pair

@dataclass
class LaxPair:
    L: np.ndarray
    M: np.ndarray
    L2_one_norm: float  # ||L^2 1||
    lax_defect: float  # max_j |H_j + 2 C(n-1, 2) - e_j' L^2 1 / 2|
    lax_defect_literal: float  # the same without the constant shift


def lax_offset(n: int) -> float:
    """Constant c_n with e_j' L^2 1 / 2 = H_j + c_n; c_n = (n-1)(n-2) = 2 C(n-1, 2).

    It comes from the three-term identity
    f_jk f_kl + f_kl f_lj + f_lj f_jk = 1 for distinct j, k, l.
    """
    return 2.0 * comb(n - 1, 2)


def lax(state: PhaseState) -> LaxPair:
    """Moser's Lax matrices, L = diag(p) - 2F with F_jk = f_jk.

    The off-diagonal sign is the one for which e_j' L^2 1 reproduces the cross
    terms -sum (p_j + p_k) f_jk of H_j; with +2F they come out with the wrong sign.
    """
    f = _f(state.theta)
    n = state.n
    L = np.diag(state.p) - 2.0 * f
    M = f * f
    M[np.diag_indices(n)] = -(f * f).sum(axis=1)
    half = 0.5 * (L @ L @ np.ones(n))
    H = null_hamiltonians(state)
    return LaxPair(L, M, float(np.linalg.norm(2.0 * half)),
                   float(np.max(np.abs(H + lax_offset(n) - half))),
                   float(np.max(np.abs(H - half))))


# Poisson structure

def hamiltonian_partials(state: PhaseState) -> tuple[np.ndarray, np.ndarray]:
    """dH/dp and dH/dtheta as (n, n) arrays, row j = gradient of H_j."""
    f = _f(state.theta)
    n = state.n
    p = state.p
    g = 0.5 * (1.0 + f * f)  # d f_jk / d theta_k
    g[np.diag_indices(n)] = 0.0
    S = f.sum(axis=1)
    G = g.sum(axis=1)
    dp = -f.copy()
    dp[np.diag_indices(n)] = p - S
    # off-diagonal: d H_j / d theta_m for m != j
    dth = g * (-p[:, None] - p[None, :] + 2.0 * S[:, None] - 6.0 * f)
    dth[np.diag_indices(n)] = p * G + (g * p[None, :]).sum(axis=1) - 2.0 * S * G + 6.0 * (f * g).sum(axis=1)
    return dp, dth


def poisson_matrix(state: PhaseState) -> np.ndarray:
    """{H_j, H_k} = sum_l dH_j/dp_l dH_k/dtheta_l - dH_j/dtheta_l dH_k/dp_l."""
    dp, dth = hamiltonian_partials(state)
    return dp @ dth.T - dth @ dp.T


@dataclass
class PrefactorReport:
    samples: int
    residual_inv_f2: float  # median relative misfit of value/(H_k - H_j) vs 1/f_jk^2
    residual_inv_sin2: float
    best: str


def poisson_bracket(state: PhaseState, j: int, k: int) -> float:
    if j == k:
        raise ValueError("j and k must differ")
    return float(poisson_matrix(state)[j, k])


def prefactor_report(states, j: int = 0, k: int = 1, tol: float = 1e-8) -> PrefactorReport:
    """Compare {H_j,H_k}/(H_k - H_j) with the two two candidate prefactors."""
    r_f, r_s = [], []
    for st in states:
        H = null_hamiltonians(st)
        diff = H[k] - H[j]
        if abs(diff) < tol:
            continue
        ratio = poisson_bracket(st, j, k) / diff
        d = wrap_angle(st.theta[j] - st.theta[k])
        cand_f = np.tan(0.5 * d) ** 2
        cand_s = 1.0 / np.sin(0.5 * d) ** 2
        r_f.append(abs(ratio - cand_f) / max(abs(cand_f), 1e-300))
        r_s.append(abs(ratio - cand_s) / abs(cand_s))
    if not r_f:
        return PrefactorReport(0, float("nan"), float("nan"), "none")
    mf, ms = float(np.median(r_f)), float(np.median(r_s))
    best = "none"
    if min(mf, ms) < 1e-6:
        best = "1/f^2" if mf < ms else "1/sin^2"
    return PrefactorReport(len(r_f), mf, ms, best)


# second-order dynamics

def cs_force(theta: np.ndarray) -> np.ndarray:
    # p_dot = -dH/dtheta = -4 sum_k cos(d/2)/sin^3(d/2), d = theta_j - theta_k
    d = wrap_angle(theta[:, None] - theta[None, :])
    np.fill_diagonal(d, np.pi)
    s = np.sin(0.5 * d)
    F = np.cos(0.5 * d) / s ** 3
    np.fill_diagonal(F, 0.0)
    return -4.0 * F.sum(axis=1)


@dataclass
class PhaseSeries:
    t: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    stop_reason: str | None = None

    def state(self, k: int) -> PhaseState:
        return PhaseState(self.theta[k], self.p[k])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.theta.shape[1]
        w.writerow(["t"] + [f"theta_{j + 1}" for j in range(n)] + [f"p_{j + 1}" for j in range(n)])
        for k in range(len(self.t)):
            w.writerow([f"{v:.12g}" for v in [self.t[k], *self.theta[k], *self.p[k]]])
        return buf.getvalue()


def evolve_cs(state: PhaseState, T: float, dt: float, tol: float = COLLISION_TOL) -> PhaseSeries:
    """RK4 for theta' = p, p' = -4 sum cos/sin^3; negative T runs backwards."""
    steps = int(round(abs(T) / dt))
    h = np.sign(T) * dt
    th, p = state.theta.copy(), state.p.copy()
    ts, ths, ps = [0.0], [th.copy()], [p.copy()]
    stop = None
    for i in range(steps):
        gaps = np.diff(np.concatenate([np.sort(th), [np.sort(th)[0] + TWO_PI]]))
        if len(th) > 1 and gaps.min() < tol:
            stop = str(CollisionStop(ts[-1], "growth points collided"))
            break
        a1, b1 = p, cs_force(th)
        a2, b2 = p + h / 2 * b1, cs_force(th + h / 2 * a1)
        a3, b3 = p + h / 2 * b2, cs_force(th + h / 2 * a2)
        a4, b4 = p + h * b3, cs_force(th + h * a3)
        th = th + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        p = p + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        ts.append((i + 1) * h)
        ths.append(th.copy())
        ps.append(p.copy())
    return PhaseSeries(np.array(ts), np.array(ths), np.array(ps), stop)


# constants table

def constants_table(config: SystemConfig, h_value: float) -> dict:
    """Measured Hamiltonians at a stationary-derived state next to the reference closed forms."""
    st = momenta(config)
    n, m = config.n, config.m
    H = null_hamiltonians(st)
    c = comb(n - 1, 2)
    return {
        "n": n, "m": m, "eta": config.eta, "h": h_value,
        "H_j_measured": H.tolist(),
        "H_j_spread": float(H.max() - H.min()),
        "H_j_reference": h_value - 1.5 * (n - 1) - c,
        "H_j_fit": h_value + 1.5 * (n - 1) - c,
        "H_measured": cs_hamiltonian(st),
        "sum_H_j_measured": float(H.sum()),
        "H_reference": n * h_value - n * (n * n - 1) / 6,
        "energy_reference": -n * (2 * m - n) ** 2 / 2 + n / 2 - n * (n * n - 1) / 6,
        "L2_one_norm": lax(st).L2_one_norm,
    }
