"""Stationary relations, master function and multi-start Newton solver.

Growth points live on the unit circle at z_j = exp(i theta_j); screening
charges xi_k are complex numbers in disk coordinates.  The angular coordinate
of a charge is zeta = -i log xi, but everything here is written so that no
branch of the logarithm is ever needed except inside ``log_master``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi
_DEGENERATE = 1e-12


class DegenerateConfigError(ValueError):
    """Two of the points (growth points, charges, origin) coincide."""


class AsymmetricConfigError(ValueError):
    """A quantity that should be real is not: charges are not involution symmetric."""


def wrap_angle(x):
    """Reduce angles to [-pi, pi)."""
    return (np.asarray(x, dtype=float) + np.pi) % TWO_PI - np.pi


def cot_half(x):
    """cot(x/2) with x reduced first, so large arguments stay accurate."""
    return 1.0 / np.tan(0.5 * wrap_angle(x))


def cot_half_complex(z, w):
    """cot((theta - zeta)/2) for z = e^{i theta}, w = e^{i zeta}, branch free."""
    return 1j * (z + w) / (z - w)


def pairwise_cot(theta) -> np.ndarray:
    """Matrix f[j, k] = cot((theta_j - theta_k)/2) with zero diagonal."""
    theta = np.asarray(theta, dtype=float)
    d = theta[:, None] - theta[None, :]
    n = len(theta)
    f = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    f[off] = cot_half(d[off])
    return f


def pairwise_inv_sin2(theta) -> np.ndarray:
    """Matrix 1/sin^2((theta_j - theta_k)/2) with zero diagonal."""
    theta = np.asarray(theta, dtype=float)
    d = theta[:, None] - theta[None, :]
    n = len(theta)
    g = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    g[off] = 1.0 / np.sin(0.5 * d[off]) ** 2
    return g


@dataclass(frozen=True)
class SystemConfig:
    """Growth angles, screening charges and spin of one SLE(0) system."""

    theta: tuple[float, ...]
    xi: tuple[complex, ...] = ()
    eta: float = 0.0

    def __post_init__(self):
        th = tuple(float(t) for t in np.atleast_1d(np.asarray(self.theta, dtype=float)))
        xs = tuple(complex(x) for x in np.atleast_1d(np.asarray(self.xi, dtype=complex)))
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "xi", xs)
        object.__setattr__(self, "eta", float(self.eta))
        if len(th) == 0:
            raise ValueError("at least one growth point is required")
        t = np.asarray(th)
        if np.any(np.diff(t) <= 0) or t[-1] - t[0] >= TWO_PI:
            raise ValueError("theta must be strictly increasing within a 2*pi window")
        check_separation(self.z, np.asarray(xs, dtype=complex))

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def m(self) -> int:
        return len(self.xi)

    @property
    def z(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.theta))

    @property
    def xi_array(self) -> np.ndarray:
        return np.asarray(self.xi, dtype=complex)

    def with_xi(self, xi) -> "SystemConfig":
        return replace(self, xi=tuple(np.asarray(xi, dtype=complex)))

    def rotated(self, a: float) -> "SystemConfig":
        return SystemConfig(tuple(np.asarray(self.theta) + a), tuple(self.xi_array * np.exp(1j * a)), self.eta)

    def is_involution_symmetric(self, tol: float = 1e-8) -> bool:
        """True when the multiset {xi} equals {1/conj(xi)} within tol."""
        xi = self.xi_array
        return multiset_close(xi, 1.0 / np.conj(xi), tol)


def check_separation(z: np.ndarray, xi: np.ndarray, thresh: float = _DEGENERATE) -> None:
    if len(xi) == 0:
        return
    scale = 1.0 + np.max(np.abs(xi))
    if np.min(np.abs(xi)) < thresh:
        raise DegenerateConfigError("screening charge at the origin")
    if np.min(np.abs(xi[:, None] - z[None, :])) < thresh * scale:
        raise DegenerateConfigError("screening charge coincides with a growth point")
    if len(xi) > 1:
        d = np.abs(xi[:, None] - xi[None, :]) + np.eye(len(xi)) * scale
        if np.min(d) < thresh * scale:
            raise DegenerateConfigError("two screening charges coincide")


def multiset_close(a, b, tol: float) -> bool:
    """Greedy matching of two small complex multisets."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        return False
    for x in a:
        if not b:
            return False
        d = [abs(x - y) for y in b]
        i = int(np.argmin(d))
        if d[i] > tol:
            return False
        b.pop(i)
    return True


def canonical_xi(xi) -> np.ndarray:
    """Sort charges by (|xi|, arg xi) with rounding so ties order stably."""
    xi = np.asarray(xi, dtype=complex)
    key = sorted(range(len(xi)), key=lambda k: (round(abs(xi[k]), 7), round(float(np.angle(xi[k]) % TWO_PI), 7)))
    return xi[key]


# residual and Jacobian, holomorphic in xi

def _residual(xi: np.ndarray, z: np.ndarray, n: int, eta: float) -> np.ndarray:
    m = len(xi)
    if m == 0:
        return np.zeros(0, dtype=complex)
    c = n - 2 * m + 2 + 1j * eta
    r = -2.0 * np.sum(1.0 / (xi[:, None] - z[None, :]), axis=1) + c / xi
    if m > 1:
        r = r + 4.0 * np.sum(_inv_offdiag(xi), axis=1)
    return r


def _inv_offdiag(xi: np.ndarray) -> np.ndarray:
    m = len(xi)
    d = xi[:, None] - xi[None, :]
    out = np.zeros((m, m), dtype=complex)
    off = ~np.eye(m, dtype=bool)
    out[off] = 1.0 / d[off]
    return out


def _jacobian(xi: np.ndarray, z: np.ndarray, n: int, eta: float) -> np.ndarray:
    m = len(xi)
    c = n - 2 * m + 2 + 1j * eta
    off = 4.0 * _inv_offdiag(xi) ** 2
    J = off.copy()
    diag = 2.0 * np.sum(1.0 / (xi[:, None] - z[None, :]) ** 2, axis=1) - np.sum(off, axis=1) - c / xi**2
    J[np.diag_indices(m)] = diag
    return J


def stationary_residual(config: SystemConfig) -> np.ndarray:
    """Residuals of the stationary relations, one complex number per charge."""
    return _residual(config.xi_array, config.z, config.n, config.eta)


def stationary_jacobian(config: SystemConfig) -> np.ndarray:
    """Complex derivative matrix d r_k / d xi_l of the residual."""
    return _jacobian(config.xi_array, config.z, config.n, config.eta)


# drift, null vector constant, master function

def drift_complex(theta, xi, eta: float = 0.0) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    xi = np.asarray(xi, dtype=complex)
    z = np.exp(1j * theta)
    U = pairwise_cot(theta).sum(axis=1).astype(complex) + eta
    if len(xi):
        U = U - 2.0 * np.sum(cot_half_complex(z[:, None], xi[None, :]), axis=1)
    return U


def drift_U(config: SystemConfig, tol: float = 1e-8) -> np.ndarray:
    """Real drifts U_j; raises when the charges break the involution symmetry."""
    U = drift_complex(config.theta, config.xi, config.eta)
    if np.max(np.abs(U.imag), initial=0.0) > tol * (1.0 + np.max(np.abs(U.real))):
        raise AsymmetricConfigError(f"drift has imaginary part {np.max(np.abs(U.imag)):.3e}")
    return U.real


def null_vector_values(theta, U) -> np.ndarray:
    """e_j = U_j^2/2 + sum_k cot((theta_k - theta_j)/2) U_k - sum_k 3/(2 sin^2)."""
    f = pairwise_cot(theta)
    g = pairwise_inv_sin2(theta)
    U = np.asarray(U)
    # cot((theta_k - theta_j)/2) = -f[j, k]
    return 0.5 * U**2 - f @ U - 1.5 * g.sum(axis=1)


def null_vector_residual(config: SystemConfig) -> tuple[float, float]:
    """Return (mean of e_j, max deviation of e_j from the mean)."""
    e = null_vector_values(config.theta, drift_U(config))
    h = float(np.mean(e))
    return h, float(np.max(np.abs(e - h)))


def expected_h(n: int, m: int) -> float:
    return -((2 * m - n) ** 2) / 2.0 + 0.5


def log_master_complex(theta, xi, eta: float = 0.0) -> complex:
    """Complex log of the master function; holomorphic in xi away from branch cuts."""
    theta = np.asarray(theta, dtype=float)
    xi = np.asarray(xi, dtype=complex)
    zeta = -1j * np.log(xi)
    n, m = len(theta), len(xi)
    val = 0j
    for i, j in itertools.combinations(range(n), 2):
        val += 2.0 * np.log(np.sin(0.5 * (theta[i] - theta[j])) + 0j)
    for s, t in itertools.combinations(range(m), 2):
        val += 8.0 * np.log(np.sin(0.5 * (zeta[s] - zeta[t])) + 0j)
    for k in range(n):
        for l in range(m):
            val -= 4.0 * np.log(np.sin(0.5 * (theta[k] - zeta[l])) + 0j)
    val += eta * np.sum(theta) - 2.0 * eta * np.sum(zeta)
    return complex(val)


def log_master(config: SystemConfig, tol: float = 1e-8) -> float:
    """Real log of the master function in angular form.

    The sine factors carry even exponents, so their product only needs to be
    real positive; the spin part must be real on its own.
    """
    theta = np.asarray(config.theta)
    xi = config.xi_array
    zeta = -1j * np.log(xi) if len(xi) else np.zeros(0, dtype=complex)
    spin = config.eta * np.sum(theta) - 2.0 * config.eta * np.sum(zeta)
    total = log_master_complex(theta, xi, 0.0)
    phase = float(wrap_angle(total.imag))
    if abs(phase) > tol or abs(complex(spin).imag) > tol * (1.0 + abs(spin)):
        raise AsymmetricConfigError("master function is not real for this configuration")
    return float(total.real + complex(spin).real)


# solver

@dataclass
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 200
    restarts: int = 32
    seed: int = 0
    dedup_tol: float = 1e-7
    annulus: tuple[float, float] = (0.3, 3.0)
    force: bool = False
    structured: bool = True
    max_structured: int = 400


@dataclass
class StationarySolution:
    config: SystemConfig
    residual_norm: float
    h_value: float
    solver_iterations: int
    symmetric: bool = True
    isolated: bool = True  # False when the Jacobian is numerically singular

    def to_dict(self) -> dict:
        return {
            "theta": list(self.config.theta),
            "xi": [[x.real, x.imag] for x in self.config.xi],
            "eta": self.config.eta,
            "residual_norm": self.residual_norm,
            "h_value": self.h_value,
            "iterations": self.solver_iterations,
            "involution_symmetric": self.symmetric,
            "isolated": self.isolated,
        }


class _Singular(Exception):
    pass


_MODULUS_BOUND = 1e4
_ISOLATION_TOL = 1e-9


def _valid(xi: np.ndarray, z: np.ndarray) -> bool:
    # residuals decay like 1/xi, so escapes to 0 or infinity look convergent
    if not np.all(np.isfinite(xi)):
        return False
    a = np.abs(xi)
    if a.max() > _MODULUS_BOUND or a.min() < 1.0 / _MODULUS_BOUND:
        return False
    if np.abs(xi[:, None] - z[None, :]).min() < 1e-10:
        return False
    if len(xi) > 1:
        d = np.abs(xi[:, None] - xi[None, :])
        d[np.diag_indices(len(xi))] = np.inf
        if d.min() < 1e-10:
            return False
    return True


def newton(xi0, z, n: int, eta: float, tol: float = 1e-12, max_iter: int = 200):
    """Damped Newton on the residual; returns (xi, residual inf-norm, iterations, converged).

    The residual is holomorphic in xi, so solving the complex linear system is
    the same as the real 2m x 2m system built from the Cauchy-Riemann blocks.
    """
    xi = np.asarray(xi0, dtype=complex).copy()
    r = _residual(xi, z, n, eta)
    nr = float(np.max(np.abs(r)))
    for it in range(max_iter):
        if nr < tol:
            return xi, nr, it, True
        J = _jacobian(xi, z, n, eta)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise _Singular from exc
        if not np.all(np.isfinite(step)):
            raise _Singular
        lam = 1.0
        while lam > 1e-6:
            cand = xi + lam * step
            if _valid(cand, z):
                rc = _residual(cand, z, n, eta)
                nc = float(np.max(np.abs(rc)))
                if nc < nr or nc < tol:
                    break
            lam *= 0.5
        else:
            return xi, nr, it, False
        xi, r, nr = cand, rc, nc
    return xi, nr, max_iter, nr < tol


def arc_midpoints(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    nxt = np.append(theta[1:], theta[0] + TWO_PI)
    return 0.5 * (theta + nxt)


_GROUP_RADII = {1: (1.0,), 2: (0.5, 2.0), 3: (0.3, 1.0, 3.3)}


def _group_radii(g: int) -> np.ndarray:
    if g in _GROUP_RADII:
        return np.array(_GROUP_RADII[g])
    return np.geomspace(0.25, 4.0, g)


def _structured_starts(theta, m: int, limit: int) -> list[np.ndarray]:
    """Charges grouped on the rays through arc midpoints.

    Every multiset of m arcs gives one start; an arc chosen g times carries g
    charges spread radially about the unit circle.  Stationary charges cluster
    this way (the involution pairs xi with 1/conj(xi)), so these starts reach
    most solutions without random restarts.
    """
    mids = np.exp(1j * arc_midpoints(theta))
    out = []
    for combo in itertools.combinations_with_replacement(range(len(mids)), m):
        counts = np.bincount(combo, minlength=len(mids))
        out.append(np.concatenate([mids[a] * _group_radii(c) for a, c in enumerate(counts) if c]))
        if len(out) >= limit:
            break
    return out


def _random_start(rng: np.random.Generator, m: int, annulus, offset: float = 0.0) -> np.ndarray:
    r = rng.uniform(annulus[0], annulus[1], size=m)
    a = offset + rng.uniform(0.0, TWO_PI, size=m)
    if m >= 2 and rng.random() < 0.5:
        # involution-paired start: xi and 1/conj(xi) on a common ray
        r[1] = 1.0 / r[0]
        a[1] = a[0]
    return r * np.exp(1j * a)


def _h_value(theta, xi, eta) -> tuple[float, bool]:
    cfg_sym = multiset_close(xi, 1.0 / np.conj(xi), 1e-7) if len(xi) else True
    U = drift_complex(theta, xi, eta)
    e = null_vector_values(theta, U.real if cfg_sym else U)
    return float(np.real(np.mean(e))), cfg_sym


def solve_stationary(theta: Sequence[float], m: int, eta: float = 0.0,
                     opts: SolverOptions | None = None) -> list[StationarySolution]:
    """All distinct solutions of the stationary relations reached from the starts.

    Starts are the structured arc-midpoint placements followed by
    ``opts.restarts`` seeded random points in the annulus.  Results are
    deduplicated up to permutation of the charges and sorted canonically.
    """
    opts = opts or SolverOptions()
    theta = np.asarray(theta, dtype=float)
    n = len(theta)
    if m > n and not opts.force:
        raise ValueError(f"m={m} > n={n} refused; pass force=True to experiment")
    SystemConfig(tuple(theta))  # validates theta
    if m == 0:
        cfg = SystemConfig(tuple(theta), (), eta)
        h, _ = _h_value(theta, np.zeros(0, dtype=complex), eta)
        return [StationarySolution(cfg, 0.0, h, 0, True)]

    z = np.exp(1j * theta)
    rng = np.random.default_rng(opts.seed)
    starts = _structured_starts(theta, m, opts.max_structured) if opts.structured else []
    starts += [_random_start(rng, m, opts.annulus, theta[0]) for _ in range(opts.restarts)]

    found: list[tuple[np.ndarray, float, int]] = []
    for xi0 in starts:
        xi, nr, its, ok = None, np.inf, 0, False
        for attempt in range(3):
            if not _valid(xi0, z):
                xi0 = xi0 * np.exp(1j * 1e-3) * (1.0 + 1e-3 * (attempt + 1))
                continue
            try:
                xi, nr, its, ok = newton(xi0, z, n, eta, opts.tol, opts.max_iter)
                break
            except _Singular:
                xi0 = xi0 + 1e-3 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
        if not ok:
            continue
        if any(multiset_close(xi, f[0], opts.dedup_tol) for f in found):
            continue
        found.append((xi, nr, its))

    sols = []
    for xi, nr, its in found:
        xi = canonical_xi(xi)
        h, sym = _h_value(theta, xi, eta)
        sv = np.linalg.svd(_jacobian(xi, z, n, eta), compute_uv=False)
        isolated = bool(sv[-1] > _ISOLATION_TOL * sv[0])
        sols.append(StationarySolution(SystemConfig(tuple(theta), tuple(xi), eta), nr, h, its, sym,
                                       isolated))
    sols.sort(key=lambda s: _sort_key(s.config.xi))
    return sols


def _sort_key(xi) -> tuple:
    return tuple((round(abs(x), 7), round(float(np.angle(x) % TWO_PI), 7)) for x in xi)


def refine(config: SystemConfig, tol: float = 1e-12, max_iter: int = 200) -> SystemConfig:
    """Newton-polish the charges of a nearby configuration."""
    xi, nr, _, ok = newton(config.xi_array, config.z, config.n, config.eta, tol, max_iter)
    if not ok:
        raise RuntimeError(f"refinement did not converge (residual {nr:.3e})")
    return config.with_xi(xi)


# census

@dataclass
class CensusReport:
    n: int
    m: int
    eta: float
    trials: int
    seed: int
    count: int
    target: int
    solutions: list[StationarySolution] = field(default_factory=list)
    patterns: list = field(default_factory=list)
    asymmetric: int = 0
    non_isolated: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "eta": self.eta, "trials": self.trials, "seed": self.seed,
            "count": self.count, "target": self.target, "asymmetric": self.asymmetric,
            "non_isolated": self.non_isolated,
            "solutions": [s.to_dict() for s in self.solutions],
            "patterns": [p.to_dict() if p is not None else None for p in self.patterns],
        }


def census(theta: Sequence[float], m: int, eta: float = 0.0, trials: int = 200, seed: int = 0,
           classify: bool = True, force: bool = False) -> CensusReport:
    """Count distinct stationary solutions and compare with binomial(n, m).

    Only isolated solutions are counted and classified; points on a
    continuous family of solutions (singular Jacobian) are tallied separately
    in ``non_isolated`` because deduplication cannot count them meaningfully.
    """
    from .quaddiff import TracingError, build_qd, extract_link_pattern

    n = len(theta)
    opts = SolverOptions(restarts=trials, seed=seed, force=force)
    found = solve_stationary(theta, m, eta, opts)
    sols = [s for s in found if s.isolated]
    patterns = []
    if classify:
        for s in sols:
            try:
                patterns.append(extract_link_pattern(build_qd(s.config)))
            except (TracingError, DegenerateConfigError):
                patterns.append(None)
    return CensusReport(n, m, eta, trials, seed, len(sols), math.comb(n, m), sols, patterns,
                        sum(not s.symmetric for s in sols), len(found) - len(sols))


# generator commutation test

def _drift_at(theta: np.ndarray, base: SystemConfig) -> np.ndarray:
    """Drift at nearby angles, following the charges by Newton continuation."""
    if base.m == 0:
        return drift_complex(theta, (), base.eta).real
    z = np.exp(1j * theta)
    xi, nr, _, ok = newton(base.xi_array, z, base.n, base.eta)
    if not ok:
        raise RuntimeError("charge continuation failed")
    return drift_complex(theta, xi, base.eta).real


def _apply_M(k: int, theta: np.ndarray, base: SystemConfig, fn: Callable, step: float) -> float:
    U = _drift_at(theta, base)
    n = len(theta)
    out = 0.0
    for l in range(n):
        e = np.zeros(n)
        e[l] = step
        d = (fn(theta + e) - fn(theta - e)) / (2.0 * step)
        coef = U[k] if l == k else float(cot_half(theta[l] - theta[k]))
        out += coef * d
    return out


def generator_commutator_check(config: SystemConfig, i: int, j: int, testfn: Callable,
                               step: float = 1e-4) -> float:
    """|[M_i, M_j] f - (M_j - M_i) f / sin^2((theta_i - theta_j)/2)| by nested differences.

    M_k = U_k d_k + sum_{l != k} cot((theta_l - theta_k)/2) d_l, with U taken
    at each perturbed point after re-solving the charges.
    """
    if i == j:
        raise ValueError("i and j must differ")
    if step < 1e-6:
        warnings.warn("step below 1e-6: nested differences lose precision to cancellation", stacklevel=2)
    theta = np.asarray(config.theta, dtype=float)

    def Mi_f(th):
        return _apply_M(i, th, config, testfn, step)

    def Mj_f(th):
        return _apply_M(j, th, config, testfn, step)

    comm = _apply_M(i, theta, config, Mj_f, step) - _apply_M(j, theta, config, Mi_f, step)
    rhs = (Mj_f(theta) - Mi_f(theta)) / np.sin(0.5 * (theta[i] - theta[j])) ** 2
    return float(abs(comm - rhs))
