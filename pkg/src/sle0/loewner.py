"""Deterministic multiple radial Loewner dynamics for growth points and charges.

Driving angles theta_j move by the stationary drift U_j plus the push of the
other growing curves; screening charges are passengers of the disk Loewner
flow.  Curves are recovered pointwise by running the flow backwards.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .stationary import (
    TWO_PI,
    AsymmetricConfigError,
    SystemConfig,
    drift_complex,
    pairwise_cot,
)

COLLISION_TOL = 1e-3


class CollisionStop(Exception):
    """Raised inside the flow when points come within the collision tolerance."""

    def __init__(self, tau: float, reason: str):
        super().__init__(f"{reason} at t~{tau:.6g}")
        self.tau = tau
        self.reason = reason


class TraceBlowupError(RuntimeError):
    pass


# schedules

@dataclass(frozen=True)
class Schedule:
    """Capacity parametrization: nu(t, j) >= 0 is the growth rate of curve j."""

    nu: Callable[[float, int], float]
    description: str = "custom"

    def rates(self, t: float, n: int) -> np.ndarray:
        return np.array([self.nu(t, j) for j in range(n)], dtype=float)

    @classmethod
    def common(cls) -> "Schedule":
        return cls(lambda t, j: 1.0, "common")

    @classmethod
    def single(cls, k: int) -> "Schedule":
        return cls(lambda t, j: 1.0 if j == k else 0.0, f"single:{k}")

    @classmethod
    def weights(cls, w: Sequence[float]) -> "Schedule":
        w = tuple(float(x) for x in w)
        return cls(lambda t, j: w[j], f"weights:{list(w)}")

    @classmethod
    def frozen(cls) -> "Schedule":
        return cls(lambda t, j: 0.0, "frozen")


@dataclass
class LoewnerState:
    t: float
    theta: np.ndarray
    xi: np.ndarray
    capacity: float = 0.0

    def config(self, eta: float = 0.0) -> SystemConfig:
        return SystemConfig(tuple(self.theta), tuple(self.xi), eta)


# vector field

def _check_collision(theta: np.ndarray, xi: np.ndarray, t: float, tol: float) -> None:
    if len(theta) > 1:
        gaps = np.diff(np.concatenate([theta, [theta[0] + TWO_PI]]))
        if gaps.min() < tol:
            raise CollisionStop(t, "growth points collided")
    if len(xi):
        z = np.exp(1j * theta)
        if np.abs(xi[:, None] - z[None, :]).min() < tol:
            raise CollisionStop(t, "charge hit a growth point")


def _velocities(theta: np.ndarray, xi: np.ndarray, nu: np.ndarray, eta: float, check: bool = True):
    U = drift_complex(theta, xi, eta)
    if check and np.max(np.abs(U.imag), initial=0.0) > 1e-6 * (1.0 + np.max(np.abs(U.real), initial=0.0)):
        raise AsymmetricConfigError("charges give a complex drift; the angles would leave the circle")
    f = pairwise_cot(theta)
    dtheta = nu * U.real + f @ nu
    z = np.exp(1j * theta)
    if len(xi):
        dxi = np.sum(nu[None, :] * xi[:, None] * (xi[:, None] + z[None, :]) / (z[None, :] - xi[:, None]),
                     axis=1)
    else:
        dxi = np.zeros(0, dtype=complex)
    return dtheta, dxi


def rhs(state: LoewnerState, schedule: Schedule, t: float | None = None, eta: float = 0.0,
        tol: float = COLLISION_TOL):
    """(dtheta/dt, dxi/dt, dcapacity/dt) at ``state``; raises CollisionStop."""
    t = state.t if t is None else t
    theta = np.asarray(state.theta, dtype=float)
    xi = np.asarray(state.xi, dtype=complex)
    _check_collision(theta, xi, t, tol)
    nu = schedule.rates(t, len(theta))
    dtheta, dxi = _velocities(theta, xi, nu, eta)
    return dtheta, dxi, float(nu.sum())


def _covering_rhs(h: np.ndarray, hp: np.ndarray, theta: np.ndarray, nu: np.ndarray):
    # d/dt h = sum nu cot((h - theta)/2),  d/dt h' = -h' sum nu / (2 sin^2((h - theta)/2))
    # idle points (nu = 0) are dropped so that a probe may sit on one of them
    act = nu > 0
    with np.errstate(all="ignore"):  # swallowed probes become NaN
        d = 0.5 * (h[:, None] - theta[None, act])
        s = np.sin(d)
        dh = np.sum(nu[act] * np.cos(d) / s, axis=1)
        dhp = -hp * np.sum(nu[act] / (2.0 * s * s), axis=1)
    return dh, dhp


# time series

@dataclass
class LoewnerSeries:
    t: np.ndarray
    theta: np.ndarray  # (N, n)
    xi: np.ndarray  # (N, m)
    capacity: np.ndarray
    dtheta: np.ndarray  # driving velocities, for Hermite interpolation
    nu: np.ndarray  # (N, n) rates at the sample times
    schedule: Schedule
    eta: float = 0.0
    stop_reason: str | None = None
    tau: float | None = None
    probes: np.ndarray | None = None  # initial probe points z
    h: np.ndarray | None = None  # (N, p) covering map at the probes, NaN once swallowed
    hprime: np.ndarray | None = None
    _spline: CubicHermiteSpline | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.theta.shape[1]

    @property
    def m(self) -> int:
        return self.xi.shape[1]

    @property
    def T(self) -> float:
        return float(self.t[-1])

    def state(self, k: int) -> LoewnerState:
        return LoewnerState(float(self.t[k]), self.theta[k].copy(), self.xi[k].copy(),
                            float(self.capacity[k]))

    def final(self) -> LoewnerState:
        return self.state(len(self.t) - 1)

    def theta_at(self, t: float) -> np.ndarray:
        if len(self.t) < 2:
            return self.theta[0].copy()
        if self._spline is None:
            self._spline = CubicHermiteSpline(self.t, self.theta, self.dtheta, axis=0)
        return self._spline(t)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["t"] + [f"theta_{j + 1}" for j in range(self.n)]
        for l in range(self.m):
            head += [f"re_xi_{l + 1}", f"im_xi_{l + 1}"]
        w.writerow(head + ["capacity"])
        for k in range(len(self.t)):
            row = [self.t[k], *self.theta[k]]
            for x in self.xi[k]:
                row += [x.real, x.imag]
            w.writerow([f"{v:.12g}" for v in row + [self.capacity[k]]])
        return buf.getvalue()


def _involution_pairs(xi: np.ndarray, tol: float = 1e-9) -> list[tuple[int, int]]:
    """Index pairs (a, b), a < b, with xi_b = 1/conj(xi_a) off the circle."""
    pairs, used = [], set()
    for a in range(len(xi)):
        if a in used or abs(abs(xi[a]) - 1.0) < 1e-12:
            continue
        for b in range(a + 1, len(xi)):
            if b not in used and abs(xi[b] * np.conj(xi[a]) - 1.0) < tol:
                pairs.append((a, b))
                used |= {a, b}
                break
    return pairs


def _symmetrize(xi: np.ndarray, on_circle: np.ndarray, pairs) -> np.ndarray:
    # the exact flow commutes with z -> 1/conj(z); restore that symmetry against round-off
    if not (on_circle.any() or pairs):
        return xi
    xi = xi.copy()
    xi[on_circle] /= np.abs(xi[on_circle])
    for a, b in pairs:
        inner = 0.5 * (xi[a] + 1.0 / np.conj(xi[b]))
        xi[a], xi[b] = inner, 1.0 / np.conj(inner)
    return xi


def probe_angles(z) -> np.ndarray:
    """w with exp(i w) = z; Im w = -log|z| > 0 inside the disk."""
    z = np.asarray(z, dtype=complex)
    return -1j * np.log(z)


def evolve(config: SystemConfig, schedule: Schedule, T: float, dt: float,
           probes: Sequence[complex] | None = None, tol: float = COLLISION_TOL,
           swallow_tol: float = 1e-6) -> LoewnerSeries:
    """Classical RK4 integration of the driving system up to T or the first collision.

    Optional ``probes`` (points of the open disk) are carried along with the
    covering map h_t(w), exp(i w) = z, and its derivative h_t'(w).
    """
    if dt <= 0 or T <= 0:
        raise ValueError("dt and T must be positive")
    n, eta = config.n, config.eta
    theta = np.array(config.theta, dtype=float)
    xi = config.xi_array.copy()
    on_circle = np.abs(np.abs(xi) - 1.0) < 1e-12
    pairs = _involution_pairs(xi)
    p = 0 if probes is None else len(probes)
    h = probe_angles(probes) if p else np.zeros(0, dtype=complex)
    hp = np.ones(p, dtype=complex)
    alive = np.ones(p, dtype=bool)

    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * T:
        steps = int(np.ceil(T / dt))
    ts, thetas, xis, caps, dthetas, nus = [], [], [], [], [], []
    hs, hps = [], []

    def f(t, th, x, hh, hpp, check=False):
        _check_collision(th, x, t, tol)
        x = _symmetrize(x, on_circle, pairs)
        nu = schedule.rates(t, n)
        dth, dx = _velocities(th, x, nu, eta, check)
        if p:
            dh, dhp = _covering_rhs(hh, hpp, th, nu)
        else:
            dh = dhp = hh
        return dth, dx, float(nu.sum()), dh, dhp

    t, cap = 0.0, 0.0
    stop, tau = None, None
    try:
        k0 = f(t, theta, xi, h, hp, True)
    except CollisionStop as e:
        raise ValueError(f"initial configuration violates the collision tolerance: {e}") from e

    def record(k):
        ts.append(t)
        thetas.append(theta.copy())
        xis.append(xi.copy())
        caps.append(cap)
        dthetas.append(k[0])
        nus.append(schedule.rates(t, n))
        if p:
            hs.append(np.where(alive, h, np.nan))
            hps.append(np.where(alive, hp, np.nan))

    record(k0)
    for i in range(steps):
        step = min(dt, T - t) if i == steps - 1 else dt
        try:
            k1 = k0
            k2 = f(t + step / 2, theta + step / 2 * k1[0], xi + step / 2 * k1[1], h + step / 2 * k1[3],
                   hp + step / 2 * k1[4])
            k3 = f(t + step / 2, theta + step / 2 * k2[0], xi + step / 2 * k2[1], h + step / 2 * k2[3],
                   hp + step / 2 * k2[4])
            k4 = f(t + step, theta + step * k3[0], xi + step * k3[1], h + step * k3[3], hp + step * k3[4])
            new_theta = theta + step / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            new_xi = xi + step / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            new_cap = cap + step / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            if p:
                new_h = h + step / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
                new_hp = hp + step / 6 * (k1[4] + 2 * k2[4] + 2 * k3[4] + k4[4])
            else:
                new_h, new_hp = h, hp
            new_xi = _symmetrize(new_xi, on_circle, pairs)
            k_next = f(t + step, new_theta, new_xi, new_h, new_hp, True)
        except CollisionStop as e:
            stop, tau = e.reason, e.tau
            break
        theta, xi, cap, t = new_theta, new_xi, new_cap, t + step
        if p:
            h, hp = new_h, new_hp
            # a probe is swallowed when its image reaches a driving point
            act = schedule.rates(t, n) > 0
            gap = np.abs(np.exp(1j * h)[:, None] - np.exp(1j * theta[act])[None, :]).min(axis=1, initial=np.inf)
            bad = ~np.isfinite(h) | ~np.isfinite(hp) | (gap < swallow_tol)
            alive &= ~bad
            h = np.where(alive, h, 0.0)
            hp = np.where(alive, hp, 1.0)
        k0 = k_next
        record(k0)

    return LoewnerSeries(
        np.array(ts), np.array(thetas), np.array(xis).reshape(len(ts), -1), np.array(caps),
        np.array(dthetas), np.array(nus), schedule, eta, stop, tau,
        None if not p else np.asarray(probes, dtype=complex),
        np.array(hs) if p else None, np.array(hps) if p else None,
    )


# traces by reverse flow

def trace_point(series: LoewnerSeries, j: int, t: float, epsilon: float = 1e-6,
                rtol: float = 1e-10, atol: float = 1e-12) -> complex:
    """Approximate gamma_j(t) = g_t^{-1}(exp(i theta_j(t))) by the reverse flow."""
    if t < 0 or t > series.T + 1e-12:
        raise ValueError(f"t={t} outside [0, {series.T}]")
    w0 = (1.0 - epsilon) * np.exp(1j * series.theta_at(t)[j])
    if t == 0.0:
        return complex(w0)
    sched = series.schedule
    n = series.n

    def f(s, y):
        w = complex(y[0], y[1])
        tau = t - s
        z = np.exp(1j * series.theta_at(tau))
        nu = sched.rates(tau, n)
        dw = -np.sum(nu * w * (z + w) / (z - w))
        return [dw.real, dw.imag]

    def leave(s, y):
        return np.hypot(y[0], y[1]) - (1.0 + 1e-9)

    leave.terminal = True
    sol = solve_ivp(f, (0.0, t), [w0.real, w0.imag], method="DOP853", rtol=rtol, atol=atol,
                    events=leave)
    if sol.status != 0:
        raise TraceBlowupError(f"reverse flow for curve {j + 1} left the disk at t={t:.4g}")
    return complex(sol.y[0, -1], sol.y[1, -1])


@dataclass
class TraceSet:
    times: np.ndarray
    curves: dict[int, np.ndarray]  # curve index -> points at the sample times

    def to_csv(self) -> str:
        from .quaddiff import polylines_to_csv

        return polylines_to_csv([(j, "Trace", self.times, pts) for j, pts in sorted(self.curves.items())])


def trace_set(series: LoewnerSeries, curves: Sequence[int] | None = None, samples: int = 200,
              epsilon: float = 1e-6) -> TraceSet:
    times = np.linspace(0.0, series.T, samples)
    curves = range(series.n) if curves is None else curves
    out = {}
    for j in curves:
        pts = np.array([trace_point(series, j, float(t), epsilon) for t in times])
        pts[0] = np.exp(1j * series.theta[0, j])  # gamma_j(0) is the growth point itself
        out[j] = pts
    return TraceSet(times, out)


def _distance_to_polyline(p: np.ndarray, poly: np.ndarray) -> np.ndarray:
    a, b = poly[:-1], poly[1:]
    ab = b - a
    denom = np.where(np.abs(ab) > 0, np.abs(ab) ** 2, 1.0)
    s = np.clip(((p[:, None] - a[None, :]) * np.conj(ab)[None, :]).real / denom[None, :], 0.0, 1.0)
    proj = a[None, :] + s * ab[None, :]
    return np.abs(p[:, None] - proj).min(axis=1)


def compare_trace_qd(traces: TraceSet, qd, opts=None) -> float:
    """Largest distance from a trace sample to the trajectory leaving the same zero."""
    from .quaddiff import trace_from_zero

    worst = 0.0
    for j, pts in traces.curves.items():
        traj = trace_from_zero(qd, j, opts)
        worst = max(worst, float(_distance_to_polyline(pts, traj.samples).max()))
    return worst


# capacity of a second hull after mapping out the first

def capacity_correction_check(x: float, y: float, c: float, eps: float, steps: int = 400) -> dict:
    """Compare the image capacity of a c*eps hull at exp(iy) with c*eps*(1 - eps/sin^2((x-y)/2)).

    A hull of capacity eps is grown at exp(ix) by the single-curve flow of the
    two-point system (x, y); the small hull at exp(iy) then has image capacity
    c*eps*h'(y)^2 to leading order in c*eps, with h' from the variational
    equation.  The returned deviation is O(eps^3).
    """
    if np.isclose(np.cos(x - y), 1.0):
        raise ValueError("x and y must differ")
    th = np.mod([x, y], TWO_PI)
    order = np.argsort(th)
    grow = int(np.flatnonzero(order == 0)[0])
    series = evolve(SystemConfig(tuple(th[order])), Schedule.single(grow), eps, eps / steps,
                    probes=[np.exp(1j * th[1])])
    # the marked point sits on the circle, so h and h' stay real there
    hp = float(series.hprime[-1, 0].real)
    measured = c * eps * hp ** 2
    formula = c * eps * (1.0 - eps / np.sin(0.5 * (x - y)) ** 2)
    return {"measured": measured, "formula": float(formula),
            "deviation": float(abs(measured - formula)), "hprime": hp}
