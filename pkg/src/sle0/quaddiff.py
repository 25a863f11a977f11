"""Residue-free quadratic differentials and their horizontal trajectories.

Q(z) dz^2 has double zeros at the growth points, fourth-order poles at the
screening charges and a power of z at the origin.  Horizontal trajectories
(Q(z) dz^2 > 0) are traced as integral curves of the unit field
v/|v| with v = 1/sqrt(Q), the square root being continued along the path.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .stationary import TWO_PI, DegenerateConfigError, SystemConfig, check_separation


class TracingError(RuntimeError):
    pass


class PoleApproachError(TracingError):
    def __init__(self, position: complex, msg: str = "trajectory collapsed onto a pole"):
        super().__init__(f"{msg} near {position:.6g}")
        self.position = position


class TracingInconsistencyError(TracingError):
    pass


@dataclass(frozen=True)
class QuadraticDifferential:
    """Q(z) = sign * normalization * z^exponent * prod(z - z_j)^2 / prod(z - xi_k)^4.

    ``normalization`` is prod xi^2 / prod z_j.  ``sign`` = (-1)^(n+1) makes the
    unit circle a horizontal trajectory (-z^2 Q > 0 there).
    """

    theta: np.ndarray
    zeros: np.ndarray
    poles: np.ndarray
    eta: float
    normalization: complex
    sign: int
    exponent_at_origin: complex

    @property
    def n(self) -> int:
        return len(self.zeros)

    @property
    def m(self) -> int:
        return len(self.poles)

    @property
    def prefactor(self) -> complex:
        return self.sign * self.normalization

    def Q(self, z, logz=None):
        z = np.asarray(z, dtype=complex)
        L = np.log(z) if logz is None else logz
        num = np.prod(np.subtract.outer(z, self.zeros), axis=-1) ** 2
        den = np.prod(np.subtract.outer(z, self.poles), axis=-1) ** 4 if self.m else 1.0
        return self.prefactor * np.exp(self.exponent_at_origin * L) * num / den

    def sqrt(self, z, logz=None):
        """A square root of Q, fixed by the branch of log z supplied."""
        z = np.asarray(z, dtype=complex)
        L = np.log(z) if logz is None else logz
        num = np.prod(np.subtract.outer(z, self.zeros), axis=-1)
        den = np.prod(np.subtract.outer(z, self.poles), axis=-1) ** 2 if self.m else 1.0
        return np.sqrt(self.prefactor + 0j) * np.exp(0.5 * self.exponent_at_origin * L) * num / den

    def sqrt_derivative_at_zero(self, j: int) -> complex:
        zj = self.zeros[j]
        others = np.delete(self.zeros, j)
        num = np.prod(zj - others)
        den = np.prod(zj - self.poles) ** 2 if self.m else 1.0
        L = 1j * self.theta[j]
        return complex(np.sqrt(self.prefactor + 0j) * np.exp(0.5 * self.exponent_at_origin * L) * num / den)


def build_qd(config: SystemConfig) -> QuadraticDifferential:
    z = config.z
    xi = config.xi_array
    check_separation(z, xi)
    n, m = config.n, config.m
    norm = complex(np.prod(xi**2) / np.prod(z))
    return QuadraticDifferential(
        theta=np.asarray(config.theta, dtype=float),
        zeros=z,
        poles=xi,
        eta=config.eta,
        normalization=norm,
        sign=(-1) ** (n + 1),
        exponent_at_origin=complex(2 * m - n - 2, -config.eta),
    )


def residues(qd: QuadraticDifferential) -> list[tuple[complex, complex]]:
    """Leading coefficient A_k and residue B_k of sqrt(Q) at each pole.

    Uses the reduced root z^a prod(z - z_j) / prod(z - xi)^2 with
    a = m - n/2 - 1 - i eta/2, i.e. without the constant prefactor.
    """
    n, m = qd.n, qd.m
    a = m - n / 2 - 1 - 0.5j * qd.eta
    out = []
    for k in range(m):
        x = qd.poles[k]
        others = np.delete(qd.poles, k)
        A = x**a * np.prod(x - qd.zeros) / (np.prod((x - others) ** 2) if m > 1 else 1.0)
        bracket = np.sum(1.0 / (x - qd.zeros)) - 2.0 * np.sum(1.0 / (x - others)) + a / x
        out.append((complex(A), complex(bracket * A)))
    return out


def local_directions(qd: QuadraticDifferential, zero_index: int) -> np.ndarray:
    """The four horizontal directions d at a double zero: Im(c d^2 / 2) = 0."""
    c = qd.sqrt_derivative_at_zero(zero_index)
    if abs(c) < 1e-14:
        raise DegenerateConfigError("zero of higher order: directions undefined")
    d0 = np.sqrt(np.conj(c) / abs(c))
    return d0 * np.array([1.0, 1j, -1.0, -1j])


def inward_directions(qd: QuadraticDifferential, zero_index: int) -> np.ndarray:
    d = local_directions(qd, zero_index)
    zj = qd.zeros[zero_index]
    inward = d[np.real(d * np.conj(zj)) < -0.5]
    return inward[np.argsort(np.angle(inward * np.conj(-zj)))]


@dataclass(frozen=True)
class Endpoint:
    kind: str  # "zero", "origin", "circle", "budget"
    index: int | None = None

    def __str__(self) -> str:
        names = {"zero": "Zero", "origin": "Origin", "circle": "Circle", "budget": "Budget-exhausted"}
        if self.kind == "zero":
            return f"Zero({self.index + 1})"
        return names[self.kind]


@dataclass
class TraceOptions:
    epsilon: float = 1e-6
    delta_zero: float = 1e-4
    delta_pole: float = 1e-4
    r_origin: float = 1e-3
    max_arclength: float = 50.0
    atol: float = 1e-10
    rtol: float = 1e-10
    max_step: float = 1e-2
    circle_slack: float = 1e-6
    through_poles: bool = True
    pole_radius: float = 0.1
    max_passages: int = 8
    capture_radius: float = 1e-3  # a local minimum of |z - z_k| inside this counts as reaching z_k


@dataclass
class Trajectory:
    start_zero: int
    samples: np.ndarray
    s: np.ndarray
    endpoint: Endpoint
    arclength: float
    winding: float
    direction: complex
    branch_sign: int = 1
    pole_passages: list = field(default_factory=list)
    phase: np.ndarray | None = None  # unwrapped arg z at each sample

    @property
    def clockwise(self) -> bool:
        return self.winding < 0


def _seed(qd: QuadraticDifferential, j: int, d: complex, eps: float):
    zj = qd.zeros[j]
    z0 = zj + eps * d
    phi0 = qd.theta[j] + float(np.angle(z0 / zj))
    L0 = np.log(abs(z0)) + 1j * phi0
    v0 = 1.0 / qd.sqrt(z0, L0)
    sgn = 1 if np.real(v0 * np.conj(d)) > 0 else -1
    return z0, phi0, sgn


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_ARC_NODES, _ARC_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _branch_log(z, z_ref: complex, phi_ref: float):
    return np.log(np.abs(z)) + 1j * (phi_ref + np.angle(z / z_ref))


def _polyline_integral(qd, zs: np.ndarray, phis: np.ndarray, sgn: int) -> np.ndarray:
    """Cumulative integral of sgn*sqrt(Q) dz along straight segments (8-point Gauss)."""
    out = np.zeros(len(zs), dtype=complex)
    if len(zs) < 2:
        return out
    a, b, pa = zs[:-1], zs[1:], phis[:-1]
    t = 0.5 * (_GL_NODES + 1.0)
    z = a[:, None] + t[None, :] * (b - a)[:, None]
    L = _branch_log(z, a[:, None], pa[:, None])
    f = sgn * qd.sqrt(z, L)
    seg = 0.5 * (b - a) * (f @ _GL_WEIGHTS)
    out[1:] = np.cumsum(seg)
    return out


def _arc_integral(qd, x: complex, rho: float, psi_a: float, psi_b: float, z_ref: complex,
                  phi_ref: float, sgn: int) -> complex:
    psi = 0.5 * (psi_b - psi_a) * _ARC_NODES + 0.5 * (psi_a + psi_b)
    e = np.exp(1j * psi)
    z = x + rho * e
    f = sgn * qd.sqrt(z, _branch_log(z, z_ref, phi_ref)) * 1j * rho * e
    return complex(0.5 * (psi_b - psi_a) * (f @ _ARC_WEIGHTS))


def _pole_alpha(qd, k: int, z_ref: complex, phi_ref: float, sgn: int) -> complex:
    x = qd.poles[k]
    others = np.delete(qd.poles, k)
    Lx = _branch_log(x, z_ref, phi_ref)
    return complex(sgn * np.sqrt(qd.prefactor + 0j) * np.exp(0.5 * qd.exponent_at_origin * Lx)
                   * np.prod(x - qd.zeros) / (np.prod((x - others) ** 2) if len(others) else 1.0))


@dataclass
class PolePassage:
    pole: int
    enter: int  # sample index where the trajectory entered the pole disk
    exit: int  # sample index where it left
    dF: complex  # integral of sqrt(Q) dz from the entry to the exit point


def _pole_jump(qd: QuadraticDifferential, k: int, z_in: complex, phi_in: float, sgn: int,
               level_in: float):
    """Carry a trajectory through a residue-free fourth-order pole.

    Near xi_k, F = integral of sqrt(Q) dz behaves like -alpha/(z - xi_k), so
    every trajectory entering a small disk around the pole runs into it and
    comes out on the opposite side of the same level line of Im F.  The exit
    point on the circle |z - xi_k| = rho is found by Newton's method on the
    exact arc integral, aiming at the critical level Im F = 0; ``level_in`` is
    Im F at the entry point, so accumulated drift is removed as well.
    """
    x = qd.poles[k]
    rho = abs(z_in - x)
    psi_in = float(np.angle(z_in - x))
    alpha = _pole_alpha(qd, k, z_in, phi_in, sgn)
    u_in = -alpha / (z_in - x)
    guess = x + alpha / np.conj(u_in)
    psi = psi_in + float(np.angle((guess - x) / (z_in - x)))
    scale = abs(alpha) / rho
    for _ in range(50):
        dF = _arc_integral(qd, x, rho, psi_in, psi, z_in, phi_in, sgn)
        g = dF.imag + level_in
        zz = x + rho * np.exp(1j * psi)
        dg = (sgn * qd.sqrt(zz, _branch_log(zz, z_in, phi_in)) * 1j * rho * np.exp(1j * psi)).imag
        if abs(g) < 1e-13 * scale:
            break
        psi -= g / dg
    else:
        raise PoleApproachError(x, "could not continue the level line through the pole")
    z_out = complex(x + rho * np.exp(1j * psi))
    return z_out, float(phi_in + np.angle(z_out / z_in)), dF, u_in, alpha


def _passage_points(x: complex, alpha: complex, u_in: complex, z_in: complex, z_out: complex,
                    max_step: float) -> np.ndarray:
    """Points on the leading-order level circle inside the pole disk, for plotting.

    Returns the interior points only (z_in and z_out excluded), spaced at most
    ``max_step`` apart.
    """
    r = u_in.real
    ts = r * 2.0 ** np.arange(1, 12)
    inner = x - alpha / (ts + 1j * u_in.imag)
    outer = x - alpha / (-ts[::-1] + 1j * u_in.imag)
    pts = np.concatenate([[z_in], inner, [x], outer, [z_out]])
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        k = int(np.ceil(abs(b - a) / max_step))
        out.extend(a + (b - a) * np.arange(1, k + 1) / max(k, 1))
    return np.array(out[1:-1])


def _pole_radius(qd: QuadraticDifferential, k: int, cap: float) -> float:
    x = qd.poles[k]
    others = np.concatenate([qd.zeros, np.delete(qd.poles, k), [0.0]])
    return min(cap, 0.25 * float(np.min(np.abs(others - x))))


def trace_from_zero(qd: QuadraticDifferential, zero_index: int, opts: TraceOptions | None = None,
                    direction: complex | None = None) -> Trajectory:
    """Follow the horizontal trajectory leaving a zero into the disk.

    The state is (Re z, Im z, arg z) with arg z unwrapped, which fixes the
    branch of z^exponent and hence of sqrt(Q) along the path.
    """
    opts = opts or TraceOptions()
    j = zero_index
    if direction is None:
        dirs = inward_directions(qd, j)
        if len(dirs) == 0:
            raise TracingError(f"no inward direction at zero {j + 1}")
        direction = dirs[0]
    z0, phi0, sgn = _seed(qd, j, direction, opts.epsilon)

    def rhs(t, y):
        z = complex(y[0], y[1])
        a = np.angle(z)
        phi = a + TWO_PI * np.round((y[2] - a) / TWO_PI)
        L = np.log(abs(z)) + 1j * phi
        v = 1.0 / (sgn * qd.sqrt(z, L))
        u = v / abs(v)
        return [u.real, u.imag, (u / z).imag]

    events = []
    kinds: list[Endpoint] = []

    def add(fn, direction, kind):
        fn.terminal, fn.direction = True, direction
        events.append(fn)
        kinds.append(kind)

    for k in range(qd.n):
        add((lambda zk: lambda t, y: abs(complex(y[0], y[1]) - zk) - opts.delta_zero)(qd.zeros[k]),
            -1, Endpoint("zero", k))
    # a double zero is a saddle of the flow: a path aimed at it with a tiny level
    # error is deflected before entering the delta_zero disk, so closest
    # approach inside capture_radius also counts as arrival
    for k in range(qd.n):
        if k == j:
            continue

        def closest(t, y, zk=qd.zeros[k]):
            w = complex(y[0], y[1]) - zk
            if abs(w) > opts.capture_radius:
                return -1.0
            u = rhs(t, y)
            return (w.real * u[0] + w.imag * u[1]) / abs(w)

        add(closest, 1, Endpoint("zero", k))
    add(lambda t, y: np.hypot(y[0], y[1]) - opts.r_origin, -1, Endpoint("origin"))
    add(lambda t, y: np.hypot(y[0], y[1]) - (1.0 + opts.circle_slack), 1, Endpoint("circle"))
    for k in range(qd.m):
        rho = _pole_radius(qd, k, opts.pole_radius)
        add((lambda xk, rho: lambda t, y: abs(complex(y[0], y[1]) - xk) - rho)(qd.poles[k], rho),
            -1, Endpoint("pole", k))

    zs, ss, phis = [np.array([qd.zeros[j]])], [np.array([0.0])], [np.array([qd.theta[j]])]
    passages: list[PolePassage] = []
    state, s_start, level = [z0.real, z0.imag, phi0], opts.epsilon, 0.0
    count = 1
    while True:
        sol = solve_ivp(rhs, (s_start, opts.max_arclength), state, method="RK45",
                        events=events, atol=opts.atol, rtol=opts.rtol, max_step=opts.max_step)
        seg = sol.y[0] + 1j * sol.y[1]
        if sol.status < 0:
            raise PoleApproachError(complex(seg[-1]), "step size collapsed")
        zs.append(seg)
        ss.append(sol.t)
        phis.append(sol.y[2])
        count += len(seg)
        end = Endpoint("budget")
        for e, te in enumerate(sol.t_events):
            if len(te):
                end = kinds[e]
                break
        if end.kind != "pole":
            break
        if not opts.through_poles or len(passages) >= opts.max_passages:
            raise PoleApproachError(complex(seg[-1]))
        # Im F at the entry point, integrated along this segment from the last level
        F_seg = _polyline_integral(qd, np.concatenate([[zs[-2][-1]], seg]),
                                   np.concatenate([[phis[-2][-1]], sol.y[2]]), sgn)
        level_in = level + F_seg[-1].imag
        z_in, phi_in = complex(seg[-1]), float(sol.y[2][-1])
        z_out, phi_out, dF, u_in, alpha = _pole_jump(qd, end.index, z_in, phi_in, sgn, level_in)
        inner = _passage_points(qd.poles[end.index], alpha, u_in, z_in, z_out, opts.max_step)
        inner_phi = phi_in + np.angle(inner / z_in)
        s_in = sol.t[-1]
        hops = np.abs(np.diff(np.concatenate([[z_in], inner, [z_out]])))
        inner_s = s_in + np.cumsum(hops)[:-1]
        zs.append(inner)
        ss.append(inner_s)
        phis.append(inner_phi)
        passages.append(PolePassage(end.index, count - 1, count + len(inner), dF))
        count += len(inner)
        level = 0.0
        s_start = s_in + hops.sum()
        state = [z_out.real, z_out.imag, phi_out]
        # first point of the next segment is z_out itself
    samples = np.concatenate(zs)
    s = np.concatenate(ss)
    winding = float(sol.y[2][-1] - phi0)
    return Trajectory(j, samples, s, end, float(s[-1]), winding, complex(direction), sgn, passages,
                      np.concatenate(phis))


def trace_all(qd: QuadraticDifferential, opts: TraceOptions | None = None) -> list[Trajectory]:
    out = []
    for j in range(qd.n):
        for d in inward_directions(qd, j):
            out.append(trace_from_zero(qd, j, opts, d))
    return out


@dataclass
class LinkPattern:
    """Chords and rays, stored with 0-based zero indices."""

    chords: frozenset = frozenset()
    rays: frozenset = frozenset()
    unresolved: dict = field(default_factory=dict)
    trajectories: list = field(default_factory=list, repr=False, compare=False)

    def covers(self, n: int) -> bool:
        used = [a for c in self.chords for a in c] + list(self.rays)
        return sorted(used) == list(range(n))

    def non_crossing(self) -> bool:
        cs = [tuple(sorted(c)) for c in self.chords]
        for (a, b) in cs:
            for (c, d) in cs:
                if a < c < b < d:
                    return False
        return True

    def is_admissible(self, n: int, m: int) -> bool:
        k = min(m, n - m)
        return (self.covers(n) and self.non_crossing() and not self.unresolved
                and len(self.chords) == k and len(self.rays) == n - 2 * k)

    def to_dict(self) -> dict:
        return {
            "chords": sorted([sorted([a + 1, b + 1]) for a, b in self.chords]),
            "rays": sorted(r + 1 for r in self.rays),
        }


def extract_link_pattern(qd: QuadraticDifferential, opts: TraceOptions | None = None) -> LinkPattern:
    trajs = trace_all(qd, opts)
    ends: dict[int, list[Endpoint]] = {j: [] for j in range(qd.n)}
    for t in trajs:
        ends[t.start_zero].append(t.endpoint)
    chords, rays, unresolved = set(), set(), {}
    for j, es in ends.items():
        for e in es:
            if e.kind == "zero":
                if not any(f.kind == "zero" and f.index == j for f in ends[e.index]):
                    raise TracingInconsistencyError(
                        f"zero {j + 1} reaches zero {e.index + 1} but not conversely")
                chords.add(tuple(sorted((j, e.index))))
            elif e.kind == "origin":
                rays.add(j)
            else:
                unresolved[j] = str(e)
    return LinkPattern(frozenset(chords), frozenset(rays), unresolved, trajs)


def horizontal_defect(qd: QuadraticDifferential, traj: Trajectory) -> np.ndarray:
    """|Im F| at each sample, F = integral of sqrt(Q) dz from the start zero.

    Segments are integrated with 8-point Gauss-Legendre; pole passages
    contribute their exact arc integral instead of the (singular) chord.
    """
    zs = traj.samples
    phi = traj.phase if traj.phase is not None else np.unwrap(np.angle(zs))
    F = np.zeros(len(zs), dtype=complex)
    pieces = []
    start = 0
    for p in traj.pole_passages:
        pieces.append((start, p.enter, None))
        pieces.append((p.enter, p.exit, p.dF))
        start = p.exit
    pieces.append((start, len(zs) - 1, None))
    base = 0j
    for a, b, dF in pieces:
        if dF is None:
            F[a:b + 1] = base + _polyline_integral(qd, zs[a:b + 1], phi[a:b + 1], traj.branch_sign)
            base = F[b]
        else:
            F[a + 1:b] = np.nan
            base = base + dF
            F[b] = base
    return np.abs(np.imag(F))


def polylines_to_csv(rows) -> str:
    """CSV with columns traj_id, start_zero, endpoint_kind, s, re, im.

    ``rows`` yields (start index, endpoint label, parameter values, points);
    start indices are written 1-based.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["traj_id", "start_zero", "endpoint_kind", "s", "re", "im"])
    for tid, (start, label, s, pts) in enumerate(rows):
        for si, z in zip(s, pts):
            w.writerow([tid, start + 1, label, f"{si:.12g}", f"{z.real:.12g}", f"{z.imag:.12g}"])
    return buf.getvalue()


def trajectories_to_csv(trajs: list[Trajectory]) -> str:
    return polylines_to_csv([(t.start_zero, str(t.endpoint), t.s, t.samples) for t in trajs])
