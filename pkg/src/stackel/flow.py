"""Numerical geodesic flows of g1 (ellipsoid) and g2 (dual Moser) on S^n.

State is (q, v) in R^{n+1} x R^{n+1}, constrained to q.q = 1 and q.v = 0.
Integration uses scipy's DOP853 between output samples, projecting back onto
the constraint set after every segment.  An extra state component accumulates
Euclidean arc length for the projective-equivalence comparison.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .ambient import build_dual_moser, build_jacobi_moser
from .errors import StiffSegmentError
from .exact import PhasePoly
from .report import VerificationReport

FLOWS = ("g1", "g2")
_ALIASES = {"g1": "g1", "jacobi-moser": "g1", "ellipsoid": "g1",
            "g2": "g2", "dual-moser": "g2"}

CONSTRAINT_TOL = 1e-10


def parse_flow(system) -> str:
    key = str(getattr(system, "value", system)).strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"no geodesic flow for {system!r}; use g1/jacobi-moser or g2/dual-moser")
    return _ALIASES[key]


def _axes(a) -> np.ndarray:
    arr = np.array([float(x) for x in a], dtype=float)
    if arr.ndim != 1 or len(arr) < 2 or np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("semi-axes must be at least two positive finite numbers")
    return arr


def spray(system, a, q, v) -> np.ndarray:
    """Acceleration dv/dt of the geodesic spray."""
    flow = parse_flow(system)
    a = _axes(a)
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
        raise ValueError("non-finite state")
    B = float(np.sum(q * q / a))
    v2 = float(v @ v)
    if flow == "g1":
        return -(v2 / B) * q / a
    # overall sign fixed by the constraint q.dv/dt = -v^2
    return (2.0 * v * float(np.sum(v * q / a)) - v2 * q / a) / B


class NumericPoly:
    """Vectorized float evaluation of a PhasePoly."""

    def __init__(self, poly: PhasePoly):
        items = list(poly.terms.items())
        self.m = poly.m
        if items:
            self.exps = np.array([k for k, _ in items], dtype=np.int64)
            self.coeffs = np.array([float(c) for _, c in items])
        else:
            self.exps = np.zeros((0, 2 * poly.m), dtype=np.int64)
            self.coeffs = np.zeros(0)

    def __call__(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        z = np.concatenate([np.atleast_2d(q), np.atleast_2d(p)], axis=1)  # (N, 2m)
        mons = np.prod(z[:, None, :] ** self.exps[None, :, :], axis=2)
        return mons @ self.coeffs


@dataclass
class FlowState:
    t: float
    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.q.shape != self.v.shape:
            raise ValueError("q and v must have equal length")

    def residuals(self):
        return abs(float(self.q @ self.q) - 1.0), abs(float(self.q @ self.v))


@dataclass
class Trajectory:
    flow: str
    a: np.ndarray
    t: np.ndarray
    q: np.ndarray
    v: np.ndarray
    s: np.ndarray
    integrals_log: Dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def state(self, i: int) -> FlowState:
        return FlowState(float(self.t[i]), self.q[i], self.v[i])

    def drift(self, name: str) -> float:
        """max_t |I(t) - I(0)| / max(1, |I(0)|) for a logged quantity."""
        vals = self.integrals_log[name]
        return float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(vals[0])))

    def drifts(self) -> Dict[str, float]:
        return {k: self.drift(k) for k in self.integrals_log}

    def max_constraint_residual(self) -> float:
        r1 = np.abs(np.sum(self.q * self.q, axis=1) - 1.0)
        r2 = np.abs(np.sum(self.q * self.v, axis=1))
        return float(max(r1.max(), r2.max()))

    def csv_header(self) -> List[str]:
        m = self.q.shape[1]
        return (["t"] + [f"q{i}" for i in range(m)] + [f"v{i}" for i in range(m)] + ["H"]
                + [f"F{i}" for i in range(m)] + ["J"])

    def to_csv(self, path) -> None:
        m = self.q.shape[1]
        cols = [self.t] + [self.q[:, i] for i in range(m)] + [self.v[:, i] for i in range(m)]
        cols += [self.integrals_log["H"]] + [self.integrals_log[f"F{i}"] for i in range(m)]
        cols += [self.integrals_log["J"]]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.csv_header())
            for row in zip(*cols):
                w.writerow([f"{float(x):.17g}" for x in row])


def project(q: np.ndarray, v: np.ndarray):
    q = q / math.sqrt(float(q @ q))
    v = v - float(q @ v) * q
    return q, v


def normalize_velocity(flow: str, a, q, v) -> np.ndarray:
    """Scale v to unit speed for the chosen metric (A = 1 for g1, v^2/B = 1 for g2)."""
    a = _axes(a)
    q = np.asarray(q, float)
    v = np.asarray(v, float)
    if flow == "g1":
        norm2 = float(np.sum(a * v * v))
    else:
        norm2 = float(v @ v) / float(np.sum(q * q / a))
    if norm2 <= 0:
        raise ValueError("zero initial velocity")
    return v / math.sqrt(norm2)


def _log_integrals(flow: str, a: np.ndarray, q: np.ndarray, v: np.ndarray, exact_axes) -> Dict[str, np.ndarray]:
    B = np.sum(q * q / a, axis=1)
    A = np.sum(a * v * v, axis=1)
    v2 = np.sum(v * v, axis=1)
    out: Dict[str, np.ndarray] = {}
    if flow == "g2":
        p = v / B[:, None]
        out["H"] = 0.5 * v2 / B
        fam = build_dual_moser(exact_axes) if exact_axes is not None else None
        out["J"] = A / B ** 2
    else:
        p = v * a
        out["H"] = 0.5 * A
        fam = build_jacobi_moser(exact_axes) if exact_axes is not None else None
        out["J"] = 1.0 / (B * v2)  # C^2
    m = q.shape[1]
    if fam is not None:
        for i, f in enumerate(fam.F):
            out[f"F{i}"] = NumericPoly(f)(q, p)
    else:
        for i in range(m):
            out[f"F{i}"] = np.full(len(q), np.nan)
    return out


def _exact_axes_or_none(a):
    from .systems import SemiAxes
    try:
        return SemiAxes([_to_exact(x) for x in a])
    except Exception:
        return None


def _to_exact(x):
    from fractions import Fraction
    from .exact import Q
    if isinstance(x, float):
        return Q(Fraction(x).limit_denominator(10 ** 12))
    return Q(x)


def integrate(system, a, initial: FlowState, T: float = 10.0, tol: float = 1e-10,
              samples: int = 1000) -> Trajectory:
    flow = parse_flow(system)
    af = _axes(a)
    q0, v0 = initial.q, initial.v
    if len(q0) != len(af):
        raise ValueError("state dimension does not match the number of semi-axes")
    r1, r2 = initial.residuals()
    if r1 > 1e-12 or r2 > 1e-12:
        raise ValueError("initial state violates q.q = 1, q.v = 0")
    m = len(af)

    def rhs(_t, y):
        q, v = y[:m], y[m:2 * m]
        B = float(np.sum(q * q / af))
        v2 = float(v @ v)
        if flow == "g1":
            acc = -(v2 / B) * q / af
        else:
            acc = (2.0 * v * float(np.sum(v * q / af)) - v2 * q / af) / B
        return np.concatenate([v, acc, [math.sqrt(v2)]])

    times = np.linspace(initial.t, initial.t + T, samples + 1)
    Qs = np.empty((len(times), m))
    Vs = np.empty((len(times), m))
    S = np.empty(len(times))
    q, v = project(np.array(q0, float), np.array(v0, float))
    Qs[0], Vs[0], S[0] = q, v, 0.0
    y = np.concatenate([q, v, [0.0]])
    for k in range(1, len(times)):
        sol = solve_ivp(rhs, (times[k - 1], times[k]), y, method="DOP853", rtol=tol, atol=tol * 1e-2)
        if sol.status != 0:
            partial = _make_traj(flow, af, a, times[:k], Qs[:k], Vs[:k], S[:k])
            raise StiffSegmentError(f"stiff segment near t={times[k - 1]:.6g}: {sol.message}", partial)
        yk = sol.y[:, -1]
        q, v = project(yk[:m], yk[m:2 * m])
        Qs[k], Vs[k], S[k] = q, v, yk[-1]
        y = np.concatenate([q, v, [yk[-1]]])
    return _make_traj(flow, af, a, times, Qs, Vs, S)


def _make_traj(flow, af, a, times, Qs, Vs, S) -> Trajectory:
    tr = Trajectory(flow, af, np.array(times), np.array(Qs), np.array(Vs), np.array(S))
    tr.integrals_log = _log_integrals(flow, af, tr.q, tr.v, _exact_axes_or_none(a))
    return tr


def default_initial(a, seed: int = 0) -> FlowState:
    """Deterministic generic point and tangent direction on S^n."""
    rng = np.random.default_rng(seed)
    m = len(a)
    q = rng.normal(size=m)
    q /= np.linalg.norm(q)
    w = rng.normal(size=m)
    v = w - (w @ q) * q
    return FlowState(0.0, q, v / np.linalg.norm(v))


def arc_length_resample(tr: Trajectory, s_grid: np.ndarray) -> np.ndarray:
    speed = np.linalg.norm(tr.v, axis=1)
    dq_ds = tr.v / speed[:, None]
    spline = CubicHermiteSpline(tr.s, tr.q, dq_ds, axis=0)
    return spline(s_grid)


def projective_equivalence_test(a, initial: Optional[FlowState] = None, T: float = 10.0, tol: float = 1e-12,
                                samples: int = 2000, mismatch: float = 0.0, threshold: float = 1e-6,
                                expected: bool = True) -> VerificationReport:
    """Compare g1 and g2 geodesics from a shared point and direction as unparametrized curves.

    ``mismatch`` rotates the g2 initial direction in the tangent plane by that
    angle (radians); a nonzero value is the negative control.
    """
    af = _axes(a)
    if initial is None:
        initial = default_initial(af)
    q0 = np.asarray(initial.q, float)
    d0 = np.asarray(initial.v, float)
    d2 = d0
    if mismatch:
        m = len(af)
        w = np.zeros(m)
        w[np.argmin(np.abs(q0))] = 1.0
        w = w - (w @ q0) * q0 - (w @ d0) * d0 / (d0 @ d0)
        w /= np.linalg.norm(w)
        dn = d0 / np.linalg.norm(d0)
        d2 = math.cos(mismatch) * dn + math.sin(mismatch) * w
    v1 = normalize_velocity("g1", af, q0, d0)
    v2 = normalize_velocity("g2", af, q0, d2)
    tr1 = integrate("g1", a, FlowState(0.0, q0, v1), T, tol, samples)
    tr2 = integrate("g2", a, FlowState(0.0, q0, v2), T, tol, samples)
    L = min(tr1.s[-1], tr2.s[-1])
    grid = np.linspace(0.0, L, 4 * samples + 1)
    c1 = arc_length_resample(tr1, grid)
    c2 = arc_length_resample(tr2, grid)
    dev = float(np.max(np.linalg.norm(c1 - c2, axis=1)))
    rep = VerificationReport(f"projective-equivalence[n={len(af) - 1}{', mismatched' if mismatch else ''}]",
                             "g1 and g2 share unparametrized geodesics", expected=expected)
    rep.add(f"max deviation <= {threshold:g} after arc-length resampling", dev <= threshold, dev)
    rep.info.update({"max_deviation": dev, "arc_length": float(L), "T": T, "tol": tol,
                     "resampling": "Euclidean arc length in R^{n+1}, cubic Hermite"})
    return rep


def conservation_report(system, a, initial: Optional[FlowState] = None, T: float = 10.0, tol: float = 1e-10,
                        samples: int = 1000, bound: float = 1e-8) -> VerificationReport:
    flow = parse_flow(system)
    af = _axes(a)
    if initial is None:
        initial = default_initial(af)
        initial = FlowState(0.0, initial.q, normalize_velocity(flow, af, initial.q, initial.v))
    tr = integrate(flow, a, initial, T, tol, samples)
    rep = VerificationReport(f"flow-conservation[{flow}, n={len(af) - 1}]", f"{flow}:first integrals conserved")
    drifts = tr.drifts()
    for name, d in drifts.items():
        if math.isnan(d):
            continue
        label = "C^2" if (name == "J" and flow == "g1") else name
        rep.add(f"{label} drift <= {bound:g}", d <= bound, d)
    rep.add("constraint residual <= 1e-10", tr.max_constraint_residual() <= CONSTRAINT_TOL,
            tr.max_constraint_residual())
    rep.info.update({"drifts": drifts, "T": T, "tol": tol, "samples": samples})
    rep.trajectory = tr
    return rep
