"""Exact curvature of diagonal metrics at a point, via jets.

Conventions: R^l_{i,jk} = d_j G^l_{ik} - d_k G^l_{ij} + G^l_{sj} G^s_{ik} - G^l_{sk} G^s_{ij},
R_{ij} = R^s_{i,sj}, and lowered components R_{li,jk} = g_l R^l_{i,jk}.
With these the round sphere has R_{ij} = (n-1) g_{ij}.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

from .ellipsoidal import (check_chart, elementary_symmetric, g2_metric_fn, sample_chart_points,
                          sigma, stackel_metric_fn)
from .errors import PoleError
from .exact import Q
from .jets import Jet, variables
from .report import VerificationReport
from .systems import System, as_axes


class DiagonalMetric:
    """g = sum_i g_i(x) (dx^i)^2 with each g_i a rational expression."""

    def __init__(self, n: int, coeffs: Callable, system: Optional[System] = None, name: str = ""):
        self.n = n
        self.coeffs = coeffs
        self.system = system
        self.name = name or (system.value if system else "metric")
        self.axes = None

    @classmethod
    def for_system(cls, system, a) -> "DiagonalMetric":
        system = System.parse(system)
        a = as_axes(a)
        m = cls(a.n, stackel_metric_fn(system, a), system)
        m.axes = a
        return m

    @classmethod
    def conformally_flat_sphere(cls, a) -> "DiagonalMetric":
        """(1/B) sum dq^2 restricted to the sphere."""
        a = as_axes(a)
        m = cls(a.n, g2_metric_fn(a), None, "g2")
        m.axes = a
        return m

    @classmethod
    def euclidean(cls, n: int) -> "DiagonalMetric":
        return cls(n, lambda x: [Q(1)] * len(x), None, "euclidean")

    @classmethod
    def polar(cls) -> "DiagonalMetric":
        return cls(2, lambda x: [Q(1), x[0] * x[0]], None, "polar")

    def perturbed(self, eps, target: int = 0, source: int = 1) -> "DiagonalMetric":
        """g_target <- g_target + eps * x^source**2; destroys the Staeckel structure."""
        eps = Q(eps)
        base = self.coeffs

        def g(x):
            out = list(base(x))
            out[target] = out[target] + eps * x[source] * x[source]
            return out
        m = DiagonalMetric(self.n, g, None, f"{self.name}+perturbation")
        m.axes = self.axes
        return m

    def jets(self, x: Sequence, order: int) -> List[Jet]:
        xs = variables(x, order)
        try:
            out = self.coeffs(xs)
        except ZeroDivisionError as exc:
            raise PoleError() from exc
        return [v if isinstance(v, Jet) else Jet.constant(Q(v), xs[0].base, order) for v in out]


def _zero(base, order):
    return Jet.constant(Q(0), base, order)


class CurvatureJets:
    """Christoffel, Riemann and Ricci jets built from order-K metric jets.

    Orders: Gamma K-1, Riemann and Ricci K-2.
    """

    def __init__(self, metric: DiagonalMetric, x: Sequence, order: int = 2):
        if order < 2:
            raise ValueError("curvature needs metric jets of order >= 2")
        self.metric = metric
        self.n = n = metric.n
        self.order = order
        self.x = tuple(Q(v) for v in x)
        self.g = metric.jets(self.x, order)
        for v in self.g:
            if v.value == 0:
                raise PoleError("degenerate metric at base point")
        self.ginv = [v.reciprocal() for v in self.g]
        self.dg = [[self.g[i].deriv(k) for i in range(n)] for k in range(n)]  # dg[k][i] = d_k g_i
        self.gamma = self._christoffel_general()
        self.riemann = self._riemann()
        self.ricci = [[sum((self.riemann[s][i][s][j] for s in range(n)), _zero(self.x, order - 2))
                       for j in range(n)] for i in range(n)]
        self.scalar = sum((self.ginv[i].truncate(order - 2) * self.ricci[i][i] for i in range(n)),
                          _zero(self.x, order - 2))

    def gmat(self, i, j):
        return self.g[i] if i == j else _zero(self.x, self.order)

    def _christoffel_general(self):
        """G^l_{ij} = 1/2 g^{lm}(d_i g_{mj} + d_j g_{mi} - d_m g_{ij}) with a full g^{lm} sum."""
        n, K = self.n, self.order
        z = _zero(self.x, K - 1)

        def dmat(k, i, j):
            return self.dg[k][i] if i == j else z

        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for l in range(n):
            for i in range(n):
                for j in range(i, n):
                    tot = z
                    for m in range(n):
                        ginv_lm = self.ginv[l] if l == m else None
                        if ginv_lm is None:
                            continue
                        tot = tot + ginv_lm * (dmat(i, m, j) + dmat(j, m, i) - dmat(m, i, j))
                    out[l][i][j] = out[l][j][i] = tot * Q(1, 2)
        return out

    def christoffel_shortcut(self):
        """Diagonal-metric formulas written with d ln g."""
        n, K = self.n, self.order
        z = _zero(self.x, K - 1)
        out = [[[z] * n for _ in range(n)] for _ in range(n)]
        gi = [v.truncate(K - 1) for v in self.ginv]
        for i in range(n):
            for j in range(n):
                dlog = self.dg[j][i] * gi[i] * Q(1, 2)  # 1/2 d_j ln g_i
                out[i][i][j] = out[i][j][i] = dlog
                if i != j:
                    out[i][j][j] = -self.dg[i][j] * gi[i] * Q(1, 2)
        return out

    def _riemann(self):
        n, K = self.n, self.order
        G = self.gamma
        z = _zero(self.x, K - 2)
        Gt = [[[G[l][i][j].truncate(K - 2) for j in range(n)] for i in range(n)] for l in range(n)]
        R = [[[[z] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for l, i, j, k in itertools.product(range(n), repeat=4):
            if j >= k:
                continue
            v = G[l][i][k].deriv(j) - G[l][i][j].deriv(k)
            for s in range(n):
                v = v + Gt[l][s][j] * Gt[s][i][k] - Gt[l][s][k] * Gt[s][i][j]
            R[l][i][j][k] = v
            R[l][i][k][j] = -v
        return R

    def lowered(self, l, i, j, k) -> Jet:
        return self.g[l].truncate(self.order - 2) * self.riemann[l][i][j][k]


@dataclass
class CurvatureBundle:
    christoffel: list
    riemann: list
    ricci: list
    scalar: object
    metric: list

    def lowered(self, l, i, j, k):
        return self.metric[l] * self.riemann[l][i][j][k]


def curvature_jets(metric: DiagonalMetric, x: Sequence, order: int = 2) -> CurvatureJets:
    return CurvatureJets(metric, x, order)


def curvature_at(metric: DiagonalMetric, x: Sequence) -> CurvatureBundle:
    cj = CurvatureJets(metric, x, 2)
    n = metric.n
    val = lambda j: j.value
    return CurvatureBundle(
        christoffel=[[[val(cj.gamma[l][i][j]) for j in range(n)] for i in range(n)] for l in range(n)],
        riemann=[[[[val(cj.riemann[l][i][j][k]) for k in range(n)] for j in range(n)]
                  for i in range(n)] for l in range(n)],
        ricci=[[val(cj.ricci[i][j]) for j in range(n)] for i in range(n)],
        scalar=cj.scalar.value,
        metric=[v.value for v in cj.g],
    )


def riemann_shortcut(cj: CurvatureJets) -> dict:
    """Lowered Riemann components from the textbook orthogonal-metric formulas.

    Returns {(l, i, j, k): value} for the two independent families
    R_{ij,ij} (i != j) and R_{ij,ik} (i, j, k distinct); all other components
    follow by the Riemann symmetries or vanish.
    """
    n = cj.n
    g = [Q(v.value) for v in cj.g]
    d1 = [[cj.g[i].partial(_unit(n, k)) for i in range(n)] for k in range(n)]  # d1[k][i] = d_k g_i

    def d2(i, j, k):
        m = [0] * n
        m[j] += 1
        m[k] += 1
        return cj.g[i].partial(m)

    out = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v = -(d2(j, i, i) + d2(i, j, j)) * Q(1, 2)
            v += (d1[i][i] * d1[i][j] + d1[j][i] ** 2) / (4 * g[i])
            v += (d1[j][j] * d1[j][i] + d1[i][j] ** 2) / (4 * g[j])
            for k in range(n):
                if k not in (i, j):
                    v -= d1[k][i] * d1[k][j] / (4 * g[k])
            out[(i, j, i, j)] = v
            for k in range(n):
                if k in (i, j):
                    continue
                w = (d2(i, j, k) * Q(1, 2) - d1[j][i] * d1[k][i] / (4 * g[i])
                     - d1[j][i] * d1[k][j] / (4 * g[j]) - d1[k][i] * d1[j][k] / (4 * g[k]))
                out[(i, j, i, k)] = -w
    return out


def _unit(n, k):
    e = [0] * n
    e[k] = 1
    return e


def full_riemann_from_shortcut(cj: CurvatureJets) -> dict:
    """Expand the shortcut families into every lowered component by symmetry."""
    base = riemann_shortcut(cj)
    out = {}
    for (a, b, c, d), v in base.items():
        for (p, q, r, s), sg in (((a, b, c, d), 1), ((b, a, c, d), -1), ((a, b, d, c), -1),
                                 ((b, a, d, c), 1), ((c, d, a, b), 1), ((d, c, a, b), -1),
                                 ((c, d, b, a), -1), ((d, c, b, a), 1)):
            out[(p, q, r, s)] = sg * v
    return out


# ---------------------------------------------------------------------------
# closed forms

def ricci_closed_form(system, a, x) -> tuple:
    """(diagonal Ricci list, scalar curvature) from the closed-form statements."""
    system = System.parse(system)
    a = as_axes(a)
    n = a.n
    x = [Q(v) for v in x]
    g = stackel_metric_fn(system, a)(x)
    if system is System.NEUMANN:
        return [(n - 1) * gi for gi in g], Q(n * (n - 1))
    s1x, s1a = sum(x), sum(a.a)
    if system is System.DUAL_MOSER:
        ric = [((n - 2) * x[i] + n * s1x - (n - 1) * s1a) * g[i] for i in range(n)]
        return ric, (n - 1) * ((n + 2) * s1x - n * s1a)
    sa = sigma(a.a, n + 1)
    sn = sigma(x, n)
    ric = []
    for i in range(n):
        si = elementary_symmetric([v for j, v in enumerate(x) if j != i])
        s_im = si[n - 2] if n >= 2 else 0
        ric.append(sa / sn ** 2 * s_im * g[i])
    return ric, 2 * sa / sn ** 2 * sigma(x, n - 2)


def dual_moser_sectional(a, x) -> dict:
    """R_{ik,ik} = (x^i + x^k + sigma_1(x) - sum a) g_i g_k for the dual Moser metric."""
    a = as_axes(a)
    x = [Q(v) for v in x]
    g = stackel_metric_fn(System.DUAL_MOSER, a)(x)
    s1x, s1a = sum(x), sum(a.a)
    return {(i, k): (x[i] + x[k] + s1x - s1a) * g[i] * g[k]
            for i in range(a.n) for k in range(a.n) if i != k}


def _points(a, sample_points, count=20, seed=0):
    if sample_points is None:
        return sample_chart_points(a, count, seed)
    for x in sample_points:
        check_chart(a, x)
    return list(sample_points)


def verify_ricci_closed_forms(system, a, sample_points=None, seed: int = 0) -> VerificationReport:
    system = System.parse(system)
    a = as_axes(a)
    n = a.n
    pts = _points(a, sample_points, seed=seed)
    rep = VerificationReport(f"ricci[{system.value}, n={n}]", f"{system.value}:Ricci and scalar curvature")
    rep.info["points"] = len(pts)
    rep.info["seed"] = seed
    metric = DiagonalMetric.for_system(system, a)
    ok_diag = ok_off = ok_R = ok_trace = ok_sect = True
    first_bad = None
    for x in pts:
        cb = curvature_at(metric, x)
        ric, R = ricci_closed_form(system, a, x)
        for i in range(n):
            if cb.ricci[i][i] != ric[i]:
                ok_diag = False
                first_bad = first_bad or {"x": list(x), "i": i, "jets": cb.ricci[i][i], "closed": ric[i]}
            for j in range(n):
                if i != j and cb.ricci[i][j] != 0:
                    ok_off = False
        ok_R &= cb.scalar == R
        ok_trace &= cb.scalar == sum((cb.ricci[i][i] / cb.metric[i] for i in range(n)), Q(0))
        if system is System.DUAL_MOSER:
            for (i, k), v in dual_moser_sectional(a, x).items():
                ok_sect &= cb.lowered(i, k, i, k) == v
    rep.add("diagonal Ricci equals closed form", ok_diag, first_bad)
    rep.add("off-diagonal Ricci vanishes", ok_off)
    rep.add("scalar curvature equals closed form", ok_R)
    rep.add("R = g^ij R_ij", ok_trace)
    if system is System.DUAL_MOSER:
        rep.add("R_{ik,ik} closed form", ok_sect)
    return rep


def robertson_check(system, a, sample_points=None, seed: int = 0, metric: DiagonalMetric = None,
                    expected: bool = True) -> VerificationReport:
    """Robertson condition: R_ij = 0 for i != j in the separating chart."""
    a = as_axes(a)
    pts = _points(a, sample_points, seed=seed)
    if metric is None:
        metric = DiagonalMetric.for_system(system, a)
    rep = VerificationReport(f"robertson[{metric.name}, n={a.n}]", "Robertson condition", expected=expected)
    bad = []
    for idx, x in enumerate(pts):
        cb = curvature_at(metric, x)
        for i in range(a.n):
            for j in range(i + 1, a.n):
                if cb.ricci[i][j] != 0:
                    bad.append({"point": idx, "i": i, "j": j, "R_ij": cb.ricci[i][j]})
    rep.add(f"R_ij = 0 (i != j) at {len(pts)} points", not bad, bad[:3])
    return rep


# ---------------------------------------------------------------------------
# conformal flatness

def weyl_tensor(cj: CurvatureJets) -> dict:
    """Nonzero lowered Weyl components (values at the base point)."""
    n = cj.n
    if n < 3:
        raise ValueError("conformal test undefined")
    g = [v.value for v in cj.g]
    Ric = [[cj.ricci[i][j].value for j in range(n)] for i in range(n)]
    R = cj.scalar.value

    def gm(i, j):
        return g[i] if i == j else 0

    out = {}
    for a_, b, c, d in itertools.product(range(n), repeat=4):
        v = cj.lowered(a_, b, c, d).value
        v -= (gm(a_, c) * Ric[b][d] - gm(a_, d) * Ric[b][c]
              + gm(b, d) * Ric[a_][c] - gm(b, c) * Ric[a_][d]) / Q(n - 2)
        v += R * (gm(a_, c) * gm(b, d) - gm(a_, d) * gm(b, c)) / Q((n - 1) * (n - 2))
        if v != 0:
            out[(a_, b, c, d)] = v
    return out


def cotton_tensor(metric: DiagonalMetric, x) -> dict:
    """Nonzero Cotton components C_ijk = nabla_k P_ij - nabla_j P_ik (Schouten P)."""
    n = metric.n
    if n < 3:
        raise ValueError("conformal test undefined")
    cj = CurvatureJets(metric, x, 3)
    g1 = [v.truncate(1) for v in cj.g]
    R = cj.scalar
    P = [[(cj.ricci[i][j] - (R * g1[i] * Q(1, 2 * (n - 1)) if i == j else 0)) * Q(1, n - 2)
          for j in range(n)] for i in range(n)]
    G = [[[cj.gamma[l][i][j].value for j in range(n)] for i in range(n)] for l in range(n)]

    def nabla(k, i, j):
        v = P[i][j].gradient()[k]
        for s in range(n):
            v -= G[s][k][i] * P[s][j].value + G[s][k][j] * P[i][s].value
        return v

    out = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        v = nabla(k, i, j) - nabla(j, i, k)
        if v != 0:
            out[(i, j, k)] = v
    return out


def conformal_flatness_check(system, a, sample_points=None, seed: int = 0,
                             metric: DiagonalMetric = None, expected: Optional[bool] = None) -> VerificationReport:
    a = as_axes(a)
    n = a.n
    if n < 3:
        raise ValueError("conformal test undefined")
    if metric is None:
        metric = DiagonalMetric.for_system(system, a)
    if expected is None:
        expected = metric.system is not System.JACOBI_MOSER
    pts = _points(a, sample_points, count=5 if n >= 4 else 10, seed=seed)
    kind = "Weyl" if n >= 4 else "Cotton-York"
    rep = VerificationReport(f"conformal-flatness[{metric.name}, n={n}]", f"{kind} tensor vanishes",
                             expected=expected)
    rep.info["tensor"] = kind
    bad = []
    for idx, x in enumerate(pts):
        comps = weyl_tensor(CurvatureJets(metric, x, 2)) if n >= 4 else cotton_tensor(metric, x)
        if comps:
            k, v = next(iter(comps.items()))
            bad.append({"point": idx, "component": list(k), "value": v, "nonzero": len(comps)})
    rep.add(f"{kind} = 0 at {len(pts)} points", not bad, bad[:3])
    return rep


# ---------------------------------------------------------------------------
# internal consistency

def consistency_report(metric: DiagonalMetric, x) -> VerificationReport:
    """Two-route Christoffel and Riemann, compatibility, symmetries, Bianchi."""
    n = metric.n
    cj = CurvatureJets(metric, x, 2)
    rep = VerificationReport(f"curvature-consistency[{metric.name}, n={n}]", "curvature conventions")
    sc = cj.christoffel_shortcut()
    rep.add("Christoffel: general = diagonal shortcut",
            all(sc[l][i][j] == cj.gamma[l][i][j] for l, i, j in itertools.product(range(n), repeat=3)))
    # nabla_k g_ij = d_k g_ij - G^s_{ki} g_sj - G^s_{kj} g_is, at order 1
    compat = True
    for k, i, j in itertools.product(range(n), repeat=3):
        v = (cj.dg[k][i] if i == j else _zero(cj.x, 1)) - cj.gamma[j][k][i] * cj.g[j] - cj.gamma[i][k][j] * cj.g[i]
        compat &= v.is_zero()
    rep.add("metric compatibility (order-1 jet of nabla g)", compat)
    full = full_riemann_from_shortcut(cj)
    rep.add("Riemann: Christoffel route = orthogonal-metric formulas",
            all(cj.lowered(*idx).value == full.get(idx, 0) for idx in itertools.product(range(n), repeat=4)))
    rep.add("first Bianchi identity",
            all((cj.riemann[l][i][j][k] + cj.riemann[l][j][k][i] + cj.riemann[l][k][i][j]).is_zero()
                for l, i, j, k in itertools.product(range(n), repeat=4)))
    rep.add("pair symmetry R_lijk = R_jkli",
            all(cj.lowered(l, i, j, k).value == cj.lowered(j, k, l, i).value
                for l, i, j, k in itertools.product(range(n), repeat=4)))
    rep.add("Ricci symmetric", all(cj.ricci[i][j].value == cj.ricci[j][i].value
                                   for i in range(n) for j in range(n)))
    return rep
