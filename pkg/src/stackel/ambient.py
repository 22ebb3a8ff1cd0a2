"""Ambient observables on T*R^{n+1} for the three systems and their bracket identities."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import NotApplicableError
from .exact import (ConstrainedPoint, PhasePoly, Q, constraint_polys, poisson_bracket,
                    sample_constrained_points, sum_polys)
from .report import VerificationReport, poly_witness
from .systems import SemiAxes, System, as_axes

# Orientation of the reference formulas relative to our bracket
# {P,Q} = sum(dP/dq dQ/dp - dP/dp dQ/dq): reference single-bracket identities
# hold after multiplying their right-hand sides by this sign.  It is
# re-derived from {Z1, Z2} by :func:`bracket_orientation`.
REFERENCE_ORIENTATION = -1


@dataclass
class IntegralFamily:
    system: System
    a: SemiAxes
    F: Tuple[PhasePoly, ...]
    H: PhasePoly
    parts: Dict[str, object] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def n(self) -> int:
        return self.a.n

    def with_F(self, alpha: int, poly: PhasePoly) -> "IntegralFamily":
        F = list(self.F)
        F[alpha] = poly
        return IntegralFamily(self.system, self.a, tuple(F), self.H, {})


def _qp(m):
    return ([PhasePoly.q(m, a) for a in range(m)], [PhasePoly.p(m, a) for a in range(m)])


def build_dual_moser(a) -> IntegralFamily:
    a = as_axes(a)
    m = len(a)
    q, p = _qp(m)
    J = sum_polys((a[b] * p[b] ** 2 for b in range(m)), m)
    Bq = sum_polys((q[b] ** 2 / a[b] for b in range(m)), m)
    M = {}
    for al in range(m):
        for be in range(m):
            if al != be:
                M[al, be] = a[al] * p[al] * q[be] - a[be] * p[be] * q[al]
    A_parts = [q[al] ** 2 * J for al in range(m)]
    B_parts = [sum_polys((M[al, be] ** 2 / (a[al] - a[be]) for be in range(m) if be != al), m)
               for al in range(m)]
    F = tuple(A_parts[al] + B_parts[al] for al in range(m))
    H = Bq * sum_polys((p[b] ** 2 for b in range(m)), m) / 2
    return IntegralFamily(System.DUAL_MOSER, a, F, H,
                          {"J": J, "B": Bq, "M": M, "A_parts": A_parts, "B_parts": B_parts})


def build_jacobi_moser(a) -> IntegralFamily:
    a = as_axes(a)
    m = len(a)
    q, p = _qp(m)
    F = []
    for al in range(m):
        f = p[al] ** 2 / a[al]
        for be in range(m):
            if be != al:
                num = (p[al] * a[be] * q[be] - p[be] * a[al] * q[al]) ** 2
                f = f + num / (a[al] * a[be] * (a[al] - a[be]))
        F.append(f)
    H = sum_polys((p[b] ** 2 / a[b] for b in range(m)), m) / 2
    return IntegralFamily(System.JACOBI_MOSER, a, tuple(F), H)


def moser_canonical_form(a) -> Tuple[PhasePoly, ...]:
    """F_a = P_a^2 + sum (P_a Q_b - P_b Q_a)^2/(a_a - a_b) in the same variable slots."""
    a = as_axes(a)
    m = len(a)
    Qv, P = _qp(m)
    out = []
    for al in range(m):
        f = P[al] ** 2
        for be in range(m):
            if be != al:
                f = f + (P[al] * Qv[be] - P[be] * Qv[al]) ** 2 / (a[al] - a[be])
        out.append(f)
    return tuple(out)


def rational_sqrt(x):
    from gmpy2 import is_square, isqrt
    x = Q(x)
    if x < 0 or not (is_square(x.numerator) and is_square(x.denominator)):
        raise ValueError(f"{x} is not a rational square")
    return Q(int(isqrt(x.numerator)), int(isqrt(x.denominator)))


def jacobi_moser_in_moser_variables(a) -> Tuple[PhasePoly, ...]:
    """Jacobi-Moser integrals after p_a = sqrt(a_a) P_a, q_a = Q_a / sqrt(a_a).

    Needs perfect-square semi-axes so the substitution stays rational.
    """
    a = as_axes(a)
    s = [rational_sqrt(x) for x in a]
    fam = build_jacobi_moser(a)
    return tuple(f.scale_variables([1 / x for x in s], s) for f in fam.F)


def build_neumann(a) -> IntegralFamily:
    a = as_axes(a)
    m = len(a)
    q, p = _qp(m)
    F = []
    for al in range(m):
        f = q[al] ** 2
        for be in range(m):
            if be != al:
                f = f + (p[al] * q[be] - p[be] * q[al]) ** 2 / (a[al] - a[be])
        F.append(f)
    H = sum_polys((p[b] ** 2 + a[b] * q[b] ** 2 for b in range(m)), m) / 2
    return IntegralFamily(System.NEUMANN, a, tuple(F), H)


BUILDERS = {
    System.DUAL_MOSER: build_dual_moser,
    System.JACOBI_MOSER: build_jacobi_moser,
    System.NEUMANN: build_neumann,
}


def build_family(system, a) -> IntegralFamily:
    return BUILDERS[System.parse(system)](a)


def mutate(fam: IntegralFamily, alpha: int = 0, term: int = 0, delta=1) -> IntegralFamily:
    """Copy of ``fam`` with one coefficient of F_alpha shifted by ``delta``."""
    f = fam.F[alpha]
    keys = sorted(f.terms)
    k = keys[term % len(keys)]
    terms = dict(f.terms)
    terms[k] = terms[k] + Q(delta)
    return fam.with_F(alpha, PhasePoly(f.m, terms))


# ---------------------------------------------------------------------------
# helpers

def sums_pq(m):
    q, p = _qp(m)
    pq = sum_polys((p[b] * q[b] for b in range(m)), m)
    p2 = sum_polys((p[b] ** 2 for b in range(m)), m)
    q2 = sum_polys((q[b] ** 2 for b in range(m)), m)
    return q, p, pq, p2, q2


def bracket_orientation(m: int) -> int:
    """Sign s with {Z1,Z2} = s * (-2 sum q^2)."""
    z1, z2 = constraint_polys(m)
    q2 = sum_polys((PhasePoly.q(m, b) ** 2 for b in range(m)), m)
    ref = q2 * -2
    br = poisson_bracket(z1, z2)
    if br == ref:
        return 1
    if br == -ref:
        return -1
    raise AssertionError("unexpected {Z1,Z2}")


def _identity(report: VerificationReport, name: str, lhs: PhasePoly, rhs: PhasePoly) -> bool:
    diff = lhs - rhs
    return report.add(name, diff.is_zero(), poly_witness(diff))


def vanishes_on_samples(poly: PhasePoly, points: Sequence[ConstrainedPoint]):
    """Exact evaluation at constrained points; returns (ok, first nonzero value)."""
    for pt in points:
        v = poly.evaluate(pt.q, pt.p)
        if v != 0:
            return False, v
    return True, None


# ---------------------------------------------------------------------------
# verifications

def verify_involution(fam: IntegralFamily, sign: int | None = None) -> VerificationReport:
    """Pairwise {F_a, F_b} and, for dual Moser, the structural A/B brackets."""
    m = fam.m
    s = bracket_orientation(m) if sign is None else sign
    rep = VerificationReport(f"involution[{fam.system.value}, n={fam.n}]",
                             f"involution:{fam.system.value}")
    rep.info["bracket_orientation"] = s
    for al in range(m):
        for be in range(al + 1, m):
            br = poisson_bracket(fam.F[al], fam.F[be])
            rep.add(f"{{F{al},F{be}}}=0", br.is_zero(), poly_witness(br))
    if fam.system is System.DUAL_MOSER and fam.parts:
        J, M = fam.parts["J"], fam.parts["M"]
        A, B = fam.parts["A_parts"], fam.parts["B_parts"]
        q, p = _qp(m)
        a = fam.a
        for al in range(m):
            for be in range(m):
                if al == be:
                    continue
                qq = q[al] * q[be] * M[al, be]
                _identity(rep, f"{{A{al},A{be}}}", poisson_bracket(A[al], A[be]),
                          J * qq * (-4 * s))
                _identity(rep, f"{{A{al},B{be}}}", poisson_bracket(A[al], B[be]),
                          J * qq * (4 * s * a[al] / (a[al] - a[be])))
                _identity(rep, f"{{B{al},B{be}}}", poisson_bracket(B[al], B[be]), PhasePoly(m))
    return rep


def verify_h_bracket(fam: IntegralFamily, samples: int = 20, seed: int = 0,
                     sign: int | None = None) -> VerificationReport:
    """Unconstrained {H, F_a} formula for dual Moser plus the three sum relations."""
    if fam.system is not System.DUAL_MOSER:
        raise NotApplicableError()
    m = fam.m
    a = fam.a
    s = bracket_orientation(m) if sign is None else sign
    q, p, pq, p2, q2 = sums_pq(m)
    Bq = fam.parts["B"]
    rep = VerificationReport(f"hamiltonian-bracket[dual-moser, n={fam.n}]",
                             "dual-moser:{H,F} and sum relations")
    rep.info["bracket_orientation"] = s
    points = sample_constrained_points(seed, fam.n, samples)
    J = fam.parts["J"]
    H = fam.H
    unoriented = True
    for al in range(m):
        br = poisson_bracket(fam.H, fam.F[al])
        rhs = (Bq * a[al] * p[al] ** 2 - q[al] ** 2 * p2) * pq * 2
        _identity(rep, f"{{H,F{al}}}", br, rhs * s)
        unoriented = unoriented and (br - rhs).is_zero()
        ok, w = vanishes_on_samples(br, points)
        rep.add(f"{{H,F{al}}}=0 on T*S^n", ok, w)
        # the two halves of the proof
        hA = J * Bq * q[al] * p[al] * 2 - q[al] ** 2 * p2 * pq * 2
        hB = J * Bq * q[al] * p[al] * -2 + Bq * a[al] * p[al] ** 2 * pq * 2
        _identity(rep, f"{{H,A{al}}}", poisson_bracket(H, fam.parts["A_parts"][al]), hA * s)
        _identity(rep, f"{{H,B{al}}}", poisson_bracket(H, fam.parts["B_parts"][al]), hB * s)
    rep.info["h_bracket_holds_unoriented"] = unoriented
    _identity(rep, "sum F = |q|^2 sum a p^2", sum_polys(fam.F, m), q2 * J)
    _identity(rep, "sum F/a = (p.q)^2",
              sum_polys((fam.F[b] / a[b] for b in range(m)), m), pq ** 2)
    pqa = sum_polys((p[b] * q[b] / a[b] for b in range(m)), m)
    _identity(rep, "sum F/a^2 = -2H + 2(p.q)(sum pq/a)",
              sum_polys((fam.F[b] / a[b] ** 2 for b in range(m)), m), H * -2 + pq * pqa * 2)
    return rep


def verify_conservation(fam: IntegralFamily, samples: int = 20, seed: int = 0) -> VerificationReport:
    """{H, F_a}: exact polynomial zero where it holds, else zero on T*S^n samples."""
    m = fam.m
    rep = VerificationReport(f"conservation[{fam.system.value}, n={fam.n}]",
                             f"conservation:{fam.system.value}")
    points = sample_constrained_points(seed, fam.n, samples)
    unconstrained = []
    for al in range(m):
        br = poisson_bracket(fam.H, fam.F[al])
        unconstrained.append(br.is_zero())
        ok, w = vanishes_on_samples(br, points)
        rep.add(f"{{H,F{al}}}=0 on T*S^n", ok, w)
    rep.info["unconstrained_zero"] = unconstrained
    if fam.system is System.NEUMANN:
        # the F_a commute exactly with sum a_a F_a / 2, which equals H on T*S^n
        Ht = sum_polys((fam.F[b] * fam.a[b] for b in range(m)), m) / 2
        for al in range(m):
            br = poisson_bracket(Ht, fam.F[al])
            rep.add(f"{{sum aF/2, F{al}}}=0", br.is_zero(), poly_witness(br))
        vals = {(Ht - fam.H).evaluate(pt.q, pt.p) for pt in points}
        rep.add("sum aF/2 - H constant on T*S^n", len(vals) == 1, sorted(vals)[:3])
    if fam.system is System.JACOBI_MOSER:
        _identity(rep, "sum F = 2H", sum_polys(fam.F, m), fam.H * 2)
    return rep


def dirac_verify(fam: IntegralFamily, samples: int = 20, seed: int = 0,
                 sign: int | None = None) -> VerificationReport:
    """Dirac-bracket correction term for the constraints Z1, Z2.

    Jacobi-Moser momenta p = a v satisfy sum p q / a = 0 rather than Z2 = 0, so
    that family is rejected.
    """
    if fam.system is System.JACOBI_MOSER:
        raise NotApplicableError("Z2 = p.q is not the Jacobi-Moser constraint")
    m = fam.m
    a = fam.a
    s = bracket_orientation(m) if sign is None else sign
    z1, z2 = constraint_polys(m)
    q, p = _qp(m)
    rep = VerificationReport(f"dirac[{fam.system.value}, n={fam.n}]",
                             f"dirac:{fam.system.value}")
    rep.info["bracket_orientation"] = s
    points = sample_constrained_points(seed, fam.n, samples)
    z12 = poisson_bracket(z1, z2)
    vals = {z12.evaluate(pt.q, pt.p) for pt in points}
    rep.add("{Z1,Z2} = -2s on T*S^n", vals == {Q(-2 * s)}, sorted(vals))
    b1 = [poisson_bracket(z1, f) for f in fam.F]
    b2 = [poisson_bracket(z2, f) for f in fam.F]
    rep.info["Z2_bracket_terms"] = [len(b) for b in b2]
    if fam.system is System.DUAL_MOSER:
        for al in range(m):
            rep.add(f"{{Z2,F{al}}}=0", b2[al].is_zero(), poly_witness(b2[al]))
            _identity(rep, f"{{Z1,F{al}}}", b1[al],
                      a[al] * p[al] * q[al] * (z1 + 1) * (-4 * s))
    for al in range(m):
        for be in range(al + 1, m):
            corr = b1[al] * b2[be] - b1[be] * b2[al]
            if corr.is_zero():
                rep.add(f"correction({al},{be}) = 0", True, poly_witness(corr))
            else:
                ok, w = vanishes_on_samples(corr, points)
                rep.add(f"correction({al},{be}) = 0 on T*S^n", ok, w)
            br = poisson_bracket(fam.F[al], fam.F[be])
            ok, w = vanishes_on_samples(br, points)
            rep.add(f"{{F{al},F{be}}}|T*S^n = 0", ok, w)
    return rep
