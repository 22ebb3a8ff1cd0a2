import random

import pytest
from hypothesis import given, strategies as st

from stackel.ambient import (build_dual_moser, build_jacobi_moser, build_neumann, dirac_verify,
                             jacobi_moser_in_moser_variables, moser_canonical_form, mutate,
                             verify_conservation, verify_h_bracket, verify_involution)
from stackel.errors import CoincidentAxesError, NotApplicableError
from stackel.exact import PhasePoly, Q, poisson_bracket, sample_constrained_points, sum_polys
from stackel.systems import SemiAxes


def qp(m):
    return [PhasePoly.q(m, i) for i in range(m)], [PhasePoly.p(m, i) for i in range(m)]


@st.composite
def axes(draw, n):
    vals = draw(st.lists(st.fractions(min_value="1/9", max_value=20, max_denominator=9),
                         min_size=n + 1, max_size=n + 1, unique=True))
    return SemiAxes(sorted(vals))


def test_dual_moser_sum_relation_n1():
    fam = build_dual_moser((1, 2))
    q, p = qp(2)
    rhs = (q[0] ** 2 + q[1] ** 2) * (p[0] ** 2 + p[1] ** 2 * 2)
    assert fam.F[0] + fam.F[1] == rhs


@given(axes(2))
def test_dual_moser_weighted_sum_is_square(a):
    fam = build_dual_moser(a)
    q, p = qp(3)
    lhs = sum_polys((fam.F[b] / a[b] for b in range(3)), 3)
    assert lhs == (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]) ** 2


def test_coincident_axes_rejected():
    with pytest.raises(CoincidentAxesError):
        build_dual_moser((1, 1, 2))
    with pytest.raises(ValueError):
        SemiAxes((2, 1))


@given(axes(2))
def test_jacobi_moser_involution(a):
    fam = build_jacobi_moser(a)
    for i in range(3):
        for j in range(i + 1, 3):
            assert poisson_bracket(fam.F[i], fam.F[j]).is_zero()


def test_jacobi_moser_canonical_form_with_square_axes():
    a = (Q(1, 4), 1, 4, 9)
    assert jacobi_moser_in_moser_variables(a) == moser_canonical_form(a)


def test_jacobi_moser_sum_is_twice_energy_at_points():
    fam = build_jacobi_moser((1, 2))
    for pt in sample_constrained_points(3, 1, 10):
        total = sum(f.evaluate(pt.q, pt.p) for f in fam.F)
        assert total == sum(p * p / a for p, a in zip(pt.p, fam.a))


@given(axes(2))
def test_neumann_sum_is_radius(a):
    fam = build_neumann(a)
    q, _ = qp(3)
    assert sum_polys(fam.F, 3) == q[0] ** 2 + q[1] ** 2 + q[2] ** 2


def test_neumann_integrals_commute():
    fam = build_neumann((1, 2, 4))
    for i in range(3):
        for j in range(i + 1, 3):
            assert poisson_bracket(fam.F[i], fam.F[j]).is_zero()


def test_neumann_energy_bracket_only_vanishes_on_sphere():
    # {H, F_a} is proportional to the constraint, not identically zero
    fam = build_neumann((1, 2, 4))
    rep = verify_conservation(fam, 10, 0)
    assert rep.verdict
    assert not all(rep.info["unconstrained_zero"])


@pytest.mark.parametrize("n", [2, 3])
def test_dual_moser_structural_brackets(n):
    fam = build_dual_moser((1, 2, 4, 7)[: n + 1])
    rep = verify_involution(fam)
    assert rep.verdict, rep.failed()
    assert rep.info["bracket_orientation"] == -1


def test_h_bracket_and_dirac():
    fam = build_dual_moser((1, 2, 4))
    assert verify_h_bracket(fam, 8, 1).verdict
    assert dirac_verify(fam, 8, 1).verdict
    assert dirac_verify(build_neumann((1, 2, 4)), 8, 1).verdict
    with pytest.raises(NotApplicableError):
        dirac_verify(build_jacobi_moser((1, 2, 4)))
    with pytest.raises(NotApplicableError):
        verify_h_bracket(build_neumann((1, 2, 4)))


@given(st.integers(0, 2), st.integers(0, 50), st.integers(1, 5))
def test_mutations_break_involution(alpha, term, delta):
    fam = mutate(build_dual_moser((1, 2, 4)), alpha, term, delta)
    assert not verify_involution(fam).verdict


def test_orientation_override_breaks_structural_identities():
    rep = verify_involution(build_dual_moser((1, 2, 4)), sign=1)
    assert not rep.verdict
