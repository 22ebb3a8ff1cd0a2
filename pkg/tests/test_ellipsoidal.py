import random

import pytest
from hypothesis import given, strategies as st

from stackel import ellipsoidal as el
from stackel.errors import ChartError
from stackel.exact import Q
from stackel.systems import ALL_SYSTEMS, SemiAxes

A3 = SemiAxes((1, 2, 4, 7))
seeds = st.integers(0, 2 ** 31)


@given(seeds)
def test_ambient_point_lies_on_sphere(s):
    x = el.sample_chart_point(A3, random.Random(s))
    q2 = el.q_squared(A3, x)
    assert sum(q2) == 1
    assert all(v > 0 for v in q2)


@given(seeds)
def test_B_closed_form_matches_ambient_sum(s):
    x = el.sample_chart_point(A3, random.Random(s))
    q2 = el.q_squared(A3, x)
    assert el.B_of_x(A3, x) == sum(v / a for v, a in zip(q2, A3))


@pytest.mark.parametrize("system", ALL_SYSTEMS)
@given(s=seeds)
def test_staeckel_inverse(system, s):
    x = el.sample_chart_point(A3, random.Random(s))
    data = el.stackel_matrices(system, A3, x)
    assert data.AB_identity and data.BA_identity


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_B_column_depends_on_its_own_coordinate(system):
    rng = random.Random(5)
    x = el.sample_chart_point(A3, rng)
    y = el.sample_chart_point(A3, rng)
    for i in range(3):
        mixed = [x[j] if j == i else y[j] for j in range(3)]
        Bx = el.B_matrix(system, A3, x)
        Bm = el.B_matrix(system, A3, mixed)
        assert [row[i] for row in Bx] == [row[i] for row in Bm]


@given(seeds, st.integers(1, 3))
def test_residue_identity(s, i):
    x = el.sample_chart_point(A3, random.Random(s))
    assert el.residue_identity(x, i)


def test_chart_errors():
    with pytest.raises(ChartError):
        el.check_chart(A3, (Q(3, 2), Q(5, 2)))
    with pytest.raises(ChartError):
        el.check_chart(A3, (Q(3, 2), Q(5), Q(5)))
    with pytest.raises(ChartError):
        el.q_from_x(A3, (Q(1), Q(3), Q(5)))


def test_elementary_symmetric():
    assert el.elementary_symmetric([Q(1), Q(2), Q(3)]) == [1, 6, 11, 6]


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_certificate_and_separated_involution(system):
    assert el.stackel_certificate(system, A3, 20, 1).verdict
    pts = el.sample_cotangent_points(A3, 3, 2)
    assert el.involution_check(system, A3, pts).verdict


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_hamiltonian_identity_and_index_shift_control(system):
    assert el.hamiltonian_report(system, A3, 5, 3).verdict
    ctrl = el.hamiltonian_report(system, A3, 5, 3, sigma_shift=1)
    assert not ctrl.verdict and ctrl.as_expected


def test_dual_moser_pullback_and_normalization():
    assert el.pullback_report(A3, 20, 0).verdict
    pt = el.sample_cotangent_points(A3, 1, 9)[0]
    assert el.dual_moser_normalization(A3, pt) == {"table": True, "with_1/B": False}


def test_potentials_identity():
    pts = el.sample_cotangent_points(A3, 3, 4)
    rep = el.potentials_check(A3, pts[0], 2, 3, pts)
    assert rep.verdict, rep.failed()


@given(seeds)
def test_separated_integrals_commute_neumann_n2(s):
    a = SemiAxes((1, 3, 5))
    pts = el.sample_cotangent_points(a, 1, s)
    assert el.involution_check("neumann", a, pts).verdict
