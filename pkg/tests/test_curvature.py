import random

import pytest
from hypothesis import given, strategies as st

from stackel import curvature as cv
from stackel.ellipsoidal import sample_chart_point, sample_chart_points
from stackel.exact import Q
from stackel.systems import ALL_SYSTEMS, SemiAxes

A3 = SemiAxes((1, 2, 4, 7))
A2 = SemiAxes((1, 2, 4))
seeds = st.integers(0, 2 ** 31)


def test_flat_metrics_have_zero_curvature():
    for metric, x in ((cv.DiagonalMetric.euclidean(3), (Q(1), Q(2), Q(3))),
                      (cv.DiagonalMetric.polar(), (Q(3, 2), Q(1, 5)))):
        b = cv.curvature_at(metric, x)
        assert all(v == 0 for row in b.ricci for v in row)
        assert b.scalar == 0


def test_polar_christoffels():
    b = cv.curvature_at(cv.DiagonalMetric.polar(), (Q(2), Q(0)))
    # Gamma^r_{tt} = -r, Gamma^t_{rt} = 1/r
    assert b.christoffel[0][1][1] == -2
    assert b.christoffel[1][0][1] == Q(1, 2)


@given(seeds)
def test_neumann_metric_is_the_round_sphere(s):
    x = sample_chart_point(A3, random.Random(s))
    b = cv.curvature_at(cv.DiagonalMetric.for_system("neumann", A3), x)
    n = 3
    assert b.scalar == n * (n - 1)
    for i in range(n):
        for j in range(n):
            assert b.ricci[i][j] == ((n - 1) * b.metric[i] if i == j else 0)


@pytest.mark.parametrize("system", ALL_SYSTEMS)
@given(s=seeds)
def test_two_routes_and_symmetries(system, s):
    x = sample_chart_point(A3, random.Random(s))
    assert cv.consistency_report(cv.DiagonalMetric.for_system(system, A3), x).verdict


@pytest.mark.parametrize("system", ALL_SYSTEMS)
@pytest.mark.parametrize("a", [A3, SemiAxes((1, 2, 4, 7, 11))])
def test_ricci_closed_forms(system, a):
    rep = cv.verify_ricci_closed_forms(system, a, sample_chart_points(a, 3, 1))
    assert rep.verdict, rep.failed()


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_robertson_and_perturbation_control(system):
    pts = sample_chart_points(A3, 3, 2)
    assert cv.robertson_check(system, A3, pts).verdict
    bad = cv.DiagonalMetric.for_system(system, A3).perturbed(1)
    ctrl = cv.robertson_check(system, A3, pts, metric=bad, expected=False)
    assert not ctrl.verdict and ctrl.as_expected


def test_perturbation_is_invisible_in_two_dimensions():
    # every 2D metric has Ricci proportional to g, so the control cannot fire
    pts = sample_chart_points(A2, 3, 2)
    bad = cv.DiagonalMetric.for_system("dual-moser", A2).perturbed(1)
    assert cv.robertson_check("dual-moser", A2, pts, metric=bad).verdict


@pytest.mark.parametrize("system,flat", [("dual-moser", True), ("neumann", True), ("jacobi-moser", False)])
def test_conformal_flatness_n3(system, flat):
    rep = cv.conformal_flatness_check(system, A3, sample_chart_points(A3, 2, 3))
    assert rep.verdict is flat
    assert rep.as_expected


def test_weyl_vanishes_for_dual_moser_n4():
    a = SemiAxes((1, 2, 4, 7, 11))
    rep = cv.conformal_flatness_check("dual-moser", a, sample_chart_points(a, 1, 3))
    assert rep.verdict


def test_conformal_check_undefined_in_dimension_two():
    with pytest.raises(ValueError):
        cv.conformal_flatness_check("dual-moser", A2)


def test_g2_metric_is_conformally_flat():
    metric = cv.DiagonalMetric.conformally_flat_sphere(A3)
    x = sample_chart_points(A3, 1, 4)[0]
    assert all(v == 0 for v in cv.cotton_tensor(metric, x).values())
