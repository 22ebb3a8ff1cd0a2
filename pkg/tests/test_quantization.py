import random

import pytest
from hypothesis import given, strategies as st

from stackel import quantization as qz
from stackel.curvature import DiagonalMetric
from stackel.ellipsoidal import sample_chart_points
from stackel.errors import OrderError
from stackel.exact import Q
from stackel.jets import poly_jet
from stackel.systems import ALL_SYSTEMS, SemiAxes

A3 = SemiAxes((1, 2, 4, 7))


@pytest.mark.parametrize("n", range(3, 9))
def test_coefficients_closed_form(n):
    c = qz.coefficients(n)
    assert c.c1 == Q(n ** 2, 8 * (n + 1) * (n + 2))
    assert c.c2 == Q(n ** 2, 4 * (n + 1) * (n - 2))
    assert c.c3 == Q(-n ** 2, 2 * (n ** 2 - 1) * (n ** 2 - 4))


@given(st.integers(3, 200))
def test_derived_coefficients_vanish(n):
    c = qz.coefficients(n)
    assert c.c4 == 0 and c.c5 == 0 and c.c6 == 0


def test_coefficients_undefined_below_three():
    with pytest.raises(ValueError):
        qz.coefficients(2)


def _flat_quantizer():
    return qz.PointQuantizer(DiagonalMetric.euclidean(3), (Q(1, 2), Q(1, 3), Q(2)))


@given(st.integers(0, 2 ** 31))
def test_carter_of_identity_is_minus_laplacian_on_flat_space(s):
    pq = _flat_quantizer()
    u = qz.random_quartic(random.Random(s), pq.x)
    op = pq.carter(pq.symbol(lambda xs: [Q(1)] * 3))
    lap = sum((u.deriv(i).deriv(i) for i in range(3)), u.deriv(0).deriv(0) * 0)
    assert op.apply(u) == -lap.truncate(op.apply(u).order)


def test_laplacian_of_constant_vanishes_on_sphere():
    x = sample_chart_points(A3, 1, 0)[0]
    pq = qz.PointQuantizer(DiagonalMetric.for_system("neumann", A3), x)
    one = poly_jet({(0, 0, 0): Q(1)}, pq.x, 4)
    assert pq.laplacian(one).is_zero()


@given(st.integers(0, 2 ** 31))
def test_commutator_is_antisymmetric_and_self_zero(s):
    rng = random.Random(s)
    x = sample_chart_points(A3, 1, s)[0]
    metric = DiagonalMetric.for_system("dual-moser", A3)
    pq = qz.PointQuantizer(metric, x)
    P1 = pq.conformal(pq.symbol(qz.killing_diag_fn("dual-moser", 1, metric.coeffs)))
    P2 = pq.conformal(pq.symbol(qz.killing_diag_fn("dual-moser", 2, metric.coeffs)))
    u = qz.random_quartic(rng, pq.x)
    assert qz.commutator_apply(P1, P1, u).is_zero()
    assert qz.commutator_apply(P1, P2, u) == -qz.commutator_apply(P2, P1, u)


def test_short_test_jet_rejected():
    pq = _flat_quantizer()
    op = pq.carter(pq.symbol(lambda xs: [Q(1)] * 3))
    u = poly_jet({(1, 1, 0): Q(1)}, pq.x, 3)
    with pytest.raises(OrderError):
        qz.commutator_apply(op, op, u)


def test_neumann_scalar_term_value():
    x = sample_chart_points(A3, 1, 5)[0]
    assert qz.scalar_term("neumann", A3, 1, x) == Q(27, 20)


def test_scalar_terms_against_closed_forms():
    assert qz.scalar_term_report("neumann", A3, 2, 1).verdict
    assert qz.scalar_term_report("jacobi-moser", A3, 2, 1).verdict
    assert qz.scalar_term_report("dual-moser", A3, 2, 1, variant="derived").verdict
    assert not qz.scalar_term_report("dual-moser", A3, 2, 1).verdict


def test_dual_moser_first_scalar_term_is_affine():
    # f(I_1) = (c2 + n c3) R with R affine in x, so second differences vanish
    a = A3
    x0 = sample_chart_points(a, 1, 7)[0]
    h = Q(1, 1000)
    vals = []
    for t in (0, 1, 2):
        x = (x0[0] + t * h, x0[1], x0[2])
        vals.append(qz.scalar_term("dual-moser", a, 1, x))
    assert vals[0] - 2 * vals[1] + vals[2] == 0


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_verdict_table(system):
    rep = qz.quantum_verdict(system, A3, 2, 2, 0)
    assert rep.verdict
    want = "FAIL" if system == "jacobi-moser" else "PASS"
    assert rep.info["verdicts"] == {"carter": "PASS", "conformal": want}
    assert rep.info["iQ(V) nonzero"] is (system == "jacobi-moser")


def test_jacobi_moser_v_term():
    assert qz.jacobi_moser_v_report(A3, 2, 0).verdict


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_b_tensor_and_injection(system):
    assert qz.b_tensor_report(system, A3, 1, 0).verdict
    ctrl = qz.b_tensor_report(system, A3, 1, 0, injection=True)
    assert not ctrl.verdict and ctrl.as_expected


def test_injected_ricci_gives_antisymmetric_nonzero_b():
    metric = DiagonalMetric.for_system("dual-moser", A3)
    x = sample_chart_points(A3, 1, 0)[0]
    inj = [[Q(0)] * 3 for _ in range(3)]
    inj[0][1] = inj[1][0] = Q(1)
    res = qz.b_tensor(metric, qz.killing_diag_fn("dual-moser", 1, metric.coeffs),
                      qz.killing_diag_fn("dual-moser", 2, metric.coeffs), x, inj)
    assert not qz.is_zero_matrix(res["stackel"])
    assert qz.is_antisymmetric(res["stackel"])


@pytest.mark.parametrize("system", ALL_SYSTEMS)
def test_representation_invariance(system):
    assert qz.representation_report(system, A3, 1, 1).verdict
