import pytest
from hypothesis import given, strategies as st

from stackel.errors import PoleError
from stackel.exact import Q
from stackel.jets import MAX_ORDER, Jet, jet_lift, monomials, poly_jet, variables

small = st.integers(-9, 9).map(Q)
points = st.tuples(small.filter(lambda v: v != 1), small)


def test_monomial_count():
    # C(n + K, K) monomials of total degree <= K in n variables
    assert len(monomials(2, 4)) == 15
    assert len(monomials(3, 2)) == 10


def test_order_cap():
    with pytest.raises(ValueError):
        variables((Q(0),), MAX_ORDER + 1)


@given(points)
def test_geometric_series(base):
    # Taylor coefficients of 1/(1 - x) at x0 are 1/(1 - x0)^(k+1)
    j = jet_lift(lambda xs: 1 / (1 - xs[0]), base, 4)
    x0 = base[0]
    for k in range(5):
        assert j.coeff((k, 0)) == 1 / (1 - x0) ** (k + 1)


@given(points)
def test_polynomial_jet_matches_direct_taylor(base):
    x0, y0 = base
    j = poly_jet({(2, 1): Q(3), (0, 3): Q(-1), (1, 0): Q(5)}, base, 4)
    assert j.value == 3 * x0 ** 2 * y0 - y0 ** 3 + 5 * x0
    assert j.coeff((1, 0)) == 6 * x0 * y0 + 5
    assert j.coeff((0, 1)) == 3 * x0 ** 2 - 3 * y0 ** 2
    assert j.coeff((1, 1)) == 6 * x0
    assert j.coeff((2, 1)) == 3


@given(points)
def test_product_rule_through_deriv(base):
    x, y = variables(base, 4)
    f = x ** 2 + y
    g = x * y ** 3
    lhs = (f * g).deriv(0)
    rhs = f.deriv(0) * g.truncate(3) + f.truncate(3) * g.deriv(0)
    assert lhs == rhs


@given(points)
def test_reciprocal_inverts(base):
    x, y = variables(base, 3)
    f = 2 + x * x + y * y
    assert (f * f.reciprocal()) == Jet.constant(Q(1), f.base, 3)


def test_pole_raises():
    with pytest.raises(PoleError):
        jet_lift(lambda xs: 1 / xs[0], (Q(0), Q(1)), 2)


def test_mixed_partials_commute():
    x, y = variables((Q(1, 3), Q(2, 7)), 4)
    f = x ** 3 * y ** 2 / (1 + x * y)
    assert f.deriv(0).deriv(1) == f.deriv(1).deriv(0)
