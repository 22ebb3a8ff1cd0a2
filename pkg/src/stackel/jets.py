"""Truncated multivariate Taylor expansions with exact coefficients.

A ``Jet`` of order K at base point b stores the coefficients c_m of
sum_m c_m (x - b)^m over multi-indices |m| <= K.  Arithmetic is closed under
+, -, *, / (division needs a nonzero value at the base point), so any rational
expression written with ordinary operators can be lifted by evaluating it on
the coordinate jets returned by :func:`variables`.
"""
from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Callable, List, Sequence, Tuple

from .errors import PoleError
from .exact import BigRational, GaussianRational, Q

MAX_ORDER = 4

_SCALARS = (int, BigRational, GaussianRational)


@lru_cache(maxsize=None)
def monomials(n: int, order: int) -> Tuple[Tuple[int, ...], ...]:
    """Multi-indices of total degree <= order, graded (degree 0 first)."""
    out = []

    def rec(prefix, left):
        if len(prefix) == n:
            if left == 0:
                out.append(tuple(prefix))
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e)

    for d in range(order + 1):
        rec([], d)
    return tuple(out)


@lru_cache(maxsize=None)
def _index(n: int, order: int):
    return {m: i for i, m in enumerate(monomials(n, order))}


@lru_cache(maxsize=None)
def _mul_table(n: int, order: int):
    mons = monomials(n, order)
    idx = _index(n, order)
    table = []
    for i, a in enumerate(mons):
        da = sum(a)
        for j, b in enumerate(mons):
            if da + sum(b) <= order:
                table.append((i, j, idx[tuple(x + y for x, y in zip(a, b))]))
    return tuple(table)


@lru_cache(maxsize=None)
def _deriv_table(n: int, order: int, var: int):
    """(source index in order-K table, factor) for each monomial of order K-1."""
    src = _index(n, order)
    out = []
    for m in monomials(n, order - 1):
        mm = list(m)
        mm[var] += 1
        out.append((src[tuple(mm)], mm[var]))
    return tuple(out)


@lru_cache(maxsize=None)
def _size(n: int, order: int) -> int:
    return len(monomials(n, order))


class Jet:
    __slots__ = ("n", "order", "base", "c")

    def __init__(self, n: int, order: int, base: Sequence, coeffs: List):
        if order < 0:
            raise ValueError("negative jet order")
        if order > MAX_ORDER:
            raise ValueError(f"jet order {order} exceeds maximum {MAX_ORDER}")
        self.n = n
        self.order = order
        self.base = base
        self.c = coeffs

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, base: Sequence, order: int) -> "Jet":
        n = len(base)
        c = [0] * _size(n, order)
        c[0] = value
        return cls(n, order, base, c)

    @classmethod
    def variable(cls, i: int, base: Sequence, order: int) -> "Jet":
        n = len(base)
        c = [0] * _size(n, order)
        c[0] = base[i]
        if order >= 1:
            e = [0] * n
            e[i] = 1
            c[_index(n, order)[tuple(e)]] = Q(1)
        return cls(n, order, base, c)

    @classmethod
    def from_coeffs(cls, base: Sequence, order: int, coeffs: dict) -> "Jet":
        n = len(base)
        idx = _index(n, order)
        c = [0] * _size(n, order)
        for m, v in coeffs.items():
            if sum(m) <= order:
                c[idx[tuple(m)]] = v
        return cls(n, order, base, c)

    # access ---------------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    def coeff(self, m: Sequence[int]):
        if sum(m) > self.order:
            raise ValueError("multi-index beyond jet order")
        return self.c[_index(self.n, self.order)[tuple(m)]]

    def partial(self, m: Sequence[int]):
        """Value at the base point of the mixed partial derivative d^m f."""
        w = 1
        for e in m:
            w *= factorial(e)
        return self.coeff(m) * w

    def gradient(self):
        e = [0] * self.n
        out = []
        for i in range(self.n):
            e[i] = 1
            out.append(self.coeff(e))
            e[i] = 0
        return out

    def items(self):
        return [(m, v) for m, v in zip(monomials(self.n, self.order), self.c) if v != 0]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.c)

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.n, order, self.base, self.c[:_size(self.n, order)])

    def map(self, fn: Callable) -> "Jet":
        return Jet(self.n, self.order, self.base, [fn(v) for v in self.c])

    # arithmetic -------------------------------------------------------------
    def _align(self, other: "Jet"):
        if other.n != self.n:
            raise ValueError("jets in different numbers of variables")
        k = min(self.order, other.order)
        return self.truncate(k), other.truncate(k), k

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, k = self._align(other)
            return Jet(self.n, k, self.base, [x + y for x, y in zip(a.c, b.c)])
        if isinstance(other, _SCALARS):
            c = list(self.c)
            c[0] = c[0] + other
            return Jet(self.n, self.order, self.base, c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.n, self.order, self.base, [-x for x in self.c])

    def __sub__(self, other):
        if isinstance(other, Jet):
            a, b, k = self._align(other)
            return Jet(self.n, k, self.base, [x - y for x, y in zip(a.c, b.c)])
        if isinstance(other, _SCALARS):
            c = list(self.c)
            c[0] = c[0] - other
            return Jet(self.n, self.order, self.base, c)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, k = self._align(other)
            out = [0] * _size(self.n, k)
            ac, bc = a.c, b.c
            for i, j, t in _mul_table(self.n, k):
                x = ac[i]
                if x == 0:
                    continue
                y = bc[j]
                if y == 0:
                    continue
                out[t] = out[t] + x * y
            return Jet(self.n, k, self.base, out)
        if isinstance(other, _SCALARS):
            if other == 0:
                return Jet(self.n, self.order, self.base, [0] * len(self.c))
            return Jet(self.n, self.order, self.base, [x * other for x in self.c])
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        c0 = self.c[0]
        if c0 == 0:
            raise PoleError()
        inv0 = 1 / c0 if not isinstance(c0, int) else Q(1) / c0
        # 1/f = inv0 * sum_k (-u)^k with u = f*inv0 - 1 (u has zero value)
        u = self * inv0 - 1
        r = Jet.constant(Q(1), self.base, self.order)
        for _ in range(self.order):
            r = 1 - u * r
        return r * inv0

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, _SCALARS):
            if other == 0:
                raise PoleError()
            inv = Q(1) / other if isinstance(other, int) else 1 / other
            return self * inv
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _SCALARS):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        out = Jet.constant(Q(1), self.base, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def deriv(self, var: int) -> "Jet":
        """Partial derivative; the result has order K - 1."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        c = self.c
        out = [c[s] * f if c[s] != 0 else 0 for s, f in _deriv_table(self.n, self.order, var)]
        return Jet(self.n, self.order - 1, self.base, out)

    def __eq__(self, other):
        if isinstance(other, Jet):
            a, b, _ = self._align(other)
            return all(x == y for x, y in zip(a.c, b.c))
        if isinstance(other, _SCALARS):
            return self.c[0] == other and all(v == 0 for v in self.c[1:])
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, value={self.value})"


def variables(base: Sequence, order: int) -> List[Jet]:
    base = tuple(Q(b) for b in base)
    return [Jet.variable(i, base, order) for i in range(len(base))]


def jet_lift(f: Callable, base: Sequence, order: int) -> Jet:
    """Exact order-K Taylor expansion of ``f`` at ``base``.

    ``f`` receives the list of coordinate jets and must build its value with
    +, -, *, / and integer powers.
    """
    if order > MAX_ORDER:
        raise ValueError(f"jet order {order} exceeds maximum {MAX_ORDER}")
    xs = variables(base, order)
    try:
        out = f(xs)
    except PoleError:
        raise
    except ZeroDivisionError as exc:
        raise PoleError() from exc
    if not isinstance(out, Jet):
        out = Jet.constant(Q(out) if not isinstance(out, GaussianRational) else out,
                           xs[0].base if xs else (), order)
    return out


def poly_jet(coeffs: dict, base: Sequence, order: int) -> Jet:
    """Jet of the polynomial sum c_m x^m (monomials in absolute coordinates)."""
    def f(xs):
        total = Jet.constant(Q(0), xs[0].base, order)
        for m, c in coeffs.items():
            t = Jet.constant(Q(c), xs[0].base, order)
            for x, e in zip(xs, m):
                if e:
                    t = t * x ** e
            total = total + t
        return total
    return jet_lift(f, base, order)
