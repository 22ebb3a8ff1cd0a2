"""Exact scalars, phase-space polynomials and the canonical Poisson bracket.

Rationals are ``gmpy2.mpq``; they compare and hash equal to ``fractions.Fraction``
and ``int`` so callers may pass either.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from gmpy2 import mpq

BigRational = type(mpq(0))


def Q(value, den=None) -> BigRational:
    """Coerce ints, Fractions, mpq or ``"num/den"`` strings to an exact rational."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, BigRational):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals")
    if isinstance(value, str):
        return mpq(value.strip())
    return mpq(value)


def q_str(x) -> str:
    x = Q(x)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """Element of Q(i): ``re + i*im`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Q(re)
        self.im = Q(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, BigRational, Fraction)):
            return GaussianRational(x, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self):
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        d = o.norm2()
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+{self.im}i"


I_UNIT = GaussianRational(0, 1)


Monomial = Tuple[int, ...]


class PhasePoly:
    """Polynomial in q_0..q_m-1, p_0..p_m-1 with exact rational coefficients.

    ``m`` is the number of ambient degrees of freedom (n + 1 for the n-sphere).
    Exponent vectors are dense tuples of length 2m, q-exponents first.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Mapping[Monomial, object] | None = None):
        self.m = m
        clean: Dict[Monomial, BigRational] = {}
        if terms:
            for k, v in terms.items():
                if len(k) != 2 * m:
                    raise ValueError("exponent vector has wrong length")
                v = Q(v)
                if v != 0:
                    clean[tuple(k)] = v
        self.terms = clean

    @classmethod
    def _raw(cls, m, terms):
        obj = cls.__new__(cls)
        obj.m = m
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, m, c):
        return cls(m, {(0,) * (2 * m): c})

    @classmethod
    def var(cls, m, index):
        e = [0] * (2 * m)
        e[index] = 1
        return cls._raw(m, {tuple(e): Q(1)})

    @classmethod
    def q(cls, m, alpha):
        return cls.var(m, alpha)

    @classmethod
    def p(cls, m, alpha):
        return cls.var(m, m + alpha)

    def _coerce(self, other):
        if isinstance(other, PhasePoly):
            if other.m != self.m:
                raise ValueError("polynomials over different variable sets")
            return other
        if isinstance(other, (int, BigRational, Fraction)):
            return PhasePoly.const(self.m, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, v in o.terms.items():
            s = out.get(k, 0) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return PhasePoly._raw(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly._raw(self.m, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, BigRational, Fraction)):
            c = Q(other)
            if c == 0:
                return PhasePoly._raw(self.m, {})
            return PhasePoly._raw(self.m, {k: v * c for k, v in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: Dict[Monomial, BigRational] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                s = out.get(k, 0) + v1 * v2
                if s == 0:
                    out.pop(k, None)
                else:
                    out[k] = s
        return PhasePoly._raw(self.m, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, BigRational, Fraction)):
            return self * (1 / Q(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = PhasePoly.const(self.m, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(k) for k in self.terms)

    def diff(self, index: int) -> "PhasePoly":
        out = {}
        for k, v in self.terms.items():
            e = k[index]
            if e:
                kk = list(k)
                kk[index] = e - 1
                out[tuple(kk)] = v * e
        return PhasePoly._raw(self.m, out)

    def dq(self, alpha):
        return self.diff(alpha)

    def dp(self, alpha):
        return self.diff(self.m + alpha)

    def evaluate(self, q: Sequence, p: Sequence):
        vals = list(q) + list(p)
        total = Q(0)
        for k, c in self.terms.items():
            t = c
            for x, e in zip(vals, k):
                if e:
                    t = t * x ** e
            total += t
        return total

    def scale_variables(self, q_scale: Sequence, p_scale: Sequence) -> "PhasePoly":
        """Substitute q_a -> q_scale[a]*q_a and p_a -> p_scale[a]*p_a."""
        s = [Q(x) for x in list(q_scale) + list(p_scale)]
        out = {}
        for k, c in self.terms.items():
            t = c
            for x, e in zip(s, k):
                if e:
                    t *= x ** e
            if t != 0:
                out[k] = t
        return PhasePoly._raw(self.m, out)

    def __repr__(self):
        return f"PhasePoly(m={self.m}, terms={len(self.terms)})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = [f"q{a}" for a in range(self.m)] + [f"p{a}" for a in range(self.m)]
        parts = []
        for k, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def poisson_bracket(P: PhasePoly, R: PhasePoly) -> PhasePoly:
    """{P, R} = sum_a (dP/dq_a dR/dp_a - dP/dp_a dR/dq_a)."""
    if P.m != R.m:
        raise ValueError("polynomials over different variable sets")
    out = PhasePoly(P.m)
    for a in range(P.m):
        out = out + P.dq(a) * R.dp(a) - P.dp(a) * R.dq(a)
    return out


def constraint_polys(m: int) -> Tuple[PhasePoly, PhasePoly]:
    """Z1 = sum q^2 - 1 and Z2 = sum p q."""
    z1 = sum((PhasePoly.q(m, a) ** 2 for a in range(m)), PhasePoly.const(m, -1))
    z2 = sum((PhasePoly.q(m, a) * PhasePoly.p(m, a) for a in range(m)), PhasePoly(m))
    return z1, z2


@dataclass(frozen=True)
class ConstrainedPoint:
    q: Tuple[BigRational, ...]
    p: Tuple[BigRational, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(Q(x) for x in self.q))
        object.__setattr__(self, "p", tuple(Q(x) for x in self.p))
        if len(self.q) != len(self.p):
            raise ValueError("q and p must have equal length")
        if sum(x * x for x in self.q) != 1:
            raise ValueError("q is not on the unit sphere")
        if sum(x * y for x, y in zip(self.q, self.p)) != 0:
            raise ValueError("p is not tangent (p.q != 0)")


def stereographic(u: Sequence) -> Tuple[BigRational, ...]:
    u = [Q(x) for x in u]
    s = sum(x * x for x in u)
    d = s + 1
    return tuple([2 * x / d for x in u] + [(s - 1) / d])


def _small_rational(rng: random.Random, span=9):
    return mpq(rng.randint(-span, span), rng.randint(1, span))


def sample_constrained_point(seed: int, n: int, nonvanishing: bool = False) -> ConstrainedPoint:
    """Exact rational point of T*S^n inside T*R^{n+1} (q.q = 1, p.q = 0)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    while True:
        q = stereographic([_small_rational(rng) for _ in range(n)])
        if nonvanishing and any(x == 0 for x in q):
            continue
        w = [_small_rational(rng) for _ in range(n + 1)]
        wq = sum(x * y for x, y in zip(w, q))
        p = tuple(x - wq * y for x, y in zip(w, q))
        return ConstrainedPoint(q, p)


def sample_constrained_points(seed: int, n: int, count: int, nonvanishing=False):
    rng = random.Random(seed)
    return [sample_constrained_point(rng.getrandbits(32), n, nonvanishing) for _ in range(count)]


def random_phase_poly(rng: random.Random, m: int, degree: int, nterms: int = 4) -> PhasePoly:
    terms = {}
    for _ in range(nterms):
        d = rng.randint(0, degree)
        e = [0] * (2 * m)
        for _ in range(d):
            e[rng.randrange(2 * m)] += 1
        terms[tuple(e)] = _small_rational(rng, 5)
    return PhasePoly(m, terms)


def sum_polys(polys: Iterable[PhasePoly], m: int) -> PhasePoly:
    out = PhasePoly(m)
    for p in polys:
        out = out + p
    return out
