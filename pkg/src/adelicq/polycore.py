"""Exact multivariate polynomials and rational functions over Q.

Polynomials are sparse maps from exponent tuples to coefficients. Coefficients
are Python ints whenever integral and ``Fraction`` otherwise, so integer
polynomials stay on the fast int path.

Monomials are ordered lexicographically with ``x1 > x2 > ... > xn`` (plain
tuple comparison). A nonzero integer polynomial is *normalized* when its
coefficients have gcd 1 and the coefficient of its lex-greatest monomial is
positive; every ``Poly`` returned by :func:`primitive_part`, :func:`poly_gcd`
and the ``RationalFunction`` constructor is normalized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from .arith import is_prime, valuation

Coeff = Union[int, Fraction]

_U = 2.0 ** -53


class PolynomialError(ValueError):
    pass


class DivisionNotExact(PolynomialError):
    pass


class ZeroPolynomialError(PolynomialError):
    pass


def _coeff(c) -> Coeff:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if not isinstance(c, Fraction):
        c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _addexp(a: tuple, b: tuple) -> tuple:
    return tuple([x + y for x, y in zip(a, b)])


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "_t", "_hash")

    def __init__(self, nvars: int, terms=None):
        if nvars < 1:
            raise PolynomialError("a polynomial needs at least one variable")
        self.nvars = nvars
        t: dict = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for e, c in items:
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise PolynomialError(f"exponent {e} does not have length {nvars}")
                if any(x < 0 for x in e):
                    raise PolynomialError(f"negative exponent in {e}")
                c = _coeff(c)
                if e in t:
                    c = _coeff(t[e] + c)
                if c:
                    t[e] = c
                else:
                    t.pop(e, None)
        self._t = t
        self._hash = None

    @classmethod
    def _make(cls, nvars: int, t: dict) -> "Poly":
        # trusted constructor: keys valid, no zero coefficients
        p = object.__new__(cls)
        p.nvars = nvars
        p._t = t
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._make(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> "Poly":
        c = _coeff(c)
        return cls._make(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls._make(nvars, {(0,) * nvars: 1})

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        """The variable ``x_{i+1}`` (0-based index ``i``)."""
        if not 0 <= i < nvars:
            raise PolynomialError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._make(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, nvars: int = 1, var: int = 0) -> "Poly":
        """Univariate constructor, ``coeffs[i]`` is the coefficient of ``x^i``."""
        t = {}
        for i, c in enumerate(coeffs):
            c = _coeff(c)
            if c:
                e = [0] * nvars
                e[var] = i
                t[tuple(e)] = c
        return cls._make(nvars, t)

    # inspection

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and not any(next(iter(self._t))))

    def constant_coeff(self) -> Coeff:
        return self._t.get((0,) * self.nvars, 0)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._t.values())

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._t), default=-1)

    def degree_in(self, k: int) -> int:
        return max((e[k] for e in self._t), default=-1)

    def variables(self) -> set:
        out = set()
        for e in self._t:
            out.update(i for i, x in enumerate(e) if x)
        return out

    def leading_exponent(self) -> tuple:
        if not self._t:
            raise ZeroPolynomialError("zero polynomial has no leading term")
        return max(self._t)

    def leading_coeff(self) -> Coeff:
        return self._t[self.leading_exponent()]

    def coeffs_in(self, k: int) -> dict:
        """View as a polynomial in ``x_{k+1}``: map degree -> coefficient polynomial."""
        out: dict = {}
        for e, c in self._t.items():
            d = e[k]
            e2 = e[:k] + (0,) + e[k + 1:]
            out.setdefault(d, {})[e2] = c
        return {d: Poly._make(self.nvars, t) for d, t in out.items()}

    def univariate_coeffs(self, k: int) -> list:
        """Coefficients (low to high) when only ``x_{k+1}`` occurs."""
        d = self.degree_in(k)
        out = [0] * (d + 1)
        for e, c in self._t.items():
            if any(x for i, x in enumerate(e) if i != k):
                raise PolynomialError("polynomial involves more than one variable")
            out[e[k]] = c
        return out

    # arithmetic

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise PolynomialError(
                    f"mismatched number of variables: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for e, c in other._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = _coeff(v)
            else:
                t.pop(e, None)
        return Poly._make(self.nvars, t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._make(self.nvars, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c) -> "Poly":
        c = _coeff(c)
        if not c:
            return Poly.zero(self.nvars)
        if c == 1:
            return self
        return Poly._make(self.nvars, {e: _coeff(v * c) for e, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: dict = {}
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = _addexp(ea, eb)
                v = t.get(e, 0) + ca * cb
                if v:
                    t[e] = v
                else:
                    del t[e]
        return Poly._make(self.nvars, {e: _coeff(c) for e, c in t.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise PolynomialError("negative power of a polynomial")
        result = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div(self, b: "Poly") -> "Poly":
        """Quotient ``self / b``; raises :class:`DivisionNotExact` if ``b`` does not divide."""
        q = self.try_div(b)
        if q is None:
            raise DivisionNotExact("division is not exact")
        return q

    def try_div(self, b: "Poly"):
        """Exact quotient or ``None``. Fails fast on the first non-divisible leading term."""
        b = self._lift(b)
        if b.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lb = max(b._t)
        cb = b._t[lb]
        r = dict(self._t)
        q: dict = {}
        while r:
            lr = max(r)
            d = tuple([x - y for x, y in zip(lr, lb)])
            if any(x < 0 for x in d):
                return None
            a = r[lr]
            if isinstance(a, int) and isinstance(cb, int) and a % cb == 0:
                c = a // cb
            else:
                c = _coeff(Fraction(a) / cb)
            q[d] = c
            for e, v in b._t.items():
                e2 = _addexp(e, d)
                w = r.get(e2, 0) - c * v
                if w:
                    r[e2] = _coeff(w)
                else:
                    r.pop(e2, None)
        return Poly._make(self.nvars, q)

    def diff(self, k: int) -> "Poly":
        t = {}
        for e, c in self._t.items():
            if e[k]:
                e2 = e[:k] + (e[k] - 1,) + e[k + 1:]
                t[e2] = _coeff(c * e[k])
        return Poly._make(self.nvars, t)

    def __call__(self, *point):
        """Evaluate at a point (any numeric type supporting ``+``, ``*``, ``**``)."""
        if len(point) != self.nvars:
            raise PolynomialError(f"expected {self.nvars} coordinates")
        total = 0
        for e, c in self._t.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    # comparison

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == Poly.constant(other, self.nvars)._t
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._t.items())))
        return self._hash

    def sorted_terms(self) -> list:
        """Terms in decreasing lex order."""
        return sorted(self._t.items(), reverse=True)

    def __repr__(self) -> str:
        if not self._t:
            return f"Poly({self.nvars}, 0)"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}^{k}" if k > 1 else f"x{i + 1}"
                            for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return f"Poly({self.nvars}, {' + '.join(parts)})"


# content and primitive part

def content_primitive(f: Poly) -> tuple[Fraction, Poly]:
    """Split ``f = content * primitive`` with ``primitive`` normalized.

    The sign of ``f``'s lex-leading coefficient goes into ``content``.
    """
    if f.is_zero():
        raise ZeroPolynomialError("content of the zero polynomial")
    vals = list(f._t.values())
    den = 1
    for c in vals:
        if isinstance(c, Fraction):
            den = math.lcm(den, c.denominator)
    ints = [int(c * den) for c in vals] if den != 1 else vals
    g = math.gcd(*ints)
    if f._t[max(f._t)] < 0:
        g = -g
    content = Fraction(g, den)
    if g == 1 and den == 1:
        return content, f
    return content, Poly._make(f.nvars, {e: v // g for e, v in zip(f._t, ints)})


def primitive_part(f: Poly) -> Poly:
    return content_primitive(f)[1]


def content(f: Poly) -> Fraction:
    return content_primitive(f)[0]


def is_normalized(f: Poly) -> bool:
    """Nonzero, integer coefficients with gcd 1, positive lex-leading coefficient."""
    if f.is_zero() or not f.is_integral():
        return False
    return math.gcd(*f._t.values()) == 1 and f.leading_coeff() > 0


# gcd

def _prem(a: Poly, b: Poly, k: int) -> Poly:
    db = b.degree_in(k)
    lcb = b.coeffs_in(k)[db]
    xk = Poly.var(k, a.nvars)
    r = a
    while not r.is_zero():
        dr = r.degree_in(k)
        if dr < db:
            break
        lcr = r.coeffs_in(k)[dr]
        r = r * lcb - lcr * (xk ** (dr - db)) * b
    return r


def _primitive_in(f: Poly, k: int) -> Poly:
    cont = _gcd_many(list(f.coeffs_in(k).values()))
    if not cont.is_constant():
        f = f.exact_div(cont)
    return primitive_part(f)


def _gcd_many(polys: list) -> Poly:
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ZeroPolynomialError("gcd of zero polynomials")
    polys.sort(key=len)
    g = primitive_part(polys[0])
    for p in polys[1:]:
        if g.is_constant():
            break
        g = _gcd2(g, p)
    return g


def _ugcd(a: list, b: list) -> list:
    """Primitive PRS on integer coefficient lists (low degree first)."""
    def prim(f):
        g = math.gcd(*f)
        f = [c // g for c in f]
        return f if f[-1] > 0 else [-c for c in f]

    a, b = prim(a), prim(b)
    if len(a) < len(b):
        a, b = b, a
    while True:
        r = a[:]
        lb, db = b[-1], len(b) - 1
        while len(r) - 1 >= db and any(r):
            lr, shift = r[-1], len(r) - 1 - db
            r = [c * lb for c in r]
            for i, c in enumerate(b):
                r[i + shift] -= lr * c
            while r and r[-1] == 0:
                r.pop()
            if not r:
                break
        if not r:
            return b
        if len(r) == 1:
            return [1]
        a, b = b, prim(r)


def _specialize(f: Poly, k: int, point: Sequence[int]) -> list:
    """Integer coefficients in ``x_k`` after substituting ``point`` for the other variables."""
    out = [0] * (f.degree_in(k) + 1)
    for e, c in f._t.items():
        v = int(c)
        for i, ei in enumerate(e):
            if i != k and ei:
                v *= point[i] ** ei
        out[e[k]] += v
    return out


_PROBES = ((3, 5, 7, 11), (-2, 13, -17, 19), (23, -29, 31, -37))


def _coprime_in(a: Poly, b: Poly, k: int) -> bool:
    """True only if a, b (primitive in x_k) provably share no factor involving x_k.

    When the leading coefficients survive the substitution, the image of the
    gcd keeps its degree in x_k, so a constant univariate gcd settles it.
    """
    if not (a.is_integral() and b.is_integral()):
        return False
    for base in _PROBES:
        point = [base[i % len(base)] + i // len(base) for i in range(a.nvars)]
        fa, fb = _specialize(a, k, point), _specialize(b, k, point)
        if fa[-1] == 0 or fb[-1] == 0:
            continue
        return len(_ugcd(fa, fb)) == 1
    return False


def _gcd2(a: Poly, b: Poly) -> Poly:
    one = Poly.one(a.nvars)
    if a.is_constant() or b.is_constant():
        return one
    va, vb = a.variables(), b.variables()
    common = va & vb
    if common:
        # smallest degree as main variable keeps the remainder sequence short
        k = min(common, key=lambda i: (max(a.degree_in(i), b.degree_in(i)), -i))
    else:
        k = max(va | vb)
    if va == vb == {k} and a.is_integral() and b.is_integral():
        g = _ugcd([int(c) for c in a.univariate_coeffs(k)], [int(c) for c in b.univariate_coeffs(k)])
        return Poly.from_coeffs(g, a.nvars, k)
    if k not in va:
        return _gcd_many([a] + list(b.coeffs_in(k).values()))
    if k not in vb:
        return _gcd_many([b] + list(a.coeffs_in(k).values()))
    conta = _gcd_many(list(a.coeffs_in(k).values()))
    contb = _gcd_many(list(b.coeffs_in(k).values()))
    c = _gcd2(conta, contb)
    pa = primitive_part(a if conta.is_constant() else a.exact_div(conta))
    pb = primitive_part(b if contb.is_constant() else b.exact_div(contb))
    if pa.degree_in(k) < pb.degree_in(k):
        pa, pb = pb, pa
    if _coprime_in(pa, pb, k):
        return primitive_part(c)
    while True:
        r = _prem(pa, pb, k)
        if r.is_zero():
            g = pb
            break
        if r.degree_in(k) == 0:
            g = one
            break
        pa, pb = pb, _primitive_in(r, k)
    return primitive_part(c * g)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Normalized gcd of two polynomials (integer content discarded)."""
    if a.nvars != b.nvars:
        raise PolynomialError("mismatched number of variables")
    if a.is_zero() and b.is_zero():
        raise ZeroPolynomialError("gcd(0, 0) is undefined")
    if a.is_zero():
        return primitive_part(b)
    if b.is_zero():
        return primitive_part(a)
    return _gcd2(primitive_part(a), primitive_part(b))


def multi_gcd(polys: Iterable[Poly]) -> Poly:
    """Normalized gcd of a list; content is handled separately (gcd(2x, 4x^2) = x)."""
    polys = list(polys)
    if not polys:
        raise ZeroPolynomialError("gcd of an empty list")
    n = polys[0].nvars
    if any(p.nvars != n for p in polys):
        raise PolynomialError("mismatched number of variables")
    return _gcd_many(polys)


def poly_lcm(a: Poly, b: Poly) -> Poly:
    g = poly_gcd(a, b)
    return primitive_part(primitive_part(a) * primitive_part(b).exact_div(g))


# rational functions

class RationalFunction:
    """Element ``scalar * num / den`` of Q(x1, ..., xn).

    ``num`` and ``den`` are normalized integer polynomials with no common
    factor; the zero element has ``scalar == 0`` and ``num == den == 1``.
    """

    __slots__ = ("scalar", "num", "den")

    def __init__(self, num, den=None, nvars: int | None = None):
        if isinstance(num, RationalFunction):
            if den is not None:
                raise PolynomialError("use division to combine rational functions")
            self.scalar, self.num, self.den = num.scalar, num.num, num.den
            return
        if not isinstance(num, Poly):
            if nvars is None:
                nvars = den.nvars if isinstance(den, Poly) else None
            if nvars is None:
                raise PolynomialError("nvars is required for a constant rational function")
            num = Poly.constant(num, nvars)
        if den is None:
            den = Poly.one(num.nvars)
        elif not isinstance(den, Poly):
            den = Poly.constant(den, num.nvars)
        if den.nvars != num.nvars:
            raise PolynomialError("mismatched number of variables")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        n = num.nvars
        if num.is_zero():
            self.scalar, self.num, self.den = Fraction(0), Poly.one(n), Poly.one(n)
            return
        cn, pn = content_primitive(num)
        cd, pd = content_primitive(den)
        if not pd.is_constant() and not pn.is_constant():
            g = _gcd2(pn, pd)
            if not g.is_constant():
                pn, pd = pn.exact_div(g), pd.exact_div(g)
        self.scalar, self.num, self.den = cn / cd, pn, pd

    @classmethod
    def _raw(cls, scalar: Fraction, num: Poly, den: Poly) -> "RationalFunction":
        r = object.__new__(cls)
        r.scalar, r.num, r.den = scalar, num, den
        return r

    @classmethod
    def constant(cls, c, nvars: int) -> "RationalFunction":
        one = Poly.one(nvars)
        return cls._raw(Fraction(c), one, one)

    @classmethod
    def coerce(cls, x, nvars: int) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            if x.nvars != nvars:
                raise PolynomialError("mismatched number of variables")
            return x
        if isinstance(x, Poly):
            if x.nvars != nvars:
                raise PolynomialError("mismatched number of variables")
            return cls(x)
        return cls.constant(x, nvars)

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.scalar == 0

    def __bool__(self) -> bool:
        return self.scalar != 0

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def degree(self) -> int:
        """``deg(num) - deg(den)``, which is ``-ord`` at the hyperplane at infinity."""
        if self.is_zero():
            raise ZeroPolynomialError("degree of zero")
        return self.num.total_degree() - self.den.total_degree()

    def numerator(self) -> Poly:
        """Integer polynomial ``N`` with ``self = N / D`` (see :meth:`denominator`)."""
        return self.num.scale(self.scalar.numerator)

    def denominator(self) -> Poly:
        return self.den.scale(self.scalar.denominator)

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise PolynomialError("not a polynomial")
        return self.num.scale(self.scalar)

    def _other(self, other):
        if isinstance(other, (RationalFunction, Poly, int, Fraction)):
            return RationalFunction.coerce(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            n = self.num.scale(self.scalar) + other.num.scale(other.scalar)
            return RationalFunction(n, self.den)
        n = self.num.scale(self.scalar) * other.den + other.num.scale(other.scalar) * self.den
        return RationalFunction(n, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.scalar, self.num, self.den)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RationalFunction.constant(0, self.nvars)
        s = self.scalar * other.scalar
        if self.den.is_constant() and other.den.is_constant():
            return RationalFunction._raw(s, self.num * other.num, self.den)
        n1, d2 = _cancel(self.num, other.den)
        n2, d1 = _cancel(other.num, self.den)
        return RationalFunction._raw(s, n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction._raw(1 / self.scalar, self.den, self.num)

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return RationalFunction.constant(1, self.nvars)
        if self.is_zero():
            return self
        return RationalFunction._raw(self.scalar ** k, self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, (Poly, int, Fraction)):
            other = RationalFunction.coerce(other, self.nvars)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.scalar == other.scalar and self.num == other.num
                and self.den == other.den)

    def __hash__(self):
        return hash((self.scalar, self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({self.scalar}, {self.num!r}, {self.den!r})"


def _cancel(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if a.is_constant() or b.is_constant():
        return a, b
    g = _gcd2(a, b)
    if g.is_constant():
        return a, b
    return a.exact_div(g), b.exact_div(g)


# p-adic Gauss norm

def gauss_norm(f, p: int) -> Fraction:
    """Gauss norm ``|f|_p``: max of ``|a|_p`` over coefficients, extended to quotients.

    With ``num`` and ``den`` primitive this is just ``|scalar|_p`` (Gauss's lemma).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if isinstance(f, Poly):
        if f.is_zero():
            raise ZeroPolynomialError("Gauss norm of zero")
        c = content(f)
    else:
        if f.is_zero():
            raise ZeroPolynomialError("Gauss norm of zero")
        c = f.scalar
    v = valuation(c.numerator, p) - valuation(c.denominator, p)
    return Fraction(1, p ** v) if v >= 0 else Fraction(p ** (-v))


# projective forms and prime divisors

def homogenize(f: Poly, total_deg: int | None = None) -> Poly:
    """``T0^d f(T1/T0, ..., Tn/T0)`` as a polynomial in ``n + 1`` variables."""
    d = f.total_degree() if total_deg is None else total_deg
    if d < f.total_degree():
        raise PolynomialError("total degree below deg(f)")
    return Poly._make(f.nvars + 1, {(d - sum(e),) + e: c for e, c in f.items()})


def is_homogeneous(P: Poly) -> bool:
    return len({sum(e) for e, _ in P.items()}) <= 1


def dehomogenize(P: Poly) -> Poly:
    """``P(1, X1, ..., Xn)`` for a homogeneous ``P`` in ``T0, ..., Tn``."""
    if P.nvars < 2:
        raise PolynomialError("need at least two homogeneous coordinates")
    if not is_homogeneous(P):
        raise PolynomialError("polynomial is not homogeneous")
    return Poly._make(P.nvars - 1, {e[1:]: c for e, c in P.items()})


@dataclass(frozen=True)
class PrimeDivisor:
    """A prime divisor of projective n-space, stored by its affine equation.

    ``poly`` is ``p_w = P_w(1, X1, ..., Xn)`` in normalized form. The
    hyperplane at infinity ``{T0 = 0}`` has ``at_infinity=True`` and
    ``poly == 1``. Irreducibility is the caller's responsibility.
    """

    poly: Poly
    at_infinity: bool = False

    def __post_init__(self):
        if self.at_infinity:
            if self.poly != Poly.one(self.poly.nvars):
                raise PolynomialError("the divisor at infinity is stored with poly == 1")
            return
        if self.poly.is_constant():
            raise PolynomialError("a prime divisor needs a nonconstant equation")
        if not is_normalized(self.poly):
            raise PolynomialError("defining polynomial must be primitive and sign-normalized")

    @classmethod
    def infinity(cls, nvars: int) -> "PrimeDivisor":
        return cls(Poly.one(nvars), True)

    @classmethod
    def from_poly(cls, f: Poly) -> "PrimeDivisor":
        return cls(primitive_part(f))

    @classmethod
    def from_form(cls, P: Poly) -> "PrimeDivisor":
        """From a homogeneous equation in ``T0, ..., Tn``; ``c*T0`` gives the divisor at infinity."""
        if P.is_zero():
            raise ZeroPolynomialError("zero form")
        p = dehomogenize(P)
        if p.is_constant():
            if P.total_degree() != 1:
                raise PolynomialError("T0^k with k > 1 is not prime")
            return cls.infinity(p.nvars)
        if primitive_part(P).total_degree() != p.total_degree():
            # T0 divides P, so P is reducible
            raise PolynomialError("form is divisible by T0")
        return cls.from_poly(p)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    @property
    def degree(self) -> int:
        return 1 if self.at_infinity else self.poly.total_degree()

    def form(self) -> Poly:
        if self.at_infinity:
            return Poly.var(0, self.nvars + 1)
        return homogenize(self.poly, self.degree)


def multiplicity(f: Poly, p: Poly) -> int:
    """Largest ``k`` with ``p^k | f`` by repeated exact division."""
    if f.is_zero():
        raise ZeroPolynomialError("multiplicity in the zero polynomial")
    if p.is_constant():
        raise PolynomialError("multiplicity of a constant")
    k = 0
    while True:
        q = f.try_div(p)
        if q is None:
            return k
        f, k = q, k + 1


def ord_at_divisor(f, omega: PrimeDivisor) -> int:
    """Order of vanishing of ``f`` along ``omega``."""
    if isinstance(f, Poly):
        f = RationalFunction(f)
    if f.is_zero():
        raise ZeroPolynomialError("order of zero")
    if omega.at_infinity:
        return -f.degree()
    return multiplicity(f.num, omega.poly) - multiplicity(f.den, omega.poly)


# evaluation on the unit torus

def torus_eval(f: Poly, t: Sequence[float]) -> tuple[complex, float]:
    """Evaluate ``f(e^{2 pi i t1}, ..., e^{2 pi i tn})`` with a forward error bound.

    Phases are reduced mod 1 before scaling by ``2 pi`` and real/imaginary parts
    are accumulated with ``math.fsum``. The bound covers coefficient rounding,
    phase rounding, libm error in ``cos``/``sin`` and the final rounding.
    """
    if len(t) != f.nvars:
        raise PolynomialError(f"expected {f.nvars} coordinates")
    t = [float(x) for x in t]
    re, im = [], []
    slack = 0.0
    for e, c in f.items():
        cf = float(c)
        s = math.fsum(k * x for k, x in zip(e, t))
        frac = s - math.floor(s)
        ang = 2.0 * math.pi * frac
        re.append(cf * math.cos(ang))
        im.append(cf * math.sin(ang))
        slack += abs(cf) * (4.0 + 2.0 * math.pi * (abs(s) + 2.0))
    value = complex(math.fsum(re), math.fsum(im))
    bound = 1.1 * _U * slack + 2.0 * _U * abs(value)
    return value, bound


def torus_abs(f, t: Sequence[float]) -> float:
    """``|f(e^{2 pi i t})|`` for a polynomial or rational function."""
    if isinstance(f, Poly):
        return abs(torus_eval(f, t)[0])
    num = abs(torus_eval(f.num, t)[0])
    den = abs(torus_eval(f.den, t)[0])
    return abs(float(f.scalar)) * num / den


def prod(polys: Iterable[Poly], nvars: int) -> Poly:
    return reduce(lambda a, b: a * b, polys, Poly.one(nvars))
