"""The adelic structure on Q(X1, ..., Xn): places, absolute values, heights.

Places come in three kinds:

* ``DivisorPlace``: a prime divisor ``w`` of projective n-space, with
  ``log|f|_w = -ord_w(f) * (lam * deg P_w + mu(p_w))``;
* ``PrimePlace``: a rational prime with the Gauss norm;
* ``TorusPlace``: a point ``t`` of ``[0, 1]^n`` with ``|f|_t = |f(e^{2 pi i t})|``.

Heights of projective points are computed in closed form. After clearing
denominators, content and common factors, every finite place except the
hyperplane at infinity contributes zero, so

    h(f_0 : ... : f_m) = lam * max deg f_i + int log max |f_i(e^{2 pi i t})| dt.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .arith import factorint, is_prime
from .exprparse import format_poly
from .mahler import MahlerEstimate, QuadratureSpec, log_max_integral, mahler_measure
from .polycore import (
    Poly,
    PolynomialError,
    PrimeDivisor,
    RationalFunction,
    ZeroPolynomialError,
    content_primitive,
    gauss_norm,
    multi_gcd,
    ord_at_divisor,
    poly_gcd,
    primitive_part,
    torus_eval,
)

_U = 2.0 ** -53


class NorthcottError(ValueError):
    """Raised by operations that need ``lam > 0``."""


@dataclass(frozen=True)
class AdelicParams:
    n: int
    lam: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError("lambda must be a finite non-negative real")

    def require_northcott(self) -> None:
        if self.lam <= 0:
            raise NorthcottError(
                "lambda = 0: Northcott's property fails (e.g. h(1:X) = 0 with X not torsion); "
                "this operation needs lambda > 0")


# places

@dataclass(frozen=True)
class DivisorPlace:
    divisor: PrimeDivisor

    def describe(self) -> str:
        if self.divisor.at_infinity:
            return "divisor:inf"
        return f"divisor:{format_poly(self.divisor.poly)}"


@dataclass(frozen=True)
class PrimePlace:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def describe(self) -> str:
        return f"prime:{self.p}"


@dataclass(frozen=True)
class TorusPlace:
    t: tuple

    def __post_init__(self):
        t = tuple(float(x) for x in self.t)
        if not all(0.0 <= x <= 1.0 for x in t):
            raise ValueError("torus coordinates must lie in [0, 1]")
        object.__setattr__(self, "t", t)

    def describe(self) -> str:
        return "torus:" + ",".join(repr(x) for x in self.t)


Place = Union[DivisorPlace, PrimePlace, TorusPlace]


def place_constant(omega: PrimeDivisor, params: AdelicParams,
                   spec: QuadratureSpec = QuadratureSpec()) -> MahlerEstimate:
    """``c_w = lam * deg(P_w) + mu(p_w)``, so that ``|f|_w = exp(c_w)^(-ord_w f)``."""
    if omega.nvars != params.n:
        raise PolynomialError("divisor lives in the wrong number of variables")
    if omega.at_infinity:
        return MahlerEstimate(params.lam, 0.0, "exact")
    mu = mahler_measure(omega.poly, spec)
    return MahlerEstimate(params.lam * omega.degree + mu.value,
                          mu.error_bound + _U * params.lam * omega.degree,
                          mu.method, mu.evaluations, mu.converged, mu.warnings)


def log_absolute_value(f, place: Place, params: AdelicParams,
                       spec: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """``(log|f|_place, error bound)``; ``log|0| = -inf`` away from divisor places."""
    f = RationalFunction.coerce(f, params.n)
    if isinstance(place, DivisorPlace):
        if f.is_zero():
            raise ZeroPolynomialError("absolute value of zero at a divisor place")
        k = ord_at_divisor(f, place.divisor)
        if k == 0:
            return 0.0, 0.0
        c = place_constant(place.divisor, params, spec)
        return -k * c.value, abs(k) * c.error_bound
    if f.is_zero():
        return -math.inf, 0.0
    if isinstance(place, PrimePlace):
        v = gauss_norm(f, place.p)
        return math.log(v.numerator) - math.log(v.denominator), 4 * _U * math.log(place.p)
    if isinstance(place, TorusPlace):
        if len(place.t) != params.n:
            raise ValueError("torus point has the wrong dimension")
        zn, en = torus_eval(f.num, place.t)
        zd, ed = torus_eval(f.den, place.t)
        if abs(zn) <= en:
            return -math.inf, math.inf
        s = abs(f.scalar)
        val = (math.log(s.numerator) - math.log(s.denominator)
               + math.log(abs(zn)) - math.log(abs(zd)))
        err = en / (abs(zn) - en) + ed / max(abs(zd) - ed, 1e-300) + 4 * _U * abs(val)
        return val, err
    raise TypeError(f"not a place: {place!r}")


def absolute_value(f, place: Place, params: AdelicParams,
                   spec: QuadratureSpec = QuadratureSpec()) -> float:
    return math.exp(log_absolute_value(f, place, params, spec)[0])


# projective points

def _as_rf(x, n: int) -> RationalFunction:
    if isinstance(x, str):
        raise TypeError("parse expressions before building points")
    return RationalFunction.coerce(x, n)


def canonical_coords(coords: Sequence, n: int) -> tuple[Poly, ...]:
    """Coprime integer representative with positive leading first nonzero entry."""
    if not coords:
        raise ValueError("a projective point needs coordinates")
    if all(isinstance(c, Poly) and c.is_integral() for c in coords):
        polys = list(coords)
        if any(p.nvars != n for p in polys):
            raise PolynomialError("mismatched number of variables")
    else:
        rfs = [_as_rf(c, n) for c in coords]
        dens = [r.den for r in rfs if not r.is_zero() and not r.den.is_constant()]
        L = Poly.one(n)
        for d in dens:
            L = L * d.exact_div(poly_gcd(L, d))
        polys = []
        for r in rfs:
            if r.is_zero():
                polys.append(Poly.zero(n))
            else:
                polys.append(r.num.scale(r.scalar) * L.exact_div(r.den))
        den = 1
        for p in polys:
            for _, c in p.items():
                if isinstance(c, Fraction):
                    den = math.lcm(den, c.denominator)
        polys = [p.scale(den) for p in polys]
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise ZeroPolynomialError("all coordinates are zero")
    g = math.gcd(*[c for p in nonzero for _, c in p.items()])
    if g != 1:
        polys = [p.scale(Fraction(1, g)) for p in polys]
    nonzero = [p for p in polys if not p.is_zero()]
    if len(nonzero) == 1:
        polys = [p if p.is_zero() else Poly.one(n) for p in polys]
    elif not any(p.is_constant() for p in nonzero):
        h = multi_gcd(nonzero)
        if not h.is_constant():
            polys = [p.exact_div(h) if not p.is_zero() else p for p in polys]
    first = next(p for p in polys if not p.is_zero())
    if first.leading_coeff() < 0:
        polys = [-p for p in polys]
    return tuple(polys)


class ProjPoint:
    """A point of P^m(Q(X1, ..., Xn)) stored in canonical form.

    Two points are equal iff they are the same projective point.
    """

    __slots__ = ("coords", "n")

    def __init__(self, coords: Sequence, n: int | None = None):
        coords = list(coords)
        if n is None:
            n = next((c.nvars for c in coords if isinstance(c, (Poly, RationalFunction))), None)
            if n is None:
                raise ValueError("n is required when all coordinates are constants")
        self.n = n
        self.coords = canonical_coords(coords, n)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def max_degree(self) -> int:
        return max(p.total_degree() for p in self.coords if not p.is_zero())

    def power(self, N: int) -> "ProjPoint":
        if N < 1:
            raise ValueError("power must be positive")
        return ProjPoint([p ** N for p in self.coords], self.n)

    def scaled(self, g) -> "ProjPoint":
        g = RationalFunction.coerce(g, self.n)
        if g.is_zero():
            raise ZeroPolynomialError("scaling by zero")
        return ProjPoint([g * p for p in self.coords], self.n)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.n == other.n and self.coords == other.coords

    def __hash__(self):
        return hash((self.n, self.coords))

    def __repr__(self):
        return "ProjPoint(" + " : ".join(repr(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class HeightEstimate:
    degree_term: float
    integral: MahlerEstimate
    max_degree: int

    @property
    def value(self) -> float:
        return self.degree_term + self.integral.value

    @property
    def error_bound(self) -> float:
        return self.integral.error_bound + 2 * _U * abs(self.value)

    @property
    def converged(self) -> bool:
        return self.integral.converged

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "degree_term": self.degree_term,
            "max_degree": self.max_degree,
            "integral": self.integral.to_dict(),
        }


def height(point: ProjPoint, params: AdelicParams,
           spec: QuadratureSpec = QuadratureSpec()) -> HeightEstimate:
    """Height of a projective point: degree term plus torus integral."""
    if point.n != params.n:
        raise PolynomialError("point lives in the wrong number of variables")
    d = point.max_degree()
    integral = log_max_integral(point.coords, spec)
    return HeightEstimate(params.lam * d, integral, d)


def is_height_zero(point: ProjPoint, params: AdelicParams | None = None) -> bool:
    """Exact test for ``h = 0`` (needs ``lam > 0``): constant canonical tuple in {0, +-1}."""
    if params is not None:
        params.require_northcott()
    return all(p.is_zero() or (p.is_constant() and abs(p.constant_coeff()) == 1)
               for p in point.coords)


def torsion_witness(coords: Sequence, n: int, params: AdelicParams | None = None):
    """Scalar ``g`` with ``g * a_i`` in {0, +-1} for all i, or ``None`` if none exists."""
    point = ProjPoint(coords, n)
    if not is_height_zero(point, params):
        return None
    raw = [RationalFunction.coerce(c, n) for c in coords]
    k = next(i for i, r in enumerate(raw) if not r.is_zero())
    target = point.coords[k].constant_coeff()
    g = RationalFunction.constant(target, n) / raw[k]
    assert all((g * r).is_zero() or (g * r) in (RationalFunction.constant(1, n),
                                              RationalFunction.constant(-1, n))
               for r in raw)
    return g


# product formula

@dataclass(frozen=True)
class FactoredElement:
    """``scalar * prod f_i^{e_i}`` with pairwise coprime normalized irreducible ``f_i``."""

    scalar: Fraction
    factors: tuple

    def __post_init__(self):
        s = Fraction(self.scalar)
        if s == 0:
            raise ValueError("the scalar must be nonzero")
        object.__setattr__(self, "scalar", s)
        fs = tuple((p, int(e)) for p, e in self.factors if e)
        object.__setattr__(self, "factors", fs)
        if fs:
            n = fs[0][0].nvars
            for p, _ in fs:
                if p.nvars != n:
                    raise PolynomialError("mismatched number of variables")
                if p.is_constant():
                    raise ValueError("factors must be nonconstant")
                PrimeDivisor(p)  # validates normalization
        for i in range(len(fs)):
            for j in range(i):
                if not poly_gcd(fs[i][0], fs[j][0]).is_constant():
                    raise ValueError("factor list is not pairwise coprime")

    @classmethod
    def build(cls, scalar, factors: Iterable) -> "FactoredElement":
        """Normalize factors (content and sign move into the scalar)."""
        s = Fraction(scalar)
        out = []
        for p, e in factors:
            c, prim = content_primitive(p)
            s *= c ** e
            out.append((prim, e))
        return cls(s, tuple(out))

    def nvars(self, default: int = 1) -> int:
        return self.factors[0][0].nvars if self.factors else default

    def expand(self, n: int | None = None) -> RationalFunction:
        n = self.nvars(n or 1)
        num, den = Poly.one(n), Poly.one(n)
        for p, e in self.factors:
            if e > 0:
                num = num * p ** e
            else:
                den = den * p ** (-e)
        return RationalFunction._raw(self.scalar, num, den)


@dataclass(frozen=True)
class ProductFormulaReport:
    residual: float
    error_bound: float
    finite: tuple          # (place, log|f|_place, error)
    archimedean: float
    archimedean_error: float
    evaluations: int
    converged: bool
    warnings: tuple = ()

    @property
    def holds(self) -> bool:
        return abs(self.residual) <= self.error_bound

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "error_bound": self.error_bound,
            "holds": self.holds,
            "finite": [{"place": p, "log_abs": v, "error": e} for p, v, e in self.finite],
            "archimedean": self.archimedean,
            "archimedean_error": self.archimedean_error,
            "evaluations": self.evaluations,
            "non_converged": not self.converged,
            "warnings": list(self.warnings),
        }


def product_formula_residual(elem: FactoredElement, params: AdelicParams,
                             spec: QuadratureSpec = QuadratureSpec()) -> ProductFormulaReport:
    """Sum of ``log|f|_w`` over all places, which should vanish.

    Only finitely many finite places can be nonzero: the factor divisors, the
    hyperplane at infinity and the primes dividing the scalar. Orders and
    Gauss norms are recomputed from the expanded element; the archimedean
    integral is the Mahler measure of the expanded numerator minus that of
    the expanded denominator.
    """
    n = params.n
    if elem.factors and elem.nvars() != n:
        raise PolynomialError("element lives in the wrong number of variables")
    f = elem.expand(n)
    places: list = [DivisorPlace(PrimeDivisor(p)) for p, _ in elem.factors]
    places.append(DivisorPlace(PrimeDivisor.infinity(n)))
    primes = sorted(set(factorint(elem.scalar.numerator)) | set(factorint(elem.scalar.denominator)))
    places.extend(PrimePlace(p) for p in primes)

    # distinct Mahler measures, each computed once within the remaining budget
    needed: list[Poly] = []
    for p, _ in elem.factors:
        if p not in needed:
            needed.append(p)
    for p in (f.num, f.den):
        if not p.is_constant() and p not in needed:
            needed.append(p)
    measures: dict = {}
    used = 0
    for i, p in enumerate(needed):
        share = max(1, (spec.budget - used) // (len(needed) - i))
        est = mahler_measure(p, spec.with_budget(share))
        measures[p] = est
        used += est.evaluations if est.method in ("tensor_grid", "qmc") else 0

    def mu(p: Poly) -> MahlerEstimate:
        if p.is_constant():
            return MahlerEstimate(0.0, 0.0, "exact")
        return measures[p]

    finite = []
    for pl in places:
        if isinstance(pl, DivisorPlace):
            k = ord_at_divisor(f, pl.divisor)
            if pl.divisor.at_infinity:
                c_val, c_err = params.lam, 0.0
            else:
                m = mu(pl.divisor.poly)
                c_val = params.lam * pl.divisor.degree + m.value
                c_err = m.error_bound
            finite.append((pl.describe(), -k * c_val, abs(k) * c_err))
        else:
            v, e = log_absolute_value(f, pl, params, spec)
            finite.append((pl.describe(), v, e))
    s = abs(f.scalar)
    arch_terms = [math.log(s.numerator), -math.log(s.denominator), mu(f.num).value, -mu(f.den).value]
    arch = math.fsum(arch_terms)
    arch_err = mu(f.num).error_bound + mu(f.den).error_bound + 4 * _U * math.fsum(map(abs, arch_terms))
    terms = [v for _, v, _ in finite] + [arch]
    residual = math.fsum(terms)
    err = math.fsum(e for _, _, e in finite) + arch_err + 4 * _U * math.fsum(map(abs, terms))
    ests = list(measures.values())
    warnings = tuple(w for m in ests for w in m.warnings)
    return ProductFormulaReport(residual, err, tuple(finite), arch, arch_err, used,
                                all(m.converged for m in ests), warnings)
