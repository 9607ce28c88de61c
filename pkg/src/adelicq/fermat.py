"""Fermat curves x^N + y^N = 1 over Q(X1, ..., Xn).

The roots of unity of a purely transcendental extension of Q are just
``{1, -1}``, so a solution is *torsion* when both coordinates lie in
``{0, 1, -1}``. Larger torsion groups are modelled abstractly by
:class:`TorsionAngle`, an element ``e^{2 pi i q}`` of ``(1/M)Z/Z``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .adelic import AdelicParams, ProjPoint, height, is_height_zero
from .mahler import QuadratureSpec
from .polycore import Poly, RationalFunction


class OffCurveError(ValueError):
    pass


class SearchCapExceeded(RuntimeError):
    pass


def _check_degree(N: int) -> None:
    if not isinstance(N, int) or N < 1:
        raise ValueError("the Fermat degree N must be a positive integer")


def _is_unit_or_zero(r: RationalFunction) -> bool:
    return r.is_zero() or (r.is_constant() and abs(r.scalar) == 1)


@dataclass(frozen=True)
class PointCheck:
    on_curve: bool
    torsion_solution: bool


def fermat_check_point(x, y, N: int, n: int | None = None) -> PointCheck:
    """Exact test of ``x^N + y^N = 1`` and of ``x, y in {0, +-1}``."""
    _check_degree(N)
    if n is None:
        n = next(v.nvars for v in (x, y) if isinstance(v, (Poly, RationalFunction)))
    x = RationalFunction.coerce(x, n)
    y = RationalFunction.coerce(y, n)
    on = (x ** N + y ** N) == RationalFunction.constant(1, n)
    return PointCheck(on, _is_unit_or_zero(x) and _is_unit_or_zero(y))


def on_projective_curve(point: ProjPoint, N: int) -> bool:
    if point.dim != 2:
        raise ValueError("Fermat curves live in P^2")
    x, y, z = point.coords
    return x ** N + y ** N == z ** N


@dataclass(frozen=True)
class PointReport:
    point: ProjPoint
    height_zero: bool
    torsion_coordinates: bool  # affine coords in {0, +-1}^2, or y = +-x at z = 0

    @property
    def consistent(self) -> bool:
        return self.height_zero == self.torsion_coordinates


@dataclass(frozen=True)
class FermatPropertyReport:
    holds: bool
    witnesses: tuple          # points of positive height
    reports: tuple

    @property
    def equivalence_ok(self) -> bool:
        return all(r.consistent for r in self.reports)


def fermat_property_over_points(points: Sequence[ProjPoint], N: int,
                                params: AdelicParams) -> FermatPropertyReport:
    """Check the Fermat property on a supplied finite set of points of F_N.

    ``holds`` is true iff every point has height zero. Each point is also
    checked against the torsion description of height-zero points, so both
    directions of the equivalence are exercised on the sample.
    """
    _check_degree(N)
    params.require_northcott()
    reports = []
    for pt in points:
        if not on_projective_curve(pt, N):
            raise OffCurveError(f"{pt!r} is not on the Fermat curve of degree {N}")
        x, y, z = pt.coords
        if not z.is_zero():
            zr = RationalFunction(z)
            tors = (_is_unit_or_zero(RationalFunction(x) / zr)
                    and _is_unit_or_zero(RationalFunction(y) / zr))
        else:
            # y = zeta x with zeta a root of unity, i.e. zeta = +-1 here
            tors = (not x.is_zero()) and (y == x or y == -x)
        reports.append(PointReport(pt, is_height_zero(pt, params), tors))
    witnesses = tuple(r.point for r in reports if not r.height_zero)
    return FermatPropertyReport(not witnesses, witnesses, tuple(reports))


# roots of unity

@dataclass(frozen=True)
class TorsionAngle:
    """``e^{2 pi i q}`` for ``q`` in [0, 1), or the zero element when ``q`` is None."""

    q: Fraction | None

    def __post_init__(self):
        if self.q is not None:
            q = Fraction(self.q) % 1
            object.__setattr__(self, "q", q)

    @classmethod
    def zero(cls) -> "TorsionAngle":
        return cls(None)

    @property
    def is_zero(self) -> bool:
        return self.q is None

    def power(self, N: int) -> "TorsionAngle":
        return self if self.is_zero else TorsionAngle(self.q * N)

    def value(self) -> complex:
        if self.is_zero:
            return 0j
        return complex(mpmath.expjpi(2 * mpmath.mpf(self.q.numerator) / self.q.denominator))

    def __str__(self):
        return "0" if self.is_zero else f"e(2pi i*{self.q})"

    def sort_key(self) -> Fraction:
        return Fraction(-1) if self.q is None else self.q


_SIXTHS = {Fraction(1, 6), Fraction(5, 6)}


def torsion_group(M: int) -> list[TorsionAngle]:
    if M < 1:
        raise ValueError("torsion order must be positive")
    return [TorsionAngle.zero()] + [TorsionAngle(Fraction(k, M)) for k in range(M)]


def roots_of_unity_solutions(N: int, M: int) -> list[tuple[TorsionAngle, TorsionAngle]]:
    """All ``(x, y)`` in ``{0} u mu_M`` with ``x^N + y^N = 1``.

    Two unit vectors sum to 1 only as ``e^{i pi/3} + e^{-i pi/3}``, so with
    ``xy != 0`` the criterion is ``{N q1, N q2} = {1/6, 5/6} mod 1``; with a zero
    coordinate the other one must be an N-th root of unity.
    """
    _check_degree(N)
    group = torsion_group(M)
    out = []
    for a in group:
        for b in group:
            pa, pb = a.power(N), b.power(N)
            if a.is_zero and b.is_zero:
                continue
            if a.is_zero:
                ok = pb.q == 0
            elif b.is_zero:
                ok = pa.q == 0
            else:
                ok = {pa.q, pb.q} == _SIXTHS
            if ok:
                out.append((a, b))
    return out


# height bounds

@dataclass(frozen=True)
class BoundInputs:
    H: float
    a: float

    def __post_init__(self):
        if not self.H >= 0:
            raise ValueError("H must be non-negative")
        if not self.a > 0:
            raise ValueError("a must be positive")


@dataclass(frozen=True)
class MultipleBound:
    exp_bound: int   # ceil(exp(H / a))
    tight: int   # floor(H / a) + 1, enough for m * a > H

    def to_dict(self) -> dict:
        return {"m0": self.exp_bound, "m0_exp_bound": self.exp_bound, "m0_tight": self.tight}


def _ceil_exp(x: Fraction) -> int:
    """Exact ``ceil(exp(x))`` for rational ``x >= 0``."""
    if x == 0:
        return 1
    # e^x is irrational for rational x != 0, so raising precision always decides
    digits = int(float(x) / math.log(10)) + 30
    while True:
        with mpmath.workdps(digits):
            v = mpmath.exp(mpmath.mpf(x.numerator) / x.denominator)
            c = int(mpmath.ceil(v))
            slack = mpmath.mpf(10) ** (-(digits - int(float(x) / math.log(10)) - 10))
            if c - v > slack and v - (c - 1) > slack:
                return c
        digits *= 2


def multiple_bound(b: BoundInputs) -> MultipleBound:
    """Multiplier ``m0`` such that ``F_{Nm}`` has only height-zero points for ``m >= m0``."""
    r = Fraction(b.H) / Fraction(b.a)
    return MultipleBound(_ceil_exp(r), math.floor(r) + 1)


# minimal positive height

def polys_in_box(n: int, deg_bound: int, coeff_bound: int) -> list[Poly]:
    """All polynomials with total degree <= deg_bound and |coefficients| <= coeff_bound."""
    monos = [e for e in itertools.product(range(deg_bound + 1), repeat=n) if sum(e) <= deg_bound]
    out = []
    for cs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=len(monos)):
        out.append(Poly(n, dict(zip(monos, cs))))
    return out


@dataclass(frozen=True)
class MinHeightResult:
    value: float
    point: ProjPoint
    error_bound: float
    heights_computed: int
    groups_pruned: tuple  # max degrees skipped by the lam * deg lower bound

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "point": [repr(c) for c in self.point.coords],
            "heights_computed": self.heights_computed,
            "groups_pruned": list(self.groups_pruned),
        }


def min_positive_height(params: AdelicParams, deg_bound: int, coeff_bound: int,
                        dimension: int = 2, spec: QuadratureSpec = QuadratureSpec(),
                        cap: int = 20_000) -> MinHeightResult:
    """Least positive height over canonical points of P^dimension in a coefficient box.

    Constant points have exact height ``log max |c_i|``. A point of maximal
    degree d has height at least ``lam * d`` (integer polynomials have
    nonnegative Mahler measure), so degree groups are visited in increasing
    order and abandoned once that lower bound reaches the best value found.
    Within a group, monomial-heavy tuples come first.
    """
    params.require_northcott()
    if deg_bound < 0 or coeff_bound < 1 or dimension < 1:
        raise ValueError("need deg_bound >= 0, coeff_bound >= 1, dimension >= 1")
    n = params.n
    best = math.inf
    best_pt = None
    best_err = 0.0
    computed = 0
    for cs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=dimension + 1):
        if not any(cs):
            continue
        pt = ProjPoint([Poly.constant(c, n) for c in cs], n)
        m = max(abs(p.constant_coeff()) for p in pt.coords)
        if m > 1 and math.log(m) < best:
            best, best_pt, best_err = math.log(m), pt, 0.0
    cands = polys_in_box(n, deg_bound, coeff_bound)
    cands.sort(key=lambda p: (len(p), p.total_degree(),
                              sum(abs(c) for _, c in p.items())))
    pruned = []
    for d in range(1, deg_bound + 1):
        lower = params.lam * d
        if lower >= best:
            pruned.append(d)
            continue
        seen = set()
        for tup in itertools.product(cands, repeat=dimension + 1):
            if lower >= best:
                break
            if max(p.total_degree() for p in tup) != d:
                continue
            pt = ProjPoint(tup, n)
            if pt.max_degree() != d or pt in seen:
                continue
            seen.add(pt)
            computed += 1
            if computed > cap:
                raise SearchCapExceeded(f"more than {cap} height evaluations needed")
            h = height(pt, params, spec)
            if h.value < best:
                best, best_pt, best_err = h.value, pt, h.error_bound
    if best_pt is None:
        raise ValueError("no point of positive height in the box")
    return MinHeightResult(best, best_pt, best_err, computed, tuple(pruned))
