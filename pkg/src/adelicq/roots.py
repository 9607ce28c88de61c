"""Univariate root machinery for Jensen's formula.

Roots are found in two stages: ``numpy.roots`` (companion eigenvalues) for
starting points, then Aberth iteration in ``mpmath`` at the requested
precision. Each polished root comes with an inclusion radius from the
Weierstrass corrections: all roots of ``p`` lie in the union of the disks
``D(z_i, d |W_i|)``, and when those disks are pairwise disjoint each one holds
exactly one root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .arith import euler_phi
from .polycore import Poly, poly_gcd, primitive_part


class RootFindingError(ArithmeticError):
    pass


def square_free_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``f = c * prod g_i^i`` with each ``g_i`` square-free.

    Only univariate input (in variable ``x1``..``xn``, whichever occurs) is
    supported; factors come back normalized and nonconstant.
    """
    vs = f.variables()
    if len(vs) > 1:
        raise ValueError("square-free decomposition is univariate only")
    if not vs:
        return []
    k = vs.pop()
    a = primitive_part(f)
    b = a.diff(k)
    c = poly_gcd(a, b)
    w = a.exact_div(c)
    y = b.exact_div(c)
    z = y - w.diff(k)
    out = []
    i = 1
    while not w.is_constant():
        g = poly_gcd(w, z)
        if not g.is_constant():
            out.append((g, i))
        w = w.exact_div(g)
        y = z.exact_div(g)
        z = y - w.diff(k)
        i += 1
    return out


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> tuple:
    """Integer coefficients (low to high) of the k-th cyclotomic polynomial."""
    num = Poly.from_coeffs([-1] + [0] * (k - 1) + [1])
    for d in range(1, k):
        if k % d == 0:
            num = num.exact_div(Poly.from_coeffs(cyclotomic(d)))
    return tuple(num.univariate_coeffs(0))


def cyclotomic_orders(max_degree: int) -> list[int]:
    """All k with ``phi(k) <= max_degree`` (``phi(k) >= sqrt(k/2)`` bounds the search)."""
    return [k for k in range(1, 2 * max_degree * max_degree + 3) if euler_phi(k) <= max_degree]


def strip_cyclotomic(coeffs: list) -> tuple[list, list[tuple[int, int]]]:
    """Divide out every cyclotomic factor exactly; returns (rest, [(k, multiplicity)])."""
    f = Poly.from_coeffs(coeffs)
    found = []
    for k in cyclotomic_orders(max(f.total_degree(), 0)):
        if f.total_degree() < euler_phi(k):
            continue
        phi = Poly.from_coeffs(cyclotomic(k))
        m = 0
        while f.total_degree() >= phi.total_degree():
            q = f.try_div(phi)
            if q is None:
                break
            f, m = q, m + 1
        if m:
            found.append((k, m))
    return f.univariate_coeffs(0) if not f.is_zero() else [], found


@dataclass(frozen=True)
class RootEnclosure:
    center: complex
    radius: float
    log_plus: float  # log max(1, |center|), high precision then rounded
    log_plus_error: float


def _mpf(c) -> mpmath.mpf:
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def aberth_roots(coeffs: list, digits: int = 50, max_iter: int = 500) -> list[RootEnclosure]:
    """Roots of a square-free univariate polynomial (coefficients low to high)."""
    d = len(coeffs) - 1
    if d < 1:
        return []
    if coeffs[-1] == 0:
        raise ValueError("leading coefficient is zero")
    if d == 1:
        r = -Fraction(coeffs[0]) / Fraction(coeffs[1])
        lp = max(0.0, _log_abs_fraction(r))
        center = float(r)
        rad = float(abs(r - Fraction(center))) * (1 + 2.0 ** -50)
        return [RootEnclosure(complex(center), rad, lp, 2.0 ** -52 * lp)]
    with mpmath.workdps(digits + 10):
        c = [_mpf(x) for x in coeffs]
        hi = c[::-1]
        try:
            scale = max(abs(float(x)) for x in coeffs if x) or 1.0
            start = np.roots([float(x) / scale for x in coeffs[::-1]])
            z = [mpmath.mpc(complex(s)) for s in start]
        except (OverflowError, np.linalg.LinAlgError, ValueError):
            z = []
        if len(z) != d or any(not mpmath.isfinite(abs(x)) for x in z):
            rad = 1 + max(abs(x / hi[0]) for x in hi[1:])
            z = [rad * mpmath.expjpi(2 * mpmath.mpf(j) / d + mpmath.mpf(1) / (2 * d)) for j in range(d)]
        # break exact coincidences of double-precision starts
        for i in range(d):
            for j in range(i):
                if z[i] == z[j]:
                    z[i] += mpmath.mpf(10) ** (-8) * mpmath.expjpi(mpmath.mpf(i) / d)
        dc = [k * c[k] for k in range(1, d + 1)]
        eps = mpmath.mpf(10) ** (-(digits + 5))
        for _ in range(max_iter):
            biggest = mpmath.mpf(0)
            for i in range(d):
                zi = z[i]
                pv = mpmath.polyval(hi, zi)
                dv = mpmath.polyval(dc[::-1], zi)
                if pv == 0:
                    continue
                ratio = pv / dv if dv != 0 else mpmath.mpf(10) ** 10
                s = mpmath.fsum(1 / (zi - z[j]) for j in range(d) if j != i)
                w = ratio / (1 - ratio * s)
                z[i] = zi - w
                biggest = max(biggest, abs(w) / max(1, abs(zi)))
            if biggest < eps:
                break
        else:
            raise RootFindingError(f"Aberth iteration did not converge for degree {d}")
        radii = _inclusion_radii(c, z)
        out = []
        for zi, r in zip(z, radii):
            a = abs(zi)
            lp = mpmath.log(a) if a > 1 else mpmath.mpf(0)
            hi_lp = mpmath.log(a + r) if a + r > 1 else mpmath.mpf(0)
            lo_lp = mpmath.log(a - r) if a - r > 1 else mpmath.mpf(0)
            err = max(hi_lp - lp, lp - lo_lp)
            center = complex(zi)
            # the reported center is rounded to double; widen the disk to match
            r_out = r + abs(zi - mpmath.mpc(center))
            out.append(RootEnclosure(center, float(r_out) * (1 + 2.0 ** -50), float(lp), float(err)))
        return out


def _inclusion_radii(c: list, z: list) -> list:
    d = len(z)
    hi = c[::-1]
    lead = c[-1]
    # evaluation slack at working precision
    ulp = mpmath.mpf(2) ** (-mpmath.mp.prec)
    radii = []
    for i in range(d):
        zi = z[i]
        pv = abs(mpmath.polyval(hi, zi))
        pv += 4 * d * ulp * mpmath.polyval([abs(x) for x in hi], abs(zi))
        denom = abs(lead) * mpmath.fprod(abs(zi - z[j]) for j in range(d) if j != i)
        radii.append(d * pv / denom)
    for i in range(d):
        for j in range(i):
            if abs(z[i] - z[j]) <= radii[i] + radii[j]:
                # overlapping disks: fall back to the common cluster radius
                big = max(radii)
                radii = [big * d] * d
                return radii
    return radii


def _log_abs_fraction(r: Fraction) -> float:
    if r == 0:
        return -math.inf
    return math.log(abs(r.numerator)) - math.log(r.denominator)


def log_abs_rational(c) -> float:
    return _log_abs_fraction(Fraction(c))
