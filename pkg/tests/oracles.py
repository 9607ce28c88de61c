"""Independent reference computations used by several test modules."""
import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np


def mahler_polyroots(coeffs, dps=60):
    """Jensen's formula with sympy's square-free split and mpmath.polyroots.

    ``coeffs`` are listed low degree first.
    """
    import sympy
    t = sympy.Symbol("t")
    cs = [sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs]
    expr = sum(c * t ** k for k, c in enumerate(cs))
    lead, factors = sympy.sqf_list(sympy.Poly(expr, t))
    with mpmath.workdps(dps):
        total = mpmath.log(abs(mpmath.mpf(lead.p) / lead.q))
        for fac, mult in factors:
            fc = [mpmath.mpf(int(c.p)) / int(c.q) for c in fac.all_coeffs()]
            total += mult * mpmath.log(abs(fc[0]))
            if len(fc) > 1:
                rs = mpmath.polyroots(fc, maxsteps=800, extraprec=4 * dps)
                total += mult * mpmath.fsum(max(mpmath.mpf(0), mpmath.log(abs(r))) for r in rs)
        return float(total)


@lru_cache(maxsize=None)
def mahler_1xy_closed_form() -> float:
    """mu(1 + X + Y) = 3 sqrt(3) / (4 pi) * L(chi_{-3}, 2)."""
    with mpmath.workdps(30):
        L = (mpmath.psi(1, mpmath.mpf(1) / 3) - mpmath.psi(1, mpmath.mpf(2) / 3)) / 9
        return float(3 * mpmath.sqrt(3) / (4 * mpmath.pi) * L)


@lru_cache(maxsize=None)
def mahler_1xy_dense_grid(M: int = 4096) -> float:
    """Midpoint rule on an M x M grid, evaluated directly (no FFT)."""
    t = (np.arange(M) + 0.5) / M
    zx = np.exp(2j * np.pi * t)
    total = math.fsum(np.log(np.abs(1 + zx[i] + zx)).sum() for i in range(M))
    return total / (M * M)


def minimal_T_bruteforce(p0: int, m_of_p, m: int) -> int:
    """Count n <= m with a prime p >= p0 dividing n and n / p >= m_p, by plain loops."""
    count = 0
    for k in range(1, m + 1):
        n, p, hit = k, 2, False
        while n > 1 and not hit:
            if p * p > n:
                p = n
            if n % p == 0:
                if p >= p0 and k // p >= m_of_p(p):
                    hit = True
                while n % p == 0:
                    n //= p
            p += 1
        count += hit
    return count
