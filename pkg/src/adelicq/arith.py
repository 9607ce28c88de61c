"""Integer helpers: primality, trial-division factorization, totient, prime sieve."""
from __future__ import annotations

import math

import numpy as np

# deterministic Miller-Rabin witnesses for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if not isinstance(n, int) or n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def factorint(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` by trial division."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor zero")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(q: int) -> int:
    """Euler's totient via trial-division factorization."""
    if q < 1:
        raise ValueError("totient is defined for q >= 1")
    phi = q
    for p in factorint(q):
        phi = phi // p * (p - 1)
    return phi


def prime_sieve(limit: int) -> np.ndarray:
    """Boolean array ``s`` with ``s[k]`` true iff ``k`` is prime, for ``0 <= k <= limit``."""
    s = np.ones(max(limit, 1) + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if s[p]:
            s[p * p::p] = False
    return s


def primes_upto(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(prime_sieve(limit)).astype(np.int64)


def primes_from(p0: int):
    """Yield the primes ``>= p0`` in increasing order (segmented)."""
    lo = max(2, p0)
    width = 1 << 16
    while True:
        hi = lo + width
        seg = np.ones(hi - lo, dtype=bool)
        for p in primes_upto(math.isqrt(hi)):
            p = int(p)
            start = max(p * p, (lo + p - 1) // p * p)
            seg[start - lo::p] = False
        for k in np.flatnonzero(seg):
            yield int(lo + k)
        lo = hi
        width = min(width * 2, 1 << 22)
