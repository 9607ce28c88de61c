"""Mahler measures and torus integrals of ``log max_i |f_i|``.

Univariate polynomials go through Jensen's formula
``mu(f) = log|lead| + sum log max(1, |root|)`` with exact stripping of
cyclotomic factors and square-free decomposition before root finding.

Everything else is integrated numerically over ``[0, 1]^n``:

* ``grid``: shifted tensor trapezoid rule, evaluated by an n-dimensional FFT
  of the coefficient array (the rule samples ``f`` at shifted roots of unity,
  so aliasing exponents mod ``M`` is exact). The resolution doubles until twice
  the difference of consecutive levels is below ``tol``. Cells whose sample
  falls below ``singular_threshold * max|f|`` are resampled on a
  ``subdivision^n`` subgrid.
* ``qmc``: randomly shifted rank-1 lattice rule; the spread over shifts gives
  the error estimate.

Both error models are heuristic. Sums are reduced in fixed-size blocks in
index order, so results do not depend on the worker count.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .polycore import Poly, PolynomialError, ZeroPolynomialError
from .roots import aberth_roots, log_abs_rational, square_free_decomposition, strip_cyclotomic

_U = 2.0 ** -53
_BLOCK = 1 << 16
_SHIFT_SEED = (math.sqrt(5.0) - 1.0) / 2.0

METHODS = ("auto", "jensen", "grid", "qmc")


class BudgetError(RuntimeError):
    pass


class EnumerationTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "auto"
    resolution: int = 64
    levels: int = 16
    singular_threshold: float = 1e-3
    subdivision: int = 4
    tol: float = 1e-3
    budget: int = 10_000_000
    jensen_digits: int = 40
    shifts: int = 8
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.budget < 1 or self.levels < 1 or self.subdivision < 1:
            raise ValueError("budget, levels and subdivision must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if self.shifts < 2:
            raise ValueError("qmc needs at least two random shifts")

    def with_budget(self, budget: int) -> "QuadratureSpec":
        return replace(self, budget=max(1, int(budget)))


@dataclass(frozen=True)
class MahlerEstimate:
    value: float
    error_bound: float
    method: str
    evaluations: int = 0
    converged: bool = True
    warnings: tuple = ()

    def __post_init__(self):
        if not self.error_bound >= 0:
            raise ValueError("error bound must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d

    def __add__(self, other: "MahlerEstimate") -> "MahlerEstimate":
        return MahlerEstimate(
            self.value + other.value,
            self.error_bound + other.error_bound,
            self.method if self.method == other.method else "mixed",
            self.evaluations + other.evaluations,
            self.converged and other.converged,
            self.warnings + other.warnings)


NEG_INF = MahlerEstimate(-math.inf, 0.0, "exact")


# Jensen path

@lru_cache(maxsize=100_000)
def _jensen_coeffs(coeffs: tuple, digits: int) -> tuple[float, float, int]:
    lead = coeffs[-1]
    terms = [log_abs_rational(lead)]
    err = 0.0
    low = 0
    while coeffs[low] == 0:
        low += 1  # roots at 0 contribute nothing
    rest, _ = strip_cyclotomic(list(coeffs[low:]))
    nroots = len(coeffs) - 1
    if len(rest) > 1:
        for g, mult in square_free_decomposition(Poly.from_coeffs(rest)):
            for r in aberth_roots(g.univariate_coeffs(0), digits):
                terms.append(mult * r.log_plus)
                err += mult * r.log_plus_error
    value = math.fsum(terms)
    err += 2 * _U * math.fsum(abs(t) for t in terms)
    return value, err, nroots


def jensen_measure(f: Poly, digits: int = 40) -> MahlerEstimate:
    """Mahler measure of a polynomial in at most one variable via Jensen's formula."""
    if f.is_zero():
        return NEG_INF
    vs = f.variables()
    if len(vs) > 1:
        raise ValueError("Jensen's formula needs a polynomial in one variable")
    if not vs:
        return MahlerEstimate(log_abs_rational(f.constant_coeff()), 0.0, "jensen_exact")
    coeffs = tuple(Fraction(c) for c in f.univariate_coeffs(vs.pop()))
    value, err, nroots = _jensen_coeffs(coeffs, digits)
    return MahlerEstimate(value, err, "jensen_exact", nroots)


# numerical quadrature

class _Integrand:
    """``log max_i |f_i|`` on the torus, with coefficients rounded to double once."""

    def __init__(self, polys: Sequence[Poly]):
        self.n = polys[0].nvars
        self.parts = []
        self.coeff_l1 = 0.0
        for p in polys:
            items = list(p.items())
            E = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), self.n)
            C = np.array([float(c) for _, c in items], dtype=np.complex128)
            self.parts.append((E, C))
            self.coeff_l1 = max(self.coeff_l1, float(np.abs(C).sum()))

    def grid_abs(self, M: int, shift: np.ndarray) -> np.ndarray:
        shape = (M,) * self.n
        out = None
        for E, C in self.parts:
            A = np.zeros(shape, dtype=np.complex128)
            phase = np.exp(2j * np.pi * (E @ shift) / M)
            np.add.at(A, tuple((E % M).T), C * phase)
            F = np.abs(np.fft.ifftn(A, norm="forward"))
            out = F if out is None else np.maximum(out, F)
        return out

    def point_abs(self, pts: np.ndarray) -> np.ndarray:
        out = None
        step = max(1, (1 << 22) // max(len(E) for E, _ in self.parts))
        for E, C in self.parts:
            vals = np.empty(len(pts))
            for lo in range(0, len(pts), step):
                ph = pts[lo:lo + step] @ E.T.astype(np.float64)
                ph -= np.floor(ph)
                vals[lo:lo + step] = np.abs(np.exp(2j * np.pi * ph) @ C)
            out = vals if out is None else np.maximum(out, vals)
        return out


def _ordered_sum(arr: np.ndarray, workers: int) -> float:
    flat = np.ascontiguousarray(arr).ravel()
    blocks = [flat[i:i + _BLOCK] for i in range(0, flat.size, _BLOCK)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(workers) as ex:
            sums = list(ex.map(np.sum, blocks))
    else:
        sums = [np.sum(b) for b in blocks]
    return math.fsum(float(s) for s in sums)


def _parallel_map(fn, chunks, workers):
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, chunks))
    return [fn(c) for c in chunks]


def _grid_level(ig: _Integrand, M: int, spec: QuadratureSpec, budget_left: int):
    n = ig.n
    shift = np.array([(_SHIFT_SEED * (k + 1)) % 1.0 for k in range(n)])
    vals = ig.grid_abs(M, shift)
    used = vals.size
    scale = float(vals.max())
    warnings = []
    inflation = 0.0
    if scale == 0.0:
        raise ArithmeticError("integrand vanishes on the whole grid")
    thr = spec.singular_threshold * scale
    with np.errstate(divide="ignore"):
        logs = np.log(vals)
    bad = np.argwhere(vals < thr)
    unresolved = 0
    if len(bad):
        k = spec.subdivision
        sub = k ** n
        if len(bad) * sub > budget_left - used:
            unresolved = len(bad)
            warnings.append(f"skipped refinement of {len(bad)} singular cells (budget)")
            logs[vals < thr] = math.log(thr)
        else:
            offs = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.float64)
            offs = ((offs + 0.5) / k - 0.5) / M
            centers = (bad + shift) / M

            def refine(rows):
                pts = (centers[rows][:, None, :] + offs[None, :, :]).reshape(-1, n)
                v = ig.point_abs(pts).reshape(len(rows), sub)
                zero = v <= 0.0
                v = np.where(zero, thr, v)
                return np.log(v).mean(axis=1), int(zero.any(axis=1).sum())

            step = 4096
            chunks = [np.arange(i, min(i + step, len(bad))) for i in range(0, len(bad), step)]
            results = _parallel_map(refine, chunks, spec.workers)
            means = np.concatenate([r[0] for r in results])
            unresolved = sum(r[1] for r in results)
            logs[tuple(bad.T)] = means
            used += len(bad) * sub
    if unresolved:
        inflation = unresolved / vals.size * (abs(math.log(spec.singular_threshold)) + 1.0)
    total = _ordered_sum(logs, spec.workers) / vals.size
    rounding = 10 * _U * ig.coeff_l1 / thr * (n * math.log2(M) + 4) + 4 * _U * abs(total)
    return total, used, inflation + rounding, warnings


def _grid_integral(ig: _Integrand, spec: QuadratureSpec) -> MahlerEstimate:
    n = ig.n
    M = spec.resolution
    while M > 2 and M ** n > spec.budget // 2:
        M //= 2
    evals = 0
    prev = None
    warnings: list = []
    last = None
    for _ in range(spec.levels):
        if M ** n > spec.budget - evals:
            warnings.append("evaluation budget exhausted")
            break
        val, used, slack, w = _grid_level(ig, M, spec, spec.budget - evals)
        evals += used
        warnings.extend(w)
        if prev is not None:
            err = 2.0 * abs(val - prev[0]) + slack + prev[1]
            last = (val, err)
            if err <= spec.tol:
                return MahlerEstimate(val, err, "tensor_grid", evals, True, tuple(warnings))
        else:
            last = (val, math.inf)
        prev = (val, slack)
        M *= 2
    else:
        warnings.append("refinement levels exhausted")
    if last is None:
        raise BudgetError("budget too small for a single quadrature level")
    return MahlerEstimate(last[0], last[1], "tensor_grid", evals, False, tuple(warnings))


def _korobov(N: int, n: int) -> np.ndarray:
    a = int(round(N * _SHIFT_SEED)) | 1
    z = [1]
    for _ in range(n - 1):
        z.append(z[-1] * a % N)
    return np.array(z, dtype=np.int64)


def _qmc_integral(ig: _Integrand, spec: QuadratureSpec) -> MahlerEstimate:
    n = ig.n
    rng = np.random.default_rng(spec.seed)
    R = spec.shifts
    N = max(2, spec.resolution) ** 2 if n >= 2 else spec.resolution
    evals = 0
    warnings: list = []
    last = None
    for _ in range(spec.levels):
        if N * R > spec.budget - evals:
            warnings.append("evaluation budget exhausted")
            break
        base = (np.arange(N, dtype=np.int64)[:, None] * _korobov(N, n)[None, :] % N) / N
        shifts = rng.random((R, n))

        def one(u):
            pts = base + u
            pts -= np.floor(pts)
            v = ig.point_abs(pts)
            with np.errstate(divide="ignore"):
                lv = np.log(np.maximum(v, 1e-300))
            return _ordered_sum(lv, 1) / N

        ests = np.array(_parallel_map(one, list(shifts), spec.workers))
        evals += N * R
        mean = math.fsum(ests) / R
        se = float(np.std(ests, ddof=1)) / math.sqrt(R)
        err = 3.0 * se + 4 * _U * abs(mean)
        last = (mean, err)
        if err <= spec.tol:
            return MahlerEstimate(mean, err, "qmc", evals, True, tuple(warnings))
        N *= 2
    else:
        warnings.append("refinement levels exhausted")
    if last is None:
        raise BudgetError("budget too small for a single lattice rule")
    return MahlerEstimate(last[0], last[1], "qmc", evals, False, tuple(warnings))


def log_max_integral(polys: Sequence[Poly], spec: QuadratureSpec = QuadratureSpec()) -> MahlerEstimate:
    """``int_{[0,1]^n} log max_i |f_i(e^{2 pi i t})| dt`` for nonzero-tuple input.

    Zero entries are ignored. Tuples of monomials integrate exactly, since
    ``|c x^e| = |c|`` on the torus.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return NEG_INF
    n = polys[0].nvars
    if any(p.nvars != n for p in polys):
        raise PolynomialError("mismatched number of variables")
    if all(len(p) == 1 for p in polys):
        c = max(abs(Fraction(next(iter(p.items()))[1])) for p in polys)
        return MahlerEstimate(log_abs_rational(c), 0.0, "exact")
    if spec.method in ("auto", "jensen") and len(polys) == 1 and len(polys[0].variables()) <= 1:
        return jensen_measure(polys[0], spec.jensen_digits)
    if spec.method == "jensen":
        raise ValueError("Jensen's formula needs a single polynomial in one variable")
    ig = _Integrand(polys)
    if spec.method == "qmc":
        return _qmc_integral(ig, spec)
    return _grid_integral(ig, spec)


_CACHE: dict = {}


def mahler_measure(f: Poly, spec: QuadratureSpec = QuadratureSpec()) -> MahlerEstimate:
    """Mahler measure ``mu(f)``; ``-inf`` (exact) for the zero polynomial."""
    if f.is_zero():
        return NEG_INF
    key = (f, replace(spec, workers=1))
    hit = _CACHE.get(key)
    if hit is None:
        if len(f) == 1:
            hit = MahlerEstimate(log_abs_rational(next(iter(f.items()))[1]), 0.0,
                                 "jensen_exact" if f.is_constant() else "exact")
        else:
            hit = log_max_integral([f], spec)
        if len(_CACHE) > 50_000:
            _CACHE.clear()
        _CACHE[key] = hit
    return hit


def coefficient_bound_check(f: Poly, spec: QuadratureSpec = QuadratureSpec()) -> bool:
    """``mu(f) >= log min |a|`` over the nonzero coefficients ``a`` (up to the error bound)."""
    if f.is_zero():
        raise ZeroPolynomialError("coefficient bound of zero")
    est = mahler_measure(f, spec)
    low = min(log_abs_rational(c) for _, c in f.items())
    return est.value + est.error_bound >= low


def northcott_enumerate(d: int, C: float, *, tol: float = 1e-9, cap: int = 2_000_000,
                        digits: int = 40) -> list[Poly]:
    """Univariate integer polynomials with ``deg <= d`` and ``mu <= C`` (up to ``tol``).

    Candidates come from the box ``|a_i| <= binom(d, i) e^C`` (Mahler's
    coefficient bound) and are filtered with Jensen's formula. Only
    representatives with positive leading coefficient are returned.
    """
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    if C + tol < 0:
        return []
    bounds = [math.floor(math.comb(d, i) * math.exp(C + tol)) for i in range(d + 1)]
    volume = math.prod(2 * b + 1 for b in bounds)
    if volume > cap:
        raise EnumerationTooLarge(f"coefficient box has {volume} points (cap {cap})")
    out = []
    for coeffs in itertools.product(*[range(-b, b + 1) for b in bounds]):
        top = next((c for c in reversed(coeffs) if c), 0)
        if top <= 0:
            continue
        f = Poly.from_coeffs(coeffs)
        est = jensen_measure(f, digits)
        if est.value - est.error_bound <= C + tol:
            out.append(f)
    out.sort(key=lambda p: (p.total_degree(), p.sorted_terms()))
    return out
