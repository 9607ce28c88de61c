"""Density of sets T containing ``p * Z_{>= m_p}`` for every prime ``p >= p0``.

The simulated set is always the minimal one,

    T = { n : some prime p >= p0 divides n with n / p >= m_p },

so the observed density is a lower bound for every admissible T.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .arith import euler_phi, primes_from, primes_upto
from .fermat import BoundInputs, multiple_bound

DEFAULT_SIMULATION_CAP = 200_000_000


class DensityError(ValueError):
    pass


# m_p rules

@dataclass(frozen=True)
class ConstRule:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DensityError("m_p must be at least 1")

    def m(self, p: int) -> int:
        return self.k

    def to_json(self):
        return {"const": self.k}


@dataclass(frozen=True)
class IdentityRule:
    def m(self, p: int) -> int:
        return p

    def to_json(self):
        return "identity"


@dataclass(frozen=True)
class TableRule:
    table: tuple          # sorted ((p, m_p), ...)
    default: int | None = None

    def m(self, p: int) -> int:
        for q, v in self.table:
            if q == p:
                return v
        if self.default is None:
            raise DensityError(f"table has no entry for p = {p} and no default")
        return self.default

    def to_json(self):
        d = {"table": {str(p): v for p, v in self.table}}
        if self.default is not None:
            d["default"] = self.default
        return d


@dataclass(frozen=True)
class ExpProfileRule:
    """``m_p = ceil(exp(H_p / a))`` with ``H_p`` constant or ``scale * log p``."""

    a: float
    H: float | None = None
    log_scale: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise DensityError("a must be positive")
        if (self.H is None) == (self.log_scale is None):
            raise DensityError("give exactly one of H (constant) or log_scale")

    def H_of(self, p: int) -> float:
        return self.H if self.H is not None else self.log_scale * math.log(p)

    def exponent(self, p: int) -> float:
        return self.H_of(p) / self.a

    def m(self, p: int) -> int:
        return multiple_bound(BoundInputs(self.H_of(p), self.a)).exp_bound

    def to_json(self):
        H = self.H if self.H is not None else ("log" if self.log_scale == 1 else {"log_scale": self.log_scale})
        return {"exp_profile": {"a": self.a, "H": H}}


def _m_capped(rule, p: int, limit: int) -> int | None:
    """``m_p``, or ``None`` when ``p * m_p > limit`` (avoids huge exponentials)."""
    if isinstance(rule, ExpProfileRule) and rule.exponent(p) > math.log(limit / p) + 1:
        return None
    m = rule.m(p)
    return m if p * m <= limit else None


@dataclass(frozen=True)
class DensitySpec:
    p0: int
    rule: object = ConstRule(1)

    def __post_init__(self):
        if self.p0 < 1:
            raise DensityError("p0 must be positive")

    def m(self, p: int) -> int:
        return self.rule.m(p)

    @classmethod
    def from_json(cls, data) -> "DensitySpec":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["p0"]), rule_from_json(data.get("rule", {"const": 1})))

    def to_json(self) -> dict:
        return {"p0": self.p0, "rule": self.rule.to_json()}


def rule_from_json(r):
    if r == "identity" or (isinstance(r, dict) and "identity" in r):
        return IdentityRule()
    if not isinstance(r, dict) or len(r) == 0:
        raise DensityError(f"unrecognized rule {r!r}")
    if "const" in r:
        return ConstRule(int(r["const"]))
    if "table" in r:
        tab = tuple(sorted((int(k), int(v)) for k, v in r["table"].items()))
        default = r.get("default")
        return TableRule(tab, None if default is None else int(default))
    if "exp_profile" in r:
        e = r["exp_profile"]
        H = e["H"]
        if H == "log":
            return ExpProfileRule(float(e["a"]), log_scale=1.0)
        if isinstance(H, dict):
            return ExpProfileRule(float(e["a"]), log_scale=float(H["log_scale"]))
        return ExpProfileRule(float(e["a"]), H=float(H))
    raise DensityError(f"unrecognized rule {r!r}")


# simulation

@dataclass(frozen=True)
class DensityResult:
    m: int
    count: int

    @property
    def ratio(self) -> float:
        return self.count / self.m

    def to_dict(self) -> dict:
        return {"m": self.m, "count": self.count, "ratio": self.ratio}


def membership(spec: DensitySpec, m: int, cap: int = DEFAULT_SIMULATION_CAP) -> np.ndarray:
    """Boolean array ``T[k]`` for ``0 <= k <= m`` (index 0 unused)."""
    if m < 1:
        raise DensityError("m must be positive")
    if m > cap:
        raise DensityError(f"m = {m} exceeds the simulation cap {cap}")
    T = np.zeros(m + 1, dtype=bool)
    for p in primes_upto(m):
        p = int(p)
        if p < spec.p0:
            continue
        mp = _m_capped(spec.rule, p, m)
        if mp is None:
            continue
        T[p * mp::p] = True
    return T


def density_simulate(spec: DensitySpec, m: int, cap: int = DEFAULT_SIMULATION_CAP) -> DensityResult:
    """Count ``T n [1, m]`` for the minimal T of the spec."""
    T = membership(spec, m, cap)
    return DensityResult(m, int(np.count_nonzero(T[1:])))


def density_profile(spec: DensitySpec, checkpoints, cap: int = DEFAULT_SIMULATION_CAP) -> list[DensityResult]:
    """Counts at several ``m`` from a single sieve up to the largest one."""
    checkpoints = sorted(int(c) for c in checkpoints)
    T = membership(spec, checkpoints[-1], cap)
    csum = np.cumsum(T)
    return [DensityResult(c, int(csum[c])) for c in checkpoints]


# certificates

@dataclass(frozen=True)
class DensityCertificate:
    epsilon: Fraction
    primes: tuple
    Q: int
    phi_Q: int
    euler_product: Fraction
    n0: int
    m_threshold: int
    verified: bool | None = None       # None: threshold beyond the simulation cap
    verification: dict | None = None

    def check_arithmetic(self) -> bool:
        """Exact consistency of all fields."""
        return (self.Q == math.prod(self.primes)
                and self.phi_Q == math.prod(p - 1 for p in self.primes)
                and self.phi_Q == euler_phi(self.Q)
                and Fraction(self.phi_Q, self.Q) == self.euler_product
                and self.euler_product <= self.epsilon
                and self.m_threshold >= max(Fraction(self.n0 - 1) / self.epsilon,
                                            Fraction(self.Q) / self.epsilon))

    def to_dict(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "primes": list(self.primes),
            "Q": self.Q,
            "phi_Q": self.phi_Q,
            "euler_product": str(self.euler_product),
            "euler_product_float": float(self.euler_product),
            "n0": self.n0,
            "m_threshold": self.m_threshold,
            "verified": self.verified,
            "verification": self.verification,
        }


def _as_fraction(eps) -> Fraction:
    if isinstance(eps, float):
        return Fraction(repr(eps))
    return Fraction(eps)


def density_certificate(spec: DensitySpec, epsilon, *, verify_cap: int = 10_000_000,
                        max_primes: int = 100_000) -> DensityCertificate:
    """Primes ``p_1 < ... < p_r`` from ``p0`` with ``prod (1 - 1/p_i) <= eps`` and the derived bounds.

    ``n0 = max p_i * m_{p_i}`` makes every ``n >= n0`` sharing a factor with
    ``Q`` a member of T. Past ``m_threshold`` the density is at least
    ``1 - 3 eps``; this is simulated when the threshold is within ``verify_cap``.
    """
    eps = _as_fraction(epsilon)
    if not 0 < eps < 1:
        raise DensityError("epsilon must lie in (0, 1)")
    primes = []
    log_eps = math.log(eps.numerator) - math.log(eps.denominator)
    log_prod = 0.0
    for p in primes_from(spec.p0):
        primes.append(p)
        log_prod += math.log1p(-1.0 / p)
        # float screen, then exact confirmation
        if log_prod <= log_eps + 1e-9:
            Q = math.prod(primes)
            phi_Q = math.prod(q - 1 for q in primes)
            if Fraction(phi_Q, Q) <= eps:
                break
        if len(primes) >= max_primes:
            raise DensityError(f"Euler product still above epsilon after {max_primes} primes")
    prod = Fraction(phi_Q, Q)
    n0 = max(p * spec.m(p) for p in primes)
    bound = max(Fraction(n0 - 1) / eps, Fraction(Q) / eps)
    m_thr = max(1, math.ceil(bound))
    verified = None
    report = None
    if m_thr <= verify_cap:
        T = membership(spec, m_thr, cap=max(verify_cap, m_thr))
        count = int(np.count_nonzero(T[1:]))
        ratio = count / m_thr
        # the counting step of the argument: complement <= (n0 - 1) + (m + Q) eps
        complement = m_thr - count
        step_bound = (n0 - 1) + (m_thr + Q) * eps
        verified = bool(Fraction(count, m_thr) >= 1 - 3 * eps and complement <= step_bound)
        report = {"m": m_thr, "count": count, "ratio": ratio,
                  "lower_bound": float(1 - 3 * eps),
                  "complement": complement, "complement_bound": float(step_bound)}
    return DensityCertificate(eps, tuple(primes), Q, phi_Q, prod, n0, m_thr, verified, report)


# the whole argument at desk scale

@dataclass(frozen=True)
class PipelineReport:
    spec: DensitySpec
    sample_m_p: tuple
    profile: tuple
    certificate: DensityCertificate | None
    certificate_error: str | None = None

    def to_dict(self) -> dict:
        return {
            "density_spec": self.spec.to_json(),
            "sample_m_p": [{"p": p, "m_p": m} for p, m in self.sample_m_p],
            "profile": [r.to_dict() for r in self.profile],
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "certificate_error": self.certificate_error,
        }


def theorem_pipeline(H_of_p: Callable[[int], float] | float | str, a: float, epsilon, m: int,
                     p0: int = 5, checkpoints: int = 4, verify_cap: int = 10_000_000) -> PipelineReport:
    """Per-prime multipliers from height data, then density simulation and certificate.

    ``H_of_p`` is the maximal height on ``F_p(K)`` (a hypothetical input: a
    number, ``"log"`` for ``log p``, or a callable). It becomes
    ``m_p = ceil(exp(H_p / a))``.
    """
    if not a > 0:
        raise DensityError("a must be positive")
    if callable(H_of_p):
        tab_primes = [int(p) for p in primes_upto(m) if p >= p0]
        table = tuple((p, multiple_bound(BoundInputs(float(H_of_p(p)), a)).exp_bound)
                      for p in tab_primes if H_of_p(p) / a <= math.log(m) + 2)
        rule = TableRule(table, default=m + 1)
    elif H_of_p == "log":
        rule = ExpProfileRule(a, log_scale=1.0)
    else:
        rule = ExpProfileRule(a, H=float(H_of_p))
    spec = DensitySpec(p0, rule)
    sample = []
    for p in primes_from(p0):
        mp = _m_capped(rule, p, 10 ** 30)
        sample.append((p, mp if mp is not None else -1))
        if len(sample) >= 5:
            break
    cps = sorted({max(1, m >> k) for k in range(checkpoints)})
    profile = tuple(density_profile(spec, cps))
    cert, err = None, None
    try:
        cert = density_certificate(spec, epsilon, verify_cap=verify_cap)
    except DensityError as exc:
        err = str(exc)
    return PipelineReport(spec, tuple(sample), profile, cert, err)
