"""Command-line front end.

Every subcommand prints a human-readable summary, or with ``--json`` a single
JSON document ``{command, inputs, result, error_bound?, non_converged?, warnings}``.
Exit status: 0 on success (including flagged non-convergence), 1 on domain
errors, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Any, Sequence

from . import exprparse
from .adelic import (AdelicParams, DivisorPlace, FactoredElement, PrimePlace, ProjPoint, TorusPlace,
                     height, is_height_zero, log_absolute_value, product_formula_residual,
                     torsion_witness)
from .density import DensityError, DensitySpec, density_certificate, density_profile, rule_from_json, \
    theorem_pipeline
from .fermat import (BoundInputs, fermat_check_point, fermat_property_over_points, min_positive_height,
                     multiple_bound, roots_of_unity_solutions)
from .mahler import QuadratureSpec, mahler_measure, northcott_enumerate
from .polycore import PolynomialError, PrimeDivisor, RationalFunction

GRAMMAR = """expression grammar:
  integers, variables x1..xn (x, y, z when n <= 3), + - * / ^, parentheses.
  ^ takes a non-negative integer literal and is right-associative;
  -x^2 means -(x^2). Rationals are written as quotients, e.g. 3/2.
  Use -- before a positional expression that starts with '-'."""

# defaults for every option that a --config file may supply
DEFAULTS = {
    "n": 1, "lam": 1.0, "method": "auto", "res": 64, "tol": 1e-3, "budget": 10_000_000,
    "json": False, "seed": 0, "workers": 1,
    "deg": None, "order": None, "H": None, "a": None, "deg_bound": 2, "coeff_bound": 4,
    "dim": 2, "p0": 5, "rule": None, "spec": None, "m": None, "epsilon": None,
    "verify_cap": 10_000_000, "C": None, "scalar": "1", "at": None, "checkpoints": 4,
}


class UsageError(Exception):
    pass


# argument helpers

_LOG = re.compile(r"^\s*(?:log|ln)\s*\(?\s*([0-9/.]+)\s*\)?\s*$")


def real_arg(text) -> float:
    """A float literal, or ``log(r)`` / ``log r`` for a positive rational r."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _LOG.match(text)
    if m:
        r = Fraction(m.group(1))
        if r <= 0:
            raise UsageError(f"log of a non-positive number: {text!r}")
        return math.log(r.numerator) - math.log(r.denominator)
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"not a real number: {text!r}") from None


def rational_arg(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _jsonable(x: Any) -> Any:
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _fmt(f) -> str:
    return exprparse.format(f)


# context shared by the command handlers

class Ctx:
    def __init__(self, opts: dict):
        self.o = opts
        n = int(opts["n"])
        if n < 1:
            raise UsageError("-n must be at least 1")
        self.n = n
        try:
            self.params = AdelicParams(n, real_arg(opts["lam"]))
            self.spec = QuadratureSpec(method=opts["method"], resolution=int(opts["res"]),
                                       tol=float(opts["tol"]), budget=int(opts["budget"]),
                                       seed=int(opts["seed"]), workers=int(opts["workers"]))
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def parse(self, text: str) -> RationalFunction:
        return exprparse.parse(text, self.n)

    def poly(self, text: str):
        r = self.parse(text)
        if not r.is_polynomial():
            raise PolynomialError(f"{text!r} is not a polynomial")
        return r.as_poly()

    def need(self, key: str):
        v = self.o.get(key)
        if v is None:
            raise UsageError(f"--{key.replace('_', '-')} is required")
        return v


def _quad_inputs(c: Ctx) -> dict:
    s = c.spec
    return {"method": s.method, "res": s.resolution, "tol": s.tol, "budget": s.budget, "seed": s.seed}


# handlers: each returns (inputs, result, error_bound or None, non_converged or None, warnings)

def cmd_mahler(c: Ctx, a):
    f = c.parse(a.expr)
    if f.is_zero():
        raise PolynomialError("the Mahler measure of 0 is -infinity")
    s = f.scalar
    est = mahler_measure(f.num, c.spec)
    if not f.den.is_constant():
        # mu(num / den) = mu(num) - mu(den)
        den = mahler_measure(f.den, c.spec)
        est = est + replace(den, value=-den.value)
    value = math.log(abs(s.numerator)) - math.log(s.denominator) + est.value
    result = {"polynomial": _fmt(f), "value": value, "method": est.method,
              "evaluations": est.evaluations}
    return ({"expr": a.expr, "n": c.n, **_quad_inputs(c)}, result, est.error_bound,
            not est.converged, list(est.warnings))


def cmd_height(c: Ctx, a):
    pt = ProjPoint([c.parse(t) for t in a.coords], c.n)
    h = height(pt, c.params, c.spec)
    result = {"point": [_fmt(p) for p in pt.coords], **h.to_dict()}
    result.pop("error_bound")
    return ({"coords": a.coords, "n": c.n, "lambda": c.params.lam, **_quad_inputs(c)}, result,
            h.error_bound, not h.converged, list(h.integral.warnings))


def _place(c: Ctx, text: str):
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("inf", "infinity"):
        return DivisorPlace(PrimeDivisor.infinity(c.n))
    if kind == "prime":
        return PrimePlace(int(rest))
    if kind == "torus":
        t = tuple(float(Fraction(v)) for v in rest.split(","))
        return TorusPlace(t)
    if kind == "divisor":
        return DivisorPlace(PrimeDivisor(c.poly(rest)))
    raise UsageError(f"unknown place {text!r}; use inf, prime:P, torus:t1,..,tn or divisor:EXPR")


def cmd_absval(c: Ctx, a):
    place = _place(c, c.need("at"))
    f = c.parse(a.expr)
    v, err = log_absolute_value(f, place, c.params, c.spec)
    result = {"place": place.describe(), "log_abs": v, "abs": math.exp(v) if v < 700 else math.inf}
    return ({"expr": a.expr, "at": c.o["at"], "n": c.n, "lambda": c.params.lam}, result, err,
            None, [])


def cmd_pf_check(c: Ctx, a):
    factors = []
    for item in a.factor or []:
        if len(item) not in (1, 2):
            raise UsageError("--factor takes EXPR [EXPONENT]")
        e = int(item[1]) if len(item) == 2 else 1
        factors.append((c.poly(item[0]), e))
    elem = FactoredElement.build(rational_arg(c.o["scalar"]), factors)
    rep = product_formula_residual(elem, c.params, c.spec)
    result = rep.to_dict()
    result["element"] = _fmt(elem.expand(c.n))
    result.pop("error_bound")
    warnings = result.pop("warnings")
    nc = result.pop("non_converged")
    return ({"scalar": str(c.o["scalar"]), "factors": [list(f) for f in a.factor or []], "n": c.n,
             "lambda": c.params.lam, **_quad_inputs(c)}, result, rep.error_bound, nc, warnings)


def cmd_torsion(c: Ctx, a):
    raw = [c.parse(t) for t in a.coords]
    pt = ProjPoint(raw, c.n)
    zero = is_height_zero(pt, c.params)
    g = torsion_witness(raw, c.n, c.params)
    result = {"point": [_fmt(p) for p in pt.coords], "height_zero": zero,
              "witness": None if g is None else _fmt(g)}
    return ({"coords": a.coords, "n": c.n, "lambda": c.params.lam}, result, None, None, [])


def cmd_fermat_check(c: Ctx, a):
    N = int(c.need("deg"))
    if a.point:
        pts = [ProjPoint([c.parse(t) for t in trip], c.n) for trip in a.point]
        rep = fermat_property_over_points(pts, N, c.params)
        result = {"holds": rep.holds, "equivalence_ok": rep.equivalence_ok,
                  "witnesses": [[_fmt(p) for p in w.coords] for w in rep.witnesses],
                  "points": [{"point": [_fmt(p) for p in r.point.coords], "height_zero": r.height_zero,
                              "torsion_coordinates": r.torsion_coordinates} for r in rep.reports]}
        return ({"points": a.point, "deg": N, "n": c.n, "lambda": c.params.lam}, result, None, None, [])
    if len(a.coords) != 2:
        raise UsageError("fermat-check takes X Y, or one or more --point X Y Z")
    chk = fermat_check_point(c.parse(a.coords[0]), c.parse(a.coords[1]), N, c.n)
    result = {"on_curve": chk.on_curve, "torsion": chk.torsion_solution}
    return ({"x": a.coords[0], "y": a.coords[1], "deg": N, "n": c.n}, result, None, None, [])


def cmd_solutions(c: Ctx, a):
    N = int(c.need("deg"))
    M = int(c.need("order"))
    sols = roots_of_unity_solutions(N, M)
    sols.sort(key=lambda s: (s[0].sort_key(), s[1].sort_key()))

    def ang(t):
        return None if t.is_zero else str(t.q)

    nonzero = [(ang(x), ang(y)) for x, y in sols if not x.is_zero and not y.is_zero]
    result = {"solutions": [[ang(x), ang(y)] for x, y in sols], "count": len(sols),
              "nonzero_solutions": [list(s) for s in nonzero]}
    return ({"deg": N, "order": M}, result, None, None, [])


def cmd_bound(c: Ctx, a):
    b = BoundInputs(real_arg(c.need("H")), real_arg(c.need("a")))
    mb = multiple_bound(b)
    return ({"H": str(c.o["H"]), "a": str(c.o["a"])}, mb.to_dict(), None, None, [])


def cmd_min_height(c: Ctx, a):
    r = min_positive_height(c.params, int(c.o["deg_bound"]), int(c.o["coeff_bound"]),
                            int(c.o["dim"]), c.spec)
    result = r.to_dict()
    result["point"] = [_fmt(p) for p in r.point.coords]
    result.pop("error_bound")
    return ({"n": c.n, "lambda": c.params.lam, "deg_bound": int(c.o["deg_bound"]),
             "coeff_bound": int(c.o["coeff_bound"]), "dim": int(c.o["dim"]), **_quad_inputs(c)},
            result, r.error_bound, None, [])


def _density_spec(c: Ctx) -> DensitySpec:
    if c.o.get("spec") is not None:
        text = c.o["spec"]
        if isinstance(text, str) and text.startswith("@"):
            with open(text[1:]) as fh:
                text = fh.read()
        return DensitySpec.from_json(text if isinstance(text, str) else json.dumps(text))
    rule = c.o.get("rule")
    if rule is None:
        rule = {"const": 1}
    elif isinstance(rule, str):
        if rule == "identity":
            pass
        elif rule.startswith("const:"):
            rule = {"const": int(rule[6:])}
        else:
            rule = json.loads(rule)
    return DensitySpec(int(c.o["p0"]), rule_from_json(rule))


def cmd_density(c: Ctx, a):
    spec = _density_spec(c)
    ms = c.need("m")
    ms = [int(float(v)) for v in (ms if isinstance(ms, list) else [ms])]
    prof = density_profile(spec, ms)
    result = {"profile": [r.to_dict() for r in prof]}
    return ({"density_spec": spec.to_json(), "m": ms}, result, None, None, [])


def cmd_certificate(c: Ctx, a):
    spec = _density_spec(c)
    eps = rational_arg(c.need("epsilon"))
    cert = density_certificate(spec, eps, verify_cap=int(c.o["verify_cap"]))
    warnings = [] if cert.verified is not None else ["m_threshold exceeds the simulation cap: unverified at scale"]
    return ({"density_spec": spec.to_json(), "epsilon": str(eps), "verify_cap": int(c.o["verify_cap"])},
            cert.to_dict(), None, None, warnings)


def cmd_pipeline(c: Ctx, a):
    H = c.need("H")
    H_arg = "log" if str(H).strip().lower() in ("log", "log p", "logp") else real_arg(H)
    rep = theorem_pipeline(H_arg, real_arg(c.need("a")), rational_arg(c.need("epsilon")),
                           int(float(c.need("m"))), p0=int(c.o["p0"]),
                           checkpoints=int(c.o["checkpoints"]), verify_cap=int(c.o["verify_cap"]))
    warnings = [rep.certificate_error] if rep.certificate_error else []
    return ({"H": str(H), "a": str(c.o["a"]), "epsilon": str(c.o["epsilon"]), "m": int(float(c.o["m"])),
             "p0": int(c.o["p0"])}, rep.to_dict(), None, None, warnings)


def cmd_enum(c: Ctx, a):
    if c.n != 1:
        raise UsageError("enum lists univariate polynomials; use -n 1")
    d = int(c.need("deg"))
    C = real_arg(c.need("C"))
    polys = northcott_enumerate(d, C)
    return ({"deg": d, "C": str(c.o["C"])}, {"count": len(polys), "polynomials": [_fmt(p) for p in polys]},
            None, None, [])


# parser

COMMANDS = {
    "mahler": (cmd_mahler, "Mahler measure of a polynomial or rational function",
               "Computes mu(f), the mean of log|f| over the unit torus. Univariate input uses "
               "Jensen's formula (log|lead| + sum of log max(1, |root|)); several variables use "
               "adaptive torus quadrature with an error bound."),
    "height": (cmd_height, "height of a projective point",
               "Height of (f0 : ... : fm) over Q(X1..Xn): lambda times the maximal degree of a "
               "coprime integral representative, plus the torus integral of log max|fi|. The value "
               "does not depend on the representative, thanks to the product formula."),
    "absval": (cmd_absval, "absolute value of f at one place",
               "|f| at a place: --at inf (hyperplane at infinity), divisor:P (prime divisor with "
               "constant lambda*deg P + mu(P)), prime:p (Gauss norm) or torus:t1,..,tn "
               "(|f(e^{2 pi i t})|)."),
    "pf-check": (cmd_pf_check, "product formula residual",
                 "Sums log|f| over every place (prime divisors, primes, the torus) for "
                 "f = scalar * prod P_i^e_i and reports the residual, which vanishes by the "
                 "product formula, with a rigorous error bound."),
    "torsion": (cmd_torsion, "height-zero test and torsion witness",
                "For lambda > 0 a point has height zero exactly when it is a multiple of a tuple "
                "with entries in {0, 1, -1}. Reports the exact test and the scaling witness."),
    "fermat-check": (cmd_fermat_check, "Fermat curve membership and Fermat's property",
                     "With X Y: checks x^N + y^N = 1 exactly and whether both coordinates are "
                     "torsion (0 or +-1). With --point X Y Z (repeatable): checks that every "
                     "supplied point of x^N + y^N = z^N has height zero, and that height zero "
                     "matches torsion coordinates."),
    "solutions": (cmd_solutions, "root-of-unity solutions of x^N + y^N = 1",
                  "All (x, y) in {0} u mu_M with x^N + y^N = 1. Nonzero solutions come only "
                  "from (x^N, y^N) = (e^{i pi/3}, e^{-i pi/3}) up to swapping. Angles are printed "
                  "as q in [0, 1) for e^{2 pi i q}; null is the zero element."),
    "bound": (cmd_bound, "multiple bound m0 = ceil(exp(H/a))",
              "Given the maximal height H on F_N and the least positive height a, every F_{Nm} "
              "with m >= ceil(exp(H/a)) has only height-zero points. The tight bound "
              "floor(H/a) + 1 is reported alongside."),
    "min-height": (cmd_min_height, "least positive height in a coefficient box",
                   "Exhaustive search of canonical points of P^dim with degree and coefficient "
                   "bounds for the least positive height; over Q(X1..Xn) it is min(lambda, log 2)."),
    "density": (cmd_density, "density of the minimal set T",
                "Counts T n [1, m] where T is the union of p*Z_{>= m_p} over primes p >= p0. "
                "Such T have density 1. Rules: const:K, identity, or JSON "
                "({\"table\": {...}, \"default\": k} or {\"exp_profile\": {\"a\": a, \"H\": h}})."),
    "certificate": (cmd_certificate, "density certificate for a given epsilon",
                    "Chooses primes p_1 < ... < p_r >= p0 with prod(1 - 1/p_i) <= epsilon, then "
                    "Q, phi(Q), n0 = max p_i m_{p_i} and a threshold beyond which the density of "
                    "T is at least 1 - 3 epsilon; verified by simulation when within --verify-cap."),
    "pipeline": (cmd_pipeline, "height data to density report",
                 "From per-prime maximal heights H_p (a number, or 'log' for log p) and a least "
                 "positive height a, sets m_p = ceil(exp(H_p / a)), simulates the density of the "
                 "resulting set of Fermat exponents and attaches an epsilon certificate."),
    "enum": (cmd_enum, "integer polynomials of bounded Mahler measure",
             "Lists univariate integer polynomials of degree <= --deg and Mahler measure <= --C "
             "(positive leading coefficient). The list is finite: Northcott's property."),
}


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common options")
    g.add_argument("-n", type=int, help="number of variables (default 1)")
    g.add_argument("--lambda", dest="lam", help="lambda >= 0; accepts log(r) (default 1)")
    g.add_argument("--method", choices=("auto", "jensen", "grid", "qmc"), help="quadrature method")
    g.add_argument("--res", type=int, help="base grid resolution (default 64)")
    g.add_argument("--tol", type=float, help="target error bound (default 1e-3)")
    g.add_argument("--budget", type=int, help="integrand evaluation budget (default 1e7)")
    g.add_argument("--seed", type=int, help="seed for randomized lattice shifts (default 0)")
    g.add_argument("--workers", type=int, help="worker threads; results do not depend on it")
    g.add_argument("--json", action="store_const", const=True, help="emit one JSON document")
    g.add_argument("--config", help="JSON file of option defaults; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adelicq", description="Heights, Mahler measures and Fermat curves over Q(X1..Xn).",
        epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    subs = {}
    for name, (_, short, long) in COMMANDS.items():
        sp = sub.add_parser(name, help=short, description=long, epilog=GRAMMAR,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        _common(sp)
        subs[name] = sp
    subs["mahler"].add_argument("expr")
    subs["height"].add_argument("coords", nargs="+")
    subs["absval"].add_argument("expr")
    subs["absval"].add_argument("--at", help="inf | divisor:EXPR | prime:P | torus:t1,..,tn")
    subs["pf-check"].add_argument("--scalar", help="rational scalar (default 1); write --scalar=-3/4 for negatives")
    subs["pf-check"].add_argument("-f", "--factor", action="append", nargs="+", metavar="EXPR [EXP]",
                                  help="irreducible factor with optional integer exponent")
    subs["torsion"].add_argument("coords", nargs="+")
    subs["fermat-check"].add_argument("coords", nargs="*")
    subs["fermat-check"].add_argument("--point", action="append", nargs=3, metavar=("X", "Y", "Z"))
    for name in ("fermat-check", "solutions"):
        subs[name].add_argument("--deg", type=int, help="Fermat exponent N")
    subs["solutions"].add_argument("--order", type=int, help="torsion order M")
    for name in ("bound", "pipeline"):
        subs[name].add_argument("--H", dest="H", help="maximal height (number or log(r); 'log' in pipeline)")
        subs[name].add_argument("--a", dest="a", help="least positive height")
    mh = subs["min-height"]
    mh.add_argument("--deg-bound", type=int, help="maximal degree (default 2)")
    mh.add_argument("--coeff-bound", type=int, help="maximal |coefficient| (default 4)")
    mh.add_argument("--dim", type=int, help="projective dimension (default 2)")
    for name in ("density", "certificate"):
        sp = subs[name]
        sp.add_argument("--p0", type=int, help="least prime used (default 5)")
        sp.add_argument("--rule", help="const:K | identity | JSON rule")
        sp.add_argument("--spec", help="JSON {p0, rule} or @path")
    subs["density"].add_argument("--m", nargs="+", help="one or more m")
    for name in ("certificate", "pipeline"):
        subs[name].add_argument("--epsilon", help="epsilon in (0, 1), rational")
        subs[name].add_argument("--verify-cap", type=int, help="largest simulated threshold (default 1e7)")
    pl = subs["pipeline"]
    pl.add_argument("--m", help="simulation size")
    pl.add_argument("--p0", type=int, help="least prime used (default 5)")
    pl.add_argument("--checkpoints", type=int, help="number of halving checkpoints (default 4)")
    subs["enum"].add_argument("--deg", type=int, help="degree bound")
    subs["enum"].add_argument("--C", dest="C", help="Mahler measure bound (number or log(r))")
    return parser


def _merge(ns: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for k, v in cfg.items():
            key = {"lambda": "lam"}.get(k, k.replace("-", "_"))
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}")
            opts[key] = v
    for k, v in vars(ns).items():
        if k in DEFAULTS and v is not None:
            opts[k] = v
    return opts


def _emit(command: str, inputs, result, err, non_converged, warnings, as_json: bool, out) -> None:
    doc = {"command": command, "inputs": inputs, "result": result}
    if err is not None:
        doc["error_bound"] = err
    if non_converged is not None:
        doc["non_converged"] = bool(non_converged)
    doc["warnings"] = list(warnings)
    doc = _jsonable(doc)
    if as_json:
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    for k, v in doc["result"].items():
        out.write(f"{k}: {v if not isinstance(v, (list, dict)) else json.dumps(v)}\n")
    if err is not None:
        out.write(f"error_bound: {doc['error_bound']}\n")
    if doc.get("non_converged"):
        out.write("non_converged: true\n")
    for w in doc["warnings"]:
        out.write(f"warning: {w}\n")


DOMAIN_ERRORS = (ValueError, ArithmeticError, RuntimeError, PolynomialError, DensityError, OSError)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        opts = _merge(ns)
        ctx = Ctx(opts)
        handler = COMMANDS[ns.command][0]
        inputs, result, ebound, nc, warnings = handler(ctx, ns)
    except UsageError as exc:
        err.write(f"adelicq {ns.command}: usage error: {exc}\n")
        return 2
    except DOMAIN_ERRORS as exc:
        err.write(f"adelicq {ns.command}: error: {exc}\n")
        return 1
    _emit(ns.command, inputs, result, ebound, nc, warnings, bool(opts["json"]), out)
    return 0


def main() -> None:
    sys.exit(run())
