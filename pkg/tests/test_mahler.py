import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelicq.mahler import (QuadratureSpec, coefficient_bound_check, log_max_integral, mahler_measure,
                            northcott_enumerate)
from adelicq.polycore import Poly, ZeroPolynomialError
from adelicq.roots import aberth_roots, cyclotomic, square_free_decomposition, strip_cyclotomic
from conftest import polys
from oracles import mahler_1xy_closed_form, mahler_1xy_dense_grid, mahler_polyroots

X = Poly.var(0, 1)
x, y = Poly.var(0, 2), Poly.var(1, 2)
LOG2 = math.log(2)


class TestRoots:
    def test_cyclotomic(self):
        assert cyclotomic(1) == (-1, 1)
        assert cyclotomic(6) == (1, -1, 1)
        assert cyclotomic(12) == (1, 0, -1, 0, 1)

    def test_strip(self):
        f = (X ** 2 + X + 1) ** 2 * (X - 1) * (2 * X - 1)
        rest, found = strip_cyclotomic(f.univariate_coeffs(0))
        assert Poly.from_coeffs(rest) == 2 * X - 1
        assert sorted(found) == [(1, 1), (3, 2)]

    def test_square_free(self):
        parts = square_free_decomposition((X - 1) ** 3 * (X + 2) * (X ** 2 + 1) ** 2)
        assert sorted((p.total_degree(), m) for p, m in parts) == [(1, 1), (1, 3), (2, 2)]

    @settings(max_examples=60)
    @given(polys(1, max_deg=8, coeff=20, nonzero=True).filter(lambda p: p.total_degree() >= 2))
    def test_enclosures_contain_roots(self, f):
        import mpmath
        g = square_free_decomposition(f)[0][0]
        if g.total_degree() < 1:
            return
        encl = aberth_roots(g.univariate_coeffs(0), 40)
        cs = g.univariate_coeffs(0)
        with mpmath.workdps(60):
            ref = mpmath.polyroots([mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
                                    for c in reversed(cs)], maxsteps=400, extraprec=300)
            for r in ref:
                assert any(abs(r - e.center) <= e.radius for e in encl)


class TestJensen:
    @pytest.mark.parametrize("f, value", [
        (X - 1, 0.0), ((X - 1) ** 2, 0.0), (2 * X - 1, LOG2),
        (Poly.constant(Fraction(1, 2), 1), -LOG2), (X ** 3 - X - 1, 0.2811995743229618),
    ])
    def test_values(self, f, value):
        est = mahler_measure(f)
        assert abs(est.value - value) <= 1e-12
        assert est.error_bound <= 1e-12

    def test_method_label(self):
        assert mahler_measure(2 * X - 1).method == "jensen_exact"

    def test_zero(self):
        assert mahler_measure(Poly.zero(1)).value == -math.inf

    @settings(max_examples=80)
    @given(polys(1, max_deg=10, coeff=50, nonzero=True, max_terms=8))
    def test_against_polyroots(self, f):
        est = mahler_measure(f)
        assert abs(est.value - mahler_polyroots(f.univariate_coeffs(0))) <= est.error_bound + 1e-11

    @settings(max_examples=60)
    @given(polys(1, max_deg=5, coeff=20, nonzero=True), polys(1, max_deg=5, coeff=20, nonzero=True))
    def test_additive(self, f, g):
        a, b, c = mahler_measure(f * g), mahler_measure(f), mahler_measure(g)
        assert abs(a.value - b.value - c.value) <= a.error_bound + b.error_bound + c.error_bound + 1e-14

    @given(polys(1, max_deg=5, coeff=20, nonzero=True), st.fractions(min_value=-50, max_value=50,
                                                                      max_denominator=30).filter(bool))
    def test_scale_law(self, f, c):
        a, b = mahler_measure(f.scale(c)), mahler_measure(f)
        assert abs(a.value - math.log(abs(c)) - b.value) <= a.error_bound + b.error_bound + 1e-14

    @given(polys(1, max_deg=6, coeff=20, nonzero=True))
    def test_nonnegative_for_integer_polys(self, f):
        est = mahler_measure(f)
        assert est.value >= -est.error_bound


class TestCoefficientBound:
    @pytest.mark.parametrize("f", [2 * X - 1, Poly.constant(Fraction(1, 2), 1), X ** 2 - 2 * X + 1])
    def test_examples(self, f):
        assert coefficient_bound_check(f)

    def test_zero(self):
        with pytest.raises(ZeroPolynomialError):
            coefficient_bound_check(Poly.zero(1))


class TestQuadrature:
    def test_oracles_agree(self):
        assert abs(mahler_1xy_dense_grid(4096) - mahler_1xy_closed_form()) < 1e-5

    @pytest.mark.parametrize("method", ["grid", "qmc"])
    def test_1xy(self, method):
        est = mahler_measure(1 + x + y, QuadratureSpec(method=method))
        assert est.converged
        assert abs(est.value - mahler_1xy_closed_form()) <= est.error_bound
        assert abs(est.value - 0.3230659) <= 1e-3

    @pytest.mark.parametrize("f", [2 * X - 1, X ** 2 + 3 * X + 1, X ** 3 - X - 1, 3 * X ** 2 - 2])
    def test_jensen_grid_agreement(self, f):
        j = mahler_measure(f)
        lifted = Poly(2, {(k, 0): c for (k,), c in f.items()})
        g = log_max_integral([lifted], QuadratureSpec(method="grid"))
        assert abs(j.value - g.value) <= j.error_bound + g.error_bound

    def test_singular_cyclotomic_on_grid(self):
        g = log_max_integral([Poly(2, {(1, 0): 1, (0, 0): -1})], QuadratureSpec(method="grid"))
        assert abs(g.value) <= g.error_bound

    def test_monomial_exact(self):
        est = mahler_measure(Poly(2, {(2, 1): -5}))
        assert est.value == math.log(5) and est.error_bound == 0

    @settings(max_examples=15)
    @given(polys(2, max_deg=2, coeff=4, nonzero=True))
    def test_nonnegative_n2(self, f):
        est = mahler_measure(f, QuadratureSpec(budget=2_000_000))
        assert est.value >= -est.error_bound

    def test_budget_flagged(self):
        est = log_max_integral([x - y], QuadratureSpec(method="grid", budget=50_000, tol=1e-6))
        assert not est.converged
        assert est.warnings

    def test_worker_independence(self):
        a = log_max_integral([1 + x + y], QuadratureSpec(method="grid", workers=1))
        b = log_max_integral([1 + x + y], QuadratureSpec(method="grid", workers=4))
        assert a == b
        a = log_max_integral([1 + x + y], QuadratureSpec(method="qmc", workers=1))
        b = log_max_integral([1 + x + y], QuadratureSpec(method="qmc", workers=4))
        assert a == b

    def test_log_max_of_pair(self):
        # max(|1|, |x|) = 1 on the torus
        est = log_max_integral([Poly.one(2), x])
        assert est.value == 0 and est.method == "exact"


def _brute_northcott(d, C, tol=1e-9):
    bounds = [math.floor(math.comb(d, i) * math.exp(C + tol)) for i in range(d + 1)]
    import itertools
    out = set()
    for cs in itertools.product(*[range(-b, b + 1) for b in bounds]):
        top = next((c for c in reversed(cs) if c), 0)
        if top > 0 and mahler_polyroots(cs) <= C + tol:
            out.add(Poly.from_coeffs(cs))
    return out


class TestNorthcott:
    def test_examples(self):
        assert set(northcott_enumerate(1, 0)) == {Poly.one(1), X, X + 1, X - 1}
        assert set(northcott_enumerate(0, LOG2)) == {Poly.one(1), Poly.constant(2, 1)}
        assert northcott_enumerate(1, -1) == []

    @pytest.mark.parametrize("d, C", [(1, 0), (1, LOG2), (2, 0), (2, math.log(3)), (0, math.log(3))])
    def test_brute_force(self, d, C):
        assert set(northcott_enumerate(d, C)) == _brute_northcott(d, C)

    def test_monotone(self):
        Cs = [0, LOG2, math.log(3)]
        sets = {(d, C): set(northcott_enumerate(d, C)) for d in range(3) for C in Cs}
        for d in range(3):
            for C1, C2 in zip(Cs, Cs[1:]):
                assert sets[d, C1] <= sets[d, C2]
        for C in Cs:
            assert sets[0, C] <= sets[1, C] <= sets[2, C]
