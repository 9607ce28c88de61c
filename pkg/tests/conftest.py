from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from adelicq.polycore import Poly, RationalFunction

settings.register_profile(
    "default", deadline=None, derandomize=True, print_blob=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("default")


@st.composite
def polys(draw, nvars=1, max_deg=3, coeff=5, rational=False, nonzero=False, max_terms=5):
    k = draw(st.integers(1 if nonzero else 0, max_terms))
    terms = {}
    for _ in range(k):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        if sum(e) > max_deg:
            continue
        c = draw(st.integers(-coeff, coeff).filter(bool))
        if rational:
            c = Fraction(c, draw(st.integers(1, coeff)))
        terms[e] = c
    if nonzero and not terms:
        terms[(0,) * nvars] = draw(st.integers(1, coeff))
    return Poly(nvars, terms)


@st.composite
def rational_functions(draw, nvars=1, max_deg=3, coeff=5):
    num = draw(polys(nvars, max_deg, coeff, rational=True))
    den = draw(polys(nvars, max_deg, coeff, nonzero=True))
    return RationalFunction(num, den)


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: (int(s.split()[1].rstrip(":abc")), s)):
            terminalreporter.write_line(line)
