import sys

import pytest

from padic_automata import RingSpec, curve_derived, parse

MOTZKIN = "x*y^2+(x+1)*y+x"

# (P, p, alpha, unminimized states, p^N)
STATE_COUNTS = [
    ("(x+1)*y+x", 2, 2, 6, 16),
    ("(3*x^2+x+1)*y+x^2", 2, 2, 18, 512),
    ("(x^3+x+1)*y+x^3", 2, 2, 70, 16384),
    ("(x+2)*y^2+(x+1)*y+x", 2, 2, 18, 512),
    ("(x+1)*y+x", 2, 3, 10, 1024),
    ("(4*x+1)*y+x", 3, 2, 14, 81),
    ("(x+4)*y^2+y+x", 3, 2, 171, 19683),
]

# (P, p, alpha, orbit size under the zero transition)
ORBIT_SIZES = [
    ("y+x", 2, 2, 2),
    ("x*y^2+(x+1)*y+x", 2, 2, 4),
    ("x^2*y^2+(x^2+x+1)*y+x^2", 2, 2, 11),
    ("x^2*y^2+(x^2+x+1)*y+x^2", 2, 3, 20),
    ("(x^3+x+1)*y^2+(x^3+1)*y+x^3", 2, 2, 25),
]


def make_curve(P: str, p: int, alpha: int):
    ring = RingSpec(p, alpha)
    return curve_derived(parse(P), ring), ring


@pytest.fixture
def motzkin():
    return make_curve(MOTZKIN, 2, 3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
