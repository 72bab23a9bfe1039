import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from colourpack.core import Instance, Item  # noqa: E402


def F(x):
    return Fraction(x)


def sizes_strategy(max_den=12):
    return st.builds(lambda d, k: Fraction(k, d), st.integers(1, max_den), st.integers(1, max_den)) \
        .filter(lambda f: 0 < f <= 1)


def instance_strategy(max_n=8, max_m=3, max_den=12, min_size=None):
    sizes = sizes_strategy(max_den)
    if min_size is not None:
        sizes = sizes.filter(lambda f: f >= min_size)

    @st.composite
    def build(draw):
        m = draw(st.integers(1, max_m))
        n = draw(st.integers(0, max_n))
        items = tuple(Item(k, draw(sizes), draw(st.integers(1, m))) for k in range(n))
        return Instance(items, m)

    return build()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
