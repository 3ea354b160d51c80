from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rationals(min_value=-10 ** 4, max_value=10 ** 4, max_den=60):
    return st.builds(
        lambda p, q: Fraction(p, q),
        st.integers(min_value * max_den, max_value * max_den),
        st.integers(1, max_den),
    ).filter(lambda t: min_value <= t <= max_value)


def positive_rationals(max_value=10 ** 4, max_den=60):
    return rationals(0, max_value, max_den).filter(lambda t: t > 0)


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
