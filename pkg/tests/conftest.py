import pytest
from hypothesis import HealthCheck, settings

from schottky_zeta.schottky import hyperbolic_cylinder, three_funnel
from schottky_zeta.transfer import lparts

settings.register_profile(
    "default", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# pass/fail lines of the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
    if not any(line.startswith("criterion 5") for line in ACCEPTANCE_LINES):
        terminalreporter.write_line("criterion 5: not run (long-running; select with -m slow)")


@pytest.fixture(scope="session")
def acceptance():
    """``record(number, title, ok, detail)``: log one pass/fail line, then assert."""

    def record(number, title, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


@pytest.fixture(scope="session")
def cylinder4():
    return hyperbolic_cylinder(4.0)


@pytest.fixture(scope="session")
def x101010():
    return three_funnel(10.0, 10.0, 10.0)


@pytest.fixture(scope="session")
def cylinder_parts(cylinder4):
    return lparts(cylinder4, 16, 0)


@pytest.fixture(scope="session")
def x101010_parts(x101010):
    return lparts(x101010, 16, 1)
