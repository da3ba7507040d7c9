import pytest

from percshare import REFERENCE_PARAMS
from percshare.spatial import Window


@pytest.fixture
def ref_params():
    return REFERENCE_PARAMS


@pytest.fixture
def small_window():
    # coarse raster for fast unit tests
    return Window(width=2000.0, height=2000.0, guard=1000.0, pixel=20.0)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request, capsys):
    """Record and immediately print one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number: int, passed: bool, detail: str):
        line = f"ACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}: {detail}"
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return bool(passed)

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
