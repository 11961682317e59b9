import re
from pathlib import Path

import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, settings

from starframes.algebra import AlgebraShape

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"

shapes = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(lambda d: AlgebraShape(tuple(d)))
seeds = st.integers(0, 2**32 - 1)
ranks = st.integers(1, 2)


@pytest.fixture
def golden_dir():
    return GOLDEN


# one PASS/FAIL line per acceptance criterion at the end of the run

CRITERIA = {
    1: "geometric tight frame",
    2: "frame transform coherence",
    3: "frame operator theorem",
    4: "canonical Parseval and dual",
    5: "decision procedure vs sampling oracle",
    6: "composition theorems",
    7: "tensor theorems",
    8: "transport theorem and monotonicity",
    9: "CLI determinism and exit codes",
}

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when != "call" and report.passed:
        return
    failed = _outcomes.setdefault(int(m.group(1)), [])
    if report.failed:
        failed.append(report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        failed = _outcomes[num]
        name = CRITERIA.get(num, "")
        status = "FAIL" if failed else "PASS"
        line = f"criterion {num}: {status}  {name}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        terminalreporter.write_line(line)
