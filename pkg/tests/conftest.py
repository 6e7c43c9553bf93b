import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def rng():
    import numpy as np

    return np.random.default_rng(12345)


_criteria: dict[int, list[tuple[str, str, float]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    outcome = "PASS" if call.excinfo is None else "FAIL"
    _criteria.setdefault(mark.args[0], []).append((item.name, outcome, call.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        parts = _criteria[n]
        verdict = "PASS" if all(o == "PASS" for _, o, _ in parts) else "FAIL"
        failed = [name for name, o, _ in parts if o == "FAIL"]
        took = sum(d for _, _, d in parts)
        extra = f" failing: {', '.join(failed)}" if failed else ""
        terminalreporter.write_line(f"criterion {n:2d}: {verdict} ({took:.1f} s){extra}")
