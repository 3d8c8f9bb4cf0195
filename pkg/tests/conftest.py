import json

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from doublehopf.model import PAPER_P, coefficients_to_dict, example_coefficients

# jit compilation makes the first example of a run slow
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def paper():
    return example_coefficients()


@pytest.fixture(scope="session")
def paper_p():
    return np.array(PAPER_P, dtype=float)


@pytest.fixture
def paper_config(tmp_path, paper):
    doc = coefficients_to_dict(paper)
    doc["driving"] = {
        "omega": [1.0, 0.5],
        "fhat": [{"powers": [1, 0], "value": [0.3, 0.0]}],
        "a0": [0.1, 0.0],
        "c0": [0.0, 0.2],
    }
    path = tmp_path / "paper.json"
    path.write_text(json.dumps(doc))
    return path


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
