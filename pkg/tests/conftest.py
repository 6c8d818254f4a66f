import json
import math
from pathlib import Path

import numpy as np
import pytest

from ecardioid.data import wind_sample

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_cases(module: str) -> dict:
    doc = json.loads((FIXTURES / f"{module}.json").read_text(encoding="utf-8"))
    return {c["id"]: c for c in doc["cases"]}


@pytest.fixture(scope="session")
def wind():
    return wind_sample()


def close(a, b, tol):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= tol))


TWO_PI = 2 * math.pi


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
