from pathlib import Path

import mpmath as mp
import pytest

from ecardioid.fixtures import (
    MODULES,
    OracleDisagreement,
    derived,
    load_fixture,
    render,
    validate_case,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.mark.parametrize("module", sorted(MODULES))
def test_committed_fixture_passes_schema(module):
    doc = load_fixture(FIXTURES / f"{module}.json")
    assert doc["module"] == module and doc["schema"] == "1"
    ids = [c["id"] for c in doc["cases"]]
    assert ids and len(ids) == len(set(ids))


def test_regeneration_is_byte_identical():
    for module, build in MODULES.items():
        assert render(module, build()) == (FIXTURES / f"{module}.json").read_text(encoding="utf-8"), module


@pytest.mark.parametrize("case,problem", [
    ({"id": "a", "inputs": {}, "expected": 1, "tol": 0}, "provenance"),
    ({"id": "a", "inputs": {}, "expected": 1, "tol": 0, "provenance": "GUESS"}, "unknown"),
    ({"id": "a", "inputs": {}, "expected": 1, "tol": 0, "provenance": "DERIVED"}, "oracle"),
    ({"id": "a", "inputs": {}, "expected": 1, "tol": 0, "provenance": "PAPER"}, "source"),
])
def test_schema_rejects_incomplete_cases(case, problem):
    with pytest.raises(ValueError, match=problem):
        validate_case(case)


def test_oracle_precision_disagreement_aborts():
    with pytest.raises(OracleDisagreement):
        derived("eps", {}, "precision probe", lambda: mp.mpf(10) ** (-mp.mp.dps // 3), tol=1e-12)
    ok = derived("third", {}, "exact rational", lambda: mp.mpf(1) / 3, tol=1e-15)
    assert ok.expected == pytest.approx(1 / 3, rel=1e-16)
