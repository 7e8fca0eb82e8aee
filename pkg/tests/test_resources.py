import json

import pytest

from phasekit.errors import DomainError
from phasekit.resources import CLAIMS, ResourceReport, ceil_log2, check_claims, merge


def test_merge_adds_counts_and_maxes_ancillas():
    a = ResourceReport(oracle_calls=2, ancilla_qubits=3, elementary_ops=4, measurements=1)
    b = ResourceReport(oracle_calls=1, ancilla_qubits=1, elementary_ops=2, modeled_block_cost=8)
    m = merge([a, b], method="x", params={"n": 1})
    assert m.counts() == {
        "oracle_calls": 3,
        "ancilla_qubits": 3,
        "elementary_ops": 6,
        "measurements": 1,
        "modeled_block_cost": 8,
    }
    assert m.method == "x"
    assert merge([]).counts() == ResourceReport().counts()


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        ResourceReport(oracle_calls=-1)


def test_json_round_trip():
    r = ResourceReport(oracle_calls=2, ancilla_qubits=3, method="distinct", params={"r": 5})
    doc = json.loads(r.dumps())
    assert doc["oracle_calls"] == 2 and doc["params"] == {"r": 5}


@pytest.mark.parametrize("x,want", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)])
def test_ceil_log2(x, want):
    assert ceil_log2(x) == want


def test_claim_tables():
    assert CLAIMS["naive"]({"n": 4}).exact["oracle_calls"] == 32
    assert CLAIMS["distinct"]({"r": 5}).exact["ancilla_qubits"] == 3
    assert CLAIMS["kthroot"]({"k": 8}).exact == {"oracle_calls": 1, "ancilla_qubits": 3}
    assert CLAIMS["kthroot"]({"k": 8}).bounds == {"elementary_ops": 6}
    assert CLAIMS["block"]({"alpha": 3, "k": 4}).exact["modeled_block_cost"] == 3 * 16 * 2


def test_check_claims_reports_diffs():
    ok = ResourceReport(oracle_calls=1, ancilla_qubits=1, elementary_ops=4, method="sign")
    assert check_claims(ok)
    bad = ResourceReport(oracle_calls=2, ancilla_qubits=1, elementary_ops=5, method="sign")
    result = check_claims(bad)
    assert not result
    assert any("oracle_calls" in d for d in result.diffs)
    assert any("elementary_ops" in d for d in result.diffs)
    with pytest.raises(DomainError):
        check_claims(ok, method="unknown")
