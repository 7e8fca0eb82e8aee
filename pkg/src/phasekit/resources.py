"""Resource reports, their aggregation, and the table of claimed costs.

Counting rules: one coherent oracle application is one call; any single-qubit
or controlled gate is one elementary op, whatever its phase angle; ancillas
are counted as the maximum number simultaneously live.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import DomainError

COUNT_FIELDS = ("oracle_calls", "ancilla_qubits", "elementary_ops", "measurements", "modeled_block_cost")


@dataclass(frozen=True)
class ResourceReport:
    oracle_calls: int = 0
    ancilla_qubits: int = 0
    elementary_ops: int = 0
    measurements: int = 0
    modeled_block_cost: int = 0
    method: str = ""
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for name in COUNT_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def counts(self) -> dict:
        return {name: getattr(self, name) for name in COUNT_FIELDS}

    def to_json(self) -> dict:
        return {**self.counts(), "method": self.method, "params": dict(self.params)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def merge(reports: Iterable[ResourceReport], method: str = "", params: Mapping | None = None) -> ResourceReport:
    """Combine reports of operations run one after another.

    Counts add up; ``ancilla_qubits`` is the maximum, since ancillas released
    by one step are reused by the next.
    """
    reports = list(reports)
    totals = {name: sum(getattr(r, name) for r in reports) for name in COUNT_FIELDS}
    totals["ancilla_qubits"] = max((r.ancilla_qubits for r in reports), default=0)
    return ResourceReport(**totals, method=method, params=dict(params or {}))


def ceil_log2(x: int) -> int:
    return max(0, (int(x) - 1).bit_length())


@dataclass(frozen=True)
class Claim:
    """Exact counts that must match and upper bounds that must hold."""

    exact: Mapping[str, int]
    bounds: Mapping[str, int]


def _distinct(p):
    k = 2 ** ceil_log2(max(p["r"], 2))
    return Claim({"oracle_calls": 2, "ancilla_qubits": ceil_log2(k)}, {"elementary_ops": 2 * k})


def _kthroot(p):
    m = ceil_log2(p["k"])
    return Claim({"oracle_calls": 1, "ancilla_qubits": m}, {"elementary_ops": 2 * m})


def _block(p):
    alpha, k = p["alpha"], p["k"]
    return Claim(
        {
            "oracle_calls": 2,
            "ancilla_qubits": max(1, ceil_log2(alpha)),
            "modeled_block_cost": alpha * k * k * ceil_log2(k),
        },
        {"elementary_ops": alpha},
    )


def _grouped(p):
    inner = _block(p)
    return Claim(
        {
            "oracle_calls": 2 + 2 + 2,
            "ancilla_qubits": max(p["n"], inner.exact["ancilla_qubits"]),
            "modeled_block_cost": inner.exact["modeled_block_cost"],
        },
        {"elementary_ops": 2 * p["n"] + p["alpha"]},
    )


def _wdw(p):
    inner = CLAIMS[p["inner"]](p["inner_params"])
    exact, bounds = dict(inner.exact), dict(inner.bounds)
    # the 2n Hadamards add to whichever ops figure the inner method claims
    for table in (exact, bounds):
        if "elementary_ops" in table:
            table["elementary_ops"] += 2 * p["n"]
    return Claim(exact, bounds)


# Per-method claims.  ``params`` keys: naive n; distinct r; root2m m; kthroot k;
# approx k (precision bits); decomposed n; permutation n; block alpha, k;
# grouped n, alpha, k; wdw n, inner, inner_params.
CLAIMS: dict[str, Callable[[Mapping], Claim]] = {
    "naive": lambda p: Claim(
        {"oracle_calls": 2 * 2 ** p["n"], "ancilla_qubits": 1, "elementary_ops": 2 ** p["n"]}, {}
    ),
    "distinct": _distinct,
    "sign": lambda p: Claim({"oracle_calls": 1, "ancilla_qubits": 1}, {"elementary_ops": 4}),
    "gamma": lambda p: Claim({"oracle_calls": 1, "ancilla_qubits": 1}, {"elementary_ops": 2}),
    "root2m": lambda p: Claim(
        {"ancilla_qubits": 1}, {"oracle_calls": p["m"], "measurements": p["m"] - 1, "elementary_ops": 3 * p["m"] + 4}
    ),
    "kthroot": _kthroot,
    "approx": lambda p: Claim({"oracle_calls": p["k"], "ancilla_qubits": 1}, {"elementary_ops": 4 * p["k"]}),
    "decomposed": lambda p: Claim({"oracle_calls": 0, "ancilla_qubits": 0, "elementary_ops": p["n"]}, {}),
    "permutation": lambda p: Claim({"oracle_calls": 2, "ancilla_qubits": p["n"], "elementary_ops": p["n"]}, {}),
    "block": _block,
    "grouped": _grouped,
    "wdw": _wdw,
}


@dataclass(frozen=True)
class ClaimCheck:
    passed: bool
    diffs: tuple[str, ...]

    def __bool__(self):
        return self.passed


def check_claims(report: ResourceReport, method: str | None = None, params: Mapping | None = None) -> ClaimCheck:
    """Compare a report with the claimed costs of ``method``.

    ``method`` and ``params`` default to the ones recorded on the report.
    """
    method = method or report.method
    params = report.params if params is None else params
    if method not in CLAIMS:
        raise DomainError(f"no claims recorded for method {method!r}")
    claim = CLAIMS[method](params)
    diffs = []
    for name, want in claim.exact.items():
        got = getattr(report, name)
        if got != want:
            diffs.append(f"{name}: expected {want}, got {got}")
    for name, bound in claim.bounds.items():
        got = getattr(report, name)
        if got > bound:
            diffs.append(f"{name}: {got} exceeds bound {bound}")
    return ClaimCheck(not diffs, tuple(diffs))

