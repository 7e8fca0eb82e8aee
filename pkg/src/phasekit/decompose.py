"""Testing whether a diagonal is a tensor product of single-qubit phase gates.

If ``D = G_{n-1} (x) ... (x) G_0`` with ``G_k = diag(1, g_k)`` then, after
dividing by ``d_0``, ``d_j`` is the product of ``g_k`` over the set bits of
``j`` and ``g_k = d_{2**k}``.  The full test is exponential in ``n``, so it is
capped; :func:`pairwise_necessary_check` rules instances out from samples.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

from .errors import DomainError, ValidationError
from .resources import ResourceReport
from .statevector import TOL, StateVector, apply_single_qubit, check_unit_phases, phase_gate

MAX_QUBITS = 16


class FactorSet(NamedTuple):
    """Phases ``g_0 .. g_{n-1}``; ``g_k`` acts on qubit ``k``."""

    factors: np.ndarray

    @classmethod
    def of(cls, factors) -> "FactorSet":
        g = check_unit_phases(factors)
        if g.shape[0] < 1:
            raise ValidationError("need at least one factor")
        return cls(g)

    @property
    def num_qubits(self) -> int:
        return self.factors.shape[0]

    def diagonal(self) -> np.ndarray:
        """The ``2**n`` diagonal entries of the tensor product."""
        d = np.ones(1, dtype=complex)
        for g in self.factors:
            # qubit k is bit k, so each new factor goes on the high side
            d = np.kron(np.array([1, g]), d)
        return d


class Verdict(NamedTuple):
    decomposable: bool
    witness: int | None
    factors: FactorSet
    global_phase: complex


def _num_qubits(d: np.ndarray) -> int:
    size = d.shape[0]
    if size < 2 or size & (size - 1):
        raise ValidationError(f"diagonal length {size} is not a power of two >= 2")
    return size.bit_length() - 1


def normalize_phases(phases) -> tuple[np.ndarray, complex]:
    """Divide by ``d_0``; returns the normalized diagonal and the removed phase."""
    d = check_unit_phases(phases)
    _num_qubits(d)
    return d / d[0], complex(d[0])


def extract_candidate_factors(phases) -> FactorSet:
    """``g_k = d_{2**k}`` from a diagonal already normalized to ``d_0 = 1``."""
    d = np.asarray(phases, dtype=complex).reshape(-1)
    if d.shape[0] and abs(d[0]) == 0:
        raise ValidationError("d_0 is zero")
    d = check_unit_phases(d)
    n = _num_qubits(d)
    if abs(d[0] - 1) > TOL:
        raise ValidationError("diagonal is not normalized to d_0 = 1; use normalize_phases first")
    return FactorSet(d[[1 << k for k in range(n)]].copy())


def is_decomposable(phases, max_qubits: int = MAX_QUBITS) -> Verdict:
    """Full test: rebuild the product from the candidate factors and compare every entry.

    The witness is the smallest index whose entry disagrees, or ``None``.
    """
    d = check_unit_phases(phases)
    n = _num_qubits(d)
    if n > max_qubits:
        raise DomainError(f"{n} qubits exceeds the cap of {max_qubits}; use pairwise_necessary_check")
    normalized, global_phase = normalize_phases(d)
    factors = extract_candidate_factors(normalized)
    bad = np.flatnonzero(np.abs(factors.diagonal() - normalized) > TOL)
    witness = int(bad[0]) if bad.size else None
    return Verdict(witness is None, witness, factors, global_phase)


def pairwise_necessary_check(phases, sample_pairs: Iterable[tuple[int, int, int]]) -> bool:
    """``False`` if some pair ``(x, x', k)`` has ``d_x / d_x' != d_{2**k} / d_0``.

    ``True`` only means the sampled pairs did not rule decomposability out.
    """
    d = check_unit_phases(phases)
    n = _num_qubits(d)
    ok = True
    for x, xp, k in sample_pairs:
        if not (0 <= k < n and 0 <= xp < x < d.shape[0] and x ^ xp == 1 << k):
            raise DomainError(f"pair ({x}, {xp}) does not differ exactly in bit {k} with x > x'")
        if abs(d[x] / d[xp] - d[1 << k] / d[0]) > TOL:
            ok = False
    return ok


def random_pairs(n: int, count: int, rng) -> list[tuple[int, int, int]]:
    """``count`` random pairs differing in one bit, for :func:`pairwise_necessary_check`."""
    pairs = []
    for _ in range(count):
        k = int(rng.integers(0, n))
        xp = int(rng.integers(0, 2**n)) & ~(1 << k)
        pairs.append((xp | (1 << k), xp, k))
    return pairs


def apply_decomposed(state: StateVector, factors) -> tuple[StateVector, ResourceReport]:
    """One phase gate ``diag(1, g_k)`` per qubit; no oracle, no ancilla."""
    fs = factors if isinstance(factors, FactorSet) else FactorSet.of(factors)
    if fs.num_qubits != state.num_qubits:
        raise ValidationError(f"{fs.num_qubits} factors for a {state.num_qubits}-qubit state")
    for k, g in enumerate(fs.factors):
        state = apply_single_qubit(state, k, phase_gate(g))
    report = ResourceReport(elementary_ops=fs.num_qubits, method="decomposed", params={"n": fs.num_qubits})
    return state, report
