"""In-place basis permutations from a forward oracle ``g`` and its inverse.

``|x, 0> -> |x, g(x)>`` (one call of ``g``), then XOR ``g_inv`` of the second
register into the first, ``|x ^ g_inv(g(x)), g(x)> = |0, g(x)>`` (one call of
``g_inv``), then swap the two registers qubit by qubit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvariantViolation
from .oracle import ClassicalOracle, RegisterLayout, check_bijection, xor_permutation
from .resources import ResourceReport
from .statevector import (
    TOL,
    StateVector,
    apply_permutation_dense,
    register_matrix,
    swap_qubits,
    with_clean_ancilla,
)


@dataclass(frozen=True)
class PermutationSpec:
    g: ClassicalOracle
    g_inv: ClassicalOracle
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.validate:
            check_bijection(self.g, self.g_inv)

    @property
    def num_qubits(self) -> int:
        return self.g.input_bits

    def inverse(self) -> "PermutationSpec":
        return PermutationSpec(self.g_inv, self.g)

    def table(self) -> np.ndarray:
        return self.g.table()


def swap_registers(state: StateVector, layout: RegisterLayout) -> StateVector:
    """``|x, y> -> |y, x>`` by swapping qubit ``i`` with qubit ``n + i``."""
    if layout.main_bits != layout.ancilla_bits:
        raise DomainError("registers must have equal width to be swapped")
    layout.check(state)
    n = layout.main_bits
    for i in range(n):
        state = swap_qubits(state, i, n + i)
    return state


def apply_permutation_inplace(state: StateVector, spec: PermutationSpec) -> tuple[StateVector, ResourceReport]:
    """Map ``|x>`` to ``|g(x)>`` using ``n`` ancillas, one call of ``g`` and one of ``g_inv``.

    Accepts the ``n``-qubit main register or the ``2n``-qubit joint state with
    a clean ancilla; returns the joint state with the ancilla back in ``|0>``.

    Raises:
        InvariantViolation: if the erase step leaves a populated component
            with a nonzero main register (``g_inv`` is not the inverse of ``g``).
    """
    n = spec.num_qubits
    joint = with_clean_ancilla(state, n, n)
    size = 2 * n
    joint = apply_permutation_dense(joint, xor_permutation(size, spec.g, (0, n), (n, n)))
    spec.g.record_call()
    joint = apply_permutation_dense(joint, xor_permutation(size, spec.g_inv, (n, n), (0, n)))
    spec.g_inv.record_call()
    leftover = np.sum(np.abs(register_matrix(joint, n)[:, 1:]) ** 2)
    if leftover > TOL:
        raise InvariantViolation("g_inv(g(x)) != x on a populated component; main register not erased")
    joint = swap_registers(joint, RegisterLayout(n, n))
    report = ResourceReport(
        oracle_calls=2, ancilla_qubits=n, elementary_ops=n, method="permutation", params={"n": n}
    )
    return joint, report
