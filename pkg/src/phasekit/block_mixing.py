"""Amplitude mixing: Walsh-Hadamard conjugation and block-diagonal unitaries.

A block-diagonal ``M`` of ``k x k`` blocks acts on the low ``log2 k`` bits,
with the high bits picking which block.  A selector oracle labels each
aligned block with one of ``alpha`` distinct blocks; the label is computed
into an ancilla, the blocks are applied controlled on it, and a second
selector call erases it.  Grouped mixing conjugates ``M`` by a permutation
so that arbitrary ``k``-sets of basis states can be mixed together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagonal import DiagonalSpec, apply_diagonal, main_qubits
from .errors import ValidationError
from .oracle import ClassicalOracle, RegisterLayout, apply_uf_xor
from .permutation import PermutationSpec, apply_permutation_inplace
from .resources import ResourceReport, ceil_log2, merge
from .statevector import (
    H,
    Rng,
    StateVector,
    apply_controlled_block,
    apply_single_qubit,
    check_unitary,
    drop_clean_ancilla,
    with_clean_ancilla,
)


def walsh_hadamard(state: StateVector, qubits: Sequence[int] | None = None) -> StateVector:
    """Hadamard on each of ``qubits`` (default: all), i.e. ``W_xy = 2**(-n/2) (-1)**popcount(x & y)``."""
    for q in range(state.num_qubits) if qubits is None else qubits:
        state = apply_single_qubit(state, q, H)
    return state


def wdw_mixing(state: StateVector, d: DiagonalSpec, rng: Rng | None = None) -> tuple[StateVector, ResourceReport]:
    """``W D W`` on the main register, ``D`` applied by its structured method.

    Returns the joint state left by the diagonal method (ancillas above the
    main register).
    """
    n = main_qubits(d)
    state = walsh_hadamard(state, range(n))
    joint, inner = apply_diagonal(state, d, rng)
    joint = walsh_hadamard(joint, range(n))
    hadamards = ResourceReport(elementary_ops=2 * n)
    report = merge([inner, hadamards], method="wdw", params={"n": n, "inner": inner.method, "inner_params": dict(inner.params)})
    return joint, report


@dataclass(frozen=True)
class BlockDiagonalSpec:
    """``k x k`` blocks chosen per aligned block by ``selector``.

    ``selector`` maps the full ``n``-bit index to a label in ``0..alpha-1`` and
    must not depend on the low ``log2 k`` bits.
    """

    k: int
    selector: ClassicalOracle
    blocks: tuple

    def __post_init__(self):
        k = self.k
        if k < 2 or k & (k - 1):
            raise ValidationError(f"block size {k} is not a power of two >= 2")
        n = self.selector.input_bits
        if k > 2**n:
            raise ValidationError(f"block size {k} exceeds the {n}-qubit space")
        blocks = tuple(check_unitary(b, f"block {i}") for i, b in enumerate(self.blocks))
        if not blocks:
            raise ValidationError("need at least one block")
        for i, b in enumerate(blocks):
            if b.shape != (k, k):
                raise ValidationError(f"block {i} has shape {b.shape}, expected {k}x{k}")
        object.__setattr__(self, "blocks", blocks)
        if self.alpha > 2**n // k:
            raise ValidationError(f"{self.alpha} distinct blocks but only {2 ** n // k} block positions")
        if self.selector.output_bits > self.ancilla_bits:
            raise ValidationError(
                f"selector has {self.selector.output_bits} output bits; {self.alpha} labels need {self.ancilla_bits}"
            )
        labels = self.selector.table().reshape(-1, k)
        if labels.max() >= self.alpha:
            raise ValidationError(f"selector label {int(labels.max())} has no block")
        uneven = np.flatnonzero(np.any(labels != labels[:, :1], axis=1))
        if uneven.size:
            raise ValidationError(f"selector is not constant on block {int(uneven[0])} (low bits change the label)")

    @property
    def alpha(self) -> int:
        return len(self.blocks)

    @property
    def block_bits(self) -> int:
        return self.k.bit_length() - 1

    @property
    def num_qubits(self) -> int:
        return self.selector.input_bits

    @property
    def ancilla_bits(self) -> int:
        return max(1, ceil_log2(self.alpha))

    def labels(self) -> np.ndarray:
        """Block label for each aligned block position."""
        return self.selector.table()[:: self.k]

    def adjoint(self) -> "BlockDiagonalSpec":
        return BlockDiagonalSpec(self.k, self.selector, tuple(b.conj().T for b in self.blocks))


def apply_block_diagonal(state: StateVector, spec: BlockDiagonalSpec) -> tuple[StateVector, ResourceReport]:
    """Multiply each aligned ``k``-block of amplitudes by its selected block matrix.

    Two selector calls; ``ceil(log2 alpha)`` ancillas returned to ``|0>``.
    The blocks are applied as dense controlled unitaries; their gate cost is
    recorded as ``modeled_block_cost = alpha k**2 ceil(log2 k)``.
    """
    n, w, f = spec.num_qubits, spec.ancilla_bits, spec.selector
    layout = RegisterLayout(n, w)
    joint = with_clean_ancilla(state, n, w)
    joint = apply_uf_xor(joint, layout, f)
    for label, block in enumerate(spec.blocks):
        joint = apply_controlled_block(joint, n, w, label, spec.block_bits, block)
    joint = apply_uf_xor(joint, layout, f)
    report = ResourceReport(
        oracle_calls=2,
        ancilla_qubits=w,
        elementary_ops=spec.alpha,
        modeled_block_cost=spec.alpha * spec.k**2 * ceil_log2(spec.k),
        method="block",
        params={"alpha": spec.alpha, "k": spec.k},
    )
    return joint, report


def grouping_oracle(group_number: ClassicalOracle, member_id: ClassicalOracle, k: int) -> ClassicalOracle:
    """``g(x) = group_number(x) * k + member_id(x)``."""
    n = group_number.input_bits
    if member_id.input_bits != n:
        raise ValidationError("group_number and member_id disagree on input width")

    def g(xs):
        members = member_id.table()[xs]
        if np.any(members >= k):
            raise ValidationError(f"member id out of range 0..{k - 1}")
        return group_number.table()[xs] * k + members

    return ClassicalOracle(n, n, g, vectorized=True, name="grouping", params={"k": k})


@dataclass(frozen=True)
class GroupedMixSpec:
    """Mix ``k``-sets of basis states that need not be contiguous.

    The grouping ``g`` lines each ``k``-set up as an aligned block; ``mix``
    then chooses a block per group (its selector sees the permuted index).
    """

    group_number: ClassicalOracle
    member_id: ClassicalOracle
    g_inv: ClassicalOracle
    mix: BlockDiagonalSpec
    g: ClassicalOracle = field(init=False, repr=False, compare=False)
    permutation: PermutationSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mix.num_qubits != self.group_number.input_bits:
            raise ValidationError("block spec and grouping act on different widths")
        g = grouping_oracle(self.group_number, self.member_id, self.mix.k)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "permutation", PermutationSpec(g, self.g_inv))

    @property
    def num_qubits(self) -> int:
        return self.mix.num_qubits


def apply_grouped_mixing(state: StateVector, spec: GroupedMixSpec) -> tuple[StateVector, ResourceReport]:
    """``P_g^-1 M P_g``: sort into groups, mix each group, sort back.

    Returns the ``2n``-qubit joint state of the last permutation pass with
    its ancilla in ``|0>``.  The ancillas of each stage are reused by the next.
    """
    n = spec.num_qubits
    joint, forward = apply_permutation_inplace(state, spec.permutation)
    main = drop_clean_ancilla(joint, n)
    joint, mixing = apply_block_diagonal(main, spec.mix)
    main = drop_clean_ancilla(joint, n)
    joint, backward = apply_permutation_inplace(main, spec.permutation.inverse())
    report = merge(
        [forward, mixing, backward], method="grouped", params={"n": n, "alpha": spec.mix.alpha, "k": spec.mix.k}
    )
    return joint, report


def dense_block_matrix(spec: BlockDiagonalSpec) -> np.ndarray:
    """The full ``2**n x 2**n`` matrix ``M``."""
    size = 2**spec.num_qubits
    m = np.zeros((size, size), dtype=complex)
    for pos, label in enumerate(spec.labels()):
        lo = pos * spec.k
        m[lo : lo + spec.k, lo : lo + spec.k] = spec.blocks[label]
    return m
