"""Dense state-vector simulator.

Basis index ``x`` labels the computational basis state; qubit 0 is the least
significant bit of ``x``.  Registers that are composed with :func:`tensor`
place the first operand on the high bits.

Every operation takes a :class:`StateVector` and returns a fresh one; the
amplitude array inside a state is never written after construction.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DomainError, InvariantViolation, PreconditionError, ValidationError

TOL = 1e-9

SQRT1_2 = 1 / np.sqrt(2)
H = np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def phase_gate(phase: complex) -> np.ndarray:
    """Return ``diag(1, phase)``."""
    return np.array([[1, 0], [0, phase]], dtype=complex)


class Rng:
    """Seeded random source used for measurements and random test states.

    Backed by numpy's PCG64 bit generator, so a given seed yields the same
    stream on every platform numpy supports.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def for_trial(cls, seed: int, trial: int) -> "Rng":
        """Independent stream for trial ``trial`` of a run seeded with ``seed``."""
        rng = cls(seed)
        rng._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))
        return rng

    def random(self) -> float:
        return float(self._gen.random())

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def normal(self, size=None):
        return self._gen.normal(size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size=size)

    def __repr__(self):
        return f"Rng(seed={self.seed})"


class StateVector:
    """Normalized pure state over ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes, *, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        size = amps.shape[0]
        if size < 2 or size & (size - 1):
            raise ValidationError(f"state length {size} is not a power of two >= 2")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("state contains non-finite amplitudes")
        norm = np.sqrt(np.vdot(amps, amps).real)
        if normalize:
            if norm == 0:
                raise ValidationError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1) > TOL:
            raise ValidationError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        self.num_qubits = size.bit_length() - 1
        self.amplitudes = amps

    def __len__(self):
        return self.amplitudes.shape[0]

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits})"

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def allclose(self, other: "StateVector", atol: float = TOL) -> bool:
        """Entrywise equality (global phase matters here)."""
        return self.num_qubits == other.num_qubits and np.allclose(
            self.amplitudes, other.amplitudes, atol=atol, rtol=0
        )


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise DomainError(f"qubit {qubit} out of range for {state.num_qubits}-qubit state")


def check_unitary(matrix, what: str = "gate") -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be a square matrix, got shape {m.shape}")
    if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > TOL:
        raise ValidationError(f"{what} is not unitary")
    return m


def check_unit_phases(phases, length: int | None = None) -> np.ndarray:
    d = np.asarray(phases, dtype=complex).reshape(-1)
    if length is not None and d.shape[0] != length:
        raise ValidationError(f"expected {length} phases, got {d.shape[0]}")
    if not np.all(np.isfinite(d)) or (d.size and np.max(np.abs(np.abs(d) - 1)) > TOL):
        raise ValidationError("phases must have unit modulus")
    return d


def new_basis_state(n: int, x: int) -> StateVector:
    if n < 1:
        raise DomainError(f"need at least one qubit, got {n}")
    if not 0 <= x < 2**n:
        raise DomainError(f"basis index {x} out of range for {n} qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[x] = 1
    return StateVector(amps)


def uniform_state(n: int) -> StateVector:
    return StateVector(np.full(2**n, 2 ** (-n / 2), dtype=complex))


def random_state(n: int, rng: Rng) -> StateVector:
    """Independent complex Gaussian amplitudes, normalized."""
    size = 2**n
    return StateVector(rng.normal(size) + 1j * rng.normal(size), normalize=True)


def apply_single_qubit(state: StateVector, qubit: int, gate) -> StateVector:
    _check_qubit(state, qubit)
    u = check_unitary(gate)
    if u.shape != (2, 2):
        raise ValidationError(f"single-qubit gate must be 2x2, got {u.shape}")
    psi = state.amplitudes.reshape(-1, 2, 2**qubit)
    out = np.einsum("ab,ibj->iaj", u, psi)
    return StateVector(out.reshape(-1))


def apply_qubits(state: StateVector, qubits: Sequence[int], gate) -> StateVector:
    """Apply one single-qubit gate to each listed qubit."""
    for q in qubits:
        state = apply_single_qubit(state, q, gate)
    return state


def apply_diagonal_dense(state: StateVector, phases) -> StateVector:
    d = check_unit_phases(phases, len(state))
    return StateVector(d * state.amplitudes)


def check_permutation(perm, size: int) -> np.ndarray:
    p = np.asarray(perm)
    if p.shape != (size,) or not np.issubdtype(p.dtype, np.integer):
        raise ValidationError(f"permutation must be {size} integers")
    seen = np.zeros(size, dtype=bool)
    if p.min(initial=0) < 0 or p.max(initial=0) >= size:
        raise ValidationError("permutation entries out of range")
    seen[p] = True
    if not seen.all():
        raise ValidationError("permutation is not a bijection")
    return p


def apply_permutation_dense(state: StateVector, perm) -> StateVector:
    """Scatter: the amplitude at ``x`` moves to ``perm[x]``."""
    p = check_permutation(perm, len(state))
    out = np.empty_like(state.amplitudes)
    out[p] = state.amplitudes
    return StateVector(out)


def fidelity_up_to_global_phase(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise DomainError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


def measure_qubit(state: StateVector, qubit: int, rng: Rng) -> tuple[int, StateVector]:
    _check_qubit(state, qubit)
    psi = state.amplitudes.reshape(-1, 2, 2**qubit)
    p0 = float(np.sum(np.abs(psi[:, 0, :]) ** 2))
    p1 = float(np.sum(np.abs(psi[:, 1, :]) ** 2))
    if abs(p0 + p1 - 1) > TOL:
        raise InvariantViolation(f"measurement probabilities sum to {p0 + p1!r}")
    bit = int(rng.random() >= p0)
    out = np.zeros_like(psi)
    out[:, bit, :] = psi[:, bit, :] / np.sqrt(p1 if bit else p0)
    return bit, StateVector(out.reshape(-1))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """``a`` on the high bits, ``b`` on the low bits."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


# Register-level helpers.  A "register" is a contiguous run of bit positions
# ``[offset, offset + width)``.


def register_values(num_qubits: int, offset: int, width: int) -> np.ndarray:
    """Value of the given register for every basis index."""
    idx = np.arange(2**num_qubits, dtype=np.int64)
    return (idx >> offset) & ((1 << width) - 1)


def apply_register_phase(state: StateVector, offset: int, width: int, value: int, phase: complex) -> StateVector:
    """Multiply by ``phase`` every component whose register equals ``value``.

    A multi-controlled phase gate with controls on the register bits (negated
    where ``value`` has a zero).
    """
    if offset < 0 or width < 1 or offset + width > state.num_qubits:
        raise DomainError("register does not fit the state")
    if abs(abs(phase) - 1) > TOL:
        raise ValidationError("phase must have unit modulus")
    mask = register_values(state.num_qubits, offset, width) == value
    out = state.amplitudes.copy()
    out[mask] *= phase
    return StateVector(out)


def apply_controlled_block(
    state: StateVector,
    control_offset: int,
    control_width: int,
    control_value: int,
    target_width: int,
    matrix,
) -> StateVector:
    """Apply ``matrix`` to the low ``target_width`` bits where the control register equals ``control_value``.

    The target register is always bits ``0..target_width-1``.
    """
    u = check_unitary(matrix, "block")
    k = 2**target_width
    if u.shape != (k, k):
        raise ValidationError(f"block must be {k}x{k}, got {u.shape}")
    if control_offset < target_width:
        raise DomainError("control register overlaps the target register")
    psi = state.amplitudes.reshape(-1, k)
    ctrl = register_values(state.num_qubits - target_width, control_offset - target_width, control_width)
    sel = ctrl == control_value
    out = psi.copy()
    out[sel] = psi[sel] @ u.T
    return StateVector(out.reshape(-1))


def swap_qubits(state: StateVector, a: int, b: int) -> StateVector:
    _check_qubit(state, a)
    _check_qubit(state, b)
    if a == b:
        return state
    idx = np.arange(len(state), dtype=np.int64)
    differ = ((idx >> a) ^ (idx >> b)) & 1
    perm = idx ^ (differ * ((1 << a) | (1 << b)))
    return apply_permutation_dense(state, perm)


def attach_register(state: StateVector, register: StateVector) -> StateVector:
    """Append ``register`` above the existing qubits."""
    return tensor(register, state)


def register_matrix(state: StateVector, low_bits: int) -> np.ndarray:
    """Amplitudes as a ``(2**high, 2**low)`` matrix, row = high register value."""
    if not 0 < low_bits < state.num_qubits:
        raise DomainError("cut must leave qubits on both sides")
    return state.amplitudes.reshape(-1, 2**low_bits)


def schmidt_coefficients(state: StateVector, low_bits: int) -> np.ndarray:
    """Singular values across the cut between bits ``< low_bits`` and the rest, descending."""
    return np.linalg.svd(register_matrix(state, low_bits), compute_uv=False)


def high_register_fidelity(state: StateVector, low_bits: int, expected: StateVector) -> float:
    """Fidelity ``sqrt(<e|rho|e>)`` of the reduced high register with a pure state."""
    m = register_matrix(state, low_bits)
    if expected.num_qubits != state.num_qubits - low_bits:
        raise DomainError("expected register has the wrong width")
    v = expected.amplitudes.conj() @ m
    return float(min(1.0, np.sqrt(np.vdot(v, v).real)))


def split_product(state: StateVector, low_bits: int, tol: float = TOL) -> tuple[StateVector, StateVector]:
    """Factor a product state into ``(high, low)`` registers, each up to a phase.

    Raises:
        InvariantViolation: if the registers are entangled beyond ``tol``.
    """
    u, s, vh = np.linalg.svd(register_matrix(state, low_bits))
    if 1 - s[0] ** 2 > tol:
        raise InvariantViolation(f"registers are entangled (top Schmidt weight {s[0] ** 2!r})")
    return StateVector(u[:, 0], normalize=True), StateVector(vh[0], normalize=True)


def project_high_register(state: StateVector, low_bits: int, expected: StateVector) -> StateVector:
    """Low register after contracting the high register against ``expected``, renormalized."""
    m = register_matrix(state, low_bits)
    return StateVector(expected.amplitudes.conj() @ m, normalize=True)


def with_clean_ancilla(state: StateVector, n: int, m: int) -> StateVector:
    """Joint state with ``m`` ancillas above an ``n``-qubit main register.

    ``state`` is either the bare main register (ancillas are appended in
    ``|0...0>``) or already ``n + m`` qubits wide with a clean ancilla.
    """
    if state.num_qubits == n:
        return attach_register(state, new_basis_state(m, 0)) if m else state
    if state.num_qubits == n + m:
        if m and np.sum(np.abs(register_matrix(state, n)[1:]) ** 2) > TOL:
            raise PreconditionError("ancilla register is not in |0...0>")
        return state
    raise ValidationError(f"state has {state.num_qubits} qubits; expected {n} (main) or {n + m} (main + ancilla)")


def drop_clean_ancilla(joint: StateVector, n: int) -> StateVector:
    """Main register of a joint state whose ancillas (bits ``n..``) are in ``|0...0>``.

    Raises:
        InvariantViolation: if the ancilla register carries amplitude elsewhere.
    """
    if joint.num_qubits == n:
        return joint
    m = register_matrix(joint, n)
    if np.sum(np.abs(m[1:]) ** 2) > TOL:
        raise InvariantViolation("ancilla register was not returned to |0...0>")
    return StateVector(m[0], normalize=True)
