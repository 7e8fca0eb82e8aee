"""Applying a diagonal matrix D to the main register with oracle help.

Every ``apply_*`` function takes the main-register state (``n`` qubits,
``n = f.input_bits``) or a joint state that already carries its ancillas in
``|0...0>`` above the main register, and returns ``(joint_state, report)``.
The joint state keeps the ancilla register on bits ``n, n+1, ...`` so callers
can check that it came back clean.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from . import oracle as orc
from .errors import DomainError, ValidationError
from .oracle import ClassicalOracle, RegisterLayout, apply_uf_modadd, apply_uf_xor
from .resources import ResourceReport, ceil_log2
from .statevector import (
    TOL,
    H,
    Rng,
    StateVector,
    X,
    apply_register_phase,
    apply_single_qubit,
    check_unit_phases,
    measure_qubit,
    new_basis_state,
    phase_gate,
    with_clean_ancilla,
)


def _boolean(f: ClassicalOracle, what: str = "f") -> ClassicalOracle:
    if f.output_bits != 1:
        raise ValidationError(f"{what} must be a boolean oracle, got {f.output_bits} output bits")
    return f


def _power_of_two_exponent(k: int) -> int:
    if k < 2 or k & (k - 1):
        raise DomainError(f"{k} is not a power of two >= 2")
    return k.bit_length() - 1


@dataclass(frozen=True)
class ExplicitPhases:
    phases: np.ndarray

    def __post_init__(self):
        d = check_unit_phases(self.phases)
        if d.shape[0] < 2 or d.shape[0] & (d.shape[0] - 1):
            raise ValidationError("need 2**n phases")
        object.__setattr__(self, "phases", d)

    @property
    def num_qubits(self) -> int:
        return self.phases.shape[0].bit_length() - 1


@dataclass(frozen=True)
class DistinctPhases:
    """``d_x = phase_table[f(x)]`` with few distinct values."""

    f: ClassicalOracle
    phase_table: np.ndarray

    def __post_init__(self):
        table = check_unit_phases(self.phase_table)
        if table.shape[0] < 1:
            raise ValidationError("phase table is empty")
        object.__setattr__(self, "phase_table", table)

    @property
    def r(self) -> int:
        return self.phase_table.shape[0]


@dataclass(frozen=True)
class SignPattern:
    f: ClassicalOracle

    def __post_init__(self):
        _boolean(self.f)


@dataclass(frozen=True)
class RootOfUnity:
    """``d_x = exp(2 pi i f(x) / k)``."""

    f: ClassicalOracle
    k: int

    def __post_init__(self):
        _power_of_two_exponent(self.k)


@dataclass(frozen=True)
class GammaAncilla:
    f: ClassicalOracle
    gamma: complex

    def __post_init__(self):
        _boolean(self.f)
        if abs(abs(self.gamma) - 1) > TOL:
            raise ValidationError("gamma must have unit modulus")


@dataclass(frozen=True)
class Root2mPhase:
    """Rotate ``{x : f(x) = 1}`` by ``exp(2 pi i / 2**m)``."""

    f: ClassicalOracle
    m: int

    def __post_init__(self):
        _boolean(self.f)
        if self.m < 1:
            raise DomainError("m must be at least 1")


class RealPhaseOracle:
    """Real-valued phase fraction ``p(x)``; the applied phase is ``exp(2 pi i p(x))``.

    Only ``p mod 1`` matters.  :meth:`bit_oracles` exposes the truncated
    binary expansion as boolean oracles.
    """

    def __init__(self, input_bits: int, fn: Callable, *, vectorized: bool = True, name: str = "p"):
        self.input_bits = input_bits
        self.name = name
        self._fn = fn
        self._vectorized = vectorized

    def values(self) -> np.ndarray:
        xs = np.arange(2**self.input_bits, dtype=np.int64)
        if self._vectorized:
            p = np.broadcast_to(np.asarray(self._fn(xs), dtype=float), xs.shape)
        else:
            p = np.array([float(self._fn(int(x))) for x in xs])
        if not np.all(np.isfinite(p)):
            raise ValidationError("phase fractions must be finite")
        return np.mod(p, 1.0)

    def truncated(self, k: int) -> np.ndarray:
        """``floor(p * 2**k)``, the first ``k`` bits of ``p`` as an integer."""
        if not 1 <= k <= 52:
            raise DomainError(f"precision must be in 1..52, got {k}")
        return np.floor(self.values() * 2**k).astype(np.int64)

    def bit_oracles(self, k: int) -> list[ClassicalOracle]:
        """``[f_1, ..., f_k]`` where ``f_j(x)`` is bit ``j`` after the binary point of ``p(x)``."""
        t = self.truncated(k)
        return [
            orc.from_table((t >> (k - j)) & 1, output_bits=1, name=f"{self.name}_bit{j}")
            for j in range(1, k + 1)
        ]


@dataclass(frozen=True)
class BitPhases:
    """Phase ``exp(2 pi i 0.b_1...b_k)`` with ``b_j = bit_oracles[j-1](x)``."""

    bit_oracles: tuple

    def __post_init__(self):
        if not self.bit_oracles:
            raise DomainError("need at least one bit oracle")
        widths = {o.input_bits for o in self.bit_oracles}
        if len(widths) != 1:
            raise ValidationError("bit oracles disagree on input width")
        for o in self.bit_oracles:
            _boolean(o, "bit oracle")
        object.__setattr__(self, "bit_oracles", tuple(self.bit_oracles))

    @property
    def k(self) -> int:
        return len(self.bit_oracles)

    @classmethod
    def from_real(cls, p: RealPhaseOracle, k: int) -> "BitPhases":
        return cls(tuple(p.bit_oracles(k)))


DiagonalSpec = Union[ExplicitPhases, DistinctPhases, SignPattern, RootOfUnity, GammaAncilla, Root2mPhase, BitPhases]


def target_phases(spec: DiagonalSpec) -> np.ndarray:
    """Dense diagonal that ``spec`` stands for, straight from the oracle tables."""
    if isinstance(spec, ExplicitPhases):
        return spec.phases
    if isinstance(spec, DistinctPhases):
        return spec.phase_table[spec.f.table()]
    if isinstance(spec, SignPattern):
        return (-1.0 + 0j) ** spec.f.table()
    if isinstance(spec, RootOfUnity):
        return np.exp(2j * np.pi * spec.f.table() / spec.k)
    if isinstance(spec, Root2mPhase):
        return np.exp(2j * np.pi * spec.f.table() / 2**spec.m)
    if isinstance(spec, BitPhases):
        frac = sum(o.table() * 2.0**-j for j, o in enumerate(spec.bit_oracles, start=1))
        return np.exp(2j * np.pi * frac)
    raise DomainError(f"{type(spec).__name__} does not describe a diagonal matrix")


class _Tally:
    __slots__ = ("calls", "ops", "measurements")

    def __init__(self):
        self.calls = self.ops = self.measurements = 0


def _xor(joint: StateVector, n: int, f: ClassicalOracle, tally: _Tally) -> StateVector:
    tally.calls += 1
    return apply_uf_xor(joint, RegisterLayout(n, joint.num_qubits - n), f)


def _gate(joint: StateVector, qubit: int, gate, tally: _Tally) -> StateVector:
    tally.ops += 1
    return apply_single_qubit(joint, qubit, gate)


def _sign_change(joint: StateVector, n: int, f: ClassicalOracle, tally: _Tally) -> StateVector:
    # ancilla |0> -> (|0> - |1>)/sqrt2, kick back, then undo the preparation
    joint = _gate(joint, n, X, tally)
    joint = _gate(joint, n, H, tally)
    joint = _xor(joint, n, f, tally)
    joint = _gate(joint, n, H, tally)
    return _gate(joint, n, X, tally)


def _diagonal_on_ancilla(joint: StateVector, n: int, width: int, table: np.ndarray, tally: _Tally) -> StateVector:
    """``I (x) P`` for ``P = diag(table)``: one controlled phase per entry that is not 1."""
    for y, p in enumerate(table):
        if p != 1:
            joint = apply_register_phase(joint, n, width, y, p)
            tally.ops += 1
    return joint


def _two_call_phase(joint: StateVector, n: int, f: ClassicalOracle, table: np.ndarray, width: int, tally) -> StateVector:
    joint = _xor(joint, n, f, tally)
    joint = _diagonal_on_ancilla(joint, n, width, table, tally)
    return _xor(joint, n, f, tally)


def _report(method: str, tally: _Tally, ancillas: int, **params) -> ResourceReport:
    return ResourceReport(
        oracle_calls=tally.calls,
        ancilla_qubits=ancillas,
        elementary_ops=tally.ops,
        measurements=tally.measurements,
        method=method,
        params=params,
    )


def synthesize_naive(state: StateVector, phases) -> tuple[StateVector, ResourceReport]:
    """Apply an arbitrary diagonal one basis state at a time.

    For each ``y``: compute the indicator of ``x == y`` into the ancilla,
    apply ``diag(1, d_y)`` to the ancilla, uncompute.  Exponential in ``n``;
    used for small diagonals inside the other methods.
    """
    spec = phases if isinstance(phases, ExplicitPhases) else ExplicitPhases(phases)
    n = spec.num_qubits
    joint = with_clean_ancilla(state, n, 1)
    tally = _Tally()
    for y, d in enumerate(spec.phases):
        indicator = orc.delta(n, y)
        joint = _xor(joint, n, indicator, tally)
        joint = _gate(joint, n, phase_gate(d), tally)
        joint = _xor(joint, n, indicator, tally)
    return joint, _report("naive", tally, 1, n=n)


def apply_distinct_phases(state: StateVector, spec: DistinctPhases) -> tuple[StateVector, ResourceReport]:
    """Multiply amplitude ``x`` by ``p_{f(x)}`` using two calls to ``f``.

    The phase table is padded with ones up to the next power of two ``k`` and
    applied as a ``k x k`` diagonal on the ``log2 k`` ancilla qubits holding
    ``f(x)``.
    """
    f = spec.f
    n = f.input_bits
    width = ceil_log2(max(spec.r, 2))
    if f.output_bits > width:
        raise ValidationError(f"f has {f.output_bits} output bits but {spec.r} phases need only {width}")
    top = f.max_value()
    if top >= spec.r:
        raise ValidationError(f"f takes value {top} but only {spec.r} phases are given")
    padded = np.ones(2**width, dtype=complex)
    padded[: spec.r] = spec.phase_table
    joint = with_clean_ancilla(state, n, width)
    tally = _Tally()
    joint = _two_call_phase(joint, n, f, padded, width, tally)
    return joint, _report("distinct", tally, width, r=spec.r)


def apply_sign_change(state: StateVector, f: ClassicalOracle) -> tuple[StateVector, ResourceReport]:
    """Negate the amplitudes with ``f(x) = 1`` using one call and one ancilla."""
    _boolean(f)
    n = f.input_bits
    joint = with_clean_ancilla(state, n, 1)
    tally = _Tally()
    joint = _sign_change(joint, n, f, tally)
    return joint, _report("sign", tally, 1)


def apply_gamma_ancilla(state: StateVector, f: ClassicalOracle, gamma: complex) -> tuple[StateVector, ResourceReport]:
    """One oracle call against the ancilla ``(|0> + gamma |1>)/sqrt2``.

    The joint state is returned as is.  Unless ``gamma`` is ``+1`` or ``-1``
    the ancilla ends up entangled with the main register.
    """
    GammaAncilla(f, gamma)
    n = f.input_bits
    joint = with_clean_ancilla(state, n, 1)
    tally = _Tally()
    joint = _gate(joint, n, H, tally)
    joint = _gate(joint, n, phase_gate(gamma), tally)
    joint = _xor(joint, n, f, tally)
    return joint, _report("gamma", tally, 1)


def apply_root2m_rotation(
    state: StateVector, f: ClassicalOracle, m: int, rng: Rng
) -> tuple[StateVector, ResourceReport]:
    """Rotate the amplitudes with ``f(x) = 1`` by ``exp(2 pi i / 2**m)``, up to a global phase.

    Each round kicks back ``gamma = exp(2 pi i / 2**level)`` and measures the
    ancilla.  Outcome 0 finishes.  Outcome 1 leaves the marked set rotated by
    ``1/gamma`` instead, which is repaired by running the round again at
    ``level - 1`` (twice the angle).  Level 1 is a plain sign change.  The
    ancilla is reset to ``|0>`` after every measurement.
    """
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    _boolean(f)
    n = f.input_bits
    joint = with_clean_ancilla(state, n, 1)
    tally = _Tally()
    level = m
    while level > 1:
        gamma = cmath.exp(2j * math.pi / 2**level)
        joint = _gate(joint, n, H, tally)
        joint = _gate(joint, n, phase_gate(gamma), tally)
        joint = _xor(joint, n, f, tally)
        outcome, joint = measure_qubit(joint, n, rng)
        tally.measurements += 1
        if outcome == 0:
            break
        joint = _gate(joint, n, X, tally)
        level -= 1
    else:
        joint = _sign_change(joint, n, f, tally)
    return joint, _report("root2m", tally, 1, m=m)


def expected_calls_root2m(m: int) -> Fraction:
    """Mean oracle calls of :func:`apply_root2m_rotation`: ``E(1) = 1``, ``E(m) = 1 + E(m-1)/2``.

    Closed form ``2 - 2**(1-m)``.  Each round succeeds with probability
    exactly 1/2, independent of the state.  Note that the often-quoted
    ``(2**(m-1) - 1) / 2**(m-2)`` (see :func:`quoted_calls_root2m`) is one
    level off: it gives 1 at ``m = 2``, where the true mean is 3/2.
    """
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    return 2 - Fraction(1, 2 ** (m - 1))


def quoted_calls_root2m(m: int) -> Fraction:
    """``(2**(m-1) - 1) / 2**(m-2)``, reported next to :func:`expected_calls_root2m` for comparison."""
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    return Fraction(2 ** (m - 1) - 1) / Fraction(2) ** (m - 2)


def _root_register(k: int) -> tuple[StateVector, int]:
    width = _power_of_two_exponent(k)
    omega = cmath.exp(2j * math.pi / k)
    reg = new_basis_state(width, 0)
    ops = 0
    for j in range(width):
        reg = apply_single_qubit(reg, j, H)
        reg = apply_single_qubit(reg, j, phase_gate(omega ** (-(2**j))))
        ops += 2
    return reg, ops


def prepare_root_register(k: int) -> StateVector:
    """``R = k**-1/2 sum_h omega**(k-h) |h>`` with ``omega = exp(2 pi i / k)``.

    ``omega**(-h)`` factorizes over the bits of ``h``, so ``R`` is the product
    of ``(|0> + omega**(-2**j) |1>)/sqrt2`` on qubit ``j``: one Hadamard and
    one phase gate per qubit.
    """
    return _root_register(k)[0]


def apply_kth_root(state: StateVector, f: ClassicalOracle, k: int) -> tuple[StateVector, ResourceReport]:
    """Multiply amplitude ``x`` by ``omega**f(x)`` with a single modular-addition call.

    The ancilla register is prepared in ``R``, an eigenvector of every
    modular shift, and is left in ``R`` afterwards.
    """
    width = _power_of_two_exponent(k)
    n = f.input_bits
    if f.output_bits > width:
        raise ValidationError(f"f has {f.output_bits} output bits; modulus {k} allows {width}")
    joint = with_clean_ancilla(state, n, width)
    tally = _Tally()
    omega = cmath.exp(2j * math.pi / k)
    for j in range(width):
        joint = _gate(joint, n + j, H, tally)
        joint = _gate(joint, n + j, phase_gate(omega ** (-(2**j))), tally)
    tally.calls += 1
    joint = apply_uf_modadd(joint, RegisterLayout(n, width), f, k)
    return joint, _report("kthroot", tally, width, k=k)


def approx_diagonal(
    state: StateVector, phase_fn: Union[RealPhaseOracle, Sequence[ClassicalOracle], BitPhases], k: int
) -> tuple[StateVector, ResourceReport]:
    """Apply ``exp(2 pi i 0.b_1...b_k(x))``, the phase truncated to ``k`` bits.

    Bit ``j`` contributes ``exp(2 pi i / 2**j)`` on the set where ``f_j = 1``.
    Bit 1 is a sign change (one call); every other bit goes through the
    two-call ``diag(1, exp(2 pi i / 2**j))`` construction on the same single
    ancilla, so a run costs ``2k - 1`` oracle calls.
    """
    if k < 1:
        raise DomainError(f"precision must be at least 1, got {k}")
    if isinstance(phase_fn, RealPhaseOracle):
        bits = BitPhases.from_real(phase_fn, k)
    elif isinstance(phase_fn, BitPhases):
        bits = phase_fn
    else:
        bits = BitPhases(tuple(phase_fn))
    if bits.k != k:
        raise ValidationError(f"got {bits.k} bit oracles for precision {k}")
    n = bits.bit_oracles[0].input_bits
    joint = with_clean_ancilla(state, n, 1)
    tally = _Tally()
    for j, fj in enumerate(bits.bit_oracles, start=1):
        if j == 1:
            joint = _sign_change(joint, n, fj, tally)
        else:
            table = np.array([1, cmath.exp(2j * math.pi / 2**j)])
            joint = _two_call_phase(joint, n, fj, table, 1, tally)
    return joint, _report("approx", tally, 1, k=k)


def ancilla_width(spec: DiagonalSpec) -> int:
    if isinstance(spec, DistinctPhases):
        return ceil_log2(max(spec.r, 2))
    if isinstance(spec, RootOfUnity):
        return _power_of_two_exponent(spec.k)
    return 1


def apply_diagonal(state: StateVector, spec: DiagonalSpec, rng: Rng | None = None) -> tuple[StateVector, ResourceReport]:
    """Dispatch ``spec`` to the matching method."""
    if isinstance(spec, ExplicitPhases):
        return synthesize_naive(state, spec)
    if isinstance(spec, DistinctPhases):
        return apply_distinct_phases(state, spec)
    if isinstance(spec, SignPattern):
        return apply_sign_change(state, spec.f)
    if isinstance(spec, RootOfUnity):
        return apply_kth_root(state, spec.f, spec.k)
    if isinstance(spec, GammaAncilla):
        return apply_gamma_ancilla(state, spec.f, spec.gamma)
    if isinstance(spec, Root2mPhase):
        if rng is None:
            raise DomainError("root-of-two-power rotation needs an Rng")
        return apply_root2m_rotation(state, spec.f, spec.m, rng)
    if isinstance(spec, BitPhases):
        return approx_diagonal(state, spec, spec.k)
    raise DomainError(f"unsupported diagonal spec {type(spec).__name__}")


def main_qubits(spec: DiagonalSpec) -> int:
    if isinstance(spec, ExplicitPhases):
        return spec.num_qubits
    if isinstance(spec, BitPhases):
        return spec.bit_oracles[0].input_bits
    return spec.f.input_bits


def final_ancilla(spec: DiagonalSpec) -> StateVector | None:
    """State the ancilla register is left in, or ``None`` if it may be entangled."""
    if isinstance(spec, GammaAncilla):
        return None
    if isinstance(spec, RootOfUnity):
        return prepare_root_register(spec.k)
    return new_basis_state(ancilla_width(spec), 0)


__all__ = [
    "ExplicitPhases",
    "DistinctPhases",
    "SignPattern",
    "RootOfUnity",
    "GammaAncilla",
    "Root2mPhase",
    "BitPhases",
    "RealPhaseOracle",
    "DiagonalSpec",
    "target_phases",
    "synthesize_naive",
    "apply_distinct_phases",
    "apply_sign_change",
    "apply_gamma_ancilla",
    "apply_root2m_rotation",
    "expected_calls_root2m",
    "quoted_calls_root2m",
    "prepare_root_register",
    "apply_kth_root",
    "approx_diagonal",
    "apply_diagonal",
    "ancilla_width",
    "main_qubits",
    "final_ancilla",
]
