"""Classical functions and their reversible embeddings on a main+ancilla register.

A :class:`ClassicalOracle` wraps a pure function on bit-strings.  The
simulator tabulates it once (uncounted); each coherent whole-register
application through :func:`apply_uf_xor` or :func:`apply_uf_modadd` counts
as exactly one oracle call.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, InvariantViolation, ValidationError
from .statevector import StateVector, apply_permutation_dense

# Above this many input bits bijectivity is spot-checked rather than exhaustively.
EXHAUSTIVE_BITS = 12


class ClassicalOracle:
    """Pure map ``{0..2**input_bits-1} -> {0..2**output_bits-1}``.

    ``fn`` receives a single int, or a numpy int array when ``vectorized`` is
    true.  Values are range-checked whenever they are produced.
    """

    def __init__(
        self,
        input_bits: int,
        output_bits: int,
        fn: Callable,
        *,
        vectorized: bool = False,
        name: str = "oracle",
        params: Mapping | None = None,
    ):
        if input_bits < 1:
            raise ValidationError(f"oracle needs at least one input bit, got {input_bits}")
        if output_bits < 0:
            raise ValidationError(f"negative output width {output_bits}")
        self.input_bits = int(input_bits)
        self.output_bits = int(output_bits)
        self.name = name
        self.params = dict(params or {})
        self._fn = fn
        self._vectorized = vectorized
        self._table: np.ndarray | None = None
        self._lock = threading.Lock()
        self._calls = 0

    def __repr__(self):
        return f"ClassicalOracle({self.name!r}, {self.input_bits}->{self.output_bits})"

    @property
    def call_counter(self) -> int:
        return self._calls

    def record_call(self) -> None:
        with self._lock:
            self._calls += 1

    def reset_counter(self) -> None:
        with self._lock:
            self._calls = 0

    def _check_value(self, v: int, x: int) -> int:
        if not 0 <= v < 2**self.output_bits:
            raise ValidationError(f"{self.name}({x}) = {v} does not fit in {self.output_bits} bits")
        return v

    def __call__(self, x: int) -> int:
        """Classical evaluation of a single input (not counted as an oracle call)."""
        if not 0 <= x < 2**self.input_bits:
            raise DomainError(f"input {x} out of range for {self.input_bits} bits")
        if self._table is not None:
            return int(self._table[x])
        if self._vectorized:
            v = int(np.asarray(self._fn(np.array([x], dtype=np.int64)))[0])
        else:
            v = int(self._fn(int(x)))
        return self._check_value(v, x)

    def table(self) -> np.ndarray:
        """All values as an int64 array, cached after the first use."""
        if self._table is None:
            xs = np.arange(2**self.input_bits, dtype=np.int64)
            if self._vectorized:
                vals = np.asarray(self._fn(xs), dtype=np.int64)
                vals = np.broadcast_to(vals, xs.shape).copy()
            else:
                vals = np.fromiter((int(self._fn(int(x))) for x in xs), dtype=np.int64, count=xs.size)
            bad = np.flatnonzero((vals < 0) | (vals >= 2**self.output_bits))
            if bad.size:
                x = int(bad[0])
                self._check_value(int(vals[x]), x)
            vals.setflags(write=False)
            self._table = vals
        return self._table

    def max_value(self) -> int:
        return int(self.table().max())

    def to_json(self) -> dict:
        if self.name in BUILTINS:
            return {"type": "builtin", "name": self.name, "params": {"input_bits": self.input_bits, **self.params}}
        return {
            "type": "table",
            "input_bits": self.input_bits,
            "output_bits": self.output_bits,
            "values": [int(v) for v in self.table()],
        }


def from_table(values, output_bits: int | None = None, name: str = "table") -> ClassicalOracle:
    vals = np.asarray(values, dtype=np.int64).reshape(-1)
    size = vals.shape[0]
    if size < 2 or size & (size - 1):
        raise ValidationError(f"truth table length {size} is not a power of two >= 2")
    if output_bits is None:
        output_bits = max(1, int(vals.max()).bit_length())
    frozen = vals.copy()
    return ClassicalOracle(size.bit_length() - 1, output_bits, lambda xs: frozen[xs], vectorized=True, name=name)


def _bits_for(count: int) -> int:
    """Bits needed to hold values ``0..count-1`` (at least one)."""
    return max(1, (int(count) - 1).bit_length())


def _popcount(xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros_like(xs)
    while np.any(xs):
        out += xs & 1
        xs = xs >> 1
    return out


# Builtins.  Each takes ``input_bits`` plus keyword params and returns an oracle.


def identity(input_bits: int) -> ClassicalOracle:
    return ClassicalOracle(input_bits, input_bits, lambda xs: xs, vectorized=True, name="identity")


def constant(input_bits: int, value: int = 0, output_bits: int = 1) -> ClassicalOracle:
    return ClassicalOracle(
        input_bits,
        output_bits,
        lambda xs: np.full_like(xs, value),
        vectorized=True,
        name="constant",
        params={"value": value, "output_bits": output_bits},
    )


def parity(input_bits: int) -> ClassicalOracle:
    return ClassicalOracle(input_bits, 1, lambda xs: _popcount(xs) & 1, vectorized=True, name="parity")


def hamming_weight(input_bits: int) -> ClassicalOracle:
    return ClassicalOracle(
        input_bits, _bits_for(input_bits + 1), _popcount, vectorized=True, name="hamming-weight"
    )


def marked_item(input_bits: int, target: int) -> ClassicalOracle:
    if not 0 <= target < 2**input_bits:
        raise DomainError(f"marked item {target} out of range")
    return ClassicalOracle(
        input_bits,
        1,
        lambda xs: (xs == target).astype(np.int64),
        vectorized=True,
        name="marked-item",
        params={"target": target},
    )


def delta(input_bits: int, y: int) -> ClassicalOracle:
    """Indicator of ``x == y``."""
    o = marked_item(input_bits, y)
    o.name = "delta"
    o.params = {"y": y}
    return o


def mod_k(input_bits: int, k: int) -> ClassicalOracle:
    if k < 1:
        raise DomainError(f"modulus must be positive, got {k}")
    return ClassicalOracle(
        input_bits, _bits_for(k), lambda xs: xs % k, vectorized=True, name="mod", params={"k": k}
    )


def block_index(input_bits: int, block_bits: int) -> ClassicalOracle:
    """``x >> block_bits``: label of the aligned block containing ``x``."""
    if not 0 <= block_bits < input_bits:
        raise DomainError("block_bits must be smaller than input_bits")
    return ClassicalOracle(
        input_bits,
        input_bits - block_bits,
        lambda xs: xs >> block_bits,
        vectorized=True,
        name="block-index",
        params={"block_bits": block_bits},
    )


def bit_of_table(values, j: int) -> ClassicalOracle:
    """Bit ``j`` of each entry of an integer table."""
    vals = np.asarray(values, dtype=np.int64)
    bits = (vals >> j) & 1
    o = from_table(bits, output_bits=1, name="bit-of-table")
    o.params = {"values": [int(v) for v in vals], "j": j}
    return o


def cyclic_shift(input_bits: int, c: int) -> ClassicalOracle:
    size = 2**input_bits
    return ClassicalOracle(
        input_bits, input_bits, lambda xs: (xs + c) % size, vectorized=True, name="cyclic-shift", params={"c": c}
    )


def bit_reversal(input_bits: int) -> ClassicalOracle:
    def rev(xs):
        out = np.zeros_like(xs)
        for b in range(input_bits):
            out |= ((xs >> b) & 1) << (input_bits - 1 - b)
        return out

    return ClassicalOracle(input_bits, input_bits, rev, vectorized=True, name="bit-reversal")


def xor_mask(input_bits: int, m: int) -> ClassicalOracle:
    if not 0 <= m < 2**input_bits:
        raise DomainError(f"mask {m} does not fit in {input_bits} bits")
    return ClassicalOracle(input_bits, input_bits, lambda xs: xs ^ m, vectorized=True, name="xor-mask", params={"m": m})


def exchange(input_bits: int, target: int) -> ClassicalOracle:
    """Swap ``0`` with ``target``; self-inverse.  Building it requires knowing ``target``."""
    if not 0 <= target < 2**input_bits:
        raise DomainError(f"target {target} out of range")

    def fn(xs):
        return np.where(xs == 0, target, np.where(xs == target, 0, xs))

    return ClassicalOracle(input_bits, input_bits, fn, vectorized=True, name="exchange", params={"target": target})


BUILTINS: dict[str, Callable[..., ClassicalOracle]] = {
    "identity": identity,
    "constant": constant,
    "parity": parity,
    "hamming-weight": hamming_weight,
    "marked-item": marked_item,
    "delta": delta,
    "mod": mod_k,
    "block-index": block_index,
    "cyclic-shift": cyclic_shift,
    "bit-reversal": bit_reversal,
    "xor-mask": xor_mask,
    "exchange": exchange,
}


def from_json(fragment: Mapping, input_bits: int | None = None) -> ClassicalOracle:
    """Build an oracle from a ``{"type": "table"|"builtin", ...}`` fragment.

    ``input_bits`` is the fallback width for builtins whose params omit it.
    """
    kind = fragment["type"]
    if kind == "table":
        o = from_table(fragment["values"], fragment.get("output_bits"))
        if "input_bits" in fragment and fragment["input_bits"] != o.input_bits:
            raise ValidationError(
                f"table has {len(fragment['values'])} entries but input_bits={fragment['input_bits']}"
            )
        return o
    if kind == "builtin":
        name = fragment["name"]
        params = dict(fragment.get("params") or {})
        if name == "bit-of-table":
            return bit_of_table(params["values"], params["j"])
        if name not in BUILTINS:
            raise ValidationError(f"unknown builtin oracle {name!r}")
        bits = params.pop("input_bits", input_bits)
        if bits is None:
            raise ValidationError(f"builtin {name!r} needs input_bits")
        return BUILTINS[name](int(bits), **params)
    raise ValidationError(f"unknown oracle type {kind!r}")


def check_bijection(g: ClassicalOracle, g_inv: ClassicalOracle, rng=None, samples: int = 256) -> None:
    """Verify ``g_inv(g(x)) == x`` and that ``g`` permutes its domain.

    Exhaustive up to :data:`EXHAUSTIVE_BITS` input bits, sampled above.
    """
    if not (g.input_bits == g.output_bits == g_inv.input_bits == g_inv.output_bits):
        raise ValidationError("g and g_inv must both map n bits to n bits")
    n = g.input_bits
    if n <= EXHAUSTIVE_BITS:
        gt = g.table()
        if np.unique(gt).size != gt.size:
            raise ValidationError("g is not a bijection")
        bad = np.flatnonzero(g_inv.table()[gt] != np.arange(gt.size))
        if bad.size:
            raise ValidationError(f"g_inv(g({int(bad[0])})) != {int(bad[0])}")
        return
    xs = rng.integers(0, 2**n, size=samples) if rng is not None else np.arange(min(samples, 2**n))
    for x in xs:
        if g_inv(g(int(x))) != int(x):
            raise ValidationError(f"g_inv(g({int(x)})) != {int(x)}")


@dataclass(frozen=True)
class RegisterLayout:
    """Main register on bits ``0..main_bits-1``, ancilla on the next ``ancilla_bits``."""

    main_bits: int
    ancilla_bits: int

    def __post_init__(self):
        if self.main_bits < 1 or self.ancilla_bits < 0:
            raise ValidationError(f"invalid layout {self}")

    @property
    def num_qubits(self) -> int:
        return self.main_bits + self.ancilla_bits

    def check(self, state: StateVector) -> None:
        if state.num_qubits != self.num_qubits:
            raise ValidationError(
                f"layout has {self.num_qubits} qubits but state has {state.num_qubits}"
            )


def xor_permutation(num_qubits: int, f: ClassicalOracle, src: tuple[int, int], dst: tuple[int, int]) -> np.ndarray:
    """Basis permutation of ``|.., src=x, .., dst=a, ..> -> |.., x, .., a ^ f(x), ..>``.

    ``src`` and ``dst`` are ``(offset, width)`` bit ranges and must not overlap.
    """
    (so, sw), (do, dw) = src, dst
    if so < do + dw and do < so + sw:
        raise ValidationError("source and destination registers overlap")
    if f.input_bits != sw or f.output_bits > dw:
        raise ValidationError(
            f"oracle {f.input_bits}->{f.output_bits} does not fit registers of width {sw}->{dw}"
        )
    idx = np.arange(2**num_qubits, dtype=np.int64)
    x = (idx >> so) & ((1 << sw) - 1)
    return idx ^ (f.table()[x] << do)


def modadd_permutation(layout: RegisterLayout, f: ClassicalOracle, k: int, sign: int = 1) -> np.ndarray:
    if k < 2 or k & (k - 1) or k != 2**layout.ancilla_bits:
        raise ValidationError(f"modulus {k} must equal 2**ancilla_bits = {2 ** layout.ancilla_bits}")
    if f.input_bits != layout.main_bits or f.output_bits > layout.ancilla_bits:
        raise ValidationError("oracle widths do not match the layout")
    n = layout.main_bits
    idx = np.arange(2**layout.num_qubits, dtype=np.int64)
    x = idx & ((1 << n) - 1)
    a = idx >> n
    return x | (((a + sign * f.table()[x]) % k) << n)


def apply_uf_xor(state: StateVector, layout: RegisterLayout, f: ClassicalOracle) -> StateVector:
    """``|x, a> -> |x, a XOR f(x)>``; one oracle call."""
    layout.check(state)
    perm = xor_permutation(layout.num_qubits, f, (0, layout.main_bits), (layout.main_bits, layout.ancilla_bits))
    f.record_call()
    return apply_permutation_dense(state, perm)


def apply_uf_modadd(state: StateVector, layout: RegisterLayout, f: ClassicalOracle, k: int) -> StateVector:
    """``|x, a> -> |x, (a + f(x)) mod k>``; one oracle call."""
    layout.check(state)
    perm = modadd_permutation(layout, f, k)
    f.record_call()
    return apply_permutation_dense(state, perm)


def as_permutation(kind: str, layout: RegisterLayout, f: ClassicalOracle, k: int | None = None) -> np.ndarray:
    """Basis-index permutation induced by an oracle transform (``kind`` is ``"xor"`` or ``"modadd"``).

    Raises:
        InvariantViolation: if the induced map is not a bijection.
    """
    if kind == "xor":
        perm = xor_permutation(layout.num_qubits, f, (0, layout.main_bits), (layout.main_bits, layout.ancilla_bits))
    elif kind == "modadd":
        perm = modadd_permutation(layout, f, 2**layout.ancilla_bits if k is None else k)
    else:
        raise DomainError(f"unknown oracle transform {kind!r}")
    if np.unique(perm).size != perm.size:
        raise InvariantViolation(f"{kind} transform of {f.name} is not a bijection")
    return perm
