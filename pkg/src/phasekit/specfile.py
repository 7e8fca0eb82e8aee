"""JSON spec files: parsing, running, and the matching dense reference.

A spec document is an object with a ``"method"`` key.  Oracle fragments are
``{"type": "table", ...}`` or ``{"type": "builtin", ...}`` (see
:func:`phasekit.oracle.from_json`).  Complex numbers are written as a plain
number, an ``[re, im]`` pair, or ``{"turns": t}`` meaning ``exp(2 pi i t)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np

from . import oracle as orc
from .block_mixing import (
    BlockDiagonalSpec,
    GroupedMixSpec,
    apply_block_diagonal,
    apply_grouped_mixing,
    dense_block_matrix,
    wdw_mixing,
)
from .decompose import FactorSet, apply_decomposed, is_decomposable
from .diagonal import (
    BitPhases,
    DistinctPhases,
    ExplicitPhases,
    GammaAncilla,
    RealPhaseOracle,
    Root2mPhase,
    RootOfUnity,
    SignPattern,
    apply_diagonal,
    final_ancilla,
    main_qubits,
    target_phases,
)
from .errors import ValidationError
from .permutation import PermutationSpec, apply_permutation_inplace
from .resources import ResourceReport
from .statevector import Rng, StateVector, new_basis_state

METHODS = (
    "naive",
    "distinct",
    "sign",
    "gamma",
    "root2m",
    "kthroot",
    "approx",
    "decomposed",
    "permutation",
    "block",
    "grouped",
    "wdw",
)


class SpecError(ValueError):
    """The document is not a well-formed spec (maps to a usage/parse failure)."""


def parse_complex(v) -> complex:
    if isinstance(v, Mapping):
        if "turns" in v:
            return complex(np.exp(2j * np.pi * float(v["turns"])))
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise SpecError(f"complex pair must have two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise SpecError(f"cannot read {v!r} as a complex number")


def complex_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _phases(values) -> np.ndarray:
    return np.array([parse_complex(v) for v in values], dtype=complex)


def _block(values, k: int) -> np.ndarray:
    """A ``k x k`` block, either flat row-major (``k*k`` entries) or as ``k`` rows."""
    if len(values) == k:
        values = [e for row in values for e in row]
    if len(values) != k * k:
        raise SpecError(f"block must have {k * k} row-major entries, got {len(values)}")
    return _phases(values).reshape(k, k)


def _real_phase_oracle(frag: Mapping, n: int) -> RealPhaseOracle:
    kind = frag["type"]
    if kind == "ratio":
        den = float(frag["denominator"])
        return RealPhaseOracle(n, lambda xs: xs / den, name=f"x/{frag['denominator']}")
    if kind == "real_table":
        vals = np.asarray(frag["values"], dtype=float)
        if vals.shape[0] != 2**n:
            raise SpecError(f"real_table needs {2 ** n} values")
        return RealPhaseOracle(n, lambda xs: vals[xs], name="real_table")
    raise SpecError(f"unknown phase-fraction oracle type {kind!r}")


@dataclass
class Method:
    """A loaded spec: how to run it and what it should produce."""

    name: str
    spec: Any
    num_qubits: int
    run: Callable[[StateVector, Rng], tuple[StateVector, ResourceReport]]
    expected: Callable[[StateVector], StateVector]
    final_ancilla: StateVector | None
    entangling: bool = False


def _diag_method(name: str, spec, n: int) -> Method:
    return Method(
        name,
        spec,
        n,
        lambda s, rng: apply_diagonal(s, spec, rng),
        lambda s: StateVector(target_phases(spec) * s.amplitudes),
        final_ancilla(spec),
    )


def _gamma_expected(spec: GammaAncilla) -> Callable[[StateVector], StateVector]:
    def expected(s: StateVector) -> StateVector:
        f = spec.f.table().astype(bool)
        a = s.amplitudes / np.sqrt(2)
        row0 = np.where(f, spec.gamma * a, a)
        row1 = np.where(f, a, spec.gamma * a)
        return StateVector(np.concatenate([row0, row1]))

    return expected


def _walsh_matrix(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    dots = np.vectorize(lambda v: bin(v).count("1"))(idx[:, None] & idx[None, :])
    return (-1.0) ** dots / 2 ** (n / 2)


def load(doc: Mapping, n: int | None = None) -> Method:
    """Build a :class:`Method` from a parsed spec document.

    ``n`` overrides the document's ``"n"`` (used as the width of builtin oracles).

    Raises:
        SpecError: missing keys or malformed values.
        ValidationError: well-formed but invalid content (non-unitary block, ...).
    """
    try:
        return _load(doc, n)
    except (KeyError, TypeError, IndexError) as exc:
        raise SpecError(f"malformed spec: {exc!r}") from exc


def _load(doc: Mapping, n_override: int | None) -> Method:
    if not isinstance(doc, Mapping):
        raise SpecError("spec must be a JSON object")
    method = doc["method"]
    if method not in METHODS:
        raise SpecError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    n = n_override if n_override is not None else doc.get("n")

    def oracle(key="oracle"):
        return orc.from_json(doc[key], n)

    if method == "naive":
        spec = ExplicitPhases(_phases(doc["phases"]))
        return _diag_method(method, spec, spec.num_qubits)
    if method == "distinct":
        spec = DistinctPhases(oracle(), _phases(doc["phases"]))
        return _diag_method(method, spec, spec.f.input_bits)
    if method == "sign":
        spec = SignPattern(oracle())
        return _diag_method(method, spec, spec.f.input_bits)
    if method == "root2m":
        spec = Root2mPhase(oracle(), int(doc["m"]))
        return _diag_method(method, spec, spec.f.input_bits)
    if method == "kthroot":
        spec = RootOfUnity(oracle(), int(doc["k"]))
        return _diag_method(method, spec, spec.f.input_bits)
    if method == "gamma":
        spec = GammaAncilla(oracle(), parse_complex(doc["gamma"]))
        m = _diag_method(method, spec, spec.f.input_bits)
        m.expected = _gamma_expected(spec)
        m.entangling = True
        return m
    if method == "approx":
        k = int(doc["precision"])
        if "oracles" in doc:
            spec = BitPhases(tuple(orc.from_json(o, n) for o in doc["oracles"]))
        else:
            if n is None:
                raise SpecError("approx with a phase-fraction oracle needs n")
            spec = BitPhases.from_real(_real_phase_oracle(doc["p"], int(n)), k)
        if spec.k != k:
            raise ValidationError(f"{spec.k} bit oracles for precision {k}")
        return _diag_method(method, spec, main_qubits(spec))
    if method == "decomposed":
        if "factors" in doc:
            fs = FactorSet.of(_phases(doc["factors"]))
        else:
            verdict = is_decomposable(_phases(doc["phases"]))
            if not verdict.decomposable:
                raise ValidationError(f"diagonal is not decomposable (witness {verdict.witness})")
            fs = verdict.factors
        return Method(
            method,
            fs,
            fs.num_qubits,
            lambda s, rng: apply_decomposed(s, fs),
            lambda s: StateVector(fs.diagonal() * s.amplitudes),
            None,
        )
    if method == "permutation":
        spec = PermutationSpec(oracle("g"), oracle("g_inv"))
        table = spec.g.table()

        def expected(s):
            out = np.empty_like(s.amplitudes)
            out[table] = s.amplitudes
            return StateVector(out)

        return Method(
            method,
            spec,
            spec.num_qubits,
            lambda s, rng: apply_permutation_inplace(s, spec),
            expected,
            new_basis_state(spec.num_qubits, 0),
        )
    if method in ("block", "grouped"):
        k = int(doc["k"])
        blocks = tuple(_block(b, k) for b in doc["blocks"])
        mix = BlockDiagonalSpec(k, oracle("selector"), blocks)
        dense = dense_block_matrix(mix)
        if method == "block":
            return Method(
                method,
                mix,
                mix.num_qubits,
                lambda s, rng: apply_block_diagonal(s, mix),
                lambda s: StateVector(dense @ s.amplitudes),
                new_basis_state(mix.ancilla_bits, 0),
            )
        spec = GroupedMixSpec(oracle("group_number"), oracle("member_id"), oracle("g_inv"), mix)
        perm = np.eye(2**mix.num_qubits)[:, spec.g.table()]  # perm[g(x), x] = 1
        full = perm.T @ dense @ perm
        return Method(
            method,
            spec,
            mix.num_qubits,
            lambda s, rng: apply_grouped_mixing(s, spec),
            lambda s: StateVector(full @ s.amplitudes),
            new_basis_state(mix.num_qubits, 0),
        )
    # wdw
    inner = _load({**doc["diagonal"], **({"n": doc["n"]} if "n" in doc else {})}, n_override)
    if inner.entangling or inner.name not in ("naive", "distinct", "sign", "root2m", "kthroot", "approx"):
        raise SpecError(f"wdw needs a diagonal method, got {inner.name!r}")
    w = _walsh_matrix(inner.num_qubits)
    d = target_phases(inner.spec)
    return Method(
        method,
        inner.spec,
        inner.num_qubits,
        lambda s, rng: wdw_mixing(s, inner.spec, rng),
        lambda s: StateVector(w @ (d * (w @ s.amplitudes))),
        inner.final_ancilla,
    )


def loads(text: str, n: int | None = None) -> Method:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc
    return load(doc, n)
