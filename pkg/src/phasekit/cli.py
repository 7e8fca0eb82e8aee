"""Command-line front end.

Exit codes: 0 pass, 1 check failure or invalid spec content, 2 usage or parse error.
With ``--format json`` each subcommand prints exactly one JSON document on
stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import oracle as orc
from .block_mixing import BlockDiagonalSpec, GroupedMixSpec, apply_grouped_mixing, dense_block_matrix, wdw_mixing
from .decompose import MAX_QUBITS, is_decomposable
from .diagonal import SignPattern, apply_root2m_rotation, apply_sign_change, expected_calls_root2m, quoted_calls_root2m
from .errors import PhaseKitError
from .permutation import PermutationSpec, apply_permutation_inplace
from .resources import check_claims
from .specfile import Method, SpecError, complex_json, load, parse_complex
from .statevector import (
    H,
    TOL,
    Rng,
    StateVector,
    drop_clean_ancilla,
    fidelity_up_to_global_phase,
    high_register_fidelity,
    new_basis_state,
    project_high_register,
    random_state,
    uniform_state,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_TRIALS = {"verify": 50, "resources": 1, "rotation-stats": 10_000, "decompose": 1, "demo": 1}
MAX_CLI_QUBITS = 20


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(args, doc: dict, human: str) -> None:
    if args.format == "json":
        print(json.dumps(doc, sort_keys=True))
    else:
        print(human)


def _read_json(path: str | None):
    if path is None:
        raise UsageError("--spec is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc


def _load_method(args) -> Method:
    doc = _read_json(args.spec)
    try:
        method = load(doc, args.n)
    except SpecError as exc:
        raise UsageError(str(exc)) from exc
    if method.num_qubits > MAX_CLI_QUBITS:
        raise UsageError(f"{method.num_qubits} qubits exceeds the CLI limit of {MAX_CLI_QUBITS}")
    return method


def _deficit(method: Method, state: StateVector, joint: StateVector) -> float:
    """Worst of main-register and ancilla fidelity deficits for one run."""
    n = method.num_qubits
    want = method.expected(state)
    if method.entangling or joint.num_qubits == n:
        return 1 - fidelity_up_to_global_phase(joint, want)
    anc = method.final_ancilla
    anc_deficit = 1 - high_register_fidelity(joint, n, anc)
    main = project_high_register(joint, n, anc)
    return max(anc_deficit, 1 - fidelity_up_to_global_phase(main, want))


def cmd_verify(args) -> int:
    method = _load_method(args)
    worst = 0.0
    for t in range(args.trials):
        rng = Rng.for_trial(args.seed, t)
        state = random_state(method.num_qubits, rng)
        joint, _ = method.run(state, rng)
        worst = max(worst, _deficit(method, state, joint))
    ok = worst <= args.tolerance
    doc = {
        "method": method.name,
        "n": method.num_qubits,
        "trials": args.trials,
        "seed": args.seed,
        "tolerance": args.tolerance,
        "worst_deficit": worst,
        "pass": ok,
    }
    _emit(
        args,
        doc,
        f"{method.name} n={method.num_qubits}: worst fidelity deficit {worst:.3e} over {args.trials} trials "
        f"(tolerance {args.tolerance:g}) -> {'PASS' if ok else 'FAIL'}",
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_resources(args) -> int:
    method = _load_method(args)
    rng = Rng(args.seed)
    _, report = method.run(random_state(method.num_qubits, rng), rng)
    check = check_claims(report)
    doc = {**report.to_json(), "seed": args.seed, "claims": "pass" if check else "fail", "diffs": list(check.diffs)}
    lines = [f"{name}: {value}" for name, value in report.counts().items()]
    lines.append(f"claims: {'pass' if check else 'fail'}")
    lines.extend(f"  {d}" for d in check.diffs)
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if check else EXIT_FAIL


def rotation_call_counts(m: int, trials: int, seed: int, n: int = 3) -> np.ndarray:
    """Oracle calls used by each of ``trials`` seeded rotations (parity oracle, uniform input)."""
    f = orc.parity(n)
    state = uniform_state(n)
    calls = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        _, report = apply_root2m_rotation(state, f, m, Rng.for_trial(seed, t))
        calls[t] = report.oracle_calls
    return calls


def cmd_rotation_stats(args) -> int:
    if args.m < 1:
        raise UsageError("--m must be at least 1")
    calls = rotation_call_counts(args.m, args.trials, args.seed)
    mean = float(calls.mean())
    expected = expected_calls_root2m(args.m)
    quoted = quoted_calls_root2m(args.m)
    doc = {
        "m": args.m,
        "trials": args.trials,
        "seed": args.seed,
        "empirical_mean": mean,
        "expected": float(expected),
        "expected_exact": str(expected),
        "quoted_closed_form": float(quoted),
        "max_calls": int(calls.max()),
    }
    if args.trials < 100:
        _err(f"warning: {args.trials} trials is too few for a pass/fail verdict")
        ok = None
    else:
        ok = abs(mean - float(expected)) <= args.band
        doc["band"] = args.band
        doc["pass"] = ok
    verdict = "" if ok is None else f" -> {'PASS' if ok else 'FAIL'}"
    _emit(
        args,
        doc,
        f"m={args.m}: mean calls {mean:.4f} over {args.trials} trials; "
        f"E(m) = 2 - 2^(1-m) = {expected} ({float(expected):.4f}); "
        f"quoted closed form (2^(m-1)-1)/2^(m-2) = {float(quoted):.4f}{verdict}",
    )
    return EXIT_FAIL if ok is False else EXIT_OK


def cmd_decompose(args) -> int:
    doc = _read_json(args.spec)
    try:
        phases = np.array([parse_complex(v) for v in doc["phases"]], dtype=complex)
    except (KeyError, TypeError, SpecError) as exc:
        raise UsageError(f"decompose expects {{\"phases\": [...]}}: {exc}") from exc
    if phases.size > 2**MAX_QUBITS:
        raise UsageError(
            f"diagonal has more than 2**{MAX_QUBITS} entries; the full test is exponential, "
            "use phasekit.decompose.pairwise_necessary_check on sampled pairs instead"
        )
    verdict = is_decomposable(phases)
    out = {
        "decomposable": verdict.decomposable,
        "factors": [complex_json(g) for g in verdict.factors.factors],
        "witness": verdict.witness,
        "global_phase": complex_json(verdict.global_phase),
    }
    human = f"decomposable: {verdict.decomposable}"
    if verdict.decomposable:
        human += "\nfactors: " + ", ".join(f"{g:.6g}" for g in verdict.factors.factors)
    else:
        human += f"\nwitness: {verdict.witness}"
    _emit(args, out, human)
    return EXIT_OK


def _demo_grover(args) -> tuple[dict, str]:
    n = args.n or 3
    target = int(Rng(args.seed).integers(0, 2**n))
    mark = orc.marked_item(n, target)
    state = uniform_state(n)
    joint, sign_report = apply_sign_change(state, mark)
    state = drop_clean_ancilla(joint, n)
    # inversion about the mean: W D W with D = -1 on |0...0>
    joint, mix_report = wdw_mixing(state, SignPattern(orc.marked_item(n, 0)))
    state = drop_clean_ancilla(joint, n)
    p = float(state.probabilities()[target])
    doc = {
        "demo": "grover-sign-step",
        "n": n,
        "seed": args.seed,
        "marked": target,
        "p_marked": p,
        "oracle_calls": sign_report.oracle_calls + mix_report.oracle_calls,
    }
    return doc, f"one sign-flip + W D W step on n={n}: P(marked item {target}) = {p:.5f} (uniform start {2**-n:.5f})"


EXCHANGE_NOTE = (
    "note: g and g_inv here swap |0...0> with the marked item, so writing them down requires "
    "already knowing the marked item. With only the membership test f available this exchange "
    "cannot be done efficiently; that is why the permutation routine insists on g_inv."
)


def _demo_exchange(args) -> tuple[dict, str]:
    n = args.n or 3
    target = int(Rng(args.seed).integers(1, 2**n))
    swap = orc.exchange(n, target)
    joint, report = apply_permutation_inplace(new_basis_state(n, 0), PermutationSpec(swap, swap))
    out = drop_clean_ancilla(joint, n)
    found = int(np.argmax(out.probabilities()))
    doc = {
        "demo": "exchange-permutation",
        "n": n,
        "seed": args.seed,
        "marked": target,
        "result": found,
        "oracle_calls": report.oracle_calls,
        "note": EXCHANGE_NOTE,
    }
    return doc, f"|0> -> |{found}> (marked {target}) with {report.oracle_calls} oracle calls\n{EXCHANGE_NOTE}"


def _demo_grouped(args) -> tuple[dict, str]:
    # groups {|0>, |3>} and {|1>, |2>}; Hadamard-mix group 0, leave group 1 alone
    group_number = orc.from_table([0, 1, 1, 0])
    member_id = orc.from_table([0, 0, 1, 1])
    g_inv = orc.from_table([0, 3, 1, 2], output_bits=2)
    mix = BlockDiagonalSpec(2, orc.block_index(2, 1), (H, np.eye(2)))
    spec = GroupedMixSpec(group_number, member_id, g_inv, mix)
    state = new_basis_state(2, 0)
    joint, report = apply_grouped_mixing(state, spec)
    out = drop_clean_ancilla(joint, 2)
    g = spec.g.table()
    perm = np.eye(4)[:, g]
    dense = perm.T @ dense_block_matrix(mix) @ perm
    fid = fidelity_up_to_global_phase(out, StateVector(dense @ state.amplitudes))
    doc = {
        "demo": "grouped-mixing",
        "amplitudes": [complex_json(a) for a in out.amplitudes],
        "fidelity_vs_dense": fid,
        "oracle_calls": report.oracle_calls,
    }
    amps = ", ".join(f"{a.real:+.4f}" for a in out.amplitudes)
    return doc, f"|0> mixed with |3>: amplitudes [{amps}]; fidelity vs dense P^-1 M P = {fid:.12f}"


DEMOS = {
    "grover-sign-step": _demo_grover,
    "exchange-permutation": _demo_exchange,
    "grouped-mixing": _demo_grouped,
}


def cmd_demo(args) -> int:
    doc, human = DEMOS[args.name](args)
    _emit(args, doc, human)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON spec file")
    common.add_argument("--n", type=int, default=None, help="main register width for builtin oracles")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=None, help="default 50; 10000 for rotation-stats")
    common.add_argument("--tolerance", type=float, default=TOL)
    common.add_argument("--format", choices=("human", "json"), default="human")

    parser = argparse.ArgumentParser(prog="phasekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="compare a method with its dense reference on random states")
    sub.add_parser("resources", parents=[common], help="report resource counts and check them against the claims")
    rot = sub.add_parser("rotation-stats", parents=[common], help="mean oracle calls of the 2^m-th root rotation")
    rot.add_argument("--m", type=int, default=3)
    rot.add_argument("--band", type=float, default=0.05, help="allowed |mean - E(m)|")
    sub.add_parser("decompose", parents=[common], help="test a diagonal for single-qubit decomposability")
    demo = sub.add_parser("demo", parents=[common], help="run a bundled demonstration")
    demo.add_argument("name", choices=sorted(DEMOS))
    return parser


COMMANDS = {
    "verify": cmd_verify,
    "resources": cmd_resources,
    "rotation-stats": cmd_rotation_stats,
    "decompose": cmd_decompose,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.trials is None:
        args.trials = DEFAULT_TRIALS[args.command]
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except PhaseKitError as exc:
        kind = "validation" if isinstance(exc, ValueError) else "invariant violation"
        _err(f"{kind} error: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
