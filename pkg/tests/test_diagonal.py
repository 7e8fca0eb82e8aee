import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasekit import oracle as orc
from phasekit.diagonal import (
    BitPhases,
    DistinctPhases,
    ExplicitPhases,
    GammaAncilla,
    RealPhaseOracle,
    Root2mPhase,
    RootOfUnity,
    SignPattern,
    apply_diagonal,
    apply_distinct_phases,
    apply_gamma_ancilla,
    apply_kth_root,
    apply_root2m_rotation,
    apply_sign_change,
    approx_diagonal,
    expected_calls_root2m,
    final_ancilla,
    prepare_root_register,
    quoted_calls_root2m,
    synthesize_naive,
    target_phases,
)
from phasekit.errors import DomainError, ValidationError
from phasekit.statevector import Rng, StateVector, uniform_state

from instances import (
    ancilla_fidelity,
    ancilla_rows,
    main_after_ancilla,
    overlap,
    rand_phases,
    rand_state,
    root_register_formula,
    zero_ancilla,
)


def test_naive_two_qubits_exact():
    joint, rep = synthesize_naive(uniform_state(2), [1, 1j, -1, -1j])
    np.testing.assert_allclose(joint.amplitudes, [0.5, 0.5j, -0.5, -0.5j, 0, 0, 0, 0], atol=1e-12)
    assert (rep.oracle_calls, rep.ancilla_qubits, rep.elementary_ops) == (8, 1, 4)


def test_distinct_parity_exact():
    spec = DistinctPhases(orc.parity(2), np.array([1, 1j]))
    joint, rep = apply_distinct_phases(uniform_state(2), spec)
    np.testing.assert_allclose(joint.amplitudes[:4], [0.5, 0.5j, 0.5j, 0.5], atol=1e-12)
    assert rep.oracle_calls == 2 and rep.ancilla_qubits == 1


def test_distinct_five_phases_three_ancillas(gen):
    f = orc.from_table([0, 1, 2, 3, 4, 0, 1, 2], output_bits=3)
    phases = rand_phases(5, gen)
    s = rand_state(3, gen)
    joint, rep = apply_distinct_phases(s, DistinctPhases(f, phases))
    assert rep.ancilla_qubits == 3 and rep.oracle_calls == 2
    assert rep.elementary_ops <= 8
    expected = phases[[0, 1, 2, 3, 4, 0, 1, 2]] * s.amplitudes
    np.testing.assert_allclose(joint.amplitudes[:8], expected, atol=1e-12)


def test_distinct_rejects_value_without_phase():
    with pytest.raises(ValidationError):
        apply_distinct_phases(uniform_state(2), DistinctPhases(orc.from_table([0, 1, 2, 0], 2), [1, 1j]))


def test_sign_change_one_qubit():
    joint, rep = apply_sign_change(uniform_state(1), orc.identity(1))
    np.testing.assert_allclose(joint.amplitudes, [2**-0.5, -(2**-0.5), 0, 0], atol=1e-12)
    assert (rep.oracle_calls, rep.ancilla_qubits) == (1, 1)
    assert rep.elementary_ops <= 4


def test_sign_change_needs_boolean():
    with pytest.raises(ValidationError):
        apply_sign_change(uniform_state(2), orc.identity(2))


def test_gamma_i_is_entangled():
    # rows (ancilla 0 / 1) = [[1, i], [i, 1]] / 2: both singular values 1/sqrt2
    joint, rep = apply_gamma_ancilla(uniform_state(1), orc.identity(1), 1j)
    rows = ancilla_rows(joint, 1)
    np.testing.assert_allclose(rows, [[0.5, 0.5j], [0.5j, 0.5]], atol=1e-12)
    sv = np.linalg.svd(rows, compute_uv=False)
    np.testing.assert_allclose(sv, [2**-0.5, 2**-0.5], atol=1e-12)
    assert (rep.oracle_calls, rep.ancilla_qubits) == (1, 1)


def test_gamma_minus_one_is_sign_change(gen):
    s = rand_state(3, gen)
    f = orc.marked_item(3, 5)
    joint, _ = apply_gamma_ancilla(s, f, -1)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert ancilla_fidelity(joint, 3, minus) == pytest.approx(1, abs=1e-12)
    want = s.amplitudes * np.where(np.arange(8) == 5, -1, 1)
    assert overlap(main_after_ancilla(joint, 3, minus), want) == pytest.approx(1, abs=1e-12)


def test_gamma_needs_unit_modulus():
    with pytest.raises(ValidationError):
        apply_gamma_ancilla(uniform_state(1), orc.identity(1), 0.5)


def test_root2m_expected_calls_values():
    assert [expected_calls_root2m(m) for m in (1, 2, 3, 4)] == [1, Fraction(3, 2), Fraction(7, 4), Fraction(15, 8)]
    assert quoted_calls_root2m(2) == 1
    assert quoted_calls_root2m(3) == Fraction(3, 2)
    assert all(expected_calls_root2m(m) < 2 for m in range(1, 21))
    with pytest.raises(DomainError):
        expected_calls_root2m(0)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_root2m_is_correct_for_every_outcome(m, gen):
    s = rand_state(3, gen)
    f = orc.from_table([0, 1, 1, 0, 1, 0, 0, 1], 1)
    want = s.amplitudes * np.exp(2j * np.pi * f.table() / 2**m)
    seen = set()
    for seed in range(40):
        joint, rep = apply_root2m_rotation(s, f, m, Rng(seed))
        seen.add(rep.oracle_calls)
        assert ancilla_fidelity(joint, 3, zero_ancilla(1)) == pytest.approx(1, abs=1e-12)
        assert overlap(joint.amplitudes[:8], want) == pytest.approx(1, abs=1e-12)
        assert rep.oracle_calls <= m
        assert rep.measurements == min(rep.oracle_calls, m - 1)
    # with 40 seeds every call count 1..m shows up for small m
    if m <= 3:
        assert seen == set(range(1, m + 1))


def test_root2m_reproducible():
    f = orc.parity(2)
    runs = [apply_root2m_rotation(uniform_state(2), f, 5, Rng(9))[1].oracle_calls for _ in range(3)]
    assert len(set(runs)) == 1


def test_root_register_small_cases():
    np.testing.assert_allclose(prepare_root_register(2).amplitudes, [2**-0.5, -(2**-0.5)], atol=1e-12)
    np.testing.assert_allclose(prepare_root_register(4).amplitudes, [0.5, -0.5j, -0.5, 0.5j], atol=1e-12)


@pytest.mark.parametrize("k", [2, 4, 8, 16, 32, 64])
def test_root_register_formula(k):
    np.testing.assert_allclose(prepare_root_register(k).amplitudes, root_register_formula(k), atol=1e-12)


def test_kth_root_example():
    joint, rep = apply_kth_root(uniform_state(2), orc.mod_k(2, 4), 4)
    r = root_register_formula(4)
    assert ancilla_fidelity(joint, 2, r) == pytest.approx(1, abs=1e-12)
    out = main_after_ancilla(joint, 2, r)
    # no global phase is introduced
    np.testing.assert_allclose(out, [0.5, 0.5j, -0.5, -0.5j], atol=1e-12)
    assert (rep.oracle_calls, rep.ancilla_qubits, rep.elementary_ops) == (1, 2, 4)


def test_kth_root_rejects_non_power_of_two():
    with pytest.raises(DomainError):
        apply_kth_root(uniform_state(2), orc.mod_k(2, 3), 3)


def test_real_phase_bits():
    p = RealPhaseOracle(2, lambda xs: xs / 4 + 1 / 8)
    # p = 0.001, 0.011, 0.101, 0.111 in binary
    assert p.truncated(3).tolist() == [1, 3, 5, 7]
    bits = [o.table().tolist() for o in p.bit_oracles(3)]
    assert bits == [[0, 0, 1, 1], [0, 1, 0, 1], [1, 1, 1, 1]]


def test_approx_constant_three_quarters_exact():
    s = uniform_state(2)
    joint, rep = approx_diagonal(s, RealPhaseOracle(2, lambda xs: np.full(xs.shape, 0.75)), 2)
    np.testing.assert_allclose(joint.amplitudes[:4], -1j * s.amplitudes, atol=1e-12)
    assert rep.ancilla_qubits == 1


def test_approx_one_bit_is_sign_change(gen):
    s = rand_state(2, gen)
    p = RealPhaseOracle(2, lambda xs: (xs % 2) / 2)
    a, rep = approx_diagonal(s, p, 1)
    b, _ = apply_sign_change(s, orc.from_table([0, 1, 0, 1], 1))
    assert a.allclose(b)
    assert rep.oracle_calls == 1


def test_approx_call_count_and_truncation(gen):
    s = rand_state(3, gen)
    vals = gen.random(8)
    p = RealPhaseOracle(3, lambda xs: vals[xs])
    for k in (1, 3, 7):
        joint, rep = approx_diagonal(s, p, k)
        trunc = np.floor(vals * 2**k) / 2**k
        np.testing.assert_allclose(joint.amplitudes[:8], np.exp(2j * np.pi * trunc) * s.amplitudes, atol=1e-12)
        # one call for the leading bit, two for each further bit
        assert rep.oracle_calls == 2 * k - 1


def test_target_phases_and_dispatch(gen):
    f = orc.from_table([1, 0, 1, 1], 1)
    s = rand_state(2, gen)
    specs = [
        ExplicitPhases(rand_phases(4, gen)),
        DistinctPhases(orc.from_table([2, 0, 1, 2], 2), rand_phases(3, gen)),
        SignPattern(f),
        RootOfUnity(orc.from_table([3, 1, 0, 7], 3), 8),
        Root2mPhase(f, 3),
        BitPhases((f, orc.parity(2))),
    ]
    for spec in specs:
        joint, _ = apply_diagonal(s, spec, Rng(1))
        anc = final_ancilla(spec)
        assert ancilla_fidelity(joint, 2, anc) == pytest.approx(1, abs=1e-12)
        out = main_after_ancilla(joint, 2, anc)
        assert overlap(out, target_phases(spec) * s.amplitudes) == pytest.approx(1, abs=1e-12)
    assert final_ancilla(GammaAncilla(f, 1j)) is None
    with pytest.raises(DomainError):
        apply_diagonal(s, Root2mPhase(f, 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_naive_matches_dense(n, seed):
    gen = np.random.default_rng(seed)
    s = rand_state(n, gen)
    d = rand_phases(2**n, gen)
    joint, rep = synthesize_naive(s, d)
    np.testing.assert_allclose(joint.amplitudes[: 2**n], d * s.amplitudes, atol=1e-10)
    assert np.allclose(joint.amplitudes[2**n :], 0, atol=1e-12)
    assert rep.oracle_calls == 2 * 2**n


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.sampled_from([2, 4, 8, 16]), st.integers(0, 2**32 - 1))
def test_kth_root_matches_dense(n, k, seed):
    gen = np.random.default_rng(seed)
    s = rand_state(n, gen)
    table = gen.integers(0, k, size=2**n)
    joint, rep = apply_kth_root(s, orc.from_table(table, k.bit_length() - 1), k)
    r = root_register_formula(k)
    assert ancilla_fidelity(joint, n, r) == pytest.approx(1, abs=1e-10)
    want = np.exp(2j * np.pi * table / k) * s.amplitudes
    assert overlap(main_after_ancilla(joint, n, r), want) == pytest.approx(1, abs=1e-10)
    assert rep.oracle_calls == 1
    assert rep.elementary_ops <= 2 * math.log2(k)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_gamma_rank(n, seed):
    gen = np.random.default_rng(seed)
    s = rand_state(n, gen)
    table = gen.integers(0, 2, size=2**n)
    table[0], table[-1] = 0, 1
    f = orc.from_table(table, 1)
    gamma = cmath.exp(2j * math.pi * gen.uniform(0.05, 0.45))
    sv = np.linalg.svd(ancilla_rows(apply_gamma_ancilla(s, f, gamma)[0], n), compute_uv=False)
    assert sv[1] > 1e-6
    sv = np.linalg.svd(ancilla_rows(apply_gamma_ancilla(s, f, 1)[0], n), compute_uv=False)
    assert sv[1] < 1e-12


def test_state_with_clean_ancilla_is_accepted(gen):
    s = rand_state(2, gen)
    joint, _ = apply_sign_change(s, orc.parity(2))
    again, rep = apply_sign_change(joint, orc.parity(2))
    assert StateVector(again.amplitudes[:4]).allclose(s)
    assert rep.oracle_calls == 1
