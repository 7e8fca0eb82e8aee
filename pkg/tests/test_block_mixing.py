import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasekit import oracle as orc
from phasekit.block_mixing import (
    BlockDiagonalSpec,
    GroupedMixSpec,
    apply_block_diagonal,
    apply_grouped_mixing,
    dense_block_matrix,
    walsh_hadamard,
    wdw_mixing,
)
from phasekit.diagonal import ExplicitPhases, apply_sign_change
from phasekit.errors import ValidationError
from phasekit.resources import check_claims
from phasekit.statevector import H, Z, drop_clean_ancilla, new_basis_state, uniform_state

from instances import (
    ancilla_fidelity,
    block_diag_dense,
    rand_state,
    random_block_instance,
    random_grouped_instance,
    walsh_dense,
    zero_ancilla,
)


def test_walsh_on_three():
    out = walsh_hadamard(new_basis_state(2, 3))
    np.testing.assert_allclose(out.amplitudes, [0.5, -0.5, -0.5, 0.5], atol=1e-12)


def test_walsh_matches_dense(gen):
    s = rand_state(4, gen)
    np.testing.assert_allclose(walsh_hadamard(s).amplitudes, walsh_dense(4) @ s.amplitudes, atol=1e-12)


def test_wdw_flip_zero():
    # W diag(-1, 1, 1, 1) W |0> = |0> - |u> = (1/2, -1/2, -1/2, -1/2)
    joint, rep = wdw_mixing(new_basis_state(2, 0), ExplicitPhases(np.array([-1, 1, 1, 1])))
    np.testing.assert_allclose(joint.amplitudes[:4], [0.5, -0.5, -0.5, -0.5], atol=1e-12)
    assert rep.method == "wdw" and rep.oracle_calls == 8
    assert check_claims(rep)


def test_grover_step_probability():
    # oracle flip then diffusion W diag(-1, 1, ..) W on 3 qubits: p_marked = 25/32
    n, target = 3, 5
    joint, _ = apply_sign_change(uniform_state(n), orc.marked_item(n, target))
    s = drop_clean_ancilla(joint, n)
    joint, _ = wdw_mixing(s, ExplicitPhases(np.where(np.arange(8) == 0, -1, 1).astype(complex)))
    assert abs(joint.amplitudes[target]) ** 2 == pytest.approx(25 / 32, abs=1e-12)


def test_block_h_and_z():
    spec = BlockDiagonalSpec(2, orc.block_index(2, 1), (H, Z))
    joint, rep = apply_block_diagonal(new_basis_state(2, 0), spec)
    np.testing.assert_allclose(joint.amplitudes[:4], [2**-0.5, 2**-0.5, 0, 0], atol=1e-12)
    joint, _ = apply_block_diagonal(new_basis_state(2, 3), spec)
    np.testing.assert_allclose(joint.amplitudes[:4], [0, 0, 0, -1], atol=1e-12)
    assert (rep.oracle_calls, rep.ancilla_qubits, rep.elementary_ops, rep.modeled_block_cost) == (2, 1, 2, 8)


def test_block_validation():
    sel = orc.block_index(2, 1)
    with pytest.raises(ValidationError):
        BlockDiagonalSpec(2, sel, (np.array([[1, 1], [0, 1]]), Z))
    with pytest.raises(ValidationError):
        BlockDiagonalSpec(3, sel, (np.eye(3),))
    with pytest.raises(ValidationError):
        BlockDiagonalSpec(2, sel, (np.eye(4), np.eye(4)))
    # label depends on the low bit
    with pytest.raises(ValidationError):
        BlockDiagonalSpec(2, orc.from_table([0, 1, 0, 1], 1), (H, Z))
    # label 1 has no block
    with pytest.raises(ValidationError):
        BlockDiagonalSpec(2, sel, (H,))
    # more blocks than positions
    with pytest.raises(ValidationError):
        BlockDiagonalSpec(2, orc.constant(2), (H, Z, H))


def test_block_adjoint_undoes(gen):
    spec, _, _, _ = random_block_instance(4, gen)
    s = rand_state(4, gen)
    joint, _ = apply_block_diagonal(s, spec)
    back, _ = apply_block_diagonal(joint, spec.adjoint())
    np.testing.assert_allclose(back.amplitudes[:16], s.amplitudes, atol=1e-12)


def test_dense_block_matrix(gen):
    spec, labels, blocks, k = random_block_instance(5, gen)
    np.testing.assert_allclose(dense_block_matrix(spec), block_diag_dense(labels, blocks, k))


def test_grouped_pairs_zero_with_three():
    # groups {0, 3} and {1, 2}; mix the first with H, leave the second alone
    group = orc.from_table([0, 1, 1, 0], 1)
    member = orc.from_table([0, 0, 1, 1], 1)
    g_inv = orc.from_table([0, 3, 1, 2], 2)
    mix = BlockDiagonalSpec(2, orc.block_index(2, 1), (H, np.eye(2)))
    spec = GroupedMixSpec(group, member, g_inv, mix)
    joint, rep = apply_grouped_mixing(new_basis_state(2, 0), spec)
    np.testing.assert_allclose(joint.amplitudes[:4], [2**-0.5, 0, 0, 2**-0.5], atol=1e-12)
    assert rep.oracle_calls == 6
    assert check_claims(rep)


def test_grouped_rejects_bad_inverse():
    group = orc.from_table([0, 1, 1, 0], 1)
    member = orc.from_table([0, 0, 1, 1], 1)
    mix = BlockDiagonalSpec(2, orc.block_index(2, 1), (H, H))
    with pytest.raises(ValidationError):
        GroupedMixSpec(group, member, orc.identity(2), mix)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_block_matches_dense(n, seed):
    gen = np.random.default_rng(seed)
    spec, labels, blocks, k = random_block_instance(n, gen)
    s = rand_state(n, gen)
    joint, rep = apply_block_diagonal(s, spec)
    assert ancilla_fidelity(joint, n, zero_ancilla(spec.ancilla_bits)) == pytest.approx(1, abs=1e-10)
    want = block_diag_dense(labels, blocks, k) @ s.amplitudes
    np.testing.assert_allclose(joint.amplitudes[: 2**n], want, atol=1e-10)
    assert check_claims(rep)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_grouped_matches_dense(n, seed):
    gen = np.random.default_rng(seed)
    spec, dense = random_grouped_instance(n, gen)
    s = rand_state(n, gen)
    joint, rep = apply_grouped_mixing(s, spec)
    assert ancilla_fidelity(joint, n, zero_ancilla(n)) == pytest.approx(1, abs=1e-10)
    np.testing.assert_allclose(joint.amplitudes[: 2**n], dense @ s.amplitudes, atol=1e-10)
    assert check_claims(rep)
