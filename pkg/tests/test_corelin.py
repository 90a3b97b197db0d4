import math

import numpy as np
import pytest

from prslab import corelin
from prslab.budget import BudgetError
from prslab.corelin import (
    DensityOperator,
    LayerKind,
    PureState,
    RegisterError,
    apply_layer,
    basis_state,
    hadamard_all_layer,
    partial_trace,
    phase_diagonal_layer,
    permutation_layer,
    random_state,
    random_unitary,
    symmetric_projector,
    trace_distance,
)

from conftest import assert_matrices_close, assert_vectors_close


class TestPureState:
    def test_length_must_match_qubit_count(self):
        with pytest.raises(RegisterError):
            PureState(2, [1.0, 0.0])

    def test_norm_enforced_for_normalized_states(self):
        with pytest.raises(RegisterError):
            PureState(1, [1.0, 1.0])

    def test_unnormalized_flag_admits_intermediate_sums(self):
        s = PureState(1, [1.0, 1.0], normalized=False)
        assert s.norm() == pytest.approx(math.sqrt(2))

    def test_amplitudes_are_read_only(self):
        s = basis_state(1, 0)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.0


class TestUnitaryLayer:
    def test_targets_must_be_distinct(self):
        with pytest.raises(RegisterError):
            hadamard_all_layer((0, 0))

    def test_negative_target_rejected(self):
        with pytest.raises(RegisterError):
            hadamard_all_layer((-1,))

    def test_custom_payload_must_be_unitary(self):
        layer = corelin.custom_layer((0,), np.array([[1.0, 0.0], [1.0, 1.0]]))
        with pytest.raises(RegisterError, match="unitary"):
            corelin.materialize(layer)


class TestApplyLayer:
    def test_hadamard_on_zero(self):
        out = apply_layer(basis_state(1, 0), hadamard_all_layer((0,)))
        assert_vectors_close(out.amplitudes, np.array([1, 1]) / math.sqrt(2), 1e-15)

    def test_identity_permutation_is_identity(self, rng):
        s = random_state(3, rng)
        out = apply_layer(s, permutation_layer((0, 1, 2), range(8)))
        assert_vectors_close(out.amplitudes, s.amplitudes, 0.0)

    def test_phase_diagonal_against_explicit_matrix(self):
        # f(x) = x0 * x1 flips the sign of |11> only
        s = PureState(2, np.full(4, 0.5))
        layer = phase_diagonal_layer((0, 1), 2, [0, 0, 0, 1])
        expected = np.diag([1.0, 1.0, 1.0, -1.0]) @ s.amplitudes
        out = apply_layer(s, layer)
        assert_vectors_close(out.amplitudes, expected, 0.0)
        assert_vectors_close(out.amplitudes, [0.5, 0.5, 0.5, -0.5], 0.0)

    def test_out_of_range_target_names_qubit(self):
        with pytest.raises(RegisterError, match="qubit 5"):
            apply_layer(basis_state(2, 0), hadamard_all_layer((5,)))

    def test_sub_register_action(self, rng):
        # layer on qubit 1 of 2 must equal I (x) U
        u = random_unitary(2, rng)
        s = random_state(2, rng)
        out = apply_layer(s, corelin.custom_layer((1,), u))
        expected = np.kron(np.eye(2), u) @ s.amplitudes
        assert_vectors_close(out.amplitudes, expected, 1e-14)

    def test_non_contiguous_targets(self, rng):
        # targets (2, 0): operator MSB is state qubit 2, operator LSB is qubit 0
        u = random_unitary(4, rng)
        s = random_state(3, rng)
        out = apply_layer(s, corelin.custom_layer((2, 0), u))
        perm = corelin.register_permutation_operator(2, 3, (2, 0, 1))
        expected = perm.T @ np.kron(u, np.eye(2)) @ perm @ s.amplitudes
        assert_vectors_close(out.amplitudes, expected, 1e-14)

    @pytest.mark.parametrize("kind", list(LayerKind))
    def test_norm_preserved_across_1000_random_states(self, kind, rng):
        n = 3
        layers = []
        if kind is LayerKind.HADAMARD_ALL:
            layers = [hadamard_all_layer((0, 1, 2)), hadamard_all_layer((1,))]
        elif kind is LayerKind.QFT:
            layers = [corelin.qft_layer((0, 1, 2)), corelin.qft_layer((0, 2))]
        elif kind is LayerKind.PHASE_DIAGONAL:
            layers = [
                phase_diagonal_layer((0, 1), 4, rng.integers(0, 4, size=4)),
                phase_diagonal_layer((0, 1, 2), 8, rng.integers(0, 8, size=8)),
            ]
        elif kind is LayerKind.PERMUTATION:
            layers = [permutation_layer((0, 1, 2), rng.permutation(8))]
        else:
            layers = [corelin.custom_layer((0, 1), random_unitary(4, rng))]
        for k in range(1000):
            s = random_state(n, rng)
            out = apply_layer(s, layers[k % len(layers)])
            assert abs(out.norm() - 1.0) <= 1e-12


class TestPartialTrace:
    def test_bell_pair_reduces_to_maximally_mixed(self):
        bell = PureState(2, np.array([1, 0, 0, 1]) / math.sqrt(2))
        rho = partial_trace(bell, [1])
        assert_matrices_close(rho.matrix, np.eye(2) / 2, 1e-15)

    def test_trace_nothing_gives_projector(self, rng):
        s = random_state(2, rng)
        rho = partial_trace(s, [])
        assert_matrices_close(rho.matrix, np.outer(s.amplitudes, s.amplitudes.conj()), 1e-15)

    def test_product_state_hand_computation(self):
        # (|00> + |01>)/sqrt2 = |0> (x) |+>: tracing qubit 1 leaves |0><0|
        s = PureState(2, np.array([1, 1, 0, 0]) / math.sqrt(2))
        rho = partial_trace(s, [1])
        assert_matrices_close(rho.matrix, [[1, 0], [0, 0]], 1e-15)

    def test_trace_everything_gives_scalar_one(self, rng):
        s = random_state(2, rng)
        rho = partial_trace(s, [0, 1])
        assert_matrices_close(rho.matrix, [[1.0]], 1e-12)

    def test_out_of_range_index(self):
        with pytest.raises(RegisterError, match="qubit 4"):
            partial_trace(basis_state(2, 0), [4])

    def test_purification_invariant_under_isometry_on_traced_register(self, rng):
        # appending an isometry to the traced register leaves the reduction fixed
        for _ in range(5):
            chi = random_state(4, rng)
            d_a, d_e, d_e2 = 4, 4, 16
            z = rng.standard_normal((d_e2, d_e)) + 1j * rng.standard_normal((d_e2, d_e))
            iso, _ = np.linalg.qr(z)
            before = partial_trace(chi, [2, 3])
            extended = (chi.amplitudes.reshape(d_a, d_e) @ iso.T).reshape(-1)
            after = partial_trace(PureState(6, extended), [2, 3, 4, 5])
            assert_matrices_close(before.matrix, after.matrix, 1e-10)

    def test_transpose_flip_identity(self, rng):
        for dim in (2, 4, 16):
            u = random_unitary(dim, rng)
            lhs = sum(np.kron(u[:, x], np.eye(dim)[x]) for x in range(dim))
            rhs = sum(np.kron(np.eye(dim)[x], u.T[:, x]) for x in range(dim))
            assert_vectors_close(lhs, rhs, 1e-12)


class TestTraceDistance:
    def test_zero_on_equal_states(self, rng):
        rho = partial_trace(random_state(3, rng), [0])
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        a = partial_trace(basis_state(1, 0), [])
        b = partial_trace(basis_state(1, 1), [])
        assert trace_distance(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_zero_versus_plus(self):
        plus = PureState(1, np.array([1, 1]) / math.sqrt(2))
        a = partial_trace(basis_state(1, 0), [])
        b = partial_trace(plus, [])
        assert trace_distance(a, b) == pytest.approx(math.sqrt(0.5), abs=1e-10)

    def test_agrees_with_pure_state_overlap_formula(self, rng):
        for _ in range(20):
            u, v = random_state(3, rng), random_state(3, rng)
            td = trace_distance(partial_trace(u, []), partial_trace(v, []))
            overlap = abs(np.vdot(u.amplitudes, v.amplitudes)) ** 2
            assert td == pytest.approx(math.sqrt(1 - overlap), abs=1e-10)

    def test_triangle_inequality_on_random_triples(self, rng):
        for _ in range(10):
            rhos = [partial_trace(random_state(4, rng), [0, 1]) for _ in range(3)]
            ab = trace_distance(rhos[0], rhos[1])
            bc = trace_distance(rhos[1], rhos[2])
            ac = trace_distance(rhos[0], rhos[2])
            assert ac <= ab + bc + 1e-10

    def test_contracts_under_partial_trace(self, rng):
        for _ in range(10):
            u, v = random_state(3, rng), random_state(3, rng)
            full = trace_distance(partial_trace(u, []), partial_trace(v, []))
            reduced = trace_distance(partial_trace(u, [2]), partial_trace(v, [2]))
            assert reduced <= full + 1e-10

    def test_dimension_mismatch(self, rng):
        a = partial_trace(random_state(2, rng), [0])
        b = partial_trace(random_state(2, rng), [])
        with pytest.raises(RegisterError):
            trace_distance(a, b)


class TestSymmetricProjector:
    def test_single_copy_is_identity(self):
        proj = symmetric_projector(2, 1)
        assert_matrices_close(proj.matrix, np.eye(2), 0.0)
        assert proj.trace().real == pytest.approx(2.0)

    def test_two_qubit_trace(self):
        assert symmetric_projector(2, 2).trace().real == pytest.approx(3.0)

    def test_dimension_four_two_copies(self):
        proj = symmetric_projector(4, 2)
        assert proj.trace().real == pytest.approx(10.0, abs=1e-12)
        assert_matrices_close(proj.matrix @ proj.matrix, proj.matrix, 1e-12)

    def test_idempotent_odd_local_dim(self):
        proj = symmetric_projector(3, 3)
        assert_matrices_close(proj.matrix @ proj.matrix, proj.matrix, 1e-12)
        assert proj.trace().real == pytest.approx(math.comb(5, 3), abs=1e-12)

    def test_budget_error_reports_sizes(self):
        with pytest.raises(BudgetError, match="MiB"):
            symmetric_projector(2, 30)


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(RegisterError, match="Hermitian"):
            DensityOperator(np.array([[0.5, 1.0], [0.0, 0.5]]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(RegisterError, match="trace"):
            DensityOperator(np.eye(2))

    def test_unnormalized_flag(self):
        op = DensityOperator(np.eye(2), normalized=False)
        assert op.trace().real == pytest.approx(2.0)

    def test_psd_spectrum_of_reductions(self, rng):
        rho = partial_trace(random_state(4, rng), [0, 3])
        assert rho.min_eigenvalue() >= -1e-8


class TestHadamardTransform:
    def test_matches_dense_matrix_on_vectors(self, rng):
        for bits in (1, 3, 5):
            v = rng.standard_normal(1 << bits) + 1j * rng.standard_normal(1 << bits)
            got = corelin.hadamard_transform(v)
            want = corelin.hadamard_matrix(bits) @ v
            assert_vectors_close(got, want, 1e-12)

    def test_conjugation_matches_dense(self, rng):
        m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        h = corelin.hadamard_matrix(3)
        assert_matrices_close(corelin.hadamard_conjugate(m), h @ m @ h, 1e-12)

    def test_materialized_layers_are_unitary(self):
        for layer in (
            hadamard_all_layer((0, 1)),
            corelin.qft_layer((0, 1, 2)),
            phase_diagonal_layer((0,), 2, [0, 1]),
            permutation_layer((0, 1), [3, 1, 0, 2]),
        ):
            mat = corelin.materialize(layer)
            dim = 1 << layer.width
            assert_matrices_close(mat.conj().T @ mat, np.eye(dim), 1e-10)
