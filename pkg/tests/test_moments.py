import json
from functools import reduce

import numpy as np
import pytest

from prslab import corelin, moments
from prslab.budget import BudgetError
from prslab.corelin import DensityOperator
from prslab.moments import (
    ExhaustiveAllFunctions,
    Method,
    MomentSpec,
    PrfKeys,
    Source,
    UniformSample,
    compare_to_haar,
    ensemble_moment_bruteforce,
    ensemble_moment_deltapair,
    haar_moment,
    haar_moment_monte_carlo,
)
from prslab.prsgen import PrsKind

from conftest import assert_matrices_close


def plain(n, t, space=None):
    return MomentSpec(Source.PLAIN, n=n, t=t,
                      function_space=space or ExhaustiveAllFunctions())


def c1(n, i, t, space=None):
    return MomentSpec(Source.CONSTRUCTION1, n=n, t=t, i=i,
                      function_space=space or ExhaustiveAllFunctions())


class TestBruteForce:
    def test_plain_first_moment_is_maximally_mixed(self):
        got = ensemble_moment_bruteforce(plain(2, 1))
        assert_matrices_close(got.matrix, np.eye(4) / 4, 1e-12)

    def test_single_member_is_rank_one(self):
        got = ensemble_moment_bruteforce(plain(2, 2, UniformSample(1, seed=3)))
        eigs = np.linalg.eigvalsh(got.matrix)
        assert eigs[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(eigs[:-1]) <= 1e-12)

    def test_construction2_and_3_members_average(self):
        # sampled spaces exercise the multi-key sources end to end
        spec2 = MomentSpec(Source.CONSTRUCTION2, n=2, t=1,
                           function_space=PrfKeys(4, seed=5))
        spec3 = MomentSpec(Source.CONSTRUCTION3, n=2, t=1, ell=3,
                           function_space=UniformSample(4, seed=5))
        for spec in (spec2, spec3):
            got = ensemble_moment_bruteforce(spec)
            assert got.dim == 16
            assert got.trace().real == pytest.approx(1.0, abs=1e-12)

    def test_shared_key_variant_reuses_one_function(self):
        # one draw per member, fed to all three blocks
        spec = MomentSpec(Source.CONSTRUCTION2, n=2, t=1,
                          function_space=UniformSample(3, seed=8), shared_key=True)
        fns = list(moments.member_functions(spec))
        assert all(len(f) == 1 for f in fns)
        from prslab import expand

        for (f,) in fns:
            direct = expand.evaluate(expand.construction2(f, f, f, 2))
            via_member = moments.member_state(spec, (f,))
            assert np.max(np.abs(direct.amplitudes - via_member.amplitudes)) == 0.0

    def test_shared_key_rejected_for_single_function_sources(self):
        with pytest.raises(ValueError, match="one function per member"):
            MomentSpec(Source.PLAIN, n=2, t=1, shared_key=True)

    def test_general_kind_first_moment_exact(self):
        # summing a full cycle of roots of unity kills every off-diagonal
        # term, so the exhaustive general-kind average is maximally mixed too
        spec = MomentSpec(Source.PLAIN, n=2, t=1, kind=PrsKind.GENERAL_PHASE)
        got = ensemble_moment_bruteforce(spec)
        assert_matrices_close(got.matrix, np.eye(4) / 4, 1e-14)

    def test_general_kind_expansion_distance_recorded(self):
        spec = MomentSpec(Source.CONSTRUCTION1, n=2, t=1, i=1,
                          kind=PrsKind.GENERAL_PHASE,
                          function_space=UniformSample(32, seed=2))
        report = compare_to_haar(spec, Method.MONTE_CARLO)
        assert 0.0 <= report.haar_distance <= 1.0

    def test_budget_error_reports_size(self):
        with pytest.raises(BudgetError, match="MiB"):
            ensemble_moment_bruteforce(plain(6, 3))


class TestDeltaPairing:
    def test_plain_first_moment(self):
        got = ensemble_moment_deltapair(plain(2, 1))
        assert_matrices_close(got.matrix, np.eye(4) / 4, 0.0)

    @pytest.mark.parametrize("n,i,t", [(2, 1, 1), (2, 1, 2), (3, 1, 2), (3, 2, 1)])
    def test_matches_brute_force_on_the_expansion(self, n, i, t):
        spec = c1(n, i, t)
        assert_matrices_close(
            ensemble_moment_deltapair(spec).matrix,
            ensemble_moment_bruteforce(spec).matrix,
            1e-12,
        )

    @pytest.mark.parametrize("t", [1, 2])
    def test_matches_brute_force_plain_n4(self, t):
        spec = plain(4, t)
        assert_matrices_close(
            ensemble_moment_deltapair(spec).matrix,
            ensemble_moment_bruteforce(spec).matrix,
            1e-12,
        )

    def test_rejects_general_kind(self):
        spec = MomentSpec(Source.PLAIN, n=2, t=1, kind=PrsKind.GENERAL_PHASE)
        with pytest.raises(ValueError, match="sign-phase"):
            ensemble_moment_deltapair(spec)

    def test_rejects_sampled_space(self):
        with pytest.raises(ValueError, match="exhaustive"):
            ensemble_moment_deltapair(plain(2, 1, PrfKeys(8, seed=1)))

    def test_rejects_other_sources(self):
        spec = MomentSpec(Source.CONSTRUCTION2, n=2, t=1)
        with pytest.raises(ValueError, match="source"):
            ensemble_moment_deltapair(spec)


class TestHaarMoment:
    def test_single_copy_is_maximally_mixed(self):
        assert_matrices_close(haar_moment(2, 1).matrix, np.eye(2) / 2, 1e-15)

    @pytest.mark.parametrize("d,t", [(2, 1), (2, 2), (4, 2), (2, 3), (8, 2)])
    def test_unit_trace(self, d, t):
        assert haar_moment(d, t).trace().real == pytest.approx(1.0, abs=1e-12)

    def test_monte_carlo_agrees(self):
        exact = haar_moment(2, 2)
        sampled = haar_moment_monte_carlo(2, 2, samples=100_000, seed=17)
        assert corelin.trace_distance(exact, sampled) <= 1e-2

    def test_commutes_with_tensor_power_unitary(self, rng):
        u = corelin.random_unitary(2, rng)
        u2 = np.kron(u, u)
        h = haar_moment(2, 2).matrix
        assert_matrices_close(u2 @ h @ u2.conj().T, h, 1e-12)


class TestCompareToHaar:
    def test_plain_two_qubits_single_copy_distance_zero(self):
        report = compare_to_haar(plain(2, 1), Method.BRUTE_FORCE)
        assert report.haar_distance <= 1e-12

    def test_reproducible_given_seed(self):
        spec = plain(2, 2, PrfKeys(32, seed=9))
        a = compare_to_haar(spec, Method.MONTE_CARLO)
        b = compare_to_haar(spec, Method.MONTE_CARLO)
        assert a.to_json(canonical_runtime=True) == b.to_json(canonical_runtime=True)
        assert a.seed == 9

    def test_exhaustive_distance_reproducible(self):
        values = {compare_to_haar(plain(3, 2), Method.BRUTE_FORCE).haar_distance
                  for _ in range(2)}
        assert len(values) == 1

    def test_method_space_mismatches_rejected(self):
        with pytest.raises(ValueError):
            compare_to_haar(plain(2, 1, PrfKeys(4, seed=0)), Method.BRUTE_FORCE)
        with pytest.raises(ValueError):
            compare_to_haar(plain(2, 1), Method.MONTE_CARLO)
        with pytest.raises(ValueError):
            compare_to_haar(plain(2, 1, PrfKeys(4, seed=0)), Method.DELTA_PAIRING)

    def test_report_json_shape(self):
        report = compare_to_haar(c1(2, 1, 1), Method.DELTA_PAIRING)
        payload = json.loads(report.to_json(include_matrix=True))
        assert payload["source"] == "construction1"
        assert payload["dim"] == 8
        assert len(payload["moment_re"]) == 8


class TestUnitaryConjugationInvariance:
    def test_distance_invariant_under_member_conjugation(self, rng):
        # conjugating every member by a fixed U conjugates the moment by
        # U^(x)t; the symmetric projector commutes, so the distance is fixed
        spec = c1(2, 1, 2)
        moment = ensemble_moment_deltapair(spec).matrix
        u = corelin.random_unitary(8, rng)
        u_t = np.kron(u, u)
        conjugated = DensityOperator(u_t @ moment @ u_t.conj().T)
        haar = haar_moment(8, 2)
        d0 = corelin.trace_distance(DensityOperator(moment), haar)
        d1 = corelin.trace_distance(conjugated, haar)
        assert abs(d0 - d1) <= 1e-10

    def test_member_level_equals_moment_level(self, rng):
        # small-size identity check of the rewrite used above
        spec = plain(2, 2)
        u = corelin.random_unitary(4, rng)
        members = [moments.member_state(spec, fns) for fns in moments.member_functions(spec)]
        vs = np.array([
            reduce(np.kron, [u @ s.amplitudes] * 2) for s in members
        ])
        direct = vs.T @ vs.conj() / len(members)
        u_t = np.kron(u, u)
        rewritten = u_t @ ensemble_moment_bruteforce(spec).matrix @ u_t.conj().T
        assert_matrices_close(direct, rewritten, 1e-12)


class TestExpansionTrend:
    def test_distance_non_increasing_in_register_width(self):
        # slow: the widest point runs a 4096-dimensional eigendecomposition
        distances = [
            compare_to_haar(c1(n, 1, 2), Method.DELTA_PAIRING).haar_distance
            for n in (3, 4, 5)
        ]
        assert distances[1] <= distances[0] + 1e-10
        assert distances[2] <= distances[1] + 1e-10
