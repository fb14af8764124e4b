"""Certifier tests: edge maps, separation constraints, lifts, and bounds.

Core claims:
    - edge_difference_map reproduces hand values and rejects expanding maps
    - average_edge_vector collapses to the closed form (checked against
      brute-force enumeration in the oracle tests)
    - constraint_lhs is exactly 1 for the identity embedding and, for any
      embedding, equals the embedded/original ratio of one antipodal pair
      (an independent route through completely different quantities)
    - the lift is a valid distribution, recovers exactly, never grows norms
    - dimension bounds reproduce independently computed values
    - certificates are consistent for every valid embedding
    - the separation-to-information bound holds on random distribution
      tuples via the argmax predictor
"""

import math

import numpy as np
import pytest

from l1cert.certifier import (
    average_edge_vector,
    bound_for_distortion,
    certify,
    choose_k,
    constraint_lhs,
    constraint_report,
    dimension_bound,
    edge_difference_map,
    lift_recover,
    nonneg_lift,
    predictor_success,
)
from l1cert.infotheory import (
    JointDistribution,
    ProbVector,
    binary_entropy,
    mutual_information,
)
from l1cert.l1metric import (
    DegenerateEmbeddingError,
    distortion,
    identity_embedding,
    make_embedding,
    normalize_lipschitz,
    scale_embedding,
)
from l1cert.pointset import antipodal_pairs


class TestEdgeDifferenceMap:
    def test_depth_one_identity_values(self, pointsets):
        ps = pointsets(2, 1)
        evm = edge_difference_map(ps.graph, identity_embedding(ps))
        assert evm.table[(1,)].tolist() == [0.0, 1.0]
        assert evm.table[(2,)].tolist() == [1.0, 0.0]
        assert evm.table[(3,)].tolist() == [0.0, 1.0]
        assert evm.table[(4,)].tolist() == [1.0, 0.0]

    def test_constant_embedding_gives_zero_map(self, pointsets):
        ps = pointsets(2, 2)
        emb = make_embedding({a: [3.0, -1.0] for a in ps.addresses})
        evm = edge_difference_map(ps.graph, emb)
        assert all(np.all(v == 0.0) for v in evm.table.values())

    def test_norms_bounded_after_normalization(self, pointsets):
        ps = pointsets(2, 2)
        rng = np.random.default_rng(71)
        emb = normalize_lipschitz(
            ps, make_embedding({a: rng.standard_normal(3) for a in ps.addresses})
        )
        evm = edge_difference_map(ps.graph, emb)
        assert all(np.abs(v).sum() <= 1.0 + 1e-9 for v in evm.table.values())

    def test_rejects_expanding_embedding(self, pointsets):
        ps = pointsets(2, 1)
        with pytest.raises(ValueError, match="normalize"):
            edge_difference_map(ps.graph, scale_embedding(identity_embedding(ps), 2.0))


class TestAverageEdgeVector:
    def test_depth_two_prefix(self, pointsets):
        ps = pointsets(2, 2)
        avg = average_edge_vector(ps.graph, identity_embedding(ps), (1,))
        assert avg.tolist() == [0.0, 0.0, 0.5, 0.5]

    def test_full_length_prefix_is_the_edge_difference(self, pointsets):
        ps = pointsets(2, 2)
        emb = identity_embedding(ps)
        evm = edge_difference_map(ps.graph, emb)
        for coords, vec in evm.table.items():
            assert np.array_equal(average_edge_vector(ps.graph, emb, coords), vec)

    def test_empty_prefix(self, pointsets):
        ps = pointsets(2, 2)
        avg = average_edge_vector(ps.graph, identity_embedding(ps), ())
        assert np.allclose(avg, 0.25, atol=0)


class TestConstraintLhs:
    @pytest.mark.parametrize("k,n", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 2), (4, 3)])
    def test_identity_gives_exactly_one(self, pointsets, k, n):
        ps = pointsets(k, n)
        emb = identity_embedding(ps)
        report = constraint_report(ps.graph, emb)
        for entry in report.entries:
            assert abs(entry.lhs - 1.0) <= 1e-12

    def test_constant_embedding_gives_zero(self, pointsets):
        ps = pointsets(2, 2)
        emb = make_embedding({a: [1.0, 1.0] for a in ps.addresses})
        assert constraint_lhs(ps.graph, emb, (), 1) == 0.0

    def test_scaled_identity_scales_linearly(self, pointsets):
        ps = pointsets(3, 2)
        emb = scale_embedding(identity_embedding(ps), 0.9)
        for r in (1, 2):
            assert constraint_lhs(ps.graph, emb, (), r) == pytest.approx(0.9, abs=1e-12)

    @pytest.mark.parametrize("k,n", [(2, 2), (3, 2)])
    def test_equals_antipodal_pair_ratio(self, pointsets, k, n):
        # Independent route: the constraint at (level, prefix, r) telescopes
        # to the embedded/original distance ratio of the antipodal pair at
        # cycle positions (r, r+k) of the cycle refining `prefix`.
        ps = pointsets(k, n)
        rng = np.random.default_rng(73)
        emb = make_embedding({a: rng.standard_normal(5) for a in ps.addresses})
        report = constraint_report(ps.graph, emb)
        by_level = {}
        for level in range(1, n + 1):
            pairs = antipodal_pairs(ps.graph, level)
            it = iter(pairs)
            by_level[level] = {
                idx: [next(it) for _ in range(k)]
                for idx in range((2 * k) ** (level - 1))
            }
        for entry in report.entries:
            idx = 0
            for c in entry.prefix:
                idx = idx * 2 * k + (c - 1)
            a, b = by_level[entry.level][idx][entry.r]
            embedded = float(np.abs(emb.vectors[a] - emb.vectors[b]).sum())
            original = float(k ** (n - entry.level + 1))
            assert entry.lhs == pytest.approx(embedded / original, abs=1e-9)

    def test_rejects_bad_level_and_split(self, pointsets):
        ps = pointsets(2, 2)
        emb = identity_embedding(ps)
        with pytest.raises(ValueError):
            constraint_lhs(ps.graph, emb, (1, 1), 1)
        with pytest.raises(ValueError):
            constraint_lhs(ps.graph, emb, (), 2)
        with pytest.raises(ValueError):
            constraint_lhs(ps.graph, emb, (), 0)


class TestConstraintReport:
    def test_entry_count_and_epsilon_identity(self, pointsets):
        ps = pointsets(3, 2)
        report = constraint_report(ps.graph, identity_embedding(ps))
        assert len(report.entries) == 14  # 1*2 at level 1 plus 6*2 at level 2
        assert report.epsilon <= 1e-12

    def test_constant_embedding_epsilon_one(self, pointsets):
        ps = pointsets(2, 2)
        emb = make_embedding({a: [0.0] for a in ps.addresses})
        report = constraint_report(ps.graph, emb)
        assert report.epsilon == 1.0

    def test_scaled_identity_epsilon(self, pointsets):
        ps = pointsets(2, 2)
        emb = scale_embedding(identity_embedding(ps), 0.9)
        report = constraint_report(ps.graph, emb)
        assert report.epsilon == pytest.approx(0.1, abs=1e-9)

    def test_contraction_bound_implies_epsilon_bound(self, pointsets):
        # A 1-Lipschitz embedding whose pairwise contraction is at most
        # 1 - eps0 must measure a constraint slack epsilon <= eps0.
        ps = pointsets(2, 2)
        rng = np.random.default_rng(79)
        for _ in range(20):
            emb = normalize_lipschitz(
                ps, make_embedding({a: rng.standard_normal(4) for a in ps.addresses})
            )
            rep = distortion(ps, emb)
            eps0 = 1.0 - 1.0 / rep.contraction
            assert constraint_report(ps.graph, emb).epsilon <= eps0 + 1e-9


class TestLift:
    def test_example(self):
        lifted = nonneg_lift([0.5, -0.25])
        assert lifted.weights.tolist() == [0.5, 0.0, 0.0, 0.25, 0.25]

    def test_zero_vector(self):
        lifted = nonneg_lift(np.zeros(3))
        assert lifted.weights.tolist() == [0.0] * 6 + [1.0]

    def test_unit_norm_vector_has_zero_leftover(self):
        lifted = nonneg_lift([0.25, -0.75])
        assert lifted.weights[-1] == pytest.approx(0.0, abs=1e-9)

    def test_rejects_large_norm(self):
        with pytest.raises(ValueError):
            nonneg_lift([0.8, 0.4])

    def test_recover_examples(self):
        assert lift_recover(np.array([1.0, 0, 0, 0, 0])).tolist() == [1.0, 0.0]
        assert lift_recover(nonneg_lift([0.5, -0.25]).weights).tolist() == [0.5, -0.25]

    def test_recover_rejects_even_length(self):
        with pytest.raises(ValueError):
            lift_recover(np.zeros(4))

    def test_roundtrip_and_norm_properties(self):
        rng = np.random.default_rng(83)
        for _ in range(2000):
            d = int(rng.integers(1, 7))
            vec = rng.uniform(-1, 1, size=d)
            norm = np.abs(vec).sum()
            if norm > 1:
                vec /= norm * 1.25
            lifted = nonneg_lift(vec)
            assert isinstance(lifted, ProbVector)
            assert np.array_equal(lift_recover(lifted.weights), vec)
            y = rng.uniform(0, 2, size=2 * d + 1)
            assert np.abs(lift_recover(y)).sum() <= np.abs(y).sum() + 1e-12


class TestDimensionBound:
    def test_zero_slack_depth_ten(self):
        result = dimension_bound(2, 10, 0.0)
        assert result.raw_bound == pytest.approx(511.5, abs=1e-6)
        assert result.min_dimension == 512
        assert result.applicable

    def test_distortion_two_depth_twenty(self):
        result = bound_for_distortion(2, 20, 2.0)
        assert result.delta == pytest.approx(0.25, abs=1e-12)
        assert result.raw_bound == pytest.approx(6.34209203720093, abs=1e-6)
        assert result.min_dimension == 7

    def test_k_three_fractional_slack(self):
        result = dimension_bound(3, 4, 0.2)
        assert result.delta == pytest.approx(0.2, abs=1e-12)
        assert result.raw_bound == pytest.approx(2.6429898723159613, abs=1e-6)
        assert result.min_dimension == 3

    def test_vacuous_regimes(self):
        assert not dimension_bound(2, 4, 1.0).applicable
        assert dimension_bound(2, 4, 1.0).min_dimension == 1
        assert not bound_for_distortion(3, 9, 2.0).applicable

    def test_distortion_one_gives_half_power(self):
        for n in (1, 4, 9):
            result = bound_for_distortion(2, n, 1.0)
            assert result.raw_bound == pytest.approx(2.0 ** (n - 1) - 0.5, abs=1e-9)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            dimension_bound(1, 3, 0.0)
        with pytest.raises(ValueError):
            dimension_bound(2, 0, 0.0)
        with pytest.raises(ValueError):
            dimension_bound(2, 3, -0.1)
        with pytest.raises(ValueError):
            bound_for_distortion(2, 3, 0.5)


class TestChooseK:
    def test_values(self):
        assert choose_k(0.1) == 3
        assert choose_k(0.25) == 2

    def test_boundaries_rejected(self):
        for eps in (0.0, 0.5, -0.1, 0.7):
            with pytest.raises(ValueError):
                choose_k(eps)


class TestPredictorSuccess:
    def test_disjoint_supports(self):
        predictor, success = predictor_success([ProbVector([1, 0]), ProbVector([0, 1])])
        assert predictor.tolist() == [0, 1]
        assert success == 1.0

    def test_identical_distributions(self):
        _, success = predictor_success([ProbVector([0.5, 0.5])] * 2)
        assert success == 0.5

    def test_mixed(self):
        _, success = predictor_success([ProbVector([0.8, 0.2]), ProbVector([0.3, 0.7])])
        assert success == pytest.approx(0.75, abs=1e-12)

    def test_ties_to_smallest_index(self):
        predictor, _ = predictor_success([ProbVector([0.5, 0.5]), ProbVector([0.5, 0.5])])
        assert predictor.tolist() == [0, 0]

    def test_rejects_alphabet_mismatch(self):
        with pytest.raises(ValueError):
            predictor_success([ProbVector([1.0]), ProbVector([0.5, 0.5])])


class TestCertify:
    def test_identity_depth_three(self, pointsets):
        ps = pointsets(2, 3)
        cert = certify(ps, identity_embedding(ps))
        assert cert.epsilon <= 1e-12
        assert cert.bound.min_dimension == 4
        assert cert.embedding_dimension == 8
        assert cert.consistent

    def test_identity_k_three(self, pointsets):
        ps = pointsets(3, 2)
        cert = certify(ps, identity_embedding(ps))
        assert cert.bound.min_dimension == 4
        assert cert.consistent

    def test_unnormalized_input_is_normalized_internally(self, pointsets):
        ps = pointsets(2, 2)
        cert = certify(ps, scale_embedding(identity_embedding(ps), 7.5))
        assert cert.epsilon <= 1e-9
        assert cert.consistent

    def test_degenerate_embedding_rejected(self, pointsets):
        ps = pointsets(2, 1)
        emb = make_embedding({a: [1.0, 0.0] for a in ps.addresses})
        with pytest.raises(DegenerateEmbeddingError):
            certify(ps, emb)

    def test_random_embeddings_always_consistent(self, pointsets):
        ps = pointsets(2, 2)
        rng = np.random.default_rng(89)
        for _ in range(25):
            d = int(rng.integers(1, 6))
            emb = make_embedding({a: rng.standard_normal(d) for a in ps.addresses})
            assert certify(ps, emb).consistent


class TestSeparationInformationBound:
    def test_random_tuples(self):
        # k conditional distributions with measured worst prefix-split
        # separation 1 - eps; when delta = (k-1)*eps/2 < 1/2 the exact
        # mutual information must clear log2(k) - delta*log2(k-1) - H(delta).
        rng = np.random.default_rng(97)
        applicable = 0
        for trial in range(300):
            k = 2 + trial % 4
            d = int(rng.integers(k, 9))
            rows = rng.exponential(size=(k, d))
            rows /= rows.sum(axis=1, keepdims=True)
            if rng.uniform() < 0.7:
                targets = rng.permutation(d)[:k]
                sharp = np.zeros((k, d))
                for a in range(k):
                    sharp[a, targets[a]] = 1.0
                lam = rng.uniform(0.0, 0.5)
                rows = (1 - lam) * sharp + lam * rows
            prefix = np.cumsum(rows, axis=0)[:-1]
            separation = float(
                np.abs(2 * prefix - rows.sum(axis=0)).sum(axis=1).min() / k
            )
            delta = (k - 1) * (1.0 - separation) / 2.0
            if delta >= 0.5:
                continue
            applicable += 1
            joint = JointDistribution((k, d), rows / k)
            log_km1 = 0.0 if k == 2 else math.log2(k - 1)
            bound = math.log2(k) - delta * log_km1 - binary_entropy(delta)
            assert mutual_information(joint, 0, 1) >= bound - 1e-9
        assert applicable >= 60
