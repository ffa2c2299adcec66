import numpy as np
import pytest
from scipy.optimize import linprog

import oracles
from imbkit import (
    SMOTE,
    Dataset,
    NearMiss,
    OneSidedSelection,
    RandomOverSampler,
    RandomUnderSampler,
    SamplerConfig,
    TomekLinks,
    find_tomek_links,
    k_nearest,
    resample,
)
from imbkit.exceptions import DegenerateOutput, InsufficientCandidates, TooFewMinority


def two_clusters(rng, n_maj=100, n_min=50, d=4, sep=3.0):
    X = np.vstack(
        [rng.normal(size=(n_maj, d)), rng.normal(size=(n_min, d)) + sep]
    )
    y = np.array([0] * n_maj + [1] * n_min)
    return X, y


def in_convex_hull(point, vertices, tol=1e-9):
    """LP feasibility: point = sum(w * v), w >= 0, sum(w) = 1."""
    k = len(vertices)
    a_eq = np.vstack([vertices.T, np.ones(k)])
    b_eq = np.concatenate([point, [1.0]])
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k,
                  method="highs")
    return res.status == 0 and res.success


class TestROS:
    def test_iris0_counts(self, rng):
        X, y = two_clusters(rng)
        Xr, yr = RandomOverSampler(seed=5).fit_resample(X, y)
        assert len(yr) == 200
        assert (yr == 1).sum() == 100
        # every appended row is a copy of an existing minority row
        np.testing.assert_array_equal(Xr[:150], X)
        for row in Xr[150:]:
            assert any((row == X[y == 1]).all(axis=1))

    def test_balanced_identity(self, rng):
        X, y = two_clusters(rng, n_maj=10, n_min=10)
        sampler = RandomOverSampler(seed=0)
        Xr, yr = sampler.fit_resample(X, y)
        np.testing.assert_array_equal(Xr, X)
        assert len(sampler.duplicated_indices_) == 0

    def test_two_one(self):
        X = np.array([[0.0], [1.0], [5.0]])
        y = np.array([0, 0, 1])
        sampler = RandomOverSampler(seed=3)
        Xr, yr = sampler.fit_resample(X, y)
        assert (yr == 1).sum() == 2 and (yr == 0).sum() == 2
        assert sampler.duplicated_indices_.tolist() == [2]

    def test_matches_oracle(self, rng):
        X, y = two_clusters(rng, n_maj=23, n_min=9)
        sampler = RandomOverSampler(target_ratio=1.0, seed=42)
        sampler.fit_resample(X, y)
        assert sampler.duplicated_indices_.tolist() == oracles.ros_duplicates(y, 1.0, 42)


class TestRUS:
    def test_iris0_counts(self, rng):
        X, y = two_clusters(rng)
        sampler = RandomUnderSampler(seed=7)
        Xr, yr = sampler.fit_resample(X, y)
        assert (yr == 0).sum() == 50 and (yr == 1).sum() == 50
        assert len(sampler.removed_indices_) == 50
        assert (y[sampler.removed_indices_] == 0).all()

    def test_balanced_no_removals(self, rng):
        X, y = two_clusters(rng, n_maj=8, n_min=8)
        sampler = RandomUnderSampler(seed=0)
        Xr, _ = sampler.fit_resample(X, y)
        np.testing.assert_array_equal(Xr, X)

    def test_same_seed_same_removals(self, rng):
        X, y = two_clusters(rng, n_maj=40, n_min=10)
        a = RandomUnderSampler(seed=9)
        b = RandomUnderSampler(seed=9)
        a.fit_resample(X, y)
        b.fit_resample(X, y)
        np.testing.assert_array_equal(a.removed_indices_, b.removed_indices_)

    def test_survivors_keep_input_order(self, rng):
        X, y = two_clusters(rng, n_maj=20, n_min=5)
        sampler = RandomUnderSampler(seed=1)
        Xr, yr = sampler.fit_resample(X, y)
        kept = sampler.kept_indices_
        assert (np.diff(kept) > 0).all()
        np.testing.assert_array_equal(Xr, X[kept])

    def test_degenerate_target(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([0, 0, 1])
        with pytest.raises(DegenerateOutput):
            RandomUnderSampler(target_ratio=5.0, seed=0).fit_resample(X, y)

    def test_matches_oracle(self, rng):
        X, y = two_clusters(rng, n_maj=31, n_min=7)
        sampler = RandomUnderSampler(seed=13)
        sampler.fit_resample(X, y)
        assert sampler.removed_indices_.tolist() == oracles.rus_removed(y, 1.0, 13)


class TestSMOTE:
    def test_single_neighbor_segment(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [9.0, 0.0], [9.0, 1.0], [9.0, 2.0]])
        y = np.array([1, 1, 0, 0, 0])
        sampler = SMOTE(k=1, seed=2)
        Xr, yr = sampler.fit_resample(X, y)
        assert (yr == 1).sum() == 3
        synth = Xr[5]
        assert synth[0] == pytest.approx(synth[1])
        assert 0.0 <= synth[0] <= 1.0

    def test_iris0_scale_counts_and_hull(self, rng):
        X, y = two_clusters(rng, n_maj=100, n_min=50, d=3)
        sampler = SMOTE(seed=11)
        Xr, yr = sampler.fit_resample(X, y)
        assert len(yr) == 200 and (yr == 1).sum() == 100
        np.testing.assert_array_equal(Xr[:150], X)
        minority_rows = X[y == 1]
        for row in Xr[150:]:
            assert in_convex_hull(row, minority_rows)

    def test_balanced_identity(self, rng):
        X, y = two_clusters(rng, n_maj=6, n_min=6)
        sampler = SMOTE(seed=0)
        Xr, _ = sampler.fit_resample(X, y)
        np.testing.assert_array_equal(Xr, X)
        assert sampler.lineage_ == ()

    def test_too_few_minority(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([0, 0, 1])
        with pytest.raises(TooFewMinority):
            SMOTE(seed=0).fit_resample(X, y)

    def test_k_clamped_for_tiny_minority(self, rng, caplog):
        X, y = two_clusters(rng, n_maj=12, n_min=3)
        with caplog.at_level("WARNING", logger="imbkit.resampling"):
            sampler = SMOTE(k=5, seed=4)
            sampler.fit_resample(X, y)
        assert any("clamped" in r.message for r in caplog.records)
        # all neighbors must come from the 2 other minority rows
        for base, neighbor, _ in sampler.lineage_:
            assert y[base] == 1 and y[neighbor] == 1 and neighbor != base

    def test_geometry_and_neighbor_membership(self, rng):
        X, y = two_clusters(rng, n_maj=60, n_min=20, d=5)
        sampler = SMOTE(k=5, seed=21)
        Xr, yr = sampler.fit_resample(X, y)
        minority = np.flatnonzero(y == 1).tolist()
        for row, (base, neighbor, lam) in zip(Xr[len(y):], sampler.lineage_):
            expected = X[base] + lam * (X[neighbor] - X[base])
            assert np.linalg.norm(row - expected) <= 1e-9
            assert 0.0 <= lam <= 1.0
            knn = k_nearest(X, base, 5, restrict_to=minority)
            assert neighbor in knn.indices

    def test_matches_oracle(self, rng):
        X, y = two_clusters(rng, n_maj=26, n_min=8, d=4)
        sampler = SMOTE(k=3, seed=31)
        Xr, _ = sampler.fit_resample(X, y)
        lineage, rows = oracles.smote_lineage(X, y, 3, 1.0, 31)
        assert list(sampler.lineage_) == lineage
        np.testing.assert_array_equal(Xr[len(y):], np.array(rows))


class TestTomekLinks:
    def test_three_point_line(self):
        X = np.array([[0.0], [0.1], [5.0]])
        y = np.array([1, 0, 0])
        assert find_tomek_links(X, y) == [(0, 1)]
        sampler = TomekLinks()
        Xr, yr = sampler.fit_resample(X, y)
        assert sampler.removed_indices_.tolist() == [1]
        assert (yr == 0).sum() == 1 and (yr == 1).sum() == 1

    def test_separated_clusters_no_links(self, rng):
        X, y = two_clusters(rng, n_maj=20, n_min=10, sep=50.0)
        assert find_tomek_links(X, y) == []
        Xr, _ = TomekLinks().fit_resample(X, y)
        np.testing.assert_array_equal(Xr, X)

    def test_random_matches_oracle(self, rng):
        for trial in range(5):
            X, y = oracles.random_imbalanced(trial, max_n=100)
            assert find_tomek_links(X, y) == oracles.tomek_links(X, y)

    def test_never_removes_minority(self, rng):
        for trial in range(5):
            X, y = oracles.random_imbalanced(100 + trial)
            sampler = TomekLinks()
            sampler.fit_resample(X, y)
            assert not set(sampler.removed_indices_) & set(np.flatnonzero(y == 1))

    def test_removing_last_majority_row_rejected(self):
        # the 2-point dataset is one mutual cross-class pair
        X = np.array([[0.0], [0.1]])
        y = np.array([1, 0])
        with pytest.raises(DegenerateOutput):
            TomekLinks().fit_resample(X, y)


class TestOSS:
    def test_far_cluster_keeps_one_majority(self, rng):
        X, y = two_clusters(rng, n_maj=8, n_min=5, sep=100.0)
        sampler = OneSidedSelection(seed=6)
        Xr, yr = sampler.fit_resample(X, y)
        assert (yr == 1).sum() == 5
        assert (yr == 0).sum() == 1
        assert sampler.kept_indices_.tolist().count(sampler.seed_index_) == 1

    def test_single_majority_row_is_seed(self):
        X = np.array([[0.0], [10.0], [11.0]])
        y = np.array([0, 1, 1])
        sampler = OneSidedSelection(seed=0)
        Xr, yr = sampler.fit_resample(X, y)
        assert sampler.seed_index_ == 0
        np.testing.assert_array_equal(Xr, X)  # no TL: 0's nn is 10, 10's nn is 11

    def test_minority_always_survives(self, rng):
        for trial in range(5):
            X, y = oracles.random_imbalanced(200 + trial)
            sampler = OneSidedSelection(seed=trial)
            Xr, yr = sampler.fit_resample(X, y)
            assert (yr == 1).sum() == (y == 1).sum()

    def test_matches_oracle(self, rng):
        for trial in range(5):
            X, y = oracles.random_imbalanced(300 + trial, max_n=120)
            sampler = OneSidedSelection(seed=trial)
            sampler.fit_resample(X, y)
            assert sampler.removed_indices_.tolist() == oracles.oss_removed(X, y, trial)


class TestNearMiss:
    def test_variant1_hand_example(self):
        X = np.array([[1.0], [2.0], [10.0], [0.0], [0.5], [0.6]])
        y = np.array([0, 0, 0, 1, 1, 1])
        sampler = NearMiss(variant=1, m=3, target_ratio=3.0)  # T = round(3/3) = 1
        Xr, yr = sampler.fit_resample(X, y)
        kept_majority = [i for i in sampler.kept_indices_ if y[i] == 0]
        assert kept_majority == [0]

    def test_variant3_definition(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [0.2]])
        y = np.array([0, 0, 0, 0, 0, 1])
        sampler = NearMiss(variant=3, per_minority=2)
        Xr, yr = sampler.fit_resample(X, y)
        kept_majority = [i for i in sampler.kept_indices_ if y[i] == 0]
        assert kept_majority == [0, 1]

    def test_balanced_keeps_all(self, rng):
        X, y = two_clusters(rng, n_maj=6, n_min=6)
        for variant in (1, 2):
            sampler = NearMiss(variant=variant, m=3)
            Xr, _ = sampler.fit_resample(X, y)
            np.testing.assert_array_equal(Xr, X)

    def test_insufficient_minority(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 0, 0, 1])
        with pytest.raises(InsufficientCandidates):
            NearMiss(variant=1, m=3).fit_resample(X, y)

    def test_matches_oracle_all_variants(self, rng):
        for trial in range(5):
            X, y = oracles.random_imbalanced(400 + trial)
            for variant in (1, 2, 3):
                sampler = NearMiss(variant=variant, m=3, per_minority=3)
                sampler.fit_resample(X, y)
                expected = oracles.nearmiss_removed(X, y, variant, 3, 3, 1.0)
                assert sampler.removed_indices_.tolist() == expected


class TestCrossSamplerInvariants:
    BALANCERS = ("ros", "rus", "smote", "nearmiss1", "nearmiss2")

    def test_balance_exact(self, rng):
        for trial in range(5):
            X, y = oracles.random_imbalanced(500 + trial)
            ds = Dataset("t", X, y, tuple(f"a{i}" for i in range(X.shape[1])))
            for kind in self.BALANCERS:
                out = resample(ds, kind, SamplerConfig(seed=trial)).dataset
                assert out.minority_count == out.majority_count, kind

    def test_subset_superset_property(self, rng):
        for trial in range(3):
            X, y = oracles.random_imbalanced(600 + trial)
            ds = Dataset("t", X, y, tuple(f"a{i}" for i in range(X.shape[1])))
            rows = {tuple(r) for r in X}
            for kind in ("rus", "tl", "oss", "nearmiss1", "nearmiss2", "nearmiss3"):
                out = resample(ds, kind, SamplerConfig(seed=trial)).dataset
                assert {tuple(r) for r in out.features} <= rows, kind
            for kind in ("ros", "smote"):
                out = resample(ds, kind, SamplerConfig(seed=trial)).dataset
                assert rows <= {tuple(r) for r in out.features}, kind

    def test_determinism(self, rng):
        X, y = oracles.random_imbalanced(700)
        ds = Dataset("t", X, y, tuple(f"a{i}" for i in range(X.shape[1])))
        for kind in ("ros", "rus", "smote", "tl", "oss", "nearmiss1", "nearmiss2", "nearmiss3"):
            a = resample(ds, kind, SamplerConfig(seed=3))
            b = resample(ds, kind, SamplerConfig(seed=3))
            np.testing.assert_array_equal(a.dataset.features, b.dataset.features)
            assert a.removed_indices == b.removed_indices
            assert a.synthetic_lineage == b.synthetic_lineage
            assert a.duplicated_indices == b.duplicated_indices

    def test_surviving_rows_byte_identical(self, rng):
        X, y = oracles.random_imbalanced(800)
        ds = Dataset("t", X, y, tuple(f"a{i}" for i in range(X.shape[1])))
        for kind in ("rus", "tl", "oss", "nearmiss1", "nearmiss2", "nearmiss3"):
            result = resample(ds, kind, SamplerConfig(seed=1))
            kept = sorted(set(range(ds.n)) - set(result.removed_indices))
            np.testing.assert_array_equal(result.dataset.features, ds.features[kept])

    def test_provenance_matches_kind(self, rng):
        X, y = oracles.random_imbalanced(900)
        ds = Dataset("t", X, y, tuple(f"a{i}" for i in range(X.shape[1])))
        result = resample(ds, "smote", SamplerConfig(seed=0))
        assert result.synthetic_lineage and not result.removed_indices
        result = resample(ds, "rus", SamplerConfig(seed=0))
        assert result.removed_indices and not result.duplicated_indices
