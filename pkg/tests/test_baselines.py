import numpy as np
import pytest

from gift.baselines import (
    mmr_greedy_select,
    run_policy,
    top_relevance_select,
    undirected_diversity_select,
    uniform_select,
)
from gift.core import l2_normalize
from gift.errors import InvalidInputError
from gift.selector import SelectorConfig, query_cosines
from oracles import exhaustive_mmr_optimum, mmr_objective


class TestUniformSelect:
    def test_midpoint_examples(self):
        assert uniform_select(8, 4) == [1, 3, 5, 7]
        assert uniform_select(5, 5) == [0, 1, 2, 3, 4]
        assert uniform_select(128, 1) == [64]

    def test_budget_exceeds_frames(self):
        with pytest.raises(InvalidInputError):
            uniform_select(4, 9)

    def test_strictly_increasing_with_balanced_gaps(self):
        rng = np.random.default_rng(83)
        for _ in range(200):
            n = int(rng.integers(1, 500))
            k = int(rng.integers(1, n + 1))
            picks = uniform_select(n, k)
            assert len(picks) == k
            assert all(0 <= p < n for p in picks)
            assert all(b > a for a, b in zip(picks, picks[1:]))
            gaps = [b - a for a, b in zip(picks, picks[1:])]
            if gaps:
                assert max(gaps) - min(gaps) <= 1


class TestTopRelevanceSelect:
    def test_basic_sort(self):
        assert top_relevance_select([0.1, 0.9, 0.5], 2) == [1, 2]

    def test_tie_break_by_index(self):
        assert top_relevance_select([0.5, 0.5, 0.5], 2) == [0, 1]

    def test_full_budget(self):
        assert top_relevance_select([0.3, 0.1, 0.2], 3) == [0, 1, 2]

    def test_budget_too_big(self):
        with pytest.raises(InvalidInputError):
            top_relevance_select([0.3], 2)


class TestUndirectedDiversity:
    def test_mean_distance_example(self):
        frames = np.array([[0, 0], [1, 0], [3, 0]], dtype=np.float32)
        cfg = SelectorConfig(budget_k=3, batch_b=3, normalize_embeddings=False)
        res = undirected_diversity_select(frames, None, cfg,
                                          relevance_override=[1.0, 1.0, 1.0])
        assert np.array_equal(res.trace[0].table.diversity, [5.0, 2.5, 6.5])

    def test_distant_frame_dominates_duplicates(self):
        frames = np.array([[1, 0], [1, 0], [9, 9]], dtype=np.float32)
        cfg = SelectorConfig(budget_k=1, batch_b=1, normalize_embeddings=False)
        res = undirected_diversity_select(frames, None, cfg,
                                          relevance_override=[0.5, 0.5, 0.5])
        d = res.trace[0].table.diversity
        assert d[2] > d[0] and d[2] > d[1]

    def test_single_candidate_mean_is_zero(self):
        frames = np.array([[2.0, 1.0]], dtype=np.float32)
        cfg = SelectorConfig(budget_k=1, batch_b=1, normalize_embeddings=False)
        res = undirected_diversity_select(frames, None, cfg, relevance_override=[1.0])
        assert np.array_equal(res.trace[0].table.diversity, [0.0])

    def test_one_shot_matches_its_static_scores(self):
        rng = np.random.default_rng(89)
        for _ in range(40):
            n = int(rng.integers(2, 24))
            frames = rng.normal(size=(n, 5)).astype(np.float32)
            query = rng.normal(size=5).astype(np.float32)
            k = int(rng.integers(1, n + 1))
            res = undirected_diversity_select(
                frames, query, SelectorConfig(budget_k=k, batch_b=n + 1)
            )
            assert len(res.trace) == 1
            table = res.trace[0].table
            order = np.lexsort((table.indices, -table.score))
            assert res.selected == sorted(int(table.indices[i]) for i in order[:k])

    def test_budget_exceeds_pool(self):
        with pytest.raises(InvalidInputError):
            undirected_diversity_select(
                np.eye(3, dtype=np.float32), [1.0, 0.0, 0.0],
                SelectorConfig(budget_k=5),
            )


class TestMmrGreedy:
    def test_lambda_zero_equals_top_relevance(self):
        rng = np.random.default_rng(97)
        for _ in range(40):
            n = int(rng.integers(2, 30))
            frames = rng.normal(size=(n, 6)).astype(np.float32)
            query = rng.normal(size=6).astype(np.float32)
            k = int(rng.integers(1, n + 1))
            got = mmr_greedy_select(frames, query, k, lam=0.0)
            expected = top_relevance_select(query_cosines(frames, query), k)
            assert got == expected

    def test_k_one_is_argmax_relevance(self):
        frames = np.array([[0, 1], [1, 0], [1, 1]], dtype=np.float32)
        assert mmr_greedy_select(frames, [1.0, 0.0], 1, lam=5.0) == [1]

    def test_duplicate_skipped_for_distinct_relevant_frame(self):
        # frames 0 and 1 are exact duplicates of the best frame; with a
        # large redundancy weight the greedy must pick the two distinct
        # positive-relevance frames instead of the second copy
        frames = np.array(
            [[1.0, 0.0, 0.0],
             [1.0, 0.0, 0.0],
             [0.6, 0.8, 0.0],
             [0.4, 0.0, 0.9165151]],
            dtype=np.float32,
        )
        query = np.array([1.0, 0.0, 0.0], dtype=np.float32)
        picks = mmr_greedy_select(frames, query, 3, lam=2.0)
        assert picks == [0, 2, 3]

        rel = query_cosines(frames, query)
        sims = np.clip(
            l2_normalize(frames).astype(np.float64) @ l2_normalize(frames).astype(np.float64).T,
            -1.0, 1.0,
        )
        best = exhaustive_mmr_optimum(rel, sims, 3, 2.0)
        assert mmr_objective(picks, rel, sims, 2.0) == pytest.approx(best, abs=1e-9)

    def test_greedy_never_beats_exhaustive_optimum(self):
        rng = np.random.default_rng(101)
        for _ in range(25):
            n = int(rng.integers(2, 10))
            frames = rng.normal(size=(n, 4)).astype(np.float32)
            query = rng.normal(size=4).astype(np.float32)
            k = int(rng.integers(1, n + 1))
            lam = float(rng.uniform(0.0, 2.0))
            rel = query_cosines(frames, query)
            fn = l2_normalize(frames).astype(np.float64)
            sims = np.clip(fn @ fn.T, -1.0, 1.0)
            picks = mmr_greedy_select(frames, query, k, lam)
            best = exhaustive_mmr_optimum(rel, sims, k, lam)
            assert mmr_objective(picks, rel, sims, lam) <= best + 1e-12
            if lam == 0.0:
                assert mmr_objective(picks, rel, sims, lam) == pytest.approx(best)

    def test_lambda_zero_equality_with_optimum(self):
        rng = np.random.default_rng(103)
        frames = rng.normal(size=(8, 4)).astype(np.float32)
        query = rng.normal(size=4).astype(np.float32)
        rel = query_cosines(frames, query)
        fn = l2_normalize(frames).astype(np.float64)
        sims = np.clip(fn @ fn.T, -1.0, 1.0)
        picks = mmr_greedy_select(frames, query, 4, lam=0.0)
        assert mmr_objective(picks, rel, sims, 0.0) == exhaustive_mmr_optimum(rel, sims, 4, 0.0)

    def test_rejects_bad_lambda(self):
        with pytest.raises(InvalidInputError):
            mmr_greedy_select(np.eye(2, dtype=np.float32), [1.0, 0.0], 1, lam=-0.5)


class TestRunPolicy:
    def test_unknown_policy(self):
        with pytest.raises(InvalidInputError):
            run_policy("magic", np.eye(2, dtype=np.float32), [1.0, 0.0],
                       SelectorConfig(budget_k=1))

    def test_uniform_ignores_query(self):
        picks, res = run_policy("uniform", np.eye(4, dtype=np.float32), None,
                                SelectorConfig(budget_k=2))
        assert picks == uniform_select(4, 2)
        assert res is None
