import json
import threading
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import ConfigurationError, ProviderTransportError, SimilarityUnavailableError
from core.types import Concept, SemanticGroup, SimulationConfig
from semantic.cache import SimilarityCache, cache_key
from semantic.matrix import InterferenceMatrix, ScoreSource, build_matrix, interference_pressure, similarity
from semantic.providers import OfflineSimilarityProvider
from simulation.population import generate_concepts


class TestSimilarityCache:
    def test_key_ignores_pair_order(self):
        assert cache_key("offline", "m", "b", "a") == cache_key("offline", "m", "a", "b") == "offline|m|a|b"

    def test_miss_then_hit(self, tmp_path):
        cache = SimilarityCache(tmp_path / "cache.jsonl")
        assert cache.get_or_compute("k", lambda: 0.25, "offline", "m") == (0.25, False)
        assert cache.get_or_compute("k", lambda: 0.99, "offline", "m") == (0.25, True)
        assert (cache.hits, cache.misses) == (1, 1)

    def test_records_are_json_lines(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        SimilarityCache(path).get_or_compute("k", lambda: 0.5, "llm", "gpt")
        record = json.loads(path.read_text().strip())
        assert record == {"key": "k", "value": 0.5, "provider_tag": "llm", "model": "gpt"}

    def test_survives_restart(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        SimilarityCache(path).get_or_compute("k", lambda: 0.5, "offline", "m")
        reloaded = SimilarityCache(path)
        assert len(reloaded) == 1 and reloaded.get("k") == 0.5

    def test_stats_sidecar(self, tmp_path):
        cache = SimilarityCache(tmp_path / "cache.jsonl")
        cache.get_or_compute("a", lambda: 0.1, "offline", "m")
        cache.get_or_compute("a", lambda: 0.1, "offline", "m")
        cache.save_stats()
        stats = SimilarityCache(tmp_path / "cache.jsonl").last_run_stats()
        assert stats.to_dict() == {"entries": 1, "hits": 1, "misses": 1}

    def test_clear(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = SimilarityCache(path)
        cache.get_or_compute("a", lambda: 0.1, "offline", "m")
        cache.save_stats()
        cache.clear()
        assert len(cache) == 0
        assert path.read_text() == ""
        assert SimilarityCache(path).last_run_stats().entries == 0

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text("{not json\n")
        with pytest.raises(ConfigurationError):
            SimilarityCache(path)

    def test_failed_compute_is_not_cached(self, tmp_path):
        cache = SimilarityCache(tmp_path / "cache.jsonl")

        def fail():
            raise ProviderTransportError("down")

        with pytest.raises(ProviderTransportError):
            cache.get_or_compute("k", fail, "llm", "m")
        assert "k" not in cache
        assert cache.get_or_compute("k", lambda: 0.4, "llm", "m") == (0.4, False)

    def test_concurrent_misses_compute_once(self, tmp_path):
        cache = SimilarityCache(tmp_path / "cache.jsonl")
        calls = []
        start = threading.Barrier(8)

        def compute():
            calls.append(1)
            time.sleep(0.05)
            return 0.6

        def worker():
            start.wait()
            cache.get_or_compute("shared", compute, "llm", "m")

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(calls) == 1
        assert cache.get("shared") == 0.6


class FailingProvider(OfflineSimilarityProvider):
    def _score(self, a, b):
        raise ProviderTransportError("endpoint unreachable")


class TestSimilarity:
    def test_self_pair_needs_no_provider(self, pool, offline_provider):
        concept = pool[0][0]
        score = similarity(concept, concept, offline_provider)
        assert score.value == 1.0 and offline_provider.calls == 0

    def test_cache_tag(self, pool, offline_provider, tmp_path):
        a, b = pool[0][0], pool[0][1]
        cache = SimilarityCache(tmp_path / "cache.jsonl")
        assert similarity(a, b, offline_provider, cache).provider_tag is ScoreSource.OFFLINE
        assert similarity(b, a, offline_provider, cache).provider_tag is ScoreSource.CACHE
        assert offline_provider.calls == 1

    def test_transport_failure(self, pool):
        with pytest.raises(SimilarityUnavailableError) as info:
            similarity(pool[0][0], pool[0][1], FailingProvider([]))
        assert info.value.pair == ("c0", "c1")


class TestBuildMatrix:
    def test_single_concept(self, pool, offline_provider):
        matrix = build_matrix(pool[0][:1], offline_provider)
        assert matrix.entries.tolist() == [[0.0]]

    def test_two_concepts(self, pool, constant_provider):
        matrix = build_matrix(pool[0][:2], constant_provider(default=0.7))
        assert matrix.entries.tolist() == [[0.0, 0.7], [0.7, 0.0]]

    def test_three_pairs(self, pool, constant_provider):
        provider = constant_provider({("c0", "c1"): 0.1, ("c0", "c2"): 0.2, ("c1", "c2"): 0.3})
        matrix = build_matrix(pool[0][:3], provider)
        assert matrix.entries.tolist() == [[0.0, 0.1, 0.2], [0.1, 0.0, 0.3], [0.2, 0.3, 0.0]]
        assert provider.calls == 3

    def test_pair_lookup_count(self, pool, offline_provider):
        build_matrix(pool[0], offline_provider)
        assert offline_provider.calls == 10

    def test_warm_cache_makes_no_calls(self, pool, tmp_path):
        concepts, groups = pool
        path = tmp_path / "cache.jsonl"
        first = build_matrix(concepts, OfflineSimilarityProvider(groups), SimilarityCache(path))
        provider = OfflineSimilarityProvider(groups)
        second = build_matrix(concepts, provider, SimilarityCache(path))
        assert provider.calls == 0
        assert first.concept_ids == second.concept_ids
        assert np.array_equal(first.entries, second.entries)

    def test_full_pool_queries_each_pair_once(self, tmp_path):
        concepts, groups = generate_concepts(SimulationConfig(), 42)
        assert len(concepts) == 250
        path = tmp_path / "cache.jsonl"
        cold = OfflineSimilarityProvider(groups)
        build_matrix(concepts, cold, SimilarityCache(path))
        assert cold.calls == 250 * 249 // 2 == 31_125
        warm = OfflineSimilarityProvider(groups)
        build_matrix(concepts, warm, SimilarityCache(path))
        assert warm.calls == 0

    def test_threaded_build_matches_serial(self, pool, offline_provider):
        concepts, groups = pool
        serial = build_matrix(concepts, offline_provider)
        threaded = build_matrix(concepts, OfflineSimilarityProvider(groups), jobs=4)
        assert np.array_equal(serial.entries, threaded.entries)

    def test_duplicate_ids_rejected(self, pool, offline_provider):
        concepts = pool[0]
        with pytest.raises(ValueError):
            build_matrix([concepts[0], concepts[0]], offline_provider)

    def test_entries_read_only(self, pool, offline_provider):
        matrix = build_matrix(pool[0], offline_provider)
        with pytest.raises(ValueError):
            matrix.entries[0, 1] = 0.5

    def test_top_pairs_and_frame(self, pool, offline_provider):
        matrix = build_matrix(pool[0], offline_provider)
        top = matrix.top_pairs(3)
        assert [value for _, _, value in top] == sorted((value for _, _, value in top), reverse=True)
        assert {top[0][0], top[0][1]} <= {"c0", "c1", "c2"}
        frame = matrix.to_frame()
        assert list(frame.columns) == ["c0", "c1", "c2", "c3", "c4"]
        assert frame.loc["c3", "c4"] == matrix.entries[3, 4]

    def test_csv_layout(self, pool, offline_provider, tmp_path):
        matrix = build_matrix(pool[0][:2], offline_provider)
        matrix.to_csv(tmp_path / "m.csv")
        header = (tmp_path / "m.csv").read_text().splitlines()[0]
        assert header == "concept_id,c0,c1"

    @settings(max_examples=200, deadline=None)
    @given(st.lists(
        st.tuples(st.text(alphabet="abcdef", max_size=8), st.integers(0, 2)),
        min_size=1, max_size=6,
    ))
    def test_symmetric_zero_diagonal_in_range(self, rows):
        concepts = [
            Concept(id=f"c{i}", term=term, gloss="", group_id=f"g{group}", difficulty=0.5)
            for i, (term, group) in enumerate(rows)
        ]
        groups = [
            SemanticGroup(group_id=f"g{g}", members=tuple(c.id for c in concepts if c.group_id == f"g{g}"),
                          base_similarity=0.2 + 0.3 * g)
            for g in range(3) if any(c.group_id == f"g{g}" for c in concepts)
        ]
        matrix = build_matrix(concepts, OfflineSimilarityProvider(groups))
        assert matrix.violations() == []
        assert np.array_equal(matrix.entries, matrix.entries.T)


class TestInterferencePressure:
    @pytest.fixture
    def matrix(self):
        entries = np.array([
            [0.0, 0.2, 0.6, 0.9],
            [0.2, 0.0, 0.1, 0.3],
            [0.6, 0.1, 0.0, 0.4],
            [0.9, 0.3, 0.4, 0.0],
        ])
        return InterferenceMatrix(("a", "b", "c", "d"), entries)

    def test_empty_active_set(self, matrix):
        assert interference_pressure(matrix, 0, []) == 0.0

    def test_single_neighbour(self, matrix):
        assert interference_pressure(matrix, 0, [3]) == 0.9

    def test_mean_of_two(self, matrix):
        assert interference_pressure(matrix, 0, [1, 2]) == pytest.approx(0.4)

    def test_target_ignored(self, matrix):
        assert interference_pressure(matrix, 0, [0]) == 0.0
        assert interference_pressure(matrix, 0, [0, 3]) == 0.9

    @pytest.mark.parametrize("target, active", [(4, []), (-1, []), (0, [7])])
    def test_out_of_bounds(self, matrix, target, active):
        with pytest.raises(IndexError):
            interference_pressure(matrix, target, active)

    def test_adding_a_larger_entry_never_lowers_pressure(self, matrix):
        before = interference_pressure(matrix, 0, [1, 2])
        assert interference_pressure(matrix, 0, [1, 2, 3]) >= before

    def test_zeros_like(self, matrix):
        zeros = matrix.zeros_like()
        assert zeros.concept_ids == matrix.concept_ids
        assert interference_pressure(zeros, 0, [1, 2, 3]) == 0.0
