import json

import pytest

import cli
from core.errors import SchedulerError
from core.types import SchedulerId
from schedulers import registry
from schedulers.threshold import ThresholdScheduler

TINY = {"n_learners": 1, "n_days": 1, "concepts_per_learner": 1, "n_groups": 1, "scheduler_ids": ["threshold"]}


def experiment(tmp_path, name="exp.json", output="out", **fields):
    payload = {"simulation": TINY, "output_dir": str(tmp_path / output), **fields}
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def two_concept_pool(tmp_path, pool):
    from core.types import dump_concept_pool
    concepts, groups = pool
    path = tmp_path / "pool.json"
    dump_concept_pool(concepts[:2], [groups[0].model_copy(update={"members": ("c0", "c1")})], path)
    return str(path)


class TestSimulate:
    def test_smoke(self, tmp_path):
        assert cli.main(["simulate", "--config", experiment(tmp_path), "--jobs", "1"]) == 0
        out = tmp_path / "out"
        for name in ("events_threshold.csv", "manifest_threshold.json", "comparison.csv",
                     "comparison.json", "lector.log"):
            assert (out / name).exists(), name
        assert len((out / "events_threshold.csv").read_text().splitlines()) == 2
        assert not (out / "improvement.csv").exists()

    def test_outputs_are_reproducible(self, tmp_path):
        simulation = {**TINY, "n_learners": 2, "n_days": 8, "concepts_per_learner": 3, "n_groups": 2,
                      "scheduler_ids": ["lector", "sm2"]}
        first = experiment(tmp_path, "a.json", "a", simulation=simulation)
        second = experiment(tmp_path, "b.json", "b", simulation=simulation)
        assert cli.main(["simulate", "--config", first, "--jobs", "1"]) == 0
        assert cli.main(["simulate", "--config", second, "--jobs", "1"]) == 0
        for name in ("events_lector.csv", "events_sm2.csv", "comparison.csv", "comparison.json", "improvement.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        simulation = {**TINY, "n_learners": 4, "n_days": 10, "concepts_per_learner": 4, "n_groups": 3,
                      "scheduler_ids": ["lector", "fsrs-simplified", "sm2"]}
        serial = experiment(tmp_path, "serial.json", "serial", simulation=simulation)
        pooled = experiment(tmp_path, "pooled.json", "pooled", simulation=simulation)
        assert cli.main(["simulate", "--config", serial, "--jobs", "1"]) == 0
        assert cli.main(["simulate", "--config", pooled, "--jobs", "8"]) == 0
        written = sorted(p.name for p in (tmp_path / "serial").glob("*.csv"))
        assert "events_lector.csv" in written
        for name in written:
            assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "pooled" / name).read_bytes(), name

    def test_plots_and_ablation(self, tmp_path):
        simulation = {**TINY, "n_days": 4, "scheduler_ids": ["lector"]}
        args = ["simulate", "--config", experiment(tmp_path, simulation=simulation),
                "--plot", "--ablate-semantics", "--jobs", "1"]
        assert cli.main(args) == 0
        out = tmp_path / "out"
        assert (out / "events_lector-ablated.csv").exists()
        assert len(list((out / "plots").glob("*.svg"))) == 6
        assert (out / "plots" / "improvement.svg").exists()
        table = (out / "comparison.csv").read_text()
        assert "lector-ablated" in table
        improvement = (out / "improvement.csv").read_text().splitlines()
        assert improvement[0] == "algorithm,success_rate,relative_improvement,percentage_point_gap"
        assert improvement[1].startswith("lector-ablated,")

    def test_multi_seed(self, tmp_path):
        args = ["simulate", "--config", experiment(tmp_path), "--seeds", "1,2", "--jobs", "1"]
        assert cli.main(args) == 0
        medians = (tmp_path / "out" / "median_success_rates.csv").read_text().splitlines()
        assert medians[0] == "algorithm,median_success_rate"
        assert medians[1].startswith("threshold,")

    def test_missing_config(self, tmp_path, capsys):
        assert cli.main(["simulate", "--config", str(tmp_path / "absent.json")]) == 2
        assert "Configuration error" in capsys.readouterr().err

    def test_unknown_field(self, tmp_path):
        assert cli.main(["simulate", "--config", experiment(tmp_path, schedulers=["sm2"])]) == 2

    def test_unknown_scheduler(self, tmp_path):
        assert cli.main(["simulate", "--config", experiment(tmp_path), "--schedulers", "leitner"]) == 2

    def test_scheduler_failure(self, tmp_path, monkeypatch):
        class FailingScheduler(ThresholdScheduler):
            def review(self, state, success, ctx):
                if ctx.day >= 2:
                    raise SchedulerError("invalid decision")
                return super().review(state, success, ctx)

        monkeypatch.setitem(registry.SCHEDULERS, SchedulerId.THRESHOLD, FailingScheduler)
        simulation = {**TINY, "n_days": 5}
        assert cli.main(["simulate", "--config", experiment(tmp_path, simulation=simulation), "--jobs", "1"]) == 4
        assert (tmp_path / "out" / "events_threshold.partial.csv").exists()


class TestMatrix:
    def test_two_concepts(self, tmp_path, two_concept_pool, capsys):
        cache = str(tmp_path / "cache.jsonl")
        args = ["matrix", "--pool", two_concept_pool, "--cache", cache, "--out", str(tmp_path / "m"), "--stats"]
        assert cli.main(args) == 0
        header = (tmp_path / "m" / "interference_matrix.csv").read_text().splitlines()[0]
        assert header == "concept_id,c0,c1"
        assert "provider calls: 1" in capsys.readouterr().out

        assert cli.main(args) == 0
        out = capsys.readouterr().out
        assert "provider calls: 0" in out
        assert "cache: 1 entries, 1 hits, 0 misses" in out

    def test_unreachable_llm_endpoint(self, tmp_path, two_concept_pool, monkeypatch):
        monkeypatch.setenv("LECTOR_LLM_ENDPOINT", "http://127.0.0.1:9/complete")
        monkeypatch.setenv("LECTOR_LLM_RETRIES", "0")
        monkeypatch.setenv("LECTOR_LLM_TIMEOUT", "2")
        args = ["matrix", "--pool", two_concept_pool, "--provider", "llm",
                "--cache", str(tmp_path / "cache.jsonl"), "--out", str(tmp_path / "m")]
        assert cli.main(args) == 3

    def test_llm_without_endpoint(self, tmp_path, two_concept_pool, monkeypatch):
        monkeypatch.delenv("LECTOR_LLM_ENDPOINT", raising=False)
        args = ["matrix", "--pool", two_concept_pool, "--provider", "llm",
                "--cache", str(tmp_path / "cache.jsonl"), "--out", str(tmp_path / "m")]
        assert cli.main(args) == 2


class TestCacheAndPool:
    def test_stats_and_clear(self, tmp_path, two_concept_pool, capsys):
        cache = str(tmp_path / "cache.jsonl")
        cli.main(["matrix", "--pool", two_concept_pool, "--cache", cache, "--out", str(tmp_path / "m")])
        capsys.readouterr()

        assert cli.main(["cache", "stats", "--cache", cache]) == 0
        assert capsys.readouterr().out.splitlines() == ["1 entries", "last run: 0 hits, 1 misses"]
        assert cli.main(["cache", "clear", "--cache", cache]) == 0
        assert capsys.readouterr().out.splitlines() == ["0 entries"]

    def test_cache_path_from_environment(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("LECTOR_CACHE_PATH", str(tmp_path / "env_cache.jsonl"))
        assert cli.main(["cache", "stats"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "0 entries"

    def test_pool(self, tmp_path):
        from core.types import load_concept_pool
        out = tmp_path / "pool.json"
        assert cli.main(["pool", "--out", str(out), "--groups", "3", "--group-size", "4", "--seed", "9"]) == 0
        concepts, groups = load_concept_pool(out)
        assert len(concepts) == 12 and len(groups) == 3

    def test_pool_bad_parameters(self, tmp_path):
        assert cli.main(["pool", "--out", str(tmp_path / "p.json"), "--groups", "0"]) == 2
