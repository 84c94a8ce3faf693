import json

from chainruler.cli import main
from chainruler.serialization import read_jsonl


def _gen(tmp_path, name="items.jsonl", extra=()):
    out = tmp_path / name
    rc = main(["gen", "--depth", "1..2", "--breadth", "0..1", "--per-cell", "2",
               "--seed", "11", "-o", str(out), *extra])
    assert rc == 0
    return out


class TestGen:
    def test_grid_arithmetic(self, tmp_path):
        out = _gen(tmp_path)
        rows = read_jsonl(out)
        assert len(rows) == 2 * 2 * 2 * 2  # depth x breadth x cntrp x per-cell

    def test_deterministic_bytes(self, tmp_path):
        a = _gen(tmp_path, "a.jsonl")
        b = _gen(tmp_path, "b.jsonl")
        assert a.read_bytes() == b.read_bytes()

    def test_fixtures_flag(self, tmp_path):
        out = tmp_path / "fixtures.jsonl"
        assert main(["gen", "--fixtures", "-o", str(out)]) == 0
        rows = read_jsonl(out)
        assert [r["conclusion"] for r in rows] == [
            "Jill is guilty.", "Lily is generous."]

    def test_bad_range_is_usage_error(self, tmp_path, capsys):
        rc = main(["gen", "--depth", "five", "-o", str(tmp_path / "x.jsonl")])
        assert rc == 2
        assert "usage error" in capsys.readouterr().err

    def test_scrambled_flag(self, tmp_path):
        out = _gen(tmp_path, "s.jsonl", extra=["--scrambled",
                                               "--contraposition", "false"])
        assert all(r["scrambled"] for r in read_jsonl(out))


class TestElaborate:
    def test_all_strategies_counted(self, tmp_path):
        dataset = _gen(tmp_path)
        out = tmp_path / "elab.jsonl"
        rc = main(["elaborate", "--dataset", str(dataset), "--backend", "mock",
                   "-o", str(out)])
        assert rc == 0
        rows = read_jsonl(out)
        n_items = len(read_jsonl(dataset))
        assert len(rows) == n_items * 10  # every strategy except 'none'

    def test_resume_is_byte_identical(self, tmp_path):
        dataset = _gen(tmp_path)
        out = tmp_path / "elab.jsonl"
        args = ["elaborate", "--dataset", str(dataset), "--backend", "mock",
                "--strategies", "free,oracle_final", "-o", str(out)]
        assert main(args) == 0
        first = out.read_bytes()
        assert main(args) == 0  # rerun resumes from existing rows
        assert out.read_bytes() == first

    def test_unknown_strategy_is_usage_error(self, tmp_path):
        dataset = _gen(tmp_path)
        rc = main(["elaborate", "--dataset", str(dataset),
                   "--strategies", "telepathy", "-o", str(tmp_path / "e.jsonl")])
        assert rc == 2

    def test_none_strategy_rejected(self, tmp_path):
        dataset = _gen(tmp_path)
        rc = main(["elaborate", "--dataset", str(dataset),
                   "--strategies", "none", "-o", str(tmp_path / "e.jsonl")])
        assert rc == 2

    def test_bad_backend_spec(self, tmp_path):
        dataset = _gen(tmp_path)
        rc = main(["elaborate", "--dataset", str(dataset), "--backend", "ftp://x",
                   "-o", str(tmp_path / "e.jsonl")])
        assert rc == 2

    def test_missing_dataset_is_runtime_error(self, tmp_path):
        rc = main(["elaborate", "--dataset", str(tmp_path / "absent.jsonl"),
                   "-o", str(tmp_path / "e.jsonl")])
        assert rc == 1


class TestPredict:
    def test_includes_none_for_every_item(self, tmp_path):
        dataset = _gen(tmp_path)
        elab = tmp_path / "elab.jsonl"
        main(["elaborate", "--dataset", str(dataset), "--strategies",
              "oracle_final", "-o", str(elab)])
        out = tmp_path / "pred.jsonl"
        rc = main(["predict", "--dataset", str(dataset), "--elaborations",
                   str(elab), "--backend", "mock", "-o", str(out)])
        assert rc == 0
        rows = read_jsonl(out)
        n_items = len(read_jsonl(dataset))
        by_strategy = {}
        for r in rows:
            by_strategy.setdefault(r["strategy"], []).append(r)
        assert len(by_strategy["none"]) == n_items
        assert len(by_strategy["oracle_final"]) == n_items

    def test_without_elaborations_only_none(self, tmp_path):
        dataset = _gen(tmp_path)
        out = tmp_path / "pred.jsonl"
        rc = main(["predict", "--dataset", str(dataset), "--backend", "mock",
                   "-o", str(out)])
        assert rc == 0
        assert {r["strategy"] for r in read_jsonl(out)} == {"none"}


class TestAnalyze:
    def _pipeline(self, tmp_path):
        dataset = _gen(tmp_path)
        elab = tmp_path / "elab.jsonl"
        pred = tmp_path / "pred.jsonl"
        main(["elaborate", "--dataset", str(dataset), "--strategies",
              "free,oracle_final", "-o", str(elab)])
        main(["predict", "--dataset", str(dataset), "--elaborations", str(elab),
              "-o", str(pred)])
        return dataset, elab, pred

    def test_outputs_exist(self, tmp_path):
        dataset, elab, pred = self._pipeline(tmp_path)
        outdir = tmp_path / "reports"
        rc = main(["analyze", "--dataset", str(dataset), "--elaborations",
                   str(elab), "--predictions", str(pred),
                   "--outdir", str(outdir)])
        assert rc == 0
        for name in ("accuracy_none_cntrp0.csv", "accuracy_none_cntrp1.csv",
                     "delta_oracle_final_cntrp0.csv",
                     "unnegated_fact_deltas.csv", "metrics.jsonl",
                     "regression.txt"):
            assert (outdir / name).exists(), name

    def test_metrics_rows_have_luck(self, tmp_path):
        dataset, elab, pred = self._pipeline(tmp_path)
        outdir = tmp_path / "reports"
        main(["analyze", "--dataset", str(dataset), "--elaborations", str(elab),
              "--predictions", str(pred), "--outdir", str(outdir)])
        rows = read_jsonl(outdir / "metrics.jsonl")
        assert rows
        for row in rows:
            assert row["luck_total"] == row["luck_context"] + row["luck_elaboration"]

    def test_missing_none_predictions_is_error(self, tmp_path, capsys):
        dataset, elab, pred = self._pipeline(tmp_path)
        rows = [r for r in read_jsonl(pred) if r["strategy"] != "none"]
        culled = tmp_path / "culled.jsonl"
        culled.write_text("\n".join(json.dumps(r) for r in rows) + "\n",
                          encoding="utf-8")
        rc = main(["analyze", "--dataset", str(dataset), "--predictions",
                   str(culled), "--outdir", str(tmp_path / "r2")])
        assert rc == 1
        assert "none" in capsys.readouterr().err


class TestConfigPrecedence:
    def test_flag_beats_config(self, tmp_path, monkeypatch):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"backend": "ftp://bad"}), encoding="utf-8")
        dataset = _gen(tmp_path)
        rc = main(["--config", str(config), "elaborate", "--dataset",
                   str(dataset), "--backend", "mock", "--strategies",
                   "oracle_final", "-o", str(tmp_path / "e.jsonl")])
        assert rc == 0

    def test_env_beats_config(self, tmp_path, monkeypatch):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"backend": "mock"}), encoding="utf-8")
        monkeypatch.setenv("CHAINRULER_BACKEND_URL", "ftp://bad")
        dataset = _gen(tmp_path)
        rc = main(["--config", str(config), "elaborate", "--dataset",
                   str(dataset), "--strategies", "oracle_final",
                   "-o", str(tmp_path / "e.jsonl")])
        assert rc == 2  # the env value wins and is rejected as a spec
