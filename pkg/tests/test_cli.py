import json

import numpy as np
import pytest

from cursor_hmm import io as chio
from cursor_hmm.cli import main
from cursor_hmm.io import load_initial_model, load_lambda1


@pytest.fixture
def layout_path(tmp_path):
    path = tmp_path / "layout.json"
    chio.save_layout(chio.load_example_layout(), path)
    return str(path)


def write_trace(tmp_path, rows, name="trace.csv"):
    path = tmp_path / name
    path.write_text("t_ms,x,y\n" + "".join(f"{t},{x},{y}\n" for t, x, y in rows))
    return str(path)


class TestVectorizeCommand:
    def test_writes_sequence_and_prints_counts(self, tmp_path, layout_path, capsys):
        # bundled layout: (50,70) is in A, (5000,5000) outside everything
        trace = write_trace(tmp_path, [(0, 50, 70), (10, 60, 70), (20, 5000, 5000)])
        out = tmp_path / "seq.txt"
        code = main(["vectorize", "--trace", trace, "--layout", layout_path,
                     "--ds", "10", "--out", str(out)])
        assert code == 0
        assert out.read_text().split() == ["A", "A", "R"]
        printed = capsys.readouterr().out
        assert "T = 3" in printed

    def test_empty_trace_is_usage_error(self, tmp_path, layout_path):
        path = tmp_path / "empty.csv"
        path.write_text("t_ms,x,y\n")
        code = main(["vectorize", "--trace", str(path), "--layout", layout_path,
                     "--ds", "10", "--out", str(tmp_path / "seq.txt")])
        assert code == 2

    def test_zero_ds_is_domain_error(self, tmp_path, layout_path):
        trace = write_trace(tmp_path, [(0, 1, 1), (10, 2, 2)])
        code = main(["vectorize", "--trace", trace, "--layout", layout_path,
                     "--ds", "0", "--out", str(tmp_path / "seq.txt")])
        assert code == 1

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["vectorize", "--bogus"])
        assert exc.value.code == 2


class TestTrainCommand:
    def _data_dir(self, tmp_path, n=3, t=200):
        data = tmp_path / "data"
        data.mkdir()
        model = load_lambda1()
        from cursor_hmm.hmm import sample

        for s in range(n):
            _, seq = sample(model, t, s)
            chio.save_sequence(seq, model.symbol_names, data / f"seq{s}.txt")
        return data

    def _init_path(self, tmp_path):
        path = tmp_path / "init.json"
        chio.save_model(load_initial_model(), path)
        return str(path)

    def test_training_writes_model_and_monotone_trace(self, tmp_path, capsys):
        data = self._data_dir(tmp_path)
        out = tmp_path / "trained.json"
        code = main(["train", "--init", self._init_path(tmp_path),
                     "--data", str(data), "--out", str(out), "--max-iters", "10"])
        assert code == 0
        trained = chio.load_model(out)
        assert trained.n_states == 2
        trace = chio.load_report(str(out) + ".trace.json")
        lls = trace["log_likelihoods"]
        assert all(b >= a - 1e-8 for a, b in zip(lls, lls[1:]))

    def test_empty_data_dir_is_domain_error(self, tmp_path):
        empty = tmp_path / "nothing"
        empty.mkdir()
        code = main(["train", "--init", self._init_path(tmp_path),
                     "--data", str(empty), "--out", str(tmp_path / "m.json")])
        assert code == 1

    def test_zero_iterations_returns_input_model(self, tmp_path):
        data = self._data_dir(tmp_path, n=1, t=50)
        out = tmp_path / "same.json"
        code = main(["train", "--init", self._init_path(tmp_path),
                     "--data", str(data), "--out", str(out), "--max-iters", "0"])
        assert code == 0
        model0 = load_initial_model()
        trained = chio.load_model(out)
        np.testing.assert_array_equal(trained.a, model0.a)
        np.testing.assert_array_equal(trained.b, model0.b)


class TestClassifyCommand:
    def _models_dir(self, tmp_path):
        models = tmp_path / "models"
        models.mkdir()
        chio.save_model(load_lambda1(), models / "REP.json")
        lam1 = load_lambda1()
        from cursor_hmm import HmmModel

        flipped = HmmModel(
            pi=lam1.pi, a=lam1.a, b=lam1.b[::-1], symbol_names=lam1.symbol_names
        )
        chio.save_model(flipped, models / "INT.json")
        return models

    def _seq_from(self, tmp_path, model, seed=1, t=300):
        from cursor_hmm.hmm import sample

        _, seq = sample(model, t, seed)
        path = tmp_path / "query.txt"
        chio.save_sequence(seq, model.symbol_names, path)
        return str(path)

    def test_correct_winner_and_json_shape(self, tmp_path, capsys):
        models = self._models_dir(tmp_path)
        seq_path = self._seq_from(tmp_path, load_lambda1())
        code = main(["classify", "--models", str(models), "--seq", seq_path, "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["winner"] == "REP"
        assert set(payload["scores"]) == {"REP", "INT"}
        assert list(payload["scores"]) == sorted(payload["scores"])

    def test_single_model_dir(self, tmp_path, capsys):
        models = tmp_path / "one"
        models.mkdir()
        chio.save_model(load_lambda1(), models / "REP.json")
        seq_path = self._seq_from(tmp_path, load_lambda1())
        code = main(["classify", "--models", str(models), "--seq", seq_path, "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["winner"] == "REP" and payload["margin"] == 0.0

    def test_mismatched_alphabets_error(self, tmp_path):
        models = tmp_path / "models"
        models.mkdir()
        chio.save_model(load_lambda1(), models / "REP.json")
        from cursor_hmm import HmmModel

        other = HmmModel(
            pi=[1.0], a=[[1.0]], b=[[0.5, 0.5]], symbol_names=("p", "q")
        )
        chio.save_model(other, models / "INT.json")
        seq_path = self._seq_from(tmp_path, load_lambda1())
        code = main(["classify", "--models", str(models), "--seq", seq_path])
        assert code == 1


class TestSampleCommand:
    def test_fixed_seed_reproducibility(self, tmp_path):
        model_path = tmp_path / "m.json"
        chio.save_model(load_lambda1(), model_path)
        out1, out2 = tmp_path / "s1.txt", tmp_path / "s2.txt"
        for out in (out1, out2):
            assert main(["sample", "--model", str(model_path), "--length", "100",
                         "--seed", "9", "--out", str(out)]) == 0
        assert out1.read_text() == out2.read_text()

    def test_deterministic_model_forces_sequence(self, tmp_path):
        from cursor_hmm import HmmModel

        det = HmmModel(
            pi=[1.0, 0.0],
            a=[[0.0, 1.0], [1.0, 0.0]],
            b=[[1.0, 0.0], [0.0, 1.0]],
            symbol_names=("x", "y"),
        )
        model_path = tmp_path / "det.json"
        chio.save_model(det, model_path)
        out = tmp_path / "s.txt"
        assert main(["sample", "--model", str(model_path), "--length", "4",
                     "--seed", "77", "--out", str(out)]) == 0
        assert out.read_text().split() == ["x", "y", "x", "y"]


class TestReportCommand:
    def test_single_sequence_percentages(self, tmp_path, layout_path, capsys):
        seq_path = tmp_path / "seq.txt"
        seq_path.write_text("E E E R\n")
        code = main(["report", "--seq", str(seq_path), "--layout", layout_path, "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["E"] == 75.0 and payload["R"] == 25.0
        assert sum(payload.values()) == pytest.approx(100.0, abs=1e-9)

    def test_aggregate_of_identical_sequences_matches_single(self, tmp_path, layout_path, capsys):
        agg = tmp_path / "many"
        agg.mkdir()
        for name in ("a.txt", "b.txt"):
            (agg / name).write_text("E E E R\n")
        code = main(["report", "--aggregate", str(agg), "--layout", layout_path, "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["E"] == 75.0 and payload["R"] == 25.0

    def test_needs_exactly_one_input(self, layout_path):
        assert main(["report", "--layout", layout_path]) == 2


class TestVerifyTable2Command:
    def test_full_run_reproduces_all_decisions(self, capsys):
        assert main(["verify-table2"]) == 0
        out = capsys.readouterr().out
        assert "10/10" in out
        assert "7007.9000" in out  # published T3 margin

    def test_tampered_fixture_fails_naming_the_row(self, tmp_path, monkeypatch, capsys):
        payload = json.loads((chio.fixtures_dir() / "table2.json").read_text())
        payload["rows"][5]["decision"] = "INT"  # flip T6
        (tmp_path / "table2.json").write_text(json.dumps(payload))
        monkeypatch.setenv(chio.FIXTURES_ENV_VAR, str(tmp_path))
        assert main(["verify-table2"]) == 1
        out = capsys.readouterr().out
        assert "T6" in out and "MISMATCH" in out
