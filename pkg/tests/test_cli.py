import io

import pytest

from cli.commands import EXIT_CLAIM_FAILED, EXIT_ERROR, EXIT_OK, main
from cli.config import ENV_KEYS, CommandConfig, env_defaults
from conftest import make_instance
from pattern.errors import PatternError
from pattern.persistence import load_store_file, save_store_file
from pattern.store import PatternStore


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(ENV_KEYS) + ["PCOH_STATLOG_URL"]:
        monkeypatch.delenv(key, raising=False)


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestPresentCommand:
    def test_fresh_store(self, tmp_path):
        store = str(tmp_path / "store.tsv")
        inputs = _write(tmp_path / "in.txt", "t 1 1:1 2:1 3:1\n")
        code, out, _ = _run("present", store, inputs)
        assert code == EXIT_OK
        loaded = load_store_file(store)
        assert len(loaded) == 1 and loaded.get(1).group_events == 1
        assert "pattern 1 (new)" in out
        assert out.startswith("# delta=0.5 omega_i=1.0 omega_g=1.0 inhibit_delta=0.5 decay=1.0 (off)")

    def test_replay_doubles_counts(self, tmp_path):
        store = str(tmp_path / "store.tsv")
        inputs = _write(tmp_path / "in.txt", "t 1 1:1 2:1 3:1\nt 2 4:1 5:1\n")
        assert _run("present", store, inputs)[0] == EXIT_OK
        once = load_store_file(store)
        assert _run("present", store, inputs)[0] == EXIT_OK
        twice = load_store_file(store)
        assert sorted(twice.patterns) == sorted(once.patterns)
        for pid, inst in once.patterns.items():
            again = twice.patterns[pid]
            assert again.group_events == 2 * inst.group_events
            for nid, rec in inst.records.items():
                assert again.records[nid].as_tuple() == tuple(2 * v for v in rec.as_tuple())

    def test_malformed_input_leaves_store_untouched(self, tmp_path, worked_store):
        path = tmp_path / "store.tsv"
        save_store_file(worked_store, path)
        before = path.read_bytes()
        inputs = _write(tmp_path / "in.txt", "t 1 1:1\nt 2 oops\n")
        code, _, err = _run("present", str(path), inputs)
        assert code == EXIT_ERROR
        assert "line 2" in err
        assert path.read_bytes() == before

    def test_decay_flag(self, tmp_path):
        store = str(tmp_path / "store.tsv")
        inputs = _write(tmp_path / "in.txt", "t 1 1:1\nt 2 1:1\n")
        assert _run("present", store, inputs, "--decay", "0.5")[0] == EXIT_OK
        # 第二次呈现前 R 从 1 衰减到 0.5
        assert load_store_file(store).get(1).records[1].reinforcement == 1.5


class TestCohesionCommand:
    def test_worked_store(self, tmp_path, worked_store):
        path = tmp_path / "store.tsv"
        save_store_file(worked_store, path)
        code, out, _ = _run("cohesion", str(path))
        assert code == EXIT_OK
        assert "Coh=0.5200" in out
        assert "node 1: gap=0.6000 not cohesive" in out
        assert "node 2: gap=0.2000 cohesive" in out
        assert _run("cohesion", str(path))[1] == out

    def test_uniform_counts(self, tmp_path):
        store = PatternStore(next_pattern_id=2)
        store.patterns[1] = make_instance(1, {1: 3, 2: 3, 3: 3}, group_count=3, group_events=3)
        path = tmp_path / "store.tsv"
        save_store_file(store, path)
        _, out, _ = _run("cohesion", str(path))
        assert "Coh=1.0000" in out
        assert "not cohesive" not in out

    def test_empty_store(self, tmp_path):
        path = tmp_path / "store.tsv"
        save_store_file(PatternStore(), path)
        code, out, _ = _run("cohesion", str(path))
        assert code == EXIT_OK
        assert "(empty store)" in out

    def test_missing_store(self, tmp_path):
        assert _run("cohesion", str(tmp_path / "nope.tsv"))[0] == EXIT_ERROR


class TestSplitCommand:
    def test_worked_ranking(self, tmp_path, worked_store):
        path = tmp_path / "store.tsv"
        save_store_file(worked_store, path)
        code, out, _ = _run("split", str(path), "1")
        assert code == EXIT_OK
        lines = out.splitlines()
        start = lines.index("rank\tremoved\tremainder\tcomposite") + 1
        assert [int(line.split("\t")[1]) for line in lines[start:start + 5]] == [1, 3, 5, 2, 4]
        assert "suggestion: split into [[1, 3], [2, 4, 5]]" in out

    def test_unknown_pattern(self, tmp_path, worked_store):
        path = tmp_path / "store.tsv"
        save_store_file(worked_store, path)
        code, _, err = _run("split", str(path), "7")
        assert code == EXIT_ERROR
        assert "known ids: [1]" in err

    def test_singleton_refused(self, tmp_path):
        store = PatternStore(next_pattern_id=2)
        store.patterns[1] = make_instance(1, {4: 1}, group_count=1, group_events=1)
        path = tmp_path / "store.tsv"
        save_store_file(store, path)
        code, _, err = _run("split", str(path), "1")
        assert code == EXIT_ERROR
        assert "single node" in err


class TestSimulateCommand:
    SCENARIO = "delta 1\nhorizon 2\npattern 1 2\npattern 3\nE 1 1 1\nE 2 1 1\nH 3 2 2\n"

    def test_trace_to_file(self, tmp_path):
        scenario = _write(tmp_path / "s.txt", self.SCENARIO)
        trace = tmp_path / "trace.tsv"
        code, _, _ = _run("simulate", scenario, "--out", str(trace))
        assert code == EXIT_OK
        lines = trace.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "neuron\tt\tX"
        assert "1\t1\t0.0" in lines

    def test_inhibit_delta_override(self, tmp_path):
        scenario = _write(tmp_path / "s.txt", self.SCENARIO)
        code, out, _ = _run("simulate", scenario, "--inhibit-delta", "0")
        assert code == EXIT_OK
        assert "1\t1\t2.0" in out.splitlines()

    def test_unknown_neuron(self, tmp_path):
        scenario = _write(tmp_path / "s.txt", "pattern 1\nE 8 1 1\n")
        code, _, err = _run("simulate", scenario)
        assert code == EXIT_ERROR
        assert "line 2" in err


class TestBenchCommand:
    def test_claim_holds(self, tmp_path):
        data = _write(tmp_path / "toy.dat", "0 4 a\n0 4 a\n4 0 b\n4 0 b\n2 4 c\n2 4 c\n")
        code, out, _ = _run("bench", data)
        assert code == EXIT_OK
        assert "Whole Dataset" in out
        report = (tmp_path / "toy.dat.report.tsv").read_text(encoding="utf-8").splitlines()
        assert len(report) == 1 + 2 * 4

    def test_claim_fails(self, tmp_path):
        data = _write(tmp_path / "toy.dat", "1 2 a\n3 4 a\n5 6 b\n7 9 b\n")
        out_path = tmp_path / "r.tsv"
        code, _, err = _run("bench", data, "--out", str(out_path))
        assert code == EXIT_CLAIM_FAILED
        assert "directional claim failed" in err
        assert out_path.exists()

    def test_schema_flags(self, tmp_path):
        data = _write(tmp_path / "toy.csv", "cls,x,y\na,0,4\na,0,4\nb,4,0\nb,4,0\nc,2,4\nc,2,4\n")
        code, _, _ = _run("bench", data, "--delimiter", ",", "--label-col", "0", "--header", "--normalize", "none")
        assert code == EXIT_OK

    def test_negative_raw_means(self, tmp_path):
        data = _write(tmp_path / "toy.dat", "1 2 a\n3 4 a\n-5 -6 b\n-7 -2 b\n")
        code, out, err = _run("bench", data)
        assert code == EXIT_OK, err
        assert "whole-dataset cohesion is negative in mode raw" in out

    def test_bad_dataset(self, tmp_path):
        data = _write(tmp_path / "toy.dat", "1 2 a\n1 a\n")
        code, _, err = _run("bench", data)
        assert code == EXIT_ERROR
        assert "row 2" in err


class TestUsage:
    def test_no_subcommand(self):
        assert _run()[0] == EXIT_ERROR

    def test_unknown_flag(self, tmp_path):
        assert _run("cohesion", str(tmp_path / "s.tsv"), "--bogus")[0] == EXIT_ERROR

    @pytest.mark.parametrize("flag, value", [("--delta", "0"), ("--omega-i", "-1"), ("--decay", "2"), ("--overlap-threshold", "1.5")])
    def test_invalid_parameters(self, tmp_path, flag, value):
        path = tmp_path / "store.tsv"
        save_store_file(PatternStore(), path)
        code, _, err = _run("cohesion", str(path), flag, value)
        assert code == EXIT_ERROR
        assert flag in err


class TestConfig:
    def test_env_then_flag(self, tmp_path, monkeypatch):
        path = tmp_path / "store.tsv"
        save_store_file(PatternStore(), path)
        monkeypatch.setenv("PCOH_DELTA", "0.25")
        assert "delta=0.25 " in _run("cohesion", str(path))[1]
        assert "delta=0.75 " in _run("cohesion", str(path), "--delta", "0.75")[1]

    def test_env_must_be_numeric(self):
        with pytest.raises(PatternError):
            env_defaults({"PCOH_DECAY": "fast"})

    def test_defaults_validate(self):
        cfg = CommandConfig().validate()
        assert cfg.update_config().decay_enabled is False
        assert cfg.threshold().delta == 0.5


def _statlog_text():
    # 七个类别各两行相同数据；每个变量上各类别取值是 1..7 的一个轮换
    lines = []
    for k in range(7):
        row = " ".join(str(1 + (j + k) % 7) for j in range(19))
        lines += [f"{row} {k + 1}"] * 2
    return "\n".join(lines) + "\n"


class TestStatlogBench:
    def test_seven_categories_two_modes(self, tmp_path):
        data = _write(tmp_path / "segment.dat", _statlog_text())
        code, out, err = _run("bench", data, "--statlog")
        assert code == EXIT_OK, err
        for name in ("brickface", "sky", "foliage", "cement", "window", "path", "grass"):
            assert name in out
        rows = (tmp_path / "segment.dat.report.tsv").read_text(encoding="utf-8").splitlines()
        assert len(rows) == 1 + 2 * (1 + 7)
        body = [r.split("\t") for r in rows[1:]]
        assert {r[1] for r in body} == {"raw", "minmax"}
        for r in body:
            if r[0] != "whole":
                assert float(r[3]) == 1.0
                assert float(r[2]) == 0.0
            else:
                assert float(r[3]) < 1.0

    def test_fetches_missing_file(self, tmp_path, monkeypatch):
        text = _statlog_text()

        class Resp:
            status_code = 200

        Resp.text = text
        calls = []

        def fake_get(url, timeout):
            calls.append(url)
            return Resp()

        monkeypatch.setattr("bench.dataset.requests.get", fake_get)
        path = tmp_path / "segment.dat"
        code, out, err = _run("bench", str(path), "--statlog")
        assert code == EXIT_OK, err
        assert len(calls) == 1
        assert path.read_text(encoding="utf-8") == text
        assert "grass" in out

        code, _, _ = _run("bench", str(path), "--statlog")
        assert code == EXIT_OK
        assert len(calls) == 1
