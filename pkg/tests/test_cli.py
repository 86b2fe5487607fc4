import json

import pytest

from slovaklab.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    build_parser,
    main,
)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def run_json(argv, capsys):
    code, out = run(argv, capsys)
    assert code == EXIT_OK, out
    return json.loads(out)


class TestEntropyCommand:
    def test_fullshift_rate(self, capsys):
        body = run_json(["entropy", "--system", "fullshift", "--depth", "6",
                         "--n-ladder", "2,3,4,5,6"], capsys)
        assert abs(body["rates"]["0.4"] - 0.6931471805599453) < 1e-9

    def test_odometer_rate_small(self, capsys):
        body = run_json(["entropy", "--system", "odometer", "--depth", "8",
                         "--eps-ladder", "0.3", "--net-eps", "0.3",
                         "--n-ladder", "2,4,6"], capsys)
        assert abs(body["rates"]["0.3"]) < 0.01

    def test_csv_projection(self, capsys):
        code, out = run(["entropy", "--system", "odometer", "--depth", "6",
                         "--eps-ladder", "0.3", "--net-eps", "0.3",
                         "--n-ladder", "2,4", "--format", "csv"], capsys)
        assert code == EXIT_OK
        assert out.splitlines()[0] == "n,eps,count,exact,rate"

    def test_missing_system_is_config_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["entropy"])
        assert exc.value.code == EXIT_CONFIG

    def test_unknown_system(self, capsys):
        code, _ = run(["entropy", "--system", "henon"], capsys)
        assert code == EXIT_CONFIG


class TestAnalyzeCommand:
    def test_sturmian_complexity(self, capsys):
        body = run_json(["analyze", "complexity", "--system",
                         "sturmian:golden", "--n-max", "6"], capsys)
        assert [r["count"] for r in body["rows"]] == [2, 3, 4, 5, 6, 7]

    def test_recurrence_odometer(self, capsys):
        body = run_json(["analyze", "recurrence", "--system", "odometer",
                         "--depth", "8", "--point", "b:00000000",
                         "--eps", "0.3"], capsys)
        assert body["verdict"] == "yes-witnessed" and body["period"] == 4

    def test_recurrence_plusone(self, capsys):
        body = run_json(["analyze", "recurrence", "--system", "plusone",
                         "--point", "0", "--horizon", "80"], capsys)
        assert body["verdict"] == "no-witnessed"

    def test_equicontinuity(self, capsys):
        body = run_json(["analyze", "equicontinuity", "--system",
                         "fullshift"], capsys)
        assert body["verdict"] == "not-equicontinuous"
        assert body["witness"]


class TestEnvelopeCommand:
    def test_lower_bound_with_realization(self, capsys):
        body = run_json(["envelope", "lower-bound", "--system", "fullshift",
                         "--stages", "1:0.5:12:2", "--eps", "0.4"], capsys)
        assert body["rows"][0]["meets_bound"]
        assert body["realized"][0]["family_size"] == 6

    def test_constants(self, capsys):
        body = run_json(["envelope", "constants", "--system", "odometer",
                         "--depth", "8", "--net-eps", "0.3",
                         "--eps-ladder", "0.3"], capsys)
        assert body["all_equal"]

    def test_discreteness_small(self, capsys):
        body = run_json(["envelope", "discreteness", "--pairs", "2",
                         "--sample", "20", "--jobs", "2"], capsys)
        assert body["all_positive"]
        assert body["min_off_diagonal"] > 0


class TestSlovakCommand:
    def test_fibers(self, capsys):
        body = run_json(["slovak", "fibers", "--range", "2"], capsys)
        lengths = [f["length"] for f in body["fibers"]]
        assert lengths == ["1/12", "1/6", "1/3", "1/6", "1/12"]

    def test_successor(self, capsys):
        body = run_json(["slovak", "successor", "--steps", "2"], capsys)
        assert body["all_match"]

    def test_build_csv(self, capsys):
        code, out = run(["slovak", "build", "--format", "csv"], capsys)
        assert code == EXIT_OK
        assert out.splitlines()[0] == "t,s,word,F,tail_error"

    def test_uc_check(self, capsys):
        body = run_json(["slovak", "uc-check", "--eps-ladder", "0.5",
                         "--sample", "30"], capsys)
        assert body["rows"][0]["passed"]


class TestSuspensionCommand:
    def test_trace(self, capsys):
        body = run_json(["suspension", "trace", "--depth", "4",
                         "--steps", "3", "--start", "s:0000@0.0"], capsys)
        assert len(body["points"]) == 3


class TestDeterminism:
    def test_hash_stable_across_runs(self, capsys):
        argv = ["analyze", "complexity", "--system", "sturmian:golden",
                "--n-max", "4"]
        a = run_json(argv, capsys)
        b = run_json(argv, capsys)
        assert a["determinism_hash"] == b["determinism_hash"]

    def test_hash_depends_on_config(self, capsys):
        a = run_json(["analyze", "complexity", "--system", "sturmian:golden",
                      "--n-max", "4"], capsys)
        b = run_json(["analyze", "complexity", "--system", "sturmian:golden",
                      "--n-max", "5"], capsys)
        assert a["determinism_hash"] != b["determinism_hash"]


class TestOutputFile:
    def test_out_flag(self, tmp_path, capsys):
        path = tmp_path / "report.json"
        code = main(["slovak", "fibers", "--range", "1", "--out", str(path)])
        assert code == EXIT_OK
        assert json.loads(path.read_text())["fibers"]

    def test_parser_builds(self):
        assert build_parser().prog == "slovaklab"
