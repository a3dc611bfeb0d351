import json
import subprocess
import sys
import time

import pytest

from eismu import __version__
from eismu.cli import main
from eismu.errors import CacheCorruptError
from eismu.survey import (
    CACHE_ENV,
    SurveyRow,
    compute_row,
    default_cache_path,
    load_cache,
    render,
    run_survey,
    summarize,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCheck:
    def test_flagship_json(self, capsys):
        code, out, _ = run(capsys, "check", "--N", "11", "--p", "5", "--k0", "2", "--json")
        report = json.loads(out)
        assert code == 0
        for key in ("regular_pair", "principal", "up_minus_one_generates", "merel_ok"):
            assert report[key] is True

    def test_bad_level(self, capsys):
        code, _, err = run(capsys, "check", "--N", "13", "--p", "5", "--k0", "2")
        assert code == 2 and "13" in err

    def test_n31_matches_components(self, capsys):
        from eismu.arith import SetupParams
        from eismu.criteria import full_report

        code, out, _ = run(capsys, "check", "--N", "31", "--p", "5", "--k0", "2", "--json")
        assert code == 0
        assert json.loads(out) == full_report(SetupParams(31, 5, 2)).to_json()


class TestMu:
    @pytest.mark.parametrize("k,expected", [(2, 1), (10, 2), (50, 3), (250, 4)])
    def test_values(self, capsys, k, expected):
        code, out, _ = run(capsys, "mu", "--N", "11", "--p", "5", "--k0", "2", "--k", str(k), "--json")
        data = json.loads(out)
        assert code == 0
        assert data["mu_sum"] == expected and data["lambda"] == 0
        assert data["constant_term_valuation"] == expected and data["agrees"]
        if k == 2:
            assert data["mu_sum_w2_modsym"] == 1

    def test_parity(self, capsys):
        code, _, _ = run(capsys, "mu", "--N", "11", "--p", "5", "--k0", "2", "--k", "3")
        assert code == 2

    def test_refusal(self, capsys):
        from eismu.arith import SetupParams, primes_congruent_to_one
        from eismu.criteria import full_report

        N = next(N for N in primes_congruent_to_one(5, 2000)
                 if not full_report(SetupParams(N, 5, 2)).up_minus_one_generates)
        code, _, err = run(capsys, "mu", "--N", str(N), "--p", "5", "--k0", "2", "--k", "2")
        assert code == 1 and "refused" in err


class TestOtherCommands:
    def test_qexp(self, capsys):
        code, out, _ = run(capsys, "qexp", "--N", "11", "--p", "5", "--k", "2", "--sign", "minus",
                           "--terms", "12")
        data = json.loads(out)
        assert code == 0 and data["a0"] == "-5/3" and len(data["coeffs"]) == 12

    def test_modsym(self, capsys):
        code, out, _ = run(capsys, "modsym", "--N", "11", "--p", "5", "--eigen")
        data = json.loads(out)
        assert code == 0
        assert data["eigenvalues"]["2"] == -2 and data["eigenvalues"]["3"] == -1
        assert data["rank"] == 1 and data["class_count"] == 1

    def test_modsym_eigen_needs_rank_one(self, capsys):
        code, out, err = run(capsys, "--precision", "4", "modsym", "--N", "31", "--p", "5", "--eigen")
        assert code == 1 and json.loads(out)["rank"] == 2

    def test_axioms(self, capsys):
        code, out, _ = run(capsys, "axioms", "--selftest", "--trials", "100", "--seed", "7")
        assert code == 0
        assert "FAIL" not in out and out.count("PASS") == 6

    def test_axioms_without_flag(self, capsys):
        assert run(capsys, "axioms")[0] == 2

    def test_version(self, capsys):
        code, out, _ = run(capsys, "version")
        assert code == 0 and out.strip() == __version__

    def test_global_flag_before_subcommand(self, capsys):
        code, out, _ = run(capsys, "--qexp-terms", "5", "qexp", "--N", "11", "--p", "5", "--k", "2")
        assert code == 0 and len(json.loads(out)["coeffs"]) == 5

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "eismu", "version"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout.strip() == __version__


class TestSurvey:
    def test_rows_below_100(self, capsys, tmp_path):
        code, out, _ = run(capsys, "survey", "--p", "5", "--max-N", "100", "--no-cache", "--jobs", "1")
        rows = [json.loads(line) for line in out.splitlines()]
        assert code == 0
        assert [r["N"] for r in rows] == [11, 31, 41, 61, 71]

    def test_rank_needs_k0_2(self, capsys):
        code, _, _ = run(capsys, "survey", "--p", "7", "--k0", "4", "--with-rank", "--max-N", "100",
                         "--no-cache")
        assert code == 2

    def test_env_cache_dir(self, monkeypatch, tmp_path):
        monkeypatch.setenv(CACHE_ENV, str(tmp_path))
        assert default_cache_path(5, 2) == tmp_path / "survey_p5_k2.jsonl"

    def test_determinism_across_jobs(self, tmp_path):
        one = run_survey(5, 2, 400, with_rank=True, jobs=1, cache_path=tmp_path / "a.jsonl", M=3)
        two = run_survey(5, 2, 400, with_rank=True, jobs=2, cache_path=tmp_path / "b.jsonl", M=3)
        assert render(one) == render(two)
        assert render(one, "csv") == render(two, "csv")

    def test_cli_output_identical_across_jobs(self, capsys, tmp_path):
        outputs = []
        for jobs in ("1", "2"):
            path = tmp_path / f"out{jobs}.csv"
            code, _, _ = run(capsys, "--precision", "3", "survey", "--p", "5", "--max-N", "300",
                             "--with-rank", "--no-cache", "--jobs", jobs, "--format", "csv",
                             "--output", str(path))
            assert code == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_resume(self, tmp_path):
        full = tmp_path / "full.jsonl"
        reference = render(run_survey(5, 2, 400, with_rank=True, cache_path=full, M=3))
        lines = full.read_text().splitlines(keepends=True)
        # interrupted run: four complete rows and a torn append
        partial = tmp_path / "partial.jsonl"
        partial.write_text("".join(lines[:4]) + lines[4][: len(lines[4]) // 2])
        assert len(load_cache(partial)) == 4
        assert partial.read_text() == "".join(lines[:4])
        resumed = render(run_survey(5, 2, 400, with_rank=True, cache_path=partial, M=3))
        assert resumed == reference
        assert len(load_cache(partial)) == len(lines)

    def test_kill_and_resume(self, tmp_path):
        args = ["--precision", "3", "survey", "--p", "5", "--max-N", "700", "--with-rank", "--jobs", "1",
                "--format", "jsonl"]
        reference = tmp_path / "reference.jsonl"
        assert main(args + ["--no-cache", "--output", str(reference)]) == 0
        cache = tmp_path / "cache.jsonl"
        out = tmp_path / "resumed.jsonl"
        cmd = [sys.executable, "-m", "eismu"] + args + ["--cache", str(cache), "--output", str(out)]
        proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        deadline = time.monotonic() + 60
        while time.monotonic() < deadline:
            if cache.exists() and cache.read_text().count("\n") >= 3:
                break
            time.sleep(0.01)
        proc.kill()
        proc.wait()
        assert not out.exists()
        assert main(args + ["--cache", str(cache), "--output", str(out)]) == 0
        assert out.read_bytes() == reference.read_bytes()

    def test_resume_skips_cached_rows(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        run_survey(5, 2, 200, cache_path=path)
        before = path.read_text()
        run_survey(5, 2, 200, cache_path=path)
        assert path.read_text() == before

    def test_corrupt_cache(self, tmp_path, capsys):
        path = tmp_path / "cache.jsonl"
        run_survey(5, 2, 200, cache_path=path)
        lines = path.read_text().splitlines(keepends=True)
        lines[1] = "{not json\n"
        path.write_text("".join(lines))
        with pytest.raises(CacheCorruptError) as info:
            load_cache(path)
        assert info.value.line_number == 2
        code, _, err = run(capsys, "survey", "--p", "5", "--max-N", "200", "--cache", str(path))
        assert code == 1 and f"{path}:2:" in err

    def test_row_invariants(self):
        with pytest.raises(ValueError):
            SurveyRow(11, 5, 2, True, True, True, 0, 1, None, 0)
        with pytest.raises(ValueError):
            SurveyRow(11, 5, 2, True, False, True, 1, 1, 1, 0)

    def test_row_roundtrip(self):
        row = compute_row(11, 5, 2, True, 3)
        assert SurveyRow.from_json(row.to_json()) == row
        assert (row.rank, row.class_count, row.mu_sum_w2) == (1, 1, 1)

    def test_summary(self):
        rows = run_survey(5, 2, 100)
        summary = summarize(rows)
        assert summary["levels"] == 5 and summary["ranked"] == 0
