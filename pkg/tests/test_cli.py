"""Command-line behavior: every subcommand, exit codes, stream layout."""

import io
import json
import subprocess
import sys

import pytest

from uplan import parse_unified_json
from uplan.cli import main


def write_plan(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def rows_plan(tmp_path, name, rows):
    return write_plan(
        tmp_path, name, f"Operation : Producer->X Cardinality->estimated_rows: {rows}\n"
    )


JOIN_PLAN = (
    "Operation : Join->Hash_Join --children--> { "
    'Operation : Producer->Full_Table_Scan Configuration->name_object: "a", '
    'Operation : Producer->Full_Table_Scan Configuration->name_object: "b" }\n'
)


class TestConvert:
    def test_json_output(self, fixtures, capsys):
        code = main(
            ["convert", "--dialect", "postgresql_text", str(fixtures / "postgresql_text/single_filter_scan.txt")]
        )
        assert code == 0
        out = capsys.readouterr().out
        plan = parse_unified_json(out)
        assert plan.dialect == "postgresql_text"
        assert plan.root.operation.identifier == "Full_Table_Scan"

    def test_text_output(self, fixtures, capsys):
        code = main(
            [
                "convert",
                "--dialect",
                "sqlite_text",
                "--format",
                "text",
                str(fixtures / "sqlite_text/compound_select.txt"),
            ]
        )
        assert code == 0
        assert capsys.readouterr().out.startswith("Operation : Combinator->Compound_Query")

    def test_pretty_output(self, fixtures, capsys):
        code = main(
            [
                "convert",
                "--dialect",
                "sqlite_text",
                "--format",
                "pretty",
                str(fixtures / "sqlite_text/compound_select.txt"),
            ]
        )
        assert code == 0
        assert capsys.readouterr().out.startswith("Combinator->Compound Query\n")

    def test_stdin_dash(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO("`--SCAN t0\n"))
        code = main(["convert", "--dialect", "sqlite_text", "-"])
        assert code == 0
        assert "Full_Table_Scan" in capsys.readouterr().out

    def test_warnings_go_to_stderr(self, capsys):
        path = "-"
        sys_stdin = io.StringIO("`--FROBNICATE t0\n")
        real_stdin = sys.stdin
        sys.stdin = sys_stdin
        try:
            code = main(["convert", "--dialect", "sqlite_text", path])
        finally:
            sys.stdin = real_stdin
        captured = capsys.readouterr()
        assert code == 0
        assert "warning:" in captured.err
        assert "warning:" not in captured.out

    def test_missing_file_is_exit_1(self, capsys):
        code = main(["convert", "--dialect", "sqlite_text", "/no/such/file"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_input_is_exit_2(self, capsys, tmp_path):
        path = write_plan(tmp_path, "bad.txt", "| not | a | header |\n| x | y | z |\n")
        code = main(["convert", "--dialect", "tidb_text", path])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_usage_error_is_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["convert"])
        assert info.value.code == 2


class TestMappingSelection:
    CUSTOM = "sqlite\toperation\tSCAN\tProducer\tCustom_Scan\n"
    OTHER = "sqlite\toperation\tSCAN\tProducer\tOther_Scan\n"

    def test_env_mapping_used(self, capsys, tmp_path, monkeypatch):
        table = write_plan(tmp_path, "map.tsv", self.CUSTOM)
        plan_file = write_plan(tmp_path, "p.txt", "`--SCAN t0\n")
        monkeypatch.setenv("UPLAN_MAPPING", table)
        code = main(["convert", "--dialect", "sqlite_text", plan_file])
        assert code == 0
        assert "Custom_Scan" in capsys.readouterr().out

    def test_flag_beats_env(self, capsys, tmp_path, monkeypatch):
        env_table = write_plan(tmp_path, "env.tsv", self.CUSTOM)
        flag_table = write_plan(tmp_path, "flag.tsv", self.OTHER)
        plan_file = write_plan(tmp_path, "p.txt", "`--SCAN t0\n")
        monkeypatch.setenv("UPLAN_MAPPING", env_table)
        code = main(
            ["convert", "--dialect", "sqlite_text", "--mapping", flag_table, plan_file]
        )
        assert code == 0
        assert "Other_Scan" in capsys.readouterr().out

    def test_broken_mapping_is_exit_2(self, capsys, tmp_path):
        table = write_plan(tmp_path, "map.tsv", "only\tthree\tfields\n")
        plan_file = write_plan(tmp_path, "p.txt", "`--SCAN t0\n")
        code = main(
            ["convert", "--dialect", "sqlite_text", "--mapping", table, plan_file]
        )
        assert code == 2


class TestFingerprint:
    def test_digest_per_path(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        b = write_plan(tmp_path, "b.txt", JOIN_PLAN)
        code = main(["fingerprint", a, b])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        digest_a, path_a = lines[0].split("  ")
        digest_b, _ = lines[1].split("  ")
        assert digest_a == digest_b
        assert len(digest_a) == 64
        assert path_a == a

    def test_policy_none_sees_costs(self, capsys, tmp_path):
        with_cost = write_plan(
            tmp_path, "c.txt", "Operation : Producer->X Cost->cost_total: 5.0\n"
        )
        without = write_plan(tmp_path, "n.txt", "Operation : Producer->X\n")
        main(["fingerprint", with_cost, without])
        default_digests = [
            line.split("  ")[0] for line in capsys.readouterr().out.strip().splitlines()
        ]
        assert default_digests[0] == default_digests[1]
        main(["fingerprint", "--policy", "none", with_cost, without])
        exact_digests = [
            line.split("  ")[0] for line in capsys.readouterr().out.strip().splitlines()
        ]
        assert exact_digests[0] != exact_digests[1]

    def test_policy_file(self, capsys, tmp_path):
        policy = write_plan(
            tmp_path,
            "policy.json",
            json.dumps({"excluded_configuration_identifiers": ["name_object"]}),
        )
        a = write_plan(
            tmp_path, "a.txt", 'Operation : Producer->X Configuration->name_object: "t0"\n'
        )
        b = write_plan(
            tmp_path, "b.txt", 'Operation : Producer->X Configuration->name_object: "t1"\n'
        )
        code = main(["fingerprint", "--policy", policy, a, b])
        assert code == 0
        digests = [
            line.split("  ")[0] for line in capsys.readouterr().out.strip().splitlines()
        ]
        assert digests[0] == digests[1]

    def test_unknown_policy_key_is_exit_2(self, capsys, tmp_path):
        policy = write_plan(tmp_path, "policy.json", '{"surprise": 1}')
        plan = write_plan(tmp_path, "a.txt", "Operation : Producer->X\n")
        assert main(["fingerprint", "--policy", policy, plan]) == 2


class TestCert:
    def test_violation_is_exit_3(self, capsys, tmp_path):
        base = rows_plan(tmp_path, "base.txt", 100)
        restricted = rows_plan(tmp_path, "restricted.txt", 150)
        code = main(["cert", base, restricted])
        assert code == 3
        verdict = json.loads(capsys.readouterr().out)
        assert verdict["violation"] is True
        assert verdict["ratio"] == 1.5

    def test_pass_is_exit_0(self, tmp_path, capsys):
        base = rows_plan(tmp_path, "base.txt", 100)
        restricted = rows_plan(tmp_path, "restricted.txt", 90)
        assert main(["cert", base, restricted]) == 0
        assert json.loads(capsys.readouterr().out)["violation"] is False

    def test_tolerance_flag(self, tmp_path, capsys):
        base = rows_plan(tmp_path, "base.txt", 100)
        restricted = rows_plan(tmp_path, "restricted.txt", 110)
        assert main(["cert", "--tolerance", "0.1", base, restricted]) == 0
        capsys.readouterr()

    def test_inconclusive_is_exit_2(self, tmp_path, capsys):
        base = write_plan(tmp_path, "base.txt", "Operation : Producer->X\n")
        restricted = rows_plan(tmp_path, "restricted.txt", 5)
        code = main(["cert", base, restricted])
        assert code == 2
        assert "inconclusive" in capsys.readouterr().err


class TestMetrics:
    def test_tsv_layout(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        b = write_plan(tmp_path, "b.txt", "Operation : Producer->X\n")
        code = main(["metrics", a, b])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        header = lines[0].split("\t")
        assert header[0] == "plan"
        assert header[-1] == "total"
        assert "Producer" in header
        row_a = lines[1].split("\t")
        assert row_a[0] == a
        assert row_a[-1] == "3"
        assert lines[-2].split("\t")[0] == "mean"
        variance_label, variance = lines[-1].split("\t")
        assert variance_label == "producer_variance"
        assert float(variance) == 0.25

    def test_figure_written(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        figure = tmp_path / "chart.png"
        code = main(["metrics", "--figure", str(figure), a])
        assert code == 0
        assert figure.exists()
        assert figure.stat().st_size > 0
        assert "figure written" in capsys.readouterr().err


class TestDiff:
    def test_json_report(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        b = write_plan(tmp_path, "b.txt", "Operation : Producer->X\n")
        code = main(["diff", a, b])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["category_deltas"]["Producer"] == 1
        assert doc["category_deltas"]["Join"] == 1
        assert doc["producer_objects_a"] == {"a": 1, "b": 1}


class TestRender:
    def test_dot_to_stdout(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        code = main(["render", a])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph plan {")
        assert out.count(" -> ") == 2

    def test_html_to_file(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        target = tmp_path / "plan.html"
        code = main(["render", "--format", "html", "--out", str(target), a])
        assert code == 0
        assert target.read_text().startswith("<!DOCTYPE html>")
        assert capsys.readouterr().out == ""

    def test_render_options_pass_through(self, capsys, tmp_path):
        a = write_plan(tmp_path, "a.txt", JOIN_PLAN)
        code = main(["render", "--no-properties", "--no-color", a])
        assert code == 0
        out = capsys.readouterr().out
        assert "name object" not in out
        assert "#e6d5f7" not in out


def test_pipe_composition(fixtures):
    convert = subprocess.run(
        [
            sys.executable,
            "-m",
            "uplan.cli",
            "convert",
            "--dialect",
            "postgresql_text",
            str(fixtures / "postgresql_text/single_filter_scan.txt"),
        ],
        capture_output=True,
        text=True,
    )
    assert convert.returncode == 0, convert.stderr
    fingerprint = subprocess.run(
        [sys.executable, "-m", "uplan.cli", "fingerprint", "-"],
        input=convert.stdout,
        capture_output=True,
        text=True,
    )
    assert fingerprint.returncode == 0, fingerprint.stderr
    digest = fingerprint.stdout.split("  ")[0]
    assert len(digest) == 64
    int(digest, 16)
