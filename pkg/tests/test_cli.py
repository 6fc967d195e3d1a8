import json
import subprocess
import sys

import pytest

from genlr import data_path
from genlr.cli import main

SAMPLE = data_path("sample.gram")
BACKBONE = data_path("backbone.gram")


@pytest.fixture(scope="module")
def auto_tables(tmp_path_factory):
    path = tmp_path_factory.mktemp("tbl") / "sample.tbl"
    assert main(["compile-gen", SAMPLE, "--auto", "--max-budget", "8", "-o", str(path)]) == 0
    return str(path)


def test_compile_parse(capsys):
    assert main(["compile-parse", BACKBONE]) == 0
    out = capsys.readouterr().out
    assert "State 12" in out and "acc" in out


def test_compile_parse_table_only(capsys):
    assert main(["compile-parse", BACKBONE, "--table-only"]) == 0
    out = capsys.readouterr().out
    assert "State" not in out and len(out.strip().splitlines()) == 13


def test_parse(capsys):
    assert main(["parse", SAMPLE, "John", "sleeps", "?"]) == 0
    assert capsys.readouterr().out.strip() == "mod(sleep(john),ynq)\trules 1 2 5"


def test_parse_rejected(capsys):
    assert main(["parse", SAMPLE, "sleeps", "John"]) == 1


def test_parse_unknown_word(capsys):
    assert main(["parse", SAMPLE, "John", "snores"]) == 1
    assert "unknown word" in capsys.readouterr().err


def test_invert(capsys):
    assert main(["invert", SAMPLE]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 15
    assert "(7,13) <PP, in(V1), [in|V2], V3, e, e> -> <NP, V1, V2, V3, e, e>" in lines


def test_generate_end_to_end(auto_tables, capsys):
    assert main(["generate", "--tables", auto_tables, "--lf", "mod(sleep(john),ynq)", "--stats"]) == 0
    out = capsys.readouterr()
    assert out.out == "John sleeps ?\n"
    assert "backtracks=0" in out.err


def test_generate_nothing(auto_tables, capsys):
    assert main(["generate", "--tables", auto_tables, "--lf", "john"]) == 1


def test_malformed_term(auto_tables, capsys):
    assert main(["generate", "--tables", auto_tables, "--lf", "mod(sleep(john)"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("genlr: malformed term") and len(err.strip().splitlines()) == 1


def test_missing_file(capsys):
    assert main(["generate", "--tables", "/nonexistent.tbl", "--lf", "john"]) == 2
    assert main(["invert", "/nonexistent.gram"]) == 2


def test_shdg_generate(capsys):
    assert main(["shdg-generate", SAMPLE, "--lf", "sleep(john)", "--stats"]) == 0
    out = capsys.readouterr()
    assert out.out == "John sleeps\n" and out.err.startswith("applications=")


def test_compile_gen_to_stdout(capsys):
    assert main(["compile-gen", SAMPLE, "--fixed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "descend 00001 mod(_,_) 00002" in lines
    assert "state 00001 0" in lines and "top S" in lines


def test_bad_depth(capsys):
    assert main(["compile-gen", SAMPLE, "--fixed", "-1"]) == 2


def test_env_budget(monkeypatch, capsys):
    monkeypatch.setenv("GENLR_MAX_BUDGET", "many")
    assert main(["compile-gen", SAMPLE, "--auto"]) == 2


def test_examples_mode(tmp_path, capsys):
    corpus = tmp_path / "c.lfs"
    corpus.write_text("mod(sleep(john),ynq)\n")
    out = tmp_path / "ex.tbl"
    assert main(["compile-gen", SAMPLE, "--examples", str(corpus), "-o", str(out)]) == 0
    assert main(["generate", "--tables", str(out), "--lf", "mod(sleep(mary),ynq)"]) == 0
    assert capsys.readouterr().out.endswith("Mary sleeps ?\n")


def test_optimize_json(capsys):
    assert main(["optimize", SAMPLE, "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["optimized"]["max_reductions"] == 1
    assert data["baseline"]["max_reductions"] >= 2


def test_compare_csv(auto_tables, tmp_path, capsys):
    corpus = tmp_path / "c.lfs"
    corpus.write_text("mod(sleep(john),ynq)\nsee(mary,john)\n")
    assert main(["compare", SAMPLE, "--tables", auto_tables, "--corpus", str(corpus), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and lines[1].endswith(",yes")


def test_report(auto_tables, capsys):
    assert main(["report", "--tables", auto_tables, "--states", "1", "2"]) == 0
    out = capsys.readouterr().out
    assert "State 1" in out and out.strip().endswith("deterministic")
    assert main(["report", "--tables", auto_tables, "--states", "9999"]) == 2


def test_report_json(auto_tables, capsys):
    assert main(["report", "--tables", auto_tables, "--format", "json"]) == 0
    assert set(json.loads(capsys.readouterr().out).values()) == {1}


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "genlr", "shdg-generate", SAMPLE, "--lf", "sleep(mary)"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "Mary sleeps\n"
