import json
import random

import pytest

from sandfix import cli, fastfix
from sandfix.cli import main, parse_configuration
from sandfix.errors import ConfigurationSyntaxError, InvariantViolation


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "text, expected",
    [("3, 2, 2, 1", (3, 2, 2, 1)), ("8", (8,)), ("3 2\n1", (3, 2, 1)), ("  ", ()), ("4,0,0", (4, 0, 0))],
)
def test_parse_configuration(text, expected):
    assert parse_configuration(text).heights == expected


@pytest.mark.parametrize("text", ["3 -1", "3,,2", "3,2,", "x", "2.5", "+3"])
def test_parse_configuration_rejects(text):
    with pytest.raises(ConfigurationSyntaxError):
        parse_configuration(text)


def test_fixpoint_merge_single_pile(capsys):
    code, out, _ = run(capsys, "fixpoint", "--model", "spm", "--algo", "merge", "--input", "8")
    assert code == 0
    assert "fixpoint: 3,2,2,1" in out
    assert "transient: 9" in out


def test_orbit_lattice_check(capsys):
    code, out, _ = run(capsys, "orbit", "--model", "spm", "--mode", "seq", "--input", "8", "--check-lattice")
    assert code == 0
    assert "lattice: true; vertices: 13" in out
    assert "characterization: true" in out


def test_fixpoint_comb(capsys):
    code, out, _ = run(capsys, "fixpoint", "--algo", "merge", "--input", "7,0,0,0,7,0,0,0,7,0,0,0,7")
    assert code == 0
    line = next(l for l in out.splitlines() if l.startswith("fixpoint:"))
    assert line.split(": ")[1].startswith("3,2,1,1,3,2,1,1")


def test_json_schema_and_round_trip(capsys):
    code, out, _ = run(capsys, "fixpoint", "--algo", "merge", "--input", "5,0,9,1", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"fixpoint", "transient", "iterations", "merges"}
    assert parse_configuration(",".join(map(str, payload["fixpoint"]))) == fastfix.run_fast_spm((5, 0, 9, 1)).fixpoint

    code, out, _ = run(capsys, "fixpoint", "--algo", "fast", "--input", "5,0,9,1", "--format", "json")
    assert json.loads(out)["transient"] is None


def test_naive_and_merge_print_identical_fixpoints(capsys):
    rng = random.Random(11)
    for _ in range(25):
        text = ",".join(str(rng.randint(0, 9)) for _ in range(rng.randint(0, 12)))
        outs = []
        for algo in ("naive", "merge"):
            code, out, _ = run(capsys, "fixpoint", "--algo", algo, "--input", text, "--format", "json")
            assert code == 0
            outs.append(json.loads(out))
        assert outs[0]["fixpoint"] == outs[1]["fixpoint"]
        assert outs[0]["transient"] == outs[1]["transient"]


def test_invalid_configuration_exit_code(capsys):
    code, _, err = run(capsys, "fixpoint", "--input", "3 -1")
    assert code == 2
    assert "invalid configuration" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["fixpoint", "--model", "ipm", "--input", "5"],
        ["fixpoint", "--model", "ipm", "--k", "2", "--algo", "merge", "--input", "5"],
        ["fixpoint", "--k", "2", "--input", "5"],
        ["simulate", "--model", "ipm", "--k", "1", "--mode", "par", "--input", "5"],
        ["orbit", "--input", "40", "--max-vertices", "5"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_argparse_errors_exit_with_usage_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fixpoint", "--bogus"])
    assert exc.value.code == 1


def test_internal_error_exit_code(capsys, monkeypatch):
    def boom(c):
        raise InvariantViolation("forced")

    monkeypatch.setattr(cli.fastfix, "run_fast_spm", boom)
    code, _, err = run(capsys, "fixpoint", "--input", "8")
    assert code == 3 and "internal error" in err


def test_ipm_naive_fixpoint(capsys):
    code, out, _ = run(capsys, "fixpoint", "--model", "ipm", "--k", "2", "--algo", "naive", "--input", "6")
    assert code == 0 and out.startswith("fixpoint:")


def test_file_input_and_out(tmp_path, capsys):
    src = tmp_path / "c.txt"
    src.write_text("7, 0, 0, 0\n")
    dest = tmp_path / "out.json"
    code, out, _ = run(capsys, "fixpoint", "--file", str(src), "--format", "json", "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["fixpoint"] == [3, 2, 1, 1]


def test_orbit_dot(tmp_path, capsys):
    dest = tmp_path / "g.dot"
    code, out, _ = run(capsys, "orbit", "--input", "8", "--format", "dot", "--out", str(dest), "--check-lattice")
    assert code == 0
    dot = dest.read_text()
    assert dot.startswith("digraph") and '[label="3,2,2,1"]' in dot
    assert dot.count("->") == 15
    assert "lattice: true; vertices: 13" in out


def test_orbit_parallel_and_general_root(capsys):
    code, out, _ = run(capsys, "orbit", "--input", "8", "--mode", "par")
    assert "vertices: 8" in out
    code, out, _ = run(capsys, "orbit", "--input", "2,5", "--format", "json")
    payload = json.loads(out)
    assert "characterization: n/a" in payload["summary"]


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--input", "8", "--mode", "par", "--trajectory")
    assert out.splitlines() == ["8", "7,1", "6,2", "5,2,1", "4,3,1", "4,2,2", "3,3,1,1", "3,2,2,1"]
    code, out, _ = run(capsys, "simulate", "--input", "8", "--format", "json")
    assert json.loads(out) == {"fixpoint": [3, 2, 2, 1], "steps": 9}


def test_gen(capsys):
    code, out, _ = run(capsys, "gen", "--kind", "comb", "--n", "14")
    assert out.strip() == "7,0,0,0,7"
    code, out, _ = run(capsys, "gen", "--kind", "random", "--n", "9", "--l", "3", "--seed", "42", "--format", "json")
    assert len(json.loads(out)) == 3


def test_bench(tmp_path, capsys):
    ratios = tmp_path / "ratios.csv"
    code, out, _ = run(
        capsys, "bench", "--generators", "single,comb", "--sizes", "70,140", "--repetitions", "1",
        "--ratio-out", str(ratios),
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "generator,l,n,algorithm,wall_ns,steps,iterations,merges,checksum"
    assert len(lines) == 1 + 2 * 2 * 3
    assert ratios.read_text().startswith("generator,l,n,naive-seq_ns,fast-merge_ns,ratio")


def test_bench_rejects_unknown_generator(capsys):
    code, _, err = run(capsys, "bench", "--generators", "nope")
    assert code == 1
