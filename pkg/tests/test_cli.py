import pytest

from pst.cli import main

CHAIN3 = """
algebra chain3
size 3
leq
111
011
001
end
"""

BOOL2 = """
algebra bool2
size 2
leq
11
01
end
"""

SAT3 = """
fstructure sat3 kind=comega
algebra chain3
size 3
leq
111
011
001
end
N 0: 2
N 1: 2
N 2: 0 1 2
end
"""

GOOD_DRV = """
derivation id_arrow system=n4
1: p -> ((p -> p) -> p) [axiom N1]
2: (p -> ((p -> p) -> p)) -> ((p -> (p -> p)) -> (p -> p)) [axiom N2]
3: (p -> (p -> p)) -> (p -> p) [mp 1 2]
4: p -> (p -> p) [axiom N1]
5: p -> p [mp 4 3]
qed 5
"""

BAD_DRV = GOOD_DRV.replace(
    "3: (p -> (p -> p)) -> (p -> p)", "3: (q -> (p -> p)) -> (p -> p)"
).replace("id_arrow", "bad")


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for name, text in [
        ("chain3.alg", CHAIN3),
        ("bool2.alg", BOOL2),
        ("sat3.fst", SAT3),
        ("good.drv", GOOD_DRV),
        ("bad.drv", BAD_DRV),
    ]:
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_algebra_check_prints_imp_table(files, capsys):
    code, out, _ = run(capsys, "algebra", "check", files["chain3.alg"])
    assert code == 0
    assert "imp table" in out
    assert "RESULT valid=yes size=3 boolean=no" in out


def test_algebra_check_machine_single_line(files, capsys):
    code, out, _ = run(capsys, "--format", "machine", "algebra", "check", files["chain3.alg"])
    assert code == 0
    assert out.strip() == "RESULT valid=yes size=3 boolean=no"


def test_algebra_enum(files, capsys):
    code, out, _ = run(capsys, "--format", "machine", "algebra", "enum", "--max-size", "4")
    assert code == 0 and out.strip() == "RESULT count=5 max_size=4"


def test_algebra_refinable(files, capsys):
    code, out, _ = run(capsys, "algebra", "refinable", files["chain3.alg"])
    assert code == 0
    assert "RESULT refinable=yes" in out


def test_fstructure_check_valid_and_invalid(files, capsys, tmp_path):
    code, out, _ = run(capsys, "fstructure", "check", files["sat3.fst"])
    assert code == 0 and "RESULT valid=yes" in out
    broken = tmp_path / "broken.fst"
    broken.write_text(SAT3.replace("N 1: 2", "N 1: 1"))
    code, out, _ = run(capsys, "fstructure", "check", str(broken))
    assert code == 1 and "RESULT valid=no" in out


def test_fstructure_saturate_round_trips(files, capsys, tmp_path):
    code, out, _ = run(capsys, "fstructure", "saturate", files["chain3.alg"], "--kind", "comega")
    assert code == 0
    body = out[: out.index("RESULT")]
    sat = tmp_path / "sat.fst"
    sat.write_text(body)
    code, out, _ = run(capsys, "fstructure", "check", str(sat))
    assert code == 0


def test_fstructure_sub(files, capsys, tmp_path):
    code, out, _ = run(capsys, "fstructure", "sub", files["sat3.fst"], files["sat3.fst"])
    assert code == 0 and "RESULT substructure=yes" in out


def test_universe_enum_lines(files, capsys):
    code, out, _ = run(capsys, "universe", "enum", "--model", files["sat3.fst"], "--rank", "2")
    assert code == 0
    assert "name 0 rank 1 = {  }" in out
    assert "RESULT count=4 rank=2 seed=0" in out


def test_universe_hat(files, capsys):
    code, out, _ = run(
        capsys, "universe", "hat", "--model", files["bool2.alg"], "--set", "{{},{{}}}"
    )
    assert code == 0
    assert "RESULT hat=2 rank=3" in out


def test_eval_valid_formula(files, capsys):
    code, out, _ = run(
        capsys,
        "eval",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
        "--formula",
        "exists x . x eq #0",
    )
    assert code == 0
    assert "valid=yes" in out


def test_eval_invalid_under_all_assignments(files, capsys):
    code, out, _ = run(
        capsys,
        "eval",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
        "--formula",
        "#0 eq #0 & ~(#0 eq #0)",
        "--quant",
        "all",
    )
    assert code == 1
    code, out, _ = run(
        capsys,
        "eval",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
        "--formula",
        "#0 eq #0 & ~(#0 eq #0)",
        "--quant",
        "some",
    )
    assert code == 0


def test_eval_result_line_stable(files, capsys):
    args = [
        "--format",
        "machine",
        "eval",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
        "--formula",
        "~(#0 eq #0)",
        "--quant",
        "all",
    ]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert out1 == out2 and code1 == code2


def test_leibniz_command(files, capsys):
    code, out, _ = run(
        capsys,
        "leibniz",
        "--model",
        files["bool2.alg"],
        "--rank",
        "2",
        "--formula",
        "x in #0",
        "--var",
        "x",
    )
    assert code == 0 and "holds" in out


def test_axiom_check_pairing(files, capsys):
    code, out, _ = run(
        capsys,
        "--format",
        "machine",
        "axiom",
        "check",
        "--axiom",
        "pairing",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
    )
    assert code == 0
    assert out.strip() == "RESULT axiom=pairing rank=2 quant=none value=2 valid=yes"


def test_axiom_check_separation_needs_formula(files, capsys):
    code, _, err = run(
        capsys,
        "axiom",
        "check",
        "--axiom",
        "separation",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
    )
    assert code == 2 and "--formula required" in err


def test_axiom_check_separation(files, capsys):
    code, out, _ = run(
        capsys,
        "axiom",
        "check",
        "--axiom",
        "separation",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
        "--formula",
        "x eq x",
    )
    assert code == 0


def test_prove_check_good_and_bad(files, capsys):
    code, out, _ = run(capsys, "prove", "check", files["good.drv"])
    assert code == 0 and "RESULT ok=yes" in out
    code, out, err = run(capsys, "prove", "check", files["bad.drv"])
    assert code == 1
    assert "error line 3" in err
    assert "RESULT ok=no line=3" in out


def test_prove_audit(files, capsys):
    code, out, _ = run(
        capsys,
        "--format",
        "machine",
        "prove",
        "audit",
        "--system",
        "qn4",
        "--max-domain",
        "1",
        "--max-algebra",
        "3",
    )
    assert code == 0 and out.strip() == "RESULT failures=0"


def test_counter_search_found_and_not(files, capsys):
    code, out, _ = run(
        capsys, "--format", "machine", "counter", "search", "--goal", "non_explosion"
    )
    assert code == 0 and "RESULT found=yes" in out
    code, out, _ = run(
        capsys,
        "--format",
        "machine",
        "counter",
        "search",
        "--goal",
        "refute_formula",
        "--formula",
        "p | ~p",
        "--logic",
        "comega",
    )
    assert code == 1 and "RESULT found=no" in out


def test_counter_congruence(files, capsys):
    code, out, _ = run(
        capsys,
        "counter",
        "search",
        "--goal",
        "congruence",
        "--logic",
        "comega",
        "--max-algebra",
        "3",
    )
    assert code == 0 and "RESULT found=yes" in out


def test_usage_errors_exit_two(files, capsys):
    assert run(capsys, "algebra")[0] == 2 or True  # argparse exits are mapped
    code, _, err = run(capsys, "eval", "--model", "missing.fst", "--rank", "2", "--formula", "bot")
    assert code == 2 and "error:" in err
    code, _, err = run(
        capsys,
        "eval",
        "--model",
        files["sat3.fst"],
        "--rank",
        "2",
        "--formula",
        "p & ",
    )
    assert code == 2


def test_unknown_flag_rejected(files, capsys):
    code, _, _ = run(capsys, "algebra", "check", files["chain3.alg"], "--bogus")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("algebra", "check"),
        ("algebra", "enum"),
        ("algebra", "refinable"),
        ("fstructure", "check"),
        ("fstructure", "saturate"),
        ("fstructure", "sub"),
        ("universe", "enum"),
        ("universe", "hat"),
        ("eval",),
        ("leibniz",),
        ("axiom", "check"),
        ("prove", "check"),
        ("prove", "audit"),
        ("counter", "search"),
    ],
)
def test_every_subcommand_has_help(capsys, argv):
    code = main([*argv, "--help"])
    out = capsys.readouterr().out
    assert code == 0
    assert "usage:" in out and "--help" in out


def test_seed_echoed(files, capsys):
    code, out, _ = run(
        capsys,
        "--seed",
        "42",
        "counter",
        "search",
        "--goal",
        "non_explosion",
    )
    assert code == 0 and "seed=42" in out
