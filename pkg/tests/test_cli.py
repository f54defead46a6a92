import csv
import json
import subprocess
import sys

from polyerg import cli, gallery


def run_json(argv, capsys):
    code, _ = cli.run(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_classify_json(capsys):
    code, rep, _ = run_json(["classify", "n", "2*n", "n^2"], capsys)
    assert code == 0
    r = rep["result"]
    assert (r["weyl_complexity"], r["family_type"], r["smallest_factor"], r["lower_bound_exceptional"]) == \
        (3, "E2", "Affine2", True)
    assert rep["schema"] and rep["provenance"]["config_hash"] and rep["config"]["params"]["polynomials"]
    assert "wall_time_s" not in rep["provenance"]


def test_argument_errors(capsys):
    code, rep, err = run_json(["classify", "n", "n+1", "n^2"], capsys)
    assert code == 2 and rep is None and "not essentially distinct" in err
    code, _, err = run_json(["classify", "--bogus", "n"], capsys)
    assert code == 2 and "usage" in err
    code, _, _ = run_json(["nonsense"], capsys)
    assert code == 2
    code, _, err = run_json(["classify", "n", "n^"], capsys)
    assert code == 2


def test_deterministic_output(tmp_path):
    path = tmp_path / "report.json"
    texts = []
    for _ in range(2):
        assert cli.main(["counterexample", "--construction", "ii", "--N", "12", "--n-max", "10",
                         "--out", str(path)]) == 0
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]


def test_identical_stdout(capsys):
    outs = []
    for _ in range(2):
        cli.run(["simulate", "--family", "n", "n^2", "--chars", "1;1", "--N", "5000"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_timing_flag(capsys):
    _, rep, _ = run_json(["classify", "n", "n^2", "--timing"], capsys)
    assert "wall_time_s" in rep["provenance"]


def test_verify_limit_and_csv(tmp_path, capsys):
    ini = tmp_path / "skew.ini"
    ini.write_text("[map]\nmatrix = 0,0; 2,0\ntranslation = sqrt2, sqrt2\n\n"
                   "[run]\nfamily = n 2*n 2*n^2+n\nchars = 0,1;0,1;0,-1\nx0 = sqrt3, sqrt5\nN = 20000\n")
    out_csv = tmp_path / "series.csv"
    code, rep, _ = run_json(["verify-limit", "--config", str(ini), "--csv", str(out_csv),
                             "--checkpoints", "100,1000"], capsys)
    assert code == 0 and rep["result"]["passed"]
    assert rep["config"]["map"]["matrix"] == "0,0; 2,0"
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["n_or_N", "empirical_re", "empirical_im", "analytic_re", "analytic_im", "abs_error"]
    assert [r[0] for r in rows[1:]] == ["100", "1000", "20000"]
    for r in rows[1:]:
        for cell in r[1:]:
            assert cell == f"{float(cell):.12g}"
    # an impossible tolerance is a verification failure
    code, rep, _ = run_json(["verify-limit", "--config", str(ini), "--tolerance", "0"], capsys)
    assert code == 3 and not rep["verification_passed"]


def test_seed_env_override(tmp_path, capsys, monkeypatch):
    ini = tmp_path / "c.ini"
    ini.write_text("[run]\nseed = 11\n")
    _, rep, _ = run_json(["classify", "n", "n^2", "--config", str(ini)], capsys)
    assert rep["config"]["seed"] == 11 and rep["config"]["seed_source"] == "config"
    monkeypatch.setenv("POLYERG_SEED", "99")
    _, rep, _ = run_json(["classify", "n", "n^2", "--config", str(ini)], capsys)
    assert rep["config"]["seed"] == 99 and rep["config"]["seed_source"] == "env"


def test_config_unknown_key(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[run]\nwarp = 9\n")
    code, _, err = run_json(["classify", "n", "n^2", "--config", str(ini)], capsys)
    assert code == 2 and "warp" in err


def test_congruence_cli(capsys):
    code, rep, _ = run_json(["congruence", "n^2-2"], capsys)
    assert code == 0 and rep["result"]["status"] == "UnsolvableWitness" and rep["result"]["witness_modulus"] == 4
    code, rep, _ = run_json(["congruence", "--joint", "2*n", "3*n", "n+1", "--prime-bound", "20"], capsys)
    assert code == 0 and rep["result"]["witness_modulus"] == 2
    code, rep, _ = run_json(["congruence", "--joint", "n^2+1", "n^2+2"], capsys)
    # coprime members always have a finite obstruction: here n would need both parities
    assert code == 0 and rep["result"]["status"] == "UnsolvableWitness" and rep["result"]["witness_modulus"] == 2
    code, rep, _ = run_json(["congruence", "n^2-17", "--cross-check", "--exp-cap", "8"], capsys)
    assert code == 0 and all(rep["result"]["cross_check"].values())


def test_restricted_weighted_extremal(capsys):
    code, rep, _ = run_json(["restricted", "--N", "200000"], capsys)
    assert code == 0 and rep["result"]["result"]["count"] > 0
    code, rep, _ = run_json(["restricted", "--N", "200000", "--epsilon", "-0.5"], capsys)
    assert code == 3
    code, rep, _ = run_json(["weighted", "--family", "n^2", "2*n^2", "--chars", "2;-1", "--beta", "sqrt2",
                             "--h", "indicator:1/4,3/4", "--N", "100000"], capsys)
    assert code == 0 and rep["result"]["hypothesis_holds"]
    code, rep, _ = run_json(["extremal", "--equation", "1,1,-2", "--N", "9"], capsys)
    assert code == 0 and rep["result"]["set"]["size"] == 5
    code, rep, _ = run_json(["extremal", "--equation", "1,1,-2", "--N", "100", "--mode", "behrend"], capsys)
    assert code == 0 and rep["result"]["set"]["verified"]
    code, _, err = run_json(["extremal", "--equation", "1,8,-6,-3", "--N", "100"], capsys)
    assert code == 2 and "greedy" in err


def test_gallery(capsys, monkeypatch):
    code, rep, _ = run_json(["gallery"], capsys)
    assert code == 0 and not rep["result"]["mismatches"]
    assert {row["case"] for row in rep["result"]["classification"]} == {"a", "b", "c", "d", "e1", "e2"}
    broken = list(gallery.CLASSIFICATION_GOLDENS)
    broken[0] = ("a", ("n", "n^2", "n^3"), {"smallest_factor": "Nil2"})
    monkeypatch.setattr(gallery, "CLASSIFICATION_GOLDENS", broken)
    code, rep, err = run_json(["gallery"], capsys)
    assert code == 3 and "classify a" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polyerg.cli", "classify", "n", "n^2", "n^3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["smallest_factor"] == "KRat"


def test_config_bad_basis_is_argument_error(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[basis]\nfoo = pi ; inline comments are not stripped\n")
    code, _, err = run_json(["classify", "n", "n^2", "--config", str(ini)], capsys)
    assert code == 2 and "foo" in err
