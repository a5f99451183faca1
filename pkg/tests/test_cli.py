import json
import subprocess
import sys

import pytest

from exactss.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, page_table
from exactss.decalage import random_filtered_instance
from exactss.modelio import dumps


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def tsv_rows(text):
    return [line.split("\t") for line in text.splitlines() if line and not line.startswith("#")]


def test_pages_worked_fixture(fixtures, capsys):
    code, out, _ = run(["pages", str(fixtures / "worked_bicomplex.json")], capsys)
    assert code == EXIT_OK
    rows = tsv_rows(out)
    assert rows[0] == ["r", "p", "q", "group", "d_r", "stable"]
    assert ["1", "0", "0", "Z", "Z", "no"] in rows
    assert ["2", "1", "0", "Z/2", "-", "yes"] in rows


def test_pages_conventions_differ_by_sign_of_q(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(dumps(random_filtered_instance(11).filtered))
    _, ce, _ = run(["pages", str(path), "--format", "json"], capsys)
    _, bk, _ = run(["pages", str(path), "--format", "json", "--convention", "bk"], capsys)
    ce, bk = json.loads(ce), json.loads(bk)
    for P, Q in zip(ce["pages"], bk["pages"]):
        flipped = sorted((r["p"], -r["q"], r["group"]["text"], r["stable"]) for r in P["rows"])
        assert flipped == sorted((r["p"], r["q"], r["group"]["text"], r["stable"])
                                 for r in Q["rows"])


def test_pages_json_is_deterministic(fixtures, capsys):
    argv = ["pages", str(fixtures / "bar_c2.json"), "--format", "json"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b and json.loads(a)["command"] == "pages"


def test_empty_model_gives_empty_table(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"schema": 1, "type": "filtered_complex", "lo": 0, "ranks": [],
                                "pmin": 0, "pmax": 0}))
    code, out, _ = run(["pages", str(path)], capsys)
    assert code == EXIT_OK and len(tsv_rows(out)) == 1


def test_decalage_passes_and_r_max_one_checks_first_page(fixtures, capsys):
    path = str(fixtures / "worked_bicomplex.json")
    code, out, _ = run(["decalage", path], capsys)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"] and rep["checked"] > 0
    code, out, _ = run(["decalage", path, "--r-max", "1"], capsys)
    assert code == EXIT_OK and json.loads(out)["pages_checked"] == [1]


def test_decalage_corrupted_fixture(fixtures, capsys):
    code, out, _ = run(["decalage", str(fixtures / "worked_corrupted_dec.json")], capsys)
    rep = json.loads(out)
    assert code == EXIT_FAIL and not rep["passed"]
    assert rep["counterexample"]["r"] >= 1


@pytest.mark.parametrize("fixture", ["bar_c2.json", "bar_c3_mod3.json", "constant.json"])
def test_tot_and_cube_agree(fixtures, capsys, fixture):
    path = str(fixtures / fixture)
    outs = []
    for argv in (["tot", path], ["cube", path], ["cube", path, "--strategy", "recursive"]):
        code, out, _ = run(argv, capsys)
        assert code == EXIT_OK
        outs.append(out.splitlines()[1:])
    assert outs[0] == outs[1] == outs[2]


def test_tot_bar_c2(fixtures, capsys):
    code, out, _ = run(["tot", str(fixtures / "bar_c2.json"), "--n", "3"], capsys)
    rows = dict(tsv_rows(out)[1:])
    assert code == EXIT_OK
    assert rows["0"] == "Z" and rows["1"] == "0" and rows["2"] == "Z/2"


def test_demo_group_cohomology(capsys):
    code, out, _ = run(["demo", "group-cohomology", "--group", "C3", "--top", "4"], capsys)
    rows = dict(tsv_rows(out)[1:])
    assert code == EXIT_OK
    assert [rows[k] for k in "0123"] == ["Z", "0", "Z/3", "0"]
    code, out, _ = run(["demo", "group-cohomology", "--group", "V4", "--coeff", "Z/2",
                        "--top", "4", "--format", "json"], capsys)
    groups = [row["group"]["text"] for row in json.loads(out)["cohomology"]]
    assert groups == ["Z/2", "Z/2 + Z/2", "Z/2 + Z/2 + Z/2"]


def test_demo_worked_bicomplex(capsys):
    code, out, _ = run(["demo", "worked-bicomplex"], capsys)
    assert code == EXIT_OK and "Z/2" in out


@pytest.mark.parametrize("argv", [
    ["demo", "group-cohomology", "--coeff", "Z/1"],
    ["demo", "group-cohomology", "--group", "C7"],
    ["verify", "--trials", "-1"],
    ["pages", "/nonexistent/model.json"],
])
def test_bad_arguments_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == EXIT_INPUT and err.startswith("error:")


def test_r_max_must_be_positive(fixtures, capsys):
    code, _, err = run(["pages", str(fixtures / "worked_bicomplex.json"), "--r-max", "0"], capsys)
    assert code == EXIT_INPUT and "--r-max" in err


def test_tot_rejects_level_out_of_range(fixtures, capsys):
    code, _, err = run(["tot", str(fixtures / "bar_c2.json"), "--n", "99"], capsys)
    assert code == EXIT_INPUT


def test_verify_is_deterministic(capsys):
    argv = ["verify", "--seed", "7", "--trials", "5", "--format", "json"]
    code, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert code == EXIT_OK and a == b
    rep = json.loads(a)
    assert rep["passed"] and len(rep["trials"]) == 5


def test_verify_transcript(capsys):
    code, out, _ = run(["verify", "--seed", "1", "--trials", "3", "--size", "3"], capsys)
    assert code == EXIT_OK and out.rstrip().endswith("PASS: 3/3 trials passed")


def test_page_table_marks_stabilization():
    table = page_table(random_filtered_instance(4).filtered)
    assert table["r_max"] >= 1 and table["stabilization"]


def test_module_entry_point(fixtures):
    proc = subprocess.run([sys.executable, "-m", "exactss", "pages",
                           str(fixtures / "worked_bicomplex.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "Z/2" in proc.stdout
