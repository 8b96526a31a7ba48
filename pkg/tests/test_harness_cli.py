import csv
import io
import json

import pytest

from conicmin import cli, harness
from conicmin.errors import ParseError


def poly(n, mons):
    return {"kind": "polynomial", "vars": n, "monomials": [{"coef": c, "exps": e} for c, e in mons]}


NORM2 = poly(2, [("1", [2, 0]), ("1", [0, 2])])


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_minimize_examples():
    rec = harness.cmd_minimize({"objective": NORM2, "domain": {"radius": "3"}}, verify=True)
    assert rec["status"] == "OPTIMAL" and rec["point"] == ["0", "0"] and rec["verify"]["ok"]
    spec = {"objective": NORM2, "constraints": [poly(2, [("1", [0, 0]), ("-1", [1, 0])])],
            "domain": {"radius": "5"}}
    rec = harness.cmd_minimize(spec, verify=True)
    assert rec["point"] == ["1", "0"] and rec["verify"]["ok"]
    spec = {"objective": NORM2, "constraints": [poly(2, [("1", [2, 0]), ("1", [0, 0])])],
            "domain": {"radius": "4"}}
    assert harness.cmd_minimize(spec)["status"] == "INFEASIBLE"


def test_minimize_box_and_punctured():
    spec = {"objective": NORM2, "domain": {"radius": "2", "norm": "linf", "exclude_origin": True}}
    rec = harness.cmd_minimize(spec, verify=True)
    assert rec["verify"]["ok"] and sorted(map(abs, map(int, rec["point"]))) == [0, 1]


def test_parse_errors():
    with pytest.raises(ParseError):
        harness.cmd_minimize({"objective": NORM2, "domain": {"center": ["0"]}})
    with pytest.raises(ParseError):
        harness.cmd_minimize({"objective": NORM2, "domain": {"norm": "l1"}})
    with pytest.raises(ParseError):
        harness.cmd_minimize({"objective": NORM2, "params": {"c_hat": "3"}})


@pytest.mark.parametrize("a, b, g", [(12, 18, 6), (7, 1, 1), (9, 9, 9), (1, 1, 1), (997, 1000, 1)])
def test_gcd(a, b, g):
    got, rec = harness.cmd_gcd(a, b, verify=True)
    assert got == g and rec["verify"]["ok"]


def test_bench_csv():
    text = harness.cmd_bench({"n": [2], "r": [4, 8], "seeds": [0]})
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == harness.CSV_COLUMNS and len(rows) == 2
    again = list(csv.DictReader(io.StringIO(harness.cmd_bench({"n": [2], "r": [4, 8], "seeds": [0]}))))
    assert [r["oracle_calls"] for r in rows] == [r["oracle_calls"] for r in again]
    assert harness.cmd_bench({"n": [], "r": []}) == ",".join(harness.CSV_COLUMNS) + "\n"


def test_bench_adversary_variant():
    rows = list(csv.DictReader(io.StringIO(harness.cmd_bench({"n": [1], "r": [3], "variant": "general"}))))
    assert rows[0]["analytic_bound"] and rows[0]["variant"] == "general"


def test_lattice_commands():
    assert harness.cmd_lattice("svp", {"basis": [[1, 0], [10, 1]]})["norm_sq"] == "1"
    assert harness.cmd_lattice("cvp", {"basis": [[1, 0], [0, 1]], "target": ["2/5", "3/5"]})["vector"] == ["0", "1"]
    with pytest.raises(ParseError):
        harness.cmd_lattice("cvp", {"basis": [[1, 0], [0, 1]]})


def test_cli_minimize_and_exit_codes(tmp_path, capsys):
    spec = write(tmp_path, "p.json", {"objective": NORM2, "domain": {"radius": "3"}})
    assert cli.main(["minimize", spec, "--verify"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["point"] == ["0", "0"]
    bad = write(tmp_path, "bad.json", {"objective": {"kind": "nope"}})
    assert cli.main(["minimize", bad]) == 2
    assert cli.main(["minimize", str(tmp_path / "missing.json")]) == 2
    infeasible = write(tmp_path, "inf.json", {"objective": NORM2, "domain": {"radius": "2"},
                                              "constraints": [poly(2, [("1", [2, 0]), ("1", [0, 0])])]})
    assert cli.main(["minimize", infeasible, "--require-feasible"]) == 3


def test_cli_is_deterministic(tmp_path, capsys):
    spec = write(tmp_path, "p.json", {"objective": poly(2, [("1", [2, 0]), ("-7", [1, 0]), ("1", [0, 2])]),
                                      "domain": {"radius": "20"}, "params": {"seed": 3}})
    outs = []
    for _ in range(2):
        cli.main(["minimize", spec])
        data = json.loads(capsys.readouterr().out)
        data.pop("wall_ms")
        outs.append(data)
    assert outs[0] == outs[1]


def test_cli_adversary(capsys):
    assert cli.main(["adversary", "--n", "1", "--r", "8", "--trials", "5"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert len(rep["rows"]) == 5 and round(rep["analytic_bound"], 2) == 3.91
    assert cli.main(["adversary", "--variant", "even", "--r", "1"]) == 2
    assert cli.main(["adversary", "--n", "4"]) == 2
    assert cli.main(["adversary", "--n", "1", "--r", "3", "--csv"]) == 0
    assert capsys.readouterr().out.startswith("n,r,seed")


def test_cli_gcd_and_lattice(tmp_path, capsys):
    assert cli.main(["gcd", "12", "18", "--verify"]) == 0
    assert json.loads(capsys.readouterr().out)["gcd"] == 6
    basis = write(tmp_path, "b.json", {"basis": [[2, 0], [1, 2]]})
    assert cli.main(["lattice", "lll", basis]) == 0
    assert cli.main(["bench", write(tmp_path, "c.json", {"n": [2], "r": [4]}), "--out", str(tmp_path / "o.csv")]) == 0
    assert (tmp_path / "o.csv").read_text().startswith("n,r,seed")
