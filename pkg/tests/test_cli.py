from __future__ import annotations

import json

import pytest

from grcob.cli import main
from grcob.gr_cat import identity, op3
from grcob.graph_core import gaf_from_dict, gaf_to_dict, is_isomorphic

from helpers import rose, theta


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_chi_theta(files, capsys):
    path = files("theta.json", gaf_to_dict(theta()))
    assert run(capsys, "chi", path)[:2] == (0, "-1\n")
    code, out, _ = run(capsys, "chi", path, "--json")
    assert code == 0 and json.loads(out) == {"chi": -1}


def test_validate_exit_codes(files, capsys):
    bad = {"attach": [], "vertices": ["x"], "half_edges": [{"id": "a", "at": "x"}], "edges": [["a", "a"]]}
    code, out, _ = run(capsys, "validate", files("bad.json", bad))
    assert code == 1 and "fixpoint" in out
    assert run(capsys, "validate", files("ok.json", gaf_to_dict(theta())))[0] == 0
    code, _, err = run(capsys, "chi", files("broken.json", "{"))
    assert code == 2 and "invalid JSON" in err
    assert run(capsys, "chi", files("list.json", [1, 2]))[0] == 2


def test_compose_and_tensor(files, capsys, tmp_path):
    loop = files("loop.json", gaf_to_dict(op3(("a",), "a", "a")))
    ident = files("id.json", gaf_to_dict(identity(("a",))))
    out_path = str(tmp_path / "out.json")
    assert run(capsys, "compose", loop, ident, "-o", out_path)[0] == 0
    got = gaf_from_dict(json.loads(open(out_path).read()))
    assert is_isomorphic(got, op3(("a",), "a", "a"))
    code, out, _ = run(capsys, "tensor", loop, ident)
    assert code == 0 and gaf_from_dict(json.loads(out)).target == ("L.a", "R.a")
    other = files("b.json", gaf_to_dict(identity(("b",))))
    assert run(capsys, "compose", loop, other)[0] == 2


def test_invariants_and_zigzag(files, capsys):
    t = files("t.json", {**gaf_to_dict(theta()), "marking": {}})
    r = files("r.json", {**gaf_to_dict(rose(2)), "marking": {}})
    code, out, _ = run(capsys, "invariants", t, "--compare", r, "--zigzag-depth", "1", "--json")
    assert code == 0 and json.loads(out)["compare"]["verdict"] == "equivalent"


def test_xi(files, capsys):
    path = files("theta.json", gaf_to_dict(theta()))
    code, out, _ = run(capsys, "xi", path, "-d", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["degree"] == -3 and len(data["h1_basis"]) == 2


def test_reduce_minimize(files, capsys):
    g = {"attach": ["a", "c"], "vertices": ["v"], "half_edges": [{"id": "p", "at": "a"}, {"id": "q", "at": "v"}], "edges": [["p", "q"]], "marking": {"x": "c"}}
    code, out, _ = run(capsys, "reduce", files("g.json", g))
    assert code == 0 and json.loads(out)["attach"] == ["c"]
    code, out, _ = run(capsys, "minimize", files("g.json", g))
    assert code == 0 and json.loads(out)["vertices"] == []


def test_spine(capsys):
    code, out, _ = run(capsys, "spine", "-n", "2", "--list", "--json")
    assert code == 0 and json.loads(out)["count"] == 3
    code, out, _ = run(capsys, "spine", "-n", "2", "--homology", "-d", "0")
    assert (code, out.split()) == (0, ["1", "0"])
    code, out, _ = run(capsys, "spine", "-n", "2", "--complex", "-d", "1")
    assert code == 0 and json.loads(out)["dims"] == [0, 0]
    assert run(capsys, "spine", "-n", "4", "--homology")[0] == 2


def test_eval(files, capsys):
    circle = files("c.json", {**gaf_to_dict(rose(1)), "marking": {}})
    for alg, value in (("S2", "2"), ("T2", None), ("CP2", "3")):
        code, out, _ = run(capsys, "eval", circle, "--algebra", alg, "--json")
        entries = json.loads(out)["entries"]
        assert code == 0
        assert (entries[0]["coeff"] if entries else None) == value
    assert run(capsys, "eval", circle, "--algebra", "nope.json")[0] == 2


def test_check_functoriality_suite(capsys):
    code, out, _ = run(capsys, "check", "--suite", "functoriality", "--seed", "7", "--n", "200")
    assert code == 0 and "400/400 ok" in out


def test_pool_seed_env(capsys, monkeypatch):
    _, a, _ = run(capsys, "pool", "--seed", "3", "--size", "4")
    monkeypatch.setenv("GRCOB_SEED", "3")
    _, b, _ = run(capsys, "pool", "--seed", "9", "--size", "4")
    assert a == b
    assert json.loads(a)["seed"] == 3


def test_unknown_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == 2
