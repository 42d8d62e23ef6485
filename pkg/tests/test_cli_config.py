import json
import textwrap

import pytest

from zdaction import config as cfg
from zdaction.errors import ConfigError

from golden import COMMANDS, GOLDEN_DIR, run


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_golden_output(name):
    code, out, err = run(COMMANDS[name])
    assert code == 0, err
    assert out == (GOLDEN_DIR / f"{name}.out").read_text()


def test_analyze_content():
    rep = json.loads(run(["analyze", "--config", "x2x3"])[1])
    assert rep["mixing"] is True and rep["sigma"] == 2 and rep["zero_sum_ok"]
    assert rep["separation_c"]["enclosure"].startswith("[0.58622000806")
    assert [p["label"] for p in rep["places"]] == ["inf", "p=2", "p=3"]
    led = json.loads(run(["analyze", "--config", "ledrappier"])[1])
    assert len(led["places"]) == 3
    assert all(c["exact"] for p in led["places"] for c in p["lyapunov"])
    nm = json.loads(run(["analyze", "--config", "nonmix"])[1])
    assert nm["mixing"] is False and nm["separation_c"] is None


def test_perpoints_and_scan_content():
    out = run(["perpoints", "--config", "x2", "--radius", "4"])[1].splitlines()
    assert [line.split(",")[1] for line in out[1:]] == ["1", "3", "7", "15"]
    out = run(["scan", "--config", "x2", "--k", "1..6", "--window", "14"])[1].splitlines()
    assert [line.split(",")[4] for line in out[1:7]] == [f"{2 * k}.000000000000" for k in range(1, 7)]
    assert out[-1].startswith("# B=2.885390081778")


def test_exact_outputs():
    val = json.loads(run(["correlate", "--config", "x2", "--functions", "x2_correlate", "--n", "1"])[1])
    assert val["value"] == {"re": [1, 1], "im": [0, 1]}
    val = json.loads(run(["pairing", "--config", "x2", "--functions", "x2_pairing", "--n", "2"])[1])
    assert val["value"] == {"re": [2, 1], "im": [1, 1]}


def test_exit_codes(tmp_path):
    assert run(["analyze", "--config", "no-such-system"])[0] == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("[system\nname = 1")
    code, _, err = run(["analyze", "--config", str(bad)])
    assert code == 2 and "line" in err
    assert run(["scan", "--config", "x2x3", "--theta", "1000", "--cap", "50"])[0] == 4
    assert run(["perpoints", "--config", "nonmix"])[0] == 3
    assert run(["correlate", "--config", "x2", "--functions", "x2_correlate", "--n", "0"])[0] == 2
    code, out, _ = run(["scan", "--config", "x2", "--k", "2..2", "--window", "3"])
    assert code == 0 and out.splitlines()[1].split(",")[6] == "true"  # boundary hit is data, not an error
    with pytest.raises(SystemExit) as exc:
        run(["scan", "--config", "x2", "--k", "3..1"])
    assert exc.value.code == 2


def test_json_config_and_user_schedule(tmp_path):
    doc = {"system": {"name": "x5", "d": 1}, "field": {"min_poly": "x - 1", "generator_images": ["5"],
                                                       "maximality_attested": True},
           "schedule": {"theta_list": [5, 25]}}
    path = tmp_path / "x5.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["scan", "--config", str(path), "--k", "1..2", "--window", "6"])
    assert code == 0
    rows = out.splitlines()[1:3]
    assert [r.split(",")[1] for r in rows] == ["5", "25"]
    assert run(["scan", "--config", str(path), "--k", "1..3"])[0] == 2


@pytest.mark.parametrize("body,msg", [
    ("[system]\nname='a'\n", "[system] and [field]"),
    ("[system]\nd = 1\n[field]\nmin_poly='x-1'\ngenerator_images=['2','3']\n", "generator_images"),
    ("[system]\nd = 1\n[field]\ngenerator_images=['2']\n", "min_poly"),
    ("[system]\nd = 1\n[field]\nmin_poly='x^2-4'\ngenerator_images=['x']\n", "reducible"),
    ("[system]\nd = 1\n[field]\nmin_poly='x-1'\ngenerator_images=['0']\n", "zero"),
    ("[system]\nd = 1\n[field]\nmin_poly='x-1'\ngenerator_images=['2']\n"
     "[schedule]\ntheta_base=2\ntheta_list=[2]\n", "not both"),
])
def test_schema_errors(tmp_path, body, msg):
    p = tmp_path / "c.toml"
    p.write_text(body)
    with pytest.raises(ConfigError) as err:
        doc, _ = cfg.load_document(str(p))
        cfg.load_presentation(doc)
        cfg.load_schedule(doc)
    assert msg in str(err.value)


def test_composition_config(tmp_path):
    p = tmp_path / "comp.toml"
    p.write_text(textwrap.dedent("""
        [[leaf]]
        name = "a"
        config = "x2"
        [[node]]
        name = "M"
        shape = "extension"
        sub = "a"
        quotient = "a"
        cocycles = [[["1"]]]
        reps = [{quotient = ["1"], lift = ["1/2", "1"]}]
    """))
    doc, base = cfg.load_document(str(p))
    M, leaves = cfg.load_composition(doc, base)
    assert list(leaves) == ["a"] and M.dim == 2
    K = leaves["a"].field
    assert M.rep((K.one,)) == (K.from_int(0.5), K.one)
    p.write_text('[[leaf]]\nname="a"\nconfig="x2"\n[[node]]\nshape="sum"\nparts=["zz"]\n')
    doc, base = cfg.load_document(str(p))
    with pytest.raises(ConfigError, match="unknown leaf or node"):
        cfg.load_composition(doc, base)


def test_functions_file_errors(tmp_path):
    pres = cfg.load_presentation(cfg.load_document("x2")[0])
    p = tmp_path / "f.toml"
    p.write_text("[[f]]\nsupport = '1/3'\nre = 1\n")
    with pytest.raises(ConfigError, match="not in M"):
        cfg.load_functions(str(p), pres)
    p.write_text("[[g]]\nsupport = '1'\nre = 1\n")
    with pytest.raises(ConfigError, match="needs an f"):
        cfg.load_functions(str(p), pres)
    p.write_text("[[f]]\nsupport = 'g1^2'\nre = '1/2'\nim = -1\n")
    f = cfg.load_functions(str(p), pres)["f"]
    assert list(f.coeffs.values())[0].render() == {"re": [1, 2], "im": [-1, 1]}


def test_stock_names():
    names = cfg.stock_names()
    for n in ("x2", "x3", "x2x3", "fibonacci", "ledrappier", "nonmix"):
        assert n in names
