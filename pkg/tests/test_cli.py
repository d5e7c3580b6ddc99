import json

from click.testing import CliRunner

from memb.cli import main


def invoke(*args):
    res = CliRunner().invoke(main, list(args))
    assert res.exit_code == 0, res.output
    return res.output


def test_gen_group_and_cache(tmp_path):
    out = json.loads(invoke("gen-group", "--group", "D8", "--cache-dir", str(tmp_path),
                            "--out", str(tmp_path / "d8.json")))
    assert out["order"] == 8 and out["subgroups"] == 10
    assert any(p.name.startswith("group-") for p in tmp_path.iterdir())
    table = invoke("chartable", "--group", str(tmp_path / "d8.json"))
    assert table.count("chi") == 5


def test_verify_all(tmp_path):
    out = json.loads(invoke("verify", "--group", "S3", "--eq1", "--eq2", "--appendix-ineq", "--net",
                            "--p", "5,7", "--trials", "500", "--cache-dir", str(tmp_path)))
    assert out["schema"] == 1 and all(r["holds"] for r in out["results"])
    assert any(p.name.startswith("modrep-") for p in tmp_path.iterdir())


def test_verify_needs_a_check():
    assert CliRunner().invoke(main, ["verify", "--group", "S3"]).exit_code != 0


def test_run_single_pair():
    out = json.loads(invoke("run", "--protocol", "norm", "--group", "S4", "--subgroup", "gens=(1,2)(3,4),(1,3)(2,4)",
                            "--y", "(1,2)", "--trials", "2000", "--seed", "7"))
    row = out["rows"][0]
    assert out["schema"] == 1 and row["analytic_accept"] == "1/6" and row["within_4sigma"]


def test_run_rejects_non_normal_for_memb_norm():
    res = CliRunner().invoke(main, ["run", "--group", "S3", "--subgroup", "gens=(1,2)", "--y", "(1,3)"])
    assert res.exit_code != 0


def test_run_outputs_and_amplify(tmp_path):
    invoke("run", "--protocol", "modrep", "--p", "5", "--group", "S3", "--trials", "100", "--amplify", "2",
           "--out", str(tmp_path / "r.json"))
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["config"]["amplify"] == 2 and rep["summary"]["bound_respected"]
    invoke("run", "--protocol", "comprep", "--group", "Z2xZ2^3", "--plan", "sampled", "--samples", "3",
           "--trials", "50", "--epsilon", "auto", "--out", str(tmp_path / "r.csv"))
    assert (tmp_path / "r.csv").read_text().startswith("H,")


def test_table_and_lowerbound():
    out = json.loads(invoke("table", "--protocol", "norm", "--family", "Z2^{n}", "--range", "1..3",
                            "--trials", "10"))
    assert [r["bits_max"] for r in out["rows"]] == [1, 2, 3]
    out = json.loads(invoke("lowerbound", "--group", "Z2^3"))
    assert out["gamma"] == 3 and out["shattering_verified"]
