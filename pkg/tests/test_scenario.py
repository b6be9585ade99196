import json
import os
import subprocess
import sys

import pytest

from hyperlab import cli
from hyperlab import scenario as sc
from hyperlab.errors import ConfigParseError

HEADER = """\
mode = exact
[operator U]
rule = zigzag
[operator W]
rule = parity
weights = mod 2 {1: 1/2, 0: 2}
exceptions = {2: 1}
[system S]
U = U
W = W
"""


def parse(text):
    return sc.parse_config(text)


def test_fixtures_parse():
    cfg = sc.load_config("example34")
    assert cfg.name == "example34"
    built = cfg.build_operators()
    assert built["W"].name == "W_ex" and built["U"].name == "U_alpha"
    criteria = {r.params["criterion"] for r in cfg.runs if r.kind == "criterion"}
    assert {"hypercyclicity", "zero_transitivity", "necessary_m", "periodic_min_modulus", "series",
            "cosine_split", "adjoint_cosine", "adjoint_power"} <= criteria
    for name in sc.FIXTURES:
        sc.load_config(name)


def test_undeclared_operator_named():
    text = HEADER + "[system T]\nU = U\nW = W2\n"
    with pytest.raises(ConfigParseError) as exc:
        parse(text)
    assert "W2" in str(exc.value)
    assert exc.value.line == text.splitlines().index("W = W2") + 1


def test_bad_schedule_line():
    text = HEADER + "[run r]\nkind = criterion\ncriterion = hypercyclicity\nsystem = S\nm = 2\nschedule = 5,5,6\n"
    with pytest.raises(ConfigParseError) as exc:
        parse(text)
    assert exc.value.line == len(text.splitlines())


def test_bad_weight_rule():
    text = "[operator W]\nrule = parity\nweights = mod 2 {1: 1/2, 0: x}\n"
    with pytest.raises(ConfigParseError) as exc:
        parse(text)
    assert exc.value.line == 3 and "weight" in str(exc.value)


@pytest.mark.parametrize("text", [
    "mode = fast\n",
    "[widget X]\n",
    "[operator W]\nrule = spiral\n",
    HEADER + "[run r]\nkind = dance\n",
    HEADER + "[run r]\nkind = criterion\ncriterion = hypercyclicity\nsystem = S\nm = 2\n",
    HEADER + "[run r]\nkind = criterion\ncriterion = necessary_m\nsystem = S\nthreshold = -1\n",
    HEADER + "[run r]\nkind = witness\nwitness = transitive\nsystem = S\nm = 2\nschedule = 1..4\nF = proj 2\nG = blob\n",
    "[operator A]\nbase = B\n[operator B]\nbase = A\n",
    "[operator U]\nrule = zigzag\n[operator V]\nrule = zigzag\nweights = 2\n[system S]\nU = V\nW = U\n",
    "a = 1\na = 2\n",
])
def test_parse_errors(text):
    with pytest.raises(ConfigParseError):
        parse(text)


def test_empty_runs(tmp_path):
    cfg = parse("scenario = nothing\n")
    status, results = sc.run_scenario(cfg, out=str(tmp_path))
    assert status == 0 and results == []
    index = json.loads((tmp_path / "nothing" / "index.json").read_text())
    assert index["runs"] == [] and "config_sha256" in index


def test_orbit_cap_inconclusive(tmp_path):
    text = "horizon_cap = 1\n" + HEADER + "[run o]\nkind = orbit\nsystem = S\nstart = proj 2\nhorizon = 4\n"
    status, results = sc.run_scenario(parse(text), out=str(tmp_path))
    assert status == 0 and results[0].verdict == "inconclusive"


def test_runtime_error_sets_status(tmp_path):
    text = HEADER + "[run w]\nkind = witness\nwitness = transitive\nsystem = S\nm = 1\nschedule = 1..3\nF = proj 2\nG = proj 1\n"
    status, results = sc.run_scenario(parse(text), out=str(tmp_path))
    assert status == 2 and results[0].status == "error"


def test_value_forms():
    assert sc.parse_schedule("4..10 by 3") == [4, 7, 10]
    assert sc.parse_schedule("1, 2, 9") == [1, 2, 9]
    F = sc.parse_finite_rank("entries 1,2,1/2; 3,3,-1", "exact")
    assert len(F) == 2
    assert sc.parse_finite_rank("rank1 2 5 3", "float")[(2, 5)] == 3.0


def test_float_mode_override(tmp_path):
    cfg = sc.load_config("aperiodic-probe")
    status, results = sc.run_scenario(cfg, out=str(tmp_path), mode="float", formats=("json", "csv"))
    assert status == 0
    assert [r.verdict for r in results] == ["pass", "inconclusive"]
    assert len(results[0].paths) == 2


def test_reports_embed_hash_and_map(tmp_path):
    cfg = sc.load_config("aperiodic-probe")
    sc.run_scenario(cfg, out=str(tmp_path))
    d = json.loads((tmp_path / "aperiodic-probe" / "zigzag-horizons.json").read_text())
    assert d["config_sha256"] == cfg.sha256
    assert set(d["theorem_map"]) >= {"hypercyclicity", "series"}


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["validate", "example34"]) == 0
    assert cli.main(["validate", str(tmp_path / "missing.scenario")]) == 1
    bad = tmp_path / "bad.scenario"
    bad.write_text("[operator W]\nrule = nope\n")
    assert cli.main(["check", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["norms", "example34", "--out", str(tmp_path), "--format", "csv"]) == 0
    assert (tmp_path / "example34" / "norms-P2.csv").exists()
    assert cli.main(["check", "aperiodic-probe", "--out", str(tmp_path), "--run", "nope"]) == 1


def test_cli_io_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["check", "aperiodic-probe", "--out", str(blocker)]) == 2


def test_module_entry_point(tmp_path):
    env = dict(os.environ)
    out = subprocess.run([sys.executable, "-m", "hyperlab", "check", "aperiodic-probe", "--out", str(tmp_path),
                          "--format", "table"], capture_output=True, text=True, env=env)
    assert out.returncode == 0
    assert "identity-horizons" in out.stdout and "INCONCLUSIVE" in out.stdout
