import json
import os
import subprocess
import sys

import pytest

from coarsedim.cli import main
from coarsedim.config import RunConfig
from coarsedim.constructors import interval_cover_Z
from coarsedim.covers import save_certificate
from coarsedim.errors import ConfigError
from coarsedim.groups import CAPS, DEFAULT_BALL_CAP, DEFAULT_SEARCH_CAP
from oracles import free_words


@pytest.fixture(autouse=True)
def restore_caps():
    yield
    CAPS["ball"], CAPS["search"] = DEFAULT_BALL_CAP, DEFAULT_SEARCH_CAP


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(out):
    lines = [ln.split("\t") for ln in out.strip().splitlines()]
    return [dict(zip(lines[0], row)) for row in lines[1:]]


@pytest.mark.parametrize("group,r,size", [("Z", "2", 5), ("F2", "2", len(free_words(2, 2))), ("Z2", "3", 25)])
def test_ball(capsys, group, r, size):
    code, out, _ = run(capsys, "ball", "--group", group, "--r", r)
    assert code == 0
    row = table(out)[0]
    assert int(row["size"]) == size and row["max_norm"] == r


def test_ball_json_group(capsys):
    code, out, _ = run(capsys, "ball", "--group", '{"kind":"free_abelian","rank":2}', "--r", "3")
    assert code == 0 and table(out)[0]["size"] == "25"


def test_ball_budget_exceeded(capsys):
    code, _, err = run(capsys, "ball", "--group", "F2", "--r", "12", "--budget-balls", "1000")
    assert code == 3 and "budget" in err


def test_usage_errors(capsys):
    assert run(capsys, "ball", "--group", "Q8", "--r", "1")[0] == 2
    assert run(capsys, "ball", "--group", "Z", "--r", "-1")[0] == 2
    assert run(capsys, "demo", "z", "--window", "0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["demo", "nosuchdemo"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["ball", "--r", "x"])
    assert exc.value.code == 2


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("ball", budget_balls=0).validate()
    assert RunConfig("ball", seed=7).to_dict()["seed"] == 7


# -- verify -----------------------------------------------------------------

@pytest.fixture
def cert_file(tmp_path):
    path = tmp_path / "interval.json"
    save_certificate(interval_cover_Z(3, 60), str(path))
    return path


def test_verify_valid(capsys, cert_file):
    code, out, _ = run(capsys, "verify", str(cert_file))
    assert code == 0 and out.startswith("PASS\tcertificate")


def test_verify_tampered_color(capsys, cert_file, tmp_path):
    d = json.loads(cert_file.read_text())
    d["cells"][1]["color"] = d["cells"][0]["color"]
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 1
    assert "FAIL\tk_disjoint" in out
    assert any(ln.startswith("witness\tk_disjoint") for ln in out.splitlines())


def test_verify_empty_cell(capsys, cert_file, tmp_path):
    d = json.loads(cert_file.read_text())
    d["cells"][0]["members"] = []
    bad = tmp_path / "empty.json"
    bad.write_text(json.dumps(d))
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and "empty" in err


def test_verify_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{]")
    assert run(capsys, "verify", str(bad))[0] == 2
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2


def test_verify_report_records_seed(capsys, cert_file, tmp_path):
    out = tmp_path / "rep.json"
    assert run(capsys, "verify", str(cert_file), "--seed", "11", "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["details"]["seed"] == 11


# -- construct --------------------------------------------------------------

def test_construct_and_verify_round_trip(capsys, tmp_path):
    path = tmp_path / "brick.json"
    assert run(capsys, "construct", "brick", "--n", "2", "--R", "2", "--out", str(path))[0] == 0
    assert run(capsys, "verify", str(path))[0] == 0


def test_construct_forced_one_color_fails(capsys):
    code, out, _ = run(capsys, "construct", "interval", "--R", "2", "--colors", "1")
    assert code == 1 and "FAIL\tk_disjoint" in out


# -- demos ------------------------------------------------------------------

def test_demo_extension(capsys):
    code, out, _ = run(capsys, "demo", "extension")
    assert code == 0
    rows = {r["stage"]: r for r in table(out)}
    assert rows["combined"]["pass"] == "PASS" and rows["combined"]["colors"] == "4"


def test_demo_zerodim_Z(capsys):
    code, out, _ = run(capsys, "demo", "zerodim", "--group", "Z")
    assert code == 0
    assert '"verdict": "NO-CERTIFICATE"' in out


def test_demo_free_R2(capsys):
    code, out, _ = run(capsys, "demo", "free", "--R", "2")
    assert code == 0
    row = table(out)[0]
    assert row["pass"] == "PASS" and row["colors"] == "2"


def test_demo_stage_failure_names_stage(capsys):
    # window 8 < 4R for R = 4: the interval stage cannot run
    code, out, _ = run(capsys, "demo", "extension", "--R", "4", "--window", "8")
    assert code == 1 and out.startswith("FAIL\textension")


def test_demo_outputs_byte_identical(tmp_path):
    # same RunConfig (including --out), different hash seeds: identical bytes
    d = tmp_path / "out"
    outs = []
    for hashseed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        proc = subprocess.run([sys.executable, "-m", "coarsedim.cli", "demo", "translate", "--seed", "3",
                               "--out", str(d)], capture_output=True, check=True, env=env)
        files = sorted(os.listdir(d))
        outs.append((proc.stdout, files, [(d / f).read_bytes() for f in files]))
        for f in files:
            (d / f).unlink()
    assert outs[0] == outs[1]
    assert "translate_report.json" in outs[0][1] and "translate_summary.tsv" in outs[0][1]
    report = json.loads(outs[0][2][outs[0][1].index("translate_report.json")])
    assert report["config"]["seed"] == 3 and report["pass"] is True


def test_subgroup_certificate_reload(capsys, tmp_path):
    from coarsedim.demos import demo_translate_2z

    st = [s for s in demo_translate_2z().stages if s.name == "H_certificate"][0]
    path = tmp_path / "h.json"
    save_certificate(st.certificate, str(path))
    assert run(capsys, "verify", str(path))[0] == 0
    d = json.loads(path.read_text())
    norms = d["norm"]["window_norms"]
    key = next(k for k, v in norms.items() if v != "0")
    norms[key] = str(int(norms[key]) + 1)
    path.write_text(json.dumps(d))
    code, _, err = run(capsys, "verify", str(path))
    assert code == 2 and "induced norm" in err
