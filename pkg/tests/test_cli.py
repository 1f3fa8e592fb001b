import csv
import io
import json
import shutil
import subprocess

import pytest

from hpsig import io as hio
from hpsig.cli import COMMANDS, run

REPORT_KEYS = {"command", "inputs", "mode", "seed", "results", "residuals", "wall_time", "error"}


def fx(name):
    return str(hio.fixture_path(name))


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def test_signature_cp2():
    code, rep = call("signature", fx("cp2_9"))
    assert code == 0 and rep["error"] is None
    assert rep["results"]["signature"] == 1
    assert rep["results"]["axioms"] == "pass"
    assert rep["results"]["cup_oracle"] == 1
    assert set(rep) == REPORT_KEYS


def test_signature_reversed():
    code, rep = call("signature", fx("cp2_9"), "--reverse", "--mode", "exact")
    assert code == 0 and rep["results"]["signature"] == -1 and rep["results"]["method"] == "exact"


def test_signature_float_mode():
    code, rep = call("signature", fx("torus_7"), "--mode", "float")
    assert code == 0 and rep["results"]["signature"] == 0 and rep["mode"] == "float"


def test_signature_with_cover():
    code, rep = call("signature", fx("torus_7"), "--cover", fx("cocycle_torus_7_z3"), "--group", fx("group_z3"))
    assert code == 0
    assert rep["results"]["multisignature"] == {"chi0": 0, "chi1": 0, "chi2": 0}


def test_validate_rp2_is_domain_error():
    code, rep = call("validate", fx("rp2_6"))
    assert code == 1
    assert rep["error"]["type"] == "NotClosedOriented" and rep["results"] is None


def test_validate_torus():
    code, rep = call("validate", fx("torus_7"))
    assert code == 0 and rep["results"]["pass"]
    assert rep["residuals"]["i"] == 0 and rep["residuals"]["ii_raw"] == 0


def test_missing_file_argument():
    assert call("signature")[0] == 2


def test_nonexistent_file():
    code, rep = call("signature", "/nonexistent/complex.json")
    assert code == 2 and rep["error"]["type"] == "FileNotFoundError"


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, rep = call("signature", str(p))
    assert code == 2 and rep["error"]["type"] == "JSONDecodeError"


def test_malformed_structure(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"facets": "nope"}))
    code, rep = call("signature", str(p))
    assert code == 1 and rep["error"]["type"] == "MalformedInput"


def test_unknown_command():
    code, rep = call("frobnicate", fx("torus_7"))
    assert code == 2 and rep["error"]["type"] == "UnknownCommand"


@pytest.mark.parametrize("group,checked", [("z2xz2", True), ("s3", None)])
def test_multisig(group, checked):
    # total spaces are only built for groups of order at most four
    code, rep = call("multisig", fx("torus_7"), "--cover", fx(f"cocycle_torus_7_{group}"), "--group", fx(f"group_{group}"))
    assert code == 0
    res = rep["results"]
    assert set(res["entries"].values()) == {0} and res["consistent"] is checked
    assert all(v == "pass" for v in res["axioms"].values())


def test_multisig_needs_cover():
    assert call("multisig", fx("torus_7"))[0] == 2


def test_family(tmp_path):
    out = tmp_path / "fam.csv"
    code, rep = call("family", fx("circle_3"), "--cover", fx("cocycle_circle_3_z"),
                     "--samples-per-circle", "8", "--csv", str(out))
    assert code == 0
    res = rep["results"]
    assert res["samples"] == 8 and res["at_zero"]["ranks"] == [1, 1]
    rows = list(csv.reader(out.open()))
    assert rows[0][0] == "theta_1" and len(rows) == 9


def test_family_torus_signature():
    code, rep = call("family", fx("torus_7"), "--cover", fx("cocycle_torus_7_zz"), "--samples-per-circle", "6")
    assert code == 0 and rep["results"]["signatures"] == [0] and rep["results"]["samples"] == 36


def test_product():
    code, rep = call("product", fx("sphere_d2"), fx("sphere_d2"))
    assert code == 0 and rep["results"]["pass"] and rep["results"]["signature_product"] == 0


def test_product_needs_stretch():
    code, rep = call("product", fx("cp2_9"), fx("cp2_9"))
    assert code == 2 and "--stretch" in rep["error"]["message"]


def test_subdivide(tmp_path):
    out = tmp_path / "sd.json"
    code, rep = call("subdivide", fx("torus_7"), "--output", str(out))
    res = rep["results"]
    assert code == 0 and res["chain_map_ok"] and res["signature"] == res["signature_subdivided"] == 0
    assert res["f_vector"] == [42, 126, 84]
    assert hio.load_complex(out).f_vector == (42, 126, 84)


def test_double_cylinder():
    code, rep = call("double", fx("cylinder"))
    res = rep["results"]
    assert code == 0 and res["euler_characteristic"] == 0 and res["cycle_is_cycle"]


def test_double_closed_is_domain_error():
    code, rep = call("double", fx("torus_7"))
    assert code == 1 and rep["error"]["type"] == "NoBoundary"


def test_bordism():
    code, rep = call("bordism", fx("torus_x_interval"))
    assert code == 0 and rep["results"]["zero"] and rep["results"]["signature"] == 0


def test_controlled_check():
    code, rep = call("controlled-check", "--seed", "5", "--trials", "100", fx("torus_7"))
    assert code == 0 and rep["seed"] == 5
    assert rep["results"]["pass"] and rep["results"]["certified"][fx("torus_7")]["pass"]


def test_inputs_are_hashed():
    code, rep = call("signature", fx("sphere_d2"))
    assert rep["inputs"] == {fx("sphere_d2"): hio.sha256(fx("sphere_d2"))}


def test_reports_are_deterministic():
    _, a = call("controlled-check", "--seed", "2", "--trials", "50")
    _, b = call("controlled-check", "--seed", "2", "--trials", "50")
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b


@pytest.mark.parametrize("command", COMMANDS)
def test_help_for_every_command(command, capsys):
    assert run([command, "--help"]) == 0
    assert command in capsys.readouterr().out


@pytest.mark.skipif(shutil.which("hpsig") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["hpsig", "signature", fx("sphere_d2")], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["signature"] == 0
