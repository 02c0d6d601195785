import json
import os
import subprocess

import jsonschema
import pytest

CLI = os.environ["QES_CLI"]
with open(os.environ["QES_SCHEMA"]) as fh:
    SCHEMA = json.load(fh)
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def run(*args):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout


@pytest.mark.parametrize(
    "args",
    [
        ["spectrum", "--m", "1", "--zeta", "0.5"],
        ["spectrum", "--m", "2", "--zeta", "1"],
        ["spectrum", "--m", "3", "--zeta", "0.5"],
        ["spectrum", "--m", "6", "--zeta", "-0.4", "--verify", "--timing"],
        ["critical-zeta", "--m", "5", "--tol", "1e-6"],
        ["scan", "--m", "4", "--zeta-min", "0.1", "--zeta-max", "0.5", "--steps", "5"],
        ["scan", "--m", "3", "--zeta-min", "0.1", "--zeta-max", "0.9", "--steps", "2"],
        ["periodic", "--m", "3", "--zeta", "0.3"],
        ["periodic", "--m", "2", "--zeta", "1"],
    ],
)
def test_json_validates(args):
    code, out = run(*args)
    assert code == 0
    record = json.loads(out)
    VALIDATOR.validate(record)
    assert record["schema_version"] == "1.0"


def test_schema_rejects_malformed_record():
    _, out = run("spectrum", "--m", "2", "--zeta", "1")
    record = json.loads(out)
    del record["schema_version"]
    with pytest.raises(jsonschema.ValidationError):
        VALIDATOR.validate(record)
    record = json.loads(out)
    record["levels"][0]["reality"] = "imaginary"
    with pytest.raises(jsonschema.ValidationError):
        VALIDATOR.validate(record)


def test_m1_single_level():
    _, out = run("spectrum", "--m", "1", "--zeta", "0.5")
    levels = json.loads(out)["levels"]
    assert [(lv["re"], lv["im"]) for lv in levels] == [(0.75, 0.0)]


def test_scan_m4_rows_are_paired():
    _, out = run("scan", "--m", "4", "--zeta-min", "0.1", "--zeta-max", "2", "--steps", "7")
    rows = json.loads(out)["rows"]
    by_zeta = {}
    for row in rows:
        by_zeta.setdefault(row["zeta"], []).append(complex(row["re"], row["im"]))
    for zeta, levels in by_zeta.items():
        assert len(levels) == 4
        assert all(abs(e.imag) > 0 for e in levels)
        assert sorted(levels, key=lambda e: (e.real, e.imag)) == sorted(
            (e.conjugate() for e in levels), key=lambda e: (e.real, e.imag)
        )


def test_scan_two_steps_gives_two_rows_per_level():
    _, out = run("scan", "--m", "3", "--zeta-min", "0.1", "--zeta-max", "0.9", "--steps", "2", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "zeta,level,branch,re,im,reality"
    assert len(lines) == 1 + 2 * 3


def test_periodic_is_an_involution_on_energies():
    _, a = run("spectrum", "--m", "5", "--zeta", "0.2")
    _, b = run("periodic", "--m", "5", "--zeta", "0.2")
    key = lambda e: (e.real, e.imag)
    orig = sorted((complex(lv["re"], lv["im"]) for lv in json.loads(a)["levels"]), key=key)
    partner = [complex(lv["re"], lv["im"]) for lv in json.loads(b)["levels"]]
    assert sorted((-e for e in partner), key=key) == orig
