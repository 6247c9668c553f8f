import csv
import io
import json
import subprocess
import sys

import pytest

from hardyrellich.admissibility import Criterion, Status
from hardyrellich.cli import (EXIT_ERROR, EXIT_OK, EXIT_UNSUPPORTED, EXIT_USAGE, SCHEMA_VERSION, RunConfig,
                              UsageError, config_from_args, main, parse_domain, parse_space, verdict_from_output)


def run_main(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_json_round_trip(capsys):
    code, out, err = run_main(capsys, "classify", "--weight", "shifted-power:beta=0.9,N=5")
    assert code == EXIT_OK and err == ""
    doc = json.loads(out)
    assert doc["schema_version"] == SCHEMA_VERSION and doc["command"] == "classify"
    verdict = verdict_from_output(out)
    assert verdict.status is Status.ADMISSIBLE and verdict.criterion is Criterion.INTEGRAL_R3
    assert verdict.constant_bound == pytest.approx(381.0569, abs=1e-4)


def test_zero_weight_csv(capsys):
    code, out, _ = run_main(capsys, "rearrange", "--weight", "zero", "--domain", "ball:R=1,N=5",
                            "--format", "csv", "--points", "5")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    assert all(r["schema_version"] == str(SCHEMA_VERSION) for r in rows)
    assert all(float(r["g_star"]) == 0.0 and float(r["g_doublestar"]) == 0.0 for r in rows)


def test_norm_table_output(capsys):
    code, out, _ = run_main(capsys, "norm", "--weight", "power:alpha=4,N=5", "--space", "1.25,inf",
                            "--format", "table")
    assert code == EXIT_OK
    header, *lines = out.strip().splitlines()
    assert header.split()[:2] == ["schema_version", "space"] and len(lines) == 2


@pytest.mark.parametrize("argv, code", [
    (["bogus"], EXIT_USAGE),
    ([], EXIT_USAGE),
    (["classify", "--weight", "no-such-weight"], EXIT_USAGE),
    (["norm", "--weight", "power"], EXIT_USAGE),
    (["norm", "--space", "0.5,2"], EXIT_USAGE),
    (["verify", "--rtrunc", "0.5"], EXIT_USAGE),
    (["classify", "--weight", "power:alpha=2,N=3", "--domain", "fullspace"], EXIT_UNSUPPORTED),
    (["classify", "--weight", "power:alpha=2,N=4", "--domain", "exterior:R=0.5"], EXIT_ERROR),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = run_main(capsys, *argv)
    assert got == code
    assert out == "" and err != ""


def test_muckenhoupt_is_deterministic_under_seed(capsys):
    args = ("muckenhoupt", "--weight", "power:alpha=4,N=5", "--seed", "3", "--samples", "45")
    first = run_main(capsys, *args)
    second = run_main(capsys, *args)
    assert first[0] == EXIT_OK and first[1] == second[1]
    rows = json.loads(first[1])["rows"]
    assert {r["direction"] for r in rows} == {"FromZero", "FromA"}
    for r in rows:
        assert r["bracket_low"] <= r["empirical_max_ratio"] * (1 + 1e-3) and r["bracket_high"] == 4 * r["A"]


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("command: classify\nweight: power:alpha=4.5,N=5\ndomain: ball:R=1\nformat: csv\n")
    assert config_from_args(["classify", "--config", str(cfg)]).format == "csv"
    assert config_from_args(["classify", "--config", str(cfg), "--format", "json"]).format == "json"
    out_file = tmp_path / "out.json"
    code, out, err = run_main(capsys, "classify", "--config", str(cfg), "--format", "json", "--out", str(out_file))
    assert code == EXIT_OK and out == "" and "wrote" in err
    assert verdict_from_output(out_file.read_text()).status is Status.NOT_ADMISSIBLE
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"command": "classify", "colour": "red"}))
    with pytest.raises(UsageError):
        config_from_args(["classify", "--config", str(bad)])


def test_parsers():
    assert parse_space("mlogl") == ("mlogl",)
    assert parse_space("inf,2,-1")[2] == -1.0
    dom = parse_domain("ball:R=2,N=4", None)
    assert dom.dimension == 4 and dom.outer_radius == 2.0
    with pytest.raises(UsageError):
        parse_space("1,2,3,4")
    with pytest.raises(UsageError):
        RunConfig("classify", format="xml").validate()


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "hardyrellich.cli", "classify", "--weight", "zero",
                          "--domain", "ball:R=1,N=5", "--format", "csv"], capture_output=True, text=True, timeout=120)
    assert res.returncode == EXIT_OK
    assert res.stdout.splitlines()[0].startswith("schema_version,criterion")
