import json

import pytest

from qschur.cli import (
    EXIT_FAIL,
    EXIT_INCONCLUSIVE,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    ConfigFailure,
    main,
    parse_config,
)

BALL_ZEROS = {"domain": "ball", "points": [{"a": [0.0, 0.5, 0.0, 0.0], "n": 1}]}


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_parse_minimal_kl_config():
    cfg = parse_config(json.dumps({"command": "kl-check", "b0": BALL_ZEROS}).encode())
    assert cfg.command == "kl-check"
    assert cfg.effective["seed"] == 0x5C05
    assert cfg.effective["trials"] == 200


def test_parse_rejects_ball_modulus():
    bad = {"command": "kl-check",
           "b0": {"domain": "ball", "points": [{"a": [1.2, 0, 0, 0], "n": 1}]}}
    with pytest.raises(ConfigFailure) as info:
        parse_config(json.dumps(bad).encode())
    paths = [p for p, _ in info.value.violations]
    assert any(p.endswith("/points/0/a") for p in paths)


def test_parse_rejects_nan_and_unknown_fields():
    bad = json.dumps(
        {"command": "kl-check", "b0": BALL_ZEROS, "mystery": 1}
    )
    with pytest.raises(ConfigFailure) as info:
        parse_config(bad.encode())
    assert any(p == "/mystery" for p, _ in info.value.violations)

    nan_cfg = ('{"command": "kl-check", "b0": {"domain": "ball", '
               '"points": [{"a": [NaN, 0, 0, 0], "n": 1}]}}')
    with pytest.raises(ConfigFailure):
        parse_config(nan_cfg.encode())


def test_parse_rejects_malformed_json():
    with pytest.raises(ConfigFailure):
        parse_config(b"{nope")


def test_kl_check_pass_and_reports_are_byte_identical(tmp_path):
    cfg = write_config(
        tmp_path, "kl.json",
        {"command": "kl-check", "b0": BALL_ZEROS, "trials": 15, "batch": 20, "seed": 9},
    )
    out1 = str(tmp_path / "r1.json")
    out2 = str(tmp_path / "r2.json")
    assert main(["kl-check", "--config", cfg, "--out", out1]) == EXIT_OK
    assert main(["kl-check", "--config", cfg, "--out", out2]) == EXIT_OK
    b1 = open(out1, "rb").read()
    assert b1 == open(out2, "rb").read()
    doc = json.loads(b1)
    assert doc["verdict"] == "PASS"
    assert doc["kappa_hat"] == 1 and doc["deg_B0"] == 1
    assert doc["seed"] == 9
    assert doc["config"]["command"] == "kl-check"


def test_kl_check_negative_control_exit_1(tmp_path):
    cfg = write_config(
        tmp_path, "klbad.json",
        {"command": "kl-check", "b0": BALL_ZEROS, "expected_kappa": 2,
         "trials": 10, "batch": 20},
    )
    out = str(tmp_path / "r.json")
    assert main(["kl-check", "--config", cfg, "--out", out]) == EXIT_FAIL
    assert json.loads(open(out).read())["verdict"] == "FAIL"


def test_kl_check_inconclusive_exit_2(tmp_path):
    cfg = write_config(
        tmp_path, "klinc.json",
        {"command": "kl-check", "b0": BALL_ZEROS,
         "s0": {"kind": "blaschke",
                "zeros": {"domain": "ball",
                          "points": [{"a": [0.0, 0.0, 0.3, 0.0], "n": 1}]}},
         "identity_trunc": 4, "trials": 5, "batch": 15},
    )
    out = str(tmp_path / "r.json")
    assert main(["kl-check", "--config", cfg, "--out", out]) == EXIT_INCONCLUSIVE
    assert json.loads(open(out).read())["verdict"] == "INCONCLUSIVE"


def test_usage_error_exit_3(tmp_path):
    bad = write_config(tmp_path, "bad.json", {"command": "kl-check"})
    assert main(["kl-check", "--config", bad]) == EXIT_USAGE
    malformed = tmp_path / "broken.json"
    malformed.write_text("{")
    assert main(["kl-check", "--config", str(malformed)]) == EXIT_USAGE
    # config command disagreeing with the subcommand
    cfg = write_config(tmp_path, "negsq.json",
                       {"command": "negsq",
                        "schur": {"kind": "blaschke", "zeros": BALL_ZEROS}})
    assert main(["kl-check", "--config", cfg]) == EXIT_USAGE


def test_missing_config_exit_4(tmp_path):
    assert main(["kl-check", "--config", str(tmp_path / "nope.json")]) == EXIT_IO


def test_negsq_on_blaschke_factor(tmp_path):
    cfg = write_config(
        tmp_path, "negsq.json",
        {"command": "negsq",
         "schur": {"kind": "blaschke", "zeros": BALL_ZEROS},
         "trials": 10, "batch": 15, "csv": str(tmp_path / "eigs.csv")},
    )
    out = str(tmp_path / "r.json")
    assert main(["negsq", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert doc["report"]["kappa_hat"] == 0
    csv = open(tmp_path / "eigs.csv").read()
    assert csv.startswith("index,eigenvalue\n")
    assert len(csv.strip().splitlines()) == 16


def test_negsq_quotient_spec(tmp_path):
    cfg = write_config(
        tmp_path, "negsq2.json",
        {"command": "negsq",
         "schur": {"kind": "quotient", "b0": BALL_ZEROS, "s0": None},
         "trials": 10, "batch": 20},
    )
    out = str(tmp_path / "r.json")
    assert main(["negsq", "--config", cfg, "--out", out]) == EXIT_OK
    assert json.loads(open(out).read())["report"]["kappa_hat"] == 1


def test_dim_hb_command(tmp_path):
    cfg = write_config(
        tmp_path, "dim.json",
        {"command": "dim-hb",
         "zeros": {"domain": "ball",
                   "points": [{"a": [0.2, 0.5, 0.0, 0.0], "n": 2}]}},
    )
    out = str(tmp_path / "r.json")
    assert main(["dim-hb", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert doc["dim"] == 2 and doc["degree"] == 2


def test_realize_command(tmp_path):
    cfg = write_config(
        tmp_path, "real.json",
        {"command": "realize", "blaschke_a": [0.0, 0.5, 0.0, 0.0],
         "points": [[0.0, 0.0, 0.0, 0.0], [0.2, 0.1, 0.0, 0.0]]},
    )
    out = str(tmp_path / "r.json")
    assert main(["realize", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert doc["coisometry_residual"] < 1e-12
    first = doc["values"][0]["value"]["entries"][0]
    assert abs(first[0] - 0.5) < 1e-12  # B_a(0) = |a|


def test_stein_command(tmp_path):
    cfg = write_config(
        tmp_path, "stein.json",
        {"command": "stein",
         "A": {"rows": 1, "cols": 1, "entries": [[2.0, 0.0, 0.0, 0.0]]},
         "C": {"rows": 1, "cols": 1, "entries": [[1.0, 0.0, 0.0, 0.0]]}},
    )
    out = str(tmp_path / "r.json")
    assert main(["stein", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert abs(doc["P"]["entries"][0][0] + 1.0 / 3.0) < 1e-14
    assert doc["negative_semidefinite"] is True


def test_transport_command(tmp_path):
    cfg = write_config(
        tmp_path, "tr.json",
        {"command": "transport",
         "schur": {"kind": "blaschke",
                   "zeros": {"domain": "halfspace",
                             "points": [{"a": [0.8, 0.4, 0.0, 0.0], "n": 1}]}},
         "x0": 1.0, "direction": "halfspace_to_ball",
         "points": [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]],
         "negsq": True, "trials": 8, "batch": 15},
    )
    out = str(tmp_path / "r.json")
    assert main(["transport", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert doc["mapped_points"][0]["image"] == [0, 0, 0, 0]
    assert doc["mapped_points"][1]["image"] == [-1, 0, 0, 0]
    assert doc["domain"] == "ball"
    assert doc["negsq"]["kappa_hat"] == 0


def test_blaschke_build_command(tmp_path):
    cfg = write_config(
        tmp_path, "bb.json",
        {"command": "blaschke-build",
         "zeros": {"domain": "ball",
                   "points": [{"a": [0.0, 0.5, 0.0, 0.0], "n": 1},
                              {"a": [0.3, 0.0, 0.5, 0.0], "n": 1}]}},
    )
    out = str(tmp_path / "r.json")
    assert main(["blaschke-build", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert doc["degree"] == 2
    assert all(r < 1e-10 for r in doc["zero_residuals"])
    assert len(doc["factors"]) == 2


def test_seed_override_changes_report(tmp_path):
    cfg = write_config(
        tmp_path, "negsq3.json",
        {"command": "negsq",
         "schur": {"kind": "blaschke", "zeros": BALL_ZEROS},
         "trials": 4, "batch": 8, "seed": 1},
    )
    o1, o2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["negsq", "--config", cfg, "--out", o1]) == EXIT_OK
    assert main(["negsq", "--config", cfg, "--out", o2, "--seed", "2"]) == EXIT_OK
    d1, d2 = json.loads(open(o1).read()), json.loads(open(o2).read())
    assert d1["seed"] == 1 and d2["seed"] == 2
    assert d1["report"]["witness"]["points"] != d2["report"]["witness"]["points"]


def test_float_formatting_17_digits(tmp_path):
    from qschur._jsonutil import dump_json, format_float

    assert format_float(1.0 / 3.0) == "0.33333333333333331"
    text = dump_json({"x": 0.1})
    assert "0.10000000000000001" in text
    with pytest.raises(ValueError):
        format_float(float("inf"))
