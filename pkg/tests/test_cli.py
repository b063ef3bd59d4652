"""End-to-end CLI runs: artifacts, manifests, determinism, error handling."""

import json

import pytest

from checkerboard_rmt.cli import CSV_VERSION_LINE, main, resolve_config, run


def _run_cli(args):
    return main([str(a) for a in args])


def _read(path):
    return path.read_text()


def test_blip_command_artifacts(tmp_path):
    out = tmp_path / "blip"
    status = _run_cli(["blip", "--k", "2", "--N", "60", "--g", "6", "--seed", "3", "--out", out])
    assert status == 0
    names = {p.name for p in out.iterdir()}
    assert names == {"eigenvalues.csv", "moments.csv", "histogram.csv", "histogram.gp", "manifest.json"}
    manifest = json.loads(_read(out / "manifest.json"))
    assert manifest["command"] == "blip"
    assert manifest["config"]["dim"] == 60
    assert manifest["config"]["seed"] == 3
    assert manifest["derived"]["g"] == 6
    assert manifest["derived"]["n"] == 8  # ceil(sqrt(60))
    assert sorted(manifest["outputs"]) == sorted(n for n in names if n != "manifest.json")
    moments = _read(out / "moments.csv").splitlines()
    assert moments[0] == CSV_VERSION_LINE
    assert moments[1] == "m,value,stderr"
    assert len(moments) == 2 + 5  # m = 0..4


def test_identical_configs_are_byte_identical_across_workers(tmp_path, monkeypatch):
    args = ["blip", "--k", "2", "--N", "48", "--g", "5", "--seed", "12"]
    monkeypatch.setenv("CHECKERBOARD_THREADS", "1")
    _run_cli(args + ["--out", tmp_path / "one"])
    monkeypatch.setenv("CHECKERBOARD_THREADS", "4")
    _run_cli(args + ["--out", tmp_path / "four"])
    for name in ("eigenvalues.csv", "moments.csv", "histogram.csv"):
        assert _read(tmp_path / "one" / name) == _read(tmp_path / "four" / name), name
    manifests = [json.loads(_read(tmp_path / d / "manifest.json")) for d in ("one", "four")]
    for manifest in manifests:
        manifest["config"].pop("out")
    assert manifests[0] == manifests[1]


def test_moment_table_json_format(tmp_path):
    out = tmp_path / "bulk"
    status = _run_cli(
        ["bulk", "--k", "2", "--N", "40", "--trials", "5", "--max-m", "4", "--seed", "1", "--out", out, "--format", "json"]
    )
    assert status == 0
    payload = json.loads(_read(out / "moments.json"))
    assert payload["columns"] == ["m", "value", "stderr"]
    assert len(payload["rows"]) == 5
    assert payload["schema_version"] == 1


def test_sample_command_row_count(tmp_path):
    out = tmp_path / "sample"
    _run_cli(["sample", "--k", "2", "--N", "10", "--trials", "3", "--out", out])
    rows = _read(out / "eigenvalues.csv").splitlines()[2:]
    assert len(rows) == 30


def test_hollow_command(tmp_path):
    out = tmp_path / "hollow"
    status = _run_cli(["hollow", "--k", "2", "--trials", "2000", "--max-m", "4", "--seed", "2", "--out", out])
    assert status == 0
    rows = _read(out / "moments.csv").splitlines()[2:]
    m2 = float(rows[2].split(",")[1])
    assert abs(m2 - 1.0) < 0.15  # second hollow moment tends to k - 1


def test_oracle_single_order(tmp_path, capsys):
    out = tmp_path / "oracle"
    status = _run_cli(["oracle", "--k", "3", "--m", "4", "--out", out])
    assert status == 0
    assert "10.0 (exact 10)" in capsys.readouterr().out
    payload = json.loads(_read(out / "oracle.json"))
    assert payload["results"][0]["exact"] == "10"
    assert payload["results"][0]["method"] == "wick-exact"


def test_oracle_table_and_quaternion(tmp_path):
    out = tmp_path / "oracle-q"
    status = _run_cli(
        ["oracle", "--k", "2", "--algebra", "quaternion", "--max-m", "4", "--trials", "20000", "--out", out]
    )
    assert status == 0
    payload = json.loads(_read(out / "oracle.json"))
    assert [r["m"] for r in payload["results"]] == [0, 1, 2, 3, 4]
    assert all(r["method"] == "monte-carlo" for r in payload["results"][1:])
    m4 = payload["results"][4]
    assert abs(m4["value"] - 1.5) < 5 * m4["stderr"]


def test_verify_identities_passes(tmp_path):
    out = tmp_path / "ids"
    status = _run_cli(["verify-identities", "--max-m", "12", "--trials", "3", "--seed", "5", "--out", out])
    assert status == 0
    report = json.loads(_read(out / "report.json"))
    assert report["passed"] is True
    kinds = {c["kind"] for c in report["checks"]}
    assert kinds == {"alternating-binomial", "trace-expansion"}


def test_verify_split_passes(tmp_path):
    out = tmp_path / "split"
    status = _run_cli(
        ["verify-split", "--k", "3", "--N", "150", "--trials", "5", "--seed", "6", "--out", out]
    )
    assert status == 0
    report = json.loads(_read(out / "report.json"))
    assert report["passed"] is True
    assert all(t["blip_count"] == 3 for t in report["per_trial"])


def test_verify_split_fails_when_regimes_collide(tmp_path):
    # N too small for the exponent: the windows overlap, every trial errors
    out = tmp_path / "split-bad"
    status = _run_cli(
        ["verify-split", "--k", "3", "--N", "20", "--trials", "3", "--exponent", "0.9", "--seed", "6", "--out", out]
    )
    assert status == 1
    report = json.loads(_read(out / "report.json"))
    assert report["passed"] is False
    assert any("error" in t for t in report["per_trial"])


def test_compare_command(tmp_path):
    out = tmp_path / "compare"
    status = _run_cli(
        ["compare", "--k", "2", "--N", "80", "--g", "4", "--trials", "500", "--seed", "7", "--out", out]
    )
    assert status == 0
    report = json.loads(_read(out / "report.json"))
    assert set(report["moment_distances"]) == {"1", "2", "3", "4", "5", "6"}
    assert 0.0 <= report["ks_statistic"] <= 1.0


def test_unknown_flag_exits_nonzero_without_outputs(tmp_path):
    out = tmp_path / "nothing"
    with pytest.raises(SystemExit) as exc:
        _run_cli(["bulk", "--bogus", "1", "--out", out])
    assert exc.value.code == 2
    assert not out.exists()


def test_out_of_range_parameters_exit_nonzero_without_outputs(tmp_path):
    out = tmp_path / "nothing"
    status = _run_cli(["bulk", "--k", "5", "--N", "3", "--out", out])
    assert status == 2
    assert not out.exists()


def test_config_file_precedence(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({"N": 24, "seed": 9, "g": 3}))
    out = tmp_path / "cfgd"
    status = _run_cli(["blip", "--config", cfg_path, "--seed", "11", "--out", out])
    assert status == 0
    manifest = json.loads(_read(out / "manifest.json"))
    assert manifest["config"]["dim"] == 24  # from config file
    assert manifest["config"]["seed"] == 11  # flag overrides file
    assert manifest["derived"]["g"] == 3


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"mystery": 1}))
    assert _run_cli(["blip", "--config", cfg_path, "--out", tmp_path / "x"]) == 2
    assert not (tmp_path / "x").exists()


def test_resolve_config_defaults():
    config = resolve_config("bulk", {f: None for f in (
        "k", "dim", "w", "algebra", "dist", "trials", "g", "n", "m",
        "max_m", "bins", "exponent", "seed", "out", "fmt",
    )})
    assert config.w == 0.0  # bulk experiments default to the rank-free ensemble
    assert config.dim == 400
    assert config.trials == 40


def test_rerun_same_config_identical(tmp_path):
    config = resolve_config("bulk", dict(
        k=2, dim=30, w=0.0, algebra=None, dist=None, trials=4, g=None, n=None, m=None,
        max_m=4, bins=16, exponent=None, seed=21, out=tmp_path / "a", fmt=None,
    ))
    run(config)
    config2 = resolve_config("bulk", dict(
        k=2, dim=30, w=0.0, algebra=None, dist=None, trials=4, g=None, n=None, m=None,
        max_m=4, bins=16, exponent=None, seed=21, out=tmp_path / "b", fmt=None,
    ))
    run(config2)
    for name in ("eigenvalues.csv", "moments.csv", "histogram.csv"):
        assert _read(tmp_path / "a" / name) == _read(tmp_path / "b" / name)
