import json

from percolab.cli import main


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_verify_domination_default_ball(tmp_path):
    out = tmp_path / "dom"
    code = main(["verify-domination", "--lattice", "z1", "--radius", "2",
                 "--out", str(out)])
    assert code == 0
    report = _read_json(out / "domination_report.json")
    assert report["ok"]
    assert len(report["points"]) == 9
    manifest = _read_json(out / "manifest.json")
    assert "domination_report.json" in manifest["outputs"]


def test_verify_domination_empty_grid(tmp_path):
    out = tmp_path / "empty"
    code = main(["verify-domination", "--lattice", "z1", "--radius", "1",
                 "--p", "", "--out", str(out)])
    assert code == 0
    report = _read_json(out / "domination_report.json")
    assert report["points"] == []


def test_q_override_produces_failure_witness(tmp_path):
    out = tmp_path / "override"
    code = main(["verify-domination", "--lattice", "z1", "--radius", "1",
                 "--p", "0.5", "--h", "0.5", "--q-override", "0.99",
                 "--out", str(out)])
    assert code == 1
    report = _read_json(out / "domination_report.json")
    assert not report["ok"]
    point = report["failures"][0]["point"]
    assert point["dominates"] is False
    assert point["certificate"]["event_min_elements"]


def test_verify_tail_bound_exact(tmp_path):
    out = tmp_path / "tail"
    code = main(["verify-tail-bound", "--mode", "exact", "--lattice", "z1",
                 "--radius", "2", "--out", str(out)])
    assert code == 0
    rows = (out / "tail_bound.csv").read_text().splitlines()
    assert rows[0] == "p,h,n,lhs,rhs,slack,verdict"
    assert all(line.endswith("PASS") for line in rows[1:])
    psi_rows = (out / "psi_exact.csv").read_text().splitlines()
    assert psi_rows[0] == "p,n,psi"
    assert len(psi_rows) == 1 + 3 * 6  # 3 p values, n = 0..5
    mag_rows = (out / "magnetization_exact.csv").read_text().splitlines()
    assert mag_rows[0] == "p,h,m"
    assert len(mag_rows) == 1 + 9


def test_verify_tail_bound_mc(tmp_path):
    out = tmp_path / "tailmc"
    code = main(["verify-tail-bound", "--mode", "mc", "--lattice", "z2",
                 "--p", "0.3", "--h", "0.2", "--n-max", "20",
                 "--samples", "1500", "--cap", "2000", "--out", str(out)])
    assert code == 0
    rows = (out / "tail_bound.csv").read_text().splitlines()
    assert len(rows) == 3  # header + n in {10, 20}


def test_decay_command(tmp_path):
    out = tmp_path / "decay"
    code = main(["decay", "--lattice", "z2", "--p", "0.4", "--n-max", "60",
                 "--samples", "4000", "--out", str(out)])
    assert code == 0
    fit = _read_json(out / "decay_fit.json")
    assert fit["rate"] > 0
    assert (out / "decay_curve.csv").exists()


def test_meanfield_command(tmp_path):
    out = tmp_path / "mf"
    code = main(["meanfield", "--p", "0.0,1.0", "--h", "0.05",
                 "--cap", "2000", "--samples", "60", "--lattice", "z2",
                 "--out", str(out)])
    assert code == 0
    rows = (out / "meanfield.csv").read_text().splitlines()
    assert all(line.endswith("PASS") for line in rows[1:])


def test_couple_demo_q_zero(tmp_path):
    out = tmp_path / "demo"
    code = main(["couple-demo", "--lattice", "z1", "--radius", "1",
                 "--p", "0.5", "--h", "0.5", "--q-override", "0.0",
                 "--out", str(out)])
    assert code == 0
    doc = _read_json(out / "couple_demo.json")
    assert doc["q"] == 0.0
    assert not any(doc["lower"])


def test_couple_demo_h_zero_identical_margins(tmp_path):
    # h = 0 leaves the conditional law equal to the product law, so with the
    # default q = p the lower and upper runs coincide
    out = tmp_path / "demo0"
    code = main(["couple-demo", "--lattice", "z1", "--radius", "1",
                 "--p", "0.5", "--h", "0.0", "--out", str(out)])
    assert code == 0
    doc = _read_json(out / "couple_demo.json")
    assert doc["q"] == 0.5
    assert doc["lower"] == doc["upper"]


def test_usage_error_exit_code(tmp_path):
    code = main(["verify-tail-bound", "--mode", "mc", "--lattice", "z2",
                 "--p", "not-a-number", "--out", str(tmp_path / "x")])
    assert code == 2


def test_cap_violation_exit_code(tmp_path):
    code = main(["verify-domination", "--lattice", "tri", "--radius", "1",
                 "--p", "0.5", "--h", "0.5", "--out", str(tmp_path / "cap")])
    assert code == 2  # 12 edges exceed the trace-enumeration cap


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": "0.5", "h": "0.5", "radius": 1}))
    out = tmp_path / "cfgout"
    code = main(["verify-domination", "--lattice", "z1",
                 "--config", str(cfg), "--out", str(out)])
    assert code == 0
    report = _read_json(out / "domination_report.json")
    assert len(report["points"]) == 1
    assert report["points"][0]["p"] == 0.5


def test_manifest_rerun_config(tmp_path):
    # a manifest doubles as a config file for reruns
    out1 = tmp_path / "run1"
    main(["verify-domination", "--lattice", "z1", "--radius", "1",
          "--p", "0.5", "--h", "0.5", "--out", str(out1)])
    out2 = tmp_path / "run2"
    code = main(["verify-domination", "--config", str(out1 / "manifest.json"),
                 "--out", str(out2)])
    assert code == 0
    r1 = (out1 / "domination_report.json").read_bytes()
    r2 = (out2 / "domination_report.json").read_bytes()
    assert r1 == r2


def test_byte_identical_reruns(tmp_path):
    args = ["decay", "--lattice", "z2", "--p", "0.45", "--n-max", "70",
            "--samples", "800", "--seed", "99"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    for name in ("decay_curve.csv", "decay_fit.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    m1 = _read_json(out1 / "manifest.json")
    m2 = _read_json(out2 / "manifest.json")
    assert m1["outputs"] == m2["outputs"]
    assert m1["args"] == m2["args"]
