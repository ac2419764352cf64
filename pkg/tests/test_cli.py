import numpy as np
import pytest

from ladderlab.cli import main, read_config


def test_solve_potential_order3_anchor(tmp_path):
    rc = main(
        [
            "solve-potential",
            "--order", "3",
            "--roots", "1,1,-2",
            "--omega", "1",
            "--x-range=-3:3",
            "--samples", "601",
            "--out-dir", str(tmp_path),
        ]
    )
    assert rc == 0
    found = False
    for path in tmp_path.glob("branch_*.csv"):
        data = np.genfromtxt(path, delimiter=",", names=True)
        idx = np.flatnonzero(np.isclose(data["x"], 1.0))
        if idx.size and np.isclose(data["V"][idx[0]], -1.5, atol=1e-9):
            found = True
    assert found
    assert (tmp_path / "branches.txt").exists()


def test_solve_potential_order4_anchor(tmp_path):
    rc = main(
        [
            "solve-potential",
            "--order", "4",
            "--variant", "rational",
            "--eps2", "1",
            "--omega", "1",
            "--x-range=0.5:4",
            "--samples", "701",
            "--out-dir", str(tmp_path),
        ]
    )
    assert rc == 0
    data = np.genfromtxt(tmp_path / "branch_01.csv", delimiter=",", names=True)
    idx = np.flatnonzero(np.isclose(data["x"], 2.0))
    assert idx.size and np.isclose(data["V"][idx[0]], 1.5, atol=1e-9)


def test_empty_range_is_usage_error(tmp_path):
    rc = main(
        [
            "solve-potential",
            "--order", "3",
            "--roots", "1,1,-2",
            "--x-range=3:-3",
            "--out-dir", str(tmp_path),
        ]
    )
    assert rc == 2


def test_unknown_subcommand_is_usage_error():
    assert main(["frobnicate"]) == 2


def test_verify_pass(tmp_path):
    rc = main(
        [
            "verify",
            "--order", "3",
            "--variant", "deformed",
            "--eps2", "1",
            "--omega", "1",
            "--states", "30",
            "--out-dir", str(tmp_path),
        ]
    )
    assert rc == 0
    report = (tmp_path / "report_01.csv").read_text().splitlines()
    assert report[0] == "equation,max_residual,tolerance,pass"


def test_verify_tabulated_negative_control(tmp_path):
    csv = tmp_path / "quartic.csv"
    xs = np.linspace(0.3, 4.0, 400)
    with open(csv, "w") as fh:
        fh.write("x,V,dV\n")
        for x in xs:
            fh.write(f"{x},{x**4},{4 * x**3}\n")
    rc = main(
        [
            "verify",
            "--order", "3",
            "--roots", "1,1,-2",
            "--omega", "1",
            "--potential-csv", str(csv),
            "--out-dir", str(tmp_path),
        ]
    )
    assert rc == 1


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# harmonic baseline\n"
        "order1 = 1\n"
        "order2 = 1\n"
        "omega1 = 1\n"
        "omega2 = 2\n"
        "s0 = 1,1,1,-3\n"
        "t_end = 8\n"
        "n_samples = 1200\n"
    )
    assert read_config(cfg)["omega2"] == "2"
    rc = main(
        ["--config", str(cfg), "simulate", "--out-dir", str(tmp_path / "a")]
    )
    assert rc == 0
    header = (tmp_path / "a" / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,x1,p1,x2,p2,H,K,J1,J2"
    assert (tmp_path / "a" / "trajectory.svg").exists()
    # an explicit flag beats the config value: detuning breaks the resonance
    rc = main(
        [
            "--config", str(cfg),
            "simulate",
            "--omega2", "1.4142135623730951",
            "--out-dir", str(tmp_path / "b"),
        ]
    )
    assert rc == 3


def test_bad_config_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this line has no equals sign\n")
    assert main(["--config", str(cfg), "simulate"]) == 2


def test_svg_is_valid_and_single_polyline(tmp_path):
    import xml.etree.ElementTree as ET

    rc = main(
        [
            "simulate",
            "--order1", "1",
            "--order2", "1",
            "--omega1", "1",
            "--omega2", "2",
            "--s0", "1,1,1,-3",
            "--t-end", "7",
            "--out-dir", str(tmp_path),
        ]
    )
    assert rc == 0
    text = (tmp_path / "trajectory.svg").read_text()
    root = ET.fromstring(text)
    assert root.tag.endswith("svg")
    assert root.get("version") == "1.1"
    polylines = root.findall(".//{http://www.w3.org/2000/svg}polyline")
    assert len(polylines) == 1
