import hashlib
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from sle0.cli import (
    EXIT_CHECK,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    census_theta,
    main,
    normalize_config,
    preset_theta,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SVG_NS = "{http://www.w3.org/2000/svg}"


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run_json(args, capsys):
    code = main(args)
    return code, json.loads(capsys.readouterr().out)


def test_solve_cube_two_charges(tmp_path):
    out = tmp_path / "s.json"
    cfg = write(tmp_path, {"theta": "equispaced", "n": 3, "m": 2})
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_OK
    sols = json.loads(out.read_text())["solutions"]
    target = sorted([-1.5 + math.sqrt(5) / 2, -1.5 - math.sqrt(5) / 2])
    assert any(
        np.allclose(sorted(x[0] for x in s["xi"]), target, atol=1e-8)
        and all(abs(x[1]) < 1e-8 for x in s["xi"])
        for s in sols
    )


def test_solve_m_zero(tmp_path, capsys):
    code, d = run_json(["solve", "--config", write(tmp_path, {"theta": [0.0, 2.0]})], capsys)
    assert code == EXIT_OK
    assert d["solutions"] == []
    assert d["h_value"] == pytest.approx(d["h_expected"])


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["solve", "--config", str(p)]) == EXIT_USAGE


@pytest.mark.parametrize("cfg", [
    {"theta": "radial"},
    {"n": 2},
    {"theta": [0.0, 1.0], "n": 3},
    {"theta": [1.0, 0.5]},
    {"theta": [0.0], "colour": "red"},
    {"theta": "equispaced"},
    {"theta": [0.0, 1.0], "xi_init": [[0.5, 0.1]], "m": 2},
])
def test_schema_violations(tmp_path, cfg):
    assert main(["solve", "--config", write(tmp_path, cfg)]) == EXIT_USAGE


def test_missing_file():
    assert main(["solve", "--config", "/nonexistent/cfg.json"]) == EXIT_USAGE


def test_unknown_subcommand_and_suite(tmp_path):
    assert main(["frobnicate"]) == EXIT_USAGE
    cfg = write(tmp_path, {"theta": [0.0, 2.0]})
    assert main(["verify", "--suite", "nope", "--config", cfg]) == EXIT_USAGE


def test_no_convergence_exit(tmp_path):
    cfg = write(tmp_path, {"theta": "odd-equispaced", "n": 4, "eta": -1.0,
                           "xi_init": [[0.1, 0.05], [7.0, -3.0]], "solver": {"tol": 1e-15}})
    assert main(["trace", "--config", cfg]) == EXIT_NUMERIC


def test_presets():
    np.testing.assert_allclose(preset_theta("odd-equispaced", 4), [math.pi / 4 * k for k in (1, 3, 5, 7)])
    np.testing.assert_allclose(preset_theta("equispaced", 3), [0, 2 * math.pi / 3, 4 * math.pi / 3])
    cfg = normalize_config({"theta": "equispaced", "n": 2, "xi_init": [[1, 0]]})
    assert cfg["m"] == 1 and cfg["eta"] == 0.0


def test_trace_four_unit_charges(tmp_path, capsys):
    csv_p, svg_p = tmp_path / "t.csv", tmp_path / "t.svg"
    code, pat = run_json(["trace", "--config", str(CONFIGS / "four_unit_charges.json"), "--out", str(csv_p),
                          "--svg", str(svg_p)], capsys)
    assert code == EXIT_OK
    assert pat["chords"] == [[1, 4], [2, 3]] and pat["rays"] == []
    assert csv_p.read_text().splitlines()[0] == "traj_id,start_zero,endpoint_kind,s,re,im"
    root = ET.parse(svg_p).getroot()
    assert len(root.findall(f"{SVG_NS}polyline")) == 4


def test_trace_radial_segment(tmp_path, capsys):
    svg_p = tmp_path / "r.svg"
    code, pat = run_json(["trace", "--config", str(CONFIGS / "radial.json"), "--svg", str(svg_p)], capsys)
    assert code == EXIT_OK and pat["rays"] == [1]
    (line,) = ET.parse(svg_p).getroot().findall(f"{SVG_NS}polyline")
    ys = {p.split(",")[1] for p in line.get("points").split()}
    assert ys == {"400.000"}


def test_trace_spiral(tmp_path, capsys):
    code, pat = run_json(["trace", "--config", str(CONFIGS / "spiral.json")], capsys)
    assert code == EXIT_OK
    (ray,) = pat["ray_windings"]
    assert ray["clockwise"] and ray["winding"] < -2 * math.pi


def test_svg_conventions(tmp_path, capsys):
    svg_p = tmp_path / "f.svg"
    main(["trace", "--config", str(CONFIGS / "cube_one_charge.json"), "--svg", str(svg_p)])
    capsys.readouterr()
    root = ET.parse(svg_p).getroot()
    assert root.tag == f"{SVG_NS}svg"
    assert root.get("version") == "1.1" and root.get("baseProfile") == "basic"
    assert root.get("width") == "800" and root.get("height") == "800"
    dots = {}
    for c in root.findall(f"{SVG_NS}circle"):
        dots.setdefault(c.get("fill"), []).append((float(c.get("cx")), float(c.get("cy"))))
    assert len(dots["red"]) == 3 and len(dots["yellow"]) == 1 and dots["green"] == [(400.0, 400.0)]
    # zero 2 sits at angle 2 pi / 3, above the centre: y is flipped
    assert dots["red"][1][1] < 400
    assert all(p.get("stroke") == "black" for p in root.findall(f"{SVG_NS}polyline"))


def test_verify_conserved_two_point(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "conserved", "--config", str(CONFIGS / "two_point.json"),
                 "--out", str(out)]) == EXIT_OK
    rows = {r["name"]: r for r in json.loads(out.read_text())["checks"]}
    assert rows["N_relative_drift"]["measured"] < 1e-6


def test_verify_calogero_contents(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "calogero", "--config", str(CONFIGS / "two_point.json"),
                 "--out", str(out)]) == EXIT_OK
    rows = {r["name"]: r for r in json.loads(out.read_text())["checks"]}
    for key in ("cs_vs_loewner_theta", "lax_identity_shifted", "lax_identity_literal", "L2_one_norm",
                "bracket_on_Nc", "constants_table"):
        assert key in rows
    table = rows["constants_table"]["measured"]
    assert "H_j_reference" in table and "H_reference" in table and "energy_reference" in table


@pytest.mark.parametrize("suite", ["stationary", "quantum", "commutation"])
def test_verify_suites_pass(tmp_path, suite):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", suite, "--config", str(CONFIGS / "cube_one_charge.json"),
                 "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["pass"] is True


def test_verify_reports_failure(tmp_path):
    # the quantum suite compares against the closed forms; a coarse step fails the 1e-5 gate
    cfg = write(tmp_path, {"theta": [0.0, 2.0, 4.0], "quantum": {"kappa": [2.0], "fd_step": 0.2}})
    assert main(["verify", "--suite", "quantum", "--config", cfg, "--out", str(tmp_path / "v.json")]) == EXIT_CHECK


@pytest.mark.parametrize("n,m,count", [(2, 1, 2), (3, 1, 3), (1, 0, 1)])
def test_count(tmp_path, n, m, count):
    out = tmp_path / "c.json"
    assert main(["count", "--n", str(n), "--m", str(m), "--trials", "50", "--out", str(out)]) == EXIT_OK
    d = json.loads(out.read_text())
    assert d["count"] == count and d["target"] == math.comb(n, m)
    assert len(d["patterns"]) == count


def test_count_needs_sizes():
    assert main(["count"]) == EXIT_USAGE


def test_census_theta_separated():
    for n in range(1, 6):
        th = np.array(census_theta(n, 3))
        if n > 1:
            assert np.diff(np.concatenate([th, [th[0] + 2 * math.pi]])).min() > math.pi / n


def test_evolve_writes_series(tmp_path):
    out, svg = tmp_path / "e.csv", tmp_path / "e.svg"
    assert main(["evolve", "--config", str(CONFIGS / "two_point.json"), "--T", "0.05", "--dt", "1e-3",
                 "--out", str(out), "--svg", str(svg)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "t,theta_1,theta_2,re_xi_1,im_xi_1,capacity" and len(lines) == 52
    ET.parse(svg)


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@pytest.mark.parametrize("args", [
    ["trace", "--config", str(CONFIGS / "four_real_charges.json")],
    ["solve", "--config", str(CONFIGS / "four_spin.json")],
    ["count", "--n", "3", "--m", "2", "--trials", "40", "--seed", "7"],
    ["verify", "--suite", "conserved", "--config", str(CONFIGS / "four_unit_charges.json")],
])
def test_deterministic(tmp_path, capsys, args):
    digests = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        extra = ["--out", str(out)]
        if args[0] == "trace":
            extra += ["--svg", str(tmp_path / f"s{k}.svg")]
        main(args + extra)
        stdout = capsys.readouterr().out
        files = [out] + ([tmp_path / f"s{k}.svg"] if args[0] == "trace" else [])
        digests.append((stdout, [_digest(f) for f in files]))
    assert digests[0] == digests[1]
