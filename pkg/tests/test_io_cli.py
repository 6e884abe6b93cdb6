import json
import math

import numpy as np
import pytest

from cubiclab.blaschke import Grid2D
from cubiclab.blaschke.io import heatmap_svg, load_field, save_field
from cubiclab.cli import PRESETS, RunReport, main
from cubiclab.flatsurface import presets, tighten_geodesic
from cubiclab.flatsurface import io as fsio
from cubiclab.flatsurface.surface import area


def test_surface_json_roundtrip(tmp_path):
    s = presets.regular_octagon()
    path = tmp_path / "octagon.json"
    fsio.save_surface(s, path)
    s2 = fsio.load_surface(path)
    assert abs(area(s2) - area(s)) < 1e-12
    assert s2.orbit_orders == s.orbit_orders
    assert s2.gluings == s.gluings


def test_class_json_roundtrip(tmp_path):
    path = tmp_path / "classes.json"
    fsio.save_classes(presets.torus_marking(), path)
    loaded = fsio.load_classes(path)
    assert [c.crossings for c in loaded] == \
        [c.crossings for c in presets.torus_marking()]
    assert loaded[0].label == "(1,0)"


def test_geodesic_svg(tmp_path):
    s = presets.square_torus()
    g = tighten_geodesic(s, presets.torus_class(1, 2), tol=1e-12)
    out = tmp_path / "geo.svg"
    fsio.render_geodesic_svg(s, g, out)
    text = out.read_text()
    assert text.startswith("<svg") and "polyline" in text


def test_field_dump_roundtrip(tmp_path):
    g = Grid2D(0, 1, 0, 2, 8, 12)
    field = np.arange(8 * 12, dtype=float).reshape(12, 8)
    save_field(field, g, tmp_path / "psi")
    arr, header = load_field(tmp_path / "psi")
    assert np.array_equal(arr, field)
    assert header["ny"] == 12 and header["nx"] == 8
    assert header["order"] == "row-major"
    heatmap_svg(field, tmp_path / "psi.svg", title="psi")
    assert (tmp_path / "psi.svg").read_text().startswith("<svg")


def test_run_report_roundtrip():
    rep = RunReport("spectrum", "abc123")
    rep.add("c1", "first", True, 0.5, 1.0)
    rep.add("c2", "second", False, 2.0, 1.0)
    rep.wall_time = 0.25
    d = json.loads(json.dumps(rep.to_dict()))
    back = RunReport.from_dict(d)
    assert back.command == "spectrum"
    assert not back.all_passed
    assert [c.check_id for c in back.checks] == ["c1", "c2"]
    assert back.to_dict() == rep.to_dict()


def test_cli_spectrum_preset(tmp_path):
    out = tmp_path / "run"
    rc = main(["spectrum", "--preset", "spectrum-square-torus",
               "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["all_passed"]
    ids = {c["check_id"] for c in report["checks"]}
    assert {"gauss-bonnet", "cone-arithmetic", "torus-lattice-lengths"} <= ids
    csv_text = (out / "spectrum.csv").read_text()
    assert "(1,1)" in csv_text


def test_cli_reproducibility(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert main(["surgery", "--preset", "surgery-cylinder-ray",
                     "--out", str(out)]) == 0
    assert (out1 / "ray_spectra.csv").read_bytes() == \
        (out2 / "ray_spectra.csv").read_bytes()
    r1 = json.loads((out1 / "report.json").read_text())
    r2 = json.loads((out2 / "report.json").read_text())
    assert r1["config_hash"] == r2["config_hash"]
    assert [c["measured"] for c in r1["checks"]] == \
        [c["measured"] for c in r2["checks"]]


def test_cli_config_file(tmp_path):
    cfg = dict(PRESETS["surgery-glue-tori"])
    cfg["eps"] = 0.15
    path = tmp_path / "glue.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "run"
    rc = main(["surgery", "--config", str(path), "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["all_passed"]


def test_cli_missing_config_file(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["spectrum", "--config", str(tmp_path / "nope.json"),
              "--out", str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert "nope.json" in err


def test_cli_missing_surface_file(tmp_path, capsys):
    cfg = {"command": "spectrum", "surface": str(tmp_path / "missing.json"),
           "marking": "torus-basic", "seed": 0}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    rc = main(["spectrum", "--config", str(path),
               "--out", str(tmp_path / "o")])
    assert rc == 2
    out = capsys.readouterr().out
    assert "missing.json" in out


def test_cli_limits_and_glue(tmp_path):
    assert main(["limits", "--preset", "limits-appendix",
                 "--out", str(tmp_path / "lim")]) == 0
    assert main(["surgery", "--preset", "surgery-glue-tori",
                 "--out", str(tmp_path / "glue")]) == 0
    rows = (tmp_path / "lim" / "limits.csv").read_text().splitlines()
    assert rows[0].startswith("sweep")
    assert len(rows) == 5
