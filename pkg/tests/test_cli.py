import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratcorr.cli import RunConfig, main, render_density
from ratcorr.errors import ConfigError
from ratcorr.sphere import h_from_complex

POWERS = [
    {"num": [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], "den": [[1.0, 0.0]], "mult": 1},
    {"num": [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], "den": [[1.0, 0.0]], "mult": 1},
]


def write_cfg(tmp_path, **kw):
    d = {"generators": POWERS}
    d.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    return str(path)


def load(path):
    with open(path) as f:
        return json.load(f)


def test_degrees(tmp_path):
    out = tmp_path / "o"
    assert main(["degrees", "--config", write_cfg(tmp_path), "--out", str(out)]) == 0
    assert load(out / "degrees.json") == {"d1": 5, "d0": 2, "key_condition": True}
    manifest = load(out / "manifest.json")
    assert manifest["config"] == RunConfig.from_json((out / "config.json").read_text()).to_dict()
    assert set(manifest["versions"]) == {"python", "numpy", "scipy", "ratcorr"}


def test_repelling_csv_counts(tmp_path):
    out = tmp_path / "o"
    assert main(["repelling", "--powers", "2,3", "--n", "2", "--out", str(out)]) == 0
    with open(out / "fixed_points.csv") as f:
        rows = list(csv.DictReader(f))
    assert sum(int(r["weight"]) for r in rows) == 29
    with open(out / "repelling.csv") as f:
        reader = csv.reader(f)
        assert next(reader) == ["re", "im", "word_indices", "multiplier", "weight"]
        rep = list(reader)
    assert all(float(r[3]) > 1 for r in rep)
    summary = load(out / "summary.json")
    assert summary["bezout_count"] == 29 and summary["fixed_point_weight"] == 29
    assert not summary["lower_bound_only"]


def test_pullback_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["pullback", "--powers", "2,3", "--n", "3", "--w0", "1,0", "--out", str(out)]) == 0
    with open(out / "measure.csv") as f:
        reader = csv.reader(f)
        assert next(reader) == ["re", "im", "at_infinity", "weight"]
        w = sum(float(r[3]) for r in reader)
    assert w == pytest.approx(1.0)
    summary = load(out / "summary.json")
    assert summary["mass"] == pytest.approx(1.0)
    assert len(summary["bins"]["mass"]) == 6 * 8 * 8


def test_sample_determinism_across_workers(tmp_path):
    outs = []
    for workers in (1, 2, 4):
        out = tmp_path / f"w{workers}"
        args = ["pullback", "--powers", "2,3", "--n", "3", "--mode", "sample", "--count", "20000", "--seed", "5",
                "--workers", str(workers), "--out", str(out)]
        assert main(args) == 0
        outs.append(((out / "measure.csv").read_bytes(), (out / "summary.json").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_render_annulus(tmp_path):
    out = tmp_path / "o"
    assert main(["render", "--powers", "2,3", "--n", "5", "--w0", "0.6,0.8", "--out", str(out)]) == 0
    data = (out / "density.pgm").read_bytes()
    header = b"P5\n256 256\n255\n"
    assert data.startswith(header)
    img = np.frombuffer(data[len(header):], dtype=np.uint8).reshape(256, 256)
    assert img[128, 128] == 0
    rows, cols = np.nonzero(img)
    x = -1.5 + (cols + 0.5) * 3 / 256
    y = 1.5 - (rows + 0.5) * 3 / 256
    r = np.hypot(x, y)
    assert len(r) > 100
    assert r.min() > 0.9 and r.max() < 1.1


def test_render_density_log_scale():
    z = np.array([0.1 + 0.1j] * 9 + [-0.5 + 0.5j])
    img = render_density(h_from_complex(z), [-1, 1, -1, 1], 4)
    assert img.max() == 255
    assert sorted(np.unique(img).tolist()) == [0, 77, 255]


def test_other_commands_run(tmp_path):
    cfg = write_cfg(tmp_path, seed=3)
    for cmd, extra, files in [
        ("compose", ["--n", "2"], ["compose.json", "words.csv"]),
        ("compare", ["--n", "3"], ["compare.json"]),
        ("shrink-probe", ["--n", "4", "--samples", "50"], ["shrink.json", "shrink.csv"]),
        ("branch-bound", ["--n", "3", "--center", "0.6,0.8", "--radius", "0.05"], ["branch_bound.json"]),
        ("dimension", ["--n", "5"], ["dimension.json", "lambda.csv", "sample.csv"]),
        ("bound", ["--source", "circle"], ["bound.json", "lambda.csv"]),
    ]:
        out = tmp_path / cmd
        assert main([cmd, "--config", cfg, "--out", str(out)] + extra) == 0, cmd
        for f in files + ["manifest.json", "config.json"]:
            assert (out / f).exists(), (cmd, f)
    bb = load(tmp_path / "branch-bound" / "branch_bound.json")
    assert bb["regular_branches"] >= bb["bound"]
    assert abs(bb["fraction"] - 0.04) <= 1e-12
    comp = load(tmp_path / "compose" / "compose.json")
    assert (comp["d1"], comp["d0"]) == (25, 4)


def test_exit_codes(tmp_path):
    assert main(["pullback", "--powers", "2,3", "--out", str(tmp_path / "a")]) == 2  # seed missing
    assert main(["pullback", "--powers", "2,3", "--n", "12", "--seed", "1", "--out", str(tmp_path / "b")]) == 3
    assert main(["degrees", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"generators": POWERS, "caps": {"atoms": -1}}))
    assert main(["degrees", "--config", str(bad), "--out", str(tmp_path / "c")]) == 2
    mob = tmp_path / "mob.json"
    mob.write_text(json.dumps({"generators": [{"num": [[1, 0], [2, 0]], "den": [[-1, 0], [1, 0]]}], "seed": 1}))
    assert main(["pullback", "--config", str(mob), "--out", str(tmp_path / "d")]) == 2  # key condition fails


def test_config_error_names_field():
    with pytest.raises(ConfigError) as e:
        RunConfig.from_dict({"generators": POWERS, "command": "degrees", "grid": 1})
    assert e.value.field == "grid"
    with pytest.raises(ConfigError) as e:
        RunConfig.from_dict({"generators": POWERS, "command": "degrees", "bogus": 1})
    assert e.value.field == "bogus"
    with pytest.raises(ConfigError) as e:
        RunConfig.from_dict({"generators": [{"num": [[1, 0]], "mult": 0}], "command": "degrees"})
    assert e.value.field == "generators[0].mult"


@settings(max_examples=50, deadline=None)
@given(
    st.sampled_from(["degrees", "pullback", "repelling", "dimension"]),
    st.integers(0, 6),
    st.integers(0, 2**31),
    st.integers(1, 64),
    st.floats(1e-4, 0.9),
)
def test_config_round_trip_byte_identical(command, n, seed, grid, radius):
    cfg = RunConfig.from_dict({"generators": POWERS, "command": command, "n": n, "seed": seed, "grid": max(grid, 2), "radius": radius})
    text = cfg.to_json()
    assert RunConfig.from_json(text).to_json() == text
