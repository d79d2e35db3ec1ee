import csv
import filecmp

import numpy as np
import pytest
import yaml

from fracks.cli import EXIT_MISSING, EXIT_NUMERICAL, EXIT_OK, EXIT_SCHEMA, main
from fracks.config import PRESETS, SchemaError, dump_config, list_presets, load_config, preset_config, resolve
from fracks.spectral_core import load_snapshot


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def smalldata_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("smalldata")
    assert main(["run", "--preset", "smalldata-2d", "--out", str(out)]) == EXIT_OK
    return out


class TestConfig:
    def test_defaults_filled(self):
        cfg = resolve({"study": "simulate"})
        assert cfg["solver"]["integrator"] == "ETD2RK"
        assert cfg["grid"]["N"] == 64

    def test_unknown_preset(self):
        with pytest.raises(SchemaError, match="unknown name"):
            resolve({"preset": "no-such-thing"})

    def test_every_preset_resolves(self):
        for name in PRESETS:
            assert preset_config(name)["preset"] == name

    def test_lists_all_offending_keys(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("study: simulate\nfoo: 1\ngrid: {M: 3}\nsolver: {dtt: 0.1}\n")
        with pytest.raises(SchemaError) as info:
            load_config(p)
        assert info.value.problems == ["foo", "grid.M", "solver.dtt"]

    def test_bad_study(self):
        with pytest.raises(SchemaError, match="study"):
            resolve({"study": "nope"})

    def test_dump_round_trip(self):
        cfg = preset_config("kernel-norms", seed=3)
        assert resolve(yaml.safe_load(dump_config(cfg))) == cfg

    def test_empty_file_is_invalid(self, tmp_path):
        p = tmp_path / "empty.yaml"
        p.write_text("")
        with pytest.raises(SchemaError):
            load_config(p)


class TestPresetsCommand:
    def test_listing(self, capsys):
        assert main(["presets"]) == EXIT_OK
        first = capsys.readouterr().out
        assert "smalldata-2d" in first and "gevrey-alpha15" in first
        assert len(first.splitlines()) == len(list_presets())
        main(["presets"])
        assert capsys.readouterr().out == first


class TestExitCodes:
    def test_missing_file(self, capsys):
        assert main(["run", "/nonexistent/cfg.yaml"]) == EXIT_MISSING
        assert "not found" in capsys.readouterr().err

    def test_schema_error(self, tmp_path, capsys):
        p = tmp_path / "bad.yaml"
        p.write_text("study: simulate\nfoo: 1\ngrid: {M: 3}\n")
        assert main(["run", str(p)]) == EXIT_SCHEMA
        err = capsys.readouterr().err
        assert "foo" in err and "grid.M" in err

    def test_invalid_value(self, tmp_path, capsys):
        p = tmp_path / "alpha.yaml"
        p.write_text(f"study: simulate\nmodel: {{alpha: 3.0}}\noutput: {tmp_path / 'o'}\n")
        assert main(["run", str(p)]) == EXIT_SCHEMA
        assert "invalid parameter value" in capsys.readouterr().err

    def test_no_config(self, capsys):
        assert main(["run"]) == EXIT_SCHEMA

    def test_numerical_failure(self, tmp_path, capsys):
        out = tmp_path / "boom"
        p = tmp_path / "boom.yaml"
        cfg = {
            "study": "decay-study",
            "output": str(out),
            "grid": {"N": 32},
            "solver": {"dt": 0.05},
            "initial": {"kind": "gaussian", "mass": 1e5, "width": 0.1},
            "params": {"window": [0.1, 1.0]},
        }
        p.write_text(yaml.safe_dump(cfg))
        assert main(["run", str(p)]) == EXIT_NUMERICAL
        diag = (out / "diagnostics.txt").read_text()
        assert diag.startswith("numerical failure")
        assert str(out / "diagnostics.txt") in capsys.readouterr().err


class TestRunOutputs:
    def test_files(self, smalldata_dir):
        names = {p.name for p in smalldata_dir.iterdir()}
        assert {"trajectory.csv", "config.resolved.yaml", "run_metadata.txt", "final.npz", "linf.svg"} <= names

    def test_metadata(self, smalldata_dir):
        meta = (smalldata_dir / "run_metadata.txt").read_text()
        assert "preset: smalldata-2d" in meta and "seed: 0" in meta
        assert "blowup_detector: heuristic" in meta
        assert "summary.status: completed" in meta

    def test_times_increase(self, smalldata_dir):
        t = np.array([float(r["t"]) for r in read_csv(smalldata_dir / "trajectory.csv")])
        assert np.all(np.diff(t) > 0)
        assert t[-1] == pytest.approx(1.0)

    def test_tail_fraction_monotone_until_roundoff(self, smalldata_dir):
        tf = np.array([float(r["tail_fraction"]) for r in read_csv(smalldata_dir / "trajectory.csv")])
        # below ~1e-28 the tail is roundoff and only fluctuates
        live = np.flatnonzero(tf > 1e-28)
        seg = tf[1 : live[-1] + 1]
        assert len(seg) > 20
        assert np.all(np.diff(seg) <= 0)

    def test_snapshot_loads(self, smalldata_dir):
        u = load_snapshot(smalldata_dir / "final.npz")
        assert u.grid.points_per_axis == 64
        assert u.mass == pytest.approx(0.4 * np.pi, rel=1e-12)

    def test_config_echo_reproduces(self, smalldata_dir, tmp_path):
        echo = smalldata_dir / "config.resolved.yaml"
        cfg = load_config(echo)
        assert cfg == preset_config("smalldata-2d", output=str(smalldata_dir))

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert main(["run", "--preset", "decay-alpha2-sigma1", "--seed", "42", "--out", str(d)]) == EXIT_OK
        files = sorted(p.name for p in a.iterdir() if p.suffix in (".csv", ".svg", ".txt"))
        assert any(f.endswith(".csv") for f in files) and any(f.endswith(".svg") for f in files)
        match, mismatch, errors = filecmp.cmpfiles(a, b, files, shallow=False)
        assert not mismatch and not errors


class TestVerifyCommand:
    def test_all_pass(self, capsys):
        assert main(["verify"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 12 and all(l.startswith("PASS") for l in lines)
