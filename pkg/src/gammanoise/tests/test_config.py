"""
Tests for run configuration loading and overrides.
"""

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from gammanoise.config import (
    OUT_DIR_ENV,
    RunConfig,
    ThetaSpec,
    apply_overrides,
    load_config,
    resolve_out_dir,
)
from gammanoise.core_model import Partition, StepFunction
from gammanoise.errors import ConfigurationError
from gammanoise.wick import expectation


def _write(tmp: str, name: str, text: str) -> Path:
    path = Path(tmp) / name
    path.write_text(text, encoding="utf-8")
    return path


class TestDefaults(unittest.TestCase):
    """Test the built-in defaults."""

    def test_defaults(self):
        cfg = RunConfig()
        self.assertEqual(cfg.seed, 20240601)
        self.assertEqual(cfg.out_dir, "results")
        self.assertEqual(cfg.monte_carlo.samples, 1_000_000)
        self.assertEqual(cfg.truncation.degree, 8)
        self.assertEqual(len(cfg.theta.specs), 3)
        self.assertEqual(cfg.logging.level, "INFO")

    def test_default_thetas_build(self):
        theta = RunConfig().theta.specs[1].build()
        self.assertIsInstance(theta, StepFunction)
        self.assertEqual(theta.partition, Partition((0.0, 1.0, 3.0)))
        self.assertEqual(theta.values, (1.0, 2.0))

    def test_complex_theta(self):
        theta = ThetaSpec(edges=[0.0, 1.0], values=[[0.0, 2.0]]).build()
        self.assertEqual(theta.values, (2j,))

    def test_partition_section(self):
        cfg = RunConfig()
        self.assertEqual(cfg.partition.build(), Partition.uniform(2.0, 4))
        cfg = RunConfig.model_validate({"partition": {"edges": [0.0, 0.5, 3.0]}})
        self.assertEqual(cfg.partition.build().horizon, 3.0)

    def test_verhulst_initial_value(self):
        section = RunConfig().verhulst
        y0 = section.y0()
        self.assertEqual(y0.partition, Partition.uniform(2.0, 4))
        self.assertEqual(expectation(y0), 0.5)
        self.assertAlmostEqual(y0.coeff((1, 0, 0, 0)), 0.1, places=15)
        refined = section.y0(refine=2)
        self.assertEqual(refined.partition.n_cells, 8)
        self.assertAlmostEqual(refined.coeff((1, 0, 0, 0, 0, 0, 0, 0)), 0.1, places=15)
        self.assertAlmostEqual(refined.coeff((0, 1, 0, 0, 0, 0, 0, 0)), 0.1, places=15)
        self.assertAlmostEqual(refined.coeff((0, 0, 1, 0, 0, 0, 0, 0)), 0.0, places=15)

    def test_verhulst_grid(self):
        grid = RunConfig().verhulst.t_grid()
        self.assertEqual(len(grid), 21)
        self.assertEqual(grid[0], 0.0)
        self.assertEqual(grid[-1], 2.0)

    def test_json_is_stable(self):
        self.assertEqual(RunConfig().to_json(), RunConfig().to_json())
        self.assertEqual(json.loads(RunConfig().to_json())["seed"], 20240601)


class TestLoading(unittest.TestCase):
    """Test JSON/TOML loading and validation errors."""

    def setUp(self):
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop(OUT_DIR_ENV, None)

    def tearDown(self):
        self.env.stop()

    def test_no_path_gives_defaults(self):
        self.assertEqual(load_config().to_json(), RunConfig().to_json())

    def test_json_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write(tmp, "run.json", json.dumps({"seed": 7, "verhulst": {"a": 0.0, "cells": 2}}))
            cfg = load_config(path)
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.verhulst.a, 0.0)
        self.assertEqual(cfg.verhulst.cells, 2)

    def test_toml_file(self):
        text = 'seed = 11\n\n[logging]\nlevel = "debug"\n\n[lln]\nprobe_horizons = [10.0, 100.0]\n'
        with tempfile.TemporaryDirectory() as tmp:
            cfg = load_config(_write(tmp, "run.toml", text))
        self.assertEqual(cfg.seed, 11)
        self.assertEqual(cfg.logging.level, "DEBUG")
        self.assertEqual(cfg.lln.probe_horizons, [10.0, 100.0])

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config("/nonexistent/gammanoise.json")

    def test_bad_syntax(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigurationError):
                load_config(_write(tmp, "bad.json", "{seed: 1"))
            with self.assertRaises(ConfigurationError):
                load_config(_write(tmp, "bad.toml", "seed = = 1"))

    def test_invalid_values(self):
        cases = [
            {"unknown_section": {}},
            {"seed": -1},
            {"verhulst": {"a": -0.5}},
            {"verhulst": {"y0_constant": 0.0}},
            {"verhulst": {"cells": 2, "y0_linear": {"3": 0.1}}},
            {"theta": {"specs": [{"edges": [0.0, 1.0], "values": [1.0, 2.0]}]}},
            {"theta": {"specs": []}},
            {"partition": {"edges": [0.5, 1.0]}},
            {"lln": {"probe_horizons": [100.0, 10.0]}},
            {"logging": {"level": "LOUD"}},
        ]
        with tempfile.TemporaryDirectory() as tmp:
            for i, payload in enumerate(cases):
                with self.subTest(payload=payload):
                    with self.assertRaises(ConfigurationError):
                        load_config(_write(tmp, f"case{i}.json", json.dumps(payload)))

    def test_env_out_dir(self):
        with patch.dict(os.environ, {OUT_DIR_ENV: "/tmp/gn-env"}):
            self.assertEqual(load_config().out_dir, "/tmp/gn-env")
            self.assertEqual(load_config(env=False).out_dir, "results")


class TestOverrides(unittest.TestCase):
    """Test command-line overrides."""

    def test_overrides(self):
        cfg = apply_overrides(RunConfig(), seed=3, samples=500, cells=2, degree=4, out="elsewhere")
        self.assertEqual(cfg.seed, 3)
        self.assertEqual(cfg.monte_carlo.samples, 500)
        self.assertEqual(cfg.levy.samples, 500)
        self.assertEqual(cfg.paths.n_paths, 500)
        self.assertEqual((cfg.truncation.cells, cfg.verhulst.cells), (2, 2))
        self.assertEqual((cfg.truncation.degree, cfg.verhulst.degree), (4, 4))
        self.assertEqual(cfg.out_dir, "elsewhere")

    def test_no_overrides_is_identity(self):
        cfg = RunConfig()
        self.assertEqual(apply_overrides(cfg).to_json(), cfg.to_json())

    def test_invalid_override(self):
        with self.assertRaises(ConfigurationError):
            apply_overrides(RunConfig(), cells=0)


class TestResolveOutDir(unittest.TestCase):
    """Test the out_dir lookup used for failure records."""

    def setUp(self):
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop(OUT_DIR_ENV, None)

    def tearDown(self):
        self.env.stop()

    def test_precedence(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write(tmp, "bad.json", json.dumps({"out_dir": "from-file", "bogus": 1}))
            self.assertEqual(resolve_out_dir(path), "from-file")
            os.environ[OUT_DIR_ENV] = "from-env"
            self.assertEqual(resolve_out_dir(path), "from-env")
            self.assertEqual(resolve_out_dir(path, out="from-flag"), "from-flag")

    def test_unreadable_config_falls_back(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(resolve_out_dir(Path(tmp) / "missing.json"), "results")
            self.assertEqual(resolve_out_dir(_write(tmp, "broken.json", "{not json")), "results")
            self.assertEqual(resolve_out_dir(_write(tmp, "list.json", "[1, 2]")), "results")
            self.assertEqual(resolve_out_dir(_write(tmp, "num.json", '{"out_dir": 3}')), "results")
        self.assertEqual(resolve_out_dir(), "results")


if __name__ == '__main__':
    unittest.main()
