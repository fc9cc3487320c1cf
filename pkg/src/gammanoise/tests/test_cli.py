"""
Tests for the command-line front end and its exit-status plumbing.
"""

import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

from gammanoise import cli
from gammanoise.config import OUT_DIR_ENV, RunConfig, apply_overrides
from gammanoise.errors import BranchError, PartitionMismatchError, SingularElementError
from gammanoise.logging import record_check


def _small_config(out_dir: str) -> dict:
    return {
        "seed": 99,
        "out_dir": out_dir,
        "monte_carlo": {"samples": 2000},
        "truncation": {"cells": 2, "degree": 3, "horizon": 1.0},
        "wick": {"n_triples": 3},
        "verhulst": {"horizon": 1.0, "cells": 2, "degree": 3, "t_step": 0.25,
                     "dt": 0.01, "n_random": 2},
        "logging": {"level": "WARNING"},
    }


def _all_commands_config(out_dir: str) -> dict:
    config = _small_config(out_dir)
    config.update({
        "monte_carlo": {"samples": 20000},
        "levy": {"samples": 3000},
        "lln": {"n_paths": 200, "probe_paths": 200},
        "ortho": {"mc_degree": 2},
        "paths": {"n_paths": 3},
    })
    return config


def _tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestRunPlumbing(unittest.TestCase):
    """Test exit statuses and summary.json with stubbed commands."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.cfg = apply_overrides(RunConfig(), out=self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def _summary(self, command: str) -> dict:
        return json.loads((Path(self.tmp.name) / command / "summary.json").read_text())

    def _run_with(self, body) -> int:
        with patch.dict(cli.COMMANDS, {"stub": body}):
            return cli.run("stub", self.cfg)

    def test_passing_command(self):
        def body(cfg, ctx, out):
            record_check(ctx, "ok", 0.0, 0.0, 1e-9, True)
        self.assertEqual(self._run_with(body), cli.EXIT_OK)
        report = self._summary("stub")
        self.assertTrue(report["passed"])
        self.assertEqual(report["context"]["command"], "stub")
        self.assertEqual(len(report["context"]["run_id"]), 12)
        self.assertNotIn("failure", report)

    def test_failed_check(self):
        def body(cfg, ctx, out):
            cli._check(ctx, "too_big", 1.0, 0.0, 1e-3)
        self.assertEqual(self._run_with(body), cli.EXIT_TOLERANCE)
        report = self._summary("stub")
        self.assertFalse(report["passed"])
        self.assertEqual(report["failure"]["error"], "ToleranceFailure")

    def test_numerical_failure(self):
        def body(cfg, ctx, out):
            raise SingularElementError("singular", time=0.5)
        self.assertEqual(self._run_with(body), cli.EXIT_TOLERANCE)
        self.assertEqual(self._summary("stub")["failure"]["error"], "SingularElementError")

    def test_domain_failures_are_config_errors(self):
        for error in (BranchError(0, -1.0), PartitionMismatchError("mismatch")):
            with self.subTest(error=type(error).__name__):
                def body(cfg, ctx, out, error=error):
                    raise error
                self.assertEqual(self._run_with(body), cli.EXIT_CONFIG)

    def test_unknown_command(self):
        self.assertEqual(cli.run("no-such-command", self.cfg), cli.EXIT_CONFIG)
        self.assertFalse(self._summary("no-such-command")["passed"])

    def test_run_id_is_deterministic(self):
        self.assertEqual(cli._run_id("ortho", self.cfg), cli._run_id("ortho", self.cfg))
        self.assertNotEqual(cli._run_id("ortho", self.cfg), cli._run_id("lln", self.cfg))

    def test_sub_seeds_differ_by_label(self):
        self.assertEqual(cli._sub_seed(1, "a"), cli._sub_seed(1, "a"))
        self.assertNotEqual(cli._sub_seed(1, "a"), cli._sub_seed(1, "b"))


class TestMain(unittest.TestCase):
    """Test argument parsing and real command runs on small settings."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop(OUT_DIR_ENV, None)
        self.config_path = Path(self.tmp.name) / "small.json"
        self.config_path.write_text(json.dumps(_small_config(self.tmp.name)), encoding="utf-8")

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def test_check_config(self):
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            status = cli.main(["check-config", "--config", str(self.config_path), "--seed", "5"])
        self.assertEqual(status, cli.EXIT_OK)
        self.assertIn('"seed": 5', buffer.getvalue())
        self.assertIn("Configuration is valid.", buffer.getvalue())

    def test_bad_config_exits_two(self):
        with redirect_stderr(io.StringIO()):
            status = cli.main(["ortho", "--config", str(Path(self.tmp.name) / "missing.json"),
                               "--out", self.tmp.name])
        self.assertEqual(status, cli.EXIT_CONFIG)

    def test_bad_override_exits_two(self):
        with redirect_stderr(io.StringIO()):
            status = cli.main(["verhulst", "--config", str(self.config_path), "--cells", "0"])
        self.assertEqual(status, cli.EXIT_CONFIG)

    def test_wick_selftest(self):
        status = cli.main(["wick-selftest", "--config", str(self.config_path)])
        out = Path(self.tmp.name) / "wick-selftest"
        self.assertEqual(status, cli.EXIT_OK)
        self.assertTrue((out / "wick_laws.csv").exists())
        self.assertTrue((out / "sample_element.json").exists())
        report = json.loads((out / "summary.json").read_text())
        self.assertTrue(report["passed"])
        self.assertIn("wick_inverse", [c["name"] for c in report["checks"]])

    def test_verhulst(self):
        status = cli.main(["verhulst", "--config", str(self.config_path)])
        out = Path(self.tmp.name) / "verhulst"
        self.assertEqual(status, cli.EXIT_OK)
        lines = (out / "moments.csv").read_text().splitlines()
        self.assertEqual(lines[0], "t,mean,variance,truncation_loss")
        self.assertEqual(len(lines), 6)
        names = {c["name"] for c in json.loads((out / "summary.json").read_text())["checks"]}
        self.assertTrue({"closed_form_vs_ode", "mean_logistic", "unit_fixed_point"} <= names)

    def test_outputs_are_reproducible(self):
        cli.main(["verhulst", "--config", str(self.config_path)])
        first = (Path(self.tmp.name) / "verhulst" / "moments.csv").read_bytes()
        cli.main(["verhulst", "--config", str(self.config_path)])
        second = (Path(self.tmp.name) / "verhulst" / "moments.csv").read_bytes()
        self.assertEqual(first, second)


class TestFailureRecords(unittest.TestCase):
    """Test that rejected configs and command lines still leave a summary.json."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop(OUT_DIR_ENV, None)

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def _write_config(self, **changes) -> Path:
        config = _small_config(self.tmp.name)
        for section, values in changes.items():
            config[section] = {**config.get(section, {}), **values} if isinstance(values, dict) else values
        path = Path(self.tmp.name) / "config.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        return path

    def _main(self, argv) -> int:
        with redirect_stderr(io.StringIO()):
            return cli.main(argv)

    def _failure(self, command: str) -> dict:
        summary_path = Path(self.tmp.name) / command / "summary.json"
        self.assertTrue(summary_path.exists(), msg=f"no failure record at {summary_path}")
        report = json.loads(summary_path.read_text())
        self.assertFalse(report["passed"])
        self.assertEqual(report["checks"], [])
        return report

    def test_invalid_value(self):
        path = self._write_config(verhulst={"y0_constant": 0})
        self.assertEqual(self._main(["verhulst", "--config", str(path)]), cli.EXIT_CONFIG)
        report = self._failure("verhulst")
        self.assertEqual(report["failure"]["error"], "ConfigurationError")
        self.assertIn("y0_constant", report["failure"]["message"])
        self.assertEqual(report["context"]["command"], "verhulst")

    def test_unknown_key(self):
        path = self._write_config(bogus=1)
        self.assertEqual(self._main(["ortho", "--config", str(path), "--seed", "7"]), cli.EXIT_CONFIG)
        report = self._failure("ortho")
        self.assertIn("bogus", report["failure"]["message"])
        self.assertEqual(report["context"]["seed"], 7)

    def test_bad_override(self):
        path = self._write_config()
        self.assertEqual(self._main(["verhulst", "--config", str(path), "--cells", "0"]), cli.EXIT_CONFIG)
        self.assertEqual(self._failure("verhulst")["failure"]["error"], "ConfigurationError")

    def test_missing_config_uses_out_flag(self):
        missing = str(Path(self.tmp.name) / "missing.json")
        self.assertEqual(self._main(["lln", "--config", missing, "--out", self.tmp.name]), cli.EXIT_CONFIG)
        self.assertIn("not found", self._failure("lln")["failure"]["message"])

    def test_out_dir_from_environment(self):
        os.environ[OUT_DIR_ENV] = self.tmp.name
        self.assertEqual(self._main(["paths", "--samples", "0"]), cli.EXIT_CONFIG)
        self._failure("paths")

    def test_unknown_command(self):
        self.assertEqual(self._main(["no-such-command", "--out", self.tmp.name]), cli.EXIT_CONFIG)
        report = self._failure("no-such-command")
        self.assertEqual(report["failure"]["error"], "ConfigurationError")

    def test_bad_flag_value(self):
        self.assertEqual(self._main(["cf-check", "--seed", "abc", "--out", self.tmp.name]), cli.EXIT_CONFIG)
        self._failure("cf-check")

    def test_unsafe_command_name(self):
        self.assertEqual(self._main(["../escape", "--out", self.tmp.name]), cli.EXIT_CONFIG)
        self._failure("invalid-command")

    def test_help_still_exits_cleanly(self):
        with redirect_stdout(io.StringIO()), self.assertRaises(SystemExit) as raised:
            cli.main(["--help"])
        self.assertEqual(raised.exception.code, 0)


class TestAllCommands(unittest.TestCase):
    """Run every command for real on a small config."""

    DETERMINISTIC = ("levy_khinchine", "ortho_quadrature", "alpha_composition",
                     "levy_measure_conditions", "atomic_representation")

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop(OUT_DIR_ENV, None)
        self.root = Path(self.tmp.name)
        self.config_path = self.root / "all.json"
        self.out = self.root / "results"
        self.config_path.write_text(json.dumps(_all_commands_config(str(self.out))), encoding="utf-8")

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def _run(self, command: str) -> dict:
        status = cli.main([command, "--config", str(self.config_path)])
        report = json.loads((self.out / command / "summary.json").read_text())
        self.assertEqual(status, cli.EXIT_OK if report["passed"] else cli.EXIT_TOLERANCE)
        self.assertNotEqual(status, cli.EXIT_CONFIG)
        for check in report["checks"]:
            if check["name"].startswith(self.DETERMINISTIC):
                self.assertTrue(check["passed"], msg=f"{command}: {check['name']}")
        return report

    def test_cf_check(self):
        report = self._run("cf-check")
        out = self.out / "cf-check"
        self.assertEqual((out / "cf_check.csv").read_text().splitlines()[0],
                         "theta,exact_re,exact_im,mc_re,mc_im,stderr,abs_error")
        self.assertTrue((out / "cf_estimate_2.json").exists())
        self.assertEqual(sum(c["name"].startswith("cf[") for c in report["checks"]), 3)

    def test_levy_check(self):
        report = self._run("levy-check")
        self.assertTrue((self.out / "levy-check" / "levy_tail_mass.csv").exists())
        self.assertIn("truncation_bias_bound", report["results"])
        self.assertIn("ks_two_sample", [c["name"] for c in report["checks"]])

    def test_lln(self):
        report = self._run("lln")
        lines = (self.out / "lln" / "lln_probe.csv").read_text().splitlines()
        self.assertEqual(lines[0], "tau,median_running_max")
        self.assertEqual(len(lines), 3)
        self.assertEqual({c["name"] for c in report["checks"]}, {"lln_fraction", "running_max_growth"})

    def test_ortho(self):
        self._run("ortho")
        out = self.out / "ortho"
        for name in ("gram_t0.5.csv", "laguerre_t2.7.csv", "appell_t1.0.csv", "norms.csv",
                     "ortho_monte_carlo.csv"):
            self.assertTrue((out / name).exists(), msg=name)

    def test_paths(self):
        report = self._run("paths")
        out = self.out / "paths"
        for i in range(3):
            increments = (out / "increments" / f"path_{i:04d}.csv").read_text().splitlines()
            self.assertEqual(increments[0], "cell_index,length,increment")
            self.assertEqual(len(increments), 1 + 4)
            jumps = (out / "jumps" / f"path_{i:04d}.csv").read_text().splitlines()
            self.assertEqual(jumps[0], "time,size")
        self.assertFalse((out / "increments" / "path_0003.csv").exists())
        self.assertTrue((out / "jump_increments.csv").exists())
        self.assertTrue(report["passed"])

    def test_every_command_reruns_byte_identical(self):
        first = {}
        for command in cli.COMMANDS:
            self._run(command)
            first[command] = _tree(self.out / command)
            self.assertIn("summary.json", first[command])
        for command in cli.COMMANDS:
            self._run(command)
            self.assertEqual(_tree(self.out / command), first[command], msg=command)


if __name__ == '__main__':
    unittest.main()
