"""
Tests for the run context, logging setup and check ledger.
"""

import logging
import unittest

from gammanoise.logging import (
    RunContext,
    configure_logging,
    failed_checks,
    get_out_dir,
    get_run_context,
    log_error,
    log_shutdown,
    log_startup,
    record_check,
    record_result,
    reset_history,
    set_run_context,
    summary,
)


class TestRunContext(unittest.TestCase):
    """Test the global run context."""

    def test_set_and_get(self):
        ctx = RunContext(command="ortho", seed=5, out_dir="results/ortho", run_id="abc123")
        set_run_context(ctx)
        self.assertEqual(get_run_context()["command"], "ortho")
        self.assertEqual(get_run_context()["run_id"], "abc123")
        self.assertEqual(get_out_dir(), "results/ortho")
        self.assertEqual(ctx.to_dict(), {"command": "ortho", "seed": 5,
                                         "out_dir": "results/ortho", "run_id": "abc123"})


class TestConfigureLogging(unittest.TestCase):
    """Test handler installation."""

    def test_single_handler(self):
        configure_logging("DEBUG")
        root = configure_logging("warning")
        names = [h.get_name() for h in root.handlers]
        self.assertEqual(names.count("gammanoise-stream"), 1)
        self.assertEqual(root.level, logging.WARNING)
        self.assertFalse(root.propagate)

    def test_unknown_level(self):
        with self.assertRaises(ValueError):
            configure_logging("LOUD")

    def test_log_functions(self):
        ctx = RunContext(command="lln", seed=1, out_dir="out", run_id="r1")
        with self.assertLogs("gammanoise.logging.logging", level="INFO") as logs:
            self.assertEqual(log_startup(ctx, {"seed": 1}), "startup logged")
            self.assertEqual(log_error(ctx, ValueError("boom")), "error logged")
            self.assertEqual(log_shutdown(ctx, passed=False, n_checks=2), "shutdown logged")
        self.assertTrue(any("boom" in line for line in logs.output))
        self.assertTrue(logs.output[-1].startswith("WARNING"))


class TestCheckHistory(unittest.TestCase):
    """Test the pass/fail ledger."""

    def setUp(self):
        reset_history()
        self.ctx = RunContext(command="ortho", seed=0, out_dir="out", run_id="r2")

    def tearDown(self):
        reset_history()

    def test_record_and_summarize(self):
        record = record_check(self.ctx, "gram", 1e-12, 0.0, 1e-9, True, {"shape": 0.5})
        self.assertEqual(record["command"], "ortho")
        self.assertEqual(record["detail"], {"shape": 0.5})
        record_check(self.ctx, "norm", 0.1, 0.0, 1e-9, False)
        self.assertEqual(record_result(self.ctx, "drift", 0.25), "result recorded")
        report = summary()
        self.assertEqual(len(report["checks"]), 2)
        self.assertEqual(report["results"], {"drift": 0.25})
        self.assertFalse(report["passed"])
        self.assertEqual([c["name"] for c in failed_checks()], ["norm"])

    def test_complex_and_non_finite_values(self):
        record = record_check(self.ctx, "cf", 1 + 2j, float("nan"), 1.0, False)
        self.assertEqual(record["value"], {"re": 1.0, "im": 2.0})
        self.assertEqual(record["reference"], "nan")

    def test_reset(self):
        record_check(self.ctx, "gram", 0.0, 0.0, 1e-9, True)
        reset_history()
        self.assertEqual(summary(), {"checks": [], "results": {}, "passed": True})


if __name__ == '__main__':
    unittest.main()
