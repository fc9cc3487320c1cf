# -*- coding: utf-8 -*-
"""
Batch command-line front end: validation suites and solvers, each writing
CSV/JSON artifacts and a summary.json with one pass/fail record per tolerance.
"""

import argparse
import hashlib
import logging
import math
import re
import sys
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from . import chaos, core_model, sampler, verhulst, wick
from .config import RunConfig, apply_overrides, load_config, resolve_out_dir
from .core_model import Partition
from .errors import (
    ConfigurationError,
    DomainError,
    GammaNoiseError,
    PartitionMismatchError,
    ToleranceFailure,
)
from .logging import (
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
from .utils.export import write_csv, write_json
from .utils.rng import block_generator
from .utils.series import multi_index_set

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2

_COMMAND_NAME = re.compile(r"[A-Za-z0-9_-]+")


def _sub_seed(seed: int, label: str) -> int:
    """Deterministic child seed for one part of a command."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _run_id(command: str, cfg: RunConfig) -> str:
    return hashlib.sha256(f"{command}\n{cfg.to_json()}".encode("utf-8")).hexdigest()[:12]


def _check(ctx: RunContext, name: str, value: float, reference, tolerance: float,
           passed: Optional[bool] = None, **detail) -> bool:
    if passed is None:
        passed = bool(value <= tolerance)
    record_check(ctx, name, value, reference, tolerance, passed, detail)
    return passed


# =============================================================================
# COMMANDS
# =============================================================================

def _cf_check(cfg: RunConfig, ctx: RunContext, out: Path):
    """Monte Carlo characteristic functional against the closed form."""
    tol = cfg.tolerances
    rows = []
    for i, spec in enumerate(cfg.theta.specs):
        theta = spec.build()
        if not theta.is_real:
            raise ConfigurationError(f"cf-check theta {i} must be real")
        exact = core_model.cf(theta)
        batch = sampler.sample_increment_batch(theta.partition, cfg.monte_carlo.samples,
                                               _sub_seed(cfg.seed, f"cf-{i}"))
        estimate = sampler.empirical_cf(batch, theta)
        error = abs(estimate.value - exact)
        _check(ctx, f"cf[{i}]", error, exact, tol.cf_stderr_multiple * estimate.stderr,
               stderr=estimate.stderr, n=estimate.n_samples)
        sampler.estimate_to_json(estimate, out / f"cf_estimate_{i}.json")

        lk = sum(core_model.levy_khinchine_exponent(float(lam), float(t))
                 for lam, t in zip(theta.as_array(), theta.partition.lengths))
        _check(ctx, f"levy_khinchine[{i}]", abs(lk - core_model.log_cf(theta)), 0.0,
               tol.levy_khinchine)
        rows.append((i, exact.real, exact.imag, estimate.value.real, estimate.value.imag,
                     estimate.stderr, error))
    write_csv(out / "cf_check.csv",
              ["theta", "exact_re", "exact_im", "mc_re", "mc_im", "stderr", "abs_error"], rows)


def _levy_check(cfg: RunConfig, ctx: RunContext, out: Path):
    """Jump-truncation sampler against exact Gamma increments."""
    lev, tol = cfg.levy, cfg.tolerances
    partition = Partition((0.0, lev.horizon))
    jumps = sampler.sample_jump_batch(lev.horizon, lev.delta, lev.samples, _sub_seed(cfg.seed, "jumps"))
    exact = sampler.sample_increment_batch(partition, lev.samples, _sub_seed(cfg.seed, "exact"))
    jump_totals = jumps.to_increments(partition)[:, 0]
    exact_totals = exact.increments[:, 0]

    _, p_value = sampler.ks_two_sample(jump_totals, exact_totals)
    _check(ctx, "ks_two_sample", p_value, None, tol.ks_pvalue, passed=p_value > tol.ks_pvalue)
    for label, values in (("exact", exact_totals), ("jumps", jump_totals)):
        statistic, p = sampler.ks_against_gamma(values, lev.horizon)
        record_result(ctx, f"ks_gamma_{label}", {"statistic": statistic, "p_value": p})

    z = sampler.poisson_count_check(jumps)
    _check(ctx, "poisson_count", abs(z), 0.0, tol.poisson_z,
           expected=lev.horizon * core_model.levy_tail_mass(lev.delta),
           observed=float(jumps.jump_counts().mean()))

    atomic = all(sampler.atomic_representation_check(p) for p in jumps)
    _check(ctx, "atomic_representation", float(not atomic), 0.0, 0.0, passed=atomic)

    report = core_model.levy_measure_conditions()
    _check(ctx, "levy_measure_conditions", abs(report.first_moment - 1.0), 1.0, 1e-10,
           passed=report.ok, infinite_total_mass=report.infinite_total_mass,
           finite_tails=report.finite_tails)
    record_result(ctx, "levy_drift", core_model.levy_triple().drift)
    record_result(ctx, "truncation_bias_bound",
                  lev.horizon * core_model.levy_small_jump_mean(lev.delta))
    write_csv(out / "levy_tail_mass.csv", ["delta", "tail_mass"],
              zip(report.deltas, report.tail_masses))


def _paths(cfg: RunConfig, ctx: RunContext, out: Path):
    """Export sampled paths in both forms, one CSV per path."""
    partition = cfg.partition.build()
    n = cfg.paths.n_paths
    increments = sampler.sample_increment_batch(partition, n, _sub_seed(cfg.seed, "paths-increments"))
    jumps = sampler.sample_jump_batch(partition.horizon, cfg.paths.delta, n,
                                      _sub_seed(cfg.seed, "paths-jumps"))
    for i in range(n):
        sampler.paths_to_csv(increments.path(i), out / "increments" / f"path_{i:04d}.csv")
        sampler.paths_to_csv(jumps.path(i), out / "jumps" / f"path_{i:04d}.csv")
    write_csv(out / "jump_increments.csv", ["path"] + [f"cell_{k}" for k in range(partition.n_cells)],
              ([i, *row] for i, row in enumerate(jumps.to_increments(partition))))
    atomic = all(sampler.atomic_representation_check(p) for p in jumps)
    atomic = atomic and all(sampler.atomic_representation_check(p) for p in increments)
    _check(ctx, "atomic_representation", float(not atomic), 0.0, 0.0, passed=atomic)
    record_result(ctx, "truncation_bias_bound",
                  partition.horizon * core_model.levy_small_jump_mean(cfg.paths.delta))


def _lln(cfg: RunConfig, ctx: RunContext, out: Path):
    """Law of large numbers band and growth of the running deviation."""
    lln, tol = cfg.lln, cfg.tolerances
    fraction = sampler.lln_statistic(lln.tau, lln.n_paths, lln.band, _sub_seed(cfg.seed, "lln"))
    _check(ctx, "lln_fraction", fraction, tol.lln_fraction, tol.lln_fraction,
           passed=fraction >= tol.lln_fraction, tau=lln.tau, band=lln.band)

    probe = sampler.boundedness_probe(lln.probe_horizons, lln.probe_paths,
                                      _sub_seed(cfg.seed, "lln-probe"))
    medians = np.median(probe, axis=0)
    growing = bool(np.all(np.diff(medians) > 0))
    _check(ctx, "running_max_growth", float(medians[-1] - medians[0]), 0.0, 0.0, passed=growing,
           medians=medians.tolist())
    write_csv(out / "lln_probe.csv", ["tau", "median_running_max"], zip(lln.probe_horizons, medians))


def _ortho(cfg: RunConfig, ctx: RunContext, out: Path):
    """Laguerre orthogonality by quadrature and Monte Carlo, alpha composition."""
    ortho, tol = cfg.ortho, cfg.tolerances
    for t in ortho.shapes:
        gram = chaos.orthogonality_table(t, ortho.n_max)
        nu = np.array([chaos.chaos_norm((n,), Partition((0.0, t))) for n in range(ortho.n_max + 1)])
        scale = np.maximum(1.0, np.maximum.outer(nu, nu))
        error = float(np.max(np.abs(gram - np.diag(nu)) / scale))
        _check(ctx, f"ortho_quadrature[t={t}]", error, 0.0, tol.ortho_quadrature)
        write_csv(out / f"gram_t{t}.csv", ["n", "m", "value"],
                  ((n, m, gram[n, m]) for n in range(ortho.n_max + 1) for m in range(ortho.n_max + 1)))

        N = ortho.alpha_degree
        composed = chaos.compose_with_alpha([chaos.appell_coeffs(n, t) for n in range(N + 1)], N)
        laguerre = [chaos.laguerre_coeffs(n, t) for n in range(N + 1)]
        worst = 0.0
        for got, want in zip(composed, laguerre):
            size = len(want.coeffs)
            diff = np.abs(got.padded(size) - want.coeffs) / max(1.0, float(np.max(np.abs(want.coeffs))))
            worst = max(worst, float(np.max(diff)))
        _check(ctx, f"alpha_composition[t={t}]", worst, 0.0, tol.alpha_composition)
        chaos.family_to_csv(laguerre, out / f"laguerre_t{t}.csv")
        chaos.family_to_csv([chaos.appell_coeffs(n, t) for n in range(N + 1)], out / f"appell_t{t}.csv")

    partition = Partition(tuple(ortho.mc_edges))
    chaos.norm_table_to_csv(partition, ortho.mc_degree, out / "norms.csv")
    batch = sampler.sample_increment_batch(partition, cfg.monte_carlo.samples, _sub_seed(cfg.seed, "ortho"))
    indices = chaos.enumerate_multi_indices(partition.n_cells, ortho.mc_degree)
    values = [chaos.basis_eval(n, batch) for n in indices]
    n_samples = len(batch)
    worst_z = 0.0
    rows = []
    for i, n in enumerate(indices):
        for j in range(i, len(indices)):
            product = values[i] * values[j]
            mean = float(product.mean())
            stderr = float(product.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
            reference = chaos.chaos_norm(n, partition) if i == j else 0.0
            if stderr > 0:
                z = abs(mean - reference) / stderr
            else:
                z = 0.0 if math.isclose(mean, reference, abs_tol=1e-12) else math.inf
            worst_z = max(worst_z, z)
            rows.append((tuple(n), tuple(indices[j]), mean, reference, stderr))
    _check(ctx, "ortho_monte_carlo", worst_z, 0.0, tol.ortho_stderr_multiple, pairs=len(rows))
    write_csv(out / "ortho_monte_carlo.csv", ["n", "m", "mean", "reference", "stderr"], rows)


def _wick_selftest(cfg: RunConfig, ctx: RunContext, out: Path):
    """Algebra laws of the truncated Wick product."""
    tr, tol = cfg.truncation, cfg.tolerances
    partition = Partition.uniform(tr.horizon, tr.cells)
    N = tr.degree
    rng = block_generator(cfg.seed, "wick-selftest", 0)
    one = wick.ChaosElement.constant(partition, N, 1.0)
    high = multi_index_set(partition.n_cells, N).degrees > N // 2

    def l1(phi):
        return float(np.sum(np.abs(phi.s_coeffs)))

    def gap(x, y):
        return float(np.max(np.abs(x.s_coeffs - y.s_coeffs)))

    laws = {name: 0.0 for name in ("unit", "commutativity", "associativity", "distributivity",
                                   "s_homomorphism", "inverse")}
    for _ in range(cfg.wick.n_triples):
        a, b, c = (wick.random_element(partition, N, rng) for _ in range(3))
        scale = max(1.0, l1(a) * l1(b) * l1(c))
        ab = wick.wick_mul(a, b)
        laws["unit"] = max(laws["unit"], gap(wick.wick_mul(one, a), a))
        laws["commutativity"] = max(laws["commutativity"], gap(ab, wick.wick_mul(b, a)) / scale)
        laws["associativity"] = max(laws["associativity"],
                                    gap(wick.wick_mul(ab, c), wick.wick_mul(a, wick.wick_mul(b, c))) / scale)
        laws["distributivity"] = max(laws["distributivity"],
                                     gap(wick.wick_mul(a, b + c), ab + wick.wick_mul(a, c)) / scale)

        half_a = wick.ChaosElement(partition, N, np.where(high, 0.0, a.s_coeffs))
        half_b = wick.ChaosElement(partition, N, np.where(high, 0.0, b.s_coeffs))
        theta = core_model.StepFunction(partition, tuple(rng.uniform(-1.0, 1.0, partition.n_cells)))
        lhs = wick.s_transform(wick.wick_mul(half_a, half_b), theta)
        rhs = wick.s_transform(half_a, theta) * wick.s_transform(half_b, theta)
        laws["s_homomorphism"] = max(laws["s_homomorphism"],
                                     abs(lhs - rhs) / max(1.0, l1(half_a) * l1(half_b)))

    for _ in range(cfg.wick.n_triples):
        phi = wick.random_element(partition, N, rng, c0_min=cfg.wick.c0_min)
        inverse = wick.wick_inv(phi)
        laws["inverse"] = max(laws["inverse"],
                              gap(wick.wick_mul(phi, inverse), one) / max(1.0, l1(phi) * l1(inverse)))

    for name, value in laws.items():
        _check(ctx, f"wick_{name}", value, 0.0, tol.wick_exact)
    write_csv(out / "wick_laws.csv", ["law", "max_error", "tolerance"],
              ((name, value, tol.wick_exact) for name, value in laws.items()))

    # E[phi <> psi] = E[phi] E[psi] against sampled paths, degree <= 2 on the ortho partition
    bridge = Partition(tuple(cfg.ortho.mc_edges))
    phi = wick.random_element(bridge, 4, rng)
    psi = wick.random_element(bridge, 4, rng)
    degree_two = multi_index_set(bridge.n_cells, 4).degrees > 2
    phi = wick.ChaosElement(bridge, 4, np.where(degree_two, 0.0, phi.s_coeffs))
    psi = wick.ChaosElement(bridge, 4, np.where(degree_two, 0.0, psi.s_coeffs))
    batch = sampler.sample_increment_batch(bridge, cfg.monte_carlo.samples, _sub_seed(cfg.seed, "wick-bridge"))
    values = wick.wick_mul(phi, psi).evaluate(batch.increments)
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    reference = wick.expectation(phi) * wick.expectation(psi)
    _check(ctx, "wick_expectation_bridge", abs(float(values.mean()) - reference), reference,
           tol.cf_stderr_multiple * stderr, stderr=stderr)

    sample = wick.random_element(partition, N, rng)
    write_json(out / "sample_element.json", sample.to_dict())
    sample.to_csv(out / "sample_element.csv")


def _verhulst(cfg: RunConfig, ctx: RunContext, out: Path):
    """Closed form against the coefficient ODE, plus moment report."""
    v, tol = cfg.verhulst, cfg.tolerances
    y0 = v.y0()
    vcfg = verhulst.VerhulstConfig(v.r, v.a, y0, v.t_grid(), v.dt, v.max_truncation_loss)

    closed = verhulst.closed_form_trajectory(vcfg)
    ode = verhulst.ode_solve(vcfg)
    _check(ctx, "closed_form_vs_ode", verhulst.max_discrepancy(closed, ode), 0.0,
           tol.verhulst_discrepancy)

    mean0 = wick.expectation(y0)
    logistic_error = max(abs(wick.expectation(e) - verhulst.logistic(mean0, v.r + v.a, t))
                         for t, e in zip(closed.times, closed.elements))
    _check(ctx, "mean_logistic", logistic_error, 0.0, tol.logistic, rate=v.r + v.a)

    constant = wick.ChaosElement.constant(vcfg.partition, vcfg.N, v.y0_constant)
    noiseless = verhulst.closed_form_trajectory(
        verhulst.VerhulstConfig(v.r, 0.0, constant, vcfg.t_grid, v.dt, v.max_truncation_loss))
    noiseless_error = max(
        max(abs(wick.expectation(e) - verhulst.logistic(v.y0_constant, v.r, t)), wick.variance(e))
        for t, e in zip(noiseless.times, noiseless.elements)
    )
    _check(ctx, "noiseless_logistic", noiseless_error, 0.0, tol.logistic)

    unit = wick.ChaosElement.constant(vcfg.partition, vcfg.N, 1.0)
    fixed = verhulst.closed_form_trajectory(vcfg.with_y0(unit))
    fixed_error = max(float(np.max(np.abs(e.s_coeffs - unit.s_coeffs))) for e in fixed.elements)
    _check(ctx, "unit_fixed_point", fixed_error, 0.0, 0.0, passed=fixed_error == 0.0)

    coarse_times = vcfg.t_grid[::5] if len(vcfg.t_grid) > 5 else vcfg.t_grid
    residual = verhulst.residual_check(vcfg, coarse_times)
    _check(ctx, "integral_residual", residual, 0.0, tol.residual)

    richardson = verhulst.richardson_check(vcfg)
    _check(ctx, "richardson", richardson, 0.0, tol.verhulst_discrepancy, dt=v.dt)

    probe = verhulst.uniqueness_probe(vcfg, v.eps, v.n_random, _sub_seed(cfg.seed, "verhulst"))
    _check(ctx, "uniqueness_random_y0", probe.max_discrepancy, 0.0, tol.verhulst_discrepancy,
           trials=len(probe.random_discrepancies))
    record_result(ctx, "perturbation_sensitivity", probe.sensitivity)
    _check(ctx, "perturbation_continuity", probe.response, 0.0, 1e4 * probe.perturbation,
           passed=math.isfinite(probe.response) and probe.response <= 1e4 * probe.perturbation)

    refined_cfg = vcfg.with_y0(v.y0(refine=2))
    refined = verhulst.closed_form_trajectory(refined_cfg)
    refinement_error = max(abs(wick.expectation(a) - wick.expectation(b))
                           for a, b in zip(closed.elements, refined.elements))
    _check(ctx, "refinement_mean", refinement_error, 0.0, tol.refinement)
    record_result(ctx, "refinement_variance_gap",
                  max(abs(wick.variance(a) - wick.variance(b))
                      for a, b in zip(closed.elements, refined.elements)))

    record_result(ctx, "ode_truncation_loss", ode.losses[-1])
    record_result(ctx, "closed_form_truncation_loss", max(closed.losses))
    verhulst.moments_to_csv(verhulst.moment_report(closed), out / "moments.csv")
    verhulst.moments_to_csv(verhulst.moment_report(ode), out / "moments_ode.csv")
    if v.dump_coefficients:
        verhulst.coefficients_to_csv(closed, out / "coefficients.csv")


COMMANDS: Dict[str, Callable[[RunConfig, RunContext, Path], None]] = {
    "cf-check": _cf_check,
    "levy-check": _levy_check,
    "paths": _paths,
    "lln": _lln,
    "ortho": _ortho,
    "wick-selftest": _wick_selftest,
    "verhulst": _verhulst,
}


# =============================================================================
# RUNNER
# =============================================================================

def _write_summary(failure: Optional[BaseException], status: int) -> int:
    """Write summary.json for the current run context; returns the final exit status."""
    context = get_run_context()
    out = Path(get_out_dir())
    report = {"context": dict(context), **summary()}
    if failure is None and not report["passed"]:
        failure, status = ToleranceFailure(failed_checks()), EXIT_TOLERANCE
    if failure is not None:
        report["failure"] = {"error": type(failure).__name__, "message": str(failure)}
        report["passed"] = False
    write_json(out / "summary.json", report)
    log_shutdown(RunContext(**context), report["passed"], len(report["checks"]))
    return status


def run(command: str, cfg: RunConfig) -> int:
    """Run one command; writes <out_dir>/<command>/summary.json and returns the exit status."""
    out = Path(cfg.out_dir) / command
    ctx = RunContext(command=command, seed=cfg.seed, out_dir=str(out), run_id=_run_id(command, cfg))
    set_run_context(ctx)
    reset_history()
    log_startup(ctx, cfg.model_dump(mode="json"))

    failure = None
    status = EXIT_OK
    try:
        if command not in COMMANDS:
            raise ConfigurationError(f"unknown command: {command!r}")
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[command](cfg, ctx, out)
    except (ConfigurationError, DomainError, PartitionMismatchError) as e:
        log_error(ctx, e, "configuration error")
        failure, status = e, EXIT_CONFIG
    except GammaNoiseError as e:
        log_error(ctx, e, "numerical failure")
        failure, status = e, EXIT_TOLERANCE
    return _write_summary(failure, status)


def _fallback_args(argv) -> argparse.Namespace:
    """Lenient parse of a rejected command line: only what locates the failure record."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("cmd", nargs="?")
    parser.add_argument("--config")
    parser.add_argument("--seed")
    parser.add_argument("--out")
    try:
        args, _ = parser.parse_known_args(argv)
    except SystemExit:
        args = argparse.Namespace(cmd=None, config=None, seed=None, out=None)
    return args


def _config_failure(args: argparse.Namespace, argv, error: BaseException) -> int:
    """Failure record for a run that never got a valid config."""
    command = args.cmd if args.cmd and _COMMAND_NAME.fullmatch(args.cmd) else "invalid-command"
    try:
        seed = int(args.seed)
    except (TypeError, ValueError):
        seed = RunConfig.model_fields["seed"].default
    out = Path(resolve_out_dir(args.config, args.out)) / command
    run_id = hashlib.sha256("\n".join(argv).encode("utf-8")).hexdigest()[:12]
    ctx = RunContext(command=command, seed=seed, out_dir=str(out), run_id=run_id)
    set_run_context(ctx)
    reset_history()
    log_error(ctx, error, "configuration error")
    return _write_summary(error, EXIT_CONFIG)


def _check_config(cfg: RunConfig) -> int:
    print("gammanoise configuration")
    print("=" * 50)
    print(cfg.to_json())
    print("=" * 50)
    print("Configuration is valid.")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="path/to/config.json (or .toml)")
    parser.add_argument("--seed", type=int, help="Master seed for all random streams")
    parser.add_argument("--samples", type=int, help="Monte Carlo sample size")
    parser.add_argument("--cells", type=int, help="Number of partition cells d")
    parser.add_argument("--degree", type=int, help="Chaos truncation degree N")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--log-level", dest="log_level",
                        help="Override logging.level (DEBUG, INFO, WARNING, ...)")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = argparse.ArgumentParser(prog="gammanoise")
    sub_parser = parser.add_subparsers(dest="cmd", required=True)

    descriptions = {
        "cf-check": "Monte Carlo characteristic functional vs closed form",
        "levy-check": "Jump-truncation sampler vs exact Gamma increments",
        "paths": "Export sampled gamma paths",
        "lln": "Law of large numbers and running-deviation statistics",
        "ortho": "Laguerre chaos orthogonality suite",
        "wick-selftest": "Wick algebra laws",
        "verhulst": "Verhulst closed form vs coefficient ODE, moment report",
        "check-config": "Validate a config and print it",
    }
    for name, help_text in descriptions.items():
        _add_common(sub_parser.add_parser(name, help=help_text))

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if not e.code:
            raise
        fallback = _fallback_args(argv)
        return _config_failure(fallback, argv, ConfigurationError(f"invalid command line: {argv}"))

    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, seed=args.seed, samples=args.samples, cells=args.cells,
                              degree=args.degree, out=args.out)
        level = args.log_level or cfg.logging.level
        configure_logging(level, cfg.logging.format)
    except (ConfigurationError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        if not isinstance(e, ConfigurationError):
            e = ConfigurationError(str(e))
        return _config_failure(args, argv, e)

    if args.cmd == "check-config":
        return _check_config(cfg)
    return run(args.cmd, cfg)


if __name__ == "__main__":
    sys.exit(main())
