"""Command line entry point: ``rodqubo {formulate,solve,verify,export}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import qubo_io
from .analysis import compliance_rank, force_table_csv, solution_report
from .config import ConfigError, ProblemConfig, load_config
from .polynomial import ReductionIdentity, VariableKind, coefficient_stats, pattern_bandwidth, qubo_pattern
from .rod import AssembledProblem, analytic_force, assemble_objective, decode_sample
from .solvers import (
    AnnealConfig,
    ProblemTooLargeError,
    RemoteSampler,
    RemoteSamplerError,
    SimulatedAnnealingSampler,
    TwoStageConfig,
    exhaustive_inputs_solve,
    exhaustive_solve,
    two_stage_solve,
)
from .solvers.two_stage import run_sampler

log = logging.getLogger("rodqubo")

SOLVERS = ("exhaustive", "exhaustive-inputs", "sa", "remote")


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _assemble(cfg: ProblemConfig, penalty_weight: float | None = None) -> AssembledProblem:
    weight = cfg.penalty_weight if penalty_weight is None else penalty_weight
    return assemble_objective(cfg.rod, cfg.areas, cfg.encoding, weight)


def formulation_summary(problem: AssembledProblem) -> dict:
    qubo, rmap = problem.reduced()
    inputs = problem.num_inputs
    sub = [(i, j) for i, j in qubo_pattern(qubo) if i < inputs and j < inputs]
    return {
        "dimension": qubo.dimension,
        "inputs": inputs,
        "design_bits": sum(v.kind is VariableKind.DESIGN for v in qubo.variables),
        "auxiliaries": len(rmap),
        "reductions": {kind.value: rmap.count(kind) for kind in ReductionIdentity},
        "objective_degree": problem.objective.degree,
        "couplers": len(qubo.quadratic),
        "input_bandwidth": pattern_bandwidth(sub),
        "penalty_weight": problem.penalty_weight,
        "coefficients": coefficient_stats(qubo).as_dict(),
    }


def formulation_artifacts(problem: AssembledProblem) -> dict[str, str]:
    qubo = problem.to_qubo()
    pattern = qubo_pattern(qubo)
    inputs = problem.num_inputs
    return {
        "qubo.json": qubo_io.dumps_json(qubo),
        "problem.qubo": qubo_io.dumps_qubo_text(qubo),
        "pattern.csv": qubo_io.dumps_pattern_csv(pattern),
        "input_pattern.csv": qubo_io.dumps_pattern_csv([(i, j) for i, j in pattern if i < inputs and j < inputs]),
        "stats.json": _dump(formulation_summary(problem)),
    }


def _write_all(out: Path, files: dict[str, str]) -> None:
    for name, text in files.items():
        qubo_io.write_text(out / name, text)


def cmd_formulate(args) -> int:
    cfg = load_config(args.config)
    problem = _assemble(cfg, args.lambda_small)
    summary = formulation_summary(problem)
    _write_all(Path(args.out), formulation_artifacts(problem))
    degree = summary["objective_degree"]
    note = f"degree reduced from {degree} to 2" if degree > 2 else f"degree {degree}"
    print(
        f"{summary['dimension']} variables ({summary['inputs']} inputs, {summary['auxiliaries']} auxiliaries)"
        f", {note}; dynamic range {summary['coefficients']['dynamic_range']:.3g}"
    )
    return 0


def make_sampler(args, problem: AssembledProblem):
    if args.solver == "sa":
        return SimulatedAnnealingSampler(AnnealConfig(reads=args.reads, sweeps=args.sweeps, seed=args.seed))
    if args.solver == "exhaustive":
        return lambda q: exhaustive_solve(q, max_dimension=args.max_dimension)
    if args.solver == "exhaustive-inputs":
        return lambda q: exhaustive_inputs_solve(q, problem.num_inputs, max_inputs=args.max_dimension)
    if args.solver == "remote":
        if not args.endpoint:
            raise UsageError("--solver remote requires --endpoint")
        return RemoteSampler(args.endpoint, reads=args.reads, timeout=args.timeout_ms / 1000.0)
    raise UsageError(f"unknown solver {args.solver!r}")


def solve(cfg: ProblemConfig, args):
    """Run the configured pipeline; returns ``(final problem, final samples, stage-1 samples or None)``."""
    lam_small = cfg.penalty_weight if args.lambda_small is None else args.lambda_small
    lam_large = cfg.penalty_weight_large if args.lambda_large is None else args.lambda_large
    problem = _assemble(cfg, lam_small)
    sampler = make_sampler(args, problem)
    if lam_large is None:
        samples = run_sampler(sampler, problem.to_qubo()).relabel(stage="single", penalty_weight=lam_small)
        return problem, samples, None
    result = two_stage_solve(problem, TwoStageConfig(lam_small, lam_large, args.reads), sampler)
    return result.strict, result.stage2, result.stage1


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    problem, samples, stage1 = solve(cfg, args)
    out = Path(args.out)
    best = decode_sample(problem, samples.first.bits)
    report = solution_report(best, cfg.rod)
    files = {"samples.json": samples.dumps()}
    if stage1 is not None:
        files["stage1_samples.json"] = stage1.dumps()
    summary = report.as_dict()
    summary.update(
        {
            "solver": args.solver,
            "seed": args.seed,
            "penalty_weight": problem.penalty_weight,
            "best_energy": samples.first.energy,
            "distinct_samples": len(samples),
        }
    )
    files["solution.json"] = _dump(summary)
    files["solution.csv"] = force_table_csv(best, report.reference, midpoints=args.midpoints)
    _write_all(out, files)
    print(f"best J = {samples.first.energy:.10g}; areas {list(best.areas)}; eps_H1 = {report.h1.relative_h1:.4g}")
    return 0


def verify(cfg: ProblemConfig, seed: int = 0, reads: int | None = None) -> list[dict]:
    """Acceptance checks applicable to ``cfg``; each is ``{name, passed, detail}``."""
    checks: list[dict] = []

    def check(name: str, passed: bool, detail) -> None:
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    ref = cfg.reference
    problem = _assemble(cfg)
    expected_inputs = cfg.rod.n_elements * cfg.encoding.bits + (cfg.rod.n_elements if cfg.is_design else 0)
    check("input-count", problem.num_inputs == ref.get("inputs", expected_inputs) == expected_inputs,
          {"inputs": problem.num_inputs, "expected": ref.get("inputs", expected_inputs)})

    if cfg.is_design:
        ranked = compliance_rank(cfg.rod, cfg.areas.choices)
        samples = exhaustive_inputs_solve(problem.to_qubo(), problem.num_inputs)
        best = decode_sample(problem, samples.first.bits)
        report = solution_report(best, cfg.rod)
        check("design-matches-compliance-optimum", tuple(best.areas) == ranked[0][0],
              {"qubo_design": list(best.areas), "compliance_optimum": list(ranked[0][0])})
        if "expected_design" in ref:
            check("expected-design", list(best.areas) == list(ref["expected_design"]), list(best.areas))
        if "expected_forces" in ref:
            ok = np.allclose(best.nodal_forces, ref["expected_forces"], rtol=0, atol=1e-9)
            check("expected-forces", ok, list(best.nodal_forces))
    else:
        lam_large = cfg.penalty_weight_large
        n_reads = reads or 500
        sampler = SimulatedAnnealingSampler(AnnealConfig(reads=n_reads, seed=seed))
        if lam_large is None:
            samples = sampler.sample(problem.to_qubo())
            final = problem
        else:
            result = two_stage_solve(problem, TwoStageConfig(cfg.penalty_weight, lam_large, n_reads), sampler)
            samples, final = result.stage2, result.strict
        best = decode_sample(final, samples.first.bits)
        report = solution_report(best, cfg.rod)
        exact = analytic_force(cfg.rod, cfg.areas)
        quantized = final.to_qubo().energy(final.encode(exact.nodal_forces))
        check("not-worse-than-quantized-analytic", samples.first.energy <= quantized,
              {"best": samples.first.energy, "quantized_analytic": quantized})

    h1 = report.h1.relative_h1
    if "max_h1_error" in ref:
        check("h1-error-bound", h1 <= ref["max_h1_error"], {"h1_error": h1, "bound": ref["max_h1_error"]})
    if "h1_error" in ref:
        tol = ref.get("h1_tolerance", 0.1 * ref["h1_error"])
        check("h1-error-value", abs(h1 - ref["h1_error"]) <= tol, {"h1_error": h1, "expected": ref["h1_error"], "tol": tol})
    return checks


def cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        verdict = {"config": str(args.config), "passed": False,
                   "checks": [{"name": "config-validation", "passed": False, "detail": str(exc)}]}
    else:
        checks = [{"name": "config-validation", "passed": True, "detail": cfg.source}]
        checks += verify(cfg, seed=args.seed, reads=args.reads)
        verdict = {"config": str(args.config), "passed": all(c["passed"] for c in checks), "checks": checks}
    text = _dump(verdict)
    if args.out:
        qubo_io.write_text(Path(args.out) / "verdict.json", text)
    sys.stdout.write(text)
    return 0 if verdict["passed"] else 1


def cmd_export(args) -> int:
    cfg = load_config(args.config)
    problem = _assemble(cfg, args.lambda_small)
    qubo = problem.to_qubo()
    name, text = {
        "json": ("qubo.json", lambda: qubo_io.dumps_json(qubo)),
        "qubo": ("problem.qubo", lambda: qubo_io.dumps_qubo_text(qubo)),
        "csv": ("pattern.csv", lambda: qubo_io.dumps_pattern_csv(qubo_pattern(qubo))),
    }[args.format]
    if args.out:
        qubo_io.write_text(Path(args.out) / name, text())
    else:
        sys.stdout.write(text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="problem JSON (or a shipped name: analysis_rod, design_rod)")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "qubo"), default="json")
    common.add_argument("--lambda-small", type=float, default=None, help="penalty weight (default: config)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rodqubo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("formulate", parents=[common], help="write QUBO files, sparsity pattern and coefficient stats")
    p.set_defaults(func=cmd_formulate, out_default="formulation")

    p = sub.add_parser("solve", parents=[common], help="sample, decode and report")
    p.add_argument("--solver", choices=SOLVERS, default="sa")
    p.add_argument("--reads", type=int, default=500)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--lambda-large", type=float, default=None, help="enables polishing stage (default: config)")
    p.add_argument("--endpoint", default=None)
    p.add_argument("--timeout-ms", type=float, default=30000.0)
    p.add_argument("--max-dimension", type=int, default=24)
    p.add_argument("--midpoints", action="store_true", help="also tabulate element midpoints")
    p.set_defaults(func=cmd_solve, out_default="solution")

    p = sub.add_parser("verify", parents=[common], help="run acceptance checks; exit 0 iff all pass")
    p.add_argument("--reads", type=int, default=None)
    p.set_defaults(func=cmd_verify, out_default=None)

    p = sub.add_parser("export", parents=[common], help="print or write the QUBO in one format")
    p.set_defaults(func=cmd_export, out_default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.out is None:
        args.out = args.out_default
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ConfigError as exc:
        print(f"rodqubo: invalid config: {exc}", file=sys.stderr)
        return 2
    except (ProblemTooLargeError, RemoteSamplerError) as exc:
        print(f"rodqubo {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
