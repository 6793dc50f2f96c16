"""Command-line front end: campaigns, solves, transforms, demos.

Exit codes: 0 clean run, 1 violation found, 2 solver non-convergence,
3 configuration error.  Report files are written for classes 0-2; every
JSON report embeds the resolved configuration and the build identifier, so
equal (config, seed, build) triples produce byte-identical files.
HESSIANLAB_THREADS caps campaign workers.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cones, fd_solver, singular, transforms
from .grid import write_grid
from .inequality_lab import (
    CAMPAIGNS,
    SampleSpec,
    _decade_ranges,
    verify_ellipticity_ratio,
    verify_tail_bound,
)
from .reports import VerificationReport, build_identifier
from .sampling import SamplingError

__all__ = ["CampaignConfig", "run", "main"]

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_NO_CONVERGENCE = 2
EXIT_CONFIG = 3

COMMANDS = ("verify", "hunt", "solve", "transform-check", "singular-demo", "probe")


class ConfigError(Exception):
    """Bad flags, unknown targets, unreadable config files."""


@dataclass
class CampaignConfig:
    """Fully resolved invocation: what to run, with what, where to write."""

    command: str
    target: str | None
    params: dict
    output_path: str
    seed: int = 0
    extra_outputs: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "target": self.target,
            "params": self.params,
            "output_path": self.output_path,
            "seed": self.seed,
        }


def _write_json(path: str, payload: dict) -> None:
    payload = dict(payload)
    payload.setdefault("build", build_identifier())
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    )


def _parse_pair(text: str, flag: str):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise ConfigError(f"{flag} expects lo:hi, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); class 3 is ours
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hessianlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_campaign_flags(p):
        p.add_argument("--target", required=True, help="inequality id")
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--k", type=int, default=3)
        p.add_argument("--K", type=float, default=1.0, help="semi-convexity bound")
        p.add_argument("--K1", type=float, default=None,
                       help="shift constant for the ellipticity ratio (default K+1)")
        p.add_argument("--N1", type=float, default=10.0,
                       help="S_k cap for the tail bound")
        p.add_argument("--count", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lambda1", default=None, help="top-eigenvalue range lo:hi")
        p.add_argument("--tail-mode", default="general",
                       choices=("bounded", "spiked-two", "general"))
        p.add_argument("--s-level", default=None,
                       help="project samples onto S_k levels lo:hi")
        p.add_argument("--output", "-o", default=None, help="report path")

    add_campaign_flags(sub.add_parser("verify", help="run one verification campaign"))
    add_campaign_flags(sub.add_parser(
        "hunt", help="scan lambda_1 decades for violations / empirical thresholds"))

    p = sub.add_parser("solve", help="run the Dirichlet solver from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output", "-o", default=None, help="JSON report path")
    p.add_argument("--solution", default=None, help="write solution grid here")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("transform-check", help="quotient/sum constants and identities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True, choices=(1, 2))
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c0", type=float, default=None, help="also solve the rigidity cubic")
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("singular-demo", help="Holder probe of the singular family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--output", "-o", default=None, help="CSV path")

    p = sub.add_parser("probe", help="interior curvature vs data semi-convexity")
    p.add_argument("--config", required=True)
    p.add_argument("--K", required=True, help="comma-separated K values")
    p.add_argument("--output", "-o", default=None, help="CSV path")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config_from_args(args) -> CampaignConfig:
    cmd = args.command
    if cmd in ("verify", "hunt"):
        if args.target not in CAMPAIGNS and args.target != "cone-convexity":
            valid = ", ".join(sorted([*CAMPAIGNS, "cone-convexity"]))
            raise ConfigError(f"unknown target {args.target!r}; valid targets: {valid}")
        lambda1 = _parse_pair(args.lambda1, "--lambda1") if args.lambda1 else (
            (1.0, 1e6) if cmd == "hunt" else (1e3, 1e6)
        )
        s_level = _parse_pair(args.s_level, "--s-level") if args.s_level else None
        params = {
            "n": args.n, "k": args.k, "K": args.K, "K1": args.K1, "N1": args.N1,
            "count": args.count, "lambda1_range": lambda1,
            "tail_mode": args.tail_mode, "s_level_range": s_level,
        }
        out = args.output or f"{cmd}-{args.target}.json"
        return CampaignConfig(cmd, args.target, params, out, args.seed)
    if cmd == "solve":
        params = {"config_path": args.config}
        return CampaignConfig(cmd, None, params, args.output or "solve-report.json",
                              args.seed, {"solution": args.solution})
    if cmd == "transform-check":
        params = {"n": args.n, "l": args.l, "samples": args.samples, "c0": args.c0}
        return CampaignConfig(cmd, None, params, args.output or "transform-check.json",
                              args.seed)
    if cmd == "singular-demo":
        params = {"n": args.n, "k": args.k, "sigma": args.sigma}
        return CampaignConfig(cmd, None, params,
                              args.output or "singular-probe.csv", 0)
    if cmd == "probe":
        try:
            k_values = [float(v) for v in args.K.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"--K expects comma-separated reals, got {args.K!r}") from exc
        params = {"config_path": args.config, "K_values": k_values}
        return CampaignConfig(cmd, None, params, args.output or "probe-table.csv",
                              args.seed)
    raise ConfigError(f"unknown command {cmd!r}")


def _make_spec(config: CampaignConfig, lambda1_range=None, count=None) -> SampleSpec:
    p = config.params
    return SampleSpec(
        n=p["n"], k=p["k"], K=p["K"],
        lambda1_range=lambda1_range or p["lambda1_range"],
        tail_mode=p["tail_mode"], count=count or p["count"],
        seed=config.seed, s_level_range=p["s_level_range"],
    )


def _run_campaign(config: CampaignConfig) -> VerificationReport:
    target = config.target
    if target == "cone-convexity":
        return cones.convexity_probe(
            config.params["k"], config.params["count"], config.seed,
            n=config.params["n"], K=config.params["K"],
        )
    spec = _make_spec(config)
    if target == "tail-bound":
        return verify_tail_bound(spec, N1=config.params["N1"])
    if target == "ellipticity-ratio":
        return verify_ellipticity_ratio(spec, K1=config.params["K1"])
    return CAMPAIGNS[target](spec)


def _cmd_verify(config: CampaignConfig) -> int:
    report = _run_campaign(config)
    report.config["cli"] = config.as_dict()
    report.write(config.output_path)
    print(
        f"{config.target}: samples={report.samples} violations={report.violations} "
        f"worst_margin={report.worst_margin:.6g} "
        f"estimated_constant={report.estimated_constant:.6g} -> {config.output_path}"
    )
    return EXIT_VIOLATION if report.violations else EXIT_OK


def _cmd_hunt(config: CampaignConfig) -> int:
    """Per-decade violation scan; reports the lowest clean lambda_1 decade."""
    lo, hi = config.params["lambda1_range"]
    ranges = _decade_ranges(lo, hi)
    per_count = max(config.params["count"] // len(ranges), 1)
    rows = []
    for d_lo, d_hi in ranges:
        sub = CampaignConfig(
            config.command, config.target,
            {**config.params, "lambda1_range": (d_lo, d_hi), "count": per_count},
            config.output_path, config.seed,
        )
        report = _run_campaign(sub)
        rows.append({
            "lambda1_lo": d_lo, "lambda1_hi": d_hi,
            "samples": report.samples, "violations": report.violations,
            "worst_margin": report.worst_margin,
            "estimated_constant": report.estimated_constant,
        })
    threshold = None
    for row in reversed(rows):
        if row["violations"] == 0:
            threshold = row["lambda1_lo"]
        else:
            break
    total_violations = sum(r["violations"] for r in rows)
    _write_json(config.output_path, {
        "target": config.target, "decades": rows,
        "clean_above_lambda1": threshold,
        "violations": total_violations,
        "config": config.as_dict(),
    })
    print(
        f"hunt {config.target}: {total_violations} violations across "
        f"{len(rows)} decades; clean above lambda1={threshold} -> {config.output_path}"
    )
    return EXIT_VIOLATION if total_violations else EXIT_OK


def _cmd_solve(config: CampaignConfig) -> int:
    try:
        cfg = fd_solver.SolveConfig.from_file(config.params["config_path"])
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    result = fd_solver.solve(cfg)
    payload = {
        "status": result.status,
        "converged": result.converged,
        "residual_inf": result.residual_inf,
        "iterations": result.iterations,
        "admissible_fraction": result.admissible_fraction,
        "min_semiconvex_margin": result.min_semiconvex_margin,
        "max_lambda1": result.max_lambda1,
        "residual_history": result.residual_history,
        "config": {**config.as_dict(),
                   "resolution": list(cfg.resolution),
                   "box": [list(b) for b in cfg.box],
                   "alpha": cfg.alpha, "tolerance": cfg.tolerance},
    }
    _write_json(config.output_path, payload)
    solution_path = config.extra_outputs.get("solution")
    if solution_path:
        write_grid(solution_path, result.u)
    print(
        f"solve: {result.status} residual={result.residual_inf:.3e} "
        f"iterations={result.iterations} -> {config.output_path}"
    )
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def _cmd_transform_check(config: CampaignConfig) -> int:
    n, l = config.params["n"], config.params["l"]
    samples, seed = config.params["samples"], config.seed
    try:
        tc = transforms.quotient_constants(n, l)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    const_res = transforms.constant_term_residual(tc)
    rng = np.random.default_rng(seed)
    shift_worst = 0.0
    for _ in range(max(samples // 10, 100)):
        A = rng.standard_normal((n, n))
        A = A + A.T
        lam_max = float(np.abs(np.linalg.eigvalsh(A)).max())
        shift_worst = max(
            shift_worst,
            transforms.shift_identity_residual(A, tc) / (1.0 + (1.0 + lam_max) ** 3),
        )
    adm = transforms.shift_admissibility_campaign(n, l, count=samples, seed=seed)
    payload = {
        "n": n, "l": l, "a": tc.a, "C0": tc.c0,
        "constant_term_residual": const_res,
        "shift_identity_residual_max_scaled": shift_worst,
        "admissibility": adm.to_dict(),
        "config": config.as_dict(),
    }
    print(f"n={n} l={l}: a = {tc.a:.7f}, C0 = {tc.c0:.7f}")
    print(f"constant-term identity residual: {const_res:.3e}")
    print(f"shift identity residual (scaled max): {shift_worst:.3e}")
    print(f"level-set admissibility: {adm.violations} violations, "
          f"worst margin {adm.worst_margin:.6g}")
    c0 = config.params["c0"]
    if c0 is not None:
        try:
            rd = transforms.rigidity_root(n, c0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        payload["rigidity"] = {"c0": c0, "K0": rd.K0, "threshold": rd.threshold}
        if rd.K0 is None:
            print(f"rigidity cubic: no root, c0={c0} above threshold {rd.threshold:.6g}")
        else:
            print(f"rigidity cubic: K0 = {rd.K0:.12f} (threshold {rd.threshold:.6g})")
    _write_json(config.output_path, payload)
    bad = (
        const_res > 1e-13
        or shift_worst > 1e-9
        or adm.violations > 0
    )
    return EXIT_VIOLATION if bad else EXIT_OK


def _cmd_singular_demo(config: CampaignConfig) -> int:
    n, k, sigma = config.params["n"], config.params["k"], config.params["sigma"]
    try:
        params = singular.SingularFamilyParams(n=n, k=k, sigma=sigma)
        if sigma != 0.0:
            raise ConfigError("the Holder probe runs at sigma = 0")
        direction = np.zeros(n)
        direction[1] = 1.0
        probe = singular.holder_probe(params, direction, 2.0 ** -np.arange(4, 17))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    Path(config.output_path).write_text(singular.probe_csv(probe))
    expected = -2.0 / (k - 1)
    print(
        f"singular k={k} n={n}: fitted slope {probe.slope:.4f} "
        f"(scaling exponent {expected:.4f}), max |Du| = {probe.max_gradient:.4f} "
        f"-> {config.output_path}"
    )
    return EXIT_OK


def _cmd_probe(config: CampaignConfig) -> int:
    try:
        cfg = fd_solver.SolveConfig.from_file(config.params["config_path"])
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    try:
        rows = fd_solver.interior_bound_probe(cfg, config.params["K_values"])
    except RuntimeError as exc:
        print(f"probe failed: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    lines = ["K,max_lambda1,log_lambda1,sup_norm,grad_norm,iterations"]
    for r in rows:
        lines.append(
            f"{r.K!r},{r.max_lambda1!r},{r.log_lambda1!r},"
            f"{r.sup_norm!r},{r.grad_norm!r},{r.iterations}"
        )
    Path(config.output_path).write_text("\n".join(lines) + "\n")
    for r in rows:
        print(f"K={r.K:g}: max lambda1 = {r.max_lambda1:.6g} "
              f"(log {r.log_lambda1:.4f}), C1 data ({r.sup_norm:.3g}, {r.grad_norm:.3g})")
    print(f"-> {config.output_path}")
    return EXIT_OK


_RUNNERS = {
    "verify": _cmd_verify,
    "hunt": _cmd_hunt,
    "solve": _cmd_solve,
    "transform-check": _cmd_transform_check,
    "singular-demo": _cmd_singular_demo,
    "probe": _cmd_probe,
}


def run(config: CampaignConfig) -> int:
    """Execute a resolved invocation; returns the process exit code."""
    try:
        return _RUNNERS[config.command](config)
    except ConfigError:
        raise
    except SamplingError as exc:
        print(f"sampling failed: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = _config_from_args(args)
        return run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
