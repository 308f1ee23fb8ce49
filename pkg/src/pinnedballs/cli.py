"""Command-line front end: validate | simulate | alpha | bound | orbit | lattice | search | verify.

Every emitted report embeds a run manifest (command, inputs, seeds,
tolerances, version, wall clock).  Exit codes: 0 success, 1 domain error,
2 usage error.  Randomized commands without an explicit --seed draw one from
entropy and record it in the manifest.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, bounds, dynamics, foldings, geometry, io, lattice
from . import rigidity, search, verify as verify_mod
from .errors import BudgetExceededError, PinnedBallsError


def _manifest(args: argparse.Namespace, started: float, **extra) -> dict:
    manifest = {
        "command": args.command,
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "wall_clock_s": round(time.monotonic() - started, 6),
    }
    manifest.update(extra)
    return manifest


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(report, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _resolve_seed(seed: int | None) -> int:
    return secrets.randbelow(2**31) if seed is None else seed


def _cmd_validate(args) -> int:
    started = time.monotonic()
    config, state = io.load_configuration(args.config)
    graph = geometry.full_contact_graph(config)
    report = {
        "valid": True,
        "n": config.n,
        "dimension": config.dimension,
        "contact_tolerance": config.contact_tolerance,
        "touching_pairs": [[i + 1, j + 1] for i, j in graph.edges],
        "connected": graph.is_connected,
        "has_velocities": state is not None,
        "manifest": _manifest(args, started, inputs=[args.config]),
    }
    _emit(report, args.output)
    return 0


def _cmd_simulate(args) -> int:
    started = time.monotonic()
    config, state = io.load_configuration(args.config)
    if state is None:
        raise PinnedBallsError("configuration file has no velocities")
    if args.normalize:
        config, state = geometry.normalize_system(config, state)
    schedule = io.load_schedule(args.schedule)
    trace = dynamics.run_schedule(config, state, schedule, max_steps=args.max_steps)
    if args.trace:
        io.write_trace_jsonl(args.trace, trace)
    report = {
        "collisions": trace.collisions,
        "steps": trace.steps,
        "stabilized": trace.stabilized,
        "initial": {"F": float(trace.functional[0]), "energy": float(trace.energies[0])},
        "final": {"F": float(trace.functional[-1]), "energy": float(trace.energies[-1])},
        "trace_file": args.trace,
        "manifest": _manifest(
            args, started, inputs=[args.config, args.schedule]
        ),
    }
    _emit(report, args.output)
    return 0


def _cmd_alpha(args) -> int:
    started = time.monotonic()
    config, _ = io.load_configuration(args.config)
    report_obj = rigidity.alpha(
        config,
        zero_tolerance=args.zero_tolerance,
        max_edges=args.max_edges,
        collect_table=args.verbose,
    )
    report = report_obj.as_dict(verbose=args.verbose)
    report["manifest"] = _manifest(
        args,
        started,
        inputs=[args.config],
        tolerances={"zero_tolerance": args.zero_tolerance},
    )
    _emit(report, args.output)
    return 0


def _cmd_bound(args) -> int:
    started = time.monotonic()
    inputs = []
    if args.mode == "tree":
        report_obj = bounds.tree_bound(args.n, args.d, args.tree_constant, args.tau)
        report = report_obj.as_dict()
    elif args.mode == "lattice":
        report = bounds.lattice_bound(args.n).as_dict()
    else:
        if args.alpha_from:
            config, _ = io.load_configuration(args.alpha_from)
            inputs.append(args.alpha_from)
            alpha_value = rigidity.alpha(config, collect_table=False).alpha
            alpha_source = "exhaustive"
            n, d = config.n, config.dimension
        else:
            if args.alpha is None:
                raise PinnedBallsError("general mode needs --alpha or --alpha-from")
            if args.n is None or args.d is None:
                raise PinnedBallsError("general mode needs --n and --d")
            alpha_value, alpha_source = args.alpha, "user-value"
            n, d = args.n, args.d
        tau, tau_source = bounds.resolve_tau(d, args.tau)
        report = bounds.max_collisions_bound(
            n, d, alpha_value, tau, alpha_source=alpha_source, tau_source=tau_source
        ).as_dict()
    report["mode"] = args.mode
    report["manifest"] = _manifest(args, started, inputs=inputs)
    _emit(report, args.output)
    return 0


def _cmd_orbit(args) -> int:
    started = time.monotonic()
    halfspaces = io.load_halfspaces(args.halfspaces)
    start = json.loads(args.start)
    witness = json.loads(args.witness)
    seed = None
    if args.policy == "seeded-random":
        seed = _resolve_seed(args.seed)
        schedule = foldings.FoldingSchedule.seeded_random(seed)
    elif args.policy == "round-robin":
        schedule = foldings.FoldingSchedule.round_robin()
    else:
        word = tuple(int(x) for x in args.word.split(","))
        schedule = foldings.FoldingSchedule.periodic(word)
    result = foldings.orbit(
        start, halfspaces, schedule, budget=args.budget, witness=witness
    )
    report = result.as_dict()
    report["manifest"] = _manifest(
        args, started, inputs=[args.halfspaces], seed=seed
    )
    _emit(report, args.output)
    return 0


def _cmd_lattice(args) -> int:
    started = time.monotonic()
    points = lattice.lattice_points_in_radius(args.radius)
    edges = lattice.contact_edges(points)
    report = {
        "radius": args.radius,
        "count": len(points),
        "points_exact": [[p.a, p.b] for p in points],
        "centers": [p.xy().tolist() for p in points],
        "touching_pairs": [[i + 1, j + 1] for i, j in edges],
        "alpha_floor_log2": lattice.lattice_alpha_lower_bound_log2(len(points))
        if points
        else None,
        "manifest": _manifest(args, started, inputs=[]),
    }
    _emit(report, args.output)
    if args.save_config:
        io.save_configuration(
            args.save_config, lattice.lattice_configuration(points)
        )
    return 0


def _cmd_search(args) -> int:
    started = time.monotonic()
    config, state = io.load_configuration(args.config)
    seed = _resolve_seed(args.seed)
    if args.method == "sweep":
        sweep = search.velocity_sweep(
            config, args.samples, seed, depth_cap=args.depth_cap
        )
        report = sweep.as_dict()
    else:
        if state is None:
            state = search.sample_unit_state(config.n, config.dimension, np.random.default_rng(seed))
        config, state = geometry.normalize_system(config, state)
        if args.method == "greedy":
            result = search.greedy_schedule(config, state)
        else:
            try:
                result = search.exhaustive_max_collisions(
                    config, state, depth_cap=args.depth_cap
                )
            except BudgetExceededError as exc:
                result = exc.best
        if args.with_bound:
            alpha_value = rigidity.alpha(config, collect_table=False).alpha
            tau, tau_source = bounds.resolve_tau(config.dimension)
            result = search.compare_with_bound(
                result,
                bounds.max_collisions_bound(
                    config.n, config.dimension, alpha_value, tau,
                    alpha_source="exhaustive", tau_source=tau_source,
                ),
            )
        report = result.as_dict()
    report["manifest"] = _manifest(args, started, inputs=[args.config], seed=seed)
    _emit(report, args.output)
    return 0


def _cmd_verify(args) -> int:
    started = time.monotonic()
    seed = _resolve_seed(args.seed)
    results = verify_mod.run_all(seed=seed, quick=args.quick)
    failures = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    summary = {
        "checks": len(results),
        "failures": len(failures),
        "manifest": _manifest(args, started, inputs=[], seed=seed),
    }
    if args.output:
        summary["results"] = [
            {"name": r.name, "passed": bool(r.passed), "detail": r.detail}
            for r in results
        ]
        _emit(summary, args.output)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinnedballs",
        description="Pinned-ball pseudo-collision dynamics, rigidity index, and collision bounds.",
    )
    parser.add_argument("--output", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a configuration file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("simulate", help="run an explicit schedule and emit the trace")
    p.add_argument("config")
    p.add_argument("schedule")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace", help="write a JSON-lines trace to this path")
    p.add_argument("--normalize", action="store_true", help="normalize the system first")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("alpha", help="exhaustive approximate-rigidity index")
    p.add_argument("config")
    p.add_argument("--zero-tolerance", type=float, default=rigidity.DEFAULT_ZERO_TOLERANCE)
    p.add_argument("--max-edges", type=int, default=rigidity.DEFAULT_MAX_EDGES)
    p.add_argument("--verbose", action="store_true", help="include the candidate table")
    p.set_defaults(func=_cmd_alpha)

    p = sub.add_parser("bound", help="collision-count bounds")
    p.add_argument("--mode", choices=["general", "tree", "lattice"], default="general")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-from", help="compute alpha exhaustively from this configuration")
    p.add_argument("--tau", default="exact", help="exact | upper | lower | value:<int>")
    p.add_argument("--tree-constant", choices=["nominal", "corrected"], default="corrected")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("orbit", help="folding orbit of a half-space family")
    p.add_argument("halfspaces")
    p.add_argument("--start", required=True, help="JSON list, e.g. '[1,0]'")
    p.add_argument("--witness", required=True, help="JSON list with positive margin")
    p.add_argument(
        "--policy", choices=["round-robin", "periodic", "seeded-random"],
        default="round-robin",
    )
    p.add_argument("--word", default="", help="comma-separated indices for periodic policy")
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("lattice", help="triangular-lattice configurations")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--save-config", help="also write the floating configuration here")
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("search", help="empirical maximum collision counts")
    p.add_argument("config")
    p.add_argument("--method", choices=["exhaustive", "greedy", "sweep"], default="exhaustive")
    p.add_argument("--depth-cap", type=int, default=20)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--seed", type=int)
    p.add_argument("--with-bound", action="store_true")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("verify", help="run the aggregated invariant suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PinnedBallsError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
