"""``wsrel`` command line.

Exit codes: 0 ok, 1 validation failure, 2 I/O or parse error, 3 solver
error, 4 usage or domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import absorption, availability, composition, monitor, profile_io, simulator

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_SOLVER = 3
EXIT_USAGE = 4

# published figures known to disagree with their own inputs: (mtbf, mttr) -> unavailability text
KNOWN_MISPRINTS = {(71394.0, 1.0): "0.000141%"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2, which is reserved for I/O
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def sig6(x: float) -> str:
    return f"{x:.6g}"


def read_input(name: str) -> str:
    """Text of ``name`` as a path, else as a bundled fixture name."""
    p = Path(name)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    try:
        return profile_io.bundled_path(name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file or bundled fixture: {name}") from None


def _emit_json(obj: object) -> None:
    print(json.dumps(obj, indent=2))


# -- validate ---------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    text = read_input(args.model)
    try:
        profile_io.parse_model(text, lenient=args.lenient)
    except profile_io.ParseError as exc:
        if exc.kind != "validation":
            raise
        for v in exc.violations:
            print(v)
        return EXIT_INVALID
    print("OK")
    return EXIT_OK


# -- solve ------------------------------------------------------------------

def cmd_solve(args: argparse.Namespace) -> int:
    doc = profile_io.parse_model(read_input(args.model), lenient=args.lenient)
    if args.iterative:
        result = absorption.solve_absorption_iterative(doc.model, max_iter=args.max_iter, tol=args.tol)
        solver = "iterative"
    else:
        result = absorption.solve_absorption(doc.model)
        solver = "direct"
    name = doc.metadata.get("name", args.model)
    if args.json:
        _emit_json({
            "model": name,
            "solver": solver,
            "start": result.start,
            "reliability": result.reliability,
            "faultProbability": result.fault_probability,
            "isReliable": result.is_reliable,
            "iterations": result.iterations,
            "nodes": {n: {"pCorrect": c, "pFault": f} for n, (c, f) in result.per_node.items()},
        })
        return EXIT_OK
    print(f"model: {name}")
    print(f"solver: {solver}" + (f" ({result.iterations} iterations)" if result.iterations else ""))
    print(f"start: {result.start}")
    print(f"reliability: {sig6(result.reliability)}")
    print(f"fault probability: {sig6(result.fault_probability)}")
    print(f"isReliable: {str(result.is_reliable).lower()}")
    print()
    width = max(4, *(len(n) for n in result.per_node))
    print(f"{'node':<{width}}  {'p_correct':>10}  {'p_fault':>10}")
    for n, (c, f) in result.per_node.items():
        print(f"{n:<{width}}  {sig6(c):>10}  {sig6(f):>10}")
    return EXIT_OK


# -- avail ------------------------------------------------------------------

_FAMILIES = {
    frozenset({"mtbf", "mttr"}): "mtbf",
    frozenset({"tm", "lam"}): "downtime",
    frozenset({"tm", "a"}): "intensity_from_availability",
    frozenset({"lam", "t"}): "reliability",
    frozenset({"r", "t"}): "intensity_from_reliability",
}


def _family(args: argparse.Namespace) -> str:
    given = frozenset(k for k in ("mtbf", "mttr", "tm", "lam", "a", "r", "t") if getattr(args, k) is not None)
    fam = _FAMILIES.get(given)
    if fam is None:
        raise UsageError(
            "supply exactly one flag family: --mtbf/--mttr, --tm/--lambda, --tm/--a, "
            "--lambda/--t [--reliability], or --r/--t"
        )
    if args.reliability and fam != "reliability":
        raise UsageError("--reliability only applies to --lambda/--t")
    return fam


def _availability_lines(a: float) -> list[str]:
    return [
        f"availability: {a!r}",
        f"availability (6 s.f.): {sig6(a)}",
        f"availability %: {a * 100:.5f}%",
        f"availability % truncated to 4 dp: {availability.truncate_percent(a)}%",
    ]


def cmd_avail(args: argparse.Namespace) -> int:
    fam = _family(args)
    out: dict[str, object] = {}
    lines: list[str] = []
    if fam == "mtbf":
        prof = availability.ServiceProfile("service", args.mtbf, args.mttr)
        a = availability.availability_from_mtbf_mttr(prof)
        u = prof.mttr_hours / (prof.mtbf_hours + prof.mttr_hours)
        out = {"formula": "MTBF/(MTBF+MTTR)", "availability": a, "unavailability": u}
        lines = ["formula: MTBF/(MTBF+MTTR)", *_availability_lines(a),
                 f"unavailability: {u!r}", f"unavailability %: {u * 100:.5g}%"]
        published = KNOWN_MISPRINTS.get((prof.mtbf_hours, prof.mttr_hours))
        if published is not None:
            note = (f"note: the published unavailability {published} for these inputs is inconsistent "
                    f"with the availability above; 1 - availability = {u * 100:.5g}%")
            out["note"] = note
            lines.append(note)
    elif fam == "downtime":
        a = availability.availability_from_downtime(args.tm, args.lam)
        out = {"formula": "1/(1+tm*lambda)", "availability": a}
        lines = ["formula: 1/(1+tm*lambda)", *_availability_lines(a)]
    elif fam == "intensity_from_availability":
        lam = availability.failure_intensity_from_availability(args.tm, args.a)
        out = {"formula": "(1-A)/(tm*A)", "failureIntensity": lam}
        lines = ["formula: (1-A)/(tm*A)", f"failure intensity: {lam!r}", f"failure intensity (6 s.f.): {sig6(lam)}"]
    elif fam == "reliability":
        r = availability.reliability_from_intensity(args.lam, args.t)
        out = {"formula": "exp(-lambda*t)", "reliability": r}
        lines = ["formula: exp(-lambda*t)", f"reliability: {r!r}", f"reliability (6 s.f.): {sig6(r)}"]
    else:
        lam = availability.intensity_from_reliability(args.r, args.t)
        out = {"formula": "-ln(R)/t", "failureIntensity": lam}
        lines = ["formula: -ln(R)/t", f"failure intensity: {lam!r}", f"failure intensity (6 s.f.): {sig6(lam)}"]
    if args.json:
        _emit_json(out)
    else:
        print("\n".join(lines))
    return EXIT_OK


# -- compose ----------------------------------------------------------------

def _parse_profile_flags(items: Sequence[str]) -> dict[str, monitor.OperationalProfile]:
    profiles = {}
    for item in items or ():
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"--profile expects SERVICE=PATH, got {item!r}")
        profiles[name] = profile_io.parse_operational_profile(read_input(path), service_name=name)
    return profiles


def cmd_compose(args: argparse.Namespace) -> int:
    doc = profile_io.parse_composition_sets(read_input(args.sets), lenient=args.lenient)
    sets = list(doc.sets)
    if args.set:
        try:
            sets = [doc.get(args.set)]
        except KeyError:
            raise UsageError(f"no composition set named {args.set!r}") from None
    ops = _parse_profile_flags(args.profile)
    reports = [(s, composition.evaluate_composition(s, ops)) for s in sets]

    if args.json:
        _emit_json({"sets": [
            {
                "name": rep.name,
                "services": [
                    {"name": p.name, "mtbfHours": p.mtbf_hours, "mttrHours": p.mttr_hours,
                     "availability": rep.per_service[p.name], "source": rep.sources[p.name]}
                    for p in s.services
                ],
                "paperSum": rep.paper_sum,
                "mean": rep.mean,
                "seriesProduct": rep.series_product,
            }
            for s, rep in reports
        ]})
        return EXIT_OK

    cell = availability.truncate_percent if args.paper_precision else (lambda a: sig6(a * 100))
    width = max(len("service"), *(len(p.name) for s, _ in reports for p in s.services))
    for k, (s, rep) in enumerate(reports):
        if k:
            print()
        print(f"== {rep.name} ==")
        print(f"{'service':<{width}}  {'S_MTBF':>10}  {'S_MTTR':>8}  {'Availability %':>14}  source")
        for p in s.services:
            print(f"{p.name:<{width}}  {p.mtbf_hours:>10g}  {p.mttr_hours:>8g}  "
                  f"{cell(rep.per_service[p.name]):>14}  {rep.sources[p.name]}")
        print(f"paperSum      = sum_i A_i (Σ formula, can exceed 100%): {sig6(rep.paper_sum)} ({sig6(rep.paper_sum * 100)}%)")
        print(f"mean          = paperSum / n:                           {sig6(rep.mean)} ({cell(rep.mean)}%)")
        print(f"seriesProduct = prod_i A_i (series system):             {sig6(rep.series_product)} ({cell(rep.series_product)}%)")
    return EXIT_OK


# -- monitor ----------------------------------------------------------------

def cmd_monitor(args: argparse.Namespace) -> int:
    prof = profile_io.parse_operational_profile(read_input(args.profile), horizon=args.horizon)
    out: dict[str, object] = {"service": prof.service_name, "horizon": prof.horizon, "events": len(prof.events)}
    lines = [f"service: {prof.service_name}", f"events: {len(prof.events)}", f"horizon: {prof.horizon:g} h"]
    try:
        if args.at is not None:
            m = monitor.monitoring_function(prof, args.at)
            out["at"] = {"t": args.at, "M": m}
            lines.append(f"M({args.at:g}) = {m}")
        if args.window is not None:
            avg = monitor.average_availability(prof, args.window)
            out["window"] = {"c": args.window, "average": avg}
            lines.append(f"average availability on [0, {args.window:g}]: {sig6(avg)}")
        if args.limits:
            est, series = monitor.limiting_availability_estimate(prof)
            out["limits"] = {"estimate": est, "windows": [{"c": c, "average": a} for c, a in series]}
            lines.append("window convergence (c, average):")
            lines.extend(f"  {sig6(c):>12}  {sig6(a)}" for c, a in series)
            lines.append(f"limiting estimate: {sig6(est)}")
    except monitor.OutOfRangeError as exc:
        raise UsageError(str(exc)) from None
    if not (args.at is not None or args.window is not None or args.limits):
        avg = monitor.average_availability(prof, prof.horizon)
        out["window"] = {"c": prof.horizon, "average": avg}
        lines.append(f"average availability on [0, {prof.horizon:g}]: {sig6(avg)}")
    if args.json:
        _emit_json(out)
    else:
        print("\n".join(lines))
    return EXIT_OK


# -- simulate ---------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    if args.kind == "walk":
        doc = profile_io.parse_model(read_input(args.model))
        est = simulator.walk_absorption(doc.model, simulator.SimConfig(args.trials, args.seed, args.max_steps))
        if args.json:
            _emit_json({"pCorrectHat": est.p_correct_hat, "standardError": est.standard_error,
                        "censoredWalks": est.censored_walks, "trials": est.trials, "seed": args.seed})
        else:
            print(f"trials: {est.trials}  seed: {args.seed}")
            print(f"p_correct estimate: {sig6(est.p_correct_hat)} ± {sig6(est.standard_error)} (1 SE)")
            print(f"censored walks: {est.censored_walks}")
        return EXIT_OK
    if args.kind == "renewal":
        prof = simulator.simulate_renewal(args.mtbf, args.mttr, args.horizon, args.seed, service_name=args.service)
        text = profile_io.serialize(prof)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
            print(f"wrote {len(prof.events)} events to {args.output}")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    p = simulator.ensemble_availability(args.mtbf, args.mttr, args.t, args.trials, args.seed)
    se = simulator.standard_error(p, args.trials)
    if args.json:
        _emit_json({"t": args.t, "estimate": p, "standardError": se, "trials": args.trials, "seed": args.seed})
    else:
        print(f"Pr[M({args.t:g})=1] estimate: {sig6(p)} ± {sig6(se)} (1 SE, {args.trials} trials, seed {args.seed})")
    return EXIT_OK


# -- wiring -----------------------------------------------------------------

def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wsrel", description="FSM reliability and web-service availability analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model", help="model file path or bundled fixture name")
    p.add_argument("--lenient", action="store_true", help="warn on unknown fields instead of failing")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="absorption probabilities into C and F")
    p.add_argument("model")
    p.add_argument("--iterative", action="store_true")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--json", action="store_true")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("avail", help="closed-form availability / reliability formulas")
    p.add_argument("--mtbf", type=float)
    p.add_argument("--mttr", type=float)
    p.add_argument("--tm", type=float, help="mean downtime per failure (hours)")
    p.add_argument("--lambda", dest="lam", type=float, help="failure intensity (per hour)")
    p.add_argument("--a", type=float, help="availability in (0, 1]")
    p.add_argument("--r", type=float, help="reliability in (0, 1]")
    p.add_argument("--t", type=float, help="exposure time (hours)")
    p.add_argument("--reliability", action="store_true", help="with --lambda/--t: report exp(-lambda*t)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_avail)

    p = sub.add_parser("compose", help="availability over composition sets")
    p.add_argument("sets", help="composition file path or bundled fixture name (e.g. table1)")
    p.add_argument("--set", help="only the named composition set")
    p.add_argument("--profile", action="append", metavar="SERVICE=PATH",
                   help="score SERVICE from an operational profile log instead of MTBF/MTTR")
    p.add_argument("--paper-precision", action="store_true", help="percent truncated to 4 decimals")
    p.add_argument("--json", action="store_true")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("monitor", help="availability from an up/down event log")
    p.add_argument("profile")
    p.add_argument("--horizon", type=float, help="overrides the file's '# horizon=' line")
    p.add_argument("--at", type=float, help="evaluate M(t)")
    p.add_argument("--window", type=float, help="average availability on [0, c]")
    p.add_argument("--limits", action="store_true", help="geometric window convergence series")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("simulate", help="Monte Carlo oracle")
    sim = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    w = sim.add_parser("walk", help="random walks on a model")
    w.add_argument("model")
    w.add_argument("--trials", type=int, default=100_000)
    w.add_argument("--seed", type=_nonneg_int, default=0)
    w.add_argument("--max-steps", type=int, default=10_000)
    w.add_argument("--json", action="store_true")
    r = sim.add_parser("renewal", help="generate an alternating renewal profile log")
    r.add_argument("--mtbf", type=float, required=True)
    r.add_argument("--mttr", type=float, required=True)
    r.add_argument("--horizon", type=float, required=True)
    r.add_argument("--seed", type=_nonneg_int, default=0)
    r.add_argument("--service", default="simulated")
    r.add_argument("-o", "--output")
    e = sim.add_parser("ensemble", help="fraction of trajectories up at time t")
    e.add_argument("--mtbf", type=float, required=True)
    e.add_argument("--mttr", type=float, required=True)
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--trials", type=int, default=10_000)
    e.add_argument("--seed", type=_nonneg_int, default=0)
    e.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", profile_io.UnknownFieldWarning)
            warnings.showwarning = lambda m, *a, **k: print(f"warning: {m}", file=sys.stderr)
            return args.func(args)
    except UsageError as exc:
        print(f"wsrel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, profile_io.ParseError) as exc:
        print(f"wsrel: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except absorption.SolverError as exc:
        print(f"wsrel: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        # DomainError and simulator argument checks
        print(f"wsrel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
