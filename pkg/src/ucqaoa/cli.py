"""Command-line surface.

Subcommands: oracle, simulate, run-hybrid, solve-classical,
bench-classical, metrics.  Exit codes: 0 success, 2 validation error,
3 infeasible instance, 4 size guard exceeded.

Timing fields are zeroed by default in run-hybrid and solve-classical
output (pass --wall-times for real clocks) and real by default in
bench-classical (pass --no-wall-times to zero them), so that every
artifact a regression test pins is byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from . import baseline, dispatch, hybrid, metrics, qaoa
from .errors import (
    InfeasibleError,
    NonFiniteObjectiveError,
    SizeGuardError,
    ValidationError,
)
from .instance import (
    UcInstance,
    bits_to_string,
    builtin_ten_unit,
    load_instance_file,
    string_to_bits,
)
from .qubo import ContinuousAssignment, PenaltyWeights, build_qubo, qubo_diagonal

log = logging.getLogger("ucqaoa")

BUILTIN_TOKEN = "builtin:ten-unit"


def _fmt(x: float) -> str:
    return repr(float(x))


def _load_instance(args) -> UcInstance:
    if args.instance == BUILTIN_TOKEN:
        inst = builtin_ten_unit()
    else:
        inst = load_instance_file(args.instance)
    if getattr(args, "load", None) is not None:
        inst = inst.with_load(args.load)
    return inst


def _weights(args, inst: UcInstance) -> PenaltyWeights:
    default = PenaltyWeights.default_for(inst)
    return PenaltyWeights(
        lambda1=default.lambda1 if args.lambda1 is None else args.lambda1,
        lambda2=default.lambda2 if args.lambda2 is None else args.lambda2,
        lambda3=default.lambda3 if args.lambda3 is None else args.lambda3,
    )


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from exc


def _out_stream(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_rows(path: Optional[str], header: Sequence[str], rows) -> None:
    stream, owned = _out_stream(path)
    try:
        writer = csv.writer(stream)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if owned:
            stream.close()


def cmd_oracle(args) -> int:
    inst = _load_instance(args)
    entries = dispatch.enumerate_all(inst)
    log.info("enumerated %d commitments for %s", len(entries), inst.name)
    rows = []
    for bits, sol in entries:
        cost = _fmt(sol.cost) if sol.feasible else ""
        rows.append([bits_to_string(bits), cost, "true" if sol.feasible else "false"])
    _write_rows(args.out, ["bitstring", "cost", "feasible"], rows)
    return 0


def _distribution_rows(probs: np.ndarray, n: int, k: Optional[int]):
    if k is None:
        idx = np.arange(probs.size)
    else:
        idx = metrics.top_k(probs, k)
    from .instance import index_to_string

    return [[index_to_string(int(i), n), _fmt(probs[int(i)])] for i in idx]


def cmd_simulate(args) -> int:
    inst = _load_instance(args)
    w = _weights(args, inst)
    gamma = _float_list(args.gamma)
    beta = _float_list(args.beta)
    cfg = hybrid.HybridConfig(depth=max(1, len(gamma)), seed=args.seed)
    theta0 = hybrid.initial_theta(inst, cfg)
    p = np.array(_float_list(args.p)) if args.p else theta0.p
    s1 = np.array(_float_list(args.s1)) if args.s1 else theta0.s1
    s2 = np.array(_float_list(args.s2)) if args.s2 else theta0.s2
    ca = ContinuousAssignment(p=p, s1=s1, s2=s2)
    diag = qubo_diagonal(build_qubo(inst, w, ca))
    probs = qaoa.qaoa_distribution(diag, qaoa.VariationalParams(gamma, beta))
    if args.shots > 0:
        rng = np.random.default_rng(args.seed)
        probs = qaoa.sample(probs, args.shots, rng) / args.shots
    _write_rows(None, ["bitstring", "probability"],
                _distribution_rows(probs, inst.n, args.top))
    if args.out is not None:
        _write_rows(args.out, ["bitstring", "probability"],
                    _distribution_rows(probs, inst.n, None))
    return 0


def _zero_elapsed(records):
    return tuple(dataclasses.replace(r, elapsed_ms=0.0) for r in records)


def _gnuplot_history(csv_path: str, gp_path: str) -> None:
    text = (
        "set datafile separator ','\n"
        "set xlabel 'iteration'\n"
        "set ylabel 'near-optimal probability'\n"
        "set y2label 'avg Hamming distance (top 50)'\n"
        "set y2tics\n"
        f"plot '{csv_path}' using 1:3 with lines title 'near-opt prob', \\\n"
        f"     '{csv_path}' using 1:4 axes x1y2 with lines title 'avg Hamming top-50'\n"
    )
    with open(gp_path, "w") as fh:
        fh.write(text)


def _gnuplot_scaling(csv_path: str, gp_path: str) -> None:
    text = (
        "set datafile separator ','\n"
        "set xlabel 'units'\n"
        "set ylabel 'median wall time (ms)'\n"
        "set logscale y\n"
        f"plot '{csv_path}' using 1:(strcol(2) eq 'exact' ? $3 : 1/0) "
        "with linespoints title 'exact', \\\n"
        f"     '{csv_path}' using 1:(strcol(2) eq 'approx' ? $3 : 1/0) "
        "with linespoints title 'approx'\n"
    )
    with open(gp_path, "w") as fh:
        fh.write(text)


def _stem(path: str) -> str:
    for suffix in (".json", ".csv"):
        if path.endswith(suffix):
            return path[: -len(suffix)]
    return path


def cmd_run_hybrid(args) -> int:
    inst = _load_instance(args)
    cfg = hybrid.HybridConfig(
        depth=args.depth,
        weights=_weights(args, inst),
        max_iterations=args.iterations,
        seed=args.seed,
        shots=args.shots,
        metric_cadence=args.cadence,
        near_opt_fraction=args.fraction,
    )
    history = hybrid.run_hybrid(inst, cfg)
    records = history.records if args.wall_times else _zero_elapsed(history.records)
    if args.out is not None:
        fmt = "json" if args.out.endswith(".json") else "csv"
        metrics.export_history(records, fmt, args.out)
        if args.gnuplot:
            csv_path = args.out
            if fmt == "json":
                csv_path = _stem(args.out) + ".csv"
                metrics.export_history(records, "csv", csv_path)
            _gnuplot_history(csv_path, _stem(args.out) + ".gp")
    final = records[-1]
    print(f"iterations={final.iter}")
    print(f"objective={_fmt(final.objective)}")
    print(f"near_opt_prob={_fmt(final.near_opt_prob)}")
    print(f"avg_hamming_top50={_fmt(final.avg_hamming_top50)}")
    print(f"best_bitstring={final.best_bitstring}")
    return 0


def cmd_solve_classical(args) -> int:
    inst = _load_instance(args)
    report = baseline.solve_exact(inst) if args.gap is None else baseline.solve_approx(inst, args.gap)
    wall = report.wall_time_s if args.wall_times else 0.0
    print(f"commitment={bits_to_string(report.commitment)}")
    print(f"cost={_fmt(report.dispatch.cost)}")
    print(f"powers={','.join(_fmt(p) for p in report.dispatch.powers)}")
    print(f"proven_gap={_fmt(report.proven_gap)}")
    print(f"nodes_expanded={report.nodes_expanded}")
    print(f"wall_time_s={_fmt(wall)}")
    return 0


def cmd_bench_classical(args) -> int:
    sizes = _int_list(args.sizes)
    rows = baseline.scaling_benchmark(
        sizes,
        trials=args.trials,
        gap=args.gap,
        seed=args.seed,
        measure_time=args.wall_times,
    )
    out_rows = [[n, mode, _fmt(ms), _fmt(cost)] for n, mode, ms, cost in rows]
    _write_rows(args.out, ["n", "mode", "median_ms", "cost"], out_rows)
    if args.gnuplot and args.out is not None:
        _gnuplot_scaling(args.out, _stem(args.out) + ".gp")
    return 0


def _load_distribution(path: str, n: int) -> np.ndarray:
    probs = np.zeros(1 << n)
    seen = 0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "bitstring" not in reader.fieldnames:
            raise ValidationError(f"{path}: expected a bitstring,probability CSV header")
        for row in reader:
            bits = string_to_bits(row["bitstring"])
            if len(bits) != n:
                raise ValidationError(
                    f"{path}: bitstring {row['bitstring']!r} is not length {n}"
                )
            index = sum(b << i for i, b in enumerate(bits))
            probs[index] = float(row["probability"])
            seen += 1
    if seen != 1 << n:
        raise ValidationError(f"{path}: has {seen} rows, expected {1 << n}")
    return probs


def cmd_metrics(args) -> int:
    inst = _load_instance(args)
    probs = _load_distribution(args.distribution, inst.n)
    nos = dispatch.near_optimal_set(inst, args.fraction)
    snap = metrics.compute_snapshot(probs, nos, k=args.k)
    rows = [
        ["near_opt_prob", _fmt(snap.near_opt_prob)],
        [f"avg_hamming_top{args.k}", _fmt(snap.avg_hamming_top50)],
        ["members", str(len(nos.members))],
        ["optimal_cost", _fmt(nos.optimal_cost)],
        ["cutoff", _fmt(nos.cutoff)],
    ]
    _write_rows(args.out, ["metric", "value"], rows)
    return 0


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", default=BUILTIN_TOKEN,
                   help=f"instance JSON path, or {BUILTIN_TOKEN!r} (default)")
    p.add_argument("--load", type=float, default=None,
                   help="override the instance's target load (MW)")


def _add_weight_flags(p: argparse.ArgumentParser) -> None:
    for name in ("lambda1", "lambda2", "lambda3"):
        p.add_argument(f"--{name}", type=float, default=None,
                       help=f"penalty weight {name} (default: 10*max(a)/L^2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucqaoa",
        description="Hybrid QAOA / simplex solver for single-period unit commitment.",
    )
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", help="brute-force ranked enumeration as CSV")
    _add_instance_flags(p)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="QAOA distribution at fixed parameters")
    _add_instance_flags(p)
    _add_weight_flags(p)
    p.add_argument("--gamma", required=True, help="comma-separated cost angles")
    p.add_argument("--beta", required=True, help="comma-separated mixer angles")
    p.add_argument("--p", default=None, help="comma-separated powers (default: proportional split)")
    p.add_argument("--s1", default=None, help="comma-separated lower slacks")
    p.add_argument("--s2", default=None, help="comma-separated upper slacks")
    p.add_argument("--shots", type=int, default=0, help="sample instead of exact (0 = exact)")
    p.add_argument("--top", type=int, default=10, help="how many entries to print")
    p.add_argument("--out", default=None, help="also write the full distribution CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("run-hybrid", help="full hybrid optimization run")
    _add_instance_flags(p)
    _add_weight_flags(p)
    p.add_argument("--depth", type=int, default=1, help="QAOA depth P")
    p.add_argument("--iterations", type=int, default=1500, help="simplex iteration budget")
    p.add_argument("--shots", type=int, default=0, help="sampled expectation (0 = exact)")
    p.add_argument("--cadence", type=int, default=10, help="iterations between metric snapshots")
    p.add_argument("--fraction", type=float, default=0.05, help="near-optimal cutoff fraction")
    p.add_argument("--out", default=None, help="history path (.json or .csv)")
    p.add_argument("--wall-times", action="store_true",
                   help="record real elapsed_ms instead of 0.0")
    p.add_argument("--gnuplot", action="store_true", help="write a companion .gp plot script")
    p.set_defaults(func=cmd_run_hybrid)

    p = sub.add_parser("solve-classical", help="branch-and-bound reference solve")
    _add_instance_flags(p)
    p.add_argument("--gap", type=float, default=None,
                   help="termination gap (default: exact solve)")
    p.add_argument("--wall-times", action="store_true",
                   help="print real wall_time_s instead of 0.0")
    p.set_defaults(func=cmd_solve_classical)

    p = sub.add_parser("bench-classical", help="runtime scaling benchmark CSV")
    p.add_argument("--sizes", required=True, help="comma-separated unit counts")
    p.add_argument("--trials", type=int, default=5, help="instances per size")
    p.add_argument("--gap", type=float, default=0.08, help="approximate-mode gap")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--no-wall-times", dest="wall_times", action="store_false",
                   help="write 0.0 timings for reproducible output")
    p.add_argument("--gnuplot", action="store_true", help="write a companion .gp plot script")
    p.set_defaults(func=cmd_bench_classical, wall_times=True)

    p = sub.add_parser("metrics", help="recompute metrics from a saved distribution")
    _add_instance_flags(p)
    p.add_argument("--distribution", required=True,
                   help="full distribution CSV from `simulate --out`")
    p.add_argument("--fraction", type=float, default=0.05, help="near-optimal cutoff fraction")
    p.add_argument("--k", type=int, default=50, help="top-k size for the Hamming metric")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonFiniteObjectiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
