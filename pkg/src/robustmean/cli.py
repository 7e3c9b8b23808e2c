"""Command-line entry point: ``robustmean {estimate,datagen,bench,fhp}``.

Exit codes: 0 success, 1 FHP rounding failure, 2 invalid input,
3 insufficient samples.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench import load_plan, run_benchmark
from .core import EstimatorConfig
from .datagen import ContaminationSpec, DistributionSpec, FAMILIES, PLACEMENTS, contaminate, sample_dataset
from .descent import estimate_mean
from .errors import DegenerateData, InsufficientSamples, InvalidInput
from .fhp import fhp_solve
from .io import read_dataset, write_dataset

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_INSUFFICIENT = 0, 1, 2, 3

log = logging.getLogger("robustmean")


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise InvalidInput(f"--set expects key=value, got {pair!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _build_config(args) -> EstimatorConfig:
    values = {"delta": args.delta}
    if args.k is not None:
        values["k_override"] = args.k
    if args.seed is not None:
        values["rng_seed"] = args.seed
    values.update(_parse_overrides(args.set))
    try:
        return EstimatorConfig.from_dict(values)
    except TypeError as exc:
        raise InvalidInput(str(exc)) from None


def cmd_estimate(args) -> int:
    data = read_dataset(args.input)
    config = _build_config(args)
    try:
        report = estimate_mean(data, config)
    except DegenerateData:
        raise InvalidInput("data are degenerate") from None
    payload = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.output == "-":
        sys.stdout.write(payload)
    else:
        Path(args.output).write_text(payload)
    log.info("estimate written to %s", args.output)
    return EXIT_OK


def cmd_datagen(args) -> int:
    mean = (args.mean,) * args.d
    spec = DistributionSpec(args.family, mean, args.scale, args.dof)
    seq = np.random.SeedSequence(args.seed)
    data_seed, contam_seed = seq.spawn(2)
    data, truth = sample_dataset(spec, args.n, data_seed)
    sidecar = {**truth.to_dict(), "family": args.family, "scale": args.scale,
               "tail_parameter": args.dof, "seed": args.seed, "adversarial_rows": []}
    if args.contaminate:
        if args.radius is None:
            raise InvalidInput("--contaminate needs --radius")
        contam = ContaminationSpec(args.contaminate, args.placement, args.radius, center=mean)
        data, rows = contaminate(data, contam, contam_seed)
        sidecar["adversarial_rows"] = [int(i) for i in rows]
        sidecar["contamination"] = {"count": args.contaminate, "placement": args.placement,
                                    "radius": args.radius}
    write_dataset(args.output, data, sidecar)
    return EXIT_OK


def cmd_bench(args) -> int:
    plan = load_plan(args.plan)
    result = run_benchmark(plan, workers=args.workers)
    result.write(args.output_dir)
    for row in result.summary:
        print(f"{row['scenario']:>20s} {row['estimator']:>18s} median={row['median']}")
    return EXIT_OK


def cmd_fhp(args) -> int:
    data = read_dataset(args.input)
    overrides = _parse_overrides(args.set)
    cert = fhp_solve(data.samples, args.margin, seed=args.seed, **overrides)
    if cert is None:
        print(json.dumps({"status": "fail", "margin": args.margin}))
        return EXIT_FAIL
    print(json.dumps({"status": "ok", **cert.to_dict()}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustmean", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run the spectral estimator on a dataset file")
    est.add_argument("--input", required=True)
    est.add_argument("--delta", type=float, required=True)
    est.add_argument("--k", type=int)
    est.add_argument("--seed", type=int)
    est.add_argument("--output", required=True, help="report path, or - for stdout")
    est.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config field")
    est.set_defaults(func=cmd_estimate)

    gen = sub.add_parser("datagen", help="write a synthetic dataset file")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--dof", type=float, default=0.0, help="tail parameter (student_t dof, pareto shape)")
    gen.add_argument("--scale", type=float, default=1.0)
    gen.add_argument("--mean", type=float, default=0.0, help="value of every coordinate of the true mean")
    gen.add_argument("--contaminate", type=int, default=0, metavar="COUNT")
    gen.add_argument("--radius", type=float)
    gen.add_argument("--placement", choices=PLACEMENTS, default="cluster_at_distance")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--output", required=True)
    gen.set_defaults(func=cmd_datagen)

    bench = sub.add_parser("bench", help="run a benchmark plan")
    bench.add_argument("--plan", required=True)
    bench.add_argument("--output-dir", required=True)
    bench.add_argument("--workers", type=int, default=1)
    bench.set_defaults(func=cmd_bench)

    fhp = sub.add_parser("fhp", help="furthest-hyperplane bicriteria solver")
    fhp.add_argument("--input", required=True)
    fhp.add_argument("--margin", type=float, required=True)
    fhp.add_argument("--seed", type=int, default=0)
    fhp.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="solver option: eta_mwu, T, max_round_trials, alpha, iter_constant")
    fhp.set_defaults(func=cmd_fhp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InsufficientSamples as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (InvalidInput, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
