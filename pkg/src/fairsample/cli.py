"""Command-line entry point: census, run, ensemble, showcase, and merge.

Option precedence is flag > --config file > FAIRSAMPLE_SEED (seed only) >
built-in default. Every artifact written embeds the effective configuration
and the package version; files are re-read and validated before exiting 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import __version__
from .angles import OptimizerConfig, sweep_p
from .ensemble import (
    EnsembleReport,
    load_report,
    merge_reports,
    pick_showcase,
    run_ensemble,
    save_report,
)
from .fairness import RunRecord, build_run_record
from .ising import decode_sk, degeneracy_census, load_model, sk_code_bits, spectrum
from .statevector import MIXERS

SEED_ENV = "FAIRSAMPLE_SEED"
DEFAULT_ENSEMBLE_OUT = os.path.join("results", "ensemble_n5")


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairsample", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(required=True)

    census = sub.add_parser("census", help="degeneracy histogram of the +-1 SK ensemble")
    census.add_argument("--n", type=int, default=5)
    census.add_argument("--out", help="write the histogram as JSON")
    census.set_defaults(func=cmd_census)

    run = sub.add_parser("run", help="p sweep on one model, writing a RunRecord")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--code", type=int, help="SK ensemble code")
    src.add_argument("--model", help="model JSON file")
    _add_common_options(run)
    run.add_argument("--out", help="record path (default run_<id>_<mixer>.json)")
    run.set_defaults(func=cmd_run, default_bh_iters=10_000)

    ens = sub.add_parser("ensemble", help="sweep every degenerate model of the ensemble")
    ens.add_argument("--n", type=int, default=5)
    _add_common_options(ens)
    ens.add_argument("--shard", help="code range A:B to process")
    ens.add_argument("--degeneracy", type=int, help="restrict to one degeneracy class")
    ens.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    ens.add_argument("--out", default=DEFAULT_ENSEMBLE_OUT)
    ens.set_defaults(func=cmd_ensemble, default_bh_iters=20)

    show = sub.add_parser("showcase", help="rank a class of a finished ensemble by sampling bias")
    show.add_argument("--report", default=DEFAULT_ENSEMBLE_OUT, help="ensemble output directory")
    show.add_argument("--degeneracy", type=int, required=True)
    show.add_argument("--top", type=int)
    show.add_argument("--out", help="write the ranked selection as JSON")
    show.set_defaults(func=cmd_showcase)

    merge = sub.add_parser("merge", help="combine ensemble shard outputs")
    merge.add_argument("shards", nargs="+", help="shard output directories")
    merge.add_argument("--out", required=True)
    merge.set_defaults(func=cmd_merge)
    return parser


def _add_common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mixer", choices=MIXERS, default=None)
    sub.add_argument("--pmax", type=int, default=None)
    sub.add_argument("--bh-iters", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--config", help="JSON config file (flags take precedence)")


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config file must hold a JSON object")
    return data


def _resolve(flag_value, config: dict, key: str, default, env_key: Optional[str] = None):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    if env_key and os.environ.get(env_key):
        return int(os.environ[env_key])
    return default


def _optimizer_config(args, config: dict) -> OptimizerConfig:
    return OptimizerConfig(
        bh_iters=int(_resolve(args.bh_iters, config, "bh_iters", args.default_bh_iters)),
        seed=int(_resolve(args.seed, config, "seed", 0, env_key=SEED_ENV)),
        local_tol=float(config.get("local_tol", OptimizerConfig.local_tol)),
        perturbation_scale=float(config.get("perturbation_scale", OptimizerConfig.perturbation_scale)),
        p_max=int(_resolve(args.pmax, config, "pmax", OptimizerConfig.p_max)),
        convergence_eps=float(config.get("convergence_eps", OptimizerConfig.convergence_eps)),
        retry_budget=int(config.get("retry_budget", OptimizerConfig.retry_budget)),
    )


def _write_json(path: str, payload: dict) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_census(args) -> int:
    if args.n < 1:
        raise ValueError(f"spin count must be positive, got {args.n}")
    counts = degeneracy_census(args.n)
    total = sum(counts.values())
    print(f"degeneracy census, n={args.n} ({total} models)")
    print(f"{'degeneracy':>12}  {'models':>8}")
    for k, v in counts.items():
        print(f"{k:>12}  {v:>8}")
    if args.out:
        payload = {
            "version": __version__,
            "config": {"n": args.n},
            "invocation": {"command": "census", "out": args.out},
            "census": {str(k): v for k, v in counts.items()},
        }
        _write_json(args.out, payload)
        written = json.load(open(args.out))
        if sum(written["census"].values()) != 1 << sk_code_bits(args.n):
            raise ValueError(f"{args.out}: census does not partition the ensemble")
        print(f"wrote {args.out}")
    return 0


def cmd_run(args) -> int:
    config = _load_config_file(args.config)
    cfg = _optimizer_config(args, config)
    mixer = _resolve(args.mixer, config, "mixer", "x")
    if args.code is not None:
        model = decode_sk(args.code)
        model_id = f"sk-{args.code}"
    else:
        model = load_model(args.model)
        model_id = f"file-{model.digest()[:12]}"
    spec = spectrum(model)
    sweep = sweep_p(model, mixer, cfg, spec=spec)
    record = build_run_record(model_id, spec, mixer, sweep)

    print(f"model {model_id}  mixer={mixer}  degeneracy={record.degeneracy}  c_min={record.c_min}")
    print(f"{'p':>3}  {'expectation':>18}  {'approx ratio':>14}  {'entropy':>12}")
    for step in record.steps:
        ent = "-" if step.entropy_normalized is None else f"{step.entropy_normalized:.8f}"
        print(f"{step.p:>3}  {step.expectation:>18.12f}  {step.approximation_ratio:>14.10f}  {ent:>12}")
    if record.converged_p is not None:
        print(f"converged at p={record.converged_p}; fair={record.fair}")
    else:
        print(f"did not converge within p_max={cfg.p_max}")
    if record.monotonic_failures:
        print(f"warning: strict improvement failed at p={list(record.monotonic_failures)}")

    out = args.out or f"run_{model_id}_{mixer}.json"
    payload = {
        "version": __version__,
        "config": dict(vars(cfg).items(), mixer=mixer),
        "invocation": {"command": "run", "code": args.code, "model": args.model, "out": out},
        "record": record.to_dict(),
    }
    _write_json(out, payload)
    RunRecord.from_dict(json.load(open(out))["record"])
    print(f"wrote {out}")
    return 0


def cmd_ensemble(args) -> int:
    config = _load_config_file(args.config)
    cfg = _optimizer_config(args, config)
    mixer = _resolve(args.mixer, config, "mixer", "x")
    jobs = int(_resolve(args.jobs, config, "jobs", os.cpu_count() or 1))
    shard = _parse_shard(args.shard) if args.shard else None
    filt = {args.degeneracy} if args.degeneracy is not None else None
    report = run_ensemble(
        cfg,
        degeneracy_filter=filt,
        shard=shard,
        n=args.n,
        mixer=mixer,
        jobs=jobs,
        checkpoint_dir=os.path.join(args.out, "checkpoints"),
        progress=sys.stderr.isatty(),
    )
    invocation = {
        "command": "ensemble",
        "shard": list(shard) if shard else None,
        "jobs": jobs,
        "out": args.out,
        "config_file": args.config,
    }
    save_report(report, args.out, version=__version__, invocation=invocation)
    reloaded = load_report(args.out)
    if len(reloaded.records) != len(report.records):
        raise ValueError(f"{args.out}: persisted records do not round-trip")
    _print_class_table(report)
    print(f"wrote {args.out}/summary.json and records.jsonl ({len(report.records)} records)")
    return 0


def cmd_showcase(args) -> int:
    summary_path = os.path.join(args.report, "summary.json")
    if not os.path.exists(summary_path):
        raise ValueError(f"no ensemble report found at {args.report} (run `fairsample ensemble` first)")
    report = load_report(args.report)
    codes = pick_showcase(report, args.degeneracy, top=args.top)
    by_code = {rec.sk_code(): rec for rec in report.records}
    print(f"{'code':>8}  {'final entropy':>14}  {'converged_p':>12}")
    selection = []
    for code in codes:
        rec = by_code[code]
        final = rec.steps[-1].entropy_normalized
        print(f"{code:>8}  {final:>14.10f}  {str(rec.converged_p):>12}")
        selection.append(
            {"code": code, "final_entropy": final, "converged_p": rec.converged_p, "fair": rec.fair}
        )
    if args.out:
        payload = {
            "version": __version__,
            "config": {"degeneracy": args.degeneracy, "top": args.top},
            "invocation": {"command": "showcase", "report": args.report, "out": args.out},
            "selection": selection,
        }
        _write_json(args.out, payload)
        print(f"wrote {args.out}")
    return 0


def cmd_merge(args) -> int:
    reports = [load_report(d) for d in args.shards]
    merged = merge_reports(reports)
    invocation = {"command": "merge", "shards": list(args.shards), "out": args.out}
    save_report(merged, args.out, version=__version__, invocation=invocation)
    load_report(args.out)
    _print_class_table(merged)
    print(f"wrote {args.out} ({len(merged.records)} records)")
    return 0


def _parse_shard(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError as exc:
        raise ValueError(f"bad shard {text!r}, expected A:B") from exc


def _print_class_table(report: EnsembleReport) -> None:
    print(f"{'degeneracy':>12}  {'models':>8}  {'fair':>8}  {'unfair':>8}  {'flagged':>8}")
    for k, cls in report.class_summaries().items():
        print(
            f"{k:>12}  {cls['count']:>8}  {cls['fair']:>8}  {cls['unfair']:>8}"
            f"  {cls['monotonic_failures']:>8}"
        )


if __name__ == "__main__":
    sys.exit(main())
