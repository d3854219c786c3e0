"""Ensemble orchestration: sweep every degenerate SK model, classify fairness,
aggregate per-degeneracy statistics, and persist shard-mergeable results.

Output directory layout::

    <out>/summary.json      per-class statistics, census, config echo
    <out>/records.jsonl     one RunRecord per line, sorted by code
    <out>/checkpoints/      append-only partial results for resuming

Per-model results depend only on (cfg, code), never on shard boundaries or
worker scheduling, so merging shard outputs reproduces a single-shot run.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import sys
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

from .angles import OptimizerConfig, sweep_p
from .fairness import RunRecord, build_run_record
from .ising import decode_sk, degeneracy_census, sk_code_bits, sk_degeneracy_table, spectrum
from .statevector import MIXER_X

_CHECKPOINT_NAME = "partial.jsonl"

_worker_cfg: Optional[OptimizerConfig] = None
_worker_args: tuple = ()


@dataclass(frozen=True)
class EnsembleReport:
    """All run records for one ensemble (or shard of it), plus provenance."""

    n: int
    mixer: str
    config: dict
    coverage: tuple[tuple[int, int], ...]
    degeneracy_filter: Optional[tuple[int, ...]]
    records: tuple[RunRecord, ...]

    def class_summaries(self) -> dict[int, dict]:
        return summarize_records(self.records)


def summarize_records(records: Sequence[RunRecord]) -> dict[int, dict]:
    """Per-degeneracy-class statistics rebuilt purely from the records."""
    classes: dict[int, dict] = {}
    for rec in sorted(records, key=_record_code):
        cls = classes.setdefault(
            rec.degeneracy,
            {
                "count": 0,
                "fair": 0,
                "unfair": 0,
                "monotonic_failures": 0,
                "converged_p_hist": {},
                "entropy_traces": {},
            },
        )
        cls["count"] += 1
        if rec.fair:
            cls["fair"] += 1
        else:
            cls["unfair"] += 1
        if rec.monotonic_failures:
            cls["monotonic_failures"] += 1
        key = "none" if rec.converged_p is None else str(rec.converged_p)
        cls["converged_p_hist"][key] = cls["converged_p_hist"].get(key, 0) + 1
        cls["entropy_traces"][rec.model_id] = rec.entropy_trace()
    return dict(sorted(classes.items()))


def _record_code(rec: RunRecord) -> int:
    code = rec.sk_code()
    return code if code is not None else -1


def _init_worker(cfg: OptimizerConfig, n: int, mixer: str) -> None:
    global _worker_cfg, _worker_args
    _worker_cfg = cfg
    _worker_args = (n, mixer)


def _sweep_code(code: int) -> RunRecord:
    n, mixer = _worker_args
    model = decode_sk(code, n)
    spec = spectrum(model)
    sweep = sweep_p(model, mixer, _worker_cfg, spec=spec)
    return build_run_record(f"sk-{code}", spec, mixer, sweep)


def _load_checkpoint(path: str, wanted: set[int]) -> dict[int, RunRecord]:
    done: dict[int, RunRecord] = {}
    if not os.path.exists(path):
        return done
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = RunRecord.from_dict(json.loads(line))
            code = rec.sk_code()
            if code in wanted:
                done[code] = rec
    return done


def run_ensemble(
    cfg: OptimizerConfig,
    degeneracy_filter: Optional[Iterable[int]] = None,
    shard: Optional[tuple[int, int]] = None,
    *,
    n: int = 5,
    mixer: str = MIXER_X,
    jobs: int = 1,
    checkpoint_dir: Optional[str] = None,
    progress: bool = False,
) -> EnsembleReport:
    """Sweep all degenerate models in the (sharded) code range.

    Every model with ground-state degeneracy >= 2 (and matching the filter)
    is swept with ``sweep_p``; non-monotonic sweeps are flagged in their
    records, never dropped. Deterministic given cfg.
    """
    total_codes = 1 << sk_code_bits(n)
    start, stop = shard if shard is not None else (0, total_codes)
    if not 0 <= start < stop <= total_codes:
        raise ValueError(f"shard {start}:{stop} out of range [0, {total_codes}]")
    if n != 5 and shard is None:
        raise ValueError(f"full n={n} ensemble must be explicitly sharded")
    filt = tuple(sorted(set(degeneracy_filter))) if degeneracy_filter is not None else None

    table = sk_degeneracy_table(n)
    codes = [
        c
        for c in range(start, stop)
        if table[c] >= 2 and (filt is None or table[c] in filt)
    ]

    done: dict[int, RunRecord] = {}
    checkpoint_path = None
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)
        checkpoint_path = os.path.join(checkpoint_dir, _CHECKPOINT_NAME)
        done = _load_checkpoint(checkpoint_path, set(codes))

    pending = [c for c in codes if c not in done]
    ckpt = open(checkpoint_path, "a") if checkpoint_path else None
    try:
        if jobs > 1 and len(pending) > 1:
            with multiprocessing.Pool(jobs, initializer=_init_worker, initargs=(cfg, n, mixer)) as pool:
                for rec in pool.imap_unordered(_sweep_code, pending, chunksize=4):
                    _finish_record(rec, done, ckpt, progress, len(codes))
        else:
            _init_worker(cfg, n, mixer)
            for code in pending:
                _finish_record(_sweep_code(code), done, ckpt, progress, len(codes))
    finally:
        if ckpt:
            ckpt.close()
        if progress:
            print(file=sys.stderr)

    records = tuple(done[c] for c in sorted(done))
    return EnsembleReport(
        n=n,
        mixer=mixer,
        config=asdict(cfg),
        coverage=((start, stop),),
        degeneracy_filter=filt,
        records=records,
    )


def _finish_record(rec: RunRecord, done: dict, ckpt, progress: bool, total: int) -> None:
    done[rec.sk_code()] = rec
    if ckpt:
        ckpt.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
        ckpt.flush()
    if progress:
        print(f"\r[ensemble] {len(done)}/{total} models", end="", file=sys.stderr)


def merge_reports(reports: Sequence[EnsembleReport]) -> EnsembleReport:
    """Combine shard reports; commutative, so any sharding gives one result."""
    if not reports:
        raise ValueError("nothing to merge")
    first = reports[0]
    seen: dict[int, RunRecord] = {}
    ranges: list[tuple[int, int]] = []
    for rep in reports:
        if (rep.n, rep.mixer, rep.config, rep.degeneracy_filter) != (
            first.n,
            first.mixer,
            first.config,
            first.degeneracy_filter,
        ):
            raise ValueError("cannot merge reports with differing configuration")
        ranges.extend(rep.coverage)
        for rec in rep.records:
            code = rec.sk_code()
            if code in seen:
                raise ValueError(f"code {code} appears in more than one shard")
            seen[code] = rec
    return EnsembleReport(
        n=first.n,
        mixer=first.mixer,
        config=first.config,
        coverage=_merged_ranges(ranges),
        degeneracy_filter=first.degeneracy_filter,
        records=tuple(seen[c] for c in sorted(seen)),
    )


def _merged_ranges(ranges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    merged: list[list[int]] = []
    for a, b in sorted(ranges):
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


def save_report(report: EnsembleReport, out_dir: str, *, version: str, invocation: Optional[dict] = None) -> None:
    """Write records.jsonl and summary.json under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    records_path = os.path.join(out_dir, "records.jsonl")
    with open(records_path, "w") as fh:
        for rec in report.records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
    summary = {
        "version": version,
        "config": dict(
            report.config,
            mixer=report.mixer,
            n=report.n,
            degeneracy_filter=list(report.degeneracy_filter) if report.degeneracy_filter else None,
        ),
        "invocation": invocation,
        "coverage": [list(r) for r in report.coverage],
        "degeneracy_census": {str(k): v for k, v in degeneracy_census(report.n).items()},
        "model_count": len(report.records),
        "classes": {str(k): v for k, v in report.class_summaries().items()},
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report(out_dir: str) -> EnsembleReport:
    """Reload a saved report; every record is re-validated on load."""
    with open(os.path.join(out_dir, "summary.json")) as fh:
        summary = json.load(fh)
    records = []
    with open(os.path.join(out_dir, "records.jsonl")) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RunRecord.from_dict(json.loads(line)))
    config = dict(summary["config"])
    n = config.pop("n")
    mixer = config.pop("mixer")
    filt = config.pop("degeneracy_filter")
    return EnsembleReport(
        n=n,
        mixer=mixer,
        config=config,
        coverage=tuple((a, b) for a, b in summary["coverage"]),
        degeneracy_filter=tuple(filt) if filt else None,
        records=tuple(sorted(records, key=_record_code)),
    )


def pick_showcase(
    report: EnsembleReport,
    degeneracy: int,
    top: Optional[int] = None,
    max_entropy: Optional[float] = None,
) -> list[int]:
    """Codes of the requested class ranked by final-p entropy, most biased first."""
    ranked = sorted(
        (rec for rec in report.records if rec.degeneracy == degeneracy),
        key=lambda rec: (rec.steps[-1].entropy_normalized, _record_code(rec)),
    )
    if max_entropy is not None:
        ranked = [rec for rec in ranked if rec.steps[-1].entropy_normalized <= max_entropy]
    codes = [rec.sk_code() for rec in ranked]
    return codes[:top] if top is not None else codes
