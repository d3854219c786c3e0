"""Fair-sampling analytics: approximation ratio, normalized ground-state
entropy, the fairness classification rule, and the per-run record schema.

RunRecord JSON schema (one object, also the JSONL line format):

    {
      "model_id": "sk-173" | "file-<sha256 prefix>",
      "mixer": "x" | "grover",
      "n": 5,
      "degeneracy": 2,
      "c_min": -7, "c_max": 9,
      "ground_states": [3, 28],
      "steps": [
        {"p": 1, "gammas": [...], "betas": [...],
         "expectation": -3.69..., "approximation_ratio": 0.79...,
         "gs_probabilities": [...], "gs_proportions": [...],
         "entropy_normalized": 0.99...},
        ...
      ],
      "converged_p": 7 | null,
      "fair": true | false | null,          # null when degeneracy < 2
      "monotonic_failures": [...]
    }

``gs_proportions`` renormalize the ground-state probabilities to sum to 1;
``entropy_normalized`` is null for non-degenerate models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .angles import SweepResult
from .ising import Spectrum
from .statevector import MIXERS, evolve, ground_state_probabilities, phase_table

PROPORTION_SUM_TOL = 1e-10
FAIR_DECIMALS = 8


def approximation_ratio(z_energy: float, c_min: float, c_max: float) -> float:
    """(c_max - E) / (c_max - c_min); 1 at the optimum, 0 at the worst energy."""
    if c_min >= c_max:
        raise ValueError(f"constant Hamiltonian (c_min={c_min}, c_max={c_max}) has no approximation ratio")
    return (c_max - z_energy) / (c_max - c_min)


def normalized_entropy(gs_probabilities: Sequence[float]) -> float:
    """Shannon entropy of the ground-state distribution, scaled to [0, 1].

    Probabilities are renormalized within the ground-state manifold; the
    result is 1 for a uniform distribution over the k ground states and 0
    when all mass sits on one of them. Zero entries contribute nothing.
    """
    probs = np.asarray(gs_probabilities, dtype=np.float64)
    k = probs.size
    if k < 2:
        raise ValueError(f"entropy needs at least 2 ground states, got {k}")
    if np.any(probs < 0):
        raise ValueError("probabilities must be nonnegative")
    total = float(probs.sum())
    if total <= 0.0:
        raise ValueError("no ground-state probability mass; entropy undefined")
    q = probs / total
    nz = q[q > 0]
    h = float(-(nz * np.log(nz)).sum() / math.log(k))
    # Roundoff can push a uniform distribution a few ulp past 1.
    return min(max(h, 0.0), 1.0)


def classify_fair(entropy_trace: Sequence[float]) -> bool:
    """True iff every per-p entropy rounds to 1 at 8 decimal places."""
    if len(entropy_trace) == 0:
        raise ValueError("empty entropy trace")
    return all(round(float(h), FAIR_DECIMALS) == 1.0 for h in entropy_trace)


@dataclass(frozen=True)
class StepRecord:
    """Metrics of the accepted schedule at one depth p."""

    p: int
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    expectation: float
    approximation_ratio: float
    gs_probabilities: tuple[float, ...]
    gs_proportions: tuple[float, ...]
    entropy_normalized: Optional[float]


@dataclass(frozen=True)
class RunRecord:
    """Full per-p trace of one (model, mixer) sweep."""

    model_id: str
    mixer: str
    n: int
    degeneracy: int
    c_min: int
    c_max: int
    ground_states: tuple[int, ...]
    steps: tuple[StepRecord, ...]
    converged_p: Optional[int]
    fair: Optional[bool]
    monotonic_failures: tuple[int, ...]

    def entropy_trace(self) -> list[float]:
        return [s.entropy_normalized for s in self.steps]

    def sk_code(self) -> Optional[int]:
        if self.model_id.startswith("sk-"):
            return int(self.model_id[3:])
        return None

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "mixer": self.mixer,
            "n": self.n,
            "degeneracy": self.degeneracy,
            "c_min": self.c_min,
            "c_max": self.c_max,
            "ground_states": list(self.ground_states),
            "steps": [
                {
                    "p": s.p,
                    "gammas": list(s.gammas),
                    "betas": list(s.betas),
                    "expectation": s.expectation,
                    "approximation_ratio": s.approximation_ratio,
                    "gs_probabilities": list(s.gs_probabilities),
                    "gs_proportions": list(s.gs_proportions),
                    "entropy_normalized": s.entropy_normalized,
                }
                for s in self.steps
            ],
            "converged_p": self.converged_p,
            "fair": self.fair,
            "monotonic_failures": list(self.monotonic_failures),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "RunRecord":
        """Parse and validate a persisted record against the module invariants."""
        try:
            steps = tuple(
                StepRecord(
                    p=int(s["p"]),
                    gammas=tuple(float(x) for x in s["gammas"]),
                    betas=tuple(float(x) for x in s["betas"]),
                    expectation=float(s["expectation"]),
                    approximation_ratio=float(s["approximation_ratio"]),
                    gs_probabilities=tuple(float(x) for x in s["gs_probabilities"]),
                    gs_proportions=tuple(float(x) for x in s["gs_proportions"]),
                    entropy_normalized=None if s["entropy_normalized"] is None else float(s["entropy_normalized"]),
                )
                for s in data["steps"]
            )
            record = cls(
                model_id=str(data["model_id"]),
                mixer=str(data["mixer"]),
                n=int(data["n"]),
                degeneracy=int(data["degeneracy"]),
                c_min=int(data["c_min"]),
                c_max=int(data["c_max"]),
                ground_states=tuple(int(z) for z in data["ground_states"]),
                steps=steps,
                converged_p=None if data["converged_p"] is None else int(data["converged_p"]),
                fair=data["fair"] if data["fair"] is None else bool(data["fair"]),
                monotonic_failures=tuple(int(p) for p in data["monotonic_failures"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed run record: {exc}") from exc
        record.validate()
        return record

    def validate(self) -> None:
        if self.mixer not in MIXERS:
            raise ValueError(f"unknown mixer {self.mixer!r}")
        if len(self.ground_states) != self.degeneracy:
            raise ValueError("ground state list does not match degeneracy")
        for s in self.steps:
            if not 0.0 <= s.approximation_ratio <= 1.0 + 1e-12:
                raise ValueError(f"approximation ratio {s.approximation_ratio} outside [0, 1] at p={s.p}")
            if len(s.gs_probabilities) != self.degeneracy:
                raise ValueError(f"probability vector length mismatch at p={s.p}")
            total = sum(s.gs_probabilities)
            if total > 0 and abs(sum(s.gs_proportions) - 1.0) > PROPORTION_SUM_TOL:
                raise ValueError(f"proportions do not sum to 1 at p={s.p}")
            if s.entropy_normalized is not None and not 0.0 <= s.entropy_normalized <= 1.0:
                raise ValueError(f"entropy {s.entropy_normalized} outside [0, 1] at p={s.p}")


def build_run_record(model_id: str, spec: Spectrum, mixer: str, sweep: SweepResult) -> RunRecord:
    """Re-simulate each accepted schedule and assemble the analytics record."""
    energies = phase_table(spec)
    n = int(spec.energies.shape[0]).bit_length() - 1
    steps = []
    for sched in sweep.schedules:
        state = evolve(energies, mixer, sched.gammas, sched.betas)
        probs, total = ground_state_probabilities(state, spec)
        proportions = probs / total if total > 0 else np.zeros_like(probs)
        entropy = normalized_entropy(probs) if spec.degeneracy >= 2 else None
        steps.append(
            StepRecord(
                p=sched.p,
                gammas=sched.gammas,
                betas=sched.betas,
                expectation=sched.expectation,
                approximation_ratio=approximation_ratio(sched.expectation, spec.c_min, spec.c_max),
                gs_probabilities=tuple(probs.tolist()),
                gs_proportions=tuple(proportions.tolist()),
                entropy_normalized=entropy,
            )
        )
    fair = classify_fair([s.entropy_normalized for s in steps]) if spec.degeneracy >= 2 else None
    return RunRecord(
        model_id=model_id,
        mixer=mixer,
        n=n,
        degeneracy=spec.degeneracy,
        c_min=spec.c_min,
        c_max=spec.c_max,
        ground_states=tuple(int(z) for z in spec.ground_states),
        steps=tuple(steps),
        converged_p=sweep.converged_p,
        fair=fair,
        monotonic_failures=sweep.monotonic_failures,
    )
