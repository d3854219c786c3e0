"""Heuristic QAOA angle finding: basin hopping plus local refinement, and the
p-sweep driver that increases depth until the mean energy reaches the optimum.

Every optimization task draws from its own RNG stream seeded by
``(seed, model key, mixer, p, retry)``, so results are identical regardless
of execution order or sharding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .ising import IsingModel, Spectrum, spectrum
from .statevector import (
    MIXER_GROVER,
    MIXER_X,
    MIXERS,
    _gradient_kernel,
    _objective_kernel,
    evolve,
    expectation,
    phase_table,
)

#: Central-difference step for the local refiner's numerical gradient.
GRADIENT_STEP = 1e-6

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for basin hopping, the p sweep, and convergence detection.

    ``bh_iters`` caps the hop count; hopping also stops after
    ``stall_limit`` consecutive hops without improvement, or once the best
    value reaches the spectrum's lower bound (no hop can beat c_min).
    """

    bh_iters: int = 20
    seed: int = 0
    local_tol: float = 1e-12
    perturbation_scale: float = 0.1
    p_max: int = 25
    convergence_eps: float = 1e-8
    retry_budget: int = 10
    stall_limit: int = 6

    def __post_init__(self) -> None:
        if self.bh_iters < 1:
            raise ValueError(f"bh_iters must be >= 1, got {self.bh_iters}")
        if self.convergence_eps <= 0:
            raise ValueError(f"convergence_eps must be positive, got {self.convergence_eps}")
        if self.stall_limit < 1:
            raise ValueError(f"stall_limit must be >= 1, got {self.stall_limit}")


@dataclass(frozen=True)
class AngleSchedule:
    """One optimized angle set and the mean energy it achieves."""

    p: int
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    expectation: float

    def __post_init__(self) -> None:
        if len(self.gammas) != self.p or len(self.betas) != self.p:
            raise ValueError(f"angle vectors must have length p={self.p}")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.gammas, self.betas])


@dataclass(frozen=True)
class SweepResult:
    """Accepted schedule per p, the convergence depth, and any strictness failures."""

    schedules: tuple[AngleSchedule, ...]
    converged_p: Optional[int]
    monotonic_failures: tuple[int, ...] = field(default=())


def beta_period(mixer: str) -> float:
    """Mixer-angle period for integer spectra: pi for X (up to a global
    phase), 2*pi for the Grover projector."""
    return np.pi if mixer == MIXER_X else TWO_PI


def _task_rng(cfg: OptimizerConfig, model: IsingModel, mixer: str, p: int, retry: int) -> np.random.Generator:
    mixer_tag = MIXERS.index(mixer)
    ss = np.random.SeedSequence((cfg.seed, model.seed_key(), mixer_tag, p, retry))
    return np.random.default_rng(ss)


def _reduced_schedule(x: np.ndarray, p: int, mixer: str, energies: np.ndarray) -> AngleSchedule:
    """Fold angles into their fundamental domains and re-evaluate the mean
    energy from the folded values, so a stored schedule reproduces its own
    expectation bit for bit."""
    gammas = np.mod(x[:p], TWO_PI)
    betas = np.mod(x[p:], beta_period(mixer))
    value = expectation(evolve(energies, mixer, gammas, betas), energies)
    return AngleSchedule(p=p, gammas=tuple(gammas), betas=tuple(betas), expectation=value)


def optimize_angles(
    model: IsingModel,
    mixer: str,
    p: int,
    cfg: OptimizerConfig,
    warm_start: Optional[AngleSchedule] = None,
    *,
    spec: Optional[Spectrum] = None,
    rng: Optional[np.random.Generator] = None,
    retry: int = 0,
) -> AngleSchedule:
    """Best angle schedule found by ``cfg.bh_iters`` basin-hopping iterations.

    Each iteration draws a start point: uniform over the angle periods, or,
    when ``warm_start`` is given, the warm start plus Gaussian noise of scale
    ``cfg.perturbation_scale``. The start is refined with L-BFGS-B on the
    2p-dimensional mean-energy objective and the global best is kept.
    Deterministic given (cfg.seed, model, mixer, p, retry).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if mixer not in MIXERS:
        raise ValueError(f"unknown mixer {mixer!r}")
    if warm_start is not None and warm_start.p != p:
        raise ValueError(f"warm start has p={warm_start.p}, expected {p}")
    if spec is None:
        spec = spectrum(model)
    energies = phase_table(spec)
    if rng is None:
        rng = _task_rng(cfg, model, mixer, p, retry)

    n = energies.shape[0].bit_length() - 1
    use_grover = mixer == MIXER_GROVER

    def objective(x: np.ndarray) -> float:
        return _objective_kernel(energies, n, np.ascontiguousarray(x), p, use_grover)

    def gradient(x: np.ndarray) -> np.ndarray:
        return _gradient_kernel(energies, n, np.ascontiguousarray(x), p, use_grover, GRADIENT_STEP)

    def refine(x0: np.ndarray, ftol: float, gtol: float, maxiter: int):
        return minimize(
            objective,
            x0,
            jac=gradient,
            method="L-BFGS-B",
            options={"ftol": ftol, "gtol": gtol, "maxiter": maxiter},
        )

    # Hops refine just enough to rank basins; only the winner gets polished
    # to cfg.local_tol.
    rough_ftol = max(cfg.local_tol, 1e-9)
    b_period = beta_period(mixer)
    best_fun = np.inf
    best_x = None
    stall = 0
    for _ in range(cfg.bh_iters):
        if warm_start is not None:
            x0 = warm_start.as_vector() + rng.normal(scale=cfg.perturbation_scale, size=2 * p)
        else:
            x0 = np.concatenate([rng.uniform(0.0, TWO_PI, p), rng.uniform(0.0, b_period, p)])
        res = refine(x0, rough_ftol, 1e-6, 300)
        if res.fun < best_fun - 1e-10:
            stall = 0
        else:
            stall += 1
        if res.fun < best_fun:
            best_fun = res.fun
            best_x = res.x
        if best_fun - spec.c_min < 1e-12 or stall >= cfg.stall_limit:
            break
    polished = refine(best_x, cfg.local_tol, 1e-9, 1000)
    if polished.fun < best_fun:
        best_x = polished.x
    return _reduced_schedule(best_x, p, mixer, energies)


def _extended_warm_start(prev: AngleSchedule, rng: np.random.Generator) -> AngleSchedule:
    """Warm start for p from the p-1 best: append a small random round, which
    keeps the previous circuit as a near-feasible point."""
    extra = rng.uniform(-0.1, 0.1, size=2)
    return AngleSchedule(
        p=prev.p + 1,
        gammas=prev.gammas + (extra[0],),
        betas=prev.betas + (extra[1],),
        expectation=prev.expectation,
    )


def sweep_p(
    model: IsingModel,
    mixer: str,
    cfg: OptimizerConfig,
    *,
    spec: Optional[Spectrum] = None,
) -> SweepResult:
    """Increase p until the mean energy reaches c_min within ``convergence_eps``.

    Each new depth must strictly improve the recorded expectation; when it
    does not, the angle finding is re-run with a fresh seed, up to
    ``cfg.retry_budget`` times. Exhausting the budget flags that p in
    ``monotonic_failures`` and keeps the best schedule found.
    """
    if spec is None:
        spec = spectrum(model)
    schedules: list[AngleSchedule] = []
    failures: list[int] = []
    converged_p: Optional[int] = None
    prev: Optional[AngleSchedule] = None
    for p in range(1, cfg.p_max + 1):
        accepted = None
        candidate = None
        for retry in range(cfg.retry_budget + 1):
            rng = _task_rng(cfg, model, mixer, p, retry)
            warm = _extended_warm_start(prev, rng) if prev is not None else None
            sched = optimize_angles(model, mixer, p, cfg, warm, spec=spec, rng=rng)
            if candidate is None or sched.expectation < candidate.expectation:
                candidate = sched
            if prev is None or sched.expectation < prev.expectation:
                accepted = sched
                break
        if accepted is None:
            failures.append(p)
            accepted = candidate
        schedules.append(accepted)
        prev = accepted
        if abs(accepted.expectation - spec.c_min) < cfg.convergence_eps:
            converged_p = p
            break
    return SweepResult(
        schedules=tuple(schedules),
        converged_p=converged_p,
        monotonic_failures=tuple(failures),
    )
