"""Exact QAOA state-vector simulation for the transverse-field and Grover mixers.

Amplitudes are a length-2^n complex128 array indexed by spin configuration
(see :mod:`fairsample.ising` for the bit convention). The apply_* operations
update the array in place and return it; a state is single-owner mutable
during a run. The X mixer walks bit-paired amplitudes with strides, so one
layer costs O(n 2^n) with no matrix ever materialized; the Grover mixer is
the rank-1 update ``psi += (e^{-i beta} - 1) <s|psi> |s>`` at O(2^n).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .ising import IsingModel, Spectrum, spectrum

MIXER_X = "x"
MIXER_GROVER = "grover"
MIXERS = (MIXER_X, MIXER_GROVER)


@njit(cache=True)
def _phase_kernel(amps, energies, gamma):
    for z in range(amps.shape[0]):
        g = gamma * energies[z]
        amps[z] = amps[z] * complex(math.cos(g), -math.sin(g))


@njit(cache=True)
def _x_mixer_kernel(amps, n, beta):
    c = math.cos(beta)
    s = math.sin(beta)
    size = amps.shape[0]
    for q in range(n):
        step = 1 << q
        base = 0
        while base < size:
            for off in range(step):
                ia = base + off
                ib = ia + step
                a = amps[ia]
                b = amps[ib]
                amps[ia] = c * a - 1j * s * b
                amps[ib] = c * b - 1j * s * a
            base += step << 1


@njit(cache=True)
def _grover_kernel(amps, beta):
    size = amps.shape[0]
    inv_sqrt = 1.0 / math.sqrt(size)
    overlap = 0.0 + 0.0j
    for z in range(size):
        overlap += amps[z]
    overlap *= inv_sqrt
    shift = (complex(math.cos(beta), -math.sin(beta)) - 1.0) * overlap * inv_sqrt
    for z in range(size):
        amps[z] += shift


@njit(cache=True)
def _expectation_kernel(amps, energies):
    acc = 0.0
    for z in range(amps.shape[0]):
        a = amps[z]
        acc += (a.real * a.real + a.imag * a.imag) * energies[z]
    return acc


@njit(cache=True)
def _evolve_kernel(energies, n, gammas, betas, use_grover):
    # Whole circuit in one jitted call; per-layer dispatch overhead dominates
    # the optimizer's objective cost otherwise.
    amps = np.full(energies.shape[0], 2.0 ** (-n / 2), dtype=np.complex128)
    for k in range(gammas.shape[0]):
        _phase_kernel(amps, energies, gammas[k])
        if use_grover:
            _grover_kernel(amps, betas[k])
        else:
            _x_mixer_kernel(amps, n, betas[k])
    return amps


@njit(cache=True)
def _objective_kernel(energies, n, x, p, use_grover):
    amps = _evolve_kernel(energies, n, x[:p], x[p:], use_grover)
    return _expectation_kernel(amps, energies)


@njit(cache=True)
def _gradient_kernel(energies, n, x, p, use_grover, step):
    # Central differences over all 2p angles in one jitted call.
    grad = np.empty(2 * p, dtype=np.float64)
    xp = x.copy()
    for d in range(2 * p):
        orig = xp[d]
        xp[d] = orig + step
        f_plus = _objective_kernel(energies, n, xp, p, use_grover)
        xp[d] = orig - step
        f_minus = _objective_kernel(energies, n, xp, p, use_grover)
        xp[d] = orig
        grad[d] = (f_plus - f_minus) / (2.0 * step)
    return grad


def _qubit_count(state: np.ndarray) -> int:
    n = state.shape[0].bit_length() - 1
    if 1 << n != state.shape[0]:
        raise ValueError(f"state length {state.shape[0]} is not a power of two")
    return n


def phase_table(spec: Spectrum) -> np.ndarray:
    """Float copy of a spectrum's integer energies, for phase separation."""
    return np.ascontiguousarray(spec.energies, dtype=np.float64)


def prepare_plus_state(n: int) -> np.ndarray:
    """Uniform superposition |s> over all 2^n configurations."""
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def apply_phase_separator(state: np.ndarray, energies: np.ndarray, gamma: float) -> np.ndarray:
    """Multiply each amplitude by exp(-i gamma E(z)), in place."""
    if energies.shape[0] != state.shape[0]:
        raise ValueError(
            f"phase table length {energies.shape[0]} does not match state length {state.shape[0]}"
        )
    _phase_kernel(state, np.ascontiguousarray(energies, dtype=np.float64), float(gamma))
    return state


def apply_x_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """Apply exp(-i beta X) to every qubit, in place."""
    _x_mixer_kernel(state, _qubit_count(state), float(beta))
    return state


def apply_grover_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """Apply exp(-i beta |s><s|), in place."""
    _qubit_count(state)
    _grover_kernel(state, float(beta))
    return state


def evolve(energies: np.ndarray, mixer: str, gammas, betas) -> np.ndarray:
    """Run the alternating phase-separator / mixer circuit from |s>.

    Args:
        energies: length-2^n float phase table (see :func:`phase_table`).
        mixer: ``"x"`` or ``"grover"``.
        gammas, betas: equal-length angle vectors; p = 0 returns |s>.
    """
    if mixer not in MIXERS:
        raise ValueError(f"unknown mixer {mixer!r}, expected one of {MIXERS}")
    gammas = np.asarray(gammas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    if gammas.shape != betas.shape or gammas.ndim != 1:
        raise ValueError(f"angle vectors must be 1-d and equal length, got {gammas.shape} and {betas.shape}")
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    n = energies.shape[0].bit_length() - 1
    if 1 << n != energies.shape[0]:
        raise ValueError(f"phase table length {energies.shape[0]} is not a power of two")
    if gammas.size == 0:
        return prepare_plus_state(n)
    return _evolve_kernel(energies, n, np.ascontiguousarray(gammas), np.ascontiguousarray(betas), mixer == MIXER_GROVER)


def run_qaoa(model: IsingModel, mixer: str, gammas, betas) -> np.ndarray:
    """Full QAOA circuit for a model: |s>, then p alternating layers."""
    return evolve(phase_table(spectrum(model)), mixer, gammas, betas)


def expectation(state: np.ndarray, energies: np.ndarray) -> float:
    """Mean energy sum_z |a_z|^2 E(z) of a state."""
    if energies.shape[0] != state.shape[0]:
        raise ValueError(
            f"phase table length {energies.shape[0]} does not match state length {state.shape[0]}"
        )
    return float(_expectation_kernel(state, np.ascontiguousarray(energies, dtype=np.float64)))


def ground_state_probabilities(state: np.ndarray, spec: Spectrum) -> tuple[np.ndarray, float]:
    """Per-ground-state measurement probabilities and their total mass."""
    amps = state[spec.ground_states]
    probs = (amps.real**2 + amps.imag**2).astype(np.float64)
    return probs, float(probs.sum())
