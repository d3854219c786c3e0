"""Exact Ising models, brute-force spectra, and the 5-spin SK ensemble codec.

Spin encoding convention (fixed across the whole package): a configuration is
an integer ``z`` in ``[0, 2**n)`` whose bit ``i`` encodes spin
``s_i = 1 - 2*b_i``, i.e. bit 0 means spin +1. The energy of a configuration
is ``sum_{i<j} J_ij s_i s_j + sum_i h_i s_i``, evaluated in exact integer
arithmetic for integer-coefficient models.

SK ensemble codec: an all-to-all n-spin model with coefficients in {+1, -1}
is indexed by an integer code with ``n + n*(n-1)/2`` bits. Bit ``k`` of the
code (LSB first) maps to coefficient ``2*bit - 1``; bits ``0..n-1`` are the
fields ``h_0..h_{n-1}`` and the remaining bits are the couplings ``J_ij`` in
lexicographic pair order (0,1), (0,2), ..., (n-2,n-1).
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

#: Largest n for exhaustive spectrum enumeration (2^24 int64 energies ~ 134 MB).
MAX_SPECTRUM_N = 24

#: Largest n for the exhaustive all-to-all +-1 ensemble (n=6 already has 2^21 codes).
MAX_ENSEMBLE_N = 6

_SPECTRUM_CHUNK = 1 << 16
_CODE_CHUNK = 1 << 15


@dataclass(frozen=True)
class IsingModel:
    """An Ising cost function with integer fields ``h`` and couplings ``J``.

    ``j`` holds one ``(i, j, value)`` triple per coupled pair with
    ``0 <= i < j < n``; pairs absent from ``j`` have zero coupling.
    """

    n: int
    h: tuple[int, ...]
    j: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"spin count must be positive, got {self.n}")
        if len(self.h) != self.n:
            raise ValueError(f"h has length {len(self.h)}, expected {self.n}")
        seen = set()
        for i, jdx, _ in self.j:
            if not (0 <= i < jdx < self.n):
                raise ValueError(f"coupling pair ({i}, {jdx}) out of range for n={self.n}")
            if (i, jdx) in seen:
                raise ValueError(f"duplicate coupling pair ({i}, {jdx})")
            seen.add((i, jdx))

    @classmethod
    def from_couplings(cls, n: int, h: Iterable[int], j: Mapping[tuple[int, int], int]) -> "IsingModel":
        """Build a model from a field vector and a pair -> coupling map."""
        triples = tuple(sorted((i, jdx, int(v)) for (i, jdx), v in j.items()))
        return cls(n=n, h=tuple(int(x) for x in h), j=triples)

    @classmethod
    def from_dict(cls, data: Mapping) -> "IsingModel":
        """Parse the JSON model-file format {"n": ..., "h": [...], "J": [[i, j, value], ...]}."""
        try:
            n = int(data["n"])
            h = tuple(int(x) for x in data["h"])
            j = tuple(sorted((int(i), int(jdx), int(v)) for i, jdx, v in data["J"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed model data: {exc}") from exc
        return cls(n=n, h=h, j=j)

    def to_dict(self) -> dict:
        return {"n": self.n, "h": list(self.h), "J": [list(t) for t in self.j]}

    def digest(self) -> str:
        """Stable hex digest of the canonical model JSON (used as a file-model id)."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def seed_key(self) -> int:
        """Deterministic 63-bit integer for deriving per-model RNG streams."""
        return int(self.digest()[:16], 16) & (2**63 - 1)


@dataclass(frozen=True)
class Spectrum:
    """Exhaustive integer energies of a model plus its ground-state manifold."""

    energies: np.ndarray
    c_min: int
    c_max: int
    ground_states: np.ndarray
    degeneracy: int


def load_model(path: str) -> IsingModel:
    """Read a model from a JSON file in the documented model-file format."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    return IsingModel.from_dict(data)


def config_spins(config: int, n: int) -> np.ndarray:
    """Spin vector (+1/-1 entries) for an integer configuration."""
    bits = (config >> np.arange(n)) & 1
    return 1 - 2 * bits


def energy(model: IsingModel, config: int) -> int:
    """Exact integer energy of one spin configuration."""
    if not 0 <= config < (1 << model.n):
        raise ValueError(f"config {config} out of range for n={model.n}")
    s = [1 - 2 * ((config >> i) & 1) for i in range(model.n)]
    total = sum(hi * si for hi, si in zip(model.h, s))
    total += sum(v * s[i] * s[jdx] for i, jdx, v in model.j)
    return total


def spectrum(model: IsingModel, max_n: int = MAX_SPECTRUM_N) -> Spectrum:
    """Enumerate all 2^n configuration energies in exact int64 arithmetic."""
    if model.n > max_n:
        raise ValueError(f"n={model.n} exceeds spectrum enumeration limit {max_n}")
    size = 1 << model.n
    h = np.asarray(model.h, dtype=np.int64)
    qubits = np.arange(model.n, dtype=np.int64)
    energies = np.empty(size, dtype=np.int64)
    for start in range(0, size, _SPECTRUM_CHUNK):
        stop = min(start + _SPECTRUM_CHUNK, size)
        z = np.arange(start, stop, dtype=np.int64)
        spins = 1 - 2 * ((z[:, None] >> qubits) & 1)
        e = spins @ h
        for i, jdx, v in model.j:
            e += v * spins[:, i] * spins[:, jdx]
        energies[start:stop] = e
    c_min = int(energies.min())
    c_max = int(energies.max())
    ground = np.flatnonzero(energies == c_min)
    return Spectrum(
        energies=energies,
        c_min=c_min,
        c_max=c_max,
        ground_states=ground,
        degeneracy=int(ground.size),
    )


def sk_pairs(n: int) -> list[tuple[int, int]]:
    """Lexicographic (i, j) pair order used by the SK code layout."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def sk_code_bits(n: int) -> int:
    return n + n * (n - 1) // 2


def decode_sk(code: int, n: int = 5) -> IsingModel:
    """Decode an SK ensemble code into its all-to-all +-1 model."""
    m = sk_code_bits(n)
    if not 0 <= code < (1 << m):
        raise ValueError(f"SK code {code} out of range [0, 2^{m}) for n={n}")
    coeffs = [2 * ((code >> k) & 1) - 1 for k in range(m)]
    h = tuple(coeffs[:n])
    j = tuple((i, jdx, coeffs[n + k]) for k, (i, jdx) in enumerate(sk_pairs(n)))
    return IsingModel(n=n, h=h, j=j)


def encode_sk(model: IsingModel) -> int:
    """Inverse of :func:`decode_sk`; requires an all-to-all +-1 model."""
    n = model.n
    couplings = {(i, jdx): v for i, jdx, v in model.j}
    expected = sk_pairs(n)
    if sorted(couplings) != expected:
        raise ValueError("model is not all-to-all coupled")
    coeffs = list(model.h) + [couplings[p] for p in expected]
    if any(c not in (-1, 1) for c in coeffs):
        raise ValueError("model coefficients are not all +-1")
    code = 0
    for k, c in enumerate(coeffs):
        if c == 1:
            code |= 1 << k
    return code


def _sk_feature_matrix(n: int) -> np.ndarray:
    """(2^n, m) matrix F with F[z, k] = value of coefficient k's spin product at z.

    Column order matches the code layout, so ``F @ coeffs`` gives all 2^n
    energies of the model with that coefficient vector.
    """
    z = np.arange(1 << n, dtype=np.int64)
    spins = 1 - 2 * ((z[:, None] >> np.arange(n, dtype=np.int64)) & 1)
    feats = np.empty((1 << n, sk_code_bits(n)), dtype=np.int64)
    feats[:, :n] = spins
    for k, (i, jdx) in enumerate(sk_pairs(n)):
        feats[:, n + k] = spins[:, i] * spins[:, jdx]
    return feats


def sk_degeneracy_table(n: int = 5) -> np.ndarray:
    """Ground-state degeneracy of every SK code, as a (2^m,) int64 array."""
    if n > MAX_ENSEMBLE_N:
        raise ValueError(f"n={n} exceeds exhaustive ensemble limit {MAX_ENSEMBLE_N}")
    m = sk_code_bits(n)
    feats = _sk_feature_matrix(n)
    table = np.empty(1 << m, dtype=np.int64)
    bit_idx = np.arange(m, dtype=np.int64)
    for start in range(0, 1 << m, _CODE_CHUNK):
        stop = min(start + _CODE_CHUNK, 1 << m)
        codes = np.arange(start, stop, dtype=np.int64)
        coeffs = 2 * ((codes[:, None] >> bit_idx) & 1) - 1
        energies = feats @ coeffs.T
        table[start:stop] = (energies == energies.min(axis=0, keepdims=True)).sum(axis=0)
    return table


def degeneracy_census(n: int = 5) -> dict[int, int]:
    """Histogram of ground-state degeneracy over the full +-1 SK ensemble."""
    counts = Counter(sk_degeneracy_table(n).tolist())
    return dict(sorted(counts.items()))
