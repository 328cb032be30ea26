"""Candidate-set generation: uniform, scrambled Sobol, dynamic coordinate
perturbation, plus the maximin Latin-hypercube initial design.

All generators produce points in the closed unit cube and are pure functions
of their configuration and RNG stream, so candidate sets replay exactly under
a fixed seed.
"""

from __future__ import annotations

import enum
import importlib.resources
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.spatial.distance import pdist

from .core import RngStream

SOBOL_BITS = 32
SOBOL_MAX_DIM = 64


class DiscretizerKind(enum.Enum):
    UNIFORM = "uniform"
    SOBOL = "sobol"
    DYNAMIC_COORDINATE = "dynamic"


@dataclass(frozen=True)
class DiscretizerConfig:
    """How to build the per-iteration candidate set.

    ``perturb_sigma`` is the unit-space standard deviation of dynamic
    coordinate perturbations; ``select_prob_floor`` (default ``1/d``, resolved
    at use) caps how far the coordinate-selection probability may decay.
    """

    kind: DiscretizerKind
    n_candidates: int
    perturb_sigma: float = 0.2
    select_prob_floor: float | None = None

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if not 0.0 < self.perturb_sigma <= 1.0:
            raise ValueError("perturb_sigma must lie in (0, 1]")

    def with_candidates(self, n: int) -> "DiscretizerConfig":
        return replace(self, n_candidates=n)

    def with_sigma(self, sigma: float) -> "DiscretizerConfig":
        return replace(self, perturb_sigma=sigma)

    def floor_for(self, dim: int) -> float:
        return 1.0 / dim if self.select_prob_floor is None else self.select_prob_floor


@dataclass(frozen=True)
class CoordinateSchedule:
    """Decaying coordinate-selection probability for dynamic perturbation.

    At ``t`` evaluations out of a total budget ``total`` (adaptive phase
    starting at ``start``), each coordinate is perturbed with probability

        p(t) = max(floor, min(20/d, 1) * (1 - ln(t - start + 1) / ln(total - start)))

    which starts at ``min(20/d, 1)`` and decays to the floor as the budget
    runs out; at least one coordinate is always perturbed.
    """

    dim: int
    t: int
    start: int
    total: int

    def probability(self, floor: float) -> float:
        span = max(self.total - self.start, 2)
        raw = min(20.0 / self.dim, 1.0) * (1.0 - math.log(self.t - self.start + 1) / math.log(span))
        return min(max(floor, raw), 1.0)


def lhd_maximin(n: int, dim: int, rng: RngStream, restarts: int = 50) -> np.ndarray:
    """Latin hypercube design, best of ``restarts`` by min pairwise distance.

    Every column stratifies [0, 1] into ``n`` cells with one jittered point
    per cell.
    """
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be >= 1")
    gen = rng.generator()

    def one_design() -> np.ndarray:
        u = np.empty((n, dim))
        for j in range(dim):
            u[:, j] = (gen.permutation(n) + gen.random(n)) / n
        return u

    if n == 1:
        return one_design()
    best, best_sep = None, -np.inf
    for _ in range(max(restarts, 1)):
        design = one_design()
        sep = pdist(design).min()
        if sep > best_sep:
            best, best_sep = design, sep
    return best


def uniform_candidates(cfg: DiscretizerConfig, dim: int, rng: RngStream) -> np.ndarray:
    """I.i.d. uniform points in the unit cube."""
    return rng.generator().random((cfg.n_candidates, dim))


@lru_cache(maxsize=1)
def _direction_table() -> dict[int, tuple[int, int, tuple[int, ...]]]:
    """Parse the bundled direction-number file: dim -> (s, a, m values)."""
    text = importlib.resources.files("adasamp.data").joinpath(
        "sobol_direction_numbers.txt"
    ).read_text(encoding="utf-8")
    table: dict[int, tuple[int, int, tuple[int, ...]]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("d "):
            continue
        fields = [int(tok) for tok in line.split()]
        dim, s, a, m = fields[0], fields[1], fields[2], tuple(fields[3:])
        if len(m) != s or any(not (0 < mk < 1 << k) or mk % 2 == 0 for k, mk in enumerate(m, 1)):
            raise ValueError(f"invalid direction numbers for dimension {dim}")
        table[dim] = (s, a, m)
    return table


def _direction_vectors(dim: int) -> np.ndarray:
    """Direction numbers ``v`` (dim x SOBOL_BITS) as 2^SOBOL_BITS multiples."""
    table = _direction_table()
    v = np.zeros((dim, SOBOL_BITS), dtype=np.uint64)
    # First coordinate: van der Corput, m_k = 1 for all k.
    v[0] = [1 << (SOBOL_BITS - k) for k in range(1, SOBOL_BITS + 1)]
    for j in range(2, dim + 1):
        if j not in table:
            raise ValueError(
                f"dimension {j} exceeds the bundled direction-number table (max {SOBOL_MAX_DIM})"
            )
        s, a, m_init = table[j]
        m = list(m_init)
        for k in range(s, SOBOL_BITS):
            # m_k = 2 a_1 m_{k-1} xor 4 a_2 m_{k-2} xor ... xor 2^s m_{k-s} xor m_{k-s}
            new = m[k - s] ^ (m[k - s] << s)
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    new ^= m[k - i] << i
            m.append(new)
        v[j - 1] = [m[k] << (SOBOL_BITS - 1 - k) for k in range(SOBOL_BITS)]
    return v


def sobol_candidates(cfg: DiscretizerConfig, dim: int, rng: RngStream) -> np.ndarray:
    """Scrambled Sobol sequence (Gray-code order, all-zeros point skipped).

    Scrambling is a digital shift: every point's binary expansion is XOR-ed
    with a per-dimension random mask drawn from ``rng``, so two streams give
    two different but equally uniform sets and replay is exact.
    """
    if dim > SOBOL_MAX_DIM:
        raise ValueError(f"dimension {dim} exceeds the direction-number table ({SOBOL_MAX_DIM})")
    bits = _sobol_bits(cfg.n_candidates, dim)
    shift = rng.generator().integers(0, 1 << SOBOL_BITS, size=dim, dtype=np.uint64)
    bits ^= shift[None, :]
    return bits.astype(np.float64) / float(1 << SOBOL_BITS)


def unscrambled_sobol(n: int, dim: int) -> np.ndarray:
    """Base Sobol points without scrambling (zeros point skipped); for audits."""
    return _sobol_bits(n, dim).astype(np.float64) / float(1 << SOBOL_BITS)


def _sobol_bits(n: int, dim: int) -> np.ndarray:
    """Gray-code Sobol integer states for indices 1..n (index 0 skipped)."""
    v = _direction_vectors(dim)
    out = np.empty((n, dim), dtype=np.uint64)
    state = np.zeros(dim, dtype=np.uint64)
    for i in range(1, n + 1):
        state = state ^ v[:, _lowest_zero_bit(i - 1)]
        out[i - 1] = state
    return out


def _lowest_zero_bit(i: int) -> int:
    position = 0
    while i & 1:
        i >>= 1
        position += 1
    return position


def dynamic_candidates(
    cfg: DiscretizerConfig,
    schedule: CoordinateSchedule,
    center: np.ndarray,
    rng: RngStream,
) -> np.ndarray:
    """Perturb a decaying random subset of the center's coordinates.

    Each candidate perturbs coordinate ``j`` with probability ``p(t)`` (at
    least one coordinate forced) by adding N(0, perturb_sigma^2) noise, then
    reflects once at the cube faces and clips.
    """
    center = np.asarray(center, dtype=float).ravel()
    dim = center.size
    if np.any(center < 0) or np.any(center > 1):
        raise ValueError("center must lie in the unit cube")
    gen = rng.generator()
    p = schedule.probability(cfg.floor_for(dim))
    mask = gen.random((cfg.n_candidates, dim)) < p
    none = ~mask.any(axis=1)
    if none.any():
        mask[none, gen.integers(0, dim, size=int(none.sum()))] = True
    noise = gen.normal(0.0, cfg.perturb_sigma, size=(cfg.n_candidates, dim))
    cand = np.where(mask, center[None, :] + noise, center[None, :])
    cand = np.abs(cand)              # reflect at 0
    cand = np.where(cand > 1.0, 2.0 - cand, cand)  # reflect at 1
    return np.clip(cand, 0.0, 1.0)
