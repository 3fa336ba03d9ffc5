"""Uniform plane partitions by Boltzmann sampling and rejection.

``Q(x) = prod_{j,k >= 1} (1 - x^(j+k-1))^(-1)``, so a matrix with
independent geometric entries ``P(b_jk = s) ~ u^((j+k-1) s)`` has weight
law ``q(n) u^n / Q(u)``.  Entries are drawn per anti-diagonal class
w = j + k - 1: the class total is negative binomial NB(w, u^w) and is
spread over the w cells as a uniform weak composition.  Conditioning on
weight n and decoding through the bijection chain gives an exactly
uniform plane partition of n.

Classes above n cannot occur in an accepted sample and are never drawn.
Classes whose probability of being non-zero is tiny are drawn jointly:
one Bernoulli flag per trial says whether any of them is non-zero, and
only flagged trials pay for the conditional draw.

Worker i of a batch seeded with ``seed`` uses
``SeedSequence(seed, spawn_key=(i,))``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from . import asymptotics
from .bijections import CorrespondenceMatrix, bender_knuth_map, knuth_map
from .partitions import PlanePartition, count_plane_partitions, plane_partition_at

_TAIL_BUDGET = 1e-3
_CDF_EPS = 1e-18
_UNDERFLOW = 1e-300


@dataclass(frozen=True)
class SamplerParams:
    n: int
    u: float
    class_cutoff: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("target weight must be non-negative")
        if not 0 < self.u < 1:
            raise ValueError(f"Boltzmann parameter must lie in (0,1), got {self.u}")
        if self.class_cutoff < 0:
            raise ValueError("class_cutoff must be non-negative")


@dataclass(frozen=True)
class SampleBatchReport:
    n: int
    u: float
    requested: int
    trials: int
    acceptance_rate: float
    wilson_low: float
    wilson_high: float
    elapsed: float

    def to_dict(self) -> dict:
        return asdict(self)


def make_rng(seed: int, worker: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(worker,))))


def underflow_cutoff(u: float) -> int:
    """Largest class w with u^w above double underflow."""
    return max(1, int(math.log(_UNDERFLOW) / math.log(u)))


@lru_cache(maxsize=64)
def saddle_parameter(n: int) -> float:
    """``u = e^-d_n``; n = 0 has no saddle point and any u works."""
    if n < 1:
        return 0.5
    return math.exp(-float(asymptotics.saddle_exact(n)))


def default_params(n: int, u: float | None = None, seed: int = 0, class_cutoff: int | None = None) -> SamplerParams:
    if n < 0:
        raise ValueError("n must be non-negative")
    if u is None:
        u = saddle_parameter(n)
    if class_cutoff is None:
        class_cutoff = min(n, underflow_cutoff(u))
    return SamplerParams(n, u, class_cutoff, seed)


class _ClassLaw:
    """Per-class negative binomial tables for a fixed u and cutoff."""

    def __init__(self, u: float, cutoff: int):
        self.u = u
        self.cutoff = cutoff
        w = np.arange(1, cutoff + 1)
        q = u ** w.astype(float)
        self.q = q
        self.log_zero = w * np.log1p(-q)  # log P(class total = 0)
        p_nonzero = -np.expm1(self.log_zero)
        # dense prefix: the rest is non-zero with total probability <= budget
        tail_nonzero = -np.expm1(np.cumsum(self.log_zero[::-1])[::-1])
        dense = cutoff
        while dense > 0 and tail_nonzero[dense - 1] <= _TAIL_BUDGET:
            dense -= 1
        self.dense = dense
        self.tail_prob = float(tail_nonzero[dense]) if dense < cutoff else 0.0
        self.cdfs = [self._cdf(i + 1) for i in range(dense)]
        self.p_nonzero = p_nonzero

    def _cdf(self, w: int) -> np.ndarray:
        q = self.q[w - 1]
        log_p = w * math.log1p(-q)
        out, acc, s = [], 0.0, 0
        while True:
            acc += math.exp(log_p)
            out.append(acc)
            if 1.0 - acc < _CDF_EPS or s > 100000:
                return np.array(out)
            s += 1
            log_p += math.log((s + w - 1) / s) + math.log(q)

    def positive(self, w: int, rng: np.random.Generator) -> int:
        """Class total conditioned to be at least one."""
        q = self.q[w - 1]
        target = rng.random() * float(self.p_nonzero[w - 1])
        s = 1
        log_p = w * math.log1p(-q) + math.log(w) + math.log(q)
        acc = 0.0
        while True:
            acc += math.exp(log_p)
            if acc >= target or log_p < -745:
                return s
            s += 1
            log_p += math.log((s + w - 1) / s) + math.log(q)

    def draw(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, dict[int, dict[int, int]]]:
        """Class totals for ``size`` trials.

        Returns the dense block (``size`` x ``dense``) and, for trials whose
        sparse classes came out non-zero, a map trial -> {w: total}.
        """
        block = np.empty((size, self.dense), dtype=np.int64)
        if self.dense:
            U = rng.random((size, self.dense))
            for i, cdf in enumerate(self.cdfs):
                col = np.searchsorted(cdf, U[:, i], side="right")
                over = np.flatnonzero(col >= len(cdf))
                for t in over:
                    col[t] = self._draw_beyond(i + 1, len(cdf), rng)
                block[:, i] = col
        sparse: dict[int, dict[int, int]] = {}
        if self.tail_prob > 0:
            flagged = np.flatnonzero(rng.random(size) < self.tail_prob)
            for t in flagged:
                sparse[int(t)] = self._draw_tail(rng)
        return block, sparse

    def _draw_beyond(self, w: int, floor: int, rng: np.random.Generator) -> int:
        while True:
            s = int(rng.negative_binomial(w, 1.0 - self.q[w - 1]))
            if s >= floor:
                return s

    def _draw_tail(self, rng: np.random.Generator) -> dict[int, int]:
        """Sparse classes conditioned on at least one being non-zero."""
        lz = self.log_zero[self.dense:]
        prefix = np.concatenate(([0.0], np.cumsum(lz)))
        # P(first non-zero sparse class is index i) ~ exp(prefix[i]) (1 - z_i)
        weights = np.exp(prefix[:-1]) * -np.expm1(lz)
        i = int(np.searchsorted(np.cumsum(weights), rng.random() * weights.sum(), side="right"))
        i = min(i, len(lz) - 1)
        first = self.dense + i + 1
        out = {first: self.positive(first, rng)}
        later = np.arange(first + 1, self.cutoff + 1)
        if len(later):
            hits = later[rng.random(len(later)) >= np.exp(self.log_zero[first:])]
            for w in hits:
                out[int(w)] = self.positive(int(w), rng)
        return out


def _place(totals: dict[int, int], rng: np.random.Generator) -> CorrespondenceMatrix:
    """Spread each class total uniformly over the weak compositions of its cells."""
    entries = {}
    for w, total in totals.items():
        if total == 0:
            continue
        if w == 1:
            entries[(1, 1)] = total
            continue
        bars = np.sort(rng.choice(total + w - 1, size=w - 1, replace=False))
        edges = np.concatenate(([-1], bars, [total + w - 1]))
        parts = np.diff(edges) - 1
        for j, b in enumerate(parts, 1):
            if b:
                entries[(j, w + 1 - j)] = int(b)
    return CorrespondenceMatrix.from_dict(entries)


def _trial_totals(block: np.ndarray, sparse: dict, t: int) -> dict[int, int]:
    totals = {i + 1: int(v) for i, v in enumerate(block[t]) if v}
    totals.update(sparse.get(t, {}))
    return totals


def _weights(law: _ClassLaw, block: np.ndarray, sparse: dict) -> np.ndarray:
    W = block @ np.arange(1, law.dense + 1) if law.dense else np.zeros(len(block), dtype=np.int64)
    for t, extra in sparse.items():
        W[t] += sum(w * c for w, c in extra.items())
    return W


def boltzmann_matrix(params: SamplerParams, rng: np.random.Generator) -> CorrespondenceMatrix:
    """One Boltzmann-distributed matrix, classes up to ``params.class_cutoff``."""
    law = _ClassLaw(params.u, params.class_cutoff) if params.class_cutoff else None
    if law is None:
        return CorrespondenceMatrix()
    block, sparse = law.draw(rng, 1)
    return _place(_trial_totals(block, sparse, 0), rng)


def boltzmann_weights(params: SamplerParams, draws: int, rng: np.random.Generator) -> np.ndarray:
    """Weights ``sum (j+k-1) b_jk`` of independent Boltzmann matrices."""
    if not params.class_cutoff:
        return np.zeros(draws, dtype=np.int64)
    law = _ClassLaw(params.u, params.class_cutoff)
    out = []
    chunk = 1 << 15
    for start in range(0, draws, chunk):
        block, sparse = law.draw(rng, min(chunk, draws - start))
        out.append(_weights(law, block, sparse))
    return np.concatenate(out)


def _acceptance_guess(params: SamplerParams) -> float:
    u, n = params.u, params.n
    var = sum(j**3 * u**j / (1 - u**j) ** 2 for j in range(1, max(params.class_cutoff, 1) + 1))
    return min(1.0, 1.0 / math.sqrt(2 * math.pi * max(var, 1e-12))) if n else 1.0


def sample_matrices(params: SamplerParams, count: int, rng: np.random.Generator) -> tuple[list[CorrespondenceMatrix], int]:
    """``count`` matrices of weight exactly ``params.n``; also returns trials used."""
    if count <= 0:
        return [], 0
    if params.class_cutoff == 0:
        return [CorrespondenceMatrix()] * count, count
    law = _ClassLaw(params.u, params.class_cutoff)
    guess = _acceptance_guess(params)
    out: list[CorrespondenceMatrix] = []
    trials = 0
    while len(out) < count:
        need = count - len(out)
        size = int(min(1 << 16, max(1 << 10, 1.2 * need / guess)))
        block, sparse = law.draw(rng, size)
        hits = np.flatnonzero(_weights(law, block, sparse) == params.n)
        for t in hits:
            out.append(_place(_trial_totals(block, sparse, int(t)), rng))
            if len(out) == count:
                trials += int(t) + 1
                break
        else:
            trials += size
    return out, trials


def decode(M: CorrespondenceMatrix) -> PlanePartition:
    return bender_knuth_map(knuth_map(M), check=False)


def sample_uniform(n: int, rng: np.random.Generator, params: SamplerParams | None = None) -> PlanePartition:
    """A uniformly random plane partition of ``n``."""
    if params is None:
        params = default_params(n)
    [M], _ = sample_matrices(params, 1, rng)
    return decode(M)


def sample_exhaustive_uniform(n: int, rng: np.random.Generator) -> PlanePartition:
    """Uniform draw by random index into the canonical enumeration."""
    return plane_partition_at(n, int(rng.integers(count_plane_partitions(n))))


def wilson_interval(successes: int, trials: int, level: float = 0.99) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def acceptance_probe(n: int, trials: int, rng: np.random.Generator, u: float | None = None) -> SampleBatchReport:
    """Empirical ``P(weight = n)`` of the Boltzmann matrix, with a Wilson interval.

    All classes up to the underflow cutoff are drawn, so the estimate is of
    the unconditioned weight law.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if u is None:
        u = saddle_parameter(n)
    t0 = time.perf_counter()
    params = SamplerParams(n, u, underflow_cutoff(u))
    hits = int(np.count_nonzero(boltzmann_weights(params, trials, rng) == n))
    lo, hi = wilson_interval(hits, trials)
    return SampleBatchReport(n, u, hits, trials, hits / trials, lo, hi, time.perf_counter() - t0)


# --------------------------------------------------------------------------
# batches


def _worker(args) -> tuple[list[CorrespondenceMatrix], int]:
    params, quota, worker = args
    return sample_matrices(params, quota, make_rng(params.seed, worker))


def sample_batch(
    n: int, count: int, seed: int, workers: int = 1, u: float | None = None
) -> tuple[list[CorrespondenceMatrix], SampleBatchReport]:
    """Matrices of weight ``n`` from ``workers`` independent substreams.

    The output is the concatenation of worker outputs in worker order, so it
    depends only on ``(n, count, seed, workers, u)``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    t0 = time.perf_counter()
    params = default_params(n, u=u, seed=seed)
    quotas = [count // workers + (1 if i < count % workers else 0) for i in range(workers)]
    jobs = [(params, qn, i) for i, qn in enumerate(quotas)]
    if workers == 1:
        results = [_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    matrices = [M for ms, _ in results for M in ms]
    trials = sum(t for _, t in results)
    rate = count / trials if trials else 1.0
    lo, hi = wilson_interval(count, trials) if trials else (1.0, 1.0)
    report = SampleBatchReport(n, params.u, count, trials, rate, lo, hi, time.perf_counter() - t0)
    return matrices, report
