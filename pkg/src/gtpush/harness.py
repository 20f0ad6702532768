"""Statistics, experiment configuration and reproducible Monte Carlo runs.

Per-trial RNG streams are derived from (master seed, trial index), so results
are byte-identical no matter how trials are scheduled; GTPUSH_THREADS > 1
fans trials out over a process pool and merges chunks in index order.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import chi2

from . import dynamics, kernels
from .patterns import frac, rates_of

MODELS = ("poisson", "geometric", "wall")


@dataclass
class Pmf:
    """Finite distribution over hashable states (floats, sums to 1)."""

    support: tuple
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if len(self.support) != len(self.probs):
            raise ValueError("support/probs length mismatch")
        if np.any(self.probs < -1e-15):
            raise ValueError("negative probability")
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.probs.sum()}, not 1")

    def as_dict(self) -> dict:
        return dict(zip(self.support, (float(p) for p in self.probs)))

    @classmethod
    def from_counts(cls, counts: dict, total: int | None = None) -> "Pmf":
        total = total if total is not None else sum(counts.values())
        states = sorted(counts)
        return cls(tuple(states), np.array([counts[s] / total for s in states]))

    @classmethod
    def from_dense_row(cls, kernel, source) -> "Pmf":
        """Row of an intertwine.DenseKernel; the truncation bound must be
        generous enough that escaped mass is below the Pmf closure tolerance."""
        row = kernel.row(source)
        keep = row > 0.0
        states = tuple(s for s, k in zip(kernel.states, keep) if k)
        return cls(states, row[keep])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["state", "prob"])
        for s, p in zip(self.support, self.probs):
            label = ",".join(str(c) for c in s) if isinstance(s, tuple) else str(s)
            writer.writerow([label, repr(float(p))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Pmf":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0][:2] == ["state", "prob"]:
            rows = rows[1:]
        support, probs = [], []
        for label, p in rows:
            support.append(tuple(int(c) for c in label.split(",")))
            probs.append(float(p))
        return cls(tuple(support), np.array(probs))


def tv_distance(p: Pmf, r: Pmf) -> float:
    """Half the L1 distance over the united supports."""
    pd, rd = p.as_dict(), r.as_dict()
    return 0.5 * sum(abs(pd.get(s, 0.0) - rd.get(s, 0.0)) for s in set(pd) | set(rd))


def chi_square_gof(samples, ref: Pmf) -> float:
    """Chi-square goodness of fit p-value; bins under 5 expected counts are
    merged into a tail bin (which also absorbs unlisted states and any mass
    the reference lost to truncation)."""
    n = len(samples)
    counts: dict = {}
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
    order = sorted(range(len(ref.support)), key=lambda i: -ref.probs[i])
    bins = []  # (observed, expected)
    tail_obs = 0
    tail_exp = (1.0 - float(ref.probs.sum())) * n
    seen = set()
    for i in order:
        state, expected = ref.support[i], float(ref.probs[i]) * n
        seen.add(state)
        if expected >= 5.0:
            bins.append((counts.get(state, 0), expected))
        else:
            tail_obs += counts.get(state, 0)
            tail_exp += expected
    for state, c in counts.items():
        if state not in seen:
            tail_obs += c
    if tail_exp > 0.0:
        if tail_exp >= 5.0 or not bins:
            bins.append((tail_obs, tail_exp))
        else:
            obs, exp = bins.pop()
            bins.append((obs + tail_obs, exp + tail_exp))
    if len(bins) < 2:
        raise ValueError("need at least two bins for a chi-square test")
    stat = sum((obs - exp) ** 2 / exp for obs, exp in bins)
    return float(chi2.sf(stat, len(bins) - 1))


@dataclass
class ExperimentConfig:
    """A reproducible Monte Carlo run of one of the three dynamics."""

    model: str
    n: int
    q: tuple[str, ...]
    z: tuple[int, ...]
    horizon: float | int
    trials: int
    seed: int
    bound: int
    out: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        self.q = tuple(str(v) for v in self.q)
        self.z = tuple(int(c) for c in self.z)
        rates_of([frac(v) for v in self.q])
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.bound < max(self.z, default=0) + 2:
            raise ValueError("bound must be at least max(z) + 2")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls(**json.loads(text))

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["q"] = list(self.q)
        d["z"] = list(self.z)
        return json.dumps(d, indent=2)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-split stream for one trial; independent of scheduling."""
    return np.random.default_rng((seed, trial))


def _endpoint_one(model, n, q, z, horizon, seed, trial):
    from .patterns import sample_pattern

    rng = trial_rng(seed, trial)
    if model == "poisson":
        init = sample_pattern(z, q, "standard", rng, nrows=n)
        traj = dynamics.simulate_poisson(n, q, init, horizon, rng)
    elif model == "geometric":
        init = sample_pattern(z, q, "standard", rng, nrows=n)
        traj = dynamics.simulate_geometric(n, q, init, int(horizon), rng)
    else:
        init = sample_pattern(z, q, "symplectic", rng, nrows=n)
        traj = dynamics.simulate_wall(n, q, init, horizon, rng)
    return traj.final.bottom_row


def _endpoint_chunk(payload):
    model, n, q, z, horizon, seed, lo, hi = payload
    qs = [Fraction(v) for v in q]
    return [_endpoint_one(model, n, qs, z, horizon, seed, t) for t in range(lo, hi)]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("GTPUSH_THREADS", "1")))
    except ValueError:
        return 1


def endpoint_samples(config: ExperimentConfig) -> list[tuple]:
    """Bottom-row states at the horizon for config.trials independent runs."""
    workers = worker_count()
    args = (config.model, config.n, config.q, config.z, config.horizon, config.seed)
    if workers == 1:
        return _endpoint_chunk(args + (0, config.trials))
    chunk = (config.trials + workers - 1) // workers
    payloads = [
        args + (lo, min(lo + chunk, config.trials))
        for lo in range(0, config.trials, chunk)
    ]
    out: list[tuple] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_endpoint_chunk, payloads):
            out.extend(part)
    return out


def empirical_pmf(samples) -> Pmf:
    counts: dict = {}
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
    return Pmf.from_counts(counts, len(samples))


def reference_endpoint_pmf(config: ExperimentConfig, tol: float = 1e-14) -> Pmf:
    """Reference law of the bottom row at the horizon.

    The bottom row is itself Markov with the matching conditioned-walk
    operator, so the reference is a semigroup row for the continuous dynamics
    and a kernel power for the discrete one."""
    from . import intertwine

    qs = [frac(v) for v in config.q]
    if config.model == "poisson":
        gen = kernels.q_charlier(config.n, qs, config.bound)
        return Pmf.from_dense_row(intertwine.semigroup(gen, config.horizon, tol), config.z)
    if config.model == "wall":
        gen = kernels.q_symplectic(config.n, qs, config.bound)
        k = (config.n + 1) // 2
        z = config.z if len(config.z) == k else (0,) * k
        return Pmf.from_dense_row(intertwine.semigroup(gen, config.horizon, tol), z)
    kern = kernels.kernel_geometric(config.n, qs, config.bound)
    states = kern.states
    idx = {s: i for i, s in enumerate(states)}
    mat = np.zeros((len(states), len(states)))
    for s in states:
        for t2, v in kern.row(s).items():
            mat[idx[s], idx[t2]] = float(v)
    vec = np.zeros(len(states))
    vec[idx[config.z]] = 1.0
    for _ in range(int(config.horizon)):
        vec = vec @ mat
    keep = vec > 0.0
    if abs(vec.sum() - 1.0) > 1e-12:
        raise ValueError("kernel power lost mass; enlarge bound")
    return Pmf(tuple(s for s, k2 in zip(states, keep) if k2), vec[keep])
