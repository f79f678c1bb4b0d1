"""Tridiagonal beta-Hermite ensemble and the eigenvalue energy statistic.

The matrix has diagonal N(0, 2) and off-diagonal chi_{(n-k) beta} entries,
all scaled by 1/sqrt(beta n), so the spectrum fills [-2, 2] and the
eigenvalue density carries the weight exp(-(beta n / 4) sum x_i^2).
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .energy import delta_n
from .errors import CoincidenceError, DomainError
from .specfn import digamma, trigamma
from .tridiag import TridiagonalSym, eigenvalues

__all__ = [
    "RngSpec",
    "EnergySample",
    "MonteCarloRun",
    "sample_matrix",
    "eigenvalues",
    "energy_statistic",
    "energy_sample",
    "monte_carlo",
]


@dataclass(frozen=True)
class RngSpec:
    """Root seed and stream id; replication k uses a seed derived from (seed, stream, k)."""

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if int(self.stream) < 0:
            raise DomainError("stream id must be nonnegative")

    def derived_seed(self, rep):
        """64-bit seed for replication ``rep`` (SeedSequence hashing)."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), int(rep)))
        return int(ss.generate_state(1, np.uint64)[0])

    def generator(self, rep=0):
        return np.random.Generator(np.random.PCG64(self.derived_seed(rep)))


def _generator(rng):
    if isinstance(rng, RngSpec):
        return rng.generator(0)
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_matrix(n, beta, rng):
    """Draw the scaled tridiagonal beta-Hermite matrix.

    Diagonal entries are N(0, 2) / sqrt(beta n). The k-th off-diagonal entry
    is chi_{(n-k) beta} / sqrt(beta n), drawn as sqrt(2 Gamma((n-k) beta / 2)).
    """
    n = int(n)
    beta = float(beta)
    if n < 2:
        raise DomainError("sample_matrix needs n >= 2")
    if not beta > 0:
        raise DomainError("beta must be positive")
    g = _generator(rng)
    scale = 1.0 / math.sqrt(beta * n)
    diag = g.normal(0.0, math.sqrt(2.0), n) * scale
    shapes = (n - np.arange(1, n)) * beta / 2.0
    offdiag = np.sqrt(2.0 * g.standard_gamma(shapes)) * scale
    # A zero chi variate has probability zero; keep the positivity invariant.
    offdiag = np.maximum(offdiag, np.finfo(float).tiny)
    return TridiagonalSym(diag, offdiag)


def energy_statistic(eigs, n=None):
    """E_n = (1/2n) sum l_k^2 - 2/(n(n-1)) sum_{j<k} log|l_j - l_k|."""
    lam = np.asarray(eigs, dtype=float).ravel()
    n = lam.size if n is None else int(n)
    if n != lam.size or n < 2:
        raise DomainError("energy_statistic needs n >= 2 eigenvalues")
    s = np.sort(lam)
    gaps = s[None, :] - s[:, None]
    iu = np.triu_indices(n, 1)
    d = gaps[iu]
    if np.any(d <= 0):
        raise CoincidenceError("repeated eigenvalues")
    return float(np.dot(lam, lam) / (2 * n) - 2.0 * np.sum(np.log(d)) / (n * (n - 1)))


@dataclass(frozen=True)
class EnergySample:
    """One replication: sorted eigenvalues, E_n and n (E_n - Delta_n)."""

    n: int
    beta: float
    eigenvalues: np.ndarray
    E_n: float
    centered: float
    rep: int = 0
    seed: int = 0

    def row(self):
        return [self.rep, self.n, format(self.beta, ".17g"), format(self.E_n, ".17g"),
                format(self.centered, ".17g"), self.seed]


def energy_sample(n, beta, rng_spec, rep=0):
    """Reproducible sample for replication ``rep`` of ``rng_spec``."""
    seed = rng_spec.derived_seed(rep)
    T = sample_matrix(n, beta, np.random.Generator(np.random.PCG64(seed)))
    lam = eigenvalues(T)
    lam.flags.writeable = False
    e = energy_statistic(lam, n)
    return EnergySample(int(n), float(beta), lam, e, n * (e - delta_n(n)), int(rep), seed)


def _batch(args):
    n, beta, spec, reps = args
    return [energy_sample(n, beta, spec, r) for r in reps]


class MonteCarloRun:
    """Samples in replication order with summary statistics of the centered statistic."""

    def __init__(self, samples, n, beta, rng):
        self.samples = list(samples)
        self.n, self.beta, self.rng = int(n), float(beta), rng

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def centered(self):
        return np.array([s.centered for s in self.samples])

    def summary(self):
        """Mean, variance, skew and excess kurtosis with the limiting constants.

        ``clt_variance`` is the sample variance of sqrt(n) times the centered
        statistic, to be compared with trigamma(1 + beta/2).
        """
        c = self.centered
        k = c.size
        lln = float(digamma(1.0 + self.beta / 2.0) - math.log(self.beta / 2.0))
        var = float(np.var(c, ddof=1)) if k > 1 else math.nan
        out = {
            "n": self.n,
            "beta": self.beta,
            "reps": k,
            "seed": self.rng.seed,
            "stream": self.rng.stream,
            "mean": float(np.mean(c)),
            "variance": var,
            "std_error": math.sqrt(var / k) if k > 1 else math.nan,
            "skew": float(stats.skew(c)) if k > 2 else math.nan,
            "kurtosis": float(stats.kurtosis(c)) if k > 3 else math.nan,
            "clt_variance": self.n * var,
            "target_mean": lln,
            "target_variance": float(trigamma(1.0 + self.beta / 2.0)),
        }
        return out

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rep", "n", "beta", "E_n", "centered", "seed"])
            for s in self.samples:
                writer.writerow(s.row())

    def write_summary(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def monte_carlo(n, beta, reps, rng=RngSpec(), workers=1):
    """Independent replications 0..reps-1, gathered in replication order.

    Each replication draws from its own generator, so the output does not
    depend on ``workers``.
    """
    reps = int(reps)
    if reps < 1:
        raise DomainError("reps must be >= 1")
    if not isinstance(rng, RngSpec):
        rng = RngSpec(int(rng))
    workers = max(1, int(workers))
    if workers == 1 or reps == 1:
        samples = [energy_sample(n, beta, rng, r) for r in range(reps)]
    else:
        chunks = [list(range(reps))[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_batch, [(n, beta, rng, c) for c in chunks if c]))
        samples = sorted((s for p in parts for s in p), key=lambda s: s.rep)
    return MonteCarloRun(samples, n, beta, rng)
