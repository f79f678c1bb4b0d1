"""Randomized inputs for the inequality checkers and a batch runner.

Every trial draws from its own generator seeded by (seed, kind, trial), so a
batch is reproducible and any single trial can be replayed in isolation.
"""

import csv
import math
from functools import lru_cache

import numpy as np

from .circle import CircularMeasure, arc
from .energy import Potential
from .fekete import fekete_points
from .inequalities import (check_circle, check_discrete, check_haar, check_line,
                           check_measure_vs_fekete, check_semicircular)
from .measures import Gridded, Semicircle, Uniform

__all__ = [
    "KINDS",
    "trial_rng",
    "random_gridded",
    "random_line_measure",
    "random_configuration",
    "random_circle_measure",
    "run_trial",
    "run_trials",
    "write_reports_csv",
]

KINDS = ("line", "semicircle", "discrete", "fekete", "circle", "haar")
TWO_PI = 2.0 * math.pi


def trial_rng(seed, kind, trial):
    """Generator for one trial, independent of every other (kind, trial)."""
    key = (KINDS.index(kind), int(trial))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def _density_samples(rng, cells):
    # Log-normal random walk: positive, moderately varying samples; sometimes
    # the density vanishes at the ends of its support.
    log_f = np.cumsum(rng.normal(0.0, 0.4, cells + 1))
    f = np.exp(log_f - log_f.mean())
    if rng.random() < 0.3:
        f[0] = 0.0
    if rng.random() < 0.3:
        f[-1] = 0.0
    return f


def random_gridded(rng, lo=(-3.0, 0.0), width=(0.5, 5.0), cells=(6, 16)):
    """Random piecewise-linear density on a random interval."""
    a = rng.uniform(*lo)
    b = a + rng.uniform(*width)
    k = int(rng.integers(cells[0], cells[1] + 1))
    return Gridded.normalized(_density_samples(rng, k), a, b)


def random_line_measure(rng):
    """Mostly gridded densities, with some shifted or dilated semicircles and uniforms."""
    r = rng.random()
    if r < 0.8:
        return random_gridded(rng)
    if r < 0.9:
        return Semicircle(rng.uniform(-2, 2), rng.uniform(0.3, 4))
    a = rng.uniform(-3, 1)
    return Uniform(a, a + rng.uniform(0.2, 4))


def random_configuration(rng, n):
    """n Gaussian points with a random scale and centre."""
    return rng.normal(rng.uniform(-1, 1), rng.uniform(0.3, 3), n)


def random_circle_measure(rng):
    """Gridded density in a random window, or a random arc."""
    L = rng.uniform(0, TWO_PI)
    if rng.random() < 0.2:
        return arc(L, L + rng.uniform(0.2, TWO_PI))
    width = TWO_PI if rng.random() < 0.6 else rng.uniform(0.5, TWO_PI)
    k = int(rng.integers(6, 17))
    return CircularMeasure(Gridded.normalized(_density_samples(rng, k), L, L + width), L)


@lru_cache(maxsize=64)
def _fekete(n, label):
    return fekete_points(n, _potential_from_label(label))


def _potential_from_label(label):
    name, _, args = label.partition(":")
    vals = [float(v) for v in args.split(",")] if args else []
    return getattr(Potential, name)(*vals)


def run_trial(kind, rng, n=None):
    """One randomized check of the given kind."""
    if kind == "line":
        Q = Potential.quadratic(round(rng.uniform(0.2, 2.0), 3))
        return check_line(random_line_measure(rng), Q, Q.minimizer, Q.min_energy)
    if kind == "semicircle":
        return check_semicircular(random_line_measure(rng))
    if kind == "discrete":
        m = int(n) if n else int(rng.integers(2, 51))
        Q = Potential.quadratic(0.5)
        return check_discrete(random_configuration(rng, m), _fekete(m, Q.label), Q)
    if kind == "fekete":
        m = int(n) if n else int(rng.integers(2, 31))
        Q = Potential.quadratic(0.5)
        return check_measure_vs_fekete(random_line_measure(rng), _fekete(m, Q.label), Q)
    if kind == "circle":
        Q = Potential.cosine(round(rng.uniform(-0.45, 0.45), 3))
        return check_circle(random_circle_measure(rng), Q, Q.minimizer, Q.min_energy, Q.rho)
    if kind == "haar":
        return check_haar(random_circle_measure(rng))
    raise ValueError(f"unknown trial kind {kind!r}")


def run_trials(kind, reps, seed=0, n=None):
    """Reports for trials 0..reps-1 of ``kind``, in trial order."""
    return [run_trial(kind, trial_rng(seed, kind, i), n) for i in range(int(reps))]


def write_reports_csv(reports, path):
    """One row per trial: trial, lhs, rhs, slack, tolerance, ok."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "lhs", "rhs", "slack", "tolerance", "ok"])
        for i, r in enumerate(reports):
            writer.writerow([i] + [format(float(v), ".17g") for v in (r.lhs, r.rhs, r.slack, r.tolerance)]
                            + [int(r.ok)])
