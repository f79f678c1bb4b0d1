import math

import numpy as np
import pytest

from loggas.circle import CircularMeasure, CosineDensity, alignment_brackets, arc, circle_empirical, haar, w2_circle
from loggas.errors import DomainError
from loggas.measures import Gridded, Uniform

TWO_PI = 2 * math.pi


def bump(L, width=TWO_PI):
    return CircularMeasure(Gridded.normalized([0.2, 1.0, 3.0, 0.5, 1.5, 0.2], L, L + width), L)


def test_haar_rotation_invariance():
    h = haar()
    for alpha in (0.3, 1.0, 3.0, 5.9):
        assert w2_circle(h, h.rotate(alpha)) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("theta", [0.4, 2.0, math.pi - 0.01, 4.0, 6.0])
def test_diracs_are_geodesic(theta):
    d = w2_circle(circle_empirical([0.0]), circle_empirical([theta]))
    assert d == pytest.approx(min(theta, TWO_PI - theta), abs=1e-12)


def test_self_distance_zero():
    for m in (haar(), arc(1.0, 2.5), bump(0.7), circle_empirical([0.1, 2.0, 4.0])):
        assert w2_circle(m, m) == 0.0
        assert w2_circle(m, m.recut(m.cut_point + 1.3)) == pytest.approx(0.0, abs=1e-8)


def test_simultaneous_rotation_invariance():
    a, b = bump(0.2), arc(1.0, 3.0)
    d = w2_circle(a, b)
    for alpha in (0.5, 2.2, 4.4):
        assert w2_circle(a.rotate(alpha), b.rotate(alpha)) == pytest.approx(d, abs=1e-8)


def test_mean_alignment_holds_at_chosen_cut():
    a, b = bump(0.2), arc(1.0, 3.0)
    brackets = alignment_brackets(a, b)
    assert brackets
    for lo, hi in brackets:
        assert hi - lo < 1e-10
        assert abs(a.lifted_mean(hi) - b.lifted_mean(hi)) < 1e-9


def test_chordal_not_larger_than_angular():
    a, b = bump(0.2), arc(1.0, 3.0)
    assert w2_circle(a, b, metric="chordal") <= w2_circle(a, b) + 1e-12


def test_optimal_not_larger_than_mean_aligned():
    a, b = arc(0.0, 1.0), arc(0.3, 1.3)
    assert w2_circle(a, b, method="optimal") == pytest.approx(0.3, abs=1e-7)
    assert w2_circle(a, b) >= 0.3
    rng = np.random.default_rng(0)
    for _ in range(40):
        x = circle_empirical(rng.uniform(0, TWO_PI, 5))
        y = circle_empirical(rng.uniform(0, TWO_PI, 5))
        assert w2_circle(x, y, method="optimal") <= w2_circle(x, y) + 1e-12


def test_optimal_small_rotation_of_nonuniform_density():
    m = CircularMeasure(CosineDensity(0.4), 0.0)
    eps = 0.01
    opt = w2_circle(m, m.rotate(eps), method="optimal")
    # Only the density variation has to move: about a eps / sqrt 2, well below eps.
    assert opt == pytest.approx(0.4 * eps / math.sqrt(2), rel=0.05)
    assert opt <= w2_circle(m, m.rotate(eps)) + 1e-9


def test_recut_preserves_measure():
    m = bump(0.5)
    r = m.recut(3.0)
    assert r.cut_point == 3.0
    assert r.lift.support == (3.0, 3.0 + TWO_PI)
    # Same circular law: equal circular moments.
    u = np.linspace(1e-4, 1 - 1e-4, 4001)
    for k in (1, 2, 3):
        a = np.mean(np.exp(1j * k * m.lift.quantile(u)))
        b = np.mean(np.exp(1j * k * r.lift.quantile(u)))
        assert abs(a - b) < 1e-3


def test_cosine_density():
    c = CosineDensity(0.3)
    u = np.array([0.1, 0.5, 0.9])
    assert np.allclose(c.cdf(c.quantile(u)), u, atol=1e-14)
    assert c.quantile(0.5) == pytest.approx(math.pi, abs=1e-14)
    with pytest.raises(ValueError):
        CosineDensity(1.0)


def test_validation():
    with pytest.raises(DomainError):
        CircularMeasure(Uniform(0.0, 7.0), 0.0)
    with pytest.raises(DomainError):
        arc(0.0, 7.0)
    with pytest.raises(ValueError):
        w2_circle(haar(), bump(0.1), method="best")
    # Atoms reduce into [0, 2 pi).
    assert circle_empirical([-0.5]).lift.atoms[0] == pytest.approx(TWO_PI - 0.5)
