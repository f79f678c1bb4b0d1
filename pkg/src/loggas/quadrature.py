"""Composite Gauss-Legendre rules on (0, 1) for quantile-space integrals.

Panels are uniform in the interior and graded geometrically towards 0, 1
and any requested singular breakpoints. Every breakpoint is a panel edge,
so piecewise-smooth quantile functions are integrated panel by panel.

For the double integral of a log kernel the triangle {v < u} is split into
off-diagonal panel pairs (tensor rules) and diagonal panel triangles, which
are mapped to the unit square by a Duffy transform so that u - v = h x y.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

DEFAULT_ORDERS = (10, 14)


@lru_cache(maxsize=None)
def _gauss01(m):
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def panel_edges(breaks=(), singular=(), uniform=32, ratio=0.15, smallest=1e-10, merge=1e-13):
    """Sorted panel edges for [0, 1].

    Panels are graded geometrically down to ``smallest`` towards 0 (1) when
    ``singular`` contains a level <= 0 (>= 1), and by six levels on each side
    of interior singular levels.
    """
    pieces = [np.linspace(0.0, 1.0, uniform + 1)]
    h = 1.0 / uniform
    levels = max(int(np.ceil(np.log(smallest / h) / np.log(ratio))), 0)
    graded = h * ratio ** np.arange(1, levels + 1)
    singular = np.asarray(singular, dtype=float).ravel()
    if np.any(singular <= 0):
        pieces.append(graded)
    if np.any(singular >= 1):
        pieces.append(1.0 - graded)
    breaks = np.asarray(breaks, dtype=float).ravel()
    breaks = breaks[(breaks > 0) & (breaks < 1)]
    pieces.append(breaks)
    for b in singular:
        if 0 < b < 1:
            local = 0.5 * h * ratio ** np.arange(1, 7)
            pieces += [b - local, b + local]
    edges = np.unique(np.clip(np.concatenate(pieces), 0.0, 1.0))
    keep = np.concatenate([[True], np.diff(edges) > merge])
    edges = edges[keep]
    edges[0], edges[-1] = 0.0, 1.0
    if edges.size < 2:
        edges = np.array([0.0, 1.0])
    return edges


@lru_cache(maxsize=32)
def _lower_pair_indices(panels, order):
    panel = np.repeat(np.arange(panels), order)
    a, b = np.nonzero(panel[:, None] > panel[None, :])
    for arr in (a, b):
        arr.flags.writeable = False
    return a, b


class PanelRule:
    """Gauss rule of a fixed order on every panel of ``edges``.

    Node arrays are computed once and cached on the instance.
    """

    def __init__(self, edges, order):
        self.edges = np.asarray(edges, dtype=float)
        self.order = int(order)

    def __repr__(self):
        return f"PanelRule(panels={self.edges.size - 1}, order={self.order})"

    @property
    def lengths(self):
        return np.diff(self.edges)

    @cached_property
    def _nodes(self):
        x, w = _gauss01(self.order)
        h = self.lengths
        nodes = (self.edges[:-1, None] + h[:, None] * x[None, :]).ravel()
        weights = (h[:, None] * w[None, :]).ravel()
        panel = np.repeat(np.arange(h.size), self.order)
        return nodes, weights, panel

    def nodes_weights(self):
        return self._nodes

    @cached_property
    def _duffy(self):
        x, w = _gauss01(self.order)
        X, Y = np.meshgrid(x, x, indexing="ij")
        W = np.outer(w, w) * X
        a = self.edges[:-1, None, None]
        h = self.lengths[:, None, None]
        u = (a + h * X[None]).ravel()
        v = (a + h * (X * (1.0 - Y))[None]).ravel()
        weights = (h * h * W[None]).ravel()
        return u, v, weights

    def duffy(self):
        """Nodes (u, v) with v < u and weights for the diagonal panel triangles."""
        return self._duffy

    @cached_property
    def lower_pairs(self):
        """Index pairs (a, b) of nodes in distinct panels with panel(a) > panel(b)."""
        return _lower_pair_indices(self.edges.size - 1, self.order)

    @cached_property
    def lower_pair_weights(self):
        """Product weights w_a w_b and log(u_a - u_b) for :attr:`lower_pairs`."""
        nodes, weights, _ = self._nodes
        a, b = self.lower_pairs
        return weights[a] * weights[b], np.log(nodes[a] - nodes[b])


_RULE_CACHE = {}
_RULE_CACHE_SIZE = 64


def rules(breaks=(), singular=(), orders=DEFAULT_ORDERS, **kw):
    """One :class:`PanelRule` per order on a shared set of edges."""
    edges = panel_edges(breaks, singular, **kw)
    out = []
    for m in orders:
        key = (edges.tobytes(), int(m))
        rule = _RULE_CACHE.get(key)
        if rule is None:
            if len(_RULE_CACHE) >= _RULE_CACHE_SIZE:
                _RULE_CACHE.pop(next(iter(_RULE_CACHE)))
            rule = _RULE_CACHE[key] = PanelRule(edges, m)
        out.append(rule)
    return out


def integrate(func, rule):
    """Integral over (0, 1) of a vectorised function of u."""
    nodes, weights, _ = rule.nodes_weights()
    return float(np.dot(weights, func(nodes)))


@dataclass
class QuantileSample:
    """A quantile function evaluated on a rule's nodes and Duffy points.

    Samples of different measures on the same rule can be combined
    linearly, which is exactly the quantile of a displacement interpolant.
    """

    rule: PanelRule
    q: np.ndarray
    q_du: np.ndarray
    q_dv: np.ndarray

    @classmethod
    def of(cls, quantile, rule):
        nodes, _, _ = rule.nodes_weights()
        u, v, _ = rule.duffy()
        return cls(rule, quantile(nodes), quantile(u), quantile(v))

    def combine(self, other, t):
        """Sample of (1 - t) * self + t * other."""
        return QuantileSample(
            self.rule,
            (1 - t) * self.q + t * other.q,
            (1 - t) * self.q_du + t * other.q_du,
            (1 - t) * self.q_dv + t * other.q_dv,
        )

    def shifted(self, c):
        return QuantileSample(self.rule, self.q + c, self.q_du + c, self.q_dv + c)
