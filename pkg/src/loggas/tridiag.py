"""Symmetric tridiagonal matrices and an implicit-shift QL eigenvalue solver."""

import math

import numpy as np

from .errors import ConvergenceError

__all__ = ["TridiagonalSym", "tridiagonal_eigenvalues", "eigenvalues"]

_EPS = 2.0 ** -52
_MAX_SWEEPS = 60


class TridiagonalSym:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal.

    Off-diagonal entries must be strictly positive (chi variates are).
    """

    def __init__(self, diag, offdiag):
        self.diag = np.asarray(diag, dtype=float).copy()
        self.offdiag = np.asarray(offdiag, dtype=float).copy()
        n = self.diag.size
        if n < 1 or self.offdiag.shape != (n - 1,):
            raise ValueError("need n diagonal and n - 1 off-diagonal entries")
        if np.any(~(self.offdiag > 0)):
            raise ValueError("off-diagonal entries must be positive")
        self.diag.setflags(write=False)
        self.offdiag.setflags(write=False)

    @property
    def n(self):
        return self.diag.size

    def dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm(self):
        """Infinity norm (max absolute row sum)."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def __eq__(self, other):
        if not isinstance(other, TridiagonalSym):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(self.offdiag, other.offdiag)

    def __repr__(self):
        return f"TridiagonalSym(n={self.n})"


def tridiagonal_eigenvalues(diag, offdiag):
    """All eigenvalues of a symmetric tridiagonal matrix, ascending.

    Implicit QL with the shift taken from the leading 2x2 block and
    deflation once |e_m| <= eps (|d_m| + |d_{m+1}|). No eigenvectors are
    accumulated, so the cost is O(n^2). Works on Python floats: for the
    sizes used here this beats per-element numpy indexing.
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in offdiag]
    if len(e) != max(n - 1, 0):
        raise ValueError("need n - 1 off-diagonal entries")
    e.append(0.0)
    hypot = math.hypot
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= _EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _MAX_SWEEPS:
                raise ConvergenceError(f"QL iteration stalled at index {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # underflow: split the matrix here and restart.
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return np.sort(np.array(d))


def eigenvalues(T):
    """Eigenvalues of a :class:`TridiagonalSym`, ascending."""
    return tridiagonal_eigenvalues(T.diag, T.offdiag)
