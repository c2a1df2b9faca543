"""Radial grids and finite-difference derivative operators.

Derivatives use moving Fornberg stencils: windows of ``order + 4`` nodes give
4th-order accuracy for the first and second derivative on uniform and graded
grids alike, with one-sided windows at the boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def fornberg_weights(z, x, m):
    """Weights of derivatives 0..m at point z from samples at nodes x.

    Classic recursive algorithm; returns array (m+1, len(x)).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@dataclass
class RadialGrid:
    """Strictly increasing radial nodes with cached derivative stencils."""

    nodes: np.ndarray
    spacing: str = "custom"
    _ops: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        if self.nodes.ndim != 1 or len(self.nodes) < 9:
            raise ValueError("a radial grid needs at least 9 nodes")
        if not np.all(np.diff(self.nodes) > 0):
            raise ValueError("radial nodes must be strictly increasing")

    @classmethod
    def uniform(cls, t_min, t_max, n):
        return cls(np.linspace(t_min, t_max, n), spacing="uniform")

    @classmethod
    def log_graded(cls, t_min, t_max, n):
        if t_min <= 0:
            raise ValueError("log grading requires t_min > 0")
        return cls(np.geomspace(t_min, t_max, n), spacing="log")

    @property
    def n(self):
        return len(self.nodes)

    @property
    def min_spacing(self):
        return float(np.diff(self.nodes).min())

    def _stencil(self, m):
        key = int(m)
        if key not in self._ops:
            n = self.n
            width = min(n, m + 4)
            weights = np.zeros((n, width))
            starts = np.zeros(n, dtype=np.intp)
            for i in range(n):
                s = min(max(i - width // 2, 0), n - width)
                starts[i] = s
                weights[i] = fornberg_weights(self.nodes[i], self.nodes[s : s + width], m)[m]
            self._ops[key] = (starts, weights)
        return self._ops[key]

    def deriv(self, values, m=1):
        """m-th radial derivative along axis 0 of ``values``."""
        values = np.asarray(values, dtype=float)
        starts, weights = self._stencil(m)
        width = weights.shape[1]
        out = np.zeros_like(values)
        for c in range(width):
            w = weights[:, c].reshape((-1,) + (1,) * (values.ndim - 1))
            out += w * values[starts + c]
        return out

    def refine(self, factor=2):
        """Grid with (n-1)*factor + 1 nodes of the same spacing rule."""
        n_new = (self.n - 1) * factor + 1
        if self.spacing == "uniform":
            return RadialGrid.uniform(self.nodes[0], self.nodes[-1], n_new)
        if self.spacing == "log":
            return RadialGrid.log_graded(self.nodes[0], self.nodes[-1], n_new)
        # piecewise-linear refinement of custom node sets
        xs = [self.nodes[0]]
        for a, b in zip(self.nodes[:-1], self.nodes[1:]):
            xs.extend(np.linspace(a, b, factor + 1)[1:])
        return RadialGrid(np.array(xs), spacing="custom")


def sinh_graded_nodes(r_min, r_max, center, width, n):
    """Nodes on [r_min, r_max] clustered around ``center`` with scale ``width``."""
    a = np.arcsinh((r_min - center) / width)
    b = np.arcsinh((r_max - center) / width)
    xi = np.linspace(a, b, n)
    nodes = center + width * np.sinh(xi)
    nodes[0], nodes[-1] = r_min, r_max
    return nodes
