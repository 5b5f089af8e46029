"""Uniform 1D node-centred grid, second-order Laplacians, harmonic lifting
and the discrete norms used by the diagnostics.

Fields are plain NumPy arrays over all ``n + 2`` nodes (boundary nodes
included) unless an operation states it works on interior values only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded


@dataclass(frozen=True)
class Grid1D:
    """``n`` interior nodes on ``(0, length)``; nodes ``x_i = i*h``, ``i = 0..n+1``."""

    n: int
    length: float = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need at least 3 interior nodes, got {self.n}")
        if self.length <= 0.0:
            raise ValueError("length must be positive")

    @property
    def h(self) -> float:
        return self.length / (self.n + 1)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n + 2) * self.h

    @property
    def interior(self) -> np.ndarray:
        return self.x[1:-1]

    @property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n + 2, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def check_field(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n + 2,):
            raise ValueError(f"field has shape {f.shape}, grid expects {(self.n + 2,)}")
        if not np.all(np.isfinite(f)):
            raise ValueError("field contains non-finite values")
        return f


def laplacian_dirichlet(f, g_left, g_right, h):
    """Three-point Laplacian at the interior nodes with boundary values replaced
    by ``g_left``/``g_right``. ``f`` holds all nodes; returns ``n`` values."""
    f = np.asarray(f, dtype=float)
    left = np.concatenate(([g_left], f[1:-2]))
    right = np.concatenate((f[2:-1], [g_right]))
    return (left - 2.0 * f[1:-1] + right) / (h * h)


def laplacian_neumann(f, h):
    """Three-point Laplacian at every node with homogeneous Neumann data
    (ghost values ``f[-1] = f[1]``, ``f[n+2] = f[n]``)."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    out[1:-1] = f[:-2] - 2.0 * f[1:-1] + f[2:]
    out[0] = 2.0 * (f[1] - f[0])
    out[-1] = 2.0 * (f[-2] - f[-1])
    return out / (h * h)


def harmonic_extension(g_left, g_right, grid: Grid1D) -> np.ndarray:
    """Discrete solution of ``Delta u = 0`` with the given end values (affine in 1D)."""
    s = grid.x / grid.length
    return g_left + (g_right - g_left) * s


def norm_L2(f, grid: Grid1D) -> float:
    f = np.asarray(f, dtype=float)
    return float(np.sqrt(np.dot(grid.trapezoid_weights, f * f)))


def seminorm_H1(f, grid: Grid1D) -> float:
    df = np.diff(np.asarray(f, dtype=float))
    return float(np.sqrt(np.dot(df, df) / grid.h))


def norm_H1(f, grid: Grid1D) -> float:
    return float(np.hypot(norm_L2(f, grid), seminorm_H1(f, grid)))


def norm_Linf(f) -> float:
    return float(np.max(np.abs(f)))


def _dirichlet_banded(n, h):
    ab = np.empty((3, n))
    ab[0, :] = -1.0 / (h * h)
    ab[1, :] = 2.0 / (h * h)
    ab[2, :] = -1.0 / (h * h)
    return ab


def riesz(v, h):
    """Solve ``-Delta_h z = v`` with zero Dirichlet data; ``v`` holds interior values."""
    v = np.asarray(v, dtype=float)
    return solve_banded((1, 1), _dirichlet_banded(v.size, h), v)


def dual_norm(v, h) -> float:
    """Discrete norm dual to ``||grad .||`` on ``H^1_0``: ``sqrt(h * sum v*z)``
    where ``-Delta_h z = v``."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return 0.0
    z = riesz(v, h)
    return float(np.sqrt(max(h * np.dot(v, z), 0.0)))


def poincare_constant(grid: Grid1D) -> float:
    """``M`` with ``dual_norm(v) <= M * ||v||_L2`` for interior fields:
    the inverse square root of the smallest Dirichlet eigenvalue."""
    lam = (4.0 / grid.h**2) * np.sin(np.pi * grid.h / (2.0 * grid.length)) ** 2
    return float(1.0 / np.sqrt(lam))
