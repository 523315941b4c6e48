"""Tanh-rule definite integration and Stenger indefinite integration.

Nodes on each mesh interval (a, b) are z_j = (a + b*e^{jh})/(1 + e^{jh}) with
weights mu_j = (b - a)/(e^{-jh/2} + e^{jh/2})^2 and step h = sqrt(2*pi/K);
the composite rule over [-1, 1] is h * sum f(z_{i,j}) mu_{i,j}.

In double precision the outermost nodes of a fine grid round onto the mesh
points, so the grid also stores the exact endpoint offsets
z - x_{i-1} = w_i * sigma_j and x_i - z = w_i * sigma_{-j}; evaluations near
singular endpoints must be driven by these offsets, not by z itself.  Stored
z values are clamped one ulp inside the open interval.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from . import specfun
from .coeffmesh import Mesh
from .errors import DimensionMismatch, InvalidParameter


class SincGrid:
    """Per-interval tanh-rule nodes, weights and the delta coefficient table.

    Immutable after construction; arrays are laid out (N, 2K + 1) in
    interval-major order.
    """

    def __init__(self, mesh: Mesh, K: int, h: float | None = None):
        if K < 8:
            raise InvalidParameter("K must be >= 8")
        self.mesh = mesh
        self.K = K
        self.h = math.sqrt(2.0 * math.pi / K) if h is None else float(h)

        j = np.arange(-K, K + 1, dtype=float)
        e_abs = np.exp(-np.abs(j) * self.h)
        sigma = np.where(j >= 0, 1.0 / (1.0 + e_abs), e_abs / (1.0 + e_abs))
        sigma_neg = sigma[::-1].copy()  # sigma_{-j}, exact by symmetry
        shape_w = sigma * sigma_neg     # 1/(e^{-jh/2} + e^{jh/2})^2

        pts = np.asarray(mesh.points)
        widths = pts[1:] - pts[:-1]
        self.lo_offset = widths[:, None] * sigma[None, :]
        self.hi_offset = widths[:, None] * sigma_neg[None, :]
        self.mu = widths[:, None] * shape_w[None, :]

        z = pts[:-1, None] + self.lo_offset
        z[:, K] = 0.5 * (pts[:-1] + pts[1:])
        lo_open = np.nextafter(pts[:-1], np.inf)
        hi_open = np.nextafter(pts[1:], -np.inf)
        self.z = np.clip(z, lo_open[:, None], hi_open[:, None])

        # endpoint parameters (1 - z)/2 and (1 + z)/2, offset-accurate at +-1
        t_up = 0.5 * (1.0 - self.z)
        t_lo = 0.5 * (1.0 + self.z)
        if pts[-1] == 1.0:
            t_up[-1, :] = 0.5 * self.hi_offset[-1, :]
        if pts[0] == -1.0:
            t_lo[0, :] = 0.5 * self.lo_offset[0, :]
        self.t_upper = t_up
        self.t_lower = t_lo
        self.one_minus_sq = 4.0 * t_up * t_lo  # 1 - z^2

        self.delta = specfun.delta_table(K)

        for arr in (self.lo_offset, self.hi_offset, self.mu, self.z,
                    self.t_upper, self.t_lower, self.one_minus_sq, self.delta):
            arr.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.mesh.n_intervals, 2 * self.K + 1)

    @cached_property
    def _delta_matrix(self) -> np.ndarray:
        idx = np.arange(2 * self.K + 1)
        m = self.delta[idx[:, None] - idx[None, :] + 2 * self.K]
        m.setflags(write=False)
        return m

    def check_samples(self, samples: np.ndarray) -> np.ndarray:
        samples = np.asarray(samples, dtype=float)
        if samples.shape != self.shape:
            raise DimensionMismatch(
                f"samples shaped {samples.shape}, grid is {self.shape}"
            )
        return samples


def build_grid(mesh: Mesh, K: int, h: float | None = None) -> SincGrid:
    """Tanh-rule grid over the mesh with 2K + 1 nodes per interval."""
    return SincGrid(mesh, K, h)


def integrate(grid: SincGrid, samples: np.ndarray) -> float:
    """Composite tanh rule over [-1, 1]: h * sum f(z_{i,j}) * mu_{i,j}."""
    samples = grid.check_samples(samples)
    return grid.h * float(np.sum(samples * grid.mu))


def inner_product(grid: SincGrid, f: np.ndarray, g: np.ndarray) -> float:
    """Tanh-rule approximation of the L2 inner product of two sample sets."""
    return integrate(grid, np.asarray(f) * np.asarray(g))


def norm_l2(grid: SincGrid, f: np.ndarray) -> float:
    """Tanh-rule L2 norm of a sample set."""
    return math.sqrt(max(integrate(grid, np.asarray(f) ** 2), 0.0))


def indefinite_integrate(grid: SincGrid, interval: int, samples: np.ndarray) -> np.ndarray:
    """Stenger running integrals over one interval.

    Returns I_k ~ integral of f from x_{i-1} to z_{i,k}, k = -K..K, computed
    as h * sum_l delta_{k-l} f(z_{i,l}) mu_{i,l}.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (2 * grid.K + 1,):
        raise DimensionMismatch(
            f"samples shaped {samples.shape}, expected {(2 * grid.K + 1,)}"
        )
    return grid.h * (grid._delta_matrix @ (samples * grid.mu[interval]))


def indefinite_integrate_all(grid: SincGrid, samples: np.ndarray) -> np.ndarray:
    """Stenger running integrals accumulated across all intervals.

    The carry entering interval i+1 is the last running value of interval i.
    """
    samples = grid.check_samples(samples)
    out = np.empty_like(samples)
    carry = 0.0
    for i in range(grid.mesh.n_intervals):
        row = indefinite_integrate(grid, i, samples[i]) + carry
        out[i] = row
        carry = row[-1]
    return out
