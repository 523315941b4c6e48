"""Independent spectral-Galerkin oracle for cross-checking eigenvalues.

The operator is discretized in the L2-orthonormal Legendre polynomial basis,
where the derivative part is exactly diagonal with entries k(k+1); the
potential contributes a dense Gram matrix evaluated by tanh quadrature on a
mesh containing the potential's breakpoints.  Eigenvalues come from an
in-repo cyclic Jacobi rotation solver so the oracle shares nothing with the
transfer/bisection path it checks.
"""

from __future__ import annotations

import math

import numpy as np

from .coeffmesh import build_mesh
from .errors import InvalidParameter
from .sincquad import build_grid


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidParameter("matrix must be square")
    if n == 1:
        return a[0].copy()
    scale = max(float(np.max(np.abs(a))), 1e-300)
    for _ in range(max_sweeps):
        off2 = float(np.sum(np.square(a))) - float(np.sum(np.square(np.diag(a))))
        off = math.sqrt(max(off2, 0.0))
        if off <= tol * scale * n:
            break
        skip = off / (n * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip * 1e-3:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p].copy()
                row_q = a[q].copy()
                a[p] = c * row_p - s * row_q
                a[q] = s * row_p + c * row_q
    return np.sort(np.diag(a))


def galerkin_oracle(q, modes: int, breakpoints=(), K: int = 350, n_mesh: int = 4) -> np.ndarray:
    """Lowest eigenvalues from a dense Galerkin discretization.

    q is any callable potential (a parsed Potential or a piecewise-constant
    coefficient); breakpoints list its singular or discontinuity abscissae so
    quadrature nodes avoid them.
    """
    if modes < 16:
        raise InvalidParameter("modes must be >= 16")
    bps = tuple(breakpoints)
    if not bps and hasattr(q, "breakpoints"):
        bps = tuple(q.breakpoints)
    if not bps and hasattr(q, "mesh"):
        bps = tuple(q.mesh.points[1:-1])
    mesh = build_mesh(n_mesh, bps)
    grid = build_grid(mesh, K)

    x = grid.z.ravel()
    weights = (grid.h * grid.mu).ravel()
    qvals = np.array([q(float(xx)) for xx in x])

    basis = np.empty((modes, x.size))
    p_prev = np.ones_like(x)
    p_cur = x.copy()
    basis[0] = p_prev
    if modes > 1:
        basis[1] = p_cur
    for k in range(1, modes - 1):
        p_prev, p_cur = p_cur, ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
        basis[k + 1] = p_cur
    norm = np.sqrt((2.0 * np.arange(modes) + 1.0) / 2.0)
    basis *= norm[:, None]

    h = basis @ (weights * qvals * basis).T
    h = 0.5 * (h + h.T)
    k_idx = np.arange(modes, dtype=float)
    h[np.diag_indices(modes)] += k_idx * (k_idx + 1.0)
    return jacobi_eigenvalues(h)
