"""Cyclic Jacobi eigensolver and the normalized spectrum of a regular multigraph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalError, NoConvergence, NotSymmetric
from .graphs import RegularMultigraph

DEFAULT_TOL = 1e-11
DEFAULT_MAX_SWEEPS = 100


@dataclass
class JacobiResult:
    eigenvalues: np.ndarray  # ascending
    vectors: np.ndarray  # columns, matching eigenvalues
    sweeps: int
    traces: list[float] = field(default_factory=list)  # trace after each sweep


def jacobi(m, tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS) -> JacobiResult:
    """Diagonalise a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit the strict upper triangle row by row and stop once every
    off-diagonal entry is below ``tol`` in magnitude.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric("matrix must be square")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
        raise NotSymmetric("matrix is not symmetric within 1e-12")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    traces = []
    off = np.abs(a - np.diag(np.diag(a)))
    sweeps = 0
    while off.max(initial=0.0) >= tol:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"no convergence after {max_sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweeps += 1
        traces.append(float(np.trace(a)))
        off = np.abs(a - np.diag(np.diag(a)))
    vals = np.diag(a)
    order = np.argsort(vals, kind="stable")
    return JacobiResult(vals[order], v[:, order], sweeps, traces)


def symmetric_eigenvalues(m, tol: float = DEFAULT_TOL) -> list[float]:
    """Eigenvalues of a symmetric matrix in ascending order."""
    return jacobi(m, tol).eigenvalues.tolist()


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple[float, ...]  # descending
    mu2: float
    mun: float
    upper_gap: float
    lower_gap: float
    residual: float
    sweeps: int = 0


def inverse_iteration(m: np.ndarray, shift: float, iters: int = 4, seed: int = 0) -> np.ndarray:
    n = m.shape[0]
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    shifted = m - shift * np.eye(n)
    for _ in range(iters):
        try:
            y = np.linalg.solve(shifted, x)
        except np.linalg.LinAlgError:
            y = np.linalg.lstsq(shifted, x, rcond=None)[0]
        norm = np.linalg.norm(y)
        if not np.isfinite(norm) or norm == 0:
            break
        x = y / norm
    return x


def normalized_spectrum(gr: RegularMultigraph, tol: float = DEFAULT_TOL) -> SpectrumReport:
    m = gr.adj / gr.d
    res = jacobi(m, tol)
    desc = res.eigenvalues[::-1]
    n = gr.n
    if abs(desc[0] - 1.0) > 1e-9:
        raise InternalError(f"top eigenvalue {desc[0]!r} is not 1")
    if desc.max() > 1 + 1e-9 or desc.min() < -1 - 1e-9:
        raise InternalError("eigenvalue outside [-1, 1]")
    if abs(desc.sum() - np.trace(gr.adj) / gr.d) > 1e-8:
        raise InternalError("eigenvalue sum differs from trace / d")
    residual = 0.0
    for lam in {float(desc[0]), float(desc[1]), float(desc[-1])}:
        x = inverse_iteration(m, lam + 1e-10)
        residual = max(residual, float(np.max(np.abs(m @ x - lam * x))))
    mu2 = float(desc[1]) if n > 1 else float(desc[0])
    mun = float(desc[-1])
    return SpectrumReport(tuple(float(x) for x in desc), mu2, mun, 1.0 - mu2, 1.0 + mun, residual, res.sweeps)
