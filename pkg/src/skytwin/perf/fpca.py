"""Functional principal component analysis on a common flight-level grid.

Curves are decomposed into a mean plus orthonormal eigenfunctions of the
discrete sample covariance. Scores are plain Euclidean projections of the
centred curves; the inner product is the unweighted dot product on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FunctionalBasis:
    fl_grid: np.ndarray          # ascending FL ticks
    mean_curve: np.ndarray       # (n,)
    eigenfunctions: np.ndarray   # (K, n), orthonormal rows
    eigenvalues: np.ndarray      # (K,) descending, >= 0

    def __post_init__(self):
        object.__setattr__(self, "fl_grid", np.asarray(self.fl_grid, dtype=float))
        object.__setattr__(self, "mean_curve", np.asarray(self.mean_curve, dtype=float))
        object.__setattr__(self, "eigenfunctions", np.asarray(self.eigenfunctions, dtype=float))
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float))
        n = len(self.fl_grid)
        if not np.all(np.diff(self.fl_grid) > 0):
            raise FitError("fl_grid must be strictly ascending")
        if self.mean_curve.shape != (n,):
            raise FitError("mean_curve shape mismatch")
        if self.eigenfunctions.ndim != 2 or self.eigenfunctions.shape[1] != n:
            raise FitError("eigenfunctions shape mismatch")
        k = self.eigenfunctions.shape[0]
        if k < 1 or self.eigenvalues.shape != (k,):
            raise FitError("need K >= 1 eigenpairs")
        gram = self.eigenfunctions @ self.eigenfunctions.T
        if not np.allclose(gram, np.eye(k), atol=1e-8):
            raise FitError("eigenfunctions not orthonormal")
        if np.any(self.eigenvalues < -1e-12) or np.any(np.diff(self.eigenvalues) > 1e-12):
            raise FitError("eigenvalues must be non-negative and descending")

    @property
    def n_components(self) -> int:
        return self.eigenfunctions.shape[0]

    def project(self, curves: np.ndarray) -> np.ndarray:
        """Scores of curves (N, n) or (n,): centred projection on the basis."""
        c = np.atleast_2d(np.asarray(curves, dtype=float)) - self.mean_curve
        return c @ self.eigenfunctions.T

    def reconstruct(self, scores: np.ndarray) -> np.ndarray:
        s = np.atleast_2d(np.asarray(scores, dtype=float))
        out = self.mean_curve + s @ self.eigenfunctions
        return out[0] if np.asarray(scores).ndim == 1 else out


def fit_fpca(fl_grid: np.ndarray, curves: np.ndarray, k_components: int | None = None,
             variance_target: float = 0.95) -> FunctionalBasis:
    """Mean curve plus top-K eigenpairs of the discrete covariance.

    With ``k_components=None`` the smallest K explaining ``variance_target``
    of the covariance trace is kept (always at least 1).
    """
    curves = np.asarray(curves, dtype=float)
    if curves.ndim != 2 or curves.shape[1] != len(fl_grid):
        raise FitError("curves must be (N, len(fl_grid))")
    n_samples = curves.shape[0]
    if n_samples < 2:
        raise FitError("need at least 2 curves")
    mean = curves.mean(axis=0)
    centred = curves - mean
    cov = centred.T @ centred / (n_samples - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order].T   # rows are eigenfunctions

    if k_components is None:
        total = evals.sum()
        if total <= 0.0:
            k_components = 1
        else:
            frac = np.cumsum(evals) / total
            k_components = int(np.searchsorted(frac, variance_target) + 1)
    k_components = max(1, min(int(k_components), len(evals)))

    funcs = evecs[:k_components]
    # deterministic sign: largest-magnitude element of each function positive
    for i in range(k_components):
        j = int(np.argmax(np.abs(funcs[i])))
        if funcs[i, j] < 0:
            funcs[i] = -funcs[i]
    return FunctionalBasis(
        fl_grid=fl_grid,
        mean_curve=mean,
        eigenfunctions=funcs,
        eigenvalues=evals[:k_components],
    )
