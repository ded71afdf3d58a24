"""Gaussian mixture over FPCA score vectors, fit by EM.

Initialization is seeded k-means++; EM runs to a mean log-likelihood
tolerance of 1e-6 or 500 iterations. A covariance that loses positive
definiteness is regularized once by adding 1e-6 to the diagonal; a second
collapse is an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fpca import FitError

_LOG2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class ScoreGMM:
    weights: np.ndarray       # (m,), simplex
    means: np.ndarray         # (m, d)
    covariances: np.ndarray   # (m, d, d) symmetric PSD

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        mu = np.atleast_2d(np.asarray(self.means, dtype=float))
        cov = np.asarray(self.covariances, dtype=float)
        if cov.ndim == 2:
            cov = cov[None, :, :]
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "covariances", cov)
        m, d = mu.shape
        if w.shape != (m,) or cov.shape != (m, d, d):
            raise FitError("inconsistent GMM shapes")
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
            raise FitError("weights must lie on the simplex")
        for k in range(m):
            if not np.allclose(cov[k], cov[k].T, atol=1e-10):
                raise FitError(f"covariance {k} not symmetric")
            if np.any(np.linalg.eigvalsh(cov[k]) < -1e-10):
                raise FitError(f"covariance {k} not positive semi-definite")

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def mixture_mean(self) -> np.ndarray:
        return self.weights @ self.means

    def mixture_covariance(self) -> np.ndarray:
        """Total covariance: E[cov] + cov of the component means."""
        mu = self.mixture_mean()
        total = np.zeros_like(self.covariances[0])
        for w, m, c in zip(self.weights, self.means, self.covariances):
            dm = (m - mu)[:, None]
            total += w * (c + dm @ dm.T)
        return total

    def sample(self, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        """Draws (n, d); exact point mass when a covariance is all-zero."""
        comp = rng.choice(self.n_components, size=n, p=self.weights)
        out = np.empty((n, self.dim))
        for k in range(self.n_components):
            idx = np.flatnonzero(comp == k)
            if len(idx) == 0:
                continue
            evals, evecs = np.linalg.eigh(self.covariances[k])
            root = evecs * np.sqrt(np.clip(evals, 0.0, None))
            z = rng.standard_normal((len(idx), self.dim))
            out[idx] = self.means[k] + z @ root.T
        return out

    def log_likelihood(self, x: np.ndarray) -> float:
        return float(np.mean(_log_prob(x, self.weights, self.means, self.covariances)))


def _chol_logpdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    chol = np.linalg.cholesky(cov)
    y = np.linalg.solve(chol, (x - mean).T).T
    maha = np.sum(y * y, axis=1)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (d * _LOG2PI + logdet + maha)


def _log_prob(x: np.ndarray, w: np.ndarray, mu: np.ndarray, cov: np.ndarray) -> np.ndarray:
    parts = np.stack([
        np.log(max(wk, 1e-300)) + _chol_logpdf(x, mu[k], cov[k])
        for k, wk in enumerate(w)
    ])
    top = parts.max(axis=0)
    return top + np.log(np.exp(parts - top).sum(axis=0))


def _kmeans_init(x: np.ndarray, m: int, rng: np.random.Generator, iters: int = 25) -> np.ndarray:
    """Seeded k-means++ centres followed by Lloyd refinement."""
    n = len(x)
    centres = [x[rng.integers(n)]]
    for _ in range(1, m):
        d2 = np.min([np.sum((x - c) ** 2, axis=1) for c in centres], axis=0)
        tot = d2.sum()
        if tot <= 0:
            centres.append(x[rng.integers(n)])
            continue
        centres.append(x[rng.choice(n, p=d2 / tot)])
    c = np.array(centres)
    for _ in range(iters):
        assign = np.argmin(((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=2), axis=1)
        new = np.array([
            x[assign == k].mean(axis=0) if np.any(assign == k) else c[k]
            for k in range(m)
        ])
        if np.allclose(new, c):
            break
        c = new
    return c


def fit_gmm(scores: np.ndarray, n_components: int, seed: int,
            max_iter: int = 500, tol: float = 1e-6, reg: float = 1e-6) -> ScoreGMM:
    x = np.atleast_2d(np.asarray(scores, dtype=float))
    n, d = x.shape
    if n < n_components:
        raise FitError(f"{n} samples cannot support {n_components} components")
    rng = np.random.default_rng(seed)

    mu = _kmeans_init(x, n_components, rng)
    w = np.full(n_components, 1.0 / n_components)
    base = np.cov(x.T, ddof=1) if n > 1 else np.zeros((d, d))
    base = np.atleast_2d(base) + reg * np.eye(d)
    cov = np.repeat(base[None, :, :], n_components, axis=0)

    reg_active = False
    prev_ll = -np.inf
    for _ in range(max_iter):
        # E step
        parts = np.stack([
            np.log(max(wk, 1e-300)) + _chol_logpdf(x, mu[k], cov[k])
            for k, wk in enumerate(w)
        ])
        top = parts.max(axis=0)
        lse = top + np.log(np.exp(parts - top).sum(axis=0))
        resp = np.exp(parts - lse)   # (m, n)
        ll = float(lse.mean())

        # M step
        nk = resp.sum(axis=1) + 1e-12
        w = nk / n
        w = w / w.sum()
        mu = (resp @ x) / nk[:, None]
        new_cov = np.empty_like(cov)
        for k in range(n_components):
            dev = x - mu[k]
            ck = (resp[k][:, None] * dev).T @ dev / nk[k]
            new_cov[k] = 0.5 * (ck + ck.T)
            if reg_active:
                new_cov[k] += reg * np.eye(d)
        if not _all_cholesky(new_cov):
            # collapse: turn jitter on permanently, retry this M step once
            if reg_active:
                raise FitError("EM covariance collapse after regularization")
            reg_active = True
            new_cov += reg * np.eye(d)
            if not _all_cholesky(new_cov):
                raise FitError("EM covariance collapse after regularization")
        cov = new_cov

        if abs(ll - prev_ll) < tol:
            break
        prev_ll = ll

    return ScoreGMM(weights=w, means=mu, covariances=cov)


def _all_cholesky(covs: np.ndarray) -> bool:
    try:
        for c in covs:
            np.linalg.cholesky(c)
        return True
    except np.linalg.LinAlgError:
        return False
