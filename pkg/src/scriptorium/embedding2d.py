"""Deterministic 2D neighbor embedding.

Implements the standard manifold-approximation embedding pipeline over
exact Euclidean nearest neighbors: per-point calibrated fuzzy neighbor
graph (smoothed kernel widths found by binary search), fuzzy-union
symmetrization, and stochastic-gradient layout optimization with
negative sampling. Every stochastic step draws from one seeded
generator, so identical inputs produce bitwise-identical coordinates.

Tiny inputs (fewer than 5 points) fall back to a sign-fixed PCA, where a
neighbor graph is degenerate.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import curve_fit

SMOOTH_TOLERANCE = 1e-5
MIN_SCALE = 1e-3
NEGATIVE_SAMPLE_RATE = 5
GRAD_CLIP = 4.0
INIT_EXTENT = 10.0
PCA_FALLBACK_BELOW = 5


def pca_2d(X: np.ndarray) -> np.ndarray:
    """Project rows of X onto their top two principal components.

    The sign of each component is fixed so its largest-magnitude loading
    is positive, making the output deterministic. Inputs with fewer than
    two informative directions are zero-padded.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n == 0:
        return np.zeros((0, 2))
    centered = X - X.mean(axis=0, keepdims=True)
    # SVD of an all-zero matrix is all zeros; identical rows map together.
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:2]
    if comps.shape[0] < 2:
        comps = np.vstack([comps, np.zeros((2 - comps.shape[0], X.shape[1]))])
    for i in range(2):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return centered @ comps.T


def fit_decay_curve(spread: float = 1.0, min_dist: float = 0.1) -> tuple[float, float]:
    """Fit (a, b) of 1 / (1 + a * d^(2b)) to the offset exponential decay
    that is 1 inside min_dist and exp(-(d - min_dist) / spread) beyond."""
    xs = np.linspace(0.0, spread * 3.0, 300)
    ys = np.where(xs < min_dist, 1.0, np.exp(-(xs - min_dist) / spread))
    params, _ = curve_fit(lambda x, a, b: 1.0 / (1.0 + a * x ** (2 * b)), xs, ys)
    return float(params[0]), float(params[1])


def exact_knn(X: np.ndarray, n_neighbors: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices and distances of each row's n_neighbors nearest other rows."""
    sq = np.sum(X**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)
    idx = np.argsort(d2, axis=1, kind="stable")[:, :n_neighbors]
    dists = np.sqrt(np.take_along_axis(d2, idx, axis=1))
    return idx, dists


def calibrate_kernels(knn_dists: np.ndarray, k: int, n_iter: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (sigma, rho): rho is the nearest non-zero neighbor
    distance; sigma solves sum_j exp(-(d_ij - rho_i)/sigma_i) = log2(k)
    by binary search."""
    n = knn_dists.shape[0]
    target = np.log2(k)
    rho = np.zeros(n)
    sigma = np.zeros(n)
    mean_all = float(np.mean(knn_dists)) if knn_dists.size else 0.0
    for i in range(n):
        row = knn_dists[i]
        nonzero = row[row > 0.0]
        if nonzero.size:
            rho[i] = float(nonzero[0])
        lo, hi, mid = 0.0, np.inf, 1.0
        shifted = row - rho[i]
        positive = shifted > 0
        clamped_count = float(np.count_nonzero(~positive))
        for _ in range(n_iter):
            psum = float(np.exp(-shifted[positive] / mid).sum() + clamped_count)
            if abs(psum - target) < SMOOTH_TOLERANCE:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == np.inf else (lo + hi) / 2.0
        sigma[i] = mid
        floor = MIN_SCALE * (float(np.mean(row)) if rho[i] > 0.0 else mean_all)
        if sigma[i] < floor:
            sigma[i] = floor
    return sigma, rho


def fuzzy_neighbor_graph(X: np.ndarray, n_neighbors: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrized fuzzy graph as parallel (heads, tails, weights) arrays.

    Membership of edge i->j is exp(-(d_ij - rho_i)/sigma_i) clamped to 1
    inside rho; the directed memberships are combined with the fuzzy
    union W + W^T - W o W^T.
    """
    n = X.shape[0]
    idx, dists = exact_knn(X, n_neighbors)
    sigma, rho = calibrate_kernels(dists, n_neighbors)
    weights = {}
    for i in range(n):
        for j_pos in range(idx.shape[1]):
            j = int(idx[i, j_pos])
            d = dists[i, j_pos] - rho[i]
            val = 1.0 if d <= 0.0 or sigma[i] == 0.0 else float(np.exp(-d / sigma[i]))
            weights[(i, j)] = val
    sym = {}
    for (i, j), w in weights.items():
        wt = weights.get((j, i), 0.0)
        sym[(i, j)] = w + wt - w * wt
        sym[(j, i)] = sym[(i, j)]
    pairs = sorted(sym)
    heads = np.array([p[0] for p in pairs], dtype=np.int64)
    tails = np.array([p[1] for p in pairs], dtype=np.int64)
    vals = np.array([sym[p] for p in pairs])
    return heads, tails, vals


def optimize_layout(
    embedding: np.ndarray,
    heads: np.ndarray,
    tails: np.ndarray,
    weights: np.ndarray,
    n_epochs: int,
    a: float,
    b: float,
    rng: np.random.Generator,
    gamma: float = 1.0,
    initial_alpha: float = 1.0,
) -> np.ndarray:
    """SGD on the fuzzy cross-entropy layout objective.

    Edges are sampled proportionally to membership strength through an
    epochs-per-sample schedule; each positive update is paired with
    uniformly drawn negative samples repelling the head point. Updates
    within one epoch are applied as a batch scatter-add.
    """
    n_vertices = embedding.shape[0]
    keep = weights >= weights.max() / n_epochs
    heads, tails, weights = heads[keep], tails[keep], weights[keep]
    epochs_per_sample = weights.max() / weights  # in [1, n_epochs]
    epochs_per_negative = epochs_per_sample / NEGATIVE_SAMPLE_RATE
    next_sample = epochs_per_sample.copy()
    next_negative = epochs_per_negative.copy()

    emb = embedding.copy()
    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / n_epochs)
        live = next_sample <= epoch
        if np.any(live):
            h, t = heads[live], tails[live]
            diff = emb[h] - emb[t]
            dsq = np.einsum("ij,ij->i", diff, diff)
            coef = np.zeros_like(dsq)
            pos = dsq > 0.0
            coef[pos] = (-2.0 * a * b * dsq[pos] ** (b - 1.0)) / (a * dsq[pos] ** b + 1.0)
            grad = np.clip(coef[:, None] * diff, -GRAD_CLIP, GRAD_CLIP) * alpha
            np.add.at(emb, h, grad)
            np.add.at(emb, t, -grad)
            next_sample[live] += epochs_per_sample[live]

            n_neg = ((epoch - next_negative[live]) / epochs_per_negative[live]).astype(np.int64)
            np.maximum(n_neg, 0, out=n_neg)
            total = int(n_neg.sum())
            if total:
                rep_h = np.repeat(h, n_neg)
                neg = rng.integers(0, n_vertices, size=total)
                diff_n = emb[rep_h] - emb[neg]
                dsq_n = np.einsum("ij,ij->i", diff_n, diff_n)
                coef_n = 2.0 * gamma * b / ((0.001 + dsq_n) * (a * dsq_n**b + 1.0))
                grad_n = np.clip(coef_n[:, None] * diff_n, -GRAD_CLIP, GRAD_CLIP)
                # coincident distinct points get a fixed kick apart
                coincident = (dsq_n == 0.0) & (rep_h != neg)
                grad_n[coincident] = GRAD_CLIP
                grad_n[(dsq_n == 0.0) & (rep_h == neg)] = 0.0
                np.add.at(emb, rep_h, grad_n * alpha)
            live_idx = np.flatnonzero(live)
            next_negative[live_idx] += n_neg * epochs_per_negative[live_idx]
    return emb


def embed_2d(
    X: np.ndarray,
    seed: int,
    n_neighbors: int = 15,
    min_dist: float = 0.1,
    n_epochs: int = 200,
) -> np.ndarray:
    """Full pipeline: fuzzy graph + seeded SGD layout, with PCA fallback
    below PCA_FALLBACK_BELOW points and (0, 0) for a single point."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n == 0:
        return np.zeros((0, 2))
    if n == 1:
        return np.zeros((1, 2))
    if n < PCA_FALLBACK_BELOW:
        return pca_2d(X)

    n_neighbors = min(n_neighbors, n - 1)
    heads, tails, weights = fuzzy_neighbor_graph(X, n_neighbors)
    a, b = fit_decay_curve(1.0, min_dist)
    rng = np.random.default_rng(seed)

    init = pca_2d(X)
    extent = np.abs(init).max()
    if extent > 0:
        init = init * (INIT_EXTENT / extent)
    init = init + rng.normal(0.0, 1e-4, size=init.shape)
    return optimize_layout(init, heads, tails, weights, n_epochs, a, b, rng)
