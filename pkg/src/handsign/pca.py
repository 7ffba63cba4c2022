"""Eigen-image classifier.

Training centers the flattened binary images, eigen-decomposes their
covariance with a cyclic Jacobi solver, and keeps the top-k principal
axes. Feature vectors are long (4800 at the webcam profile) while the
sample count is small, so when N > n the n x n Gram matrix is
decomposed instead and its eigenvectors mapped back to feature space
(the snapshot method); both routes share eigenvalues exactly.

Classification projects a probe into PC space and ranks labels by the
minimum Euclidean distance to each label's exemplars, converted to
percentages by inverse-distance normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotSymmetric,
    RankDeficient,
    TooFewSamples,
)
from .ranking import MatchEntry, RankedMatches

DISTANCE_EPSILON = 1e-9
_ZERO_EIGENVALUE = 1e-12


def eigen_sym(S, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    1e-12 * ||S|| or `max_sweeps` is hit (NoConvergence). Returns
    eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns, each signed so its first non-negligible
    component is positive.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {S.shape}")
    scale = max(1.0, float(np.abs(S).max()))
    if np.abs(S - S.T).max() > 1e-9 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-9 relative tolerance")

    m = S.shape[0]
    a = (S + S.T) / 2.0
    v = np.eye(m)
    norm = float(np.linalg.norm(a))
    target = 1e-12 * norm

    def off_diagonal(mat):
        return float(np.linalg.norm(mat - np.diag(np.diag(mat))))

    # entries this small cannot lift the off-diagonal norm above target
    skip_tol = target / max(m, 1)
    converged = norm == 0.0 or off_diagonal(a) <= target
    sweeps = 0
    while not converged:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"jacobi sweep cap ({max_sweeps}) reached")
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) <= skip_tol:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < abs(diff) * 1e-36:
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        converged = off_diagonal(a) <= target

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for j in range(m):
        col = vectors[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            vectors[:, j] = -col
    return values, vectors


@dataclass
class TrainingSet:
    """Flattened exemplars (one row per sample) with their gesture labels."""

    vectors: np.ndarray
    labels: list[str]

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise DimensionMismatch("training vectors must form a 2-D array")
        if len(self.labels) != self.vectors.shape[0]:
            raise DimensionMismatch(
                f"{self.vectors.shape[0]} vectors but {len(self.labels)} labels"
            )


@dataclass
class PcaModel:
    """Mean, top-k eigenbasis and projected training exemplars."""

    mean: np.ndarray
    basis: np.ndarray  # (N, k), columns orthonormal, descending eigenvalue
    eigenvalues: np.ndarray  # (k,), non-negative, descending
    projections: np.ndarray  # (n, k)
    labels: list[str]
    dims: tuple[int, int] = field(default=(0, 0))

    @property
    def feature_length(self) -> int:
        return self.mean.shape[0]

    @property
    def component_count(self) -> int:
        return self.basis.shape[1]


def _complete_basis(basis_cols: list[np.ndarray], n_features: int, k: int):
    """Extend an orthonormal column set to k columns with standard-basis
    directions, Gram-Schmidt orthogonalized (two passes for stability)."""
    cols = list(basis_cols)
    j = 0
    while len(cols) < k and j < n_features:
        cand = np.zeros(n_features)
        cand[j] = 1.0
        j += 1
        for _ in range(2):
            for col in cols:
                cand -= (cand @ col) * col
        norm = np.linalg.norm(cand)
        if norm > 1e-6:
            cols.append(cand / norm)
    if len(cols) < k:
        raise RankDeficient("could not complete an orthonormal basis")
    return cols


def train_pca(ts: TrainingSet, k: int | None = None) -> PcaModel:
    """Fit the eigenbasis and project every training vector.

    `k` defaults to min(n, 20). The covariance divisor is n - 1.
    """
    x = ts.vectors
    n, n_features = x.shape
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    if k is None:
        k = min(n, n_features, 20)
    if not 1 <= k <= min(n, n_features):
        raise ValueError(f"k must lie in [1, {min(n, n_features)}], got {k}")

    mean = x.mean(axis=0)
    centered = x - mean

    if n_features > n:
        gram = centered @ centered.T / (n - 1)
        values, vectors = eigen_sym(gram)
        values = np.maximum(values, 0.0)
        if values[0] <= _ZERO_EIGENVALUE:
            raise RankDeficient("all eigenvalues vanish; dataset is constant")
        cols = []
        cutoff = values[0] * _ZERO_EIGENVALUE
        for j in range(min(k, n)):
            if values[j] <= cutoff:
                break
            axis = centered.T @ vectors[:, j]
            cols.append(axis / np.linalg.norm(axis))
        kept = len(cols)
        cols = _complete_basis(cols, n_features, k)
        basis = np.column_stack(cols)
        eigenvalues = np.concatenate([values[:kept], np.zeros(k - kept)])
    else:
        cov = centered.T @ centered / (n - 1)
        values, vectors = eigen_sym(cov)
        values = np.maximum(values, 0.0)
        if values[0] <= _ZERO_EIGENVALUE:
            raise RankDeficient("all eigenvalues vanish; dataset is constant")
        basis = vectors[:, :k]
        eigenvalues = values[:k]

    # sign convention as in eigen_sym, kept stable across both routes
    for j in range(basis.shape[1]):
        col = basis[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            basis[:, j] = -col

    projections = centered @ basis
    return PcaModel(
        mean=mean,
        basis=basis,
        eigenvalues=eigenvalues,
        projections=projections,
        labels=list(ts.labels),
    )


def project(model: PcaModel, v) -> np.ndarray:
    """Coordinates of a feature vector in PC space: basis^T (v - mean)."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != model.mean.shape:
        raise DimensionMismatch(
            f"vector length {v.shape} does not match model feature length "
            f"{model.mean.shape}"
        )
    return model.basis.T @ (v - model.mean)


def classify_pca(model: PcaModel, v) -> RankedMatches:
    """Rank labels by minimum PC-space distance to their exemplars."""
    coords = project(model, v)
    dists = np.linalg.norm(model.projections - coords, axis=1)

    label_order: list[str] = []
    best: dict[str, float] = {}
    for label, d in zip(model.labels, dists):
        if label not in best:
            label_order.append(label)
            best[label] = float(d)
        elif d < best[label]:
            best[label] = float(d)

    inv = {label: 1.0 / (best[label] + DISTANCE_EPSILON) for label in label_order}
    total = sum(inv.values())
    entries = [
        MatchEntry(label, 100.0 * inv[label] / total, best[label])
        for label in label_order
    ]
    entries.sort(key=lambda e: -e.percentage)
    return RankedMatches(tuple(entries))
