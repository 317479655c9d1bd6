"""Randomized measurement ensembles and empirical isometry diagnostics.

Three families are provided:

* ``gaussian`` / ``rademacher``: dense M x B matrices with i.i.d. entries of
  variance 1/M (unit-norm columns in expectation).
* ``subsampled_dct``: a random row subset of an orthonormal DCT applied after
  a random sign flip, scaled so rows have norm sqrt(rho).  Rows are exactly
  orthogonal by construction and the operator applies in O(B log B), which is
  what makes desk-scale Monte Carlo sweeps affordable.

``orthogonalize_rows`` turns any full-row-rank ensemble into one with
``R @ R.T == rho * I`` on the same row space (reduced SVD, keep the right
factor, rescale rows to norm sqrt(rho)).
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy.fft import dct, idct

__all__ = [
    "MeasurementEnsemble",
    "generate_ensemble",
    "generate_subsampled_dct_ensemble",
    "orthogonalize_rows",
    "measure",
    "estimate_rip_constant",
]

# singular values below RANK_TOL * s_max are treated as zero for rank decisions
RANK_TOL = 1e-10

EXHAUSTIVE_SUPPORT_LIMIT = 10**6


class MeasurementEnsemble:
    """An M x B measurement operator with metadata.

    For the dense families the matrix is stored directly.  For
    ``subsampled_dct`` the operator is held implicitly (signs + selected rows)
    and ``.matrix`` materializes it on demand, so small-scale tests can treat
    every ensemble uniformly while sweeps never pay the O(M*B) storage cost.
    """

    def __init__(
        self,
        rows: int,
        cols: int,
        distribution: str,
        row_orthogonalized: bool = False,
        matrix: np.ndarray | None = None,
        signs: np.ndarray | None = None,
        selected_rows: np.ndarray | None = None,
        row_norm_target: float | None = None,
    ):
        if rows < 1 or cols < 1:
            raise ValueError("rows and cols must be positive")
        if rows > cols:
            raise ValueError("rows cannot exceed cols (need rho = B/M >= 1)")
        self.rows = int(rows)
        self.cols = int(cols)
        self.distribution = distribution
        self.row_orthogonalized = bool(row_orthogonalized)
        self.row_norm_target = row_norm_target
        self._matrix = matrix
        self._signs = signs
        self._selected = selected_rows

    @property
    def subsampling(self) -> float:
        """rho = B / M."""
        return self.cols / self.rows

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self.columns(np.arange(self.cols))
        return self._matrix

    def apply(self, v: np.ndarray) -> np.ndarray:
        """R @ v."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.cols:
            raise ValueError("dimension mismatch")
        if self._matrix is not None:
            return self._matrix @ v
        scale = np.sqrt(self.subsampling)
        t = dct(self._signs * v, norm="ortho")
        return scale * t[self._selected]

    def apply_transpose(self, r: np.ndarray) -> np.ndarray:
        """R.T @ r."""
        r = np.asarray(r, dtype=float)
        if r.shape[0] != self.rows:
            raise ValueError("dimension mismatch")
        if self._matrix is not None:
            return self._matrix.T @ r
        scale = np.sqrt(self.subsampling)
        t = np.zeros(self.cols)
        t[self._selected] = r
        return scale * self._signs * idct(t, norm="ortho")

    def columns(self, indices) -> np.ndarray:
        """Extract R[:, indices] as a dense M x len(indices) block."""
        idx = np.atleast_1d(np.asarray(indices, dtype=int))
        if self._matrix is not None:
            return self._matrix[:, idx]
        # orthonormal DCT-II entries: T[0, j] = 1/sqrt(B),
        # T[q, j] = sqrt(2/B) * cos(pi * q * (2j + 1) / (2B)) for q >= 1
        B = self.cols
        q = self._selected[:, None].astype(float)
        j = idx[None, :].astype(float)
        block = np.sqrt(2.0 / B) * np.cos(np.pi * q * (2.0 * j + 1.0) / (2.0 * B))
        block[self._selected == 0, :] = 1.0 / np.sqrt(B)
        return np.sqrt(self.subsampling) * self._signs[idx][None, :] * block


def generate_ensemble(
    n_measurements: int,
    ambient_dim: int,
    distribution: str = "gaussian",
    rng_seed=0,
) -> MeasurementEnsemble:
    """Draw an M x B ensemble with i.i.d. entries of variance 1/M.

    ``distribution`` is ``"gaussian"`` or ``"rademacher"`` (entries
    +-1/sqrt(M) equiprobable).  Deterministic given the seed.
    """
    M, B = int(n_measurements), int(ambient_dim)
    if M > B:
        raise ValueError("n_measurements cannot exceed ambient_dim")
    rng = np.random.default_rng(rng_seed)
    if distribution == "gaussian":
        mat = rng.standard_normal((M, B)) / np.sqrt(M)
    elif distribution == "rademacher":
        mat = (2.0 * rng.integers(0, 2, size=(M, B)) - 1.0) / np.sqrt(M)
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    return MeasurementEnsemble(M, B, distribution, matrix=mat)


def generate_subsampled_dct_ensemble(
    n_measurements: int,
    ambient_dim: int,
    rng_seed=0,
) -> MeasurementEnsemble:
    """Sign-randomized row-subsampled orthonormal DCT, rows of norm sqrt(rho).

    Satisfies ``R @ R.T == rho * I`` exactly (rows of an orthonormal matrix
    stay orthonormal under column sign flips), so the white-noise statistics
    of orthogonalized dense ensembles carry over without an SVD.
    """
    M, B = int(n_measurements), int(ambient_dim)
    if M > B:
        raise ValueError("n_measurements cannot exceed ambient_dim")
    rng = np.random.default_rng(rng_seed)
    signs = 2.0 * rng.integers(0, 2, size=B) - 1.0
    selected = np.sort(rng.choice(B, size=M, replace=False))
    return MeasurementEnsemble(
        M,
        B,
        "subsampled_dct",
        row_orthogonalized=True,
        signs=signs,
        selected_rows=selected,
        row_norm_target=float(np.sqrt(B / M)),
    )


def orthogonalize_rows(ensemble: MeasurementEnsemble) -> MeasurementEnsemble:
    """Replace an ensemble by one with orthogonal rows of norm sqrt(rho).

    Computes the reduced SVD R = U S V^T and returns sqrt(rho) * V^T, which
    has the same row space as R.  Raises on rank-deficient input.
    """
    R = ensemble.matrix
    _, s, vt = np.linalg.svd(R, full_matrices=False)
    if s[-1] <= RANK_TOL * s[0]:
        raise ValueError("ensemble is rank deficient; cannot orthogonalize rows")
    scale = np.sqrt(ensemble.subsampling)
    return MeasurementEnsemble(
        ensemble.rows,
        ensemble.cols,
        ensemble.distribution,
        row_orthogonalized=True,
        matrix=scale * vt,
        row_norm_target=float(scale),
    )


def measure(
    ensemble: MeasurementEnsemble,
    coeff_vector: np.ndarray,
    measurement_noise_var: float = 0.0,
    rng_seed=0,
) -> np.ndarray:
    """y = R @ coeff_vector + e with e i.i.d. Gaussian of the given variance."""
    if measurement_noise_var < 0:
        raise ValueError("measurement_noise_var must be nonnegative")
    y = ensemble.apply(coeff_vector)
    if measurement_noise_var > 0:
        rng = np.random.default_rng(rng_seed)
        y = y + np.sqrt(measurement_noise_var) * rng.standard_normal(ensemble.rows)
    return y


def _support_deviation(ensemble: MeasurementEnsemble, support) -> float:
    s = np.linalg.svd(ensemble.columns(support), compute_uv=False)
    return max(s[0] ** 2 - 1.0, 1.0 - s[-1] ** 2)


def estimate_rip_constant(
    ensemble: MeasurementEnsemble,
    sparsity: int,
    mode: str = "sampled",
    n_supports: int = 200,
    rng_seed=0,
) -> float:
    """Empirical restricted-isometry constant of order ``sparsity``.

    For each visited support L the deviation is
    ``max(s_max(R_L)^2 - 1, 1 - s_min(R_L)^2)``; the estimate is the max over
    visited supports.  ``mode="exhaustive"`` visits every support (exact
    constant, allowed only while C(B, W) <= 10^6); ``mode="sampled"`` visits
    ``n_supports`` uniform random supports and therefore yields a lower bound.
    """
    W = int(sparsity)
    if W < 1:
        raise ValueError("sparsity must be >= 1")
    if W > ensemble.rows:
        raise ValueError("sparsity cannot exceed the number of measurements")
    B = ensemble.cols
    if mode == "exhaustive":
        if math.comb(B, W) > EXHAUSTIVE_SUPPORT_LIMIT:
            raise ValueError("too many supports for exhaustive enumeration")
        supports = combinations(range(B), W)
    elif mode == "sampled":
        rng = np.random.default_rng(rng_seed)
        supports = (rng.choice(B, size=W, replace=False) for _ in range(int(n_supports)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(max(_support_deviation(ensemble, list(sup)) for sup in supports))
