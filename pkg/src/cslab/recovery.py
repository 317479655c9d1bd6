"""Recovery of sparse coefficient vectors from measurements.

Three estimators:

* ``oracle_recover``: least squares restricted to a known support.
* ``cosamp``: greedy support identification with least-squares refit.
* ``bandpass_baseline``: uniform decimation of the Nyquist-rate samples with
  fold-bin readout; a benchmark that preserves coefficient values but, unlike
  the randomized ensembles, cannot tolerate aliases landing on one another.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signal_model import SampleVector, analyze_vector, basis_column, bin_frequency

__all__ = ["RecoveryOutput", "oracle_recover", "cosamp", "bandpass_baseline"]


@dataclass
class RecoveryOutput:
    """Estimated coefficients plus bookkeeping from the recovery run."""

    coeffs_hat: np.ndarray
    support_hat: np.ndarray
    iterations: int = 0
    converged: bool = True
    residual_history: list = field(default_factory=list)


def _lstsq_on_support(columns: np.ndarray, y: np.ndarray) -> np.ndarray:
    sol, _, rank, _ = np.linalg.lstsq(columns, y, rcond=None)
    if rank < columns.shape[1]:
        raise np.linalg.LinAlgError("rank-deficient submatrix")
    return sol


def oracle_recover(ensemble, y: np.ndarray, support) -> RecoveryOutput:
    """Least squares on the given support; zero elsewhere.

    Raises on a rank-deficient column submatrix (the support is then not
    identifiable from these measurements).
    """
    support = np.sort(np.asarray(support, dtype=int))
    y = np.asarray(y, dtype=float)
    if support.size > ensemble.rows:
        raise ValueError("support larger than the number of measurements")
    cols = ensemble.columns(support)
    sol = _lstsq_on_support(cols, y)
    coeffs = np.zeros(ensemble.cols)
    coeffs[support] = sol
    return RecoveryOutput(coeffs_hat=coeffs, support_hat=support)


def cosamp(
    ensemble,
    y: np.ndarray,
    sparsity: int,
    max_iter: int = 50,
    tol: float = 1e-6,
) -> RecoveryOutput:
    """Greedy W-sparse recovery.

    Each iteration: correlate the residual against the columns, merge the 2W
    strongest indices with the current support, least-squares on the merged
    candidate set, prune to the W largest entries, refit on the pruned support
    and recompute the residual.  Halts when the residual norm changes by less
    than ``tol * ||y||`` between iterations or after ``max_iter`` iterations;
    an iteration that would increase the residual is rejected (the previous
    state is kept), so the recorded residual norms never increase.  A failed
    least-squares solve ends the run as non-converged rather than raising.
    """
    W = int(sparsity)
    if W < 1:
        raise ValueError("sparsity must be >= 1")
    y = np.asarray(y, dtype=float)
    B = ensemble.cols
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        return RecoveryOutput(
            coeffs_hat=np.zeros(B),
            support_hat=np.array([], dtype=int),
            iterations=1,
            converged=True,
            residual_history=[0.0],
        )

    support = np.array([], dtype=int)
    coeffs = np.zeros(B)
    residual = y.copy()
    res_norm = y_norm
    history = [res_norm]
    converged = False
    it = 0
    n_strong = min(2 * W, B)
    while it < max_iter:
        it += 1
        proxy = ensemble.apply_transpose(residual)
        strongest = np.argpartition(np.abs(proxy), -n_strong)[-n_strong:]
        candidates = np.union1d(strongest, support)
        try:
            cand_cols = ensemble.columns(candidates)
            cand_sol = np.linalg.lstsq(cand_cols, y, rcond=None)[0]
            keep = np.argsort(np.abs(cand_sol))[-W:]
            new_support = np.sort(candidates[keep])
            new_cols = ensemble.columns(new_support)
            new_sol = _lstsq_on_support(new_cols, y)
        except np.linalg.LinAlgError:
            break
        new_residual = y - new_cols @ new_sol
        new_norm = float(np.linalg.norm(new_residual))
        if new_norm > res_norm:
            # reject the step; a sub-tolerance oscillation still counts as settled
            converged = new_norm - res_norm < tol * y_norm
            break
        support = new_support
        coeffs = np.zeros(B)
        coeffs[support] = new_sol
        improvement = res_norm - new_norm
        residual, res_norm = new_residual, new_norm
        history.append(res_norm)
        if improvement < tol * y_norm:
            converged = True
            break

    return RecoveryOutput(
        coeffs_hat=coeffs,
        support_hat=support,
        iterations=it,
        converged=converged,
        residual_history=history,
    )


def _fold_bin(k: int, ambient_dim: int, n_kept: int, rho: int) -> int | None:
    """Target bin of basis vector k after decimation by rho, in the size-M
    basis; None when the decimated basis vector vanishes identically."""
    M = n_kept
    f, kind = bin_frequency(k, ambient_dim)
    if kind == "dc":
        return 0
    if kind == "nyquist":
        # (-1)^(m*rho): constant when rho is even, alternating otherwise
        return 0 if rho % 2 == 0 else M - 1
    g = f % M
    if kind == "cos":
        if g == 0:
            return 0
        if 2 * g == M:
            return M - 1
        return 2 * g - 1 if 2 * g < M else 2 * (M - g) - 1
    # sine: vanishes when it folds onto a purely even bin
    if g == 0 or 2 * g == M:
        return None
    return 2 * g if 2 * g < M else 2 * (M - g)


def bandpass_baseline(x: SampleVector, rho: int, true_support) -> RecoveryOutput:
    """Decimate the samples by rho and read folded bins for a known support.

    Each support bin k of the full-size basis aliases onto a single bin of the
    size-M basis (M = B/rho); the readout divides by the exact aliasing gain
    (the inner product of the decimated basis vector with the folded basis
    vector), so a noise-free single tone is recovered exactly.  Raises when
    two support bins fold onto the same bin or a bin's decimated basis vector
    vanishes: the components overlap irreversibly and cannot be separated.
    """
    rho = int(rho)
    samples = x.samples
    B = samples.size
    if rho < 1:
        raise ValueError("rho must be >= 1")
    if B % rho != 0:
        raise ValueError("rho must divide the number of samples")
    M = B // rho
    support = np.sort(np.asarray(true_support, dtype=int))

    fold = {}
    for k in support:
        q = _fold_bin(int(k), B, M, rho)
        if q is None:
            raise ValueError(f"support bin {k} aliases to zero under decimation by {rho}")
        if q in fold:
            raise ValueError(
                f"support bins {fold[q]} and {k} alias onto the same bin; decimation is irreversible"
            )
        fold[q] = int(k)

    decimated = samples[::rho]
    folded_coeffs = analyze_vector(decimated)
    coeffs = np.zeros(B)
    for q, k in fold.items():
        gain = float(basis_column(B, k)[::rho] @ basis_column(M, q))
        if abs(gain) < 1e-12:
            raise ValueError(f"support bin {k} aliases to zero under decimation by {rho}")
        coeffs[k] = folded_coeffs[q] / gain
    return RecoveryOutput(coeffs_hat=coeffs, support_hat=support)
