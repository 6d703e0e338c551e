"""Numerical null-space counting with an auditable threshold and gap rule.

Singular values below tau = sigma_max * 1e-6 / scale_dim count as zero;
any singular value inside the forbidden band [tau, gap * tau) makes the
count unreliable and raises IllConditionedError.  Rows are normalized to
unit length first (rank-preserving equilibration), so sigma_max is O(1)
and the rule is scale-free.

Two routes:

* dense: scipy svdvals — used for the shift-algebra systems, whose boundary
  row is a tail-window mean (a wide row);
* bidiagonal: the per-mode radial systems are two-point chains plus
  single-entry rows, so their singular values are eigenvalues of the
  interleaved (Golub-Kahan) zero-diagonal tridiagonal matrix; Sturm
  bisection counts them in O(size) per query with absolute accuracy
  eps * sigma_max — no dense factorization at grid sizes in the thousands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal, svdvals

from .report import IllConditionedError

__all__ = ["NullCount", "count_null_dense", "count_null_bidiagonal"]

THRESHOLD_SCALE = 1e-6
GAP_RATIO = 100.0


@dataclass(frozen=True)
class NullCount:
    nullity: int
    sigma_max: float
    threshold: float
    n_below: int
    structural: int  # columns minus rows, when positive


def _check_band(sigmas_in_band: int, threshold: float) -> None:
    if sigmas_in_band:
        raise IllConditionedError(
            f"{sigmas_in_band} singular value(s) inside the forbidden band "
            f"[{threshold:.3e}, {GAP_RATIO * threshold:.3e}); "
            f"increase the truncation")


def count_null_dense(matrix: np.ndarray, scale_dim: int,
                     threshold_scale: float = THRESHOLD_SCALE,
                     gap: float = GAP_RATIO) -> NullCount:
    """Null count of a dense (real or complex) rows x cols matrix."""
    rows, cols = matrix.shape
    norms = np.linalg.norm(matrix, axis=1)
    norms[norms == 0.0] = 1.0
    sigmas = svdvals(matrix / norms[:, None])
    sigma_max = float(sigmas[0]) if len(sigmas) else 0.0
    threshold = sigma_max * threshold_scale / scale_dim
    below = int(np.sum(sigmas < threshold))
    in_band = int(np.sum((sigmas >= threshold) & (sigmas < gap * threshold)))
    _check_band(in_band, threshold)
    structural = max(cols - rows, 0)
    return NullCount(below + structural, sigma_max, threshold, below, structural)


def _interleaved_offdiagonal(diag: np.ndarray, upper: np.ndarray,
                             rows: int, cols: int) -> np.ndarray:
    """Off-diagonal of the Golub-Kahan tridiagonal of an upper-bidiagonal
    rows x cols matrix with entries A[j,j] = diag[j], A[j,j+1] = upper[j]."""
    size = rows + cols
    off = np.zeros(size - 1)
    off[0: 2 * len(diag): 2] = diag
    off[1: 1 + 2 * len(upper): 2] = upper
    return off


def count_null_bidiagonal(diag: np.ndarray, upper: np.ndarray, rows: int,
                          cols: int, scale_dim: int,
                          unknowns: int | None = None,
                          threshold_scale: float = THRESHOLD_SCALE,
                          gap: float = GAP_RATIO) -> NullCount:
    """Null count of an upper-bidiagonal rows x cols matrix (cols in
    {rows, rows+1}) via Sturm counts on the interleaved tridiagonal.

    Eigenvalues of the interleaved matrix come in ±sigma pairs plus
    |rows - cols| structural zeros, so the count of eigenvalues in (-t, t)
    is 2 * #{sigma < t} + |rows - cols|.

    ``unknowns`` is the column count of the system whose null space is
    wanted; pass the original one when the matrix handed in is a transpose
    (singular values agree, the structural nullity does not).
    """
    if cols not in (rows, rows + 1):
        raise ValueError("bidiagonal route expects cols in {rows, rows+1}")
    if len(diag) != min(rows, cols) or len(upper) != min(rows, cols - 1):
        raise ValueError("inconsistent bidiagonal band lengths")
    if unknowns is None:
        unknowns = cols
    scale = np.hypot(diag, np.concatenate([upper, np.zeros(len(diag) - len(upper))]))
    scale[scale == 0.0] = 1.0
    diag = diag / scale
    upper = upper / scale[: len(upper)]

    off = _interleaved_offdiagonal(diag, upper, rows, cols)
    size = rows + cols
    main = np.zeros(size)

    top = eigvalsh_tridiagonal(main, off, select="i",
                               select_range=(size - 1, size - 1))
    sigma_max = float(top[0])
    threshold = sigma_max * threshold_scale / scale_dim

    def _count_within(t: float) -> int:
        vals = eigvalsh_tridiagonal(main, off, select="v",
                                    select_range=(-t, t))
        return len(vals)

    structural = abs(rows - cols)
    n_t = _count_within(threshold)
    n_band = _count_within(gap * threshold)
    _check_band((n_band - n_t) // 2, threshold)
    if (n_t - structural) % 2:
        raise IllConditionedError(
            "eigenvalue count parity violated near the null threshold")
    below = (n_t - structural) // 2
    extra = unknowns - min(rows, cols)
    return NullCount(below + extra, sigma_max, threshold, below, extra)
