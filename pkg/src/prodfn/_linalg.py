"""SVD-based least squares used by every regression in the package."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import InsufficientObservations, RankDeficient

RCOND = 1e-10


class LstsqResult(NamedTuple):
    beta: np.ndarray
    resid: np.ndarray
    ssr: float
    xtx_inv: np.ndarray


def lstsq(
    X: np.ndarray,
    y: np.ndarray,
    names: Sequence[str] | None = None,
    rcond: float = RCOND,
    need_df: bool = True,
) -> LstsqResult:
    """Least squares through a thin SVD.

    Columns are scaled to unit length first; singular values of the scaled
    matrix below ``rcond * s_max`` are treated as exact zeros and raise
    :class:`RankDeficient` naming the columns that load on the null space.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n < k or (need_df and n <= k):
        raise InsufficientObservations(f"{n} observations for {k} regressors")
    norms = np.sqrt(np.einsum("ij,ij->j", X, X))
    if np.any(norms == 0.0):
        zero = np.flatnonzero(norms == 0.0)
        raise RankDeficient([names[j] for j in zero] if names is not None else [str(j) for j in zero])
    u, s, vt = np.linalg.svd(X / norms, full_matrices=False)
    small = s < rcond * s[0]
    if small.any():
        null = vt[small]
        involved = np.flatnonzero(np.abs(null).max(axis=0) > 1e-6)
        cols = [names[j] for j in involved] if names is not None else [str(j) for j in involved]
        raise RankDeficient(cols)
    beta = (vt.T @ ((u.T @ y) / s)) / norms
    resid = y - X @ beta
    v = vt.T / norms[:, None]
    xtx_inv = (v / s**2) @ v.T
    return LstsqResult(beta, resid, float(resid @ resid), xtx_inv)
