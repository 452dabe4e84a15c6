"""Banded symmetric/triangular helpers shared by the energy form and solvers."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp


def upper_banded(matrix: sp.spmatrix) -> np.ndarray:
    """Symmetric sparse matrix -> LAPACK upper banded storage (ab[u+i-j, j])."""
    m = matrix.tocoo()
    bw = int(np.max(m.col - m.row)) if m.nnz else 0
    n = matrix.shape[0]
    ab = np.zeros((bw + 1, n))
    keep = m.col >= m.row
    ab[bw + m.row[keep] - m.col[keep], m.col[keep]] = m.data[keep]
    return ab


def upper_to_lower_banded(ab: np.ndarray) -> np.ndarray:
    """Transpose upper banded storage into lower banded storage."""
    bw = ab.shape[0] - 1
    n = ab.shape[1]
    lb = np.zeros_like(ab)
    lb[0] = ab[bw]
    for k in range(1, bw + 1):
        lb[k, : n - k] = ab[bw - k, k:]
    return lb


def banded_to_sparse_upper(ab: np.ndarray) -> sp.csr_matrix:
    """Upper banded storage -> sparse upper-triangular matrix."""
    bw = ab.shape[0] - 1
    diags = [ab[bw - k, k:] for k in range(bw + 1)]
    return sp.diags(diags, offsets=list(range(bw + 1)), format="csr")


class BandedCholesky:
    """Cholesky factor R (upper triangular, banded) of an SPD banded matrix,
    with triangular solves for R and R^T."""

    def __init__(self, ab: np.ndarray):
        self.factor_banded = sla.cholesky_banded(ab, lower=False)
        self.bandwidth = ab.shape[0] - 1
        self._lower = upper_to_lower_banded(self.factor_banded)
        self.sparse = banded_to_sparse_upper(self.factor_banded)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.sparse @ x

    def apply_t(self, x: np.ndarray) -> np.ndarray:
        return self.sparse.T @ x

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve R x = b."""
        return sla.solve_banded((0, self.bandwidth), self.factor_banded, b)

    def solve_t(self, b: np.ndarray) -> np.ndarray:
        """Solve R^T x = b."""
        return sla.solve_banded((self.bandwidth, 0), self._lower, b)
