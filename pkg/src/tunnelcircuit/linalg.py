"""Gaussian elimination with partial pivoting for small dense systems."""

from __future__ import annotations

import numpy as np

from .errors import SingularSystemError


def solve_dense(matrix, rhs, *, tiny: float = 1e-300) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for a square real or complex system.

    Raises :class:`SingularSystemError` when a pivot falls below ``tiny``
    (relative to the largest entry of its row block).
    """
    a = np.array(matrix)
    b = np.array(rhs)
    dtype = np.result_type(a, b, float)
    a = a.astype(dtype, copy=True)
    b = b.astype(dtype, copy=True)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"expected square system, got {a.shape} and {b.shape}")
    scale = np.max(np.abs(a)) or 1.0
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot, col]) <= tiny * scale:
            raise SingularSystemError(f"zero pivot in column {col} of {n}x{n} system")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for row in range(col + 1, n):
            f = a[row, col] / a[col, col]
            if f != 0:
                a[row, col:] -= f * a[col, col:]
                b[row] -= f * b[col]
    x = np.zeros(n, dtype=a.dtype)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x
