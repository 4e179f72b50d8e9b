"""Sparse-matrix utilities, direct solves, and restarted GMRES.

CSR storage and the LU factorization are delegated to scipy/SuperLU;
the GMRES driver is written out explicitly because the solver layer
needs right preconditioning with a true-residual history and access to
the best iterate on non-convergence, which the library routines do not
expose.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from nozzlebench.errors import (
    InvalidParameterError,
    NonConvergenceError,
    SingularMatrixError,
)


def csr_from_triplets(shape, triplets):
    """CSR matrix from (row, col, value) triplets; duplicates are summed."""
    if triplets:
        rows, cols, vals = zip(*triplets)
    else:
        rows, cols, vals = (), (), ()
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if len(rows) and (
        rows.min() < 0 or rows.max() >= shape[0] or cols.min() < 0 or cols.max() >= shape[1]
    ):
        raise InvalidParameterError("triplet index out of range")
    m = sp.coo_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=shape)
    m = m.tocsr()
    m.sum_duplicates()
    m.sort_indices()
    return m


def sparse_lu(a):
    """LU factorization handle; raises SingularMatrixError on failure.

    The returned object is immutable and safe for concurrent solves.
    """
    a = sp.csc_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise InvalidParameterError("matrix must be square")
    try:
        lu = spla.splu(a)
    except RuntimeError as exc:
        raise SingularMatrixError(f"sparse LU failed: {exc}")
    # SuperLU can return a factorization with exact-zero pivots for
    # structurally singular inputs; reject those explicitly.
    diag = lu.U.diagonal()
    scale = max(np.abs(a).max(), 1.0) if a.nnz else 1.0
    if np.any(np.abs(diag) <= 1e-14 * scale):
        raise SingularMatrixError("pivot below 1e-14 of matrix scale")
    return lu


def sparse_lu_solve(a, b):
    """Direct solve Ax = b with partial pivoting."""
    return sparse_lu(a).solve(np.asarray(b, dtype=float))


def _as_matvec(op):
    if callable(op) and not hasattr(op, "dot"):
        return op
    if sp.issparse(op) or isinstance(op, np.ndarray):
        return lambda x: op @ x
    if isinstance(op, spla.LinearOperator):
        return op.matvec
    raise InvalidParameterError(f"unsupported operator type {type(op)!r}")


def gmres(op, b, precond=None, tol=1e-8, restart=200, maxiter=1000, x0=None):
    """Right-preconditioned restarted GMRES.

    ``precond`` is the action of the (approximate) inverse, applied on
    the right, so residuals are in the true norm of the original
    system.  Returns (x, iterations, residual_history) where the
    history holds one norm per Krylov step, monotone within each
    restart cycle.  Raises NonConvergenceError past ``maxiter`` total
    steps, carrying the best iterate and the history.
    """
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    if restart < 1:
        raise InvalidParameterError("restart must be >= 1")
    matvec = _as_matvec(op)
    psolve = _as_matvec(precond) if precond is not None else (lambda x: x)

    b = np.asarray(b, dtype=float)
    n = len(b)
    bnorm = np.linalg.norm(b)
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    if bnorm == 0.0:
        return np.zeros(n), 0, [0.0]

    history = []
    total = 0
    while True:
        r = b - matvec(x)
        beta = np.linalg.norm(r)
        if not history:
            history.append(beta)
        if beta <= tol * bnorm:
            return x, total, history

        m = restart
        V = np.zeros((n, m + 1))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        gamma = np.zeros(m + 1)
        V[:, 0] = r / beta
        gamma[0] = beta

        j = 0
        while j < m and total < maxiter:
            w = matvec(psolve(V[:, j]))
            for i in range(j + 1):
                H[i, j] = w @ V[:, i]
                w -= H[i, j] * V[:, i]
            H[j + 1, j] = np.linalg.norm(w)
            if H[j + 1, j] > 0:
                V[:, j + 1] = w / H[j + 1, j]
            for i in range(j):  # apply stored Givens rotations
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            if denom == 0.0:
                cs[j], sn[j] = 1.0, 0.0
            else:
                cs[j], sn[j] = H[j, j] / denom, H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            gamma[j + 1] = -sn[j] * gamma[j]
            gamma[j] *= cs[j]
            total += 1
            j += 1
            history.append(abs(gamma[j]))
            if abs(gamma[j]) <= tol * bnorm:
                break

        if j > 0:
            y = np.linalg.solve(H[:j, :j], gamma[:j])
            x = x + psolve(V[:, :j] @ y)
        r = b - matvec(x)
        beta = np.linalg.norm(r)
        if beta <= tol * bnorm:
            return x, total, history
        if total >= maxiter:
            raise NonConvergenceError(
                f"GMRES did not reach tol {tol} in {maxiter} iterations "
                f"(relative residual {beta / bnorm:.3e})",
                best=x,
                history=history,
            )


def dump_matrix_market(a, path):
    """Matrix Market coordinate dump for external cross-checks."""
    from scipy.io import mmwrite

    mmwrite(str(path), sp.coo_matrix(a))
