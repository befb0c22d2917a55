"""Dense linear-algebra kernel.

Everything downstream (system generation, solvers, bound evaluation) sits on
these few operations: matrix-vector products, norms, direct least-squares and
least-norm oracles, and the smallest singular value. Factorizations are
written out explicitly (Cholesky on the Gram matrix, cyclic Jacobi on A'A)
so the rank and convergence checks behave exactly as documented.
"""

import math

import numpy as np

# Pivot / off-diagonal thresholds, relative to the largest diagonal entry.
CHOLESKY_PIVOT_RTOL = 1e-12
JACOBI_OFFDIAG_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class RankError(ArithmeticError):
    """Matrix does not have the full rank the operation requires."""


class ConvergenceError(ArithmeticError):
    """An iterative kernel failed to converge within its sweep budget."""


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float array and check it is nonempty and finite."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must have at least one row and column, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(v) -> np.ndarray:
    """Coerce to a 1-d float array and check it is finite."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def matvec(A, v) -> np.ndarray:
    A = as_matrix(A)
    v = as_vector(v)
    if v.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: matrix has {A.shape[1]} columns, vector has {v.shape[0]}")
    return A @ v


def dot(u, v) -> float:
    u = as_vector(u)
    v = as_vector(v)
    if u.shape[0] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return float(np.dot(u, v))


def norm2_sq(v) -> float:
    v = as_vector(v)
    return float(np.dot(v, v))


def norm2(v) -> float:
    return math.sqrt(norm2_sq(v))


def norm_inf(v) -> float:
    v = as_vector(v)
    if v.size == 0:
        return 0.0
    return float(np.abs(v).max())


def frobenius_norm_sq(A) -> float:
    """Sum of squared entries, accumulated as compensated sum of row norms.

    The summation order is pinned (per-row squared norm, then fsum over rows)
    so that this equals sum(norm2_sq(row)) exactly; for a row-normalized
    matrix with m rows the result is m up to the normalization tolerance.
    """
    A = as_matrix(A)
    return math.fsum(float(np.dot(row, row)) for row in A)


def _spd_cholesky(G: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    Raises RankError when a pivot falls below CHOLESKY_PIVOT_RTOL times the
    largest diagonal entry of G, which is how rank deficiency of the
    underlying rectangular matrix shows up in its Gram matrix.
    """
    n = G.shape[0]
    pivot_floor = CHOLESKY_PIVOT_RTOL * float(np.diag(G).max())
    L = np.zeros_like(G)
    for j in range(n):
        d = G[j, j] - np.dot(L[j, :j], L[j, :j])
        if d <= pivot_floor:
            raise RankError(f"Gram matrix pivot {d:.3e} below threshold {pivot_floor:.3e} at column {j}")
        L[j, j] = math.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (G[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def _cholesky_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (L L') x = rhs by forward then backward substitution."""
    n = L.shape[0]
    y = np.zeros(n)
    for i in range(n):
        y[i] = (rhs[i] - np.dot(L[i, :i], y[:i])) / L[i, i]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - np.dot(L[i + 1:, i], x[i + 1:])) / L[i, i]
    return x


def least_squares(A, b) -> np.ndarray:
    """Least-squares solution of an overdetermined system via normal equations.

    Solves A'A x = A'b with an explicit Cholesky factorization. Requires
    rows >= cols and full column rank (RankError otherwise).
    """
    A = as_matrix(A)
    b = as_vector(b)
    m, n = A.shape
    if m < n:
        raise ValueError(f"least_squares requires rows >= cols, got {m} x {n}")
    if b.shape[0] != m:
        raise ValueError(f"dimension mismatch: matrix has {m} rows, rhs has {b.shape[0]}")
    G = A.T @ A
    L = _spd_cholesky(G)
    return _cholesky_solve(L, A.T @ b)


def least_norm(A, b) -> np.ndarray:
    """Minimum-Euclidean-norm solution of an underdetermined system.

    Returns x = A'(AA')^{-1} b, which satisfies Ax = b exactly (up to
    conditioning) and is orthogonal to the null space of A. Requires
    rows <= cols and full row rank.
    """
    A = as_matrix(A)
    b = as_vector(b)
    m, n = A.shape
    if m > n:
        raise ValueError(f"least_norm requires rows <= cols, got {m} x {n}")
    if b.shape[0] != m:
        raise ValueError(f"dimension mismatch: matrix has {m} rows, rhs has {b.shape[0]}")
    G = A @ A.T
    L = _spd_cholesky(G)
    return A.T @ _cholesky_solve(L, b)


def min_singular_value(A) -> float:
    """Smallest singular value of a full-column-rank matrix with rows >= cols.

    Diagonalizes A'A by cyclic Jacobi rotations until every off-diagonal
    magnitude drops below JACOBI_OFFDIAG_RTOL times the largest diagonal
    entry, then reports sqrt of the smallest eigenvalue. Raises
    ConvergenceError after JACOBI_MAX_SWEEPS full sweeps.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ValueError(f"min_singular_value requires rows >= cols, got {m} x {n}")
    S = A.T @ A
    if n == 1:
        return math.sqrt(max(float(S[0, 0]), 0.0))
    for _ in range(JACOBI_MAX_SWEEPS):
        diag_max = float(np.abs(np.diag(S)).max())
        tol = JACOBI_OFFDIAG_RTOL * diag_max
        off = S - np.diag(np.diag(S))
        if float(np.abs(off).max()) < tol:
            return math.sqrt(max(float(np.diag(S).min()), 0.0))
        for p in range(n - 1):
            for q in range(p + 1, n):
                spq = S[p, q]
                if abs(spq) < tol:
                    continue
                # Standard symmetric Jacobi rotation annihilating S[p, q].
                theta = (S[q, q] - S[p, p]) / (2.0 * spq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = S[p, :].copy()
                rq = S[q, :].copy()
                S[p, :] = c * rp - s * rq
                S[q, :] = s * rp + c * rq
                cp = S[:, p].copy()
                cq = S[:, q].copy()
                S[:, p] = c * cp - s * cq
                S[:, q] = s * cp + c * cq
                S[p, q] = 0.0
                S[q, p] = 0.0
    raise ConvergenceError(f"Jacobi sweep budget of {JACOBI_MAX_SWEEPS} exhausted")
