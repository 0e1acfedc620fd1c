"""Dense symmetric-definite generalized eigensolver.

``K v = lambda M v`` is reduced to a standard symmetric problem through the
Cholesky factor of ``M`` (``C = L^-1 K L^-T``), solved, and back-transformed
with ``v = L^-T u``.  Two back ends solve the reduced problem: LAPACK's
symmetric tridiagonal QR/RRR routines (default, fast) and a cyclic Jacobi
sweep written here (``method="jacobi"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric, ConvergenceFailure

PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def sym_matrix(a, check: bool = True) -> np.ndarray:
    """Return ``a`` as a dense float symmetric matrix.

    The upper triangle is authoritative: the lower triangle of the result is
    copied from it.  With ``check`` set, a lower triangle that disagrees with
    the upper one by more than ``SYMMETRY_RTOL`` (relative to the largest
    entry) raises ``NotSymmetric``.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if check:
        scale = max(float(np.max(np.abs(a))), 1.0)
        if np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * scale:
            raise NotSymmetric("matrix is not symmetric")
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues, optionally with paired eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class SystemPair:
    """Mass and stiffness of an undamped system ``M x'' + K x = 0``."""

    M: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        M = sym_matrix(self.M)
        K = sym_matrix(self.K)
        if M.shape != K.shape:
            raise DimensionMismatch(f"M is {M.shape} but K is {K.shape}")
        M.setflags(write=False)
        K.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "K", K)

    @property
    def order(self) -> int:
        return self.M.shape[0]


def _cholesky(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization of the mass matrix failed") from exc
    pivots = np.diag(L) ** 2
    tol = PIVOT_RTOL * max(float(np.max(np.abs(np.diag(M)))), np.finfo(float).tiny)
    if n and (not np.all(np.isfinite(pivots)) or np.min(pivots) <= tol):
        raise NotPositiveDefinite("mass matrix has a non-positive Cholesky pivot")
    return L


def is_positive_definite(M) -> bool:
    """True iff every Cholesky pivot of ``M`` exceeds 1e-12 * max|M_ii|."""
    M = sym_matrix(M)
    try:
        _cholesky(M)
    except NotPositiveDefinite:
        return False
    return True


def _check_count(k, n):
    if k is None:
        return n
    k = int(k)
    if not 1 <= k <= n:
        raise DimensionMismatch(f"requested {k} eigenpairs from an order-{n} problem")
    return k


def jacobi_eigh(C: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ``(w, U)`` with ``w`` ascending.  Sweeps stop once the
    off-diagonal Frobenius norm is below ``tol * ||C||_F``.
    """
    A = np.array(C, dtype=float, copy=True)
    n = A.shape[0]
    U = np.eye(n)
    fro = np.linalg.norm(A)
    if n == 1 or fro == 0.0:
        w = np.diag(A).copy()
        order = np.argsort(w, kind="stable")
        return w[order], U[:, order]
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Up = U[:, p].copy()
                U[:, p] = c * Up - s * U[:, q]
                U[:, q] = s * Up + c * U[:, q]
    else:
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off >= tol * fro:
            raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], U[:, order]


def _reduce(M, K, symmetrize=True):
    L = _cholesky(M)
    C, info = lapack.dsygst(K, L, itype=1, lower=1)
    if info != 0:
        raise NotPositiveDefinite(f"dsygst failed with info={info}")
    if symmetrize:
        C = np.tril(C) + np.tril(C, -1).T
    return L, C


def generalized_eig(M, K, k: int | None = None, method: str = "lapack",
                    vectors: bool = True, refine: bool = True) -> Spectrum:
    """The ``k`` algebraically smallest eigenpairs of ``K v = lambda M v``.

    Eigenvectors are M-orthonormal (``v.T @ M @ v == 1``).  With ``refine``
    each eigenvalue is replaced by the Rayleigh quotient of its computed
    vector, which removes most of the ``eps * lambda_max`` absolute error
    that the reduction leaves on near-zero (rigid-body) eigenvalues.  Raises
    ``NotPositiveDefinite`` when ``M`` has no Cholesky factor and
    ``DimensionMismatch`` when the orders differ.
    """
    M = sym_matrix(M)
    K = sym_matrix(K)
    if M.shape != K.shape:
        raise DimensionMismatch(f"M is {M.shape} but K is {K.shape}")
    n = M.shape[0]
    k = _check_count(k, n)
    L, C = _reduce(M, K)
    if method == "lapack":
        if vectors:
            w, U = sla.eigh(C, subset_by_index=[0, k - 1], check_finite=False)
        else:
            w = sla.eigh(C, subset_by_index=[0, k - 1], eigvals_only=True, check_finite=False)
            return Spectrum(w)
    elif method == "jacobi":
        w, U = jacobi_eigh(C)
        w, U = w[:k], U[:, :k]
        if not vectors:
            return Spectrum(w)
    else:
        raise ValueError(f"unknown method {method!r}")
    V = sla.solve_triangular(L.T, U, lower=False, check_finite=False)
    if refine:
        MV = M @ V
        V = V / np.sqrt(np.einsum("ij,ij->j", V, MV))
        w = np.einsum("ij,ij->j", V, K @ V)
        order = np.argsort(w, kind="stable")
        w, V = w[order], V[:, order]
    return Spectrum(w, V)


def generalized_eigvals(M: np.ndarray, K: np.ndarray, k: int) -> np.ndarray:
    """Fast path: smallest ``k`` eigenvalues, no validation, no vectors.

    Used in the optimizer's inner loop.  Only the lower triangles of ``M``
    and ``K`` are read; callers guarantee equal orders.  Still raises
    ``NotPositiveDefinite``.
    """
    _, C = _reduce(M, K, symmetrize=False)
    return sla.eigh(C, subset_by_index=[0, k - 1], eigvals_only=True,
                    check_finite=False, driver="evr")


def standard_eig(K, k: int | None = None, method: str = "lapack") -> Spectrum:
    """The ``k`` smallest eigenpairs of ``K v = lambda v`` (unit 2-norm vectors)."""
    K = sym_matrix(K)
    return generalized_eig(np.eye(K.shape[0]), K, k, method=method)


def residuals(M, K, spectrum: Spectrum) -> np.ndarray:
    """Per-pair ``||K v - lambda M v||_2``."""
    V = spectrum.eigenvectors
    R = np.asarray(K) @ V - (np.asarray(M) @ V) * spectrum.eigenvalues
    return np.linalg.norm(R, axis=0)


def read_matrix(path) -> np.ndarray:
    """Read the plain-text format: first line N, then N rows of N numbers."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DimensionMismatch(f"{path}: empty matrix file")
    try:
        n = int(lines[0].split()[0])
        rows = [[float(t) for t in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise DimensionMismatch(f"{path}: {exc}") from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DimensionMismatch(f"{path}: expected {n} rows of {n} values")
    return np.array(rows, dtype=float)


def write_matrix(path, a) -> None:
    a = np.asarray(a, dtype=float)
    body = "\n".join(" ".join(repr(float(x)) for x in row) for row in a)
    Path(path).write_text(f"{a.shape[0]}\n{body}\n")
