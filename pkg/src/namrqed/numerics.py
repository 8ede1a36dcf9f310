"""Dense complex linear algebra with explicit accuracy contracts.

Every matrix in the package is a plain ``numpy`` complex array. The routines
here wrap LAPACK (through numpy/scipy) and add the checks the rest of the
code relies on: pivot-based singularity detection, reconstruction-based
defect detection, and a one-dimensional-kernel guard for stationary states.
All thresholds live in a single :class:`Tolerances` record.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import AmbiguousKernel, DefectiveMatrix, SingularMatrix

__all__ = [
    "TOL",
    "Propagator",
    "Tolerances",
    "allclose",
    "as_matrix",
    "eig",
    "expm_action",
    "inf_norm",
    "null_vector",
    "solve_linear",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    Tests may build a tighter instance and pass it explicitly.
    """

    solve_residual: float = 1e-10
    pivot: float = 1e-12
    eig_residual: float = 1e-8
    # eigenbases with a larger condition number are not used for propagation
    eig_condition: float = 1e8
    kernel: float = 1e-9
    null_residual: float = 1e-10
    hermiticity: float = 1e-10
    trace: float = 1e-10
    positivity: float = 1e-8


TOL = Tolerances()


def as_matrix(a, square: bool = True) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def inf_norm(a) -> float:
    """Vector max-norm or matrix max-row-sum norm."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.linalg.norm(a, ord=np.inf))


def allclose(a, b, atol: float) -> bool:
    """Elementwise equality up to an explicit absolute tolerance."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    return a.size == 0 or float(np.max(np.abs(a - b))) <= atol


def solve_linear(A, b, tol: Tolerances = TOL) -> np.ndarray:
    """Solve ``A x = b`` by pivoted LU.

    ``b`` may be a vector or a matrix of right-hand sides. Raises
    :class:`SingularMatrix` when a pivot falls below ``tol.pivot`` times the
    largest entry of ``A``.
    """
    A = as_matrix(A)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"rhs has {b.shape[0]} rows, matrix has {A.shape[0]}")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        # singularity is reported through SingularMatrix below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if smallest <= tol.pivot * scale:
        raise SingularMatrix(
            f"pivot {smallest:.3e} below {tol.pivot:.0e} x max|A| = {scale:.3e}"
        )
    return sla.lu_solve((lu, piv), b)


def eig(A, tol: Tolerances = TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and right eigenvectors with a diagonalizability check.

    The decomposition is accepted only if ``V diag(w) V^-1`` reproduces
    ``A`` to ``tol.eig_residual * ||A||_inf``; otherwise
    :class:`DefectiveMatrix` is raised.
    """
    A = as_matrix(A)
    w, V = np.linalg.eig(A)
    try:
        Vinv = np.linalg.solve(V, np.eye(A.shape[0], dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise DefectiveMatrix("eigenvector matrix is singular") from exc
    if not np.all(np.isfinite(Vinv)):
        raise DefectiveMatrix("eigenvector matrix is numerically singular")
    recon = (V * w) @ Vinv
    residual = inf_norm(A - recon)
    if residual > tol.eig_residual * inf_norm(A):
        raise DefectiveMatrix(
            f"reconstruction residual {residual:.3e} exceeds "
            f"{tol.eig_residual:.0e} x ||A|| = {inf_norm(A):.3e}"
        )
    return w, V


class Propagator:
    """Evaluate ``exp(A t) v`` for many times from one factorization.

    The eigendecomposition path is used when ``A`` is diagonalizable with a
    well-conditioned eigenbasis. Otherwise each time falls back to
    ``scipy.linalg.expm`` (Pade scaling and squaring).
    """

    def __init__(self, A, tol: Tolerances = TOL):
        self.matrix = as_matrix(A)
        self.tol = tol
        self.eigenvalues = None
        self._V = None
        self._lu = None
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("matrix has non-finite entries")
        try:
            w, V = eig(self.matrix, tol)
        except DefectiveMatrix:
            return
        if np.linalg.cond(V) <= tol.eig_condition:
            self.eigenvalues = w
            self._V = V
            self._lu = sla.lu_factor(V)

    @property
    def uses_eigenbasis(self) -> bool:
        return self._V is not None

    @staticmethod
    def _times(times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise ValueError("times must be finite and non-negative")
        return t

    def apply(self, times, v) -> np.ndarray:
        """Rows of the result are ``exp(A t_i) v``."""
        t = self._times(times)
        v = np.asarray(v, dtype=complex)
        if self.uses_eigenbasis:
            c = sla.lu_solve(self._lu, v)
            out = (np.exp(np.outer(t, self.eigenvalues)) * c) @ self._V.T
        else:
            out = np.array([sla.expm(self.matrix * ti) @ v for ti in t])
        out[t == 0] = v
        return out

    def readout(self, row, v, times) -> np.ndarray:
        """``row . exp(A t_i) v`` for each time, without forming the states."""
        t = self._times(times)
        row = np.asarray(row, dtype=complex)
        if self.uses_eigenbasis:
            c = sla.lu_solve(self._lu, np.asarray(v, dtype=complex))
            weights = (row @ self._V) * c
            return np.exp(np.outer(t, self.eigenvalues)) @ weights
        return self.apply(t, v) @ row


def expm_action(A, t: float, v, tol: Tolerances = TOL) -> np.ndarray:
    """Return ``exp(A t) v``."""
    return Propagator(A, tol).apply([t], v)[0]


def null_vector(A, constraint_row, constraint_value: complex,
                tol: Tolerances = TOL) -> np.ndarray:
    """Solve ``A x = 0`` subject to ``constraint_row . x = constraint_value``.

    The kernel must be one-dimensional: singular values at or below
    ``tol.kernel`` times the largest one are counted, and
    :class:`AmbiguousKernel` is raised unless exactly one is found. The
    constraint replaces the row of ``A`` that carries the largest weight in
    the left null vector, so the remaining rows stay independent.
    """
    A = as_matrix(A)
    c = np.asarray(constraint_row, dtype=complex)
    U, s, _ = np.linalg.svd(A)
    scale = s[0] if s[0] > 0 else 1.0
    kernel_dim = int(np.sum(s <= tol.kernel * scale))
    if kernel_dim != 1:
        raise AmbiguousKernel(f"kernel dimension {kernel_dim} (expected 1)")
    left_null = U[:, -1]
    row = int(np.argmax(np.abs(left_null)))
    M = A.copy()
    M[row] = c
    rhs = np.zeros(A.shape[0], dtype=complex)
    rhs[row] = constraint_value
    return solve_linear(M, rhs, tol)
