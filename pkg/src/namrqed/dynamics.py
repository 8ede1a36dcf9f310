"""Lindblad generator, time evolution and stationary state.

Density matrices are vectorized by stacking columns (Fortran order), so
``vec(A X B) = (B^T kron A) vec(X)``. Under this convention the generator
of

    d rho/dt = -i[H, rho] + kappa (2 a rho a^dag - a^dag a rho - rho a^dag a)
               + (gamma/2) (2 s- rho s+ - s+ s- rho - rho s+ s-)

is assembled in :func:`build_liouvillian`. Note the resonator term: phonon
number decays at ``2 kappa`` and resonator coherences at ``kappa``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidState
from .hilbert import BasisSpec, LabeledOperator, check_same_basis, ladder_ops, product_op
from .model import EffectiveParams
from .numerics import TOL, Propagator, Tolerances, inf_norm, null_vector

__all__ = [
    "DensityMatrix",
    "Liouvillian",
    "PerturbativeValidityWarning",
    "build_liouvillian",
    "first_order_amplitude",
    "propagate",
    "stationary_residual",
    "steady_state",
    "unvec",
    "vacuum",
    "vec",
]


class PerturbativeValidityWarning(UserWarning):
    """The drive is too strong for first-order results."""


#: first-order stationary |rho_{00,01}| at or above this triggers a warning
WEAK_DRIVE_LIMIT = 0.1


def first_order_amplitude(p: EffectiveParams) -> float | None:
    """``|rho_{00,01}|`` from the stationary linearized coherence pair (``|xi/kappa|`` at ``g = 0``)."""
    a11, a22 = 1j * p.delta_r - p.kappa, 1j * p.delta_a - p.gamma / 2
    det = a11 * a22 + p.g ** 2
    if det == 0:
        return None
    return abs(p.xi * a22 / det)


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: BasisSpec
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"shape {m.shape} does not match basis dimension {self.basis.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def element(self, row: tuple[int, int], col: tuple[int, int]) -> complex:
        return complex(self.matrix[self.basis.index(row), self.basis.index(col)])

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    @property
    def trace_error(self) -> float:
        return abs(complex(np.trace(self.matrix)) - 1.0)

    @property
    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def check(self, tol: Tolerances = TOL) -> "DensityMatrix":
        if self.hermiticity_error > tol.hermiticity:
            raise InvalidState(f"not Hermitian: {self.hermiticity_error:.3e}")
        if self.trace_error > tol.trace:
            raise InvalidState(f"trace deviates from 1 by {self.trace_error:.3e}")
        if self.min_eigenvalue < -tol.positivity:
            raise InvalidState(f"negative eigenvalue {self.min_eigenvalue:.3e}")
        return self

    def expect(self, op: LabeledOperator) -> complex:
        check_same_basis(self, op)
        return complex(np.trace(op.matrix @ self.matrix))


def vacuum(basis: BasisSpec) -> DensityMatrix:
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    m[basis.index((0, 0)), basis.index((0, 0))] = 1.0
    return DensityMatrix(basis, m)


@dataclass(frozen=True, eq=False)
class Liouvillian:
    basis: BasisSpec
    superop: np.ndarray = field(repr=False)
    kappa: float
    gamma: float
    params: EffectiveParams | None = None

    def __post_init__(self):
        m = np.array(self.superop, dtype=complex)
        d2 = self.basis.dim ** 2
        if m.shape != (d2, d2):
            raise ValueError(f"superoperator shape {m.shape}, expected {(d2, d2)}")
        m.setflags(write=False)
        object.__setattr__(self, "superop", m)

    @cached_property
    def propagator(self) -> Propagator:
        return Propagator(self.superop)

    @property
    def trace_row(self) -> np.ndarray:
        return vec(np.eye(self.basis.dim))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """The generator acting on a matrix (not necessarily a state)."""
        return unvec(self.superop @ vec(rho), self.basis.dim)


def build_liouvillian(H: LabeledOperator, p: EffectiveParams) -> Liouvillian:
    basis = H.basis
    ops = ladder_ops(basis)
    check_same_basis(H, *ops)
    eye = np.eye(basis.dim)
    a = ops.a.matrix
    sm = ops.sigma_minus.matrix
    n_res = product_op(basis, "a_dag", "a").matrix
    n_qb = product_op(basis, "sigma_plus", "sigma_minus").matrix
    h = H.matrix

    def dissipator(jump, number):
        # 2 J rho J^dag - J^dag J rho - rho J^dag J
        return 2 * np.kron(jump.conj(), jump) - np.kron(eye, number) - np.kron(number.T, eye)

    superop = (-1j * (np.kron(eye, h) - np.kron(h.T, eye))
               + p.kappa * dissipator(a, n_res)
               + 0.5 * p.gamma * dissipator(sm, n_qb))
    return Liouvillian(basis, superop, p.kappa, p.gamma, params=p)


def propagate(L: Liouvillian, rho0: DensityMatrix, times) -> list[DensityMatrix]:
    """States ``unvec(exp(L t) vec(rho0))`` at each requested time."""
    check_same_basis(L, rho0)
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")
    v0 = vec(rho0.matrix)
    states = L.propagator.apply(times, v0)
    out = []
    for t, v in zip(times, states):
        m = rho0.matrix if t == 0 else unvec(v, L.basis.dim)
        out.append(DensityMatrix(L.basis, m))
    return out


def steady_state(L: Liouvillian, tol: Tolerances = TOL) -> DensityMatrix:
    """Unique stationary state from a trace-constrained kernel solve.

    Raises :class:`~namrqed.errors.AmbiguousKernel` when the stationary
    manifold is not one-dimensional. Emits
    :class:`PerturbativeValidityWarning` when the first-order coherence, or
    ``|<a>|`` if no parameters are attached, reaches 0.1.
    """
    x = null_vector(L.superop, L.trace_row, 1.0, tol)
    m = unvec(x, L.basis.dim)
    m = 0.5 * (m + m.conj().T)
    rho = DensityMatrix(L.basis, m)
    amplitude = None if L.params is None else first_order_amplitude(L.params)
    if amplitude is None:
        amplitude = abs(rho.expect(ladder_ops(L.basis).a))
    if amplitude >= WEAK_DRIVE_LIMIT:
        warnings.warn(
            f"drive amplitude |rho_00,01| ~ {amplitude:.3g} >= {WEAK_DRIVE_LIMIT}: "
            "first-order closed forms are unreliable",
            PerturbativeValidityWarning,
            stacklevel=2,
        )
    return rho


def stationary_residual(L: Liouvillian, rho: DensityMatrix) -> float:
    return inf_norm(L.superop @ vec(rho.matrix))
