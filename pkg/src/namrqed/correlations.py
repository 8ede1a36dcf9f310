"""Two-time correlators from the quantum regression theorem.

For a stationary state ``rho`` the correlator with ``left`` at time 0 and
``right`` at delay ``tau`` is

    <left(0) right(tau)> = Tr{ right . exp(L tau)[rho . left] } .

On the ``N = 1`` total-excitation basis the four EMF constituents reduce
to single matrix elements of the evolved seed: ``<a^dag(0) a(tau)>`` is
element ``(01, 00)`` of the evolution of ``rho a^dag``, ``<a(0) a^dag(tau)>``
is element ``(00, 01)`` of the evolution of ``rho a``, and likewise
``(01, 00)`` / ``(00, 01)`` for ``<a a>`` / ``<a^dag a^dag>``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DensityMatrix, Liouvillian, vec
from .hilbert import BasisSpec, LabeledOperator, check_same_basis, ladder_ops
from .model import EffectiveParams

__all__ = [
    "CorrelationKind",
    "CorrelationTrace",
    "default_tau_grid",
    "emf_components",
    "emf_correlation",
    "qrt_correlator",
]


class CorrelationKind(str, enum.Enum):
    ADAG_A = "adag_a"        # <a^dag(0) a(tau)>
    A_ADAG = "a_adag"        # <a(0) a^dag(tau)>
    A_A = "a_a"              # <a(0) a(tau)>
    ADAG_ADAG = "adag_adag"  # <a^dag(0) a^dag(tau)>
    EMF_COMBINED = "emf"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class CorrelationTrace:
    """Samples of a correlator on a delay grid.

    ``stationary_value`` is the ``tau -> infinity`` limit
    ``<left><right>``; spectra are taken of ``values - stationary_value`` so
    the elastic delta line at zero frequency is left out.
    """

    taus: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    kind: CorrelationKind = CorrelationKind.CUSTOM
    stationary_value: complex = 0j

    def __post_init__(self):
        taus = np.array(self.taus, dtype=float)
        values = np.array(self.values, dtype=complex)
        if taus.ndim != 1 or taus.shape != values.shape:
            raise ValueError("taus and values must be 1-D arrays of equal length")
        if np.any(np.diff(taus) <= 0):
            raise ValueError("taus must be strictly ascending")
        taus.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", CorrelationKind(self.kind))

    @property
    def connected(self) -> np.ndarray:
        return self.values - self.stationary_value

    def __add__(self, other: "CorrelationTrace") -> "CorrelationTrace":
        if not np.array_equal(self.taus, other.taus):
            raise ValueError("traces sampled on different grids")
        return CorrelationTrace(self.taus, self.values + other.values, CorrelationKind.CUSTOM,
                                self.stationary_value + other.stationary_value)

    def scaled(self, factor: complex, kind=None) -> "CorrelationTrace":
        return CorrelationTrace(self.taus, factor * self.values, kind or self.kind,
                                factor * self.stationary_value)


def default_tau_grid(slowest_rate: float, samples: int = 4096, span: float = 14.0) -> np.ndarray:
    """Uniform grid on ``[0, span / slowest_rate]``; ``exp(-14) < 1e-6``."""
    if not slowest_rate > 0:
        raise ValueError("slowest decay rate must be positive")
    return np.linspace(0.0, span / slowest_rate, samples)


def qrt_correlator(L: Liouvillian, rho_ss: DensityMatrix, left: LabeledOperator,
                   right: LabeledOperator, taus,
                   kind: CorrelationKind = CorrelationKind.CUSTOM) -> CorrelationTrace:
    """``<left(0) right(tau)>`` for the stationary state ``rho_ss``."""
    check_same_basis(L, rho_ss, left, right)
    taus = np.asarray(taus, dtype=float)
    seed = rho_ss.matrix @ left.matrix
    readout = vec(right.matrix.T)  # Tr(R X) = vec(R^T) . vec(X)
    values = L.propagator.readout(readout, vec(seed), taus)
    values[taus == 0] = np.trace(right.matrix @ seed)
    stationary = np.trace(right.matrix @ rho_ss.matrix) * np.trace(seed)
    return CorrelationTrace(taus, values, kind, complex(stationary))


def emf_components(L: Liouvillian, rho_ss: DensityMatrix, taus) -> dict[CorrelationKind, CorrelationTrace]:
    ops = ladder_ops(L.basis)
    a, ad = ops.a, ops.a_dag
    K = CorrelationKind
    return {
        K.A_ADAG: qrt_correlator(L, rho_ss, a, ad, taus, K.A_ADAG),
        K.ADAG_A: qrt_correlator(L, rho_ss, ad, a, taus, K.ADAG_A),
        K.A_A: qrt_correlator(L, rho_ss, a, a, taus, K.A_A),
        K.ADAG_ADAG: qrt_correlator(L, rho_ss, ad, ad, taus, K.ADAG_ADAG),
    }


def emf_correlation(L: Liouvillian, rho_ss: DensityMatrix, p: EffectiveParams,
                    basis: BasisSpec, taus) -> CorrelationTrace:
    """``<V(0) V(tau)> = c^2 [<a a^dag> + <a^dag a> - <a a> - <a^dag a^dag>]``."""
    if basis != L.basis:
        check_same_basis(L, LabeledOperator(basis, np.eye(basis.dim)))
    parts = emf_components(L, rho_ss, taus)
    K = CorrelationKind
    total = (parts[K.A_ADAG] + parts[K.ADAG_A]
             + parts[K.A_A].scaled(-1) + parts[K.ADAG_ADAG].scaled(-1))
    return total.scaled(p.emf_prefactor, K.EMF_COMBINED)
