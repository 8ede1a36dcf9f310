"""Circuit parameters, the rotating-frame Hamiltonian and the EMF observable.

Units
-----
Frequencies, rates and energies are angular frequencies in GHz (1 GHz here
means ``1e9 rad/s``) with ``hbar = 1``. Mechanical and electrical
quantities in :class:`DeviceParams` are SI. The only place the two meet is
the zero-point amplitude ``x_zpf = sqrt(hbar / (2 M Omega))``, evaluated in
metres with ``Omega`` converted to rad/s; :func:`derive_effective`
records the constants it used in :class:`DeviceDerivation`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.constants

from .errors import InvalidDevice
from .hilbert import BasisSpec, LabeledOperator, ladder_ops, product_op

__all__ = [
    "GHZ",
    "HBAR",
    "DeviceDerivation",
    "DeviceParams",
    "EffectiveParams",
    "build_hamiltonian",
    "derive_effective",
    "emf_operator",
]

HBAR = scipy.constants.hbar  # J s
GHZ = 1e9  # rad/s per model frequency unit


@dataclass(frozen=True)
class DeviceDerivation:
    """Intermediate quantities of :func:`derive_effective`, kept for audit."""

    e_j: float
    omega_a: float
    theta: float
    c_sigma: float
    x_zpf: float
    hbar: float = HBAR
    rate_unit: float = GHZ
    emf_prefactor_si: float = 0.0


@dataclass(frozen=True)
class EffectiveParams:
    """Rotating-frame model parameters.

    Attributes
    ----------
    delta_a : qubit-drive detuning ``omega_a - omega_p``
    delta_r : resonator-drive detuning ``Omega - omega_p``
    g : qubit-resonator coupling
    xi : drive strength of the resonator
    kappa, gamma : resonator and qubit decay rates, entering the master
        equation as ``kappa D[a]`` with ``D[a] = 2 a rho a^dag - {a^dag a, rho}``
        and ``(gamma/2) D[sigma_-]``
    emf_prefactor : ``B^2 l^2 hbar Omega / (2 M)`` in V^2, or 1 for
        normalized spectra
    omega_p : drive frequency, only used to report lab-frame positions
    """

    delta_a: float
    delta_r: float
    g: float
    xi: float
    kappa: float
    gamma: float
    emf_prefactor: float = 1.0
    omega_p: float | None = None
    derivation: DeviceDerivation | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for name in ("delta_a", "delta_r", "g", "xi", "kappa", "gamma", "emf_prefactor"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")
        if self.emf_prefactor < 0:
            raise ValueError("emf_prefactor must be non-negative")

    @classmethod
    def from_delta(cls, delta: float, g: float, xi: float, kappa: float, gamma: float,
                   delta_r: float = 0.0, **kwargs) -> "EffectiveParams":
        """Build from the qubit-resonator detuning; ``delta_r = 0`` drives the resonator on resonance."""
        return cls(delta_a=delta_r + delta, delta_r=delta_r, g=g, xi=xi,
                   kappa=kappa, gamma=gamma, **kwargs)

    @property
    def delta(self) -> float:
        return self.delta_a - self.delta_r

    def replace(self, **changes) -> "EffectiveParams":
        if "delta" in changes:
            changes["delta_a"] = changes.pop("delta") + changes.get("delta_r", self.delta_r)
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "derivation"}
        out["delta"] = self.delta
        if self.derivation is not None:
            out["derivation"] = asdict(self.derivation)
        return out


@dataclass(frozen=True)
class DeviceParams:
    """Physical device description.

    Energies and frequencies (``e_c``, ``e_j0``, ``omega``, ``omega_p``,
    ``kappa``, ``gamma``) are in GHz; ``c_j``, ``c_g``, ``c_n`` in farads,
    ``d`` and ``length`` in metres, ``b_field`` in tesla, ``mass`` in kg,
    ``i0`` in amperes.
    """

    e_c: float
    e_j0: float
    flux_ratio: float
    n_g: float
    c_j: float
    c_g: float
    c_n: float
    d: float
    b_field: float
    length: float
    mass: float
    omega: float
    i0: float
    omega_p: float
    kappa: float
    gamma: float

    def validate(self) -> None:
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise InvalidDevice(f"{name} must be finite, got {value!r}")
        if self.d <= 0:
            raise InvalidDevice("gap d must be positive")
        if self.mass <= 0:
            raise InvalidDevice("mass must be positive")
        if self.omega <= 0:
            raise InvalidDevice("resonator frequency must be positive")
        if not 0.0 <= self.n_g <= 1.0:
            raise InvalidDevice(f"n_g must lie in [0, 1], got {self.n_g}")
        if self.kappa < 0 or self.gamma < 0:
            raise InvalidDevice("decay rates must be non-negative")
        if 2 * self.c_j + self.c_g + self.c_n <= 0:
            raise InvalidDevice("total island capacitance must be positive")


def derive_effective(dev: DeviceParams, physical_emf: bool = True) -> EffectiveParams:
    """Map device parameters onto the rotating-frame model.

    ``theta`` is taken from ``atan2(|E_J|, 4 E_C (2 n_g - 1))`` so that it lies
    in ``[0, pi]`` and ``sin(theta) >= 0``; the sign of ``g`` then follows the
    ``(n_g - 1/2)`` prefactor alone. With ``E_J = 0`` the angle is 0. With ``physical_emf`` the EMF prefactor
    is ``B^2 l^2 hbar Omega / (2 M)`` in V^2, otherwise 1.
    """
    dev.validate()
    e_j = 2.0 * dev.e_j0 * math.cos(math.pi * dev.flux_ratio)
    charge = 4.0 * dev.e_c * (2.0 * dev.n_g - 1.0)
    if e_j == 0.0 and charge == 0.0:
        raise InvalidDevice("mixing angle undefined: E_J = 0 at the degeneracy point n_g = 1/2")
    omega_a = math.hypot(charge, e_j)
    # pure charging limit: report theta = 0 on both sides of the degeneracy point
    theta = math.atan2(abs(e_j), charge) if e_j != 0.0 else 0.0
    sin_theta = abs(e_j) / omega_a  # exact near theta = pi, unlike sin(atan2(...))
    c_sigma = 2.0 * dev.c_j + dev.c_g + dev.c_n
    x_zpf = math.sqrt(HBAR / (2.0 * dev.mass * dev.omega * GHZ))
    g = (dev.n_g - 0.5) * 4.0 * dev.e_c * dev.c_n / c_sigma * (x_zpf / dev.d) * sin_theta
    # drive energy l B I0 x_zpf / 2, converted from joules to GHz
    xi = dev.length * dev.b_field * dev.i0 * x_zpf / (2.0 * HBAR * GHZ)
    emf_si = (dev.b_field * dev.length) ** 2 * HBAR * dev.omega * GHZ / (2.0 * dev.mass)
    record = DeviceDerivation(e_j=e_j, omega_a=omega_a, theta=theta, c_sigma=c_sigma,
                              x_zpf=x_zpf, emf_prefactor_si=emf_si)
    return EffectiveParams(
        delta_a=omega_a - dev.omega_p,
        delta_r=dev.omega - dev.omega_p,
        g=g,
        xi=xi,
        kappa=dev.kappa,
        gamma=dev.gamma,
        emf_prefactor=emf_si if physical_emf else 1.0,
        omega_p=dev.omega_p,
        derivation=record,
    )


def build_hamiltonian(p: EffectiveParams, basis: BasisSpec) -> LabeledOperator:
    """``Delta_a s+ s- + g (a s+ + a^dag s-) + Delta a^dag a - xi (a + a^dag)``."""
    ops = ladder_ops(basis)
    h = (p.delta_a * product_op(basis, "sigma_plus", "sigma_minus").matrix
         + p.g * (product_op(basis, "a", "sigma_plus").matrix
                  + product_op(basis, "a_dag", "sigma_minus").matrix)
         + p.delta_r * product_op(basis, "a_dag", "a").matrix
         - p.xi * (ops.a.matrix + ops.a_dag.matrix))
    return LabeledOperator(basis, h, "H_eff")


def emf_operator(p: EffectiveParams, basis: BasisSpec) -> LabeledOperator:
    """``V = i sqrt(emf_prefactor) (a^dag - a)``."""
    ops = ladder_ops(basis)
    c = np.sqrt(p.emf_prefactor)
    return LabeledOperator(basis, 1j * c * (ops.a_dag.matrix - ops.a.matrix), "V")
