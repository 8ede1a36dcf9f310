"""First-order (weak-drive) closed forms for the EMF correlation spectrum.

To first order in the drive, the coherences ``rho_{00,01}`` and
``rho_{00,10}`` obey the linear pair

    d/dt rho_{00,01} = (i Delta - kappa) rho_{00,01} + i g rho_{00,10} - i xi
    d/dt rho_{00,10} = (i Delta_a - gamma/2) rho_{00,10} + i g rho_{00,01}

whose decay constants are ``lambda_{1,2}``. Every quartic-root expression
below goes through the principal complex square root
``sqrt(a - i b) = (a^2 + b^2)^(1/4) exp(-i atan2(b, a) / 2)``, which agrees
with the ``arctan(b/a)`` form whenever ``a > 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .correlations import CorrelationKind, CorrelationTrace
from .errors import ExceptionalPoint
from .model import EffectiveParams
from .spectrum import Spectrum, SpectrumMethod

__all__ = [
    "PerturbativeCoefficients",
    "analytic_correlation",
    "analytic_spectrum",
    "analytic_splitting",
    "closed_form_correlators",
    "coefficients",
    "eta",
    "f_terms",
    "first_order_coherence",
    "principal_root",
    "qrt_amplitudes",
]

#: |lambda_1 - lambda_2| at or below this is treated as the exceptional point
EXCEPTIONAL_GAP = 1e-9


@dataclass(frozen=True)
class PerturbativeCoefficients:
    params: EffectiveParams
    delta: float
    Gamma: float
    a: float
    b: float
    root: complex
    lam1: complex
    lam2: complex
    mu12: complex
    mu21: complex
    chi12: complex
    chi21: complex
    nu12: complex
    nu21: complex
    eps: complex

    @property
    def Gamma1(self) -> float:
        return self.lam1.real

    @property
    def Gamma2(self) -> float:
        return self.lam2.real

    @property
    def phi1(self) -> float:
        return self.lam1.imag

    @property
    def phi2(self) -> float:
        return self.lam2.imag

    @property
    def mu(self) -> tuple[complex, complex]:
        return self.mu12, self.mu21

    @property
    def lams(self) -> tuple[complex, complex]:
        return self.lam1, self.lam2

    @property
    def slowest_rate(self) -> float:
        return min(self.Gamma1, self.Gamma2)


def principal_root(a: float, b: float) -> complex:
    """``sqrt(a - i b)`` with the branch fixed on the cut: ``-i sqrt(|a|)`` for ``b = 0, a < 0``."""
    b = b + 0.0  # fold -0.0 onto +0.0
    return (a * a + b * b) ** 0.25 * cmath.exp(-0.5j * math.atan2(b, a))


def coefficients(p: EffectiveParams) -> PerturbativeCoefficients:
    if p.kappa == 0 and p.gamma == 0:
        raise ValueError("closed forms need kappa > 0 or gamma > 0")
    delta = p.delta
    skew = p.kappa - p.gamma / 2
    Gamma = p.kappa / 2 + p.gamma / 4
    a = delta ** 2 - skew ** 2 + 4 * p.g ** 2
    b = 2 * delta * skew
    root = principal_root(a, b)
    shift = p.delta_a + p.delta_r
    lam1 = Gamma + 0.5j * (-root - shift)
    lam2 = Gamma + 0.5j * (root - shift)
    gap = lam1 - lam2
    if abs(gap) <= EXCEPTIONAL_GAP:
        raise ExceptionalPoint(f"|lambda1 - lambda2| = {abs(gap):.2e}")
    q = 1j * p.delta_a - p.gamma / 2
    mu12 = (lam1 + q) / gap
    mu21 = (lam2 + q) / -gap
    return PerturbativeCoefficients(
        params=p, delta=delta, Gamma=Gamma, a=a, b=b, root=root,
        lam1=lam1, lam2=lam2,
        mu12=mu12, mu21=mu21,
        chi12=mu12 / lam1, chi21=mu21 / lam2,
        nu12=p.g / (1j * gap), nu21=p.g / (-1j * gap),
        eps=1j * p.xi * q / (lam1 * lam2),
    )


def eta(c: PerturbativeCoefficients, rho0_0001: complex, rho0_0010: complex) -> tuple[complex, complex]:
    """Amplitudes of ``exp(-lambda_m tau)`` in ``rho_{00,01}(tau)`` for given initial coherences."""
    xi = c.params.xi
    return (c.mu12 * rho0_0001 + c.chi12 * rho0_0010 + 1j * xi * c.nu12,
            c.mu21 * rho0_0001 + c.chi21 * rho0_0010 + 1j * xi * c.nu21)


def first_order_coherence(c: PerturbativeCoefficients, taus, rho0_0001: complex = 0,
                          rho0_0010: complex = 0) -> np.ndarray:
    """``rho_{00,01}(tau)`` in the published two-exponential form.

    Only the ``mu`` terms reproduce the linear pair exactly. The ``chi`` and
    ``nu`` terms as published do not meet the initial condition: at
    ``tau = 0`` the result is ``rho0_0001 + (chi12 + chi21) rho0_0010 + eps``.
    """
    taus = np.asarray(taus, dtype=float)
    e12, e21 = eta(c, rho0_0001, rho0_0010)
    return e12 * np.exp(-c.lam1 * taus) + e21 * np.exp(-c.lam2 * taus) + c.eps


def qrt_amplitudes(c: PerturbativeCoefficients, x_first: complex, x_second: complex,
                   conjugate: bool = False) -> tuple[complex, complex]:
    """Amplitudes ``H_{X,12}, H_{X,21}`` of a regression-theorem seed.

    Without ``conjugate`` this is ``mu X_{00,01}(0) + chi X_{00,10}(0) + i xi nu``
    (the B and D seeds); with it, ``mu* X_{01,00}(0) + chi* X_{10,00}(0) - i xi nu*``
    (the A and C seeds).
    """
    mu = np.array([c.mu12, c.mu21])
    chi = np.array([c.chi12, c.chi21])
    nu = np.array([c.nu12, c.nu21])
    drive = 1j * c.params.xi
    if conjugate:
        mu, chi, nu, drive = mu.conj(), chi.conj(), nu.conj(), -drive
    h = mu * x_first + chi * x_second + drive * nu
    return complex(h[0]), complex(h[1])


def closed_form_correlators(c: PerturbativeCoefficients, rho_ss: np.ndarray, taus) -> dict:
    """The four published per-correlator forms on the ``N = 1`` basis.

    ``rho_ss`` is a 3x3 matrix in the order ``(00), (01), (10)``; only the
    seed matrix elements are read from it. These forms carry the
    unperturbed ``i xi nu`` and ``eps`` terms of the density-matrix solution,
    which cancel in the combination ``B - D`` (and ``A - C``) but make
    the individual traces inaccurate.
    """
    taus = np.asarray(taus, dtype=float)
    rho = np.asarray(rho_ss, dtype=complex)
    a = np.zeros((3, 3))
    a[0, 1] = 1.0
    seed_a = rho @ a          # B(0) = C(0)
    seed_adag = rho @ a.T     # A(0) = D(0)
    e1, e2 = np.exp(-c.lam1 * taus), np.exp(-c.lam2 * taus)
    e1c, e2c = np.conj(e1), np.conj(e2)
    hA = qrt_amplitudes(c, seed_adag[1, 0], seed_adag[2, 0], conjugate=True)
    hB = qrt_amplitudes(c, seed_a[0, 1], seed_a[0, 2])
    hC = qrt_amplitudes(c, seed_a[1, 0], seed_a[2, 0], conjugate=True)
    hD = qrt_amplitudes(c, seed_adag[0, 1], seed_adag[0, 2])
    K = CorrelationKind
    return {
        K.ADAG_A: np.conj(hA[0]) * e1c + np.conj(hA[1]) * e2c + np.conj(c.eps),
        K.A_ADAG: hB[0] * e1 + hB[1] * e2 + c.eps,
        K.A_A: np.conj(hC[0]) * e1c + np.conj(hC[1]) * e2c + np.conj(c.eps),
        K.ADAG_ADAG: hD[0] * e1 + hD[1] * e2 + c.eps,
    }


def f_terms(c: PerturbativeCoefficients, rho_ss_0101: complex, rho_ss_1001: complex) -> tuple[complex, complex]:
    """Second-order amplitudes multiplying ``exp(-lambda_m^* tau)``, as published."""
    return (np.conj(c.mu12) * rho_ss_0101 + np.conj(c.chi12) * rho_ss_1001,
            np.conj(c.mu21) * rho_ss_0101 + np.conj(c.chi21) * rho_ss_1001)


def analytic_correlation(c: PerturbativeCoefficients, taus,
                         f: tuple[complex, complex] | None = None) -> CorrelationTrace:
    """``mu12 exp(-lambda1 tau) + mu21 exp(-lambda2 tau)`` (normalized).

    Passing ``f`` adds the ``f_m exp(-lambda_m^* tau)`` terms for diagnostics.
    """
    taus = np.asarray(taus, dtype=float)
    values = c.mu12 * np.exp(-c.lam1 * taus) + c.mu21 * np.exp(-c.lam2 * taus)
    if f is not None:
        values = values + f[0] * np.exp(-np.conj(c.lam1) * taus) + f[1] * np.exp(-np.conj(c.lam2) * taus)
    return CorrelationTrace(taus, values, CorrelationKind.EMF_COMBINED)


def analytic_spectrum(c: PerturbativeCoefficients, prefactor: float, omegas,
                      f: tuple[complex, complex] | None = None) -> Spectrum:
    """Sum of two shifted Lorentzians with dispersive admixture.

    ``S(w) = (prefactor / pi) sum_m [Gamma_m Re mu_m - (w - phi_m) Im mu_m]
    / [(w - phi_m)^2 + Gamma_m^2]``. The ``1/pi`` of the one-sided
    transform is kept so all spectrum methods share one normalization.
    """
    w = np.asarray(omegas, dtype=float)
    total = np.zeros_like(w)
    for mu, lam in ((c.mu12, c.lam1), (c.mu21, c.lam2)):
        x = w - lam.imag
        total += (lam.real * mu.real - x * mu.imag) / (x ** 2 + lam.real ** 2)
    if f is not None:
        for amp, lam in zip(f, (np.conj(c.lam1), np.conj(c.lam2))):
            total += np.real(amp / (lam - 1j * w))
    return Spectrum(w, prefactor * total / np.pi, SpectrumMethod.ANALYTIC, c.params)


def analytic_splitting(c: PerturbativeCoefficients) -> float:
    """``(a^2 + b^2)^(1/4) cos(atan2(b, a) / 2)``, the separation ``phi2 - phi1``."""
    return (c.a ** 2 + c.b ** 2) ** 0.25 * math.cos(0.5 * math.atan2(c.b, c.a))
