"""EMF spectra from correlation traces or resolvents, and peak analysis.

All methods compute the one-sided transform

    S(w) = (1/pi) Re int_0^inf dtau exp(i w tau) [<V(0) V(tau)> - <V>^2] .

The stationary product ``<V>^2`` would add a delta line at ``w = 0``; it is
removed so that the transform converges.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .correlations import CorrelationTrace
from .dynamics import DensityMatrix, Liouvillian, vec
from .errors import NoPeaks, SingularMatrix, SingularResolvent, TailTooFat
from .hilbert import BasisSpec, check_same_basis, ladder_ops
from .model import EffectiveParams
from .numerics import solve_linear

__all__ = [
    "Peak",
    "PeakReport",
    "Spectrum",
    "SpectrumMethod",
    "default_omega_grid",
    "find_peaks",
    "spectrum_from_trace",
    "spectrum_resolvent",
]

#: dips below this fraction of the peak height are flagged
NEGATIVE_DIP_FRACTION = 0.01


class SpectrumMethod(str, enum.Enum):
    ANALYTIC = "analytic"
    FT = "ft"
    RESOLVENT = "resolvent"


@dataclass(frozen=True, eq=False)
class Spectrum:
    omegas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    method: SpectrumMethod
    params_echo: EffectiveParams | None = None

    def __post_init__(self):
        w = np.array(self.omegas, dtype=float)
        s = np.array(self.values, dtype=float)
        if w.ndim != 1 or w.shape != s.shape:
            raise ValueError("omegas and values must be 1-D arrays of equal length")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omegas must be strictly ascending")
        if not np.all(np.isfinite(s)):
            raise ValueError("spectrum has non-finite values")
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "values", s)
        object.__setattr__(self, "method", SpectrumMethod(self.method))

    @property
    def lab_omegas(self) -> np.ndarray | None:
        """Frequencies shifted back to the lab frame, when the drive frequency is known."""
        if self.params_echo is None or self.params_echo.omega_p is None:
            return None
        return self.omegas + self.params_echo.omega_p

    @property
    def has_negative_dip(self) -> bool:
        return bool(self.values.min() < -NEGATIVE_DIP_FRACTION * self.values.max())


@dataclass(frozen=True)
class Peak:
    position: float
    height: float
    fwhm: float


@dataclass(frozen=True)
class PeakReport:
    peaks: tuple[Peak, ...]
    splitting: float | None
    dominance_ratio: float | None

    def to_dict(self) -> dict:
        return {
            "peaks": [{"position": p.position, "height": p.height,
                       "fwhm": None if np.isnan(p.fwhm) else p.fwhm} for p in self.peaks],
            "splitting": self.splitting,
            "dominance_ratio": self.dominance_ratio,
        }


def default_omega_grid(phis, gammas, points: int = 2001, widths: float = 10.0) -> np.ndarray:
    """``points`` samples over ``[min(phi) - widths*max(Gamma), max(phi) + widths*max(Gamma)]``."""
    margin = widths * max(gammas)
    return np.linspace(min(phis) - margin, max(phis) + margin, points)


def spectrum_from_trace(trace: CorrelationTrace, omegas, params: EffectiveParams | None = None,
                        tail_tolerance: float = 1e-6, chunk: int = 256) -> Spectrum:
    """Trapezoidal one-sided Fourier transform on the trace's own delay grid.

    Raises :class:`TailTooFat` when the connected trace has not fallen to
    ``tail_tolerance`` of its zero-delay magnitude at the last sample.
    """
    c = trace.connected
    start, end = abs(c[0]), abs(c[-1])
    if end > tail_tolerance * start:
        raise TailTooFat(
            f"trace at tau = {trace.taus[-1]:.4g} is {end / start:.2e} of its initial "
            f"magnitude (limit {tail_tolerance:.0e}); extend the delay span"
        )
    w = np.asarray(omegas, dtype=float)
    out = np.empty(w.shape)
    for lo in range(0, w.size, chunk):
        phase = np.exp(1j * np.outer(w[lo:lo + chunk], trace.taus))
        out[lo:lo + chunk] = trapezoid(phase * c, trace.taus, axis=1).real
    return Spectrum(w, out / np.pi, SpectrumMethod.FT, params)


def spectrum_resolvent(L: Liouvillian, rho_ss: DensityMatrix, p: EffectiveParams,
                       basis: BasisSpec, omegas) -> Spectrum:
    """Spectrum from one linear solve per frequency.

    ``int_0^inf exp(i w t) exp(L t) X dt = -(L + i w)^-1 X`` for a seed
    ``X`` with no stationary component. The generator is shifted by
    ``|rho_ss><1|`` so the system stays regular at ``w = 0``; the shift does not
    act on trace-free seeds.
    """
    check_same_basis(L, rho_ss)
    if basis != L.basis:
        raise ValueError(f"basis {basis} differs from the Liouvillian's {L.basis}")
    if L.kappa == 0 and L.gamma == 0:
        raise SingularResolvent("no dissipation: the resolvent is singular on the real axis")
    ops = ladder_ops(basis)
    dim2 = basis.dim ** 2
    rho = rho_ss.matrix
    seeds = []
    for left in (ops.a.matrix, ops.a_dag.matrix):
        x = rho @ left
        seeds.append(vec(x - rho * np.trace(x)))
    rhs = -np.column_stack(seeds)
    read_a, read_adag = vec(ops.a.matrix.T), vec(ops.a_dag.matrix.T)
    # seed rho.a feeds <a a^dag> - <a a>; seed rho.a^dag feeds <a^dag a> - <a^dag a^dag>
    weights = np.column_stack([read_adag - read_a, read_a - read_adag])
    shifted = L.superop + np.outer(vec(rho), L.trace_row)
    eye = np.eye(dim2)
    w = np.asarray(omegas, dtype=float)
    out = np.empty(w.shape)
    for i, omega in enumerate(w):
        try:
            y = solve_linear(shifted + 1j * omega * eye, rhs)
        except SingularMatrix as exc:
            raise SingularResolvent(f"resolvent singular at omega = {omega:.6g}") from exc
        out[i] = np.einsum("ij,ij->", weights, y).real
    return Spectrum(w, p.emf_prefactor * out / np.pi, SpectrumMethod.RESOLVENT, p)


def _refine(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex of the parabola through samples ``i-1, i, i+1``."""
    coef = np.polyfit(x[i - 1:i + 2] - x[i], y[i - 1:i + 2], 2)
    if coef[0] >= 0:
        return float(x[i]), float(y[i])
    dx = -coef[1] / (2 * coef[0])
    return float(x[i] + dx), float(np.polyval(coef, dx))


def _half_crossing(x: np.ndarray, y: np.ndarray, i: int, half: float, step: int) -> float:
    j = i
    while 0 <= j + step < len(y):
        if y[j + step] < half:
            x0, x1, y0, y1 = x[j], x[j + step], y[j], y[j + step]
            return float(x0 + (half - y0) * (x1 - x0) / (y1 - y0))
        j += step
    return float("nan")


def find_peaks(s: Spectrum, dominance_threshold: float = 0.05) -> PeakReport:
    """Local maxima above ``dominance_threshold`` times the global maximum.

    Positions and heights are refined by a three-point parabola; widths are
    full widths at half of the refined height, from linear interpolation of
    the crossings (NaN when a crossing falls outside the grid).
    """
    x, y = s.omegas, s.values
    if len(y) < 3:
        raise NoPeaks("need at least three samples")
    interior = np.arange(1, len(y) - 1)
    is_max = (y[interior] > y[interior - 1]) & (y[interior] >= y[interior + 1])
    candidates = interior[is_max]
    top = y.max()
    candidates = [i for i in candidates if y[i] >= dominance_threshold * top]
    if not candidates:
        raise NoPeaks("no interior local maximum on the grid")
    peaks = []
    for i in candidates:
        pos, height = _refine(x, y, i)
        half = 0.5 * height
        width = _half_crossing(x, y, i, half, 1) - _half_crossing(x, y, i, half, -1)
        peaks.append(Peak(pos, height, width))
    peaks.sort(key=lambda pk: pk.position)
    if len(peaks) < 2:
        return PeakReport(tuple(peaks), None, None)
    first, second = sorted(peaks, key=lambda pk: pk.height, reverse=True)[:2]
    return PeakReport(tuple(peaks), abs(first.position - second.position),
                      second.height / first.height)
