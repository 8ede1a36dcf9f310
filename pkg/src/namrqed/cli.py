"""Command-line runner for figure sweeps and analytic/numeric comparisons.

Usage::

    namrqed run --figure 2 --out-dir fig2
    namrqed run --config device.ini --method ft --emit-plot-script
    namrqed compare --figure 4 --tolerance 0.05

Config files are INI documents with exactly one of an ``[effective]`` or a
``[device]`` section plus an optional ``[run]`` section; see the README for
the recognised keys. Command-line flags override values from the file or
preset.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import export
from .analytic import analytic_spectrum, analytic_splitting, coefficients
from .correlations import default_tau_grid, emf_correlation
from .dynamics import build_liouvillian, steady_state
from .errors import ConfigError, NamrError, NoPeaks
from .hilbert import BasisSpec, Truncation
from .model import DeviceParams, EffectiveParams, build_hamiltonian, derive_effective
from .spectrum import (PeakReport, Spectrum, SpectrumMethod, default_omega_grid,
                       find_peaks, spectrum_from_trace, spectrum_resolvent)

__all__ = [
    "FIGURE_PRESETS",
    "OmegaWindow",
    "RunConfig",
    "Sweep",
    "TauWindow",
    "compare",
    "compute_spectrum",
    "load_config",
    "main",
    "run",
]

SWEEP_NAMES = ("N", "delta", "xi")


@dataclass(frozen=True)
class OmegaWindow:
    minimum: float | None = None
    maximum: float | None = None
    points: int = 2001

    def grid(self, p: EffectiveParams) -> np.ndarray:
        if self.minimum is not None and self.maximum is not None:
            return np.linspace(self.minimum, self.maximum, self.points)
        # lambda_{1,2} from the first-order coherence pair; eigvals keeps
        # working at the exceptional point where the closed forms do not
        drift = np.array([[1j * p.delta_r - p.kappa, 1j * p.g],
                          [1j * p.g, 1j * p.delta_a - p.gamma / 2]])
        lams = -np.linalg.eigvals(drift)
        widths = lams.real
        if widths.max() <= 0:
            raise ConfigError("no dissipation: give --omega-min and --omega-max explicitly")
        grid = default_omega_grid(lams.imag, widths, self.points)
        lo = grid[0] if self.minimum is None else self.minimum
        hi = grid[-1] if self.maximum is None else self.maximum
        return np.linspace(lo, hi, self.points)


@dataclass(frozen=True)
class TauWindow:
    """Delay grid for the FT method; ``span`` defaults to 14 slowest decay times."""

    span: float | None = None
    samples: int = 4096


@dataclass(frozen=True)
class Sweep:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in SWEEP_NAMES:
            raise ConfigError(f"sweep name must be one of {SWEEP_NAMES}, got {self.name!r}")
        if len(self.values) == 0:
            raise ConfigError("sweep needs at least one value")
        if self.name == "N":
            values = tuple(int(v) for v in self.values)
            if any(v < 1 for v in values):
                raise ConfigError("N sweep values must be >= 1")
            object.__setattr__(self, "values", values)
        else:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class RunConfig:
    params: EffectiveParams | DeviceParams
    basis: BasisSpec = field(default_factory=lambda: BasisSpec.total(1))
    method: SpectrumMethod = SpectrumMethod.RESOLVENT
    omega: OmegaWindow = OmegaWindow()
    tau: TauWindow = TauWindow()
    sweep: Sweep | None = None
    out_dir: Path = Path("out")
    emit_plot_script: bool = False
    tolerance: float = 0.05
    splitting_tolerance: float = 0.02
    physical_emf: bool = True
    source: str = "config"

    def validate(self) -> "RunConfig":
        if not isinstance(self.params, (EffectiveParams, DeviceParams)):
            raise ConfigError("params must be EffectiveParams or DeviceParams")
        if self.omega.points < 3:
            raise ConfigError("need at least three omega points")
        if (self.omega.minimum is not None and self.omega.maximum is not None
                and self.omega.maximum <= self.omega.minimum):
            raise ConfigError("omega-max must exceed omega-min")
        if self.tau.samples < 2 or (self.tau.span is not None and self.tau.span <= 0):
            raise ConfigError("tau window must have positive span and >= 2 samples")
        if not self.tolerance > 0 or not self.splitting_tolerance > 0:
            raise ConfigError("tolerances must be positive")
        return self

    def effective(self) -> EffectiveParams:
        if isinstance(self.params, DeviceParams):
            return derive_effective(self.params, self.physical_emf)
        return self.params

    def points(self) -> list[tuple[str, object, EffectiveParams, BasisSpec]]:
        """``(label, sweep value, params, basis)`` for every run in the sweep."""
        base = self.effective()
        if self.sweep is None:
            return [("single", None, base, self.basis)]
        out = []
        for v in self.sweep.values:
            label = f"{self.sweep.name}={v:g}"
            if self.sweep.name == "N":
                out.append((label, v, base, BasisSpec(self.basis.scheme, v)))
            elif self.sweep.name == "delta":
                out.append((label, v, base.replace(delta=v), self.basis))
            else:
                out.append((label, v, base.replace(xi=v), self.basis))
        return out


def _figure_params(xi: float = 0.02, delta: float = 0.2) -> EffectiveParams:
    return EffectiveParams.from_delta(delta, g=0.2, xi=xi, kappa=0.004, gamma=0.004)


#: caption parameters (GHz) with the resonator driven on resonance
FIGURE_PRESETS = {
    2: RunConfig(_figure_params(), sweep=Sweep("N", (1, 2, 3)), source="figure-2"),
    3: RunConfig(_figure_params(), sweep=Sweep("delta", (0.0, 0.4, 0.8)), source="figure-3"),
    4: RunConfig(_figure_params(), sweep=Sweep("xi", (0.02, 0.03, 0.04)), source="figure-4"),
}


_EFFECTIVE_KEYS = {"delta", "delta_a", "delta_r", "g", "xi", "kappa", "gamma",
                   "emf_prefactor", "omega_p"}
_DEVICE_KEYS = {f.name for f in dataclasses.fields(DeviceParams)} | {"physical_emf"}
_RUN_KEYS = {"method", "truncation", "nmax", "omega_min", "omega_max", "omega_points",
             "tau_span", "tau_samples", "sweep", "sweep_values", "out_dir",
             "emit_plot_script", "tolerance", "splitting_tolerance"}


def _floats(section: configparser.SectionProxy, keys) -> dict:
    out = {}
    for key in keys:
        if key in section:
            try:
                out[key] = float(section[key])
            except ValueError as exc:
                raise ConfigError(f"[{section.name}] {key}: not a number: {section[key]!r}") from exc
    return out


def _check_keys(section: configparser.SectionProxy, allowed: set) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"[{section.name}] unknown keys: {', '.join(unknown)}")


def _effective_from_section(sec: configparser.SectionProxy) -> EffectiveParams:
    _check_keys(sec, _EFFECTIVE_KEYS)
    vals = _floats(sec, _EFFECTIVE_KEYS)
    if ("delta" in vals) == ("delta_a" in vals):
        raise ConfigError("[effective] needs exactly one of delta, delta_a")
    missing = sorted({"g", "xi", "kappa", "gamma"} - set(vals))
    if missing:
        raise ConfigError(f"[effective] missing keys: {', '.join(missing)}")
    delta_r = vals.pop("delta_r", 0.0)
    if "delta" in vals:
        vals["delta_a"] = vals.pop("delta") + delta_r
    try:
        return EffectiveParams(delta_r=delta_r, **vals)
    except ValueError as exc:
        raise ConfigError(f"[effective] {exc}") from exc


def _device_from_section(sec: configparser.SectionProxy) -> tuple[DeviceParams, bool]:
    _check_keys(sec, _DEVICE_KEYS)
    physical = sec.getboolean("physical_emf", fallback=True)
    names = [f.name for f in dataclasses.fields(DeviceParams)]
    vals = _floats(sec, names)
    missing = [n for n in names if n not in vals]
    if missing:
        raise ConfigError(f"[device] missing keys: {', '.join(missing)}")
    return DeviceParams(**vals), physical


def load_config(path: Path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    extra = sorted(set(parser.sections()) - {"effective", "device", "run"})
    if extra:
        raise ConfigError(f"unknown sections: {', '.join(extra)}")
    has_eff, has_dev = parser.has_section("effective"), parser.has_section("device")
    if has_eff == has_dev:
        raise ConfigError("config needs exactly one of [effective] or [device]")
    physical = True
    if has_eff:
        params = _effective_from_section(parser["effective"])
    else:
        params, physical = _device_from_section(parser["device"])
    cfg = RunConfig(params, physical_emf=physical, source=str(path))
    if parser.has_section("run"):
        cfg = _apply_run_section(cfg, parser["run"])
    return cfg


def _apply_run_section(cfg: RunConfig, sec: configparser.SectionProxy) -> RunConfig:
    _check_keys(sec, _RUN_KEYS)
    nums = _floats(sec, ["omega_min", "omega_max", "tau_span", "tolerance",
                         "splitting_tolerance", "omega_points", "tau_samples", "nmax"])
    changes: dict = {}
    try:
        if "method" in sec:
            changes["method"] = SpectrumMethod(sec["method"].strip())
        scheme = Truncation(sec["truncation"].strip()) if "truncation" in sec else cfg.basis.scheme
    except ValueError as exc:
        raise ConfigError(f"[run] {exc}") from exc
    changes["basis"] = BasisSpec(scheme, int(nums.get("nmax", cfg.basis.cutoff)))
    changes["omega"] = OmegaWindow(nums.get("omega_min"), nums.get("omega_max"),
                                   int(nums.get("omega_points", cfg.omega.points)))
    changes["tau"] = TauWindow(nums.get("tau_span"), int(nums.get("tau_samples", cfg.tau.samples)))
    for key in ("tolerance", "splitting_tolerance"):
        if key in nums:
            changes[key] = nums[key]
    if ("sweep" in sec) != ("sweep_values" in sec):
        raise ConfigError("[run] sweep and sweep_values go together")
    if "sweep" in sec:
        raw = [v for v in sec["sweep_values"].replace(",", " ").split() if v]
        try:
            changes["sweep"] = Sweep(sec["sweep"].strip(), tuple(float(v) for v in raw))
        except ValueError as exc:
            raise ConfigError(f"[run] sweep_values: {exc}") from exc
    if "out_dir" in sec:
        changes["out_dir"] = Path(sec["out_dir"])
    if "emit_plot_script" in sec:
        changes["emit_plot_script"] = sec.getboolean("emit_plot_script")
    return dataclasses.replace(cfg, **changes)


def _slowest_liouvillian_rate(L) -> float:
    prop = L.propagator
    w = prop.eigenvalues if prop.uses_eigenbasis else np.linalg.eigvals(L.superop)
    w = w[np.argsort(np.abs(w))][1:]  # drop the stationary eigenvalue
    return float(np.min(-w.real))


def compute_spectrum(p: EffectiveParams, basis: BasisSpec, method: SpectrumMethod,
                     omegas: np.ndarray, tau: TauWindow = TauWindow()) -> Spectrum:
    method = SpectrumMethod(method)
    if method is SpectrumMethod.ANALYTIC:
        return analytic_spectrum(coefficients(p), p.emf_prefactor, omegas)
    H = build_hamiltonian(p, basis)
    L = build_liouvillian(H, p)
    rho = steady_state(L).check()
    if method is SpectrumMethod.RESOLVENT:
        return spectrum_resolvent(L, rho, p, basis, omegas)
    if tau.span is not None:
        taus = np.linspace(0.0, tau.span, tau.samples)
    else:
        rate = _slowest_liouvillian_rate(L)
        try:
            rate = min(rate, coefficients(p).slowest_rate)
        except (ValueError, NamrError):
            pass
        taus = default_tau_grid(rate, tau.samples)
    return spectrum_from_trace(emf_correlation(L, rho, p, basis, taus), omegas, p)


def _closed_form_splitting(p: EffectiveParams) -> float | None:
    try:
        return analytic_splitting(coefficients(p))
    except (ValueError, NamrError):
        return None


def _peaks(s: Spectrum) -> PeakReport:
    try:
        return find_peaks(s)
    except NoPeaks:
        return PeakReport((), None, None)


def _echo_basis(b: BasisSpec) -> dict:
    return {"truncation": b.scheme.value, "nmax": b.cutoff, "dim": b.dim}


def _csv_name(label: str, value) -> str:
    if value is None:
        return "spectrum.csv"
    name, _ = label.split("=", 1)
    return f"spectrum_{name}_{value:g}.csv"


class _Diagnostics:
    def __init__(self):
        self.errors: list[str] = []

    def error(self, label: str, exc: NamrError) -> None:
        line = f"error [{label}]: {type(exc).__name__}: {exc}"
        self.errors.append(line)
        print(line, file=sys.stderr)


def _guarded(fn, *args):
    """Call ``fn`` and collect warnings as strings."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = fn(*args)
    notes = sorted({str(w.message) for w in caught})
    for n in notes:
        print(f"warning: {n}", file=sys.stderr)
    return result, notes


def run(cfg: RunConfig) -> int:
    """Compute every sweep point and write CSVs, ``summary.json`` and an optional plot script."""
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    diag = _Diagnostics()
    runs, csvs, titles = [], [], []
    for label, value, p, basis in cfg.points():
        try:
            omegas = cfg.omega.grid(p)
            spec, notes = _guarded(compute_spectrum, p, basis, cfg.method, omegas, cfg.tau)
        except NamrError as exc:
            diag.error(label, exc)
            continue
        name = _csv_name(label, value)
        export.write_csv(out / name, spec)
        csvs.append(name)
        titles.append(label)
        report = _peaks(spec)
        runs.append({
            "label": label,
            "sweep_value": value,
            "csv": name,
            "method": spec.method.value,
            "basis": _echo_basis(basis),
            "params": p.to_dict(),
            "omega_grid": {"min": float(omegas[0]), "max": float(omegas[-1]),
                           "points": int(omegas.size)},
            "lab_frame_offset": p.omega_p,
            **report.to_dict(),
            "analytic_splitting": _closed_form_splitting(p),
            "negative_dip": spec.has_negative_dip,
            "warnings": notes,
        })
    summary = {
        "schema_version": export.SCHEMA_VERSION,
        "command": "run",
        "source": cfg.source,
        "method": SpectrumMethod(cfg.method).value,
        "sweep": None if cfg.sweep is None else {"name": cfg.sweep.name,
                                                 "values": list(cfg.sweep.values)},
        "runs": runs,
        "errors": diag.errors,
    }
    export.write_json(out / "summary.json", summary)
    if cfg.emit_plot_script and csvs:
        export.write_plot_script(out / "plot.gp", csvs, titles)
    return 1 if diag.errors else 0


def compare_point(p: EffectiveParams, basis: BasisSpec, omegas: np.ndarray,
                  tolerance: float = 0.05, splitting_tolerance: float = 0.02) -> dict:
    """Analytic against resolvent spectrum on one grid."""
    s_an = compute_spectrum(p, basis, SpectrumMethod.ANALYTIC, omegas)
    s_num = compute_spectrum(p, basis, SpectrumMethod.RESOLVENT, omegas)
    scale = np.abs(s_num.values).max()
    diff = float(np.abs(s_an.values - s_num.values).max() / scale)
    r_an, r_num = _peaks(s_an), _peaks(s_num)
    split_diff = split_rel = None
    if r_an.splitting is not None and r_num.splitting is not None:
        split_diff = abs(r_an.splitting - r_num.splitting)
        split_rel = split_diff / r_num.splitting
        split_ok = split_rel <= splitting_tolerance
    else:
        split_ok = r_an.splitting is None and r_num.splitting is None
    return {
        "max_pointwise_diff": diff,
        "analytic_peaks": len(r_an.peaks),
        "resolvent_peaks": len(r_num.peaks),
        "analytic_peak_splitting": r_an.splitting,
        "resolvent_splitting": r_num.splitting,
        "splitting_diff": split_diff,
        "splitting_rel_diff": split_rel,
        "pass": bool(diff <= tolerance and split_ok),
    }


def compare(cfg: RunConfig) -> int:
    """Write ``compare.json``; exit status reflects module errors, not the verdicts."""
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    diag = _Diagnostics()
    runs = []
    for label, value, p, basis in cfg.points():
        try:
            omegas = cfg.omega.grid(p)
            result, notes = _guarded(compare_point, p, basis, omegas,
                                     cfg.tolerance, cfg.splitting_tolerance)
        except NamrError as exc:
            diag.error(label, exc)
            continue
        verdict = "PASS" if result["pass"] else "FAIL"
        print(f"{verdict} {label}: max diff {result['max_pointwise_diff']:.3g} of peak, "
              f"splitting diff {result['splitting_diff']}")
        runs.append({"label": label, "sweep_value": value, "basis": _echo_basis(basis),
                     "params": p.to_dict(), **result, "warnings": notes})
    report = {
        "schema_version": export.SCHEMA_VERSION,
        "command": "compare",
        "source": cfg.source,
        "tolerance": cfg.tolerance,
        "splitting_tolerance": cfg.splitting_tolerance,
        "runs": runs,
        "pass": bool(runs) and all(r["pass"] for r in runs) and not diag.errors,
        "errors": diag.errors,
    }
    export.write_json(out / "compare.json", report)
    return 1 if diag.errors else 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="INI parameter file")
    src.add_argument("--figure", type=int, choices=sorted(FIGURE_PRESETS),
                     help="built-in figure sweep")
    common.add_argument("--method", choices=[m.value for m in SpectrumMethod])
    common.add_argument("--nmax", type=int, help="truncation cutoff")
    common.add_argument("--truncation", choices=[t.value for t in Truncation])
    common.add_argument("--omega-min", type=float)
    common.add_argument("--omega-max", type=float)
    common.add_argument("--omega-points", type=int)
    common.add_argument("--out-dir", type=Path)
    common.add_argument("--emit-plot-script", action="store_true")
    common.add_argument("--tolerance", type=float,
                        help="compare: max pointwise difference relative to peak height")

    parser = argparse.ArgumentParser(prog="namrqed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="compute spectra and write CSV/JSON")
    sub.add_parser("compare", parents=[common], help="analytic vs resolvent diff report")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = FIGURE_PRESETS[args.figure] if args.figure is not None else load_config(args.config)
    changes: dict = {}
    if args.method:
        changes["method"] = SpectrumMethod(args.method)
    if args.nmax is not None or args.truncation:
        scheme = Truncation(args.truncation) if args.truncation else cfg.basis.scheme
        cutoff = args.nmax if args.nmax is not None else cfg.basis.cutoff
        if cutoff < 1:
            raise ConfigError("--nmax must be >= 1")
        changes["basis"] = BasisSpec(scheme, cutoff)
    if any(v is not None for v in (args.omega_min, args.omega_max, args.omega_points)):
        changes["omega"] = OmegaWindow(
            args.omega_min if args.omega_min is not None else cfg.omega.minimum,
            args.omega_max if args.omega_max is not None else cfg.omega.maximum,
            args.omega_points if args.omega_points is not None else cfg.omega.points,
        )
    if args.out_dir is not None:
        changes["out_dir"] = args.out_dir
    if args.emit_plot_script:
        changes["emit_plot_script"] = True
    if args.tolerance is not None:
        changes["tolerance"] = args.tolerance
    return dataclasses.replace(cfg, **changes).validate()


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return run(cfg) if args.command == "run" else compare(cfg)
    except NamrError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
