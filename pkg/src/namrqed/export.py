"""Flat-file outputs: spectrum CSVs, JSON summaries and a gnuplot script."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .spectrum import Spectrum

SCHEMA_VERSION = 1


def write_csv(path: Path, spectrum: Spectrum) -> None:
    lines = ["omega,s_v"]
    lines += [f"{w:.15g},{s:.15g}" for w, s in zip(spectrum.omegas, spectrum.values)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path: Path) -> tuple[list[float], list[float]]:
    rows = Path(path).read_text(encoding="utf-8").splitlines()
    if rows[0] != "omega,s_v":
        raise ValueError(f"unexpected header {rows[0]!r}")
    pairs = [tuple(map(float, r.split(","))) for r in rows[1:]]
    return [p[0] for p in pairs], [p[1] for p in pairs]


def write_json(path: Path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def load_schema(name: str = "summary") -> dict:
    ref = resources.files("namrqed") / "schema" / f"{name}-v{SCHEMA_VERSION}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def write_plot_script(path: Path, csv_names: list[str], titles: list[str]) -> None:
    """gnuplot commands overlaying every CSV; paths are relative to the script."""
    lines = [
        "# usage: gnuplot -p plot.gp  (run from this directory)",
        'set datafile separator ","',
        'set xlabel "omega (GHz, rotating frame)"',
        'set ylabel "S_V (arb. units)"',
    ]
    curves = [f'"{name}" using 1:2 skip 1 with lines title "{title}"'
              for name, title in zip(csv_names, titles)]
    lines.append("plot " + ", \\\n     ".join(curves))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
