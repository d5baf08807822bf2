"""Deterministic on-disk formats for grids, sweeps and observable series.

Every artifact is a CSV (data only, floats printed as %.12e) plus a JSON
sidecar of the same stem carrying axes, kind and metadata, so repeated runs
of an identical configuration produce byte-identical files.

Grid files: the CSV holds the value matrix (rows follow axis0); the sidecar
holds {"kind", "axis0_name", "axis1_name", "axis0", "axis1", "metadata"}.
Sweep files: CSV columns N, gamma, t, fidelity, spin_purity, field_nbar,
fidelity_sq, fidelity_ideal_cat, fidelity_ideal_cat_aligned; the sidecar
carries the provenance dict. Series files: CSV columns time plus one column
per observable (real parts; the largest imaginary residue is recorded in the
sidecar).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .analysis import SweepResult
from .tomography import WignerGrid

FLOAT_FMT = "%.12e"

_AXIS_NAMES = {
    "field_plane": ("q", "p"),
    "spin_sphere": ("theta", "phi"),
    "spin_lambert": ("r", "theta_p"),
}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(resolved_config: dict) -> str:
    """Stable hash of a fully resolved configuration dictionary."""
    return hashlib.sha256(canonical_json(resolved_config).encode()).hexdigest()[:16]


def _fixed(x: float) -> float:
    """Round-trip a float through the fixed output precision."""
    return float(FLOAT_FMT % float(x))


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_grid(grid: WignerGrid, stem: Path) -> list[Path]:
    """Write <stem>.csv / <stem>.json for a Wigner grid; returns both paths."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    np.savetxt(csv_path, grid.values, fmt=FLOAT_FMT, delimiter=",")
    ax0, ax1 = _AXIS_NAMES[grid.kind]
    meta = {
        k: (_fixed(v) if isinstance(v, float) else v)
        for k, v in sorted(grid.metadata.items())
    }
    _write_json(json_path, {
        "kind": grid.kind,
        "axis0_name": ax0,
        "axis1_name": ax1,
        "axis0": [_fixed(v) for v in grid.axis0],
        "axis1": [_fixed(v) for v in grid.axis1],
        "metadata": meta,
    })
    return [csv_path, json_path]


def read_grid(stem: Path) -> WignerGrid:
    """Read a grid written by write_grid (stem without suffix)."""
    stem = Path(stem)
    head = json.loads(stem.with_suffix(".json").read_text())
    values = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", ndmin=2)
    return WignerGrid(
        head["kind"],
        np.asarray(head["axis0"], dtype=float),
        np.asarray(head["axis1"], dtype=float),
        values,
        head.get("metadata", {}),
    )


SWEEP_COLUMNS = (
    "N", "gamma", "t", "fidelity", "spin_purity", "field_nbar",
    "fidelity_sq", "fidelity_ideal_cat", "fidelity_ideal_cat_aligned",
)


def write_sweep(sweep: SweepResult, stem: Path) -> list[Path]:
    """Write <stem>.csv / <stem>.json for a fidelity sweep."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    lines = [",".join(SWEEP_COLUMNS)]
    for r in sweep.rows:
        vals = [str(r.qubit_count)] + [
            FLOAT_FMT % v
            for v in (r.gamma, r.t, r.fidelity, r.spin_purity, r.field_nbar,
                      r.fidelity_sq, r.fidelity_ideal_cat,
                      r.fidelity_ideal_cat_aligned)
        ]
        lines.append(",".join(vals))
    csv_path.write_text("\n".join(lines) + "\n")
    json_path = stem.with_suffix(".json")
    _write_json(json_path, {"provenance": sweep.provenance,
                            "columns": list(SWEEP_COLUMNS)})
    return [csv_path, json_path]


def write_series(times, observables: dict, stem: Path, metadata: dict) -> list[Path]:
    """Write an observable time-series CSV plus sidecar.

    Complex expectation values are stored as real parts; the worst imaginary
    residue across all series goes into the sidecar metadata.
    """
    stem = Path(stem)
    names = sorted(observables)
    residue = 0.0
    cols = [np.asarray(times, dtype=float)]
    for nm in names:
        arr = np.asarray(observables[nm])
        if np.iscomplexobj(arr):
            residue = max(residue, float(np.max(np.abs(arr.imag))) if arr.size else 0.0)
            arr = arr.real
        cols.append(arr.astype(float))
    table = np.column_stack(cols)
    csv_path = stem.with_suffix(".csv")
    header = ",".join(["time"] + names)
    np.savetxt(csv_path, table, fmt=FLOAT_FMT, delimiter=",",
               header=header, comments="")
    meta = dict(metadata)
    meta["max_imag_residue"] = residue
    json_path = stem.with_suffix(".json")
    _write_json(json_path, {"columns": ["time"] + names, "metadata": meta})
    return [csv_path, json_path]
