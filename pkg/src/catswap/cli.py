"""Configuration-driven experiment runner.

Usage:
    catswap run <config.json> [--out DIR] [--threads K] [--dry-run]
    catswap timescales --g G --nbar NBAR --N N

A configuration is a single JSON object:

    {
      "scenario": "catswap_snapshots" | "fig2_wigner" | "fig3_sweep"
                  | "jc_collapse_revival" | "custom",
      "physics":  {"N": 5, "n_bar": 25.0, "z": 1.0, "g": 1.0,
                   "gamma": 0.0, "spin_state": "cat"},
      "numerics": {"n_max": null, "dt": null, "t_final": "t_r/N",
                   "snapshot_times": ["0", "t_r/2N", "t_r/N"],
                   "record_stride": null},
      "output":   {"directory": "out", "grid_resolution": 201,
                   "frames": {"interval": "t_r/100N"} | null}
    }

Times may be numbers or symbolic strings: rational multiples of t_R, t_c,
t_r, t_r1, optionally divided by an integer and/or N (e.g. "t_r/2N",
"3/4*t_r"). Symbolic times are resolved against the run's timescales before
execution and the resolved values are logged and embedded in output metadata.

Gamma conventions: physics.gamma is the canonical photon-number decay rate
of L = sqrt(gamma) a, except in the two figure-reproduction scenarios
(fig3_sweep, fig2_wigner) whose gamma values follow the figure axis, i.e.
amplitude-decay constants (canonical rate 2*gamma); sidecar metadata records
both numbers.

Exit status: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import analysis, fileio
from .config import HilbertConfig, suggest_fock_cutoff
from .dynamics import (
    EvolutionSpec,
    Timescales,
    evolve_lindblad,
    evolve_schrodinger,
    timescales,
)
from .errors import CatswapError, ConfigError
from .operators import (
    OperatorMatrix,
    collective_spin,
    embed_field,
    embed_spin,
    excitation_number,
    number_operator,
    tavis_cummings_hamiltonian,
)
from .states import (
    coherent_state,
    dicke_state,
    product_state,
    spin_cat,
    spin_coherent_state,
)
from .tomography import field_wigner, lambert_project, reduce_field, reduce_spins, spin_wigner

SCENARIOS = ("catswap_snapshots", "fig2_wigner", "fig3_sweep",
             "jc_collapse_revival", "custom")

_TIME_RE = re.compile(
    r"^\s*(?:(\d+)\s*(?:/\s*(\d+))?\s*\*\s*)?"
    r"(t_R|t_r1|t_r|t_c)"
    r"(?:\s*/\s*(\d*)\s*(N)?)?\s*$"
)

_BASES = {
    "t_R": "rabi",
    "t_c": "collapse",
    "t_r": "revival",
    "t_r1": "first_revival",
}


def resolve_time(expr, ts: Timescales, N: int) -> float:
    """Resolve a numeric or symbolic time expression against run timescales."""
    if isinstance(expr, (int, float)):
        return float(expr)
    text = str(expr)
    try:
        return float(text)
    except ValueError:
        pass
    m = _TIME_RE.match(text)
    if not m:
        raise ConfigError(
            f"cannot parse time expression {text!r}; expected forms like "
            "'t_r/2N', '3/4*t_r', 't_c', or a number"
        )
    num, den, base, div, n_flag = m.groups()
    value = getattr(ts, _BASES[base])
    if num:
        value *= int(num)
    if den:
        value /= int(den)
    if div:
        value /= int(div)
    if n_flag:
        value /= N
    return value


def _get(section: dict, key: str, default, types, path: str):
    val = section.get(key, default)
    if val is None:
        return None
    if not isinstance(val, types):
        raise ConfigError(f"{path}.{key}: expected {types}, got {type(val).__name__}")
    return val


def load_config(path: Path) -> dict:
    """Parse and structurally validate a configuration file."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"scenario: expected one of {SCENARIOS}, got {scenario!r}"
        )
    for section in ("physics", "numerics", "output"):
        if section in raw and not isinstance(raw[section], dict):
            raise ConfigError(f"{section}: must be an object")
    phys = raw.get("physics", {})
    _get(phys, "n_bar", 25.0, (int, float), "physics")
    _get(phys, "g", 1.0, (int, float), "physics")
    _get(phys, "z", 1.0, (int, float, list), "physics")
    _get(phys, "gamma", 0.0, (int, float, list), "physics")
    _get(phys, "N", None, (int, list), "physics")
    spin_state = _get(phys, "spin_state", "cat", str, "physics")
    if spin_state not in ("cat", "coherent", "excited"):
        raise ConfigError(
            f"physics.spin_state: expected cat|coherent|excited, got {spin_state!r}"
        )
    num = raw.get("numerics", {})
    _get(num, "n_max", None, int, "numerics")
    _get(num, "dt", None, (int, float), "numerics")
    _get(num, "record_stride", None, int, "numerics")
    snaps = num.get("snapshot_times")
    if snaps is not None and not isinstance(snaps, list):
        raise ConfigError("numerics.snapshot_times: must be a list")
    out = raw.get("output", {})
    _get(out, "grid_resolution", 201, int, "output")
    frames = out.get("frames")
    if frames is not None:
        if not isinstance(frames, dict) or "interval" not in frames:
            raise ConfigError("output.frames: must be an object with 'interval'")
    return raw


def _z_value(phys: dict) -> complex:
    z = phys.get("z", 1.0)
    if isinstance(z, list):
        if len(z) != 2:
            raise ConfigError("physics.z: list form must be [re, im]")
        return complex(z[0], z[1])
    return complex(z)


def _initial_state(cfg: HilbertConfig, phys: dict):
    z = _z_value(phys)
    n_bar = float(phys.get("n_bar", 25.0))
    kind = phys.get("spin_state", "cat")
    if kind == "cat":
        spin = spin_cat(cfg, z)
    elif kind == "coherent":
        spin = spin_coherent_state(cfg, z)
    else:
        spin = dicke_state(cfg, 0)
    return product_state(spin, coherent_state(cfg, math.sqrt(n_bar)))


def standard_observables(cfg: HilbertConfig) -> dict[str, OperatorMatrix]:
    """Named composite-space observables available to scenario configs."""
    sz = collective_spin(cfg, "z")
    sz_mean = OperatorMatrix(cfg, sz.entries / cfg.total_spin, space="spin",
                             hermitian_flag=True)
    return {
        "photon_number": embed_field(cfg, number_operator(cfg)),
        "excitation": excitation_number(cfg),
        "sz_mean": embed_spin(cfg, sz_mean),
        "energy": tavis_cummings_hamiltonian(cfg),
    }


class _Runner:
    def __init__(self, raw: dict, out_dir: Path, threads, dry_run: bool):
        self.raw = raw
        self.out_dir = Path(out_dir)
        self.threads = threads
        self.dry_run = dry_run
        self.phys = raw.get("physics", {})
        self.num = raw.get("numerics", {})
        self.out = raw.get("output", {})
        self.scenario = raw["scenario"]
        self.written: list[Path] = []
        self.resolved: dict = {"scenario": self.scenario}

    # -- helpers ----------------------------------------------------------
    def _cfg(self, N: int) -> HilbertConfig:
        n_bar = float(self.phys.get("n_bar", 25.0))
        n_max = self.num.get("n_max") or suggest_fock_cutoff(n_bar)
        return HilbertConfig(N, n_max, coupling=float(self.phys.get("g", 1.0)))

    def _times(self, N: int) -> Timescales:
        return timescales(float(self.phys.get("g", 1.0)),
                          float(self.phys.get("n_bar", 25.0)), N)

    def _log(self, msg: str):
        print(msg)

    def _emit(self, paths):
        self.written.extend(paths)

    def _hash(self) -> str:
        return fileio.config_hash(self.resolved)

    def _grid_stem(self, name: str) -> Path:
        return self.out_dir / name

    def _evolve(self, cfg, psi0, t_final, gamma_canonical, snapshot_times,
                observables=None, record_stride=None):
        spec_kwargs = dict(
            t_final=t_final,
            dt=self.num.get("dt"),
            snapshot_times=snapshot_times,
            observables=observables or {},
            record_stride=self.num.get("record_stride", record_stride),
        )
        if gamma_canonical == 0.0:
            return evolve_schrodinger(EvolutionSpec(initial=psi0, **spec_kwargs))
        return evolve_lindblad(
            EvolutionSpec(initial=psi0.to_density(), gamma=gamma_canonical,
                          **spec_kwargs)
        )

    def _write_wigner_pair(self, state, cfg, stem_base, meta):
        rho = state.to_density() if hasattr(state, "amplitudes") else state
        res = int(self.out.get("grid_resolution", 201))
        grid_f = field_wigner(reduce_field(rho), resolution=res, metadata=meta)
        self._emit(fileio.write_grid(grid_f, self._grid_stem(f"{stem_base}_field")))
        sphere = spin_wigner(reduce_spins(rho), theta_res=res, phi_res=res,
                             metadata=meta)
        self._emit(fileio.write_grid(lambert_project(sphere),
                                     self._grid_stem(f"{stem_base}_spin")))

    # -- scenarios --------------------------------------------------------
    def run_catswap_snapshots(self):
        N = int(self.phys.get("N") or 5)
        cfg = self._cfg(N)
        ts = self._times(N)
        gamma = float(self.phys.get("gamma", 0.0))
        exprs = self.num.get("snapshot_times") or ["0", "t_r/2N", "t_r/N"]
        snap_times = [resolve_time(e, ts, N) for e in exprs]
        t_final = max(snap_times)
        self.resolved.update({
            "N": N, "n_max": cfg.fock_cutoff, "gamma_canonical": gamma,
            "snapshot_times": snap_times, "t_final": t_final,
        })
        for e, t in zip(exprs, snap_times):
            self._log(f"resolved snapshot {e!r} -> t = {t:.6f}")
        if self.dry_run:
            return
        psi0 = _initial_state(cfg, self.phys)
        result = self._evolve(cfg, psi0, t_final, gamma, snap_times)
        for idx, snap in enumerate(result.snapshots):
            meta = {
                "time": snap.time, "time_requested": snap.time_requested,
                "gamma_canonical": gamma, "N": N,
                "n_bar": float(self.phys.get("n_bar", 25.0)),
                "config_hash": self._hash(),
            }
            self._write_wigner_pair(snap.state, cfg, f"snapshot_t{idx}", meta)
        self._maybe_frames(cfg, ts, N, gamma)

    def run_fig2_wigner(self):
        Ns = self.phys.get("N") or [4, 5]
        if isinstance(Ns, int):
            Ns = [Ns]
        gamma_axis = float(self.phys.get("gamma", 1e-3))
        self.resolved.update({"N_list": Ns, "gamma_axis": gamma_axis,
                              "gamma_canonical": 2.0 * gamma_axis})
        if self.dry_run:
            for N in Ns:
                t1 = self._times(N).first_revival
                self._log(f"N={N}: t_r/N = {t1:.6f}")
            return
        for N in Ns:
            cfg = self._cfg(int(N))
            ts = self._times(int(N))
            t1 = ts.first_revival
            self._log(f"N={N}: resolved t_r/N -> {t1:.6f}")
            psi0 = _initial_state(cfg, self.phys)
            result = self._evolve(cfg, psi0, t1, 2.0 * gamma_axis, [t1])
            rho = result.snapshots[0].state
            meta = {
                "time": result.snapshots[0].time, "N": int(N),
                "gamma_axis": gamma_axis, "gamma_canonical": 2.0 * gamma_axis,
                "n_bar": float(self.phys.get("n_bar", 25.0)),
                "config_hash": self._hash(),
            }
            res = int(self.out.get("grid_resolution", 201))
            sphere = spin_wigner(reduce_spins(rho), theta_res=res,
                                 phi_res=res, metadata=meta)
            self._emit(fileio.write_grid(
                lambert_project(sphere), self._grid_stem(f"fig2_N{int(N)}_spin")
            ))

    def run_fig3_sweep(self):
        Ns = self.phys.get("N") or [2, 3, 4, 5, 6]
        if isinstance(Ns, int):
            Ns = [Ns]
        gammas = self.phys.get("gamma", [1e-4, 1e-3, 1e-2, 1e-1])
        if isinstance(gammas, (int, float)):
            gammas = [gammas]
        self.resolved.update({
            "N_list": list(map(int, Ns)),
            "gamma_list_axis_convention": list(map(float, gammas)),
            "n_bar": float(self.phys.get("n_bar", 25.0)),
            "z": [float(np.real(_z_value(self.phys))),
                  float(np.imag(_z_value(self.phys)))],
        })
        for N in Ns:
            self._log(
                f"N={N}: measuring at t_r/N = {self._times(int(N)).first_revival:.6f}"
            )
        if self.dry_run:
            return
        sweep = analysis.run_fig3_sweep(
            [int(n) for n in Ns], [float(gm) for gm in gammas],
            n_bar=float(self.phys.get("n_bar", 25.0)),
            z=_z_value(self.phys),
            n_max=self.num.get("n_max"),
            dt=self.num.get("dt"),
            g=float(self.phys.get("g", 1.0)),
            workers=self.threads,
        )
        sweep.provenance["config_hash"] = self._hash()
        self._emit(fileio.write_sweep(sweep, self.out_dir / "sweep"))

    def run_jc_collapse_revival(self):
        N = int(self.phys.get("N") or 1)
        cfg = self._cfg(N)
        ts = self._times(N)
        expr = self.num.get("t_final", "23/20*t_r")
        t_final = resolve_time(expr, ts, N)
        gamma = float(self.phys.get("gamma", 0.0))
        self.resolved.update({"N": N, "t_final": t_final,
                              "gamma_canonical": gamma})
        self._log(f"resolved t_final {expr!r} -> {t_final:.6f}")
        if self.dry_run:
            return
        spin = dicke_state(cfg, 0)
        psi0 = product_state(
            spin, coherent_state(cfg, math.sqrt(float(self.phys.get("n_bar", 25.0))))
        )
        obs = standard_observables(cfg)
        wanted = {"sz_mean": obs["sz_mean"], "photon_number": obs["photon_number"]}
        result = self._evolve(cfg, psi0, t_final, gamma, [], observables=wanted,
                              record_stride=1)
        meta = {"N": N, "gamma_canonical": gamma,
                "n_bar": float(self.phys.get("n_bar", 25.0)),
                "config_hash": self._hash()}
        self._emit(fileio.write_series(result.times, result.observables,
                                       self.out_dir / "series", meta))

    def run_custom(self):
        N = int(self.phys.get("N") or 2)
        cfg = self._cfg(N)
        ts = self._times(N)
        if "t_final" not in self.num:
            raise ConfigError("numerics.t_final: required for the custom scenario")
        t_final = resolve_time(self.num["t_final"], ts, N)
        snap_exprs = self.num.get("snapshot_times") or []
        snap_times = [resolve_time(e, ts, N) for e in snap_exprs]
        gamma = float(self.phys.get("gamma", 0.0))
        names = self.out.get("observables", ["photon_number", "excitation"])
        self.resolved.update({"N": N, "t_final": t_final,
                              "snapshot_times": snap_times,
                              "gamma_canonical": gamma, "observables": names})
        self._log(f"resolved t_final -> {t_final:.6f}")
        if self.dry_run:
            return
        registry = standard_observables(cfg)
        unknown = [n for n in names if n not in registry]
        if unknown:
            raise ConfigError(
                f"output.observables: unknown names {unknown}; "
                f"available {sorted(registry)}"
            )
        psi0 = _initial_state(cfg, self.phys)
        result = self._evolve(cfg, psi0, t_final, gamma, snap_times,
                              observables={n: registry[n] for n in names})
        meta = {"N": N, "gamma_canonical": gamma, "config_hash": self._hash()}
        self._emit(fileio.write_series(result.times, result.observables,
                                       self.out_dir / "series", meta))
        for idx, snap in enumerate(result.snapshots):
            smeta = dict(meta, time=snap.time, time_requested=snap.time_requested)
            self._write_wigner_pair(snap.state, cfg, f"snapshot_t{idx}", smeta)
        self._maybe_frames(cfg, ts, N, gamma)

    # -- frame export -----------------------------------------------------
    def _maybe_frames(self, cfg, ts, N, gamma):
        frames = self.out.get("frames")
        if not frames:
            return
        interval = resolve_time(frames["interval"], ts, N)
        if interval <= 0:
            raise ConfigError("output.frames.interval: must resolve to > 0")
        t_final = resolve_time(
            frames.get("t_final", self.resolved.get("t_final", ts.first_revival)),
            ts, N,
        )
        count = int(math.floor(t_final / interval + 1e-9)) + 1
        self._log(f"exporting {count} frames every {interval:.6f} time units")
        frame_times = [i * interval for i in range(count)]
        psi0 = _initial_state(cfg, self.phys)
        result = self._evolve(cfg, psi0, t_final, gamma, frame_times)
        written_before = len(self.written)
        try:
            for idx, snap in enumerate(result.snapshots):
                meta = {
                    "frame": idx, "time": snap.time,
                    "time_requested": snap.time_requested,
                    "gamma_canonical": gamma, "N": N,
                    "config_hash": self._hash(),
                }
                self._write_wigner_pair(snap.state, cfg, f"frame_{idx:04d}", meta)
        except OSError as exc:
            for p in self.written[written_before:]:
                Path(p).unlink(missing_ok=True)
            del self.written[written_before:]
            raise CatswapError(f"frame export aborted ({exc}); partial series removed")

    def run(self) -> list[Path]:
        if not self.dry_run:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        getattr(self, f"run_{self.scenario}")()
        return self.written


def export_frames(raw_config: dict, out_dir, threads=None) -> list[Path]:
    """Run the configured scenario's frame export (output.frames required)."""
    if not raw_config.get("output", {}).get("frames"):
        raise ConfigError("output.frames: required for frame export")
    runner = _Runner(raw_config, Path(out_dir), threads, dry_run=False)
    runner.out_dir.mkdir(parents=True, exist_ok=True)
    phys = runner.phys
    N = int(phys.get("N") or 5)
    cfg = runner._cfg(N)
    ts = runner._times(N)
    runner.resolved.update({"N": N, "frames": raw_config["output"]["frames"]})
    runner._maybe_frames(cfg, ts, N, float(phys.get("gamma", 0.0)))
    return runner.written


def run(config_path, out_dir=None, threads=None, dry_run=False) -> list[Path]:
    """Execute a configuration file; returns the list of written files."""
    raw = load_config(Path(config_path))
    target = Path(out_dir) if out_dir else Path(
        raw.get("output", {}).get("directory", "catswap_out")
    )
    runner = _Runner(raw, target, threads, dry_run)
    return runner.run()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="catswap",
        description="cat-state swap simulations between qubits and a lossy field",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a JSON experiment configuration")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None)
    p_run.add_argument("--threads", type=int, default=None)
    p_run.add_argument("--dry-run", action="store_true")

    p_ts = sub.add_parser("timescales", help="print collapse/revival timescales")
    p_ts.add_argument("--g", type=float, required=True)
    p_ts.add_argument("--nbar", type=float, required=True)
    p_ts.add_argument("--N", type=int, required=True)

    args = parser.parse_args(argv)

    if args.command == "timescales":
        try:
            ts = timescales(args.g, args.nbar, args.N)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        for name in ("rabi", "collapse", "revival", "first_revival"):
            print(f"{name} = {getattr(ts, name):.12g}")
        return 0

    threads = args.threads
    if threads is None:
        env = os.environ.get("CATSWAP_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                print(f"error: CATSWAP_THREADS={env!r} is not an integer",
                      file=sys.stderr)
                return 1
    try:
        written = run(args.config, out_dir=args.out, threads=threads,
                      dry_run=args.dry_run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CatswapError as exc:
        print(f"numerical failure [{args.config}]: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
