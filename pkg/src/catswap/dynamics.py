"""Time evolution: pure-state Schrodinger and Lindblad-damped density matrices.

The model is the resonant rotating-wave interaction H = g(S_+ a + S_- a^dag)
with a single zero-temperature field-loss channel L = sqrt(Gamma) a. With this
canonical dissipator (L rho L^dag - {L^dag L, rho}/2) the field amplitude
decays as exp(-Gamma t / 2) and the photon number as exp(-Gamma t).

The integrator is classical fixed-step RK4 on the master-equation right-hand
side. Both H and L only shift the (Dicke, photon) indices by (+-1, +-1) and
(-1, -1), so the right-hand side is evaluated as a stencil of coefficient-
weighted shifted views of rho instead of matrix products; with rho Hermitian,
d(rho)/dt = M + M^dag + Gamma * a rho a^dag  for  M = (-iH - Gamma n/2) rho,
which also keeps the iterate Hermitian to the bit level. No superoperator
matrix is ever materialised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .config import HilbertConfig
from .errors import DimensionMismatch, PositivityViolation, StepSizeTooLarge
from .operators import OperatorMatrix
from .states import DensityMatrix, StateVector

NORM_DRIFT_TOL = 1e-9
TRACE_DRIFT_TOL = 1e-8
HERMITICITY_DRIFT_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-8


@dataclass(frozen=True)
class Timescales:
    """Characteristic collapse-and-revival times, all in units of 1/g."""

    rabi: float
    collapse: float
    revival: float
    first_revival: float


def timescales(g: float, n_bar: float, N: int) -> Timescales:
    """Rabi, collapse, revival and first-revival times for mean photon n_bar.

    rabi = pi/(g sqrt(n_bar)), collapse = sqrt(2)/g, revival = 2 pi
    sqrt(n_bar)/g and the N-qubit first revival at revival/N.
    """
    if n_bar <= 0:
        raise ValueError("n_bar must be > 0")
    if g <= 0:
        raise ValueError("g must be > 0")
    revival = 2.0 * math.pi * math.sqrt(n_bar) / g
    return Timescales(
        rabi=math.pi / (g * math.sqrt(n_bar)),
        collapse=math.sqrt(2.0) / g,
        revival=revival,
        first_revival=revival / N,
    )


@dataclass(frozen=True)
class Snapshot:
    """Full state captured at the integration step nearest a requested time."""

    time_requested: float
    time: float
    state: Union[StateVector, DensityMatrix]


@dataclass
class EvolutionSpec:
    """One trajectory: initial state, horizon, damping and what to record."""

    initial: Union[StateVector, DensityMatrix]
    t_final: float
    dt: float | None = None
    gamma: float = 0.0
    observables: Mapping[str, OperatorMatrix] = field(default_factory=dict)
    snapshot_times: Sequence[float] = ()
    record_stride: int | None = None

    def __post_init__(self):
        if self.initial.space != "composite":
            raise DimensionMismatch("evolution needs a composite-space state")
        if self.t_final < 0:
            raise ValueError("t_final must be >= 0")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        for t in self.snapshot_times:
            if t < -1e-12 or t > self.t_final + 1e-12:
                raise ValueError(f"snapshot time {t} outside [0, t_final]")
        for name, op in self.observables.items():
            if op.space != "composite":
                raise DimensionMismatch(f"observable {name!r} is not composite")

    @property
    def config(self) -> HilbertConfig:
        return self.initial.config


@dataclass
class EvolutionResult:
    """Sampled observable series plus requested full-state snapshots."""

    times: np.ndarray
    observables: dict[str, np.ndarray]
    snapshots: list[Snapshot]
    final: Union[StateVector, DensityMatrix]
    drift: float  # |norm - 1| (pure) or |trace - 1| (density) at t_final
    dt: float
    steps: int


def default_dt(cfg: HilbertConfig, t_final: float, n_bar: float | None = None) -> float:
    """Conservative fixed step: min(0.002/g, t_r1/20000) when the revival
    time is defined, otherwise resolves the run horizon with 20000 steps."""
    candidates = []
    if cfg.coupling > 0:
        candidates.append(0.002 / cfg.coupling)
        if n_bar is not None and n_bar > 0.5:
            ts = timescales(cfg.coupling, n_bar, cfg.qubit_count)
            candidates.append(ts.first_revival / 20000.0)
    if t_final > 0:
        candidates.append(t_final / 20000.0)
    if not candidates:
        return 1e-3
    return min(candidates)


def _plan_steps(spec: EvolutionSpec, n_bar: float):
    dt = spec.dt if spec.dt is not None else default_dt(
        spec.config, spec.t_final, n_bar
    )
    steps = max(0, int(round(spec.t_final / dt))) if spec.t_final > 0 else 0
    snap_steps = {}
    for t in spec.snapshot_times:
        idx = min(steps, max(0, int(round(t / dt)))) if steps else 0
        snap_steps.setdefault(idx, []).append(t)
    stride = spec.record_stride
    if stride is None:
        stride = max(1, steps // 4000)
    return dt, steps, snap_steps, stride


class _Stencil:
    """Shift coefficients of H and L on the (dicke, photon)-indexed arrays."""

    def __init__(self, cfg: HilbertConfig, gamma: float):
        N, F = cfg.qubit_count, cfg.field_dim
        self.N, self.F = N, F
        k = np.arange(N + 1, dtype=float)
        n = np.arange(F, dtype=float)
        ladder = np.sqrt(k[1:] * (N - k[1:] + 1.0))  # S_+ elements, k -> k-1
        photon = np.sqrt(n[1:])                      # a elements, n -> n-1
        g = cfg.coupling * cfg.hbar
        self.coup = (-1j * g) * np.outer(ladder, photon)  # (N, F-1)
        self.decay = (-0.5 * gamma) * n                   # diagonal of -G/2 n
        self.jump = gamma * np.outer(photon, photon)      # a rho a^dag weights

    def apply_hamiltonian_psi(self, psi4, out4):
        """out = -i H psi for psi shaped (N+1, F)."""
        N, F = self.N, self.F
        out4[...] = 0.0
        out4[:N, : F - 1] += self.coup * psi4[1:, 1:]
        out4[1:, 1:] += self.coup * psi4[:N, : F - 1]
        return out4

    def half_generator_rho(self, R, M):
        """M = (-iH - Gamma n/2) rho on arrays shaped (N+1, F, N+1, F)."""
        N, F = self.N, self.F
        np.multiply(R, self.decay[None, :, None, None], out=M)
        M[:N, : F - 1] += self.coup[:, :, None, None] * R[1:, 1:]
        M[1:, 1:] += self.coup[:, :, None, None] * R[:N, : F - 1]
        return M

    def add_jump_rho(self, R, out):
        """out += Gamma * a rho a^dag."""
        F = self.F
        out[:, : F - 1, :, : F - 1] += self.jump[None, :, None, :] * R[:, 1:, :, 1:]
        return out


class _ObservableSet:
    """Expectation evaluation with a fast path for diagonal operators."""

    def __init__(self, observables: Mapping[str, OperatorMatrix]):
        self.items = []
        for name, op in observables.items():
            mat = op.entries
            if np.count_nonzero(mat - np.diag(np.diagonal(mat))) == 0:
                self.items.append((name, np.diagonal(mat).copy(), True))
            else:
                self.items.append((name, mat, False))
        self.names = [nm for nm, _, _ in self.items]

    def eval_psi(self, psi):
        out = []
        for _, op, diag in self.items:
            if diag:
                out.append(complex(np.dot(op, np.abs(psi) ** 2)))
            else:
                out.append(complex(np.vdot(psi, op @ psi)))
        return out

    def eval_rho(self, rho):
        out = []
        for _, op, diag in self.items:
            if diag:
                out.append(complex(np.dot(op, np.diagonal(rho))))
            else:
                out.append(complex(np.einsum("ij,ji->", op, rho)))
        return out


def evolve_schrodinger(spec: EvolutionSpec) -> EvolutionResult:
    """Closed-system RK4 evolution of a pure state (requires gamma == 0).

    Raises StepSizeTooLarge if the norm drifts by more than 1e-9 over the run.
    """
    if spec.gamma != 0:
        raise ValueError("evolve_schrodinger requires gamma = 0")
    if not isinstance(spec.initial, StateVector):
        raise ValueError("evolve_schrodinger requires a pure StateVector")
    cfg = spec.config
    N, F = cfg.qubit_count, cfg.field_dim
    psi = spec.initial.amplitudes.astype(complex).reshape(N + 1, F).copy()
    nbar_diag = np.tile(np.arange(F, dtype=float), N + 1)
    n_bar = float(np.dot(nbar_diag, np.abs(psi.ravel()) ** 2))
    dt, steps, snap_steps, stride = _plan_steps(spec, n_bar)
    sten = _Stencil(cfg, 0.0)
    obs = _ObservableSet(spec.observables)

    k1, k2, k3, k4, stage = (np.empty_like(psi) for _ in range(5))
    times, series = [], []
    snapshots: list[Snapshot] = []

    def record(i):
        times.append(i * dt)
        series.append(obs.eval_psi(psi.ravel()))

    def snap(i):
        for t_req in snap_steps.get(i, ()):
            state = StateVector(cfg, psi.ravel() / np.linalg.norm(psi), "composite")
            snapshots.append(Snapshot(t_req, i * dt, state))

    record(0)
    snap(0)
    for i in range(1, steps + 1):
        sten.apply_hamiltonian_psi(psi, k1)
        np.multiply(k1, 0.5 * dt, out=stage); stage += psi
        sten.apply_hamiltonian_psi(stage, k2)
        np.multiply(k2, 0.5 * dt, out=stage); stage += psi
        sten.apply_hamiltonian_psi(stage, k3)
        np.multiply(k3, dt, out=stage); stage += psi
        sten.apply_hamiltonian_psi(stage, k4)
        k2 += k3
        k1 += k4
        k1 += 2.0 * k2
        k1 *= dt / 6.0
        psi += k1
        if i % stride == 0 or i == steps:
            record(i)
        snap(i)

    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise StepSizeTooLarge(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL}; reduce dt={dt}"
        )
    final = StateVector(cfg, psi.ravel() / np.linalg.norm(psi), "composite")
    return EvolutionResult(
        times=np.asarray(times),
        observables={nm: np.asarray([row[j] for row in series])
                     for j, nm in enumerate(obs.names)},
        snapshots=snapshots,
        final=final,
        drift=drift,
        dt=dt,
        steps=steps,
    )


def _validate_rho(cfg, rho, t, dt):
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_DRIFT_TOL:
        raise StepSizeTooLarge(
            f"trace drift {abs(tr - 1.0):.3e} at t={t:.4g} exceeds "
            f"{TRACE_DRIFT_TOL}; reduce dt={dt}"
        )
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > HERMITICITY_DRIFT_TOL:
        raise StepSizeTooLarge(
            f"hermiticity drift {herm:.3e} at t={t:.4g}"
        )
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < EIGENVALUE_FLOOR:
        raise PositivityViolation(
            f"eigenvalue {lo:.3e} below {EIGENVALUE_FLOOR} at t={t:.4g}",
            min_eigenvalue=lo,
        )


def evolve_lindblad(spec: EvolutionSpec) -> EvolutionResult:
    """Damped evolution of a density matrix under field loss L = sqrt(Gamma) a.

    Trace, hermiticity and positivity are validated at every snapshot and at
    the final time; violations raise StepSizeTooLarge / PositivityViolation.
    """
    cfg = spec.config
    N, F = cfg.qubit_count, cfg.field_dim
    D = cfg.dim
    if isinstance(spec.initial, StateVector):
        rho = np.outer(spec.initial.amplitudes, spec.initial.amplitudes.conj())
    else:
        rho = spec.initial.entries.astype(complex).copy()
    nbar_diag = np.tile(np.arange(F, dtype=float), N + 1)
    n_bar = float(np.dot(nbar_diag, np.diagonal(rho).real))
    dt, steps, snap_steps, stride = _plan_steps(spec, n_bar)
    sten = _Stencil(cfg, spec.gamma)
    obs = _ObservableSet(spec.observables)

    shape4 = (N + 1, F, N + 1, F)
    M = np.empty(shape4, dtype=complex)
    T = np.empty((D, D), dtype=complex)
    ks = [np.empty((D, D), dtype=complex) for _ in range(4)]
    stage = np.empty((D, D), dtype=complex)

    def rhs(r_flat, out_flat):
        R = r_flat.reshape(shape4)
        sten.half_generator_rho(R, M)
        Mf = M.reshape(D, D)
        np.conjugate(Mf.T, out=T)
        np.add(Mf, T, out=out_flat)
        sten.add_jump_rho(R, out_flat.reshape(shape4))
        return out_flat

    times, series = [], []
    snapshots: list[Snapshot] = []

    def record(i):
        times.append(i * dt)
        series.append(obs.eval_rho(rho))

    def snap(i):
        for t_req in snap_steps.get(i, ()):
            t = i * dt
            _validate_rho(cfg, rho, t, dt)
            state = DensityMatrix(cfg, 0.5 * (rho + rho.conj().T), "composite")
            snapshots.append(Snapshot(t_req, t, state))

    record(0)
    snap(0)
    for i in range(1, steps + 1):
        rhs(rho, ks[0])
        np.multiply(ks[0], 0.5 * dt, out=stage); stage += rho
        rhs(stage, ks[1])
        np.multiply(ks[1], 0.5 * dt, out=stage); stage += rho
        rhs(stage, ks[2])
        np.multiply(ks[2], dt, out=stage); stage += rho
        rhs(stage, ks[3])
        ks[1] += ks[2]
        ks[0] += ks[3]
        ks[0] += 2.0 * ks[1]
        ks[0] *= dt / 6.0
        rho += ks[0]
        if i % stride == 0 or i == steps:
            record(i)
        snap(i)

    drift = abs(float(np.trace(rho).real) - 1.0)
    _validate_rho(cfg, rho, steps * dt, dt)
    final = DensityMatrix(cfg, 0.5 * (rho + rho.conj().T), "composite")
    return EvolutionResult(
        times=np.asarray(times),
        observables={nm: np.asarray([row[j] for row in series])
                     for j, nm in enumerate(obs.names)},
        snapshots=snapshots,
        final=final,
        drift=drift,
        dt=dt,
        steps=steps,
    )
