"""State constructors on the (Dicke sector) x (truncated Fock) space.

Dicke-basis convention: index k = 0..N labels the symmetrised state with k
de-excited qubits, so k = 0 is the all-excited reference state with maximal
collective-spin projection S = N/2, and the projection of Dicke level k is
S - k. Spin coherent states |z, N> carry amplitude
(1+|z|^2)^(-N/2) * sqrt(C(N,k)) * z^k on level k, which is exactly the
symmetrised expansion of the product state  prod_k (|e> + z|g>)/sqrt(1+|z|^2).

Field states live on |0> .. |n_max>; composite states use the flat index
k*(n_max+1) + n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import HilbertConfig
from .errors import (
    DegenerateCatError,
    DegenerateCatWarning,
    DimensionMismatch,
    IndexOutOfRange,
    TruncationError,
)

NORM_TOL = 1e-10
# Largest coherent-amplitude mass allowed to fall beyond the Fock cutoff.
# The 6-sigma default cutoff leaves a one-sided tail of order 1e-9.
TAIL_TOL = 1e-8

_SPACE_DIMS = {
    "spin": lambda cfg: cfg.spin_dim,
    "field": lambda cfg: cfg.field_dim,
    "composite": lambda cfg: cfg.dim,
}


def _check_space(cfg: HilbertConfig, space: str, length: int):
    if space not in _SPACE_DIMS:
        raise ValueError(f"unknown space {space!r}")
    expect = _SPACE_DIMS[space](cfg)
    if length != expect:
        raise DimensionMismatch(
            f"{space} state needs length {expect}, got {length}"
        )


@dataclass(frozen=True)
class StateVector:
    """Normalised pure state on one factor or on the composite space."""

    config: HilbertConfig
    amplitudes: np.ndarray
    space: str = "composite"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        _check_space(self.config, self.space, amps.size)
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {nrm} deviates from 1 beyond {NORM_TOL}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "StateVector") -> complex:
        if other.dim != self.dim:
            raise DimensionMismatch("overlap between different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.vdot(self.amplitudes, operator @ self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(
            self.config,
            np.outer(self.amplitudes, self.amplitudes.conj()),
            space=self.space,
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian unit-trace density matrix on a factor or the composite space."""

    config: HilbertConfig
    entries: np.ndarray
    space: str = "composite"

    HERMITICITY_TOL = 1e-10
    TRACE_TOL = 1e-8
    EIGENVALUE_FLOOR = -1e-8

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        _check_space(self.config, self.space, rho.shape[0])
        rho = rho.copy()
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)
        self.validate()

    def validate(self):
        rho = self.entries
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > self.HERMITICITY_TOL:
            raise ValueError(f"hermiticity violation {herm}")
        tr = np.trace(rho)
        if abs(tr - 1.0) > self.TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1")
        lo = float(np.linalg.eigvalsh(rho)[0])
        if lo < self.EIGENVALUE_FLOOR:
            raise ValueError(f"negative eigenvalue {lo}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.einsum("ij,ji->", operator, self.entries))

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.entries, self.entries)))


def _coherent_amplitudes(field_dim: int, alpha: complex) -> tuple[np.ndarray, float]:
    """Unnormalised truncated coherent amplitudes and the discarded tail mass."""
    amps = np.zeros(field_dim, dtype=complex)
    amps[0] = 1.0
    for n in range(1, field_dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    amps *= math.exp(-0.5 * abs(alpha) ** 2)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    return amps, tail


def coherent_state(cfg: HilbertConfig, alpha: complex) -> StateVector:
    """Coherent field state of amplitude alpha (mean photon number |alpha|^2).

    The Poisson amplitudes are renormalised over the truncated basis; the
    discarded tail mass must stay below TAIL_TOL or TruncationError is raised.
    suggest_fock_cutoff picks a compliant cutoff.
    """
    amps, tail = _coherent_amplitudes(cfg.field_dim, alpha)
    if tail > TAIL_TOL:
        raise TruncationError(
            f"coherent tail mass {tail:.3e} beyond n_max={cfg.fock_cutoff} "
            f"exceeds {TAIL_TOL}; raise fock_cutoff"
        )
    amps /= np.linalg.norm(amps)
    return StateVector(cfg, amps, space="field")


def spin_coherent_state(cfg: HilbertConfig, z: complex) -> StateVector:
    """Spin coherent state |z, N>: every qubit polarised along (|e> + z|g>)."""
    N = cfg.qubit_count
    k = np.arange(N + 1)
    amps = np.sqrt([math.comb(N, int(kk)) for kk in k]) * np.power(
        complex(z), k, dtype=complex
    )
    amps /= (1.0 + abs(z) ** 2) ** (N / 2.0)
    amps /= np.linalg.norm(amps)
    return StateVector(cfg, amps, space="spin")


def dicke_state(cfg: HilbertConfig, k: int) -> StateVector:
    """Symmetrised basis state with k de-excited qubits (projection S - k)."""
    if not 0 <= k <= cfg.qubit_count:
        raise IndexOutOfRange(f"dicke index {k} outside 0..{cfg.qubit_count}")
    amps = np.zeros(cfg.spin_dim, dtype=complex)
    amps[k] = 1.0
    return StateVector(cfg, amps, space="spin")


def field_cat(cfg: HilbertConfig, alpha: complex, sign: int = +1) -> StateVector:
    """Field cat (|alpha> + sign*|-alpha>), normalised exactly.

    Exact normalisation (instead of the asymptotic 1/sqrt(2)) keeps the
    photon-number parity identities exact at small alpha.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if alpha == 0 and sign == -1:
        raise DegenerateCatError("cat of |0> minus |0> is the null vector")
    plus, tail_p = _coherent_amplitudes(cfg.field_dim, alpha)
    minus, tail_m = _coherent_amplitudes(cfg.field_dim, -alpha)
    if max(tail_p, tail_m) > TAIL_TOL:
        raise TruncationError(
            f"coherent tail mass {max(tail_p, tail_m):.3e} exceeds {TAIL_TOL}; "
            "raise fock_cutoff"
        )
    amps = plus + sign * minus
    nrm = np.linalg.norm(amps)
    return StateVector(cfg, amps / nrm, space="field")


def spin_cat(cfg: HilbertConfig, z: complex) -> StateVector:
    """Spin cat (|z,N> + |-z,N>)/norm, supported on even Dicke levels.

    z = 0 makes the branches coincide; the single coherent branch is returned
    with a DegenerateCatWarning instead of raising.
    """
    if z == 0:
        warnings.warn(
            "spin cat with z = 0 degenerates to the all-excited state",
            DegenerateCatWarning,
            stacklevel=2,
        )
        return dicke_state(cfg, 0)
    plus = spin_coherent_state(cfg, z).amplitudes
    minus = spin_coherent_state(cfg, -z).amplitudes
    amps = plus + minus
    return StateVector(cfg, amps / np.linalg.norm(amps), space="spin")


def product_state(spin: StateVector, field: StateVector) -> StateVector:
    """Tensor product (spin factor) x (field factor) on the composite space."""
    if spin.space != "spin" or field.space != "field":
        raise DimensionMismatch(
            f"need spin x field factors, got {spin.space} x {field.space}"
        )
    if spin.config != field.config:
        raise DimensionMismatch("factors built against different configs")
    amps = np.kron(spin.amplitudes, field.amplitudes)
    return StateVector(spin.config, amps, space="composite")
