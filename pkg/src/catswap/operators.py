"""Operator builders: field ladder, collective spin, Hamiltonian, multipoles.

All matrices are dense complex arrays; the largest composite dimension used in
practice is a few hundred, where dense algebra is simpler and fast enough.

Collective-spin convention: the returned matrices are standard angular-momentum
operators for total spin S = N/2 in the Dicke basis k = 0..N, with
S_z = diag(S - k). The '+' axis raises the projection (k -> k-1, matrix
element sqrt(k(N-k+1))), which is the collective sum of single-qubit Pauli
raising operators restricted to the symmetric sector. The ladder operator that
generates spin coherent states from the all-excited state is therefore
collective_spin(cfg, '-').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import HilbertConfig
from .errors import IndexOutOfRange, InvalidAngularMomentum

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on a Hilbert-space factor or the composite space."""

    config: HilbertConfig
    entries: np.ndarray
    space: str = "composite"
    hermitian_flag: bool = False

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator must be a square matrix")
        if self.hermitian_flag:
            dev = np.max(np.abs(mat - mat.conj().T))
            if dev > HERMITICITY_TOL:
                raise ValueError(f"hermitian_flag set but |A - A^dag| = {dev}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def annihilation(cfg: HilbertConfig) -> OperatorMatrix:
    """Field annihilation operator, <n-1|a|n> = sqrt(n), on the Fock factor.

    On the truncated basis [a, a^dag] = 1 everywhere except the last diagonal
    entry, which carries the truncation anomaly -n_max.
    """
    f = cfg.field_dim
    mat = np.diag(np.sqrt(np.arange(1, f, dtype=float)), k=1).astype(complex)
    return OperatorMatrix(cfg, mat, space="field")


def number_operator(cfg: HilbertConfig) -> OperatorMatrix:
    """Photon number operator a^dag a on the Fock factor."""
    mat = np.diag(np.arange(cfg.field_dim, dtype=float)).astype(complex)
    return OperatorMatrix(cfg, mat, space="field", hermitian_flag=True)


def collective_spin(cfg: HilbertConfig, axis: str) -> OperatorMatrix:
    """Collective spin operator S_axis for axis in {'x','y','z','+','-'}."""
    N = cfg.qubit_count
    S = cfg.total_spin
    k = np.arange(N + 1, dtype=float)
    ladder = np.sqrt(k[1:] * (N - k[1:] + 1.0))  # k -> k-1 elements
    raise_op = np.diag(ladder, k=1).astype(complex)
    if axis == "+":
        return OperatorMatrix(cfg, raise_op, space="spin")
    if axis == "-":
        return OperatorMatrix(cfg, raise_op.conj().T, space="spin")
    if axis == "x":
        mat = 0.5 * (raise_op + raise_op.conj().T)
        return OperatorMatrix(cfg, mat, space="spin", hermitian_flag=True)
    if axis == "y":
        mat = -0.5j * (raise_op - raise_op.conj().T)
        return OperatorMatrix(cfg, mat, space="spin", hermitian_flag=True)
    if axis == "z":
        mat = np.diag(S - k).astype(complex)
        return OperatorMatrix(cfg, mat, space="spin", hermitian_flag=True)
    raise ValueError(f"unknown axis {axis!r}")


def embed_spin(cfg: HilbertConfig, op: OperatorMatrix) -> OperatorMatrix:
    """Promote a spin-factor operator to the composite space."""
    mat = np.kron(op.entries, np.eye(cfg.field_dim))
    return OperatorMatrix(cfg, mat, space="composite",
                          hermitian_flag=op.hermitian_flag)


def embed_field(cfg: HilbertConfig, op: OperatorMatrix) -> OperatorMatrix:
    """Promote a field-factor operator to the composite space."""
    mat = np.kron(np.eye(cfg.spin_dim), op.entries)
    return OperatorMatrix(cfg, mat, space="composite",
                          hermitian_flag=op.hermitian_flag)


def tavis_cummings_hamiltonian(cfg: HilbertConfig) -> OperatorMatrix:
    """Resonant rotating-wave interaction  hbar*g*(S_+ a + S_- a^dag).

    Conserves the total excitation count (photons plus excited qubits); see
    excitation_number.
    """
    sp = collective_spin(cfg, "+").entries
    a = annihilation(cfg).entries
    mat = cfg.hbar * cfg.coupling * (
        np.kron(sp, a) + np.kron(sp.conj().T, a.conj().T)
    )
    return OperatorMatrix(cfg, mat, space="composite", hermitian_flag=True)


def excitation_number(cfg: HilbertConfig) -> OperatorMatrix:
    """Conserved excitation count: photons plus excited qubits, S + S_z + n.

    Commutes with the interaction Hamiltonian; under field damping its
    expectation is monotonically non-increasing.
    """
    sz = collective_spin(cfg, "z").entries
    spin_exc = cfg.total_spin * np.eye(cfg.spin_dim) + sz
    nop = number_operator(cfg).entries
    mat = np.kron(spin_exc, np.eye(cfg.field_dim)) + np.kron(
        np.eye(cfg.spin_dim), nop
    )
    return OperatorMatrix(cfg, mat, space="composite", hermitian_flag=True)


# ---------------------------------------------------------------------------
# Wigner 3j symbols (exact Racah sum over integer factorials)
# ---------------------------------------------------------------------------


def _doubled(x, name: str) -> int:
    d = round(2 * x)
    if abs(2 * x - d) > 1e-9:
        raise InvalidAngularMomentum(f"{name} = {x} is not half-integral")
    return int(d)


@dataclass(frozen=True)
class ThreeJSymbol:
    """3j symbol arguments stored as doubled integers (exact half-integers)."""

    dj1: int
    dj2: int
    dj3: int
    dm1: int
    dm2: int
    dm3: int

    @classmethod
    def from_values(cls, j1, j2, j3, m1, m2, m3) -> "ThreeJSymbol":
        vals = {}
        for name, x in zip(("j1", "j2", "j3", "m1", "m2", "m3"),
                           (j1, j2, j3, m1, m2, m3)):
            vals[name] = _doubled(x, name)
        for jn, mn in (("j1", "m1"), ("j2", "m2"), ("j3", "m3")):
            if vals[jn] < 0:
                raise InvalidAngularMomentum(f"{jn} must be non-negative")
            if (vals[jn] + vals[mn]) % 2 != 0:
                raise InvalidAngularMomentum(
                    f"{mn} must differ from {jn} by an integer"
                )
        return cls(vals["j1"], vals["j2"], vals["j3"],
                   vals["m1"], vals["m2"], vals["m3"])

    def selection_rules_hold(self) -> bool:
        dj1, dj2, dj3 = self.dj1, self.dj2, self.dj3
        dm1, dm2, dm3 = self.dm1, self.dm2, self.dm3
        if dm1 + dm2 + dm3 != 0:
            return False
        if abs(dm1) > dj1 or abs(dm2) > dj2 or abs(dm3) > dj3:
            return False
        if dj3 > dj1 + dj2 or dj3 < abs(dj1 - dj2):
            return False
        if (dj1 + dj2 + dj3) % 2 != 0:
            return False
        return True

    def value(self) -> float:
        if not self.selection_rules_hold():
            return 0.0
        # All of the following doubled combinations are even, so the integer
        # divisions are exact.
        j1pj2mj3 = (self.dj1 + self.dj2 - self.dj3) // 2
        j1mj2pj3 = (self.dj1 - self.dj2 + self.dj3) // 2
        mj1pj2pj3 = (-self.dj1 + self.dj2 + self.dj3) // 2
        jsum1 = (self.dj1 + self.dj2 + self.dj3) // 2 + 1
        delta = Fraction(
            math.factorial(j1pj2mj3)
            * math.factorial(j1mj2pj3)
            * math.factorial(mj1pj2pj3),
            math.factorial(jsum1),
        )
        j1pm1 = (self.dj1 + self.dm1) // 2
        j1mm1 = (self.dj1 - self.dm1) // 2
        j2pm2 = (self.dj2 + self.dm2) // 2
        j2mm2 = (self.dj2 - self.dm2) // 2
        j3pm3 = (self.dj3 + self.dm3) // 2
        j3mm3 = (self.dj3 - self.dm3) // 2
        norm = delta * (
            math.factorial(j1pm1) * math.factorial(j1mm1)
            * math.factorial(j2pm2) * math.factorial(j2mm2)
            * math.factorial(j3pm3) * math.factorial(j3mm3)
        )
        t_lo = max(0, (self.dj2 - self.dj3 - self.dm1) // 2,
                   (self.dj1 - self.dj3 + self.dm2) // 2)
        t_hi = min(j1pj2mj3, j1mm1, j2pm2)
        total = Fraction(0)
        for t in range(t_lo, t_hi + 1):
            denom = (
                math.factorial(t)
                * math.factorial(j1pj2mj3 - t)
                * math.factorial(j1mm1 - t)
                * math.factorial(j2pm2 - t)
                * math.factorial((self.dj3 - self.dj2 + self.dm1) // 2 + t)
                * math.factorial((self.dj3 - self.dj1 - self.dm2) // 2 + t)
            )
            total += Fraction((-1) ** t, denom)
        phase = -1 if ((self.dj1 - self.dj2 - self.dm3) // 2) % 2 else 1
        return phase * math.sqrt(float(norm)) * float(total)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Exact-arithmetic Wigner 3j symbol, returned as a double."""
    return ThreeJSymbol.from_values(j1, j2, j3, m1, m2, m3).value()


def multipole_operator(cfg: HilbertConfig, l: int, m: int) -> OperatorMatrix:
    """Spherical multipole T_l^m on the spin factor.

    The set {T_l^m : 0 <= l <= 2S, |m| <= l} is an orthonormal operator basis
    (Tr T_l^m T_l'^m'^dag = delta delta) with (T_l^m)^dag = (-1)^m T_l^-m.
    Matrix elements connect Dicke levels k and k+m.
    """
    N = cfg.qubit_count
    if not 0 <= l <= N:
        raise IndexOutOfRange(f"multipole rank l={l} outside 0..2S={N}")
    if abs(m) > l:
        raise IndexOutOfRange(f"|m|={abs(m)} exceeds l={l}")
    dS = N  # doubled total spin
    mat = np.zeros((cfg.spin_dim, cfg.spin_dim), dtype=complex)
    scale = math.sqrt(2 * l + 1)
    for k in range(cfg.spin_dim):
        kp = k + m  # projection n' = n - m
        if not 0 <= kp <= N:
            continue
        dn = dS - 2 * k
        dnp = dS - 2 * kp
        tj = ThreeJSymbol(dS, 2 * l, dS, -dn, 2 * m, dnp).value()
        mat[k, kp] = (-1) ** k * scale * tj
    return OperatorMatrix(cfg, mat, space="spin")
