"""Problem dimensions and unit conventions.

Everything downstream works in units of the qubit-field coupling: hbar = 1,
times in 1/g, decay rates in g. The composite Hilbert space is the
permutation-symmetric (Dicke) sector of the qubits tensored with a truncated
Fock space, so its dimension is (N+1) * (n_max+1) rather than 2^N * (n_max+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def suggest_fock_cutoff(n_bar: float) -> int:
    """Default Fock truncation for a coherent field of mean photon number n_bar.

    Keeps the Poisson tail beyond the cutoff under ~1e-10 (6 sigma) and never
    goes below 60 so the interaction ladder of a handful of qubits stays
    comfortably inside the basis. Damping only shrinks the photon number.
    """
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    return max(60, math.ceil(n_bar + 6.0 * math.sqrt(n_bar)))


@dataclass(frozen=True)
class HilbertConfig:
    """Dimensions of the composite (Dicke sector) x (Fock) problem.

    Attributes
    ----------
    qubit_count : number of identical qubits N (>= 1)
    fock_cutoff : highest retained photon number n_max (>= 1); the field basis
        is |0> ... |n_max>
    coupling : qubit-field coupling g in angular-frequency units; g = 0 is
        allowed so pure-damping reference dynamics can run
    """

    qubit_count: int
    fock_cutoff: int
    coupling: float = 1.0
    hbar: float = field(default=1.0, init=False)

    def __post_init__(self):
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be >= 1")
        if self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be >= 1")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")

    @property
    def spin_dim(self) -> int:
        """Dimension N+1 of the symmetric qubit sector."""
        return self.qubit_count + 1

    @property
    def field_dim(self) -> int:
        """Dimension n_max+1 of the truncated Fock space."""
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        """Composite dimension D = (N+1)(n_max+1)."""
        return self.spin_dim * self.field_dim

    @property
    def total_spin(self) -> float:
        """Collective spin S = N/2 of the symmetric sector."""
        return 0.5 * self.qubit_count

    def flat_index(self, dicke_index: int, photon_number: int) -> int:
        """Flat composite index of basis state |dicke_index> x |photon_number>."""
        return dicke_index * self.field_dim + photon_number
