"""Collapse-and-revival cat-state swapping between a qubit ensemble and a
lossy bosonic mode: states, operators, Lindblad dynamics, Wigner tomography
and fidelity sweeps. See README.md for the physics conventions."""

from .analysis import (
    SweepResult,
    SweepRow,
    analytic_damped_cat_fidelity,
    fidelity_pure_target,
    linear_entropy,
    run_fig3_sweep,
    uhlmann_fidelity,
)
from .config import HilbertConfig, suggest_fock_cutoff
from .dynamics import (
    EvolutionResult,
    EvolutionSpec,
    Snapshot,
    Timescales,
    evolve_lindblad,
    evolve_schrodinger,
    timescales,
)
from .operators import (
    OperatorMatrix,
    ThreeJSymbol,
    annihilation,
    collective_spin,
    embed_field,
    embed_spin,
    excitation_number,
    multipole_operator,
    number_operator,
    tavis_cummings_hamiltonian,
    wigner_3j,
)
from .states import (
    DensityMatrix,
    StateVector,
    coherent_state,
    dicke_state,
    field_cat,
    product_state,
    spin_cat,
    spin_coherent_state,
)
from .tomography import (
    WignerGrid,
    field_wigner,
    field_wigner_quadrature_oracle,
    lambert_project,
    reduce_field,
    reduce_spins,
    spin_wigner,
)

__version__ = "0.1.0"

__all__ = [
    "HilbertConfig", "suggest_fock_cutoff",
    "StateVector", "DensityMatrix",
    "coherent_state", "spin_coherent_state", "dicke_state",
    "field_cat", "spin_cat", "product_state",
    "OperatorMatrix", "ThreeJSymbol",
    "annihilation", "number_operator", "collective_spin",
    "tavis_cummings_hamiltonian", "excitation_number",
    "embed_spin", "embed_field", "wigner_3j", "multipole_operator",
    "Timescales", "timescales", "EvolutionSpec", "EvolutionResult",
    "Snapshot", "evolve_schrodinger", "evolve_lindblad",
    "WignerGrid", "reduce_field", "reduce_spins",
    "field_wigner", "field_wigner_quadrature_oracle",
    "spin_wigner", "lambert_project",
    "fidelity_pure_target", "uhlmann_fidelity",
    "analytic_damped_cat_fidelity", "linear_entropy",
    "run_fig3_sweep", "SweepResult", "SweepRow",
]
