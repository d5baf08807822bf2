import math

import numpy as np
import pytest

from catswap.config import HilbertConfig
from catswap.errors import IndexOutOfRange, InvalidAngularMomentum
from catswap.operators import (
    OperatorMatrix,
    annihilation,
    collective_spin,
    excitation_number,
    multipole_operator,
    number_operator,
    tavis_cummings_hamiltonian,
    wigner_3j,
)

from cg_oracle import three_j_oracle


# -------------------------------------------------------------- field ops

def test_annihilation_matrix_elements():
    cfg = HilbertConfig(1, 10)
    a = annihilation(cfg).entries
    vac = np.zeros(11)
    vac[0] = 1
    assert np.linalg.norm(a @ vac) == 0.0
    assert a[4, 5] == pytest.approx(math.sqrt(5))


def test_commutator_truncation_anomaly():
    cfg = HilbertConfig(1, 12)
    a = annihilation(cfg).entries
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(13)
    expected[-1, -1] = -12  # closure of the truncated ladder
    assert np.allclose(comm, expected, atol=1e-12)


# ---------------------------------------------------------- collective spin

def test_collective_spin_single_qubit_is_half_pauli():
    cfg = HilbertConfig(1, 4)
    sz = collective_spin(cfg, "z").entries
    # standard angular momentum normalisation: eigenvalues S - k = +-1/2
    assert np.allclose(sz, np.diag([0.5, -0.5]))


@pytest.mark.parametrize("N", range(1, 7))
def test_collective_spin_commutator(N):
    cfg = HilbertConfig(N, 4)
    sx = collective_spin(cfg, "x").entries
    sy = collective_spin(cfg, "y").entries
    sz = collective_spin(cfg, "z").entries
    assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-13


def test_reference_state_is_maximal_projection():
    cfg = HilbertConfig(5, 4)
    sz = collective_spin(cfg, "z").entries
    e0 = np.zeros(6)
    e0[0] = 1
    assert np.allclose(sz @ e0, cfg.total_spin * e0)


def test_ladder_elements():
    cfg = HilbertConfig(4, 4)
    sp = collective_spin(cfg, "+").entries
    for k in range(1, 5):
        assert sp[k - 1, k] == pytest.approx(math.sqrt(k * (4 - k + 1)))


# ----------------------------------------------------------- Hamiltonian

def test_hamiltonian_one_photon_block():
    cfg = HilbertConfig(1, 1, coupling=1.0)
    H = tavis_cummings_hamiltonian(cfg).entries
    # basis (k, n): |e,0> = 0, |e,1> = 1, |g,0> = 2, |g,1> = 3; the single
    # one-photon Rabi pair couples |e,0> <-> |g,1> with strength g
    assert H[0, 3] == pytest.approx(1.0)
    assert H[3, 0] == pytest.approx(1.0)
    rest = H.copy()
    rest[0, 3] = rest[3, 0] = 0.0
    assert np.max(np.abs(rest)) == 0.0


def test_hamiltonian_expectation_real():
    cfg = HilbertConfig(3, 8)
    H = tavis_cummings_hamiltonian(cfg).entries
    rng = np.random.default_rng(7)
    for _ in range(100):
        psi = rng.normal(size=cfg.dim) + 1j * rng.normal(size=cfg.dim)
        psi /= np.linalg.norm(psi)
        val = np.vdot(psi, H @ psi)
        assert abs(val.imag) < 1e-12


def test_hamiltonian_conserves_excitation():
    cfg = HilbertConfig(4, 10)
    H = tavis_cummings_hamiltonian(cfg).entries
    nex = excitation_number(cfg).entries
    assert np.max(np.abs(H @ nex - nex @ H)) < 1e-12


def test_hamiltonian_hermitian():
    cfg = HilbertConfig(6, 12)
    H = tavis_cummings_hamiltonian(cfg).entries
    assert np.max(np.abs(H - H.conj().T)) < 1e-12


# ------------------------------------------------------------- 3j symbols

def test_three_j_l0_closed_form():
    for twoS in range(1, 7):
        S = twoS / 2
        for k in range(twoS + 1):
            n = S - k
            want = (-1) ** int(round(S - n)) / math.sqrt(twoS + 1)
            assert wigner_3j(S, 0, S, -n, 0, n) == pytest.approx(want, abs=1e-14)


def test_three_j_selection_rules():
    assert wigner_3j(1, 1, 1, 1, 1, 1) == 0.0  # m-sum nonzero
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle violated
    assert wigner_3j(0.5, 0.5, 0.5, 0.5, -0.5, 0.5) == 0.0  # half-odd m-sum


def test_three_j_against_ladder_oracle_value():
    # frozen from the ladder construction (equals 1/sqrt(6))
    assert wigner_3j(0.5, 1, 0.5, -0.5, 0, 0.5) == pytest.approx(
        0.4082482904638631, abs=1e-13
    )


def test_three_j_against_ladder_oracle_sweep():
    worst = 0.0
    for N in range(1, 7):
        S = N / 2
        for l in range(0, N + 1):
            for m in range(-l, l + 1):
                for k in range(N + 1):
                    kp = k + m
                    if not 0 <= kp <= N:
                        continue
                    n, npr = S - k, S - kp
                    a = wigner_3j(S, l, S, -n, m, npr)
                    b = three_j_oracle(S, l, S, -n, m, npr)
                    worst = max(worst, abs(a - b))
    assert worst < 1e-12


def test_three_j_permutation_symmetries():
    for N in range(1, 7):
        S = N / 2
        for l in range(0, N + 1):
            for m in range(-l, l + 1):
                for k in range(N + 1):
                    kp = k + m
                    if not 0 <= kp <= N:
                        continue
                    n, npr = S - k, S - kp
                    base = wigner_3j(S, l, S, -n, m, npr)
                    cyclic = wigner_3j(l, S, S, m, npr, -n)
                    assert cyclic == pytest.approx(base, abs=1e-13)
                    swapped = wigner_3j(l, S, S, m, -n, npr)
                    phase = (-1) ** int(round(2 * S + l))
                    assert swapped == pytest.approx(phase * base, abs=1e-13)


def test_three_j_invalid_arguments():
    with pytest.raises(InvalidAngularMomentum):
        wigner_3j(0.3, 1, 0.5, 0, 0, 0)
    with pytest.raises(InvalidAngularMomentum):
        wigner_3j(0.5, 1, 0.5, 0.0, 0, 0.0)  # m not half-odd for j=1/2


# -------------------------------------------------------------- multipoles

def test_multipole_rank0_is_scaled_identity():
    cfg = HilbertConfig(5, 4)
    t00 = multipole_operator(cfg, 0, 0).entries
    assert np.allclose(t00, np.eye(6) / math.sqrt(6), atol=1e-14)


@pytest.mark.parametrize("N", range(1, 7))
def test_multipole_orthonormality(N):
    cfg = HilbertConfig(N, 4)
    ops = [
        multipole_operator(cfg, l, m).entries
        for l in range(N + 1)
        for m in range(-l, l + 1)
    ]
    for i, A in enumerate(ops):
        for j, B in enumerate(ops):
            val = np.trace(A @ B.conj().T)
            assert val == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)


@pytest.mark.parametrize("N", range(1, 7))
def test_multipole_adjoint_relation(N):
    cfg = HilbertConfig(N, 4)
    for l in range(N + 1):
        for m in range(-l, l + 1):
            t = multipole_operator(cfg, l, m).entries
            tneg = multipole_operator(cfg, l, -m).entries
            assert np.allclose(t.conj().T, (-1) ** m * tneg, atol=1e-13)


def test_multipole_parseval():
    cfg = HilbertConfig(4, 4)
    rng = np.random.default_rng(11)
    x = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    total = 0.0
    for l in range(5):
        for m in range(-l, l + 1):
            t = multipole_operator(cfg, l, m).entries
            total += abs(np.trace(rho @ t.conj().T)) ** 2
    assert total == pytest.approx(np.trace(rho @ rho).real, abs=1e-10)


def test_multipole_range_errors():
    cfg = HilbertConfig(2, 4)
    with pytest.raises(IndexOutOfRange):
        multipole_operator(cfg, 3, 0)
    with pytest.raises(IndexOutOfRange):
        multipole_operator(cfg, 1, 2)


def test_operator_matrix_hermitian_flag_checked():
    cfg = HilbertConfig(1, 2)
    mat = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(ValueError):
        OperatorMatrix(cfg, np.kron(mat, np.eye(3)), hermitian_flag=True)
