"""Subsystem reduction and Wigner-function rendering.

Field Wigner functions use dimensionless quadratures q = (a + a^dag)/sqrt(2),
p = (a - a^dag)/(i sqrt(2)) with hbar = 1, normalised so the plane integral of
W is 1 (vacuum peak 1/pi). Evaluation goes through the displaced-parity trace
W(alpha_pt) = (2/pi) Tr[rho D(alpha_pt) P D(alpha_pt)^dag], expanded over
Fock-diagonal Laguerre series and evaluated with Clenshaw recurrences; the
literal position-representation quadrature integral is kept as a slow
cross-validation oracle.

Spin Wigner functions expand the reduced qubit state over multipole operators,
W_s(theta, phi) = sum_lm Tr(rho T_lm^dag) Y_lm(theta, phi), on a colatitude x
azimuth grid; the sphere integral equals sqrt(4 pi/(2S+1)). The Lambert
azimuthal equal-area projection maps colatitude to disk radius r =
2 sin(theta/2): the reference pole sits at the centre, its antipode on the
r = 2 boundary and the equator at r = sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import sph_harm_y

from .config import HilbertConfig
from .errors import RealityViolation, TruncationError
from .operators import multipole_operator
from .states import DensityMatrix

REALITY_TOL = 1e-8
BOUNDARY_MASS_TOL = 1e-6


@dataclass(frozen=True)
class WignerGrid:
    """Sampled quasi-probability distribution with its coordinate axes.

    kind selects the coordinate meaning: 'field_plane' (axes q, p),
    'spin_sphere' (axes theta, phi) or 'spin_lambert' (axes r, theta_p).
    values[i, j] is the sample at (axis0[i], axis1[j]).
    """

    kind: str
    axis0: np.ndarray
    axis1: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("field_plane", "spin_sphere", "spin_lambert"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals):
            raise ValueError("grid values must be real; strip residue first")
        if vals.shape != (len(self.axis0), len(self.axis1)):
            raise ValueError("values shape does not match axes")

    def integral(self) -> float:
        """Riemann integral with the measure appropriate to the grid kind."""
        if self.kind == "field_plane":
            w = self.values
        elif self.kind == "spin_sphere":
            w = self.values * np.sin(self.axis0)[:, None]
        else:  # spin_lambert: area element r dr dtheta_p
            w = self.values * self.axis0[:, None]
        return float(np.trapezoid(np.trapezoid(w, self.axis1, axis=1), self.axis0))


def reduce_field(rho: DensityMatrix) -> DensityMatrix:
    """Partial trace over the Dicke index, leaving the field state."""
    cfg = rho.config
    if rho.space != "composite":
        raise ValueError("reduce_field expects a composite-space state")
    r4 = rho.entries.reshape(cfg.spin_dim, cfg.field_dim,
                             cfg.spin_dim, cfg.field_dim)
    return DensityMatrix(cfg, np.trace(r4, axis1=0, axis2=2), space="field")


def reduce_spins(rho: DensityMatrix) -> DensityMatrix:
    """Partial trace over the photon index, leaving the qubit state."""
    cfg = rho.config
    if rho.space != "composite":
        raise ValueError("reduce_spins expects a composite-space state")
    r4 = rho.entries.reshape(cfg.spin_dim, cfg.field_dim,
                             cfg.spin_dim, cfg.field_dim)
    return DensityMatrix(cfg, np.trace(r4, axis1=1, axis2=3), space="spin")


def _laguerre_series(L, x, coeffs):
    """Clenshaw evaluation of sum_n c_n * (-1)^n sqrt(n! L!/(n+L)!) Lag(n, L, x)."""
    if len(coeffs) == 1:
        y0, y1 = coeffs[0], 0.0
    elif len(coeffs) == 2:
        y0, y1 = coeffs[0], coeffs[1]
    else:
        k = len(coeffs)
        y0, y1 = coeffs[-2], coeffs[-1]
        for i in range(3, len(coeffs) + 1):
            k -= 1
            y0, y1 = (
                coeffs[-i] - y1 * math.sqrt((k - 1.0) * (L + k - 1.0) / ((L + k) * k)),
                y0 - y1 * (L + 2.0 * k - 1.0 - x) / math.sqrt((L + k) * k),
            )
    return y0 - y1 * (L + 1.0 - x) / math.sqrt(L + 1.0)


def _wigner_plane(rho_f: np.ndarray, qs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Displaced-parity Wigner samples W[q_i, p_j] for a field density matrix."""
    dim = rho_f.shape[0]
    Q, P = np.meshgrid(qs, ps, indexing="ij")
    A = math.sqrt(2.0) * (Q + 1j * P)  # 2 * alpha_pt in ladder units
    B = np.abs(A) ** 2
    w = 2.0 * rho_f[0, -1] * np.ones_like(A)
    for L in range(dim - 2, -1, -1):
        diag = np.diagonal(rho_f, offset=L).copy()
        if L != 0:
            diag *= 2.0
        w = _laguerre_series(L, B, diag) + w * A / math.sqrt(L + 1.0)
    return np.real(w) * np.exp(-0.5 * B) / math.pi


def field_wigner(
    rho_f: DensityMatrix,
    q_range: Optional[tuple[float, float]] = None,
    p_range: Optional[tuple[float, float]] = None,
    resolution: int = 201,
    metadata: Optional[dict] = None,
) -> WignerGrid:
    """Field Wigner function on a planar quadrature grid.

    Default ranges span +-sqrt(2)(sqrt(<n>) + 4), which covers the coherent
    lump(s) with several vacuum widths to spare. Raises TruncationError when
    significant mass sits on the grid edge or at the Fock cutoff.
    """
    if rho_f.space != "field":
        raise ValueError("field_wigner expects a field-factor density matrix")
    rho = rho_f.entries
    n_mean = float(np.real(np.trace(rho @ np.diag(np.arange(rho.shape[0])))))
    if q_range is None or p_range is None:
        half = math.sqrt(2.0) * (math.sqrt(max(n_mean, 0.0)) + 4.0)
        q_range = q_range or (-half, half)
        p_range = p_range or (-half, half)
    qs = np.linspace(q_range[0], q_range[1], resolution)
    ps = np.linspace(p_range[0], p_range[1], resolution)

    fock_edge = float(np.real(rho[-1, -1]))
    if fock_edge > BOUNDARY_MASS_TOL:
        raise TruncationError(
            f"population {fock_edge:.2e} at the Fock cutoff; raise fock_cutoff"
        )
    values = _wigner_plane(rho, qs, ps)

    dq = qs[1] - qs[0]
    dp = ps[1] - ps[0]
    edge = np.concatenate(
        [values[0, :], values[-1, :], values[1:-1, 0], values[1:-1, -1]]
    )
    edge_mass = float(np.sum(np.abs(edge)) * dq * dp)
    if edge_mass > BOUNDARY_MASS_TOL:
        raise TruncationError(
            f"boundary-cell mass {edge_mass:.2e} exceeds {BOUNDARY_MASS_TOL}; "
            "enlarge the grid window"
        )
    meta = dict(metadata or {})
    meta.setdefault("quadrature_convention", "q=(a+adag)/sqrt2, hbar=1")
    meta["mean_photon_number"] = n_mean
    meta["max_imag_residue"] = 0.0  # parity form is manifestly real
    return WignerGrid("field_plane", qs, ps, values, meta)


def field_wigner_quadrature_oracle(
    rho_f: DensityMatrix, qs: np.ndarray, ps: np.ndarray, hermite_order: int = 180
) -> np.ndarray:
    """Slow reference evaluation straight from the position-representation
    integral W(q,p) = (1/2 pi) Int dz <q+z/2|rho|q-z/2> exp(-ipz).

    Substituting z = 2u turns the integrand into exp(-u^2) times a smooth
    function, evaluated with Gauss-Hermite quadrature. Only meant for small
    probe grids in tests.
    """
    rho = rho_f.entries
    dim = rho.shape[0]
    nodes, weights = np.polynomial.hermite.hermgauss(hermite_order)

    def reduced_hermite(x):
        # psi_n(x) * exp(x^2/2): polynomial part of the oscillator functions,
        # so the Gaussian weights can be cancelled analytically (no overflow).
        out = np.empty((dim, x.size))
        out[0] = math.pi ** -0.25
        if dim > 1:
            out[1] = math.sqrt(2.0) * x * out[0]
        for n in range(2, dim):
            out[n] = (math.sqrt(2.0 / n) * x * out[n - 1]
                      - math.sqrt((n - 1.0) / n) * out[n - 2])
        return out

    W = np.empty((qs.size, ps.size))
    for i, q in enumerate(qs):
        # zeta = 2u: W = (1/pi) Int du <q+u|rho|q-u> e^{-2ipu}; the integrand
        # carries exp(-q^2 - u^2), whose e^{-u^2} is the Gauss-Hermite weight.
        left = reduced_hermite(q + nodes)
        right = reduced_hermite(q - nodes)
        kernel = np.einsum("mu,mn,nu->u", left, rho, right) * math.exp(-q * q)
        for j, p in enumerate(ps):
            integrand = kernel * np.exp(-2j * p * nodes)
            W[i, j] = np.real(np.sum(weights * integrand)) / math.pi
    return W


def spin_wigner(
    rho_q: DensityMatrix,
    theta_res: int = 181,
    phi_res: int = 181,
    metadata: Optional[dict] = None,
) -> WignerGrid:
    """Spherical spin Wigner function from the multipole expansion.

    Raises RealityViolation if the reconstructed grid carries an imaginary
    residue above 1e-8 (a symptom of broken multipole phase conventions).
    """
    if rho_q.space != "spin":
        raise ValueError("spin_wigner expects a spin-factor density matrix")
    cfg = rho_q.config
    N = cfg.qubit_count
    thetas = np.linspace(0.0, math.pi, theta_res)
    phis = np.linspace(0.0, 2.0 * math.pi, phi_res)
    TH, PH = np.meshgrid(thetas, phis, indexing="ij")
    acc = np.zeros((theta_res, phi_res), dtype=complex)
    for l in range(0, N + 1):
        for m in range(-l, l + 1):
            coeff = np.trace(
                rho_q.entries @ multipole_operator(cfg, l, m).entries.conj().T
            )
            if coeff == 0:
                continue
            acc += coeff * sph_harm_y(l, m, TH, PH)
    residue = float(np.max(np.abs(acc.imag)))
    if residue > REALITY_TOL:
        raise RealityViolation(
            f"spin Wigner imaginary residue {residue:.2e} exceeds {REALITY_TOL}"
        )
    meta = dict(metadata or {})
    meta["max_imag_residue"] = residue
    return WignerGrid("spin_sphere", thetas, phis, acc.real, meta)


def lambert_project(grid: WignerGrid) -> WignerGrid:
    """Equal-area polar projection of a spherical grid, pole at the centre.

    The radius axis is the exact image r = 2 sin(theta/2) of the input
    colatitude axis (no interpolation), so values, maxima and integrals carry
    over unchanged; the equator lands on the circle r = sqrt(2).
    """
    if grid.kind != "spin_sphere":
        raise ValueError("lambert_project expects a spin_sphere grid")
    r = 2.0 * np.sin(0.5 * grid.axis0)
    meta = dict(grid.metadata)
    meta["projection"] = "lambert_equal_area_north"
    meta["equator_radius"] = math.sqrt(2.0)
    return WignerGrid("spin_lambert", r, grid.axis1.copy(),
                      grid.values.copy(), meta)
