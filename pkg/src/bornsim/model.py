"""Physical parameters, Hamiltonians, dressed states, and initial states.

One measurement component = one two-level dot coupled to one photon mode.
Basis ordering is dot-state-major with the ground dot state first:

    index = dot_index * (n_max + 1) + photon_index,   dot_index: g -> 0, e -> 1

Dressed-basis projections depend on this convention; see ``basis_index``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops

JC = "jc"
RABI = "rabi"

DOT_INDEX = {"g": 0, "e": 1}


@dataclass(frozen=True)
class ModelParams:
    """All physical constants of one measurement component (hbar = 1).

    omega0   photon energy of the resonator
    e_e, e_g excited / ground dot occupation energies (e_e defaults to 0)
    lam      electron-photon coupling strength
    kappa    photon dissipation rate into the local reservoir
    nbar     reservoir mean occupancy (0 = zero temperature)
    coupling "jc" (rotating-wave) or "rabi" (includes counter-rotating terms)
    n_max    highest retained photon number
    """

    omega0: float
    e_g: float
    lam: float
    kappa: float
    e_e: float = 0.0
    nbar: float = 0.0
    coupling: str = JC
    n_max: int = 2

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.nbar < 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if self.coupling not in (JC, RABI):
            raise ValueError(f"coupling must be '{JC}' or '{RABI}', got {self.coupling!r}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def fock_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


@dataclass(frozen=True)
class BornState:
    """Initial dot-population weights; weight_l = |C_l|^2."""

    weight_l: float

    def __post_init__(self):
        if not 0.0 <= self.weight_l <= 1.0:
            raise ValueError(f"weight_l must be in [0, 1], got {self.weight_l}")

    @property
    def weight_r(self) -> float:
        return 1.0 - self.weight_l


def basis_index(params: ModelParams, dot: str, n: int) -> int:
    """Flat index of the product state |n, dot>."""
    if dot not in DOT_INDEX:
        raise ValueError(f"dot must be 'g' or 'e', got {dot!r}")
    if not 0 <= n <= params.n_max:
        raise ValueError(f"photon index {n} outside [0, {params.n_max}]")
    return DOT_INDEX[dot] * params.fock_dim + n


def basis_state(params: ModelParams, dot: str, n: int) -> np.ndarray:
    vec = np.zeros(params.dim, dtype=complex)
    vec[basis_index(params, dot, n)] = 1.0
    return vec


def photon_annihilation(params: ModelParams) -> np.ndarray:
    """a on the full dot x photon space."""
    return ops.tensor_product(ops.identity(2), ops.annihilation(params.n_max))


def number_operator(params: ModelParams) -> np.ndarray:
    return ops.tensor_product(ops.identity(2), ops.number_op(params.n_max))


def _sigma_minus(params: ModelParams) -> np.ndarray:
    """|g><e| on the full space."""
    sm = np.zeros((2, 2), dtype=complex)
    sm[DOT_INDEX["g"], DOT_INDEX["e"]] = 1.0
    return ops.tensor_product(sm, ops.identity(params.fock_dim))


def _dot_energies(params: ModelParams) -> np.ndarray:
    proj_g = np.zeros((2, 2), dtype=complex)
    proj_g[0, 0] = 1.0
    proj_e = np.zeros((2, 2), dtype=complex)
    proj_e[1, 1] = 1.0
    eye_f = ops.identity(params.fock_dim)
    return params.e_g * ops.tensor_product(proj_g, eye_f) + params.e_e * ops.tensor_product(
        proj_e, eye_f
    )


def jc_hamiltonian(params: ModelParams) -> np.ndarray:
    """Rotating-wave dot-photon Hamiltonian.

    H = E_g|g><g| + E_e|e><e| + omega0 a+a + lam (a+ |g><e| + a |e><g|).
    Block-diagonal in the total excitation number a+a + |e><e|.
    """
    a = photon_annihilation(params)
    sm = _sigma_minus(params)
    h = _dot_energies(params) + params.omega0 * number_operator(params)
    h = h + params.lam * (a.conj().T @ sm + a @ sm.conj().T)
    return h


def rabi_hamiltonian(params: ModelParams) -> np.ndarray:
    """Full dot-photon Hamiltonian with counter-rotating terms.

    H = E_g|g><g| + E_e|e><e| + omega0 a+a + lam (a+ + a)(|g><e| + |e><g|).
    Breaks excitation-number conservation, conserves parity.
    """
    a = photon_annihilation(params)
    sm = _sigma_minus(params)
    sx = sm + sm.conj().T
    h = _dot_energies(params) + params.omega0 * number_operator(params)
    h = h + params.lam * ((a + a.conj().T) @ sx)
    return h


def hamiltonian(params: ModelParams) -> np.ndarray:
    if params.coupling == RABI:
        return rabi_hamiltonian(params)
    return jc_hamiltonian(params)


def total_excitation(params: ModelParams) -> np.ndarray:
    """a+a + |e><e|; conserved by the JC Hamiltonian only."""
    proj_e = np.zeros((2, 2), dtype=complex)
    proj_e[1, 1] = 1.0
    return number_operator(params) + ops.tensor_product(proj_e, ops.identity(params.fock_dim))


def parity_operator(params: ModelParams) -> np.ndarray:
    """(-1)^(a+a + |e><e|); conserved by both Hamiltonians."""
    exc = np.round(np.diag(total_excitation(params)).real).astype(int)
    return np.diag((-1.0 + 0j) ** exc)


@dataclass(frozen=True)
class DressedBasis:
    """Eigenpair data of the n-excitation doublet of the JC Hamiltonian.

    theta          mixing angle, tan(theta) = 2 lam sqrt(n)/(omega0 + E_g),
                   branch theta in (0, pi) with sin(theta) >= 0
    e_plus/e_minus doublet eigenvalues E_{n,+-}
    gap            Lambda = E_{1,+} - E_{1,-}
    e_plus_trans   transition energies E_{n,+-} - E_g released when the system
    e_minus_trans  relaxes into |0,g>
    psi_plus/minus eigenvectors on the full space
    psi_zero       effective ground state |0,g>
    """

    n: int
    theta: float
    e_plus: float
    e_minus: float
    gap: float
    e_plus_trans: float
    e_minus_trans: float
    psi_plus: np.ndarray = field(repr=False)
    psi_minus: np.ndarray = field(repr=False)
    psi_zero: np.ndarray = field(repr=False)


def mixing_angle(params: ModelParams, n: int = 1) -> float:
    """theta_n = atan2(2 lam sqrt(n), omega0 + E_g).

    atan2 puts theta on the (0, pi) branch: theta = pi/2 exactly at resonance
    (omega0 + E_g = 0) and theta in (pi/2, pi) for omega0 + E_g < 0, keeping
    sin(theta) >= 0 by continuity.
    """
    return math.atan2(2.0 * params.lam * math.sqrt(n), params.omega0 + params.e_g)


def dressed_basis(params: ModelParams, n: int = 1) -> DressedBasis:
    """Closed-form eigenpairs of the n-excitation JC doublet."""
    if params.coupling != JC:
        raise ValueError("dressed_basis is defined for the JC model only")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > params.n_max:
        raise ValueError(f"n = {n} exceeds n_max = {params.n_max}")
    theta = mixing_angle(params, n)
    delta = params.omega0 + params.e_g
    root = math.sqrt((delta / 2.0) ** 2 + params.lam**2 * n)
    mid = params.omega0 * n + (params.e_g - params.omega0) / 2.0
    e_plus = mid + root
    e_minus = mid - root
    gap = math.sqrt(delta**2 + 4.0 * params.lam**2 * n)

    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    psi_plus = c * basis_state(params, "g", n) + s * basis_state(params, "e", n - 1)
    psi_minus = -s * basis_state(params, "g", n) + c * basis_state(params, "e", n - 1)
    return DressedBasis(
        n=n,
        theta=theta,
        e_plus=e_plus,
        e_minus=e_minus,
        gap=gap,
        e_plus_trans=e_plus - params.e_g,
        e_minus_trans=e_minus - params.e_g,
        psi_plus=psi_plus,
        psi_minus=psi_minus,
        psi_zero=basis_state(params, "g", 0),
    )


def thermal_photon_state(params: ModelParams) -> np.ndarray:
    """Truncated, renormalized thermal photon state exp(-beta omega0 a+a)/Z.

    beta is fixed by the reservoir occupancy, beta = ln(1 + 1/nbar)/omega0.
    The truncated tail mass must be < 1e-10; increase n_max otherwise.
    """
    if params.nbar <= 0:
        rho = np.zeros((params.fock_dim, params.fock_dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    q = params.nbar / (1.0 + params.nbar)  # exp(-beta omega0)
    weights = q ** np.arange(params.fock_dim)
    tail = q**params.fock_dim  # untruncated probability mass beyond n_max
    if tail > 1e-10:
        raise ValueError(
            f"thermal tail mass {tail:.2e} above 1e-10; raise n_max (= {params.n_max})"
        )
    weights = weights / weights.sum()
    return np.diag(weights).astype(complex)


def initial_state(born: BornState, side: str, params: ModelParams) -> np.ndarray:
    """Reduced initial density matrix of one component.

    Dot mixture weight |e><e| + (1 - weight) |g><g| with weight = |C_side|^2,
    tensored with the vacuum (nbar = 0) or the thermal photon state (nbar > 0).
    """
    if side == "l":
        weight = born.weight_l
    elif side == "r":
        weight = born.weight_r
    else:
        raise ValueError(f"side must be 'l' or 'r', got {side!r}")
    dot = np.zeros((2, 2), dtype=complex)
    dot[DOT_INDEX["g"], DOT_INDEX["g"]] = 1.0 - weight
    dot[DOT_INDEX["e"], DOT_INDEX["e"]] = weight
    rho = ops.tensor_product(dot, thermal_photon_state(params))
    return ops.validate_density(rho)
