"""Closed-form results: fast predictors and independent oracles.

Everything here is derived on paper (secular approximation, exact dressed
three-level rate equations, degenerate perturbation theory at strong
coupling, thermal balance) and never calls the full integrator, so it can
serve as an independent cross-check of the numerics.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import _kernels, model
from .dynamics import TimeGrid

RESONANCE_TOL = 1e-12


def _require_jc(params: model.ModelParams):
    if params.coupling != model.JC:
        raise ValueError("closed forms require the JC model")


def secular_solution(params: model.ModelParams, weight: float, t):
    """Dressed populations under the secular approximation (valid lam >> kappa).

    P+(t) = w e^{-kappa cos^2(theta/2) t} sin^2(theta/2)
    P-(t) = w e^{-kappa sin^2(theta/2) t} cos^2(theta/2)
    P+-(t) = w e^{-(i Lambda + kappa/2) t} cos(theta/2) sin(theta/2)
    """
    _require_jc(params)
    if params.lam <= 0:
        raise ValueError("secular solution requires lam > 0")
    t = np.asarray(t, dtype=float)
    basis = model.dressed_basis(params, 1)
    c2 = math.cos(basis.theta / 2.0) ** 2
    s2 = math.sin(basis.theta / 2.0) ** 2
    cs = math.cos(basis.theta / 2.0) * math.sin(basis.theta / 2.0)
    k = params.kappa
    p_plus = weight * np.exp(-k * c2 * t) * s2
    p_minus = weight * np.exp(-k * s2 * t) * c2
    p_pm = weight * np.exp(-(1j * basis.gap + 0.5 * k) * t) * cs
    return p_plus, p_minus, p_pm


def resonance_closed_forms(params: model.ModelParams, t, weight: float = 1.0):
    """Photon number and current at resonance (E_g = -omega0).

    <a+a>(t) = w e^{-kappa t/2} (1 - cos 2 lam t)/2 and
    J(t) = kappa (-E_g) times the same envelope; period T = pi/lam.
    """
    _require_jc(params)
    if abs(params.omega0 + params.e_g) > 1e-9:
        raise ValueError(
            f"resonance form needs E_g = -omega0, got detuning {params.omega0 + params.e_g!r}"
        )
    t = np.asarray(t, dtype=float)
    envelope = weight * np.exp(-0.5 * params.kappa * t) * (1.0 - np.cos(2.0 * params.lam * t)) / 2.0
    return envelope, params.kappa * (-params.e_g) * envelope


@dataclass(frozen=True)
class QuasiStepSchedule:
    """Characteristic scales of the intermittent counter increase."""

    period: float  # T = pi/lam, spacing of the quasi-steps
    n_c: float  # ~2 lam/kappa steps to near-completion
    t_c: float  # = n_c * T = 2 pi/kappa


def quasi_step_prediction(params: model.ModelParams, n: int):
    """Counter and energy fraction at the n-th quasi-step, 1 - e^{-n pi kappa/(2 lam)}."""
    _require_jc(params)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if params.lam <= 0 or params.kappa <= 0:
        raise ValueError("quasi-step prediction requires lam > 0 and kappa > 0")
    value = 1.0 - math.exp(-n * math.pi * params.kappa / (2.0 * params.lam))
    schedule = QuasiStepSchedule(
        period=math.pi / params.lam,
        n_c=2.0 * params.lam / params.kappa,
        t_c=2.0 * math.pi / params.kappa,
    )
    return value, value, schedule


def _decay_fraction(u, kt):
    """(1 - e^{-u kt})/u with the analytic limit kt as u -> 0."""
    u = np.asarray(u, dtype=float)
    kt = np.asarray(kt, dtype=float)
    safe = np.where(u > 0.0, u, 1.0)
    return np.where(u > 0.0, -np.expm1(-safe * kt) / safe, kt)


def secular_measured_probability(params: model.ModelParams, weight: float, t):
    """Counter kappa int <a+a> under the secular approximation."""
    _require_jc(params)
    t = np.asarray(t, dtype=float)
    basis = model.dressed_basis(params, 1)
    c2 = math.cos(basis.theta / 2.0) ** 2
    s2 = math.sin(basis.theta / 2.0) ** 2
    k = params.kappa
    pole = 0.5 * k + 1j * basis.gap
    coh = 2.0 * k * np.real((1.0 - np.exp(-pole * t)) / pole)
    sin2_theta = math.sin(basis.theta) ** 2
    return weight * (sin2_theta / 4.0) * (
        _decay_fraction(c2, k * t) + _decay_fraction(s2, k * t) - coh
    )


def secular_accumulated_energy(params: model.ModelParams, weight: float, t):
    """Accumulated reservoir energy int_0^t J ds under the secular approximation.

    Four-term closed form with the transition energies; the t -> infinity
    limit is -E_g * weight up to O(kappa^2/Lambda^2) when lam >> kappa.
    """
    _require_jc(params)
    t = np.asarray(t, dtype=float)
    basis = model.dressed_basis(params, 1)
    c2 = math.cos(basis.theta / 2.0) ** 2
    s2 = math.sin(basis.theta / 2.0) ** 2
    k = params.kappa
    pole = 1j * basis.gap + 0.5 * k
    ep, em = basis.e_plus_trans, basis.e_minus_trans
    sin2_theta = math.sin(basis.theta) ** 2
    return weight * (
        ep * s2 * -np.expm1(-c2 * k * t)
        + em * c2 * -np.expm1(-s2 * k * t)
        - k * (sin2_theta / 2.0) * (ep + em) * np.real((1.0 - np.exp(-pole * t)) / pole)
    )


def dressed_exact_rhs(p_plus, p_minus, p_pm, params: model.ModelParams):
    """Exact (non-secular) rate equations on the three-level manifold.

    dP+/dt  = -kappa cos^2(theta/2) P+ + (kappa/2) sin(theta) Re P+-
    dP-/dt  = -kappa sin^2(theta/2) P- + (kappa/2) sin(theta) Re P+-
    dP+-/dt = -(i Lambda + kappa/2) P+- + (kappa/4) sin(theta) (P+ + P-)
    dP0/dt  =  kappa <a+a>

    The coherence feed term (kappa/4) sin(theta) (P+ + P-) follows from a
    direct projection of the dissipator; with it, P+ + P- + P0 is conserved
    exactly and the equations reproduce the full dynamics on the manifold.
    """
    _require_jc(params)
    basis = model.dressed_basis(params, 1)
    kappa = params.kappa
    c2 = math.cos(basis.theta / 2.0) ** 2
    s2 = math.sin(basis.theta / 2.0) ** 2
    sth = math.sin(basis.theta)
    return _kernels._dressed_rhs(p_plus, p_minus, complex(p_pm), kappa, basis.gap, c2, s2, sth)


@dataclass
class DressedExactTrajectory:
    times: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    p_pm: np.ndarray
    p_zero: np.ndarray
    photon_number: np.ndarray


def integrate_dressed_exact(
    weight: float, params: model.ModelParams, grid: TimeGrid
) -> DressedExactTrajectory:
    """RK4 integration of the exact three-level equations, same stepper
    policy as the full integrator; initial state is the standard dot mixture.
    """
    _require_jc(params)
    basis = model.dressed_basis(params, 1)
    c = math.cos(basis.theta / 2.0)
    s = math.sin(basis.theta / 2.0)
    n_steps, stride = grid.resolve()
    rec = _kernels.rk4_dressed_exact(
        weight * s * s,
        weight * c * c,
        complex(weight * s * c),
        1.0 - weight,
        params.kappa,
        basis.gap,
        basis.theta,
        float(grid.dt),
        n_steps,
        stride,
    )
    times = np.arange(rec.shape[0]) * (stride * grid.dt)
    return DressedExactTrajectory(
        times=times,
        p_plus=rec[:, 0].copy(),
        p_minus=rec[:, 1].copy(),
        p_pm=rec[:, 2] + 1j * rec[:, 3],
        p_zero=rec[:, 4].copy(),
        photon_number=rec[:, 5].copy(),
    )


def rabi_overlap_coefficient(params: model.ModelParams, n: int) -> float:
    """Coherent-state overlap D_nn = e^{-2x^2} sum_r (-1)^r n! (2x)^{2n-2r}/[(n-r)!^2 r!],

    x = lam/omega0.  Equals (-1)^n e^{-2x^2} L_n(4x^2); |D_nn| <= 1.
    """
    x = params.lam / params.omega0
    total = 0.0
    for r in range(n + 1):
        total += (
            (-1.0) ** r
            * math.factorial(n)
            * (2.0 * x) ** (2 * n - 2 * r)
            / (math.factorial(n - r) ** 2 * math.factorial(r))
        )
    return math.exp(-2.0 * x * x) * total


@dataclass(frozen=True)
class RabiPerturbation:
    """Strong-coupling perturbative data for one photon-displaced doublet."""

    n: int
    d_nn: float
    e_plus: float
    e_minus: float
    steady_photon_number: float  # (lam/omega0)^2


def rabi_perturbation(params: model.ModelParams, n: int = 0) -> RabiPerturbation:
    """Degenerate-perturbation eigenvalues E_{n,+-} and overlap D_nn.

    E_{n,+-} ~= omega0 n -+ |D_nn|^2 E_g/2 - lam^2/omega0 + E_g/2.
    Quantitative only for lam/omega0 of order 0.3 and above.
    """
    if params.coupling != model.RABI:
        raise ValueError("rabi_perturbation requires the Rabi model")
    d_nn = rabi_overlap_coefficient(params, n)
    shift = -params.lam**2 / params.omega0 + params.e_g / 2.0
    split = d_nn**2 * params.e_g / 2.0
    return RabiPerturbation(
        n=n,
        d_nn=d_nn,
        e_plus=params.omega0 * n - split + shift,
        e_minus=params.omega0 * n + split + shift,
        steady_photon_number=(params.lam / params.omega0) ** 2,
    )


def rabi_ground_doublet(params: model.ModelParams):
    """Perturbative ground doublet |psi_{0,+-}> as full-space vectors.

    (1/sqrt 2)(e^{+x(a+ - a)} |0> (x) |-> +- e^{-x(a+ - a)} |0> (x) |+>)
    with x = lam/omega0 and |+-> = (|e> +- |g>)/sqrt 2: the sigma_x = +1
    branch sees +lam(a + a+), so its well is displaced by -x, and vice versa.
    """
    x = params.lam / params.omega0
    fock = params.fock_dim
    a = np.diag(np.sqrt(np.arange(1.0, fock)), k=1).astype(complex)
    gen = a.conj().T - a
    vac = np.zeros(fock, dtype=complex)
    vac[0] = 1.0
    disp_minus = expm(x * gen) @ vac
    disp_plus = expm(-x * gen) @ vac

    # dot-state-major layout: first block g, second block e
    def _product(photon, dot_g, dot_e):
        vec = np.zeros(2 * fock, dtype=complex)
        vec[:fock] = dot_g * photon
        vec[fock:] = dot_e * photon
        return vec

    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    minus_part = _product(disp_minus, -inv_sqrt2, inv_sqrt2)  # |-> = (|e>-|g>)/sqrt2
    plus_part = _product(disp_plus, inv_sqrt2, inv_sqrt2)  # |+> = (|e>+|g>)/sqrt2
    psi_p = inv_sqrt2 * (minus_part + plus_part)
    psi_m = inv_sqrt2 * (minus_part - plus_part)
    return psi_p, psi_m


def rabi_rate_rhs(populations: np.ndarray, params: model.ModelParams) -> np.ndarray:
    """Secular strong-coupling rate equations for P_{n,+-}.

    dP_{n,s}/dt = kappa[(n+1) P_{n+1,s} - n P_{n,s}]
                  + kappa (lam/omega0)^2 (P_{n,-s} - P_{n,s}).
    populations has shape (levels, 2), columns (+, -); the ladder is
    truncated at the array length (P beyond it taken as zero).
    """
    p = np.asarray(populations, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError(f"populations must have shape (levels, 2), got {p.shape}")
    n = np.arange(p.shape[0], dtype=float)[:, None]
    kappa = params.kappa
    x2 = (params.lam / params.omega0) ** 2
    up = np.zeros_like(p)
    up[:-1] = p[1:] * (n[1:])
    deriv = kappa * (up - n * p) + kappa * x2 * (p[:, ::-1] - p)
    return deriv


def integrate_rate_equations(p0: np.ndarray, params: model.ModelParams, grid: TimeGrid) -> np.ndarray:
    """RK4 on the strong-coupling rate equations; returns the final populations."""
    p = np.asarray(p0, dtype=float).copy()
    n_steps, _ = grid.resolve()
    dt = grid.dt
    for _ in range(n_steps):
        k1 = rabi_rate_rhs(p, params)
        k2 = rabi_rate_rhs(p + 0.5 * dt * k1, params)
        k3 = rabi_rate_rhs(p + 0.5 * dt * k2, params)
        k4 = rabi_rate_rhs(p + dt * k3, params)
        p += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
    return p


@dataclass(frozen=True)
class FiniteTPrediction:
    """Thermal-reservoir measurement prediction.

    z: photon partition function 1/(1 - e^{-beta omega0}) = 1 + nbar
    z_prime: dot factor 1 + e^{-beta E_g}
    effective_counter: (weight - 1/z_prime)/(1 + nbar)^2
    energy_loss: E_g (1/z_prime - weight), total energy into the reservoir
    """

    z: float
    z_prime: float
    effective_counter: float
    energy_loss: float


def finite_t_prediction(params: model.ModelParams, weight: float) -> FiniteTPrediction:
    """Effective counter and total energy loss for a thermal reservoir.

    At nbar = 0 this reduces exactly to the complete-measurement value
    (counter = weight) for E_g < 0.
    """
    nbar = params.nbar
    z = 1.0 + nbar
    if nbar > 0:
        beta = math.log(1.0 + 1.0 / nbar) / params.omega0
        inv_z_prime = 1.0 / (1.0 + math.exp(-beta * params.e_g))
        z_prime = 1.0 + math.exp(-beta * params.e_g)
    else:
        # beta -> infinity: the dot thermal factor saturates
        if params.e_g < 0:
            inv_z_prime = 0.0
        elif params.e_g == 0:
            inv_z_prime = 0.5
        else:
            inv_z_prime = 1.0
        z_prime = math.inf if inv_z_prime == 0.0 else 1.0 / inv_z_prime
    return FiniteTPrediction(
        z=z,
        z_prime=z_prime,
        effective_counter=(weight - inv_z_prime) / (1.0 + nbar) ** 2,
        energy_loss=params.e_g * (inv_z_prime - weight),
    )
