"""Measured quantities: photon number, energy currents, counters.

Three equivalent routes to the energy current are kept side by side on
purpose; their mutual agreement is part of the verification story, so none
of them is ever derived from another.
"""

from enum import Enum

import numpy as np

from . import model, operators as ops
from .dynamics import Trajectory


class CurrentMethod(Enum):
    ENERGY_DERIVATIVE = "energy_derivative"
    DRESSED_FORMULA = "dressed_formula"
    FINITE_T_FORMULA = "finite_t_formula"


class HorizonError(ValueError):
    """Trajectory too short for an (effectively) infinite-time integral."""

    def __init__(self, required, actual):
        self.required = required
        self.actual = actual
        super().__init__(
            f"trajectory ends at t = {actual:.6g}, needs t >= {required:.6g}"
        )


def photon_number(rho: np.ndarray) -> float:
    """Tr[rho a+a] on the dot x photon product space."""
    rho = np.asarray(rho)
    dim = rho.shape[0]
    if dim % 2 != 0:
        raise ops.DimensionError(f"expected even dimension, got {dim}")
    fock = dim // 2
    nd = np.tile(np.arange(fock, dtype=float), 2)
    return float(np.real(np.diag(rho) @ nd))


def dressed_populations(rho: np.ndarray, basis: model.DressedBasis):
    """(P+, P-, P0, P+-) projections onto the lowest three dressed states."""
    rho = np.asarray(rho, dtype=complex)
    vp, vm, v0 = basis.psi_plus, basis.psi_minus, basis.psi_zero
    p_plus = float(np.real(vp.conj() @ rho @ vp))
    p_minus = float(np.real(vm.conj() @ rho @ vm))
    p_zero = float(np.real(v0.conj() @ rho @ v0))
    p_pm = complex(vp.conj() @ rho @ vm)
    return p_plus, p_minus, p_zero, p_pm


def _central_derivative(y: np.ndarray, h: float) -> np.ndarray:
    """Central differences with one-sided 2nd-order stencils at endpoints."""
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    return d


def energy_current(
    traj: Trajectory,
    params: model.ModelParams,
    basis: model.DressedBasis | None = None,
    method: CurrentMethod = CurrentMethod.ENERGY_DERIVATIVE,
) -> np.ndarray:
    """Energy flow into the reservoir, J(t), by the chosen route.

    ENERGY_DERIVATIVE: -d<H>/dt by finite differences on the record grid.
    DRESSED_FORMULA: transition energies times dressed decay terms (JC only).
    FINITE_T_FORMULA: photon-number / population form with the thermal
    backflow term; valid for any nbar >= 0 on the low-excitation manifold.
    """
    h_rec = float(traj.times[1] - traj.times[0])
    if method is CurrentMethod.ENERGY_DERIVATIVE:
        return -_central_derivative(traj.energy, h_rec)

    if basis is None:
        if params.coupling != model.JC:
            raise ValueError(f"{method} requires the JC model")
        basis = model.dressed_basis(params, 1)
    c = np.cos(basis.theta / 2.0)
    s = np.sin(basis.theta / 2.0)
    re_pm = traj.p_pm.real

    if method is CurrentMethod.DRESSED_FORMULA:
        if params.coupling != model.JC:
            raise ValueError("DRESSED_FORMULA requires the JC model")
        if params.nbar > 0:
            raise ValueError("DRESSED_FORMULA is the zero-temperature form")
        jp = basis.e_plus_trans * params.kappa * (c * c * traj.p_plus - c * s * re_pm)
        jm = basis.e_minus_trans * params.kappa * (s * s * traj.p_minus - c * s * re_pm)
        return jp + jm

    if method is CurrentMethod.FINITE_T_FORMULA:
        flux = params.kappa * (1.0 + params.nbar) * traj.photon_number
        backflow = params.kappa * params.nbar * traj.p_zero
        dpops = _central_derivative(traj.p_minus - traj.p_plus, h_rec)
        return (params.omega0 - params.e_g) / 2.0 * (flux - backflow) + basis.gap / 2.0 * dpops

    raise ValueError(f"unknown method {method!r}")


def measured_probability(traj: Trajectory, params: model.ModelParams) -> float:
    """Idealized photon-counter readout kappa * int <a+a> dt.

    For nbar > 0 the thermal backflow is subtracted,
    kappa * int [<a+a> - nbar P0/(1+nbar)] dt (the effective counter).
    Requires a horizon of at least 20/kappa.
    """
    required = 20.0 / params.kappa if params.kappa > 0 else np.inf
    if traj.t_end < required * (1.0 - 1e-9):
        raise HorizonError(required, traj.t_end)
    value = float(traj.p_measured[-1])
    if params.nbar > 0:
        value -= params.kappa * params.nbar / (1.0 + params.nbar) * float(traj.int_p0[-1])
    return value


def accumulated_energy(traj: Trajectory) -> float:
    """Total energy released to the reservoir, <H>(0) - <H>(t_end)."""
    return float(traj.energy[0] - traj.energy[-1])
