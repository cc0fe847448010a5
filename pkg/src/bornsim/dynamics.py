"""Time evolution under the Lindblad master equation.

Fixed-step classical 4th-order integration in the lab frame.  Deterministic:
identical inputs reproduce identical trajectories bit for bit, which keeps
regression tests and the convergence sweeps simple.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, model, operators as ops

# dt * ||H|| must stay below this bound (||.|| = max eigenvalue magnitude).
STABILITY_BOUND = 0.05
TRACE_DRIFT_TOL = 1e-6
POSITIVITY_TOL = -1e-6

# Auto record stride targets at most this many records per trajectory.
MAX_RECORDS = 200_000
N_CHECKPOINTS = 9


class StabilityError(ValueError):
    """dt violates the stability bound dt * ||H|| <= 0.05."""


class TraceDriftError(RuntimeError):
    """Trace drifted beyond tolerance during integration."""


class PositivityError(RuntimeError):
    """A checkpoint state developed a negative eigenvalue beyond tolerance."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid [0, t_max] with fixed step dt.

    record_stride: record observables every this many steps (None = choose
    automatically so that at most MAX_RECORDS rows are kept).  n_steps is
    rounded up to a multiple of the stride, so the actual horizon may exceed
    t_max by less than one record interval.
    """

    t_max: float
    dt: float
    record_stride: int | None = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_max < self.dt:
            raise ValueError(f"t_max = {self.t_max} must be >= dt = {self.dt}")
        if self.record_stride is not None and self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    def resolve(self) -> tuple[int, int]:
        """(n_steps, stride) with n_steps a multiple of stride."""
        n_steps = math.ceil(self.t_max / self.dt - 1e-9)
        stride = self.record_stride
        if stride is None:
            stride = max(1, math.ceil(n_steps / MAX_RECORDS))
        n_steps = math.ceil(n_steps / stride) * stride
        return n_steps, stride


@dataclass
class Trajectory:
    """Recorded time series of one evolve() call.

    p_measured is the running counter kappa * int <a+a> dt; int_p0 is the
    running integral of the ground-state population (used by the
    finite-temperature effective counter).  Both use the trapezoid rule on
    the integration grid, not the (coarser) record grid.
    """

    times: np.ndarray
    photon_number: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    p_pm: np.ndarray
    p_zero: np.ndarray
    energy: np.ndarray
    p_measured: np.ndarray
    int_p0: np.ndarray
    trace_error: np.ndarray
    rho_final: np.ndarray = field(repr=False)
    checkpoints: list = field(repr=False)
    params: model.ModelParams = None
    dt: float = 0.0
    has_dressed: bool = False

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def accumulated_energy_series(self) -> np.ndarray:
        return self.energy[0] - self.energy


def hamiltonian_norm(params: model.ModelParams, h: np.ndarray | None = None) -> float:
    if h is None:
        h = model.hamiltonian(params)
    return float(np.max(np.abs(np.linalg.eigvalsh(h))))


def max_stable_dt(params: model.ModelParams) -> float:
    return STABILITY_BOUND / hamiltonian_norm(params)


def _dissipator_structure(params: model.ModelParams):
    """Bidiagonal data of a = I_2 (x) a_fock in the flat basis."""
    a = model.photon_annihilation(params)
    s = np.diag(a, k=1).real.copy()
    nd = np.diag(a.conj().T @ a).real.copy()
    md = np.diag(a @ a.conj().T).real.copy()
    return s, nd, md


def lindblad_rhs(rho: np.ndarray, params: model.ModelParams, h: np.ndarray | None = None) -> np.ndarray:
    """d rho/dt = -i[H, rho] + kappa(1+nbar) D[a] rho + kappa nbar D[a+] rho,

    with D[X] rho = (2 X rho X+ - X+X rho - rho X+X)/2.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (params.dim, params.dim):
        raise ops.DimensionError(
            f"rho shape {rho.shape} does not match model dimension {params.dim}"
        )
    if h is None:
        h = model.hamiltonian(params)
    s, nd, md = _dissipator_structure(params)
    gdown = params.kappa * (1.0 + params.nbar)
    gup = params.kappa * params.nbar
    hp, hi, hv = _kernels.csr_hamiltonian(h)
    return _kernels.lindblad_rhs_matrix(
        np.ascontiguousarray(rho), hp, hi, hv, s, nd, md, gdown, gup
    )


def evolve(rho0: np.ndarray, params: model.ModelParams, grid: TimeGrid) -> Trajectory:
    """Integrate the master equation and record all observables.

    Raises StabilityError when dt * ||H|| > 0.05 and TraceDriftError /
    PositivityError when the run violates the trajectory invariants (no
    silent renormalization anywhere).
    """
    rho0 = ops.validate_density(rho0)
    if rho0.shape != (params.dim, params.dim):
        raise ops.DimensionError(
            f"rho0 shape {rho0.shape} does not match model dimension {params.dim}"
        )
    h = model.hamiltonian(params)
    hnorm = hamiltonian_norm(params, h)
    if grid.dt * hnorm > STABILITY_BOUND * (1.0 + 1e-12):
        raise StabilityError(
            f"dt = {grid.dt} violates dt*||H|| <= {STABILITY_BOUND} "
            f"(||H|| = {hnorm:.6g}); use dt <= {STABILITY_BOUND / hnorm:.6g}"
        )
    n_steps, stride = grid.resolve()
    n_rec = n_steps // stride + 1

    s, nd, md = _dissipator_structure(params)
    nd_tot = np.diag(model.number_operator(params)).real.copy()
    i0 = model.basis_index(params, "g", 0)

    has_dressed = params.coupling == model.JC and params.n_max >= 1
    if has_dressed:
        basis = model.dressed_basis(params, 1)
        vp = basis.psi_plus.astype(complex)
        vm = basis.psi_minus.astype(complex)
    else:
        vp = np.zeros(params.dim, dtype=complex)
        vm = np.zeros(params.dim, dtype=complex)

    chk_rec_idx = np.unique(
        np.round(np.linspace(0, n_rec - 1, min(N_CHECKPOINTS, n_rec))).astype(np.int64)
    )
    gdown = params.kappa * (1.0 + params.nbar)
    gup = params.kappa * params.nbar

    hp, hi, hv = _kernels.csr_hamiltonian(h)
    rec, chk, rho_final = _kernels.rk4_evolve(
        np.ascontiguousarray(rho0),
        np.ascontiguousarray(h),
        hp, hi, hv,
        s, nd, md, gdown, gup,
        float(grid.dt), n_steps, stride,
        nd_tot, i0, vp, vm, chk_rec_idx,
    )

    times = np.arange(n_rec) * (stride * grid.dt)
    traj = Trajectory(
        times=times,
        photon_number=rec[:, 0].copy(),
        p_plus=rec[:, 1].copy(),
        p_minus=rec[:, 2].copy(),
        p_pm=(rec[:, 3] + 1j * rec[:, 4]),
        p_zero=rec[:, 5].copy(),
        energy=rec[:, 6].copy(),
        p_measured=params.kappa * rec[:, 7],
        int_p0=rec[:, 8].copy(),
        trace_error=rec[:, 9].copy(),
        rho_final=rho_final,
        checkpoints=[(times[r], chk[c]) for c, r in enumerate(chk_rec_idx)],
        params=params,
        dt=grid.dt,
        has_dressed=has_dressed,
    )
    max_drift = float(traj.trace_error.max())
    if max_drift > TRACE_DRIFT_TOL:
        raise TraceDriftError(
            f"trace drift {max_drift:.3e} exceeds {TRACE_DRIFT_TOL}; reduce dt"
        )
    for t_chk, rho_chk in traj.checkpoints:
        lam_min = float(np.linalg.eigvalsh(rho_chk).min())
        if lam_min < POSITIVITY_TOL:
            raise PositivityError(
                f"negative eigenvalue {lam_min:.3e} at t = {t_chk:.6g}"
            )
    return traj


@dataclass
class SteadyStateResult:
    """Steady state search outcome; converged=False flags a residual above
    1e-6 at the time cap (never silently discarded)."""

    rho: np.ndarray
    residual: float
    t_final: float
    stop_reason: str  # "residual" or "t_max"
    converged: bool


RESIDUAL_TOL = 1e-9
RESIDUAL_FLAG = 1e-6


def steady_state(
    params: model.ModelParams,
    rho0: np.ndarray,
    dt: float | None = None,
    t_cap_factor: float = 50.0,
) -> SteadyStateResult:
    """Evolve until ||d rho/dt||_max < 1e-9 or t = 50/kappa, whichever first."""
    if params.kappa <= 0:
        raise ValueError("steady_state requires kappa > 0")
    if dt is None:
        dt = min(0.01, 0.9 * max_stable_dt(params))
    t_cap = t_cap_factor / params.kappa
    chunk = t_cap / 25.0
    h = model.hamiltonian(params)

    rho = ops.validate_density(rho0)
    t = 0.0
    residual = float(np.max(np.abs(lindblad_rhs(rho, params, h))))
    while t < t_cap - 1e-9:
        grid = TimeGrid(t_max=min(chunk, t_cap - t), dt=dt, record_stride=None)
        traj = evolve(rho, params, grid)
        rho = traj.rho_final
        t += traj.t_end
        residual = float(np.max(np.abs(lindblad_rhs(rho, params, h))))
        if residual < RESIDUAL_TOL:
            return SteadyStateResult(rho, residual, t, "residual", True)
    return SteadyStateResult(rho, residual, t, "t_max", residual <= RESIDUAL_FLAG)
