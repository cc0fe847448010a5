import numpy as np
import pytest

import bornsim as bs
from bornsim import dynamics, model, operators as ops


def params(**overrides):
    base = dict(omega0=1.0, e_g=-1.0, lam=0.01, kappa=0.001, n_max=2)
    base.update(overrides)
    return bs.ModelParams(**base)


def excited(p):
    return model.initial_state(bs.BornState(1.0), "l", p)


def ground(p):
    return model.initial_state(bs.BornState(0.0), "l", p)


def test_time_grid_validation():
    with pytest.raises(ValueError):
        bs.TimeGrid(t_max=1.0, dt=0.0)
    with pytest.raises(ValueError):
        bs.TimeGrid(t_max=0.001, dt=0.01)
    with pytest.raises(ValueError):
        bs.TimeGrid(t_max=1.0, dt=0.01, record_stride=0)
    n_steps, stride = bs.TimeGrid(t_max=1.0, dt=0.01, record_stride=7).resolve()
    assert n_steps % stride == 0


def test_rhs_dark_state_is_stationary():
    p = params()
    assert np.max(np.abs(bs.lindblad_rhs(ground(p), p))) == pytest.approx(0.0)


def test_rhs_unitary_limit_preserves_purity():
    p = params(kappa=0.0)
    vec = np.zeros(p.dim, dtype=complex)
    vec[model.basis_index(p, "e", 0)] = 1.0 / np.sqrt(2.0)
    vec[model.basis_index(p, "g", 1)] = 1.0 / np.sqrt(2.0)
    rho = ops.pure_density(vec)
    drho = bs.lindblad_rhs(rho, p)
    # d Tr(rho^2)/dt = 2 Tr(rho drho) vanishes for unitary dynamics
    assert abs(np.trace(rho @ drho)) < 1e-14


def test_rhs_traceless_and_hermiticity_preserving():
    rng = np.random.default_rng(11)
    p = params()
    m = rng.normal(size=(p.dim, p.dim)) + 1j * rng.normal(size=(p.dim, p.dim))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    drho = bs.lindblad_rhs(rho, p)
    assert abs(np.trace(drho)) < 1e-12
    assert np.max(np.abs(drho - drho.conj().T)) < 1e-12


def test_rhs_dimension_mismatch():
    with pytest.raises(ops.DimensionError):
        bs.lindblad_rhs(np.eye(4) / 4.0, params(n_max=2))


def test_stability_bound_error_suggests_dt():
    p = params()
    with pytest.raises(dynamics.StabilityError, match="use dt"):
        bs.evolve(excited(p), p, bs.TimeGrid(t_max=10.0, dt=0.05))
    assert dynamics.max_stable_dt(p) == pytest.approx(0.05 / 2.00005, rel=1e-3)


def test_closed_system_rabi_oscillation():
    p = params(kappa=0.0)
    traj = bs.evolve(excited(p), p, bs.TimeGrid(t_max=300.0, dt=0.01))
    expected = np.sin(p.lam * traj.times) ** 2
    assert np.max(np.abs(traj.photon_number - expected)) < 1e-6


def test_damped_peak_photon_number():
    p = params()
    traj = bs.evolve(excited(p), p, bs.TimeGrid(t_max=200.0, dt=0.01))
    t_peak = np.pi / (2.0 * p.lam)
    i = np.argmin(np.abs(traj.times - t_peak))
    assert abs(traj.photon_number[i] - 0.9245) < 0.03


def test_ground_start_stays_silent():
    p = params()
    traj = bs.evolve(ground(p), p, bs.TimeGrid(t_max=100.0, dt=0.01))
    assert np.max(traj.photon_number) == pytest.approx(0.0)
    assert np.max(traj.p_measured) == pytest.approx(0.0)
    assert np.max(np.abs(traj.energy - traj.energy[0])) == pytest.approx(0.0)


def test_trajectory_invariants(resonance_runs):
    traj = resonance_runs[1.0]
    for pop in (traj.p_plus, traj.p_minus, traj.p_zero):
        assert pop.min() >= -1e-6
        assert pop.max() <= 1.0 + 1e-6
    assert np.all(np.diff(traj.p_measured) >= -1e-12)
    assert traj.trace_error.max() <= 1e-6
    # no silent symmetrization: Hermiticity drift of the final state
    assert np.max(np.abs(traj.rho_final - traj.rho_final.conj().T)) <= 1e-10
    for _, rho_chk in traj.checkpoints:
        assert np.linalg.eigvalsh(rho_chk).min() >= -1e-6


def test_particle_conservation_identity(resonance_runs):
    traj = resonance_runs[1.0]
    h = traj.times[1] - traj.times[0]
    dp0 = np.gradient(traj.p_zero, h)
    kappa_n = 0.001 * traj.photon_number
    assert np.max(np.abs(dp0[2:-2] - kappa_n[2:-2])) <= 1e-6


def test_step_halving_fourth_order():
    p = params()
    grid_a = bs.TimeGrid(t_max=500.0, dt=0.01, record_stride=100)
    grid_b = bs.TimeGrid(t_max=500.0, dt=0.005, record_stride=200)
    ta = bs.evolve(excited(p), p, grid_a)
    tb = bs.evolve(excited(p), p, grid_b)
    delta = max(
        np.max(np.abs(ta.photon_number - tb.photon_number)),
        np.max(np.abs(ta.energy - tb.energy)),
        np.max(np.abs(ta.p_measured - tb.p_measured)),
    )
    assert delta < 1e-7


def test_steady_state_jc_relaxes_to_dark_state():
    # kappa <= lam: underdamped, relaxation rate ~kappa/2 fits inside 50/kappa
    p = params(kappa=0.01)
    result = bs.steady_state(p, excited(p))
    expected = ground(p)
    assert np.max(np.abs(result.rho - expected)) < 1e-6
    assert result.converged


def test_steady_state_thermal_occupancy():
    p = params(lam=0.05, kappa=0.05, nbar=0.2, n_max=14)
    result = bs.steady_state(p, model.initial_state(bs.BornState(0.3), "l", p), dt=0.0035)
    n = float(np.real(np.trace(result.rho @ model.number_operator(p))))
    # thermal fixed point of the photon dissipator, weakly dressed by lam
    assert abs(n - 0.2) < 1e-2
    assert result.converged


def test_evolve_deterministic():
    p = params()
    grid = bs.TimeGrid(t_max=50.0, dt=0.01)
    t1 = bs.evolve(excited(p), p, grid)
    t2 = bs.evolve(excited(p), p, grid)
    assert np.array_equal(t1.photon_number, t2.photon_number)
    assert np.array_equal(t1.rho_final, t2.rho_final)
