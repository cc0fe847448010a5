"""Scenario runner: reproduces the reference figure datasets from the shell.

Two subcommands:

  bornsim run       evolve one scenario, write the trajectory table and a
                    JSON summary with analytic comparisons
  bornsim converge  rerun a scenario with n_max doubled and dt halved and
                    report the observable deltas (PASS/FAIL)

Configuration precedence: command-line flags > config file (TOML) > preset.
Exit codes: 0 success, 2 config error, 3 runtime invariant violation,
4 convergence failure.
"""

import argparse
import json
import math
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import analytic, dynamics, model, observables, operators as ops

TRAJECTORY_HEADER = (
    "t,n_photon,P_plus,P_minus,ReP_pm,P0,J_deriv,J_dressed,"
    "P_meas_cum,E_acc,trace_err"
)

# Keys accepted in config files; CLI flags mirror them with a -- prefix.
CONFIG_KEYS = (
    "omega0", "E_e", "E_g", "lambda", "kappa", "nbar", "coupling",
    "n_max", "t_max", "dt", "weight_l", "scenario", "out", "format",
)

EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_CONVERGENCE = 4

# Each preset pins the caption parameters of one reference figure.
# t_max and dt are derived (20/kappa and min(0.01, 0.05/||H||)) when unset.
PRESETS = {
    "fig1": {
        "omega0": 1.0, "E_e": 0.0, "E_g": -1.0, "lambda": 0.01,
        "kappa": 0.001, "nbar": 0.0, "coupling": "jc", "n_max": 2,
        "weight_l": 1.0,
    },
    "fig2": {
        "omega0": 1.0, "E_e": 0.0, "E_g": -1.0, "lambda": 0.01,
        "kappa": 0.001, "nbar": 0.0, "coupling": "jc", "n_max": 2,
        "weight_l": 1.0,
    },
    "fig3a": {
        "omega0": 1.0, "E_e": 0.0, "E_g": -1.0, "lambda": 0.5,
        "kappa": 0.1, "nbar": 0.0, "coupling": "rabi", "n_max": 24,
        "weight_l": 1.0,
    },
    "fig3b": {
        "omega0": 1.0, "E_e": 0.0, "E_g": -1.0, "lambda": 0.5,
        "kappa": 0.1, "nbar": 0.0, "coupling": "rabi", "n_max": 24,
        "weight_l": 1.0,
    },
    "finite_t": {
        "omega0": 1.0, "E_e": 0.0, "E_g": -1.0, "lambda": 0.05,
        "kappa": 0.01, "nbar": 0.2, "coupling": "jc", "n_max": 14,
        "weight_l": 0.3,
    },
    "custom": {
        "omega0": 1.0, "E_e": 0.0, "E_g": -1.0, "lambda": 0.01,
        "kappa": 0.001, "nbar": 0.0, "coupling": "jc", "n_max": 2,
        "weight_l": 1.0,
    },
}


class ConfigError(ValueError):
    pass


def load_config_file(path: str) -> dict:
    """Parse a flat TOML config; unknown keys are rejected."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path!r}: {exc}") from exc
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(
            f"config file {path!r}: unknown keys {unknown}; "
            f"allowed keys are {list(CONFIG_KEYS)}"
        )
    return raw


def merge_config(args: argparse.Namespace) -> dict:
    """Presets < config file < explicit flags."""
    file_cfg = load_config_file(args.config) if args.config else {}
    scenario = args.scenario or file_cfg.get("scenario") or "fig1"
    if scenario not in PRESETS:
        raise ConfigError(
            f"scenario: unknown scenario {scenario!r}; "
            f"choose from {sorted(PRESETS)}"
        )
    cfg = dict(PRESETS[scenario])
    cfg["scenario"] = scenario
    cfg["out"] = None
    cfg["format"] = "csv"
    cfg["t_max"] = None
    cfg["dt"] = None
    for key in CONFIG_KEYS:
        if key in file_cfg and key != "scenario":
            cfg[key] = file_cfg[key]
    flag_map = {
        "omega0": args.omega0, "E_e": args.E_e, "E_g": args.E_g,
        "lambda": getattr(args, "lam"), "kappa": args.kappa,
        "nbar": args.nbar, "coupling": args.coupling, "n_max": args.n_max,
        "t_max": args.t_max, "dt": args.dt, "weight_l": args.weight_l,
        "out": args.out, "format": args.format,
    }
    for key, value in flag_map.items():
        if value is not None:
            cfg[key] = value
    return cfg


def build_run(cfg: dict):
    """(params, weight, grid) from a merged config dict."""
    try:
        params = model.ModelParams(
            omega0=float(cfg["omega0"]),
            e_g=float(cfg["E_g"]),
            lam=float(cfg["lambda"]),
            kappa=float(cfg["kappa"]),
            e_e=float(cfg["E_e"]),
            nbar=float(cfg["nbar"]),
            coupling=str(cfg["coupling"]),
            n_max=int(cfg["n_max"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model parameters: {exc}") from exc
    try:
        weight = model.BornState(float(cfg["weight_l"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"weight_l: {exc}") from exc
    t_max = cfg["t_max"]
    if t_max is None:
        if params.kappa <= 0:
            raise ConfigError("t_max: required when kappa = 0 (no 20/kappa default)")
        t_max = 20.0 / params.kappa
    dt = cfg["dt"]
    if dt is None:
        dt = min(0.01, dynamics.max_stable_dt(params))
    try:
        grid = dynamics.TimeGrid(t_max=float(t_max), dt=float(dt))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"time grid: {exc}") from exc
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format: must be 'csv' or 'json', got {cfg['format']!r}")
    return params, weight, grid


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def trajectory_columns(traj, params):
    """Column arrays in TRAJECTORY_HEADER order."""
    j_deriv = observables.energy_current(
        traj, params, method=observables.CurrentMethod.ENERGY_DERIVATIVE
    )
    if traj.has_dressed:
        method = (
            observables.CurrentMethod.FINITE_T_FORMULA
            if params.nbar > 0
            else observables.CurrentMethod.DRESSED_FORMULA
        )
        j_dressed = observables.energy_current(traj, params, method=method)
    else:
        j_dressed = np.full_like(traj.times, np.nan)
    return [
        traj.times, traj.photon_number, traj.p_plus, traj.p_minus,
        np.real(traj.p_pm), traj.p_zero, j_deriv, j_dressed,
        traj.p_measured, traj.accumulated_energy_series, traj.trace_error,
    ]


def write_trajectory(path, traj, params, fmt):
    cols = trajectory_columns(traj, params)
    names = TRAJECTORY_HEADER.split(",")
    if fmt == "csv":
        lines = [TRAJECTORY_HEADER]
        for r in range(len(traj.times)):
            lines.append(",".join(_fmt(col[r]) for col in cols))
        text = "\n".join(lines) + "\n"
    else:
        payload = {name: [_fmt(v) for v in col] for name, col in zip(names, cols)}
        text = json.dumps(payload, indent=1) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def _analytic_block(traj, params, weight):
    """Closed-form predictions relevant to the scenario, plus deviations."""
    w = weight.weight_l
    analytic_out = {}
    deviations = {}
    horizon_ok = params.kappa > 0 and traj.t_end >= 20.0 / params.kappa - 1e-9

    p_meas = traj.p_measured[-1]
    if params.nbar > 0:
        p_meas -= params.kappa * params.nbar / (1.0 + params.nbar) * traj.int_p0[-1]
    e_acc = observables.accumulated_energy(traj)

    if params.coupling == model.JC and params.nbar == 0:
        analytic_out["p_infinity"] = w
        analytic_out["e_accumulated_infinity"] = -params.e_g * w
        deviations["p_measured"] = abs(p_meas - w)
        deviations["e_accumulated"] = abs(e_acc - (-params.e_g * w))
        if abs(params.omega0 + params.e_g) < 1e-9 and params.lam > 0:
            sched = analytic.quasi_step_prediction(params, 1)[2]
            analytic_out["quasi_step"] = {
                "period": sched.period, "n_c": sched.n_c, "t_c": sched.t_c,
            }
    if params.coupling == model.RABI:
        pert = analytic.rabi_perturbation(params, 0)
        analytic_out["rabi_perturbation"] = {
            "d_00": pert.d_nn,
            "e_plus": pert.e_plus,
            "e_minus": pert.e_minus,
            "steady_photon_number": pert.steady_photon_number,
        }
        tail = traj.photon_number[-1]
        deviations["steady_photon_number"] = abs(tail - pert.steady_photon_number)
    if params.nbar > 0:
        pred = analytic.finite_t_prediction(params, w)
        analytic_out["finite_t"] = {
            "z": pred.z,
            "z_prime": pred.z_prime,
            "effective_counter": pred.effective_counter,
            "energy_loss": pred.energy_loss,
        }
        deviations["effective_counter"] = abs(p_meas - pred.effective_counter)
        deviations["e_accumulated"] = abs(e_acc - pred.energy_loss)
    return p_meas, e_acc, analytic_out, deviations, horizon_ok


def summarize(scenario, traj, params, weight, grid, convergence=None):
    p_meas, e_acc, analytic_out, deviations, horizon_ok = _analytic_block(
        traj, params, weight
    )
    return {
        "scenario": scenario,
        "params": {
            "omega0": params.omega0, "E_e": params.e_e, "E_g": params.e_g,
            "lambda": params.lam, "kappa": params.kappa, "nbar": params.nbar,
            "coupling": params.coupling, "n_max": params.n_max,
            "weight_l": weight.weight_l, "t_max": grid.t_max, "dt": grid.dt,
            "horizon_ok": horizon_ok,
        },
        "p_measured": p_meas,
        "e_accumulated": e_acc,
        "analytic": analytic_out,
        "deviations": deviations,
        "convergence": convergence if convergence is not None else {"checked": False},
    }


def summary_path(out: str) -> str:
    stem = out
    for ext in (".csv", ".json"):
        if stem.endswith(ext):
            stem = stem[: -len(ext)]
            break
    return stem + ".summary.json"


def run_scenario(cfg: dict) -> int:
    params, weight, grid = build_run(cfg)
    rho0 = model.initial_state(weight, "l", params)
    traj = dynamics.evolve(rho0, params, grid)
    summary = summarize(cfg["scenario"], traj, params, weight, grid)
    if cfg["out"]:
        write_trajectory(cfg["out"], traj, params, cfg["format"])
        with open(summary_path(cfg["out"]), "w") as fh:
            json.dump(summary, fh, indent=1)
            fh.write("\n")
    print(json.dumps(summary, indent=1))
    return 0


# Convergence thresholds: dt halving must move observables by < 1e-6; the
# n_max doubling bound is looser for the Rabi model, whose Fock tail decays
# more slowly than the JC excitation-confined dynamics.
DT_DELTA_TOL = 1e-6
NMAX_DELTA_TOL = {"jc": 1e-6, "rabi": 1e-4}


def _observable_delta(t1, t2) -> float:
    n = min(len(t1.times), len(t2.times))
    return float(
        max(
            np.abs(t1.photon_number[:n] - t2.photon_number[:n]).max(),
            np.abs(t1.energy[:n] - t2.energy[:n]).max(),
            np.abs(t1.p_measured[:n] - t2.p_measured[:n]).max(),
        )
    )


def convergence_report(cfg: dict) -> tuple[dict, bool]:
    params, weight, grid = build_run(cfg)
    rho0 = model.initial_state(weight, "l", params)
    n_steps, stride = grid.resolve()
    base = dynamics.evolve(
        rho0, params, dynamics.TimeGrid(grid.t_max, grid.dt, record_stride=stride)
    )

    half = dynamics.evolve(
        rho0, params,
        dynamics.TimeGrid(grid.t_max, grid.dt / 2.0, record_stride=2 * stride),
    )
    dt_delta = _observable_delta(base, half)

    params2 = model.ModelParams(
        omega0=params.omega0, e_g=params.e_g, lam=params.lam,
        kappa=params.kappa, e_e=params.e_e, nbar=params.nbar,
        coupling=params.coupling, n_max=2 * params.n_max,
    )
    rho0_2 = model.initial_state(weight, "l", params2)
    # doubling n_max grows ||H||, so subdivide dt by an integer factor to
    # stay inside the stability bound while keeping the record grid aligned
    factor = max(1, math.ceil(grid.dt / (0.9 * dynamics.max_stable_dt(params2))))
    deep = dynamics.evolve(
        rho0_2, params2,
        dynamics.TimeGrid(grid.t_max, grid.dt / factor, record_stride=stride * factor),
    )
    nmax_delta = _observable_delta(base, deep)

    nmax_tol = NMAX_DELTA_TOL[params.coupling]
    passed = dt_delta < DT_DELTA_TOL and nmax_delta < nmax_tol
    report = {
        "checked": True,
        "dt": grid.dt,
        "dt_halved_delta": dt_delta,
        "dt_tolerance": DT_DELTA_TOL,
        "n_max": params.n_max,
        "n_max_doubled_delta": nmax_delta,
        "n_max_tolerance": nmax_tol,
        "passed": passed,
    }
    return report, passed


def run_converge(cfg: dict) -> int:
    report, passed = convergence_report(cfg)
    report["scenario"] = cfg["scenario"]
    text = json.dumps(report, indent=1)
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text + "\n")
    print(text)
    print("CONVERGENCE " + ("PASS" if passed else "FAIL"))
    return 0 if passed else EXIT_CONVERGENCE


def _add_shared_flags(sub):
    sub.add_argument("--scenario", choices=sorted(PRESETS), default=None)
    sub.add_argument("--config", default=None, help="TOML config file")
    sub.add_argument("--omega0", type=float, default=None)
    sub.add_argument("--E_e", "--ee", type=float, default=None, dest="E_e")
    sub.add_argument("--E_g", "--eg", type=float, default=None, dest="E_g")
    sub.add_argument("--lambda", type=float, default=None, dest="lam")
    sub.add_argument("--kappa", type=float, default=None)
    sub.add_argument("--nbar", type=float, default=None)
    sub.add_argument("--coupling", choices=[model.JC, model.RABI], default=None)
    sub.add_argument("--n_max", "--n-max", type=int, default=None, dest="n_max")
    sub.add_argument("--t_max", "--t-max", type=float, default=None, dest="t_max")
    sub.add_argument("--dt", type=float, default=None)
    sub.add_argument("--weight_l", "--weight", type=float, default=None, dest="weight_l")
    sub.add_argument("--out", default=None, help="output file path")
    sub.add_argument("--format", choices=["csv", "json"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bornsim",
        description="Photon-counting probability measurement simulator",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_shared_flags(subparsers.add_parser("run", help="evolve one scenario"))
    _add_shared_flags(
        subparsers.add_parser("converge", help="n_max doubling / dt halving check")
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "run":
            return run_scenario(cfg)
        return run_converge(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        dynamics.StabilityError,
        dynamics.TraceDriftError,
        dynamics.PositivityError,
        ops.DensityMatrixError,
        ops.DimensionError,
        ops.NormalizationError,
        observables.HorizonError,
    ) as exc:
        print(f"invariant violation ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
