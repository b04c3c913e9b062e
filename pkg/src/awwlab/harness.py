"""Scenario assembly, single runs, parameter sweeps and CSV reporting.

Sweep points are independent; they are dispatched to a process pool and
merged by index, so serial and concurrent runs produce identical files.
All floats are written with a fixed format to keep outputs byte-stable.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import asymptotics, bath as bath_mod, config as config_mod, emission, exact, reduced
from .atom import AtomPath, diag_rotation_atom, eigenframe, tabulated_atom, validate_coupling
from .errors import AwwlabError, ConfigError

__all__ = [
    "Scenario",
    "builtin_scenario",
    "scenario_from_config",
    "run_simulate",
    "run_sweep",
    "run_emission",
    "run_regimes",
    "run_validate",
    "loglog_slope",
]

FLOAT_FMT = "%.12e"


@dataclass
class Scenario:
    """One atom-bath-initial-state combination ready to run."""

    name: str
    atom: AtomPath
    bath: bath_mod.BathSpec
    z0: np.ndarray
    t_end: float = 1.0
    frame_grid: int = 801
    _frame: object = field(default=None, repr=False)

    def frame(self):
        if self._frame is None:
            self._frame = eigenframe(
                self.atom, np.linspace(0.0, self.t_end, self.frame_grid))
        return self._frame


def builtin_scenario(name: str, t_end: Optional[float] = None) -> Scenario:
    """Builtin scenarios by name.

    ww-ref-2level: rotating frame with drifting upper level; the standard
    time-dependent test case. ww-const-2level: autonomous counterpart for
    long-time semigroup comparisons.
    """
    if name == "ww-ref-2level":
        atom = diag_rotation_atom(
            level_funcs=(lambda t: 1.0, lambda t: 2.0 + 0.3 * t),
            theta_func=lambda t: np.pi * t / 4.0,
            coupling_func=lambda t: np.array([1.0, 1.0]),
        )
        return Scenario(name=name, atom=atom, bath=bath_mod.reference_bath(),
                        z0=np.array([1.0, 0.0], dtype=complex),
                        t_end=1.0 if t_end is None else t_end)
    if name == "ww-const-2level":
        atom = diag_rotation_atom(
            level_funcs=(lambda t: 1.0, lambda t: 2.0),
            theta_func=lambda t: 0.0,
            coupling_func=lambda t: np.array([1.0, 1.0]),
        )
        return Scenario(name=name, atom=atom, bath=bath_mod.reference_bath(),
                        z0=np.array([1.0, 0.0], dtype=complex),
                        t_end=20.0 if t_end is None else t_end)
    raise ConfigError(f"unknown builtin scenario {name!r}", key="atom.name")


def scenario_from_config(cfg: dict) -> Scenario:
    name = config_mod.get_str(cfg, "atom.name")
    t_end = config_mod.get_float(cfg, "sim.t_end", 0.0) or None
    if name == "tabulated":
        atom = tabulated_atom(config_mod.get_str(cfg, "atom.file"))
        scen_bath = _bath_from_config(cfg)
        z0 = _z0_from_config(cfg, atom.dim)
        return Scenario(name="tabulated", atom=atom, bath=scen_bath, z0=z0,
                        t_end=t_end or 1.0)
    scen = builtin_scenario(name, t_end=t_end)
    scen.bath = _bath_from_config(cfg)
    if "sim.z0" in cfg:
        scen.z0 = _z0_from_config(cfg, scen.atom.dim)
    return scen


def _bath_from_config(cfg: dict) -> bath_mod.BathSpec:
    if "bath.file" in cfg:
        return bath_mod.bath_from_csv(cfg["bath.file"])
    name = config_mod.get_str(cfg, "bath.name")
    try:
        return bath_mod.bath_from_name(name)
    except KeyError:
        raise ConfigError(f"unknown bath {name!r}", key="bath.name")


def _z0_from_config(cfg: dict, dim: int) -> np.ndarray:
    vals = config_mod.get_float_list(cfg, "sim.z0", default=None) \
        if "sim.z0" in cfg else None
    if vals is None:
        z0 = np.zeros(dim, dtype=complex)
        z0[0] = 1.0
        return z0
    z0 = np.asarray(vals, dtype=complex)
    if len(z0) != dim:
        raise ConfigError(f"sim.z0 has {len(z0)} entries, atom dimension is {dim}",
                          key="sim.z0")
    return z0 / np.linalg.norm(z0)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else FLOAT_FMT % cell
                             for cell in row])


def _trajectory_rows(traj, frame):
    p, p_down = exact.populations(traj, frame)
    defect = traj.norm_defect if traj.norm_defect is not None \
        else np.zeros(len(traj.times))
    rows = []
    for k, t in enumerate(traj.times):
        row = [t]
        for j in range(traj.dim):
            row += [traj.z[k, j].real, traj.z[k, j].imag]
        row += list(p[k]) + [p_down[k], defect[k]]
        rows.append(row)
    return rows


def write_trajectory_csv(path, traj, frame):
    d = traj.dim
    header = (["t"]
              + [f"{part}_z{j + 1}" for j in range(d) for part in ("re", "im")]
              + [f"p_{j + 1}" for j in range(d)] + ["p_down", "norm_defect"])
    _write_csv(path, header, _trajectory_rows(traj, frame))


def _solve_all(scen: Scenario, eps: float, lam: float, rtol: float = 1e-10,
               dt_out: float = 1.0 / 200, tol_corr: float = 1e-4,
               override: bool = False):
    frame = scen.frame()
    modes = exact.discretize_bath(scen.bath, eps, tol_corr=tol_corr,
                                  horizon=scen.t_end / eps)
    tr_exact = exact.propagate_exact(
        scen.atom, frame, modes, scen.z0, eps, lam, t_end=scen.t_end,
        dt_out=dt_out, rtol=rtol, bath=scen.bath, override_smallness=override)
    tr_volt = reduced.volterra_solve(scen.atom, frame, scen.bath, eps, lam,
                                     scen.z0, t_end=scen.t_end)
    tr_eff = reduced.effective_solve(scen.atom, frame, scen.bath, eps, lam,
                                     scen.z0, t_end=scen.t_end, dt_out=dt_out)
    tables = asymptotics.tables_for(scen.atom, frame, scen.bath)
    z_lead = asymptotics.leading_order_z(frame, scen.bath, scen.atom, eps, lam,
                                         scen.z0, tr_exact.times, tables=tables)
    tr_lead = exact.Trajectory(times=tr_exact.times, z=z_lead,
                               meta={"eps": eps, "lam": lam, "scheme": "leading"})
    return frame, modes, tr_exact, tr_volt, tr_eff, tr_lead, tables


def point_metrics(scen: Scenario, eps: float, lam: float, **kw) -> dict:
    """Error metrics of one (eps, lambda) point against the exact oracle."""
    frame, _, tr_exact, tr_volt, tr_eff, tr_lead, tables = \
        _solve_all(scen, eps, lam, **kw)
    ts = tr_exact.times
    e_volt = float(np.max(np.linalg.norm(tr_volt.z_at(ts) - tr_exact.z, axis=1)))
    e_eff = float(np.max(np.linalg.norm(tr_eff.z_at(ts) - tr_exact.z, axis=1)))
    e_lead = float(np.max(np.linalg.norm(tr_lead.z - tr_exact.z, axis=1)))
    p_down = float(exact.de_excitation(tr_exact)[-1])
    report = asymptotics.regime_classify(eps, lam, tables=tables, z0=scen.z0,
                                         t=scen.t_end)
    return {"eps": eps, "lam": lam, "E_lead": e_lead, "E_volt": e_volt,
            "E_eff": e_eff, "p_down": p_down,
            "p_down_pred": report.p_down, "regime": report.regime}


def run_simulate(cfg: dict, out_dir: str, override: bool = False,
                 threads: int = 1) -> list:
    """One (eps, lambda) point; writes four trajectory CSVs plus a comparison."""
    scen = scenario_from_config(cfg)
    eps = config_mod.get_float(cfg, "sim.eps")
    lam = np.sqrt(config_mod.get_float(cfg, "sim.lambda2"))
    rtol = config_mod.get_float(cfg, "solver.rtol", 1e-10)
    dt_out = config_mod.get_float(cfg, "solver.dt_out", 1.0 / 200)
    tol_corr = config_mod.get_float(cfg, "solver.tol_corr", 1e-4)
    frame, _, tr_exact, tr_volt, tr_eff, tr_lead, _ = _solve_all(
        scen, eps, lam, rtol=rtol, dt_out=dt_out, tol_corr=tol_corr,
        override=override)

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for tag, traj in (("exact", tr_exact), ("volterra", tr_volt),
                      ("effective", tr_eff), ("leading", tr_lead)):
        path = os.path.join(out_dir, f"trajectory_{tag}.csv")
        write_trajectory_csv(path, traj, frame)
        written.append(path)

    ts = tr_exact.times
    rows = [[t,
             np.linalg.norm(tr_volt.z_at(t) - tr_exact.z[k]),
             np.linalg.norm(tr_eff.z_at(t) - tr_exact.z[k]),
             np.linalg.norm(tr_lead.z[k] - tr_exact.z[k])]
            for k, t in enumerate(ts)]
    path = os.path.join(out_dir, "comparison.csv")
    _write_csv(path, ["t", "E_volt", "E_eff", "E_lead"], rows)
    written.append(path)
    return written


def _lambda_for(rule: str, eps: float, index: int) -> float:
    rule = rule.replace(" ", "")
    if rule == "lambda2=eps":
        return float(np.sqrt(eps))
    if rule.startswith("lambda2=") and "*eps^" in rule:
        c_str, p_str = rule[len("lambda2="):].split("*eps^")
        try:
            return float(np.sqrt(float(c_str) * eps ** float(p_str)))
        except ValueError:
            pass
    if rule.startswith("list:"):
        vals = [float(tok) for tok in rule[5:].split(",")]
        return vals[index]
    raise ConfigError(f"cannot parse sweep.lambda_rule {rule!r}",
                      key="sweep.lambda_rule")


def _sweep_worker(args):
    cfg, eps, lam, override = args
    scen = scenario_from_config(cfg)
    rtol = config_mod.get_float(cfg, "solver.rtol", 1e-10)
    tol_corr = config_mod.get_float(cfg, "solver.tol_corr", 1e-4)
    try:
        return point_metrics(scen, eps, lam, rtol=rtol, tol_corr=tol_corr,
                             override=override)
    except AwwlabError as exc:
        return {"eps": eps, "lam": lam, "error": f"{type(exc).__name__}: {exc}"}


def loglog_slope(xs, ys):
    """Least-squares slope of log y vs log x with its standard error."""
    lx, ly = np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float))
    n = len(lx)
    coeffs, residuals, *_ = np.polyfit(lx, ly, 1, full=True)
    slope = float(coeffs[0])
    if n > 2 and len(residuals):
        var = float(residuals[0]) / (n - 2)
        stderr = float(np.sqrt(var / np.sum((lx - lx.mean()) ** 2)))
    else:
        stderr = 0.0
    return slope, stderr


def run_sweep(cfg: dict, out_dir: str, override: bool = False,
              threads: int = 1) -> dict:
    """All sweep points concurrently, then log-log slope fits per metric."""
    epsilons = config_mod.get_float_list(cfg, "sweep.epsilons")
    if len(epsilons) < 3:
        raise ConfigError("need >= 3 points for slope fit", key="sweep.epsilons")
    rule = config_mod.get_str(cfg, "sweep.lambda_rule", "lambda2=eps")
    direction = config_mod.get_str(cfg, "sweep.direction", "eps")
    lams = [_lambda_for(rule, eps, i) for i, eps in enumerate(epsilons)]
    jobs = [(cfg, eps, lam, override) for eps, lam in zip(epsilons, lams)]

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(job) for job in jobs]

    os.makedirs(out_dir, exist_ok=True)
    header = ["eps", "lambda", "E_lead", "E_volt", "E_eff",
              "p_down", "p_down_pred", "regime", "status"]
    rows = []
    for res in results:
        if "error" in res:
            rows.append([res["eps"], res["lam"], "nan", "nan", "nan",
                         "nan", "nan", "failed", res["error"]])
        else:
            rows.append([res["eps"], res["lam"], res["E_lead"], res["E_volt"],
                         res["E_eff"], res["p_down"], res["p_down_pred"],
                         res["regime"], "ok"])
    _write_csv(os.path.join(out_dir, "sweep.csv"), header, rows)

    good = [res for res in results if "error" not in res]
    slopes = {}
    if len(good) >= 3:
        xs = [res["eps"] if direction == "eps" else res["lam"] for res in good]
        for metric in ("E_lead", "E_volt", "E_eff"):
            ys = [res[metric] for res in good]
            if min(ys) > 0.0:
                slopes[metric] = loglog_slope(xs, ys)
    _write_csv(os.path.join(out_dir, "slopes.csv"),
               ["metric", "axis", "slope", "stderr"],
               [[m, direction, s, se] for m, (s, se) in slopes.items()])
    return {"results": results, "slopes": slopes,
            "partial": len(good) < len(results)}


def _observable_from_config(cfg: dict) -> bath_mod.TestObservable:
    name = config_mod.get_str(cfg, "emission.observable", "one")
    if name == "one":
        return bath_mod.TestObservable(weight=lambda w: np.ones_like(w))
    if name == "omega":
        return bath_mod.TestObservable(weight=lambda w: np.asarray(w, dtype=float))
    raise ConfigError(f"unknown observable {name!r}", key="emission.observable")


def run_emission(cfg: dict, out_dir: str, override: bool = False,
                 threads: int = 1) -> dict:
    """Emitted-spectrum CSV plus mode-sum average vs the applicable limit law."""
    scen = scenario_from_config(cfg)
    r = config_mod.get_float(cfg, "emission.r", 1.0)
    eps = config_mod.get_float(cfg, "emission.eps",
                               config_mod.get_float(cfg, "sim.eps", 0.05))
    lam = float(np.sqrt(r * eps))
    obs = _observable_from_config(cfg)
    frame = scen.frame()
    modes = exact.discretize_bath(scen.bath, eps, horizon=scen.t_end / eps)
    traj = exact.propagate_exact(scen.atom, frame, modes, scen.z0, eps, lam,
                                 t_end=scen.t_end, bath=scen.bath,
                                 override_smallness=override)
    avg = float(emission.observable_average(traj, modes, obs)[-1])
    limit = emission.regime_B_limit(frame, scen.bath, scen.atom, obs, 0, r,
                                    scen.t_end)

    os.makedirs(out_dir, exist_ok=True)
    t_fin = traj.times[-1]
    rows = [[t_fin, w, abs(f) ** 2, b]
            for w, f, b in zip(modes.omegas, traj.field[-1], obs(modes.omegas))]
    rows.append(["summary", avg, limit, r])
    _write_csv(os.path.join(out_dir, "spectrum.csv"),
               ["t", "omega", "density", "B"], rows)
    return {"average": avg, "limit": limit, "r": r, "eps": eps}


def run_regimes(cfg: dict, out_dir: str, override: bool = False,
                threads: int = 1) -> list:
    """Regime classification table over the configured sweep points."""
    scen = scenario_from_config(cfg)
    epsilons = config_mod.get_float_list(cfg, "sweep.epsilons")
    rule = config_mod.get_str(cfg, "sweep.lambda_rule", "lambda2=eps")
    tables = asymptotics.tables_for(scen.atom, scen.frame(), scen.bath)
    rows = []
    out = []
    for i, eps in enumerate(epsilons):
        lam = _lambda_for(rule, eps, i)
        rep = asymptotics.regime_classify(eps, lam, tables=tables, z0=scen.z0,
                                          t=scen.t_end)
        rows.append([eps, lam, rep.ratio, rep.regime, rep.p_down])
        out.append(rep)
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "regimes.csv"),
               ["eps", "lambda", "ratio", "regime", "p_down_pred"], rows)
    return out


def run_validate(cfg: dict, out_dir: Optional[str] = None,
                 override: bool = False, threads: int = 1) -> dict:
    """Coupling-smallness and well-coupledness report for the configured point."""
    scen = scenario_from_config(cfg)
    eps = config_mod.get_float(cfg, "sim.eps", 0.05)
    lam = float(np.sqrt(config_mod.get_float(cfg, "sim.lambda2", 1.0 / 64)))
    report = validate_coupling(scen.atom, scen.frame(), scen.bath, lam)
    ok = report.ok or override
    if not bath_mod.check_decay_bound(scen.bath):
        ok = False
    return {"ok": ok, "smallness": report.smallness_value,
            "smallness_ok": report.smallness_ok,
            "well_coupled": report.well_coupled,
            "beta_min": [float(b) for b in report.beta_min], "eps": eps, "lam": lam}
