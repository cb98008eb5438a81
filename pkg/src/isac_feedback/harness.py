"""Monte Carlo experiment driver.

A trial is a pure function of (config seed, trial index): the population,
target, downlink noise, and echo noise each come from their own named
substream, so results are bit-reproducible regardless of scheduling, and
two designs evaluated at the same trial index see identical worlds (common
random numbers). Sweeps emit CSV files whose bytes depend only on the
config and the sweep lists.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import airlink, designer, sensing
from .scenario import SystemConfig, make_grid, make_population, make_targets
from .numerics import substream

METHODS = ("pgd", "matched_filter")


@dataclass(frozen=True)
class TrialMetrics:
    trial_index: int
    method: str
    e_c_empirical: float
    e_c_analytic: float
    theta_true_deg: float
    theta_hat_deg: float
    sq_angle_error_deg2: float
    e_s_analytic: float
    objective_initial: float
    objective_final: float
    wall_time_s: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialMetrics":
        return cls(**d)


def run_trial(cfg: SystemConfig, trial_index: int, method: str = "pgd") -> TrialMetrics:
    """One full pipeline pass: world, design, downlink decisions, echo, estimate."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    t0 = time.perf_counter()
    pop = make_population(cfg, substream(cfg.seed, trial_index, "population"))
    scene = make_targets(cfg, substream(cfg.seed, trial_index, "targets"))
    grid = make_grid(cfg)

    base = designer.matched_filter_baseline(pop, cfg.power_budget,
                                            init_sign=cfg.init_sign)
    sigma_ch2 = cfg.decision_noise_var
    es_args = (cfg.sigma_e2_mw, cfg.rho0_linear, cfg.target_dist, cfg.alpha_t)

    def objective(fb):
        return (cfg.mu * designer.analytic_comm_error(fb, pop, sigma_ch2)
                + (1.0 - cfg.mu) * designer.mean_sense_error(fb, grid, *es_args))

    obj0 = objective(base)
    if method == "pgd":
        fb, trace = designer.design_feedback(cfg, pop, grid)
        obj_final = trace.steps[-1].objective
    else:
        fb, obj_final = base, obj0

    outcomes = airlink.simulate_decisions(
        fb, pop, substream(cfg.seed, trial_index, "downlink-noise"), cfg.sigma_c2_mw)
    e_c_emp = airlink.empirical_comm_error(outcomes)
    e_c_ana = designer.analytic_comm_error(fb, pop, sigma_ch2)
    e_s_ana = designer.mean_sense_error(fb, grid, *es_args)

    obs = airlink.echo(fb, scene, substream(cfg.seed, trial_index, "echo-noise"),
                       cfg.sigma_e2_mw, cfg.rho0_linear, cfg.alpha_t)
    est = sensing.estimate_angles(obs, scene.n_targets, cfg.sector_rad)
    theta_true = float(scene.angles[0])
    theta_hat = est[0].theta_hat
    sq_err = (math.degrees(theta_true) - math.degrees(theta_hat)) ** 2

    return TrialMetrics(
        trial_index=trial_index,
        method=method,
        e_c_empirical=e_c_emp,
        e_c_analytic=e_c_ana,
        theta_true_deg=math.degrees(theta_true),
        theta_hat_deg=math.degrees(theta_hat),
        sq_angle_error_deg2=sq_err,
        e_s_analytic=e_s_ana,
        objective_initial=obj0,
        objective_final=obj_final,
        wall_time_s=time.perf_counter() - t0,
    )


def _aggregate(trials: list) -> dict:
    ec_ana = np.array([t.e_c_analytic for t in trials])
    ec_emp = np.array([t.e_c_empirical for t in trials])
    sq = np.array([t.sq_angle_error_deg2 for t in trials])
    n = len(trials)
    stderr = float(ec_ana.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return {
        "n_trials": n,
        "mean_ec": float(ec_ana.mean()),
        "stderr_ec": stderr,
        "mean_ec_empirical": float(ec_emp.mean()),
        "rmse_deg": float(np.sqrt(sq.mean())),
    }


@dataclass(frozen=True)
class ExperimentResult:
    """One sweep cell: config snapshot, per-trial rows, and their aggregates."""

    config: dict
    method: str
    trials: tuple
    aggregates: dict

    @classmethod
    def from_trials(cls, cfg: SystemConfig, method: str, trials: list) -> "ExperimentResult":
        return cls(config=cfg.to_json_dict(), method=method, trials=tuple(trials),
                   aggregates=_aggregate(trials))

    def cfg(self) -> SystemConfig:
        return SystemConfig.from_json_dict(self.config)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "method": self.method,
            "trials": [t.to_dict() for t in self.trials],
            "aggregates": self.aggregates,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ExperimentResult":
        trials = [TrialMetrics.from_dict(t) for t in doc["trials"]]
        recomputed = _aggregate(trials)
        stored = doc["aggregates"]
        for key, val in recomputed.items():
            if abs(val - stored[key]) > 1e-12 * max(1.0, abs(val)):
                raise ValueError(
                    f"stored aggregate {key}={stored[key]} disagrees with "
                    f"recomputed {val}")
        return cls(config=doc["config"], method=doc["method"],
                   trials=tuple(trials), aggregates=stored)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ExperimentResult":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def run_cell(cfg: SystemConfig, method: str, n_trials: int,
             n_threads: int = 1) -> ExperimentResult:
    """Run n_trials independent trials; results ordered by trial index."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if n_threads <= 1:
        trials = [run_trial(cfg, i, method) for i in range(n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            trials = list(pool.map(lambda i: run_trial(cfg, i, method),
                                   range(n_trials)))
    return ExperimentResult.from_trials(cfg, method, trials)


def fig2_cells(cfg_base: SystemConfig, k_list, l_list):
    """Derived configs for the comm-only sweep: mu=1, 90/10 decode split."""
    for k in k_list:
        for l in l_list:
            yield dataclasses.replace(cfg_base, k_users=int(k), l=int(l),
                                      n_decoded=int(math.floor(0.9 * k)), mu=1.0)


def run_fig2(cfg_base: SystemConfig, k_list, l_list, n_trials: int,
             n_threads: int = 1) -> list:
    """Proposed design vs matched-filter baseline over (K, L) cells."""
    results = []
    for cfg in fig2_cells(cfg_base, k_list, l_list):
        for method in METHODS:
            results.append(run_cell(cfg, method, n_trials, n_threads))
    return results


def run_fig3(cfg_base: SystemConfig, mu_list, l_list, n_trials: int,
             n_threads: int = 1) -> list:
    """Pareto sweep over (mu, L) at K=50 with a 45/5 decode split."""
    results = []
    for mu in mu_list:
        for l in l_list:
            cfg = dataclasses.replace(cfg_base, k_users=50, n_decoded=45,
                                      l=int(l), mu=float(mu))
            results.append(run_cell(cfg, "pgd", n_trials, n_threads))
    return results


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _csv_header_comment(cfg_base: SystemConfig, n_trials: int) -> str:
    return (f"# config_hash={cfg_base.config_hash()} seed={cfg_base.seed} "
            f"codebook_seed={cfg_base.codebook_seed} init_sign={cfg_base.init_sign} "
            f"n_trials={n_trials}\n")


def write_fig2_csv(cfg_base: SystemConfig, results: list, path) -> None:
    lines = [_csv_header_comment(cfg_base, results[0].aggregates["n_trials"])]
    lines.append("K,L,method,mean_ec,stderr_ec,n_trials\n")
    for res in results:
        agg = res.aggregates
        cfg = res.cfg()
        lines.append(
            f"{cfg.k_users},{cfg.l},{res.method},{_fmt(agg['mean_ec'])},"
            f"{_fmt(agg['stderr_ec'])},{agg['n_trials']}\n")
    with open(path, "w", newline="") as fh:
        fh.writelines(lines)


def write_fig3_csv(cfg_base: SystemConfig, results: list, path) -> None:
    lines = [_csv_header_comment(cfg_base, results[0].aggregates["n_trials"])]
    lines.append("mu,L,mean_ec,stderr_ec,rmse_deg,n_trials\n")
    for res in results:
        agg = res.aggregates
        cfg = res.cfg()
        lines.append(
            f"{_fmt(cfg.mu)},{cfg.l},{_fmt(agg['mean_ec'])},"
            f"{_fmt(agg['stderr_ec'])},{_fmt(agg['rmse_deg'])},{agg['n_trials']}\n")
    with open(path, "w", newline="") as fh:
        fh.writelines(lines)
