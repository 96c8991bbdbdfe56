"""Seeded Monte Carlo sweeps comparing the joint design with the relay-only baseline."""

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .alternating import optimize_joint, optimize_relay_only
from .system import SystemParams, db2lin, draw_channels, total_power

CSV_HEADER = "sweep_variable,sweep_value,mode,mean_R_sec,mean_total_power,feasible_fraction,trials_used"
MODES = ("joint", "relay-only")
DEFAULT_SWEEPS = {"pmax": [0.0, 5.0, 10.0, 15.0, 20.0], "rsi": [0.01, 0.03, 0.1, 0.3, 1.0]}
MASK64 = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed, trial_index):
    return (master_seed ^ splitmix64(trial_index)) & MASK64


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    trials: int
    master_seed: int
    sweep_variable: str
    sweep_values: tuple
    modes: tuple = MODES
    output_path: str = "sweep.csv"
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sweep_variable not in DEFAULT_SWEEPS:
            raise ValueError(f"unknown sweep variable {self.sweep_variable!r}")
        vals = list(self.sweep_values)
        if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be nonempty and strictly increasing")
        if not self.modes or any(m not in MODES for m in self.modes):
            raise ValueError(f"modes must be a nonempty subset of {MODES}")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master seed must fit in 64 bits")

    def params_at(self, value):
        if self.sweep_variable == "pmax":
            return replace(self.params, P_max=float(db2lin(value)))
        return replace(self.params, rsi_variance=float(value))


@dataclass(frozen=True)
class SweepRow:
    sweep_variable: str
    sweep_value: float
    mode: str
    mean_R_sec: float
    mean_total_power: float
    feasible_fraction: float
    trials_used: int

    def csv_line(self):
        return ",".join([
            self.sweep_variable, f"{self.sweep_value:.9g}", self.mode,
            f"{self.mean_R_sec:.9g}", f"{self.mean_total_power:.9g}",
            f"{self.feasible_fraction:.9g}", str(self.trials_used),
        ])


def run_trial(params, mode, seed):
    """One channel draw solved in one mode; returns ``(R_sec, total_power)`` or ``None``."""
    ch = draw_channels(params, seed)
    solver_seed = seed & 0x7FFFFFFF
    if mode == "joint":
        tr = optimize_joint(ch, params, seed=solver_seed)
    else:
        tr = optimize_relay_only(ch, params, seed=solver_seed)
    if not tr.feasible:
        return None
    return tr.final_report.R_sec, float(total_power(tr.final, tr.final_report))


def _run_point(args):
    params, mode, seeds = args
    return [run_trial(params, mode, s) for s in seeds]


def _aggregate(var, value, mode, results):
    ok = [r for r in results if r is not None]
    n = len(ok)
    mean_r = math.fsum(r[0] for r in ok) / n if n else math.nan
    mean_p = math.fsum(r[1] for r in ok) / n if n else math.nan
    return SweepRow(var, float(value), mode, mean_r, mean_p, n / len(results), n)


def write_csv(rows, handle):
    handle.write(CSV_HEADER + "\n")
    for row in rows:
        handle.write(row.csv_line() + "\n")


def run_sweep(config, progress=None):
    """Run every (sweep value, mode) pair and write the CSV.

    Trial ``k`` uses the same channel seed at every sweep value and in every
    mode, so the comparison is paired. Means are taken over feasible trials.
    """
    seeds = [trial_seed(config.master_seed, k) for k in range(config.trials)]
    jobs = [(v, m) for v in config.sweep_values for m in config.modes]
    with open(config.output_path, "w", newline="") as fh:
        tasks = [(config.params_at(v), m, seeds) for v, m in jobs]
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                results = list(pool.map(_run_point, tasks))
        else:
            results = []
            for t in tasks:
                results.append(_run_point(t))
                if progress:
                    progress(len(results), len(tasks))
        rows = [_aggregate(config.sweep_variable, v, m, res) for (v, m), res in zip(jobs, results)]
        write_csv(rows, fh)
    return rows


def _float_list(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def build_parser():
    p = argparse.ArgumentParser(prog="secrelay-sweep", description=__doc__)
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--mt", type=int)
    p.add_argument("--mr", type=int)
    p.add_argument("--pmax-db", type=float)
    p.add_argument("--gamma-a-db", type=float)
    p.add_argument("--gamma-b-db", type=float)
    p.add_argument("--gamma-e-db", type=float)
    p.add_argument("--ubar", type=float)
    p.add_argument("--sigma2-r", type=float)
    p.add_argument("--rsi-var", type=float)
    p.add_argument("--si-residual", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["joint", "relay-only", "both"])
    p.add_argument("--sweep", choices=sorted(DEFAULT_SWEEPS))
    p.add_argument("--sweep-values")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    return p


DEFAULTS = {
    "mt": 3, "mr": 2, "pmax_db": 10.0, "gamma_a_db": -5.0, "gamma_b_db": -5.0,
    "gamma_e_db": -15.0, "ubar": 1.0, "sigma2_r": 1.0, "rsi_var": 0.1,
    "si_residual": 0.4, "trials": 1000, "seed": 0, "mode": "both", "sweep": "pmax",
    "sweep_values": None, "out": "sweep.csv", "workers": 1,
}


def _read_config_file(path, parser):
    actions = {a.dest: a for a in parser._actions}
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = line.partition("=")
            key, raw = key.strip().replace("-", "_"), raw.strip()
            if not sep or key not in DEFAULTS:
                parser.error(f"{path}:{lineno}: unknown setting {key!r}")
            act = actions[key]
            try:
                val = act.type(raw) if act.type else raw
            except ValueError:
                parser.error(f"{path}:{lineno}: bad value for {key}: {raw!r}")
            if act.choices and val not in act.choices:
                parser.error(f"{path}:{lineno}: {key} must be one of {act.choices}")
            values[key] = val
    return values


def parse_config(argv=None):
    """Build an :class:`ExperimentConfig` from flags, an optional file and defaults."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    opts = dict(DEFAULTS)
    if ns.config:
        opts.update(_read_config_file(ns.config, parser))
    opts.update({k: v for k, v in vars(ns).items() if v is not None and k != "config"})

    def flag(k):
        return "--" + k.replace("_", "-")

    if opts["trials"] < 1:
        parser.error(f"{flag('trials')} must be >= 1")
    if opts["workers"] < 1:
        parser.error(f"{flag('workers')} must be >= 1")
    if opts["mr"] < 1:
        parser.error(f"{flag('mr')} must be >= 1")
    if opts["mt"] <= opts["mr"]:
        parser.error(f"{flag('mt')} must exceed --mr")
    if not 0 <= opts["si_residual"] <= 1:
        parser.error(f"{flag('si_residual')} must lie in [0, 1]")
    for k in ("ubar", "sigma2_r", "rsi_var"):
        if opts[k] < 0:
            parser.error(f"{flag(k)} must be nonnegative")
    if not 0 <= opts["seed"] <= MASK64:
        parser.error(f"{flag('seed')} must be a 64-bit unsigned integer")

    if opts["sweep_values"] is None:
        values = DEFAULT_SWEEPS[opts["sweep"]]
    else:
        try:
            values = _float_list(opts["sweep_values"])
        except ValueError:
            parser.error(f"{flag('sweep_values')} must be a comma-separated list of numbers")
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        parser.error(f"{flag('sweep_values')} must be nonempty and strictly increasing")
    if opts["sweep"] == "rsi" and values[0] < 0:
        parser.error(f"{flag('sweep_values')} must be nonnegative for an rsi sweep")

    params = SystemParams(
        M_T=opts["mt"], M_R=opts["mr"], P_max=float(db2lin(opts["pmax_db"])),
        gamma_A=float(db2lin(opts["gamma_a_db"])), gamma_B=float(db2lin(opts["gamma_b_db"])),
        gamma_E=float(db2lin(opts["gamma_e_db"])), U_bar=opts["ubar"],
        sigma2_R=opts["sigma2_r"], rsi_variance=opts["rsi_var"],
        si_residual_factor=opts["si_residual"],
    )
    modes = MODES if opts["mode"] == "both" else (opts["mode"],)
    return ExperimentConfig(params, opts["trials"], opts["seed"], opts["sweep"], tuple(values),
                            modes, opts["out"], opts["workers"])


def main(argv=None):
    cfg = parse_config(argv)
    try:
        rows = run_sweep(cfg, progress=lambda i, n: print(f"[{i}/{n}]", file=sys.stderr))
    except OSError as exc:
        print(f"error: cannot write {cfg.output_path}: {exc}", file=sys.stderr)
        return 2
    for row in rows:
        print(row.csv_line())
    return 0


if __name__ == "__main__":
    sys.exit(main())
