"""Alternating minimization of total transmit power over (W, Q), rho and (P_A, P_B)."""

from dataclasses import dataclass, field

import numpy as np

from .relay import solve_relay_stage
from .scalar import optimize_power, optimize_rho
from .system import DesignPoint, evaluate_performance, total_power

INIT_RHO = 0.5


@dataclass
class StageRecord:
    stage: str
    objective: float
    feasible: bool


@dataclass
class SolveTrace:
    iterations: list = field(default_factory=list)
    converged: bool = False
    final: DesignPoint = None
    final_report: object = None
    feasible: bool = False
    outer_iterations: int = 0

    @property
    def objectives(self):
        return [r.objective for r in self.iterations if r.feasible]


def _objective(design, ch, params):
    return float(total_power(design, evaluate_performance(design, ch, params)))


def _finish(trace, design, ch, params):
    trace.final = design
    trace.final_report = evaluate_performance(design, ch, params)
    trace.feasible = True
    return trace


def optimize_joint(ch, params, max_outer=30, obj_tol=1e-4, seed=0):
    """Run relay, rho and power stages in turn until the objective settles.

    A stage whose result would raise the objective (possible only through
    numerical noise, or when the power stage's one-source-at-max structure
    does not contain the incumbent) is not adopted; the incumbent is kept
    and recorded instead, so the recorded sequence never increases.
    """
    trace = SolveTrace()
    rho, P_A, P_B = INIT_RHO, params.P_max, params.P_max
    W = Q = None
    best = None
    prev = None

    for it in range(max_outer):
        trace.outer_iterations = it + 1
        rs = solve_relay_stage(ch, params, rho, P_A, P_B, seed=seed + it)
        if not rs.feasible:
            trace.iterations.append(StageRecord("relay", np.inf, False))
            if best is None:
                return trace
            return _finish(trace, best, ch, params)
        cand = DesignPoint(rs.W, rs.Q, rho, P_A, P_B)
        obj = _objective(cand, ch, params)
        if best is None or obj <= prev:
            W, Q, best, cur = rs.W, rs.Q, cand, obj
        else:
            cur = prev
        trace.iterations.append(StageRecord("relay", cur, True))

        rr = optimize_rho(ch, params, W, Q, P_A, P_B)
        if rr.feasible:
            cand = DesignPoint(W, Q, rr.rho, P_A, P_B)
            obj = _objective(cand, ch, params)
            if obj <= cur:
                rho, best, cur = rr.rho, cand, obj
        trace.iterations.append(StageRecord("rho", cur, rr.feasible))
        if not rr.feasible and it == 0:
            return trace

        pw = optimize_power(ch, params, W, Q, rho)
        if pw.feasible:
            cand = DesignPoint(W, Q, rho, pw.P_A, pw.P_B)
            obj = _objective(cand, ch, params)
            if obj <= cur:
                P_A, P_B, best, cur = pw.P_A, pw.P_B, cand, obj
        trace.iterations.append(StageRecord("power", cur, pw.feasible))
        if not pw.feasible and it == 0:
            return trace

        if prev is not None and abs(prev - cur) <= obj_tol * abs(cur):
            trace.converged = True
            break
        prev = cur

    return _finish(trace, best, ch, params)


def optimize_relay_only(ch, params, seed=0):
    """Baseline: sources at full power, rho fixed at 0.5, one relay stage."""
    trace = SolveTrace(outer_iterations=1)
    rs = solve_relay_stage(ch, params, INIT_RHO, params.P_max, params.P_max, seed=seed)
    if not rs.feasible:
        trace.iterations.append(StageRecord("relay", np.inf, False))
        return trace
    design = DesignPoint(rs.W, rs.Q, INIT_RHO, params.P_max, params.P_max)
    trace.iterations.append(StageRecord("relay", _objective(design, ch, params), True))
    trace.converged = True
    return _finish(trace, design, ch, params)
