"""Scalar stages of the alternating design: power-splitting ratio and source powers."""

from dataclasses import dataclass

import numpy as np

from .system import DesignPoint, quadratic_terms, sinr_and_power, slacks_from_values

RHO_EPS = 1e-6
POWER_GRID = 1000
FEAS_RTOL = 1e-12


@dataclass
class RhoResult:
    rho: float
    feasible: bool
    active_bound: str
    feasible_interval: tuple


@dataclass
class PowerResult:
    P_A: float
    P_B: float
    feasible: bool
    case_used: str
    pb_min: float
    pb_max: float
    objective: float


def _terms(ch, W, Q):
    return quadratic_terms(DesignPoint(W, Q, 0.5, 1.0, 1.0), ch)


def _feasible(g, ch, params, rho, P_A, P_B, rtol=FEAS_RTOL):
    gA, gB, gE, _, U = sinr_and_power(g, ch, params, rho, P_A, P_B)
    sl = slacks_from_values(gA, gB, gE, U, params)
    ok = True
    for v in sl.values():
        ok = ok & (np.asarray(v) >= -rtol)
    return ok


def optimize_rho(ch, params, W, Q, P_A, P_B):
    """Smallest feasible power-splitting ratio for fixed ``W, Q, P_A, P_B``.

    The total power is nondecreasing in ``rho``, so the optimum is the lower
    end of the feasible interval. Each SINR floor gives ``rho >= c / a``,
    the eavesdropper cap an upper bound when its leakage bracket is
    positive, and the harvesting target ``(1 - rho)(S + rho T) >= U_bar /
    beta`` an interval from a concave quadratic.
    """
    g = _terms(ch, W, Q)
    s2 = params.sigma2_R
    lower = {"floor": RHO_EPS}
    upper = {"floor": 1.0 - RHO_EPS}

    for tag, P_sig, P_self, h_self, gam, key in (
        ("A-SINR", P_B, P_A, ch.h_AA, params.gamma_A, "A"),
        ("B-SINR", P_A, P_B, ch.h_BB, params.gamma_B, "B"),
    ):
        other = "B" if key == "A" else "A"
        a = P_sig * g[f"{key}_from_{other}"] / gam - s2 * g[f"{key}_noise"]
        c = P_self * abs(h_self) ** 2 + g[f"{key}_an"] + 1.0
        if a <= 0:
            return RhoResult(np.nan, False, tag, (np.nan, np.nan))
        lower[tag] = c / a

    leak = P_A * g["E_from_A"] + P_B * g["E_from_B"] - params.gamma_E * s2 * g["E_noise"]
    if leak > 0:
        upper["eaves"] = params.gamma_E * (g["E_an"] + 1.0) / leak

    if params.U_bar > 0:
        S = (np.linalg.norm(ch.h_AR) ** 2 * P_A + np.linalg.norm(ch.h_BR) ** 2 * P_B
             + s2 * params.M_R + g["trQ"])
        T = P_A * g["WhA"] + P_B * g["WhB"] + s2 * g["trWW"]
        need = params.U_bar / params.beta
        if T > 0:
            # -T r^2 + (T - S) r + (S - need) >= 0
            disc = (S - T) ** 2 + 4.0 * T * (S - need)
            if disc < 0:
                return RhoResult(np.nan, False, "energy", (np.nan, np.nan))
            root = np.sqrt(disc)
            lower["energy"] = (T - S - root) / (2.0 * T)
            upper["energy"] = (T - S + root) / (2.0 * T)
        elif S > 0:
            upper["energy"] = 1.0 - need / S
        else:
            return RhoResult(np.nan, False, "energy", (np.nan, np.nan))

    lo = max(lower.values())
    active = max((k for k in lower if k != "floor"), key=lower.get)
    hi = min(upper.values())
    if lo > hi:
        return RhoResult(np.nan, False, active, (lo, hi))
    return RhoResult(float(lo), True, active, (float(lo), float(hi)))


def pb_bounds(ch, params, W, Q, rho, P_A_fixed):
    """Closed-form range of ``P_B`` from the two source SINR floors with ``P_A`` fixed.

    ``pb_min`` makes the SINR at A exactly meet its target (``inf`` when the
    effective A link is zero); ``pb_max`` does the same for B, whose SINR
    falls with ``P_B`` through the loopback at B.
    """
    g = _terms(ch, W, Q)
    s2 = params.sigma2_R
    P_A = P_A_fixed
    sig_a = rho * g["A_from_B"]
    if sig_a == 0:
        pb_min = np.inf
    else:
        pb_min = params.gamma_A * (rho * s2 * g["A_noise"] + P_A * abs(ch.h_AA) ** 2
                                   + g["A_an"] + 1.0) / sig_a
    bracket = rho * P_A * g["B_from_A"] - params.gamma_B * (rho * s2 * g["B_noise"] + g["B_an"] + 1.0)
    loop = abs(ch.h_BB) ** 2
    if bracket < 0:
        pb_max = 0.0
    elif loop == 0:
        pb_max = np.inf
    else:
        pb_max = bracket / (params.gamma_B * loop)
    return float(pb_min), float(pb_max)


def _search_case(ch, params, W, Q, rho):
    """Case ``P_A = P_max``: smallest feasible ``P_B`` on a grid, refined by bisection."""
    g = _terms(ch, W, Q)
    P_A = params.P_max
    pb_min, pb_max = pb_bounds(ch, params, W, Q, rho, P_A)
    lo = max(pb_min, 1e-9 * params.P_max)
    hi = min(pb_max, params.P_max)
    fail = PowerResult(np.nan, np.nan, False, "A-at-max", pb_min, pb_max, np.inf)
    if not lo <= hi:
        return fail
    grid = np.linspace(lo, hi, POWER_GRID)
    ok = _feasible(g, ch, params, rho, P_A, grid)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return fail
    k = hits[0]
    P_B = grid[k]
    if k > 0:
        a, b = grid[k - 1], grid[k]
        for _ in range(60):
            mid = 0.5 * (a + b)
            if _feasible(g, ch, params, rho, P_A, mid):
                b = mid
            else:
                a = mid
        P_B = b
    P_R = sinr_and_power(g, ch, params, rho, P_A, P_B)[3]
    return PowerResult(float(P_A), float(P_B), True, "A-at-max", pb_min, pb_max,
                       float(P_A + P_B + P_R))


def optimize_power(ch, params, W, Q, rho):
    """Source powers for fixed ``W, Q, rho`` with one source at ``P_max``.

    Both cases are searched; case B-at-max reuses the A-at-max search on the
    label-swapped network. Ties go to A-at-max.
    """
    first = _search_case(ch, params, W, Q, rho)
    sw = _search_case(ch.swapped(), params.swapped(), W, Q, rho)
    second = PowerResult(sw.P_B, sw.P_A, sw.feasible, "B-at-max", sw.pb_min, sw.pb_max, sw.objective)
    if not first.feasible and not second.feasible:
        return PowerResult(np.nan, np.nan, False, "none", first.pb_min, first.pb_max, np.inf)
    if second.feasible and (not first.feasible or second.objective < first.objective * (1 - 1e-12)):
        return second
    return first
