"""Physical-layer model of the full-duplex two-way SWIPT relay link.

All powers are linear and normalized to the unit noise variance at the
sources and the eavesdropper; dB values are converted only at the
configuration boundary.
"""

from dataclasses import dataclass, replace

import numpy as np


def db2lin(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def lin2db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class SystemParams:
    """Static configuration of one network.

    ``rsi_variance`` is the variance of the residual loopback channels and
    ``si_residual_factor`` the fraction of it left at the single-antenna
    sources after cancellation.
    """

    M_T: int = 3
    M_R: int = 2
    P_max: float = 10.0
    gamma_A: float = 10 ** -0.5
    gamma_B: float = 10 ** -0.5
    gamma_E: float = 10 ** -1.5
    U_bar: float = 1.0
    sigma2_R: float = 1.0
    beta: float = 1.0
    si_residual_factor: float = 0.4
    rsi_variance: float = 0.1

    def __post_init__(self):
        if not (isinstance(self.M_R, (int, np.integer)) and isinstance(self.M_T, (int, np.integer))):
            raise ValueError("antenna counts must be integers")
        if self.M_R < 1 or self.M_T <= self.M_R:
            raise ValueError("need M_T > M_R >= 1")
        if self.P_max <= 0:
            raise ValueError("P_max must be positive")
        if min(self.gamma_A, self.gamma_B, self.gamma_E) <= 0:
            raise ValueError("SINR targets must be positive")
        if self.U_bar < 0:
            raise ValueError("U_bar must be nonnegative")
        if self.sigma2_R < 0 or self.rsi_variance < 0:
            raise ValueError("variances must be nonnegative")
        if not 0 < self.beta:
            raise ValueError("beta must be positive")
        if not 0 <= self.si_residual_factor <= 1:
            raise ValueError("si_residual_factor must lie in [0, 1]")

    def swapped(self):
        """Same network with the roles of sources A and B exchanged."""
        return replace(self, gamma_A=self.gamma_B, gamma_B=self.gamma_A)


@dataclass(frozen=True)
class ChannelRealization:
    h_AR: np.ndarray
    h_BR: np.ndarray
    h_RA: np.ndarray
    h_RB: np.ndarray
    h_RE: np.ndarray
    H_RR: np.ndarray
    h_AA: complex
    h_BB: complex

    def swapped(self):
        return ChannelRealization(self.h_BR, self.h_AR, self.h_RB, self.h_RA,
                                  self.h_RE, self.H_RR, self.h_BB, self.h_AA)


@dataclass(frozen=True)
class DesignPoint:
    W: np.ndarray
    Q: np.ndarray
    rho: float
    P_A: float
    P_B: float

    def swapped(self):
        return DesignPoint(self.W, self.Q, self.rho, self.P_B, self.P_A)


@dataclass(frozen=True)
class PerfReport:
    Gamma_A: float
    Gamma_B: float
    Gamma_E: float
    R_A: float
    R_B: float
    R_E: float
    R_sec: float
    P_R: float
    U: float
    zf_residual: float

    @property
    def rates(self):
        return self.R_A, self.R_B, self.R_E


def _cn(rng, size, var):
    return np.sqrt(var / 2.0) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def draw_channels(params, seed):
    """Draw one Rayleigh realization of every link.

    Information channels are CN(0, 1); ``H_RR`` entries have variance
    ``rsi_variance`` and the source loopbacks ``si_residual_factor *
    rsi_variance``. The draw order is fixed, so a seed fully determines
    the realization.
    """
    rng = np.random.default_rng(seed)
    mt, mr = params.M_T, params.M_R
    h_AR = _cn(rng, mr, 1.0)
    h_BR = _cn(rng, mr, 1.0)
    h_RA = _cn(rng, mt, 1.0)
    h_RB = _cn(rng, mt, 1.0)
    h_RE = _cn(rng, mt, 1.0)
    H_RR = _cn(rng, (mr, mt), params.rsi_variance)
    src_var = params.si_residual_factor * params.rsi_variance
    h_AA, h_BB = _cn(rng, 2, src_var)
    return ChannelRealization(h_AR, h_BR, h_RA, h_RB, h_RE, H_RR, complex(h_AA), complex(h_BB))


def quadratic_terms(design, ch, params=None):
    """Scalar building blocks shared by the SINR, power and energy formulas.

    Only ``W`` and ``Q`` of ``design`` are used.
    """
    W, Q = design.W, design.Q
    g = {}
    for tag, h in (("A", ch.h_RA), ("B", ch.h_RB), ("E", ch.h_RE)):
        row = h.conj() @ W
        g[f"{tag}_from_A"] = abs(row @ ch.h_AR) ** 2
        g[f"{tag}_from_B"] = abs(row @ ch.h_BR) ** 2
        g[f"{tag}_noise"] = float(np.real(np.vdot(row, row)))
        g[f"{tag}_an"] = float(np.real(h.conj() @ Q @ h))
    g["WhA"] = float(np.linalg.norm(W @ ch.h_AR) ** 2)
    g["WhB"] = float(np.linalg.norm(W @ ch.h_BR) ** 2)
    g["trWW"] = float(np.real(np.vdot(W, W)))
    g["trQ"] = float(np.real(np.trace(Q)))
    return g


def sinr_and_power(g, ch, params, rho, P_A, P_B):
    """Evaluate SINRs, relay power and harvested power from quadratic terms.

    ``rho``, ``P_A`` and ``P_B`` may be arrays; results broadcast.
    """
    s2 = params.sigma2_R
    gA = rho * P_B * g["A_from_B"] / (rho * s2 * g["A_noise"] + P_A * abs(ch.h_AA) ** 2 + g["A_an"] + 1.0)
    gB = rho * P_A * g["B_from_A"] / (rho * s2 * g["B_noise"] + P_B * abs(ch.h_BB) ** 2 + g["B_an"] + 1.0)
    gE = rho * (P_A * g["E_from_A"] + P_B * g["E_from_B"]) / (rho * s2 * g["E_noise"] + g["E_an"] + 1.0)
    P_R = rho * (P_A * g["WhA"] + P_B * g["WhB"] + s2 * g["trWW"]) + g["trQ"]
    incoming = (np.linalg.norm(ch.h_AR) ** 2 * P_A + np.linalg.norm(ch.h_BR) ** 2 * P_B
                + P_R + s2 * params.M_R)
    U = params.beta * (1.0 - rho) * incoming
    return gA, gB, gE, P_R, U


def relay_power(design, ch, params):
    g = quadratic_terms(design, ch, params)
    return float(sinr_and_power(g, ch, params, design.rho, design.P_A, design.P_B)[3])


def evaluate_performance(design, ch, params):
    """SINRs, rates, secrecy sum-rate, relay power and harvested power."""
    g = quadratic_terms(design, ch, params)
    gA, gB, gE, P_R, U = sinr_and_power(g, ch, params, design.rho, design.P_A, design.P_B)
    rA, rB, rE = np.log2(1.0 + gA), np.log2(1.0 + gB), np.log2(1.0 + gE)
    zf = float(np.linalg.norm(ch.H_RR @ design.W))
    return PerfReport(float(gA), float(gB), float(gE), float(rA), float(rB), float(rE),
                      float(max(rA + rB - rE, 0.0)), float(P_R), float(U), zf)


def total_power(design, report):
    return design.P_A + design.P_B + report.P_R


def slacks_from_values(gA, gB, gE, U, params):
    slack_u = np.inf if params.U_bar == 0 else U / params.U_bar - 1.0
    return {
        "A": gA / params.gamma_A - 1.0,
        "B": gB / params.gamma_B - 1.0,
        "E": 1.0 - gE / params.gamma_E,
        "U": slack_u,
    }


def constraint_slacks(report, params):
    """Relative slack of each QoS constraint (negative means violated).

    Keys are ``A``, ``B`` (SINR floors), ``E`` (eavesdropper cap) and
    ``U`` (harvesting target; ``inf`` when the target is zero).
    """
    return slacks_from_values(report.Gamma_A, report.Gamma_B, report.Gamma_E, report.U, params)


def satisfies_constraints(report, params, rtol=1e-6):
    return all(v >= -rtol for v in constraint_slacks(report, params).values())
