"""Relay stage: minimum-power beamformer and artificial-noise design.

With the source powers and the power-splitting ratio fixed, the relay
matrix is parameterized as ``W = N_t V`` where ``N_t`` spans the null
space of the loopback channel ``H_RR``, so the zero-forcing condition
holds by construction. Every quadratic term in ``V`` is linear in the
lifted matrix ``X = vec(V) vec(V)^H``; dropping ``rank(X) = 1`` gives an
SDP in ``(X, Q)``. The beamformer is then recovered from the dominant
eigenvector of ``X``, or by Gaussian randomization when ``X`` is not
numerically rank one.
"""

from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .linalg import dominant_rank1, null_space_basis, psd_factor
from .system import DesignPoint, constraint_slacks, evaluate_performance

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
RECOVERED = "recovered-approx"

RANK1_THRESHOLD = 0.999
N_RANDOMIZATIONS = 200
SDP_TOL = 1e-8


@dataclass
class RelayStageResult:
    W: np.ndarray
    Q: np.ndarray
    objective: float
    status: str
    rank1_ratio: float
    constraint_report: dict = field(default_factory=dict)
    sdp_objective: float = np.nan

    @property
    def feasible(self):
        return self.status != INFEASIBLE


def paper_constants(ch, N_t):
    """Diagnostic constants ``C_rA, C_rB, C_rE`` and ``C_Nt``.

    The squared norms use ``N_t^H h`` so the products conform for a
    ``M_T x d`` basis.
    """
    N_t = np.asarray(N_t)
    if N_t.ndim != 2 or N_t.shape[1] < 1:
        raise ValueError("N_t must have at least one column")

    def c(h):
        return float(np.linalg.norm(N_t.conj().T @ h) ** 2)

    return {
        "C_rA": c(ch.h_RA),
        "C_rB": c(ch.h_RB),
        "C_rE": c(ch.h_RE),
        "C_Nt": float(np.real(np.trace(N_t @ N_t.conj().T))),
    }


class LiftedTerms:
    """Coefficient matrices of each quadratic form in ``x = vec(V)``.

    ``vec`` stacks the columns of the ``d x M_R`` matrix ``V``.
    """

    def __init__(self, ch, N_t):
        self.N_t = N_t
        self.d = N_t.shape[1]
        self.M_R = ch.h_AR.size
        self.n = self.d * self.M_R
        a = {k: N_t.conj().T @ h for k, h in (("A", ch.h_RA), ("B", ch.h_RB), ("E", ch.h_RE))}
        src = {"A": ch.h_AR, "B": ch.h_BR}
        eye_d = np.eye(self.d)
        eye_r = np.eye(self.M_R)
        self.cross = {}
        self.noise = {}
        for tag, at in a.items():
            for s, hs in src.items():
                c = np.kron(hs, at.conj())
                self.cross[tag, s] = np.outer(c.conj(), c)
            self.noise[tag] = np.kron(eye_r, np.outer(at, at.conj()))
        self.gain = {s: np.kron(np.outer(hs.conj(), hs), eye_d) for s, hs in src.items()}
        self.identity = np.eye(self.n, dtype=complex)

    def to_W(self, x):
        V = np.reshape(x, (self.d, self.M_R), order="F")
        return self.N_t @ V


def _power_coeffs(lt, params, rho, P_A, P_B):
    X_coef = rho * (P_A * lt.gain["A"] + P_B * lt.gain["B"] + params.sigma2_R * lt.identity)
    return X_coef, np.eye(params.M_T, dtype=complex)


def build_relay_sdp(ch, params, rho, P_A, P_B, N_t=None):
    """Lifted relay-stage SDP over ``X`` (``d*M_R`` square) and ``Q`` (``M_T`` square).

    Constraints, in order: SINR at A, SINR at B, eavesdropper cap,
    harvesting target. All are the original ratio constraints
    cross-multiplied, hence exactly linear in ``(X, Q)``.
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if P_A <= 0 or P_B <= 0:
        raise ValueError("source powers must be positive")
    if N_t is None:
        N_t = null_space_basis(ch.H_RR)
    lt = LiftedTerms(ch, N_t)
    s2 = params.sigma2_R
    hh = {k: np.outer(h, h.conj()) for k, h in (("A", ch.h_RA), ("B", ch.h_RB), ("E", ch.h_RE))}

    obj_X, obj_Q = _power_coeffs(lt, params, rho, P_A, P_B)
    g = params
    con_a = sdp.Constraint(
        [rho * P_B * lt.cross["A", "B"] - g.gamma_A * rho * s2 * lt.noise["A"], -g.gamma_A * hh["A"]],
        ">=", g.gamma_A * (P_A * abs(ch.h_AA) ** 2 + 1.0))
    con_b = sdp.Constraint(
        [rho * P_A * lt.cross["B", "A"] - g.gamma_B * rho * s2 * lt.noise["B"], -g.gamma_B * hh["B"]],
        ">=", g.gamma_B * (P_B * abs(ch.h_BB) ** 2 + 1.0))
    con_e = sdp.Constraint(
        [rho * (P_A * lt.cross["E", "A"] + P_B * lt.cross["E", "B"]) - g.gamma_E * rho * s2 * lt.noise["E"],
         -g.gamma_E * hh["E"]],
        "<=", g.gamma_E)
    incoming = (np.linalg.norm(ch.h_AR) ** 2 * P_A + np.linalg.norm(ch.h_BR) ** 2 * P_B
                + s2 * params.M_R)
    con_u = sdp.Constraint([obj_X, obj_Q], ">=",
                           params.U_bar / (params.beta * (1.0 - rho)) - incoming)
    return sdp.SdpProblem([lt.n, params.M_T], [obj_X, obj_Q], [con_a, con_b, con_e, con_u])


def _sinr_scale(lt_W, Q, ch, params, rho, P_A, P_B):
    """Smallest ``t`` with both source SINR floors met by ``t * W`` (None if impossible)."""
    s2 = params.sigma2_R
    t2 = 0.0
    for h, hs, P_sig, P_self, h_self, gam in (
        (ch.h_RA, ch.h_BR, P_B, P_A, ch.h_AA, params.gamma_A),
        (ch.h_RB, ch.h_AR, P_A, P_B, ch.h_BB, params.gamma_B),
    ):
        row = h.conj() @ lt_W
        sig = rho * P_sig * abs(row @ hs) ** 2
        noise = rho * s2 * float(np.real(np.vdot(row, row)))
        rest = P_self * abs(h_self) ** 2 + float(np.real(h.conj() @ Q @ h)) + 1.0
        denom = sig - gam * noise
        if denom <= 0:
            return None
        t2 = max(t2, gam * rest / denom)
    return np.sqrt(t2) * (1.0 + 1e-10)


def _legit_null_projector(ch, M_T):
    """Projector onto the complement of span{h_RA, h_RB} (None if trivial)."""
    Hs = np.column_stack([ch.h_RA, ch.h_RB])
    u, s, _ = np.linalg.svd(Hs, full_matrices=True)
    r = int(np.count_nonzero(s > 1e-12 * s[0])) if s.size else 0
    if r >= M_T:
        return None
    U = u[:, r:]
    return U @ U.conj().T


def repair_design(W, Q, ch, params, rho, P_A, P_B):
    """Rescale ``W`` to meet the SINR floors and top up power for harvesting.

    Residual eavesdropper excess and harvesting deficits are covered with
    artificial noise orthogonal to both legitimate downlink channels (it
    leaves their SINRs unchanged and only hurts the eavesdropper); without
    such a direction a harvesting deficit is met by scaling ``W`` up.
    Returns ``(W, Q)`` or ``None``.
    """
    t = _sinr_scale(W, Q, ch, params, rho, P_A, P_B)
    if t is None:
        return None
    W = t * W
    proj = _legit_null_projector(ch, params.M_T)
    if proj is not None:
        # Residual eavesdropper excess: add noise it sees but A and B do not.
        u = proj @ ch.h_RE
        gain = float(np.real(np.vdot(u, u)))
        row = ch.h_RE.conj() @ W
        leak = rho * (P_A * abs(row @ ch.h_AR) ** 2 + P_B * abs(row @ ch.h_BR) ** 2)
        need = leak / params.gamma_E - rho * params.sigma2_R * float(np.real(np.vdot(row, row))) - 1.0
        have = float(np.real(ch.h_RE.conj() @ Q @ ch.h_RE))
        if need > have and gain > 0:
            alpha = (need - have) * (1.0 + 1e-10) / gain ** 2
            Q = Q + alpha * np.outer(u, u.conj())
    if params.U_bar > 0:
        d = DesignPoint(W, Q, rho, P_A, P_B)
        rep = evaluate_performance(d, ch, params)
        target = params.U_bar / (params.beta * (1.0 - rho))
        incoming = rep.U / (params.beta * (1.0 - rho))
        deficit = target - incoming
        if deficit > 0:
            deficit *= 1.0 + 1e-10
            if proj is not None:
                Q = Q + deficit * proj / np.real(np.trace(proj))
            else:
                amp = rep.P_R - float(np.real(np.trace(Q)))
                if amp <= 0:
                    return None
                W = W * np.sqrt((amp + deficit) / amp)
    return W, Q


def _clip_psd(Q):
    w, v = np.linalg.eigh(0.5 * (Q + Q.conj().T))
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


def _check(W, Q, ch, params, rho, P_A, P_B, rtol=1e-9):
    d = DesignPoint(W, Q, rho, P_A, P_B)
    rep = evaluate_performance(d, ch, params)
    slacks = constraint_slacks(rep, params)
    ok = all(v >= -rtol for v in slacks.values())
    wn = np.linalg.norm(W)
    ok = ok and rep.zf_residual <= 1e-8 * max(wn, np.finfo(float).tiny)
    return ok, rep, slacks


def solve_relay_stage(ch, params, rho, P_A, P_B, seed=0, tol=SDP_TOL):
    """Minimum relay-power ``(W, Q)`` for fixed ``rho, P_A, P_B``.

    The returned design is re-checked against the original SINR,
    eavesdropper and harvesting constraints and the zero-forcing residual;
    ``constraint_report`` holds the relative slacks.
    """
    N_t = null_space_basis(ch.H_RR)
    problem = build_relay_sdp(ch, params, rho, P_A, P_B, N_t)
    sol = sdp.solve_sdp(problem, tol=tol)
    lt = LiftedTerms(ch, N_t)
    empty = RelayStageResult(np.zeros((params.M_T, params.M_R), complex),
                             np.zeros((params.M_T, params.M_T), complex),
                             np.inf, INFEASIBLE, np.nan)
    if sol.status in (sdp.INFEASIBLE, sdp.UNBOUNDED):
        return empty
    if sol.status != sdp.OPTIMAL and not sdp.certify_solution(problem, sol).feasible:
        return empty

    X, Q = sol.block_values
    Q = _clip_psd(Q)
    X = _clip_psd(X)
    lam1, v1, ratio = dominant_rank1(X)
    empty.rank1_ratio = ratio
    empty.sdp_objective = sol.objective_value

    if ratio >= RANK1_THRESHOLD:
        W = lt.to_W(np.sqrt(lam1) * v1)
        fixed = repair_design(W, Q, ch, params, rho, P_A, P_B)
        if fixed is not None:
            ok, rep, slacks = _check(*fixed, ch, params, rho, P_A, P_B)
            if ok:
                return RelayStageResult(fixed[0], fixed[1], rep.P_R, OPTIMAL, ratio,
                                        slacks, sol.objective_value)

    rng = np.random.default_rng(seed)
    L = psd_factor(X)
    best = None
    for _ in range(N_RANDOMIZATIONS):
        xi = (rng.standard_normal(L.shape[1]) + 1j * rng.standard_normal(L.shape[1])) / np.sqrt(2)
        W = lt.to_W(L @ xi)
        fixed = repair_design(W, Q, ch, params, rho, P_A, P_B)
        if fixed is None:
            continue
        ok, rep, slacks = _check(*fixed, ch, params, rho, P_A, P_B)
        if ok and (best is None or rep.P_R < best.objective):
            best = RelayStageResult(fixed[0], fixed[1], rep.P_R, RECOVERED, ratio,
                                    slacks, sol.objective_value)
    return best if best is not None else empty
