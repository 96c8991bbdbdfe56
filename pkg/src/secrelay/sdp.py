"""Small dense semidefinite programs over Hermitian PSD blocks.

Problems have the form::

    minimize    sum_k  tr(C_k X_k)
    subject to  sum_k  tr(A_ik X_k)  (<=, ==, >=)  b_i
                X_k  PSD

Complex blocks are mapped to real symmetric blocks of twice the size,
inequalities get a nonnegative slack each, and the resulting standard-form
problem is solved with an infeasible-start primal-dual path-following
method (Nesterov-Todd scaling, Mehrotra predictor-corrector).
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import hermitian_to_real, real_to_hermitian

SENSES = ("<=", "==", ">=")

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
MAX_ITERATIONS = "max-iterations"
_DEBUG = False


@dataclass
class Constraint:
    coeffs: list
    sense: str
    rhs: float


@dataclass
class SdpProblem:
    """Block-structured SDP instance.

    A block is real when every coefficient matrix given for it has a real
    dtype, otherwise it is treated as complex Hermitian.
    """

    blocks: list
    objective: list
    constraints: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.blocks) == 0:
            raise ValueError("SDP needs at least one block")
        self.blocks = [int(n) for n in self.blocks]
        if any(n < 1 for n in self.blocks):
            raise ValueError("block dimensions must be positive")
        self.objective = [self._check(C, n) for C, n in zip(self.objective, self.blocks)]
        if len(self.objective) != len(self.blocks):
            raise ValueError("one objective matrix per block is required")
        checked = []
        for con in self.constraints:
            if con.sense not in SENSES:
                raise ValueError(f"unknown constraint sense {con.sense!r}")
            if len(con.coeffs) != len(self.blocks):
                raise ValueError("one coefficient matrix per block is required")
            coeffs = [self._check(A, n) for A, n in zip(con.coeffs, self.blocks)]
            checked.append(Constraint(coeffs, con.sense, float(con.rhs)))
        self.constraints = checked

    @staticmethod
    def _check(A, n):
        A = np.asarray(A)
        if A.ndim == 0:
            A = A.reshape(1, 1)
        if A.shape != (n, n):
            raise ValueError(f"coefficient shape {A.shape} does not match block dimension {n}")
        if not np.all(np.isfinite(A)):
            raise ValueError("coefficient matrices must be finite")
        scale = max(1.0, np.abs(A).max(initial=0.0))
        if np.abs(A - A.conj().T).max(initial=0.0) > 1e-10 * scale:
            raise ValueError("coefficient matrices must be Hermitian")
        if np.isrealobj(A):
            return 0.5 * (A + A.T).astype(float)
        return 0.5 * (A + A.conj().T)

    @property
    def is_complex(self):
        """Per-block flag: True for Hermitian (complex) blocks."""
        flags = []
        for k in range(len(self.blocks)):
            mats = [self.objective[k]] + [c.coeffs[k] for c in self.constraints]
            flags.append(any(np.iscomplexobj(M) for M in mats))
        return flags

    def real_embedding(self):
        """Equivalent problem with every complex block embedded as a real one."""
        flags = self.is_complex

        def emb(A, cplx):
            return 0.5 * hermitian_to_real(A) if cplx else A

        blocks = [2 * n if c else n for n, c in zip(self.blocks, flags)]
        objective = [emb(C, c) for C, c in zip(self.objective, flags)]
        constraints = [
            Constraint([emb(A, c) for A, c in zip(con.coeffs, flags)], con.sense, con.rhs)
            for con in self.constraints
        ]
        return SdpProblem(blocks, objective, constraints)

    def to_text(self):
        """Plain-text dump: dims, objective matrices, then constraints."""
        lines = ["blocks " + " ".join(str(n) for n in self.blocks)]
        flags = self.is_complex
        lines.append("complex " + " ".join(str(int(f)) for f in flags))
        lines.append("objective")
        for C in self.objective:
            lines.extend(_matrix_lines(C))
        lines.append(f"constraints {len(self.constraints)}")
        for con in self.constraints:
            lines.append(f"constraint {con.sense} {con.rhs!r}")
            for A in con.coeffs:
                lines.extend(_matrix_lines(A))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = iter(text.splitlines())
        dims = [int(t) for t in next(rows).split()[1:]]
        flags = [bool(int(t)) for t in next(rows).split()[1:]]
        assert next(rows).strip() == "objective"

        def read(n, cplx):
            M = np.array([[complex(t) for t in next(rows).split()] for _ in range(n)])
            return M if cplx else M.real.copy()

        objective = [read(n, c) for n, c in zip(dims, flags)]
        count = int(next(rows).split()[1])
        constraints = []
        for _ in range(count):
            _, sense, rhs = next(rows).split()
            coeffs = [read(n, c) for n, c in zip(dims, flags)]
            constraints.append(Constraint(coeffs, sense, float(rhs)))
        return cls(dims, objective, constraints)


def _matrix_lines(A):
    if np.iscomplexobj(A):
        return [" ".join(repr(complex(v)) for v in row) for row in A]
    return [" ".join(repr(float(v)) for v in row) for row in A]


@dataclass
class SdpSolution:
    status: str
    block_values: list
    objective_value: float
    iterations: int
    max_constraint_violation: float
    min_block_eigenvalue: float
    dual: np.ndarray = None


@dataclass
class Certificate:
    feasible: bool
    max_violation: float
    min_eigenvalue: float


def certify_solution(problem, solution, rtol=1e-6, eig_floor=-1e-7):
    """Recompute constraint residuals and PSD floors from the block values.

    ``max_violation`` is absolute; ``feasible`` allows ``rtol * (1 + |b_i|)``
    per constraint and requires every block eigenvalue above ``eig_floor``.
    """
    X = solution.block_values
    if len(X) != len(problem.blocks):
        raise ValueError("solution block count does not match problem")
    ok = True
    worst = 0.0
    for con in problem.constraints:
        lhs = sum(np.real(np.vdot(A, Xk)) for A, Xk in zip(con.coeffs, X))
        if con.sense == ">=":
            viol = max(0.0, con.rhs - lhs)
        elif con.sense == "<=":
            viol = max(0.0, lhs - con.rhs)
        else:
            viol = abs(lhs - con.rhs)
        worst = max(worst, viol)
        ok = ok and viol <= rtol * (1.0 + abs(con.rhs))
    min_eig = min(float(np.linalg.eigvalsh(0.5 * (Xk + Xk.conj().T))[0]) for Xk in X)
    ok = ok and min_eig >= eig_floor
    return Certificate(bool(ok), float(worst), min_eig)


class _StandardForm:
    """Real standard form ``min <C,X> s.t. A(X) = b, X PSD`` with row scaling."""

    def __init__(self, problem):
        self.problem = problem
        self.flags = problem.is_complex
        real = problem.real_embedding()
        n_slack = sum(1 for c in real.constraints if c.sense != "==")
        self.user_dims = list(real.blocks)
        self.dims = self.user_dims + [1] * n_slack
        m = len(real.constraints)
        self.A = [np.zeros((m, n, n)) for n in self.dims]
        self.C = [np.asarray(C, dtype=float) for C in real.objective] + [
            np.zeros((1, 1)) for _ in range(n_slack)
        ]
        b = np.zeros(m)
        s = len(self.user_dims)
        for i, con in enumerate(real.constraints):
            for k, Ak in enumerate(con.coeffs):
                self.A[k][i] = Ak
            if con.sense == ">=":
                self.A[s][i, 0, 0] = -1.0
                s += 1
            elif con.sense == "<=":
                self.A[s][i, 0, 0] = 1.0
                s += 1
            b[i] = con.rhs
        coef_norm = np.sqrt(sum(np.einsum("ikl,ikl->i", Ak, Ak) for Ak in self.A))
        self.trivial_infeasible = bool(np.any((coef_norm == 0) & (b != 0)))
        keep = coef_norm > 0
        row_norm = np.maximum(coef_norm, np.abs(b))
        self.keep = keep
        self.row_norm = row_norm[keep]
        self.A = [Ak[keep] / self.row_norm[:, None, None] for Ak in self.A]
        b = b[keep] / self.row_norm
        self.bscale = max(1.0, float(np.abs(b).max(initial=0.0)))
        self.cscale = max(1.0, max(float(np.abs(C).max(initial=0.0)) for C in self.C))
        self.b = b / self.bscale
        self.C = [C / self.cscale for C in self.C]

    @property
    def m(self):
        return self.b.size

    def apply(self, Z):
        return sum(np.einsum("ikl,kl->i", Ak, Zk) for Ak, Zk in zip(self.A, Z))

    def adjoint(self, y):
        return [np.einsum("i,ikl->kl", y, Ak) for Ak in self.A]

    def unscale(self, X, y):
        """Map a scaled primal/dual pair back to the user's problem."""
        blocks = []
        for k, cplx in enumerate(self.flags):
            Xk = self.bscale * X[k]
            blocks.append(real_to_hermitian(Xk) if cplx else 0.5 * (Xk + Xk.T))
        y_full = np.zeros(self.keep.size)
        y_full[self.keep] = self.cscale * y / self.row_norm
        return blocks, y_full


def _inner(U, V):
    return sum(float(np.vdot(u, v)) for u, v in zip(U, V))


def _norm(U):
    return np.sqrt(_inner(U, U))


def _sym(Z):
    return 0.5 * (Z + Z.T)


class _NTScaling:
    """Nesterov-Todd scaling ``G`` of one block: ``G^-1 X G^-T = G^T S G = diag(lam)``."""

    def __init__(self, X, S):
        L = np.linalg.cholesky(X)
        R = np.linalg.cholesky(S)
        U, lam, Vt = np.linalg.svd(R.T @ L)
        self.lam = lam
        rs = np.sqrt(lam)
        self.G = (L @ Vt.T) / rs
        self.Ginv = (rs[:, None] * Vt) @ np.linalg.inv(L)

    def to_x(self, dX):
        return self.Ginv @ dX @ self.Ginv.T

    def to_s(self, dS):
        return self.G.T @ dS @ self.G

    def from_x(self, dXt):
        return self.G @ dXt @ self.G.T

    def step(self, dXt):
        """Largest ``a`` with ``diag(lam) + a dXt`` PSD."""
        rs = 1.0 / np.sqrt(self.lam)
        Z = rs[:, None] * dXt * rs[None, :]
        low = np.linalg.eigvalsh(_sym(Z))[0]
        return np.inf if low >= 0 else -1.0 / low


def solve_sdp(problem, tol=1e-7, max_iter=200):
    """Solve an :class:`SdpProblem` with a primal-dual interior-point method.

    Parameters
    ----------
    problem : SdpProblem
    tol : float
        Relative tolerance on primal residual, dual residual and duality gap.
    max_iter : int
        Iteration budget; exhausting it (or stalling) gives status
        ``"max-iterations"`` with the most accurate iterate seen.

    Returns
    -------
    SdpSolution
        ``status`` is one of ``optimal``, ``infeasible``, ``unbounded`` or
        ``max-iterations``. Infeasibility and unboundedness are declared from
        approximate Farkas certificates found along the iterates.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    sf = _StandardForm(problem)
    if sf.trivial_infeasible:
        return _finish(problem, sf, None, None, INFEASIBLE, 0)

    dims = sf.dims
    N = sum(dims)
    m = sf.m
    b, C, A = sf.b, sf.C, sf.A
    bnorm = np.linalg.norm(b)
    cnorm = _norm(C)

    xi = max(10.0, np.sqrt(max(dims)), max(dims) * float(np.max(1.0 + np.abs(b), initial=1.0)) / 2.0)
    eta = max(10.0, np.sqrt(max(dims)), 1.0 + cnorm)
    X = [xi * np.eye(n) for n in dims]
    S = [eta * np.eye(n) for n in dims]
    y = np.zeros(m)
    inf_tol = 1e-9
    status = MAX_ITERATIONS
    it = 0
    best = (np.inf, X, y, S)

    for it in range(1, max_iter + 1):
        AX = sf.apply(X)
        rp = b - AX
        Aty = sf.adjoint(y)
        Rd = [Ck - Ak - Sk for Ck, Ak, Sk in zip(C, Aty, S)]
        pobj = _inner(C, X)
        dobj = float(b @ y)
        mu = _inner(X, S) / N
        pinf = np.linalg.norm(rp) / (1.0 + bnorm)
        dinf = _norm(Rd) / (1.0 + cnorm)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        if _DEBUG:
            print(it, pobj, dobj, pinf, dinf, gap, mu)
        err = max(pinf, dinf, gap)
        if err < best[0]:
            best = (err, X, y, S)
        if err <= tol:
            status = OPTIMAL
            break

        # Farkas-type certificates on the scaled data.
        if dobj > 0:
            lam = max(np.linalg.eigvalsh(Ak)[-1] for Ak in Aty) / dobj
            if lam <= inf_tol:
                status = INFEASIBLE
                break
        if pobj < 0 and np.linalg.norm(AX) / -pobj <= inf_tol:
            status = UNBOUNDED
            break

        try:
            nt = [_NTScaling(Xk, Sk) for Xk, Sk in zip(X, S)]
            At = [np.einsum("kl,ilm,mn->ikn", s.G.T, Ak, s.G) for s, Ak in zip(nt, A)]
            M = sum(np.einsum("ikl,jkl->ij", a, a) for a in At)
            Mf = np.linalg.cholesky(M + 1e-15 * np.trace(M) / max(m, 1) * np.eye(m))
            Rd_t = [s.to_s(Rk) for s, Rk in zip(nt, Rd)]

            def direction(sigma_mu, corr):
                # Scaled complementarity: lam o (dX~ + dS~) = sigma mu I - lam^2 - corr.
                H = []
                for s, n in zip(nt, dims):
                    lam = s.lam
                    rhs = 2.0 * (sigma_mu * np.eye(n) - np.diag(lam ** 2))
                    if corr is not None:
                        rhs = rhs - corr.pop(0)
                    H.append(rhs / (lam[:, None] + lam[None, :]))
                # In scaled space dX~ = H - dS~ with dS~ = Rd~ - A~*(dy).
                base = [Hk - Rk for Hk, Rk in zip(H, Rd_t)]
                r = rp - sum(np.einsum("ikl,kl->i", a, Bk) for a, Bk in zip(At, base))
                dy = np.zeros(m)
                for _ in range(2):
                    dy = dy + np.linalg.solve(Mf.T, np.linalg.solve(Mf, r))
                    dXt = [Bk + np.einsum("i,ikl->kl", dy, a) for Bk, a in zip(base, At)]
                    r = rp - sum(np.einsum("ikl,kl->i", a, d) for a, d in zip(At, dXt))
                dSt = [Hk - d for Hk, d in zip(H, dXt)]
                return [_sym(d) for d in dXt], dy, [_sym(d) for d in dSt]

            dXa, dya, dSa = direction(0.0, None)
            ap = min(1.0, min(s.step(d) for s, d in zip(nt, dXa)))
            ad = min(1.0, min(s.step(d) for s, d in zip(nt, dSa)))
            mu_aff = sum(
                float(np.vdot(np.diag(s.lam) + ap * dx, np.diag(s.lam) + ad * ds))
                for s, dx, ds in zip(nt, dXa, dSa)) / N
            sigma = min(1.0, (mu_aff / mu) ** 3)
            corr = [dx @ ds + ds @ dx for dx, ds in zip(dXa, dSa)]
            dXt, dy, dSt = direction(sigma * mu, corr)
            ap = min(1.0, 0.98 * min(s.step(d) for s, d in zip(nt, dXt)))
            ad = min(1.0, 0.98 * min(s.step(d) for s, d in zip(nt, dSt)))
        except np.linalg.LinAlgError:
            break
        if ap < 1e-10 and ad < 1e-10:
            break
        X = [_sym(Xk + ap * s.from_x(d)) for Xk, s, d in zip(X, nt, dXt)]
        y = y + ad * dy
        S = [_sym(Sk + ad * (s.Ginv.T @ d @ s.Ginv)) for Sk, s, d in zip(S, nt, dSt)]

    if status == MAX_ITERATIONS:
        _, X, y, S = best
    return _finish(problem, sf, X, y, status, it)


def _finish(problem, sf, X, y, status, iterations):
    if X is None:
        blocks = [np.zeros((n, n), dtype=complex if c else float)
                  for n, c in zip(problem.blocks, sf.flags)]
        y_full = np.zeros(len(problem.constraints))
    else:
        blocks, y_full = sf.unscale(X, y)
    obj = sum(float(np.real(np.vdot(Ck, Xk))) for Ck, Xk in zip(problem.objective, blocks))
    sol = SdpSolution(status, blocks, obj, iterations, np.inf, -np.inf, y_full)
    cert = certify_solution(problem, sol)
    sol.max_constraint_violation = cert.max_violation
    sol.min_block_eigenvalue = cert.min_eigenvalue
    return sol
