import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from oracles import sdp2x2_grid_oracle
from secrelay import sdp
from secrelay.sdp import Constraint, SdpProblem, SdpSolution, certify_solution, solve_sdp


def two_by_two_example():
    e12 = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
    f12 = np.array([[0, -0.5j], [0.5j, 0]])
    e22 = np.diag([0.0, 1.0]).astype(complex)
    return SdpProblem(
        [2],
        [np.diag([1.0, 0.0]).astype(complex)],
        [Constraint([e12], "==", 1.0), Constraint([f12], "==", 0.0), Constraint([e22], "==", 4.0)],
    )


def random_2x2(seed):
    rng = np.random.default_rng(seed)
    G = crandn(rng, 2, 2)
    C = G @ G.conj().T + 0.5 * np.eye(2)
    cons = []
    for _ in range(2):
        a = crandn(rng, 2)
        cons.append(Constraint([np.outer(a, a.conj()) + 0.2 * np.eye(2)], ">=", rng.uniform(0.3, 1.0)))
    H = crandn(rng, 2, 2)
    cons.append(Constraint([H + H.conj().T], "<=", rng.uniform(0.5, 1.5)))
    return SdpProblem([2], [C], cons)


def test_scalar_linear_program():
    p = SdpProblem([1], [np.array([[3.0]])], [Constraint([np.array([[1.0]])], ">=", 2.0)])
    sol = solve_sdp(p)
    assert sol.status == sdp.OPTIMAL
    assert abs(sol.block_values[0][0, 0] - 2) < 1e-6
    assert abs(sol.objective_value - 6) < 1e-6


def test_two_by_two_determinant_example():
    sol = solve_sdp(two_by_two_example())
    assert sol.status == sdp.OPTIMAL
    X = sol.block_values[0]
    assert abs(X[0, 0].real - 0.25) < 1e-6
    assert sol.max_constraint_violation <= 1e-6 * 5
    assert sol.min_block_eigenvalue >= -1e-7


def test_infeasible_detected():
    one = np.array([[1.0]])
    p = SdpProblem([1], [one], [Constraint([one], "<=", -1.0)])
    assert solve_sdp(p).status == sdp.INFEASIBLE


def test_unbounded_detected():
    p = SdpProblem([2], [np.diag([-1.0, 0.0])], [Constraint([np.diag([0.0, 1.0])], "==", 1.0)])
    assert solve_sdp(p).status == sdp.UNBOUNDED


def test_empty_constraint_list_minimizes_over_cone():
    sol = solve_sdp(SdpProblem([2], [np.eye(2)], []))
    assert sol.status == sdp.OPTIMAL
    assert abs(sol.objective_value) < 1e-6


FEASIBLE_SEEDS = [0, 1, 2, 4, 5, 6, 7, 8]


@pytest.mark.parametrize("seed", FEASIBLE_SEEDS)
def test_random_2x2_against_grid(seed):
    p = random_2x2(seed)
    sol = solve_sdp(p)
    assert sol.status == sdp.OPTIMAL
    cons = [(c.coeffs[0], c.sense, c.rhs) for c in p.constraints]
    ref, params = sdp2x2_grid_oracle(p.objective[0], cons, box=2.0, step=0.01)
    assert params is not None and max(abs(v) for v in params) < 1.9
    assert abs(sol.objective_value - ref) <= 1e-2
    # the grid samples feasible points, so it can never beat the optimum
    assert sol.objective_value <= ref + 1e-7


def test_random_2x2_infeasible_instance():
    # the <= cap cannot coexist with the two floors for this draw
    assert solve_sdp(random_2x2(3)).status == sdp.INFEASIBLE


@pytest.mark.parametrize("seed", FEASIBLE_SEEDS[:5])
def test_adding_constraint_never_lowers_objective(seed):
    p = random_2x2(seed)
    base = solve_sdp(p).objective_value
    rng = np.random.default_rng(100 + seed)
    a = crandn(rng, 2)
    extra = Constraint([np.outer(a, a.conj())], ">=", 1.0)
    tighter = solve_sdp(SdpProblem(p.blocks, p.objective, p.constraints + [extra]))
    assert tighter.objective_value >= base - 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_real_embedding_gives_same_objective(seed):
    rng = np.random.default_rng(seed)
    n = 3
    G = crandn(rng, n, n)
    C = G @ G.conj().T + 0.1 * np.eye(n)
    cons = []
    for _ in range(3):
        a = crandn(rng, n)
        cons.append(Constraint([np.outer(a, a.conj())], ">=", 1.0))
    p = SdpProblem([n], [C], cons)
    a = solve_sdp(p)
    b = solve_sdp(p.real_embedding())
    assert a.status == b.status == sdp.OPTIMAL
    assert abs(a.objective_value - b.objective_value) <= 1e-6 * (1 + abs(a.objective_value))


def test_deterministic():
    p = random_2x2(3)
    a, b = solve_sdp(p), solve_sdp(p)
    assert a.status == b.status
    assert a.objective_value == b.objective_value
    assert np.array_equal(a.block_values[0], b.block_values[0])


def test_certify_flags_negative_eigenvalue():
    p = two_by_two_example()
    bad = SdpSolution("optimal", [np.diag([0.25, -0.5]).astype(complex)], 0.25, 0, 0.0, -0.5)
    cert = certify_solution(p, bad)
    assert not cert.feasible
    assert cert.min_eigenvalue == pytest.approx(-0.5)


def test_certify_exact_solution():
    X = np.array([[0.25, 1.0], [1.0, 4.0]], dtype=complex)
    cert = certify_solution(two_by_two_example(), SdpSolution("optimal", [X], 0.25, 0, 0, 0))
    assert cert.feasible
    assert cert.max_violation <= 1e-8


def test_certify_detects_perturbation():
    p = two_by_two_example()
    sol = solve_sdp(p)
    X = sol.block_values[0].copy()
    X[1, 1] += 0.1
    cert = certify_solution(p, SdpSolution("optimal", [X], 0, 0, 0, 0))
    assert cert.max_violation > 0.05
    assert not cert.feasible


def test_text_round_trip():
    p = random_2x2(0)
    q = SdpProblem.from_text(p.to_text())
    assert q.blocks == p.blocks
    assert np.array_equal(q.objective[0], p.objective[0])
    for c1, c2 in zip(p.constraints, q.constraints):
        assert c1.sense == c2.sense and c1.rhs == c2.rhs
        assert np.array_equal(c1.coeffs[0], c2.coeffs[0])


@pytest.mark.parametrize("bad", [
    dict(blocks=[2], objective=[np.ones((3, 3))]),
    dict(blocks=[2], objective=[np.array([[0, 1], [0, 0]])]),
    dict(blocks=[], objective=[]),
    dict(blocks=[1], objective=[np.array([[np.nan]])]),
    dict(blocks=[1], objective=[np.eye(1)], constraints=[Constraint([np.eye(1)], "<", 1.0)]),
])
def test_problem_validation(bad):
    with pytest.raises(ValueError):
        SdpProblem(**bad)


def test_mixed_real_and_complex_blocks():
    a = np.array([1.0, 1j])
    p = SdpProblem(
        [2, 1],
        [np.eye(2, dtype=complex), np.array([[1.0]])],
        [Constraint([np.outer(a, a.conj()), np.array([[1.0]])], ">=", 2.0)],
    )
    sol = solve_sdp(p)
    assert sol.status == sdp.OPTIMAL
    # cheapest is to put the whole requirement on the rank-one direction of the first block
    assert sol.objective_value == pytest.approx(1.0, abs=1e-6)
    assert certify_solution(p, sol).feasible


@pytest.mark.parametrize("seed", range(12))
def test_matches_external_solver(seed):
    cp = pytest.importorskip("cvxpy")
    p = random_2x2(seed)
    X = cp.Variable((2, 2), hermitian=True)
    cons = [X >> 0]
    for c in p.constraints:
        lhs = cp.real(cp.trace(c.coeffs[0] @ X))
        cons.append(lhs >= c.rhs if c.sense == ">=" else lhs <= c.rhs)
    ref = cp.Problem(cp.Minimize(cp.real(cp.trace(p.objective[0] @ X))), cons)
    ref.solve()
    sol = solve_sdp(p)
    if ref.status == "infeasible":
        assert sol.status == sdp.INFEASIBLE
    else:
        assert sol.status == sdp.OPTIMAL
        assert abs(sol.objective_value - ref.value) <= 1e-5 * (1 + abs(ref.value))
