"""LP solver against a vertex-enumeration oracle, then the local-polytope
layer built on it.

The oracle enumerates basic solutions of the inequality system directly
with numpy.linalg.solve, so it shares no code with the simplex path.
"""

import itertools
import math

import numpy as np
import pytest

from kvbell.errors import NumericalError, ValidationError
from kvbell.localpolytope import (
    LinearProgram,
    LocalWitness,
    LPResult,
    is_local,
    local_content,
    lv_from_pi,
    solve_lp,
    vertex_matrix,
)
from kvbell.values import (
    ProbDist,
    assignment_table,
    chsh_functional,
    pair,
    pr_box_dist,
    quantum_prob,
    seesaw_lower_bound,
    uniform_dist,
)
from kvbell.states import make_mes


def oracle_max(c, A, b):
    """Best objective over vertices of {A x <= b, x >= 0}; None if infeasible."""
    m, n = A.shape
    Afull = np.vstack([A, -np.eye(n)])
    bfull = np.concatenate([b, np.zeros(n)])
    best = None
    for idx in itertools.combinations(range(m + n), n):
        sub = Afull[list(idx)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, bfull[list(idx)])
        if np.all(Afull @ x <= bfull + 1e-9):
            v = float(c @ x)
            if best is None or v > best:
                best = v
    return best


def random_bounded_lp(rng, n_vars=5, n_rand_rows=7):
    A = rng.normal(size=(n_rand_rows, n_vars))
    b = rng.uniform(0.5, 2.0, size=n_rand_rows)
    cap = rng.uniform(1.0, 3.0)
    rows = np.vstack([A, np.ones((1, n_vars))])
    rhs = np.concatenate([b, [cap]])
    c = rng.normal(size=n_vars)
    return c, rows, rhs


# ---------------------------------------------------------------------------
# solver basics


def test_textbook_lp():
    lp = LinearProgram(
        objective=np.array([3.0, 5.0]),
        rows=np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]]),
        senses=("<=", "<=", "<="),
        rhs=np.array([4.0, 12.0, 18.0]),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert abs(res.value - 36.0) < 1e-9
    assert np.allclose(res.x, [2.0, 6.0], atol=1e-9)


def test_equality_and_geq_rows():
    lp = LinearProgram(
        objective=np.array([-1.0, -1.0]),
        rows=np.array([[1.0, 1.0]]),
        senses=(">=",),
        rhs=np.array([2.0]),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert abs(res.value - (-2.0)) < 1e-9
    lp2 = LinearProgram(
        objective=np.array([1.0, 0.0]),
        rows=np.array([[1.0, 1.0]]),
        senses=("=",),
        rhs=np.array([1.0]),
    )
    res2 = solve_lp(lp2)
    assert abs(res2.value - 1.0) < 1e-9


def test_free_variables():
    # max -x with x free: pushes x to -infinity unless constrained
    lp = LinearProgram(
        objective=np.array([-1.0]),
        rows=np.array([[1.0]]),
        senses=(">=",),
        rhs=np.array([-3.0]),
        free=frozenset({0}),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert abs(res.value - 3.0) < 1e-9
    assert abs(res.x[0] - (-3.0)) < 1e-9


def test_unbounded_and_infeasible():
    lp = LinearProgram(
        objective=np.array([1.0, 0.0]),
        rows=np.array([[0.0, 1.0]]),
        senses=("<=",),
        rhs=np.array([1.0]),
    )
    assert solve_lp(lp).status == "unbounded"
    lp2 = LinearProgram(
        objective=np.array([1.0]),
        rows=np.array([[1.0], [-1.0]]),
        senses=("<=", "<="),
        rhs=np.array([1.0, -2.0]),
    )
    res = solve_lp(lp2)
    assert res.status == "infeasible"
    # the returned dual is a Farkas certificate in the original row frame
    y = res.dual
    assert y is not None
    assert np.all(y @ lp2.rows <= 1e-7)
    assert float(y @ lp2.rhs) > 0.0


def test_redundant_equality_rows_are_handled():
    lp = LinearProgram(
        objective=np.array([1.0, 0.0]),
        rows=np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]]),
        senses=("=", "=", "="),
        rhs=np.array([1.0, 1.0, 2.0]),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert abs(res.value - 1.0) < 1e-9
    assert res.dual.shape == (3,)


def test_beale_style_degeneracy_terminates():
    # degenerate problem that cycles without an anti-cycling rule
    lp = LinearProgram(
        objective=np.array([0.75, -150.0, 0.02, -6.0]),
        rows=np.array(
            [
                [0.25, -60.0, -0.04, 9.0],
                [0.5, -90.0, -0.02, 3.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        ),
        senses=("<=", "<=", "<="),
        rhs=np.array([0.0, 0.0, 1.0]),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert abs(res.value - 0.05) < 1e-9


def test_iteration_limit_raises():
    lp = LinearProgram(
        objective=np.array([3.0, 5.0]),
        rows=np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]]),
        senses=("<=", "<=", "<="),
        rhs=np.array([4.0, 12.0, 18.0]),
    )
    with pytest.raises(NumericalError):
        solve_lp(lp, max_iters=1)


def test_lp_validation_and_json_roundtrip():
    with pytest.raises(ValidationError):
        LinearProgram(
            objective=np.array([1.0]),
            rows=np.array([[1.0, 2.0]]),
            senses=("<=",),
            rhs=np.array([1.0]),
        )
    with pytest.raises(ValidationError):
        LinearProgram(
            objective=np.array([1.0]),
            rows=np.array([[1.0]]),
            senses=("<",),
            rhs=np.array([1.0]),
        )
    with pytest.raises(ValidationError):
        LinearProgram(
            objective=np.array([np.nan]),
            rows=np.array([[1.0]]),
            senses=("<=",),
            rhs=np.array([1.0]),
        )
    lp = LinearProgram(
        objective=np.array([1.0, 2.0]),
        rows=np.array([[1.0, 1.0]]),
        senses=("<=",),
        rhs=np.array([3.0]),
        free=frozenset({1}),
    )
    again = LinearProgram.from_json_dict(lp.to_json_dict())
    assert np.array_equal(again.objective, lp.objective)
    assert again.senses == lp.senses and again.free == lp.free
    res = solve_lp(lp)
    doc = res.to_json_dict()
    assert doc["status"] == "optimal"
    assert abs(res.value - 6.0) < 1e-9


def test_random_lps_match_vertex_oracle(rng):
    for _ in range(30):
        c, rows, rhs = random_bounded_lp(rng)
        lp = LinearProgram(objective=c, rows=rows, senses=("<=",) * 8, rhs=rhs)
        res = solve_lp(lp)
        want = oracle_max(c, rows, rhs)
        assert res.status == "optimal"
        assert abs(res.value - want) < 1e-8
        # strong duality against the reported row multipliers
        y = res.dual
        assert np.all(y >= -1e-9)
        assert np.all(y @ rows >= c - 1e-7)
        assert abs(float(y @ rhs) - res.value) < 1e-7


# ---------------------------------------------------------------------------
# vertex matrix and membership


def test_vertex_matrix_columns_are_deterministic_boxes():
    for N, K in [(2, 2), (2, 3), (3, 2)]:
        D = vertex_matrix(N, K)
        table = assignment_table(N, K)
        F = table.shape[0]
        assert D.shape == (N * N * K * K, F * F)
        for fi in range(F):
            for gi in range(F):
                col = D[:, fi * F + gi]
                want = ProbDist.from_assignments(table[fi], table[gi], N, K)
                assert np.array_equal(col, want.table.reshape(-1))


def test_deterministic_and_uniform_are_local():
    d = ProbDist.from_assignments([0, 1], [1, 1], 2, 2)
    w = is_local(d)
    assert w.local and w.reconstruction_error <= 1e-12
    w2 = is_local(uniform_dist(2, 2))
    assert w2.local and w2.reconstruction_error <= 1e-9


def _rebuild(weights, N, K):
    out = np.zeros((N, N, K, K))
    for f, g, weight in weights:
        out += weight * ProbDist.from_assignments(f, g, N, K).table
    return out


def test_random_vertex_mixtures_are_local(rng):
    D = vertex_matrix(2, 2)
    for _ in range(25):
        picks = rng.integers(0, D.shape[1], size=3)
        lam = rng.dirichlet(np.ones(3))
        table = (D[:, picks] @ lam).reshape(2, 2, 2, 2)
        w = is_local(ProbDist(table))
        assert w.local
        assert w.reconstruction_error <= 1e-9
        # decoded weights rebuild the distribution
        rebuilt = _rebuild(w.weights, 2, 2)
        assert np.max(np.abs(rebuilt - table)) <= 1e-8


def test_pr_box_is_not_local():
    w = is_local(pr_box_dist())
    assert not w.local
    assert w.gap > 0.1
    # independent re-check of the separating functional
    D = vertex_matrix(2, 2)
    vals = w.functional.reshape(-1) @ D
    assert w.value_at_target > vals.max() + 0.05


def test_tsirelson_point_is_not_local():
    res = seesaw_lower_bound(chsh_functional(), dim=2, seed=0, iters=30, restarts=5)
    dist = quantum_prob(make_mes(2), res.alice, res.bob)
    w = is_local(dist)
    assert not w.local
    assert w.gap > 1e-3


# ---------------------------------------------------------------------------
# local content


def test_local_content_endpoints():
    assert local_content(pr_box_dist(), "free").lam <= 1e-9
    det = ProbDist.from_assignments([0, 1], [0, 0], 2, 2)
    assert abs(local_content(det, "free").lam - 1.0) <= 1e-9
    assert abs(local_content(uniform_dist(2, 2), "free").lam - 1.0) <= 1e-9


def test_local_content_free_decomposition_identity():
    res = seesaw_lower_bound(chsh_functional(), dim=2, seed=0, iters=30, restarts=5)
    target = quantum_prob(make_mes(2), res.alice, res.bob)
    out = local_content(target, "free")
    assert 0.0 < out.lam < 1.0
    local_part = _rebuild(out.weights, 2, 2)
    for _, _, weight in out.weights:
        assert weight >= -1e-12
    assert abs(local_part.sum() / 4.0 - out.lam) <= 1e-9
    rebuilt = local_part + (1.0 - out.lam) * out.residual_distribution.table
    assert np.max(np.abs(rebuilt - target.table)) <= 1e-8


def test_local_content_of_tsirelson_point_matches_chsh_bound():
    res = seesaw_lower_bound(chsh_functional(), dim=2, seed=0, iters=30, restarts=5)
    target = quantum_prob(make_mes(2), res.alice, res.bob)
    q = pair(chsh_functional(), target)
    out = local_content(target, "free")
    # any local part of mass lam forces q <= lam*(3/4) + (1 - lam)*1
    ub = 4.0 * (1.0 - q)
    assert out.lam <= ub + 1e-8
    assert out.lam >= ub - 1e-6  # the LP achieves the CHSH-derived cap here


def test_local_content_decreases_toward_pr_box():
    u = uniform_dist(2, 2)
    pr = pr_box_dist()
    lams = []
    for mu in [0.5, 0.7, 0.9, 1.0]:
        mixed = pr.mix(u, mu)  # mu on the PR side
        lams.append(local_content(mixed, "free").lam)
    assert all(a > b - 1e-12 for a, b in zip(lams, lams[1:]))
    assert lams[-1] <= 1e-9
    below = local_content(pr.mix(u, 0.4), "free")
    assert abs(below.lam - 1.0) <= 1e-9


def test_local_content_remainder_local_variant():
    det = ProbDist.from_assignments([0, 1], [0, 0], 2, 2)
    assert abs(local_content(det, "local").lam - 1.0) <= 1e-9
    out = local_content(pr_box_dist(), "local")
    # mixing weight against the worst local box: known 2/3 for this box
    assert abs(out.lam - 2.0 / 3.0) <= 1e-8
    # identity lam * P = D q - D r with q a full local distribution
    q_part = _rebuild(out.weights, 2, 2)
    q_mass = sum(weight for _, _, weight in out.weights)
    r_part = _rebuild(out.residual_weights, 2, 2)
    r_mass = sum(weight for _, _, weight in out.residual_weights)
    assert abs(q_mass - 1.0) <= 1e-8
    assert abs(out.lam + r_mass - 1.0) <= 1e-8
    lhs = out.lam * pr_box_dist().table
    assert np.max(np.abs(lhs - (q_part - r_part))) <= 1e-8


def test_local_content_variant_names():
    with pytest.raises(ValidationError):
        local_content(uniform_dist(2, 2), "bogus")
    a = local_content(uniform_dist(2, 2), "remainder-free")
    assert a.variant == "remainder-free"


def test_lv_from_pi():
    assert lv_from_pi(1.0) == 1.0
    assert lv_from_pi(0.5) == 3.0
    with pytest.raises(ValidationError):
        lv_from_pi(0.0)
    with pytest.raises(ValidationError):
        lv_from_pi(1.5)
