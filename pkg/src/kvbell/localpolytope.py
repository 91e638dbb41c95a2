"""Local-polytope computations on a hand-rolled dense two-phase simplex.

The solver maximizes, uses Bland's rule (lowest eligible column in, lowest
basis variable among minimal ratios out) so it cannot cycle, and certifies
every optimum by recomputing reduced costs at the final basis from the
original data.  Infeasible problems return the phase-1 dual vector, which
is verified to be a separating certificate before anyone sees it.

On top of the solver: membership of a distribution in the local polytope,
and the two readings of the local-content quantity lambda.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GuardError, NumericalError, ValidationError
from .values import ProbDist, assignment_table

PIVOT_EPS = 1e-11
ENTER_TOL = 1e-9
CERT_TOL = 1e-9
VERTEX_GUARD = 4096
DENSE_LP_GUARD = 1 << 24
SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class LinearProgram:
    """max objective . x subject to rows[i] . x (sense_i) rhs[i].

    Variables are nonnegative unless their index is listed in free.
    """

    objective: np.ndarray
    rows: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray
    free: frozenset = frozenset()

    def __post_init__(self):
        objective = np.asarray(self.objective, dtype=np.float64)
        rows = np.asarray(self.rows, dtype=np.float64)
        rhs = np.asarray(self.rhs, dtype=np.float64)
        senses = tuple(self.senses)
        if rows.ndim != 2:
            raise ValidationError("constraint rows must form a matrix")
        m, n = rows.shape
        if objective.shape != (n,) or rhs.shape != (m,) or len(senses) != m:
            raise ValidationError("objective/rows/senses/rhs dimensions disagree")
        if any(s not in SENSES for s in senses):
            raise ValidationError(f"senses must be among {SENSES}")
        for arr in (objective, rows, rhs):
            if not np.all(np.isfinite(arr)):
                raise ValidationError("linear program contains non-finite entries")
        bad = [j for j in self.free if not 0 <= int(j) < n]
        if bad:
            raise ValidationError(f"free variable indices out of range: {bad}")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "free", frozenset(int(j) for j in self.free))

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective.tolist(),
            "rows": self.rows.tolist(),
            "senses": list(self.senses),
            "rhs": self.rhs.tolist(),
            "free": sorted(self.free),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LinearProgram":
        return cls(
            objective=np.asarray(doc["objective"], dtype=np.float64),
            rows=np.asarray(doc["rows"], dtype=np.float64),
            senses=tuple(doc["senses"]),
            rhs=np.asarray(doc["rhs"], dtype=np.float64),
            free=frozenset(doc.get("free", ())),
        )


@dataclass(frozen=True)
class LPResult:
    """status is optimal/infeasible/unbounded; dual holds row multipliers:
    the optimal duals when optimal, a verified separating (Farkas) vector
    when infeasible."""

    status: str
    value: float | None
    x: np.ndarray | None
    dual: np.ndarray | None

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "value": self.value,
            "solution": None if self.x is None else self.x.tolist(),
        }


class _Standard:
    """Equality form max c.x, A x = b, x >= 0 with bookkeeping for recovery."""

    def __init__(self, lp: LinearProgram):
        A = lp.rows.copy()
        b = lp.rhs.copy()
        senses = list(lp.senses)
        m, n0 = A.shape
        row_sign = np.ones(m)
        for i in range(m):
            if b[i] < 0:
                A[i] = -A[i]
                b[i] = -b[i]
                row_sign[i] = -1.0
                senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]
        blocks = [A]
        costs = [lp.objective.copy()]
        self.neg_col = {}
        col = n0
        free_order = sorted(lp.free)
        if free_order:
            blocks.append(-A[:, free_order])
            costs.append(-lp.objective[free_order])
            for j in free_order:
                self.neg_col[j] = col
                col += 1
        slack_cols = []
        for i, sense in enumerate(senses):
            if sense == "<=":
                e = np.zeros((m, 1))
                e[i, 0] = 1.0
                slack_cols.append((i, e, "slack"))
            elif sense == ">=":
                e = np.zeros((m, 1))
                e[i, 0] = -1.0
                slack_cols.append((i, e, "surplus"))
        basis = np.full(m, -1, dtype=np.int64)
        for i, e, kind in slack_cols:
            blocks.append(e)
            costs.append(np.zeros(1))
            if kind == "slack":
                basis[i] = col
            col += 1
        art_mask_cols = []
        for i in range(m):
            if basis[i] < 0:
                e = np.zeros((m, 1))
                e[i, 0] = 1.0
                blocks.append(e)
                costs.append(np.zeros(1))
                basis[i] = col
                art_mask_cols.append(col)
                col += 1
        self.matrix = np.hstack(blocks)
        self.costs = np.concatenate(costs)
        self.rhs = b
        self.row_sign = row_sign
        self.basis0 = basis
        self.n_orig = n0
        self.artificial = np.zeros(col, dtype=bool)
        self.artificial[art_mask_cols] = True


def _install_objective(T: np.ndarray, basis: np.ndarray, costs: np.ndarray) -> None:
    m = T.shape[0] - 1
    T[m, :-1] = costs - costs[basis] @ T[:m, :-1]
    T[m, -1] = -float(costs[basis] @ T[:m, -1])


def _pivot_once(T: np.ndarray, basis: np.ndarray, leave: int, enter: int) -> None:
    T[leave] /= T[leave, enter]
    factor = T[:, enter].copy()
    factor[leave] = 0.0
    T -= np.outer(factor, T[leave])
    basis[leave] = enter


def _pivot_loop(T: np.ndarray, basis: np.ndarray, allowed: np.ndarray, max_iters: int) -> str:
    m = T.shape[0] - 1
    for _ in range(max_iters):
        reduced = T[m, :-1]
        eligible = np.flatnonzero(allowed & (reduced > ENTER_TOL))
        if eligible.size == 0:
            return "optimal"
        enter = int(eligible[0])
        col = T[:m, enter]
        positive = col > PIVOT_EPS
        if not positive.any():
            top = float(col.max()) if m else 0.0
            if top > 1e-13:
                raise NumericalError(
                    f"numerical breakdown: best available pivot {top:.3e} < {PIVOT_EPS:.0e}"
                )
            return "unbounded"
        ratios = np.where(positive, T[:m, -1] / np.where(positive, col, 1.0), np.inf)
        rmin = float(ratios.min())
        ties = np.flatnonzero(ratios == rmin)
        leave = int(ties[np.argmin(basis[ties])])
        _pivot_once(T, basis, leave, enter)
    raise NumericalError(f"simplex did not terminate within {max_iters} pivots")


def _purge_artificial_basics(T, basis, std, kept_rows):
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    drop = []
    m = T.shape[0] - 1
    for i in range(m):
        if not std.artificial[basis[i]]:
            continue
        row = T[i, :-1]
        candidates = np.flatnonzero(~std.artificial & (np.abs(row) > PIVOT_EPS))
        if candidates.size:
            _pivot_once(T, basis, i, int(candidates[0]))
        else:
            drop.append(i)
    if drop:
        keep = [i for i in range(m) if i not in drop]
        T = np.vstack([T[keep], T[m:]])
        basis = basis[keep]
        kept_rows = kept_rows[keep]
    return T, basis, kept_rows


def _row_duals(std: _Standard, basis: np.ndarray, costs: np.ndarray, kept_rows: np.ndarray):
    B = std.matrix[kept_rows][:, basis]
    return np.linalg.solve(B.T, costs[basis])


def solve_lp(lp: LinearProgram, max_iters: int | None = None) -> LPResult:
    """Two-phase dense simplex; see the module docstring for the contract."""
    std = _Standard(lp)
    m, nt = std.matrix.shape
    if max_iters is None:
        max_iters = 2000 + 200 * (m + nt)
    T = np.zeros((m + 1, nt + 1))
    T[:m, :nt] = std.matrix
    T[:m, -1] = std.rhs
    basis = std.basis0.copy()
    kept_rows = np.arange(m)
    if std.artificial.any():
        phase1_costs = np.where(std.artificial, -1.0, 0.0)
        _install_objective(T, basis, phase1_costs)
        status = _pivot_loop(T, basis, np.ones(nt, dtype=bool), max_iters)
        if status != "optimal":
            raise NumericalError("phase 1 terminated without an optimum")
        if -T[m, -1] < -CERT_TOL:
            y = _row_duals(std, basis, phase1_costs, kept_rows)
            farkas = -y
            against = farkas @ std.matrix[:, ~std.artificial]
            if against.max() > 1e-7 or float(farkas @ std.rhs) <= 0.0:
                raise NumericalError("infeasibility certificate failed re-verification")
            return LPResult("infeasible", None, None, farkas * std.row_sign)
        T, basis, kept_rows = _purge_artificial_basics(T, basis, std, kept_rows)
        m = T.shape[0] - 1
    _install_objective(T, basis, std.costs)
    status = _pivot_loop(T, basis, ~std.artificial, max_iters)
    if status == "unbounded":
        return LPResult("unbounded", None, None, None)
    y = _row_duals(std, basis, std.costs, kept_rows)
    reduced = std.costs - y @ std.matrix[kept_rows]
    worst = float(reduced[~std.artificial].max())
    if worst > CERT_TOL:
        raise NumericalError(f"optimality certification failed: reduced cost {worst:.3e}")
    x_std = np.zeros(nt)
    x_std[basis] = T[:m, -1]
    x = x_std[: std.n_orig].copy()
    for j, col in std.neg_col.items():
        x[j] -= x_std[col]
    dual = np.zeros(std.row_sign.shape[0])
    dual[kept_rows] = y
    return LPResult("optimal", float(lp.objective @ x), x, dual * std.row_sign)


# ---------------------------------------------------------------------------
# Local polytope proper.


def vertex_matrix(N: int, K: int) -> np.ndarray:
    """Columns are deterministic strategy pairs, flattened over (x,y,a,b).

    Column order is Alice-major: s = fa * K**N + gb with each assignment
    read as a base-K counter (input 0 most significant).
    """
    total = K**N
    if total > VERTEX_GUARD:
        raise GuardError(f"{K}^{N} assignments per party exceed the guard ({VERTEX_GUARD})")
    if (N * N * K * K) * total * total > DENSE_LP_GUARD:
        raise GuardError("dense vertex matrix would exceed the memory guard")
    digits = assignment_table(N, K)
    hits = np.zeros((total, N, K))
    hits[np.arange(total)[:, None], np.arange(N)[None, :], digits] = 1.0
    full = np.einsum("fxa,gyb->xyabfg", hits, hits)
    return full.reshape(N * N * K * K, total * total)


def _decode_weights(q: np.ndarray, N: int, K: int, cut: float = 1e-12):
    digits = assignment_table(N, K)
    total = digits.shape[0]
    out = []
    for s in np.flatnonzero(q > cut):
        fa, gb = divmod(int(s), total)
        out.append(
            (
                tuple(int(v) for v in digits[fa]),
                tuple(int(v) for v in digits[gb]),
                float(q[s]),
            )
        )
    return out


@dataclass(frozen=True)
class LocalWitness:
    """Either a convex decomposition over deterministic pairs or a verified
    separating functional with its offset and gap."""

    local: bool
    weights: list | None = None
    reconstruction_error: float | None = None
    functional: np.ndarray | None = None
    functional_offset: float | None = None
    local_max: float | None = None
    value_at_target: float | None = None
    gap: float | None = None


def is_local(dist: ProbDist, tol: float = CERT_TOL) -> LocalWitness:
    """Membership of the distribution in the local polytope.

    Solves the exact-decomposition feasibility LP.  A negative answer comes
    with a separating functional re-verified against every vertex.
    """
    N, K = dist.N, dist.K
    D = vertex_matrix(N, K)
    n_entries = N * N * K * K
    n_pairs = D.shape[1]
    rows = np.vstack([D, np.ones((1, n_pairs))])
    rhs = np.concatenate([dist.table.reshape(-1), [1.0]])
    lp = LinearProgram(
        objective=np.zeros(n_pairs),
        rows=rows,
        senses=("=",) * (n_entries + 1),
        rhs=rhs,
    )
    result = solve_lp(lp)
    if result.status == "optimal":
        err = float(np.max(np.abs(D @ result.x - dist.table.reshape(-1))))
        if err > tol:
            raise NumericalError(f"decomposition residual {err:.3e} exceeds {tol:.1e}")
        weights = _decode_weights(np.clip(result.x, 0.0, None), N, K)
        return LocalWitness(local=True, weights=weights, reconstruction_error=err)
    if result.status != "infeasible":
        raise NumericalError(f"membership LP returned {result.status}")
    y = result.dual
    y = y / float(np.max(np.abs(y)))
    coeffs = y[:n_entries]
    offset = float(y[n_entries])
    vertex_values = coeffs @ D
    local_max = float(vertex_values.max())
    value = float(coeffs @ dist.table.reshape(-1))
    gap = value - local_max
    if gap <= 0.0 or float(vertex_values.max()) + offset > 1e-7:
        raise NumericalError("separating functional failed re-verification")
    return LocalWitness(
        local=False,
        functional=coeffs.reshape(N, N, K, K),
        functional_offset=offset,
        local_max=local_max,
        value_at_target=value,
        gap=gap,
    )


VARIANT_FREE = "remainder-free"
VARIANT_LOCAL = "remainder-local"
_VARIANTS = {"free": VARIANT_FREE, "local": VARIANT_LOCAL, VARIANT_FREE: VARIANT_FREE, VARIANT_LOCAL: VARIANT_LOCAL}


@dataclass(frozen=True)
class LocalContentResult:
    lam: float
    variant: str
    weights: list
    residual_weights: list | None
    residual_distribution: ProbDist | None
    reconstruction_error: float

    def to_json_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "variant": self.variant,
            "weights": [
                {"alice": list(a), "bob": list(b), "weight": w} for a, b, w in self.weights
            ],
            "residual_weights": None
            if self.residual_weights is None
            else [
                {"alice": list(a), "bob": list(b), "weight": w}
                for a, b, w in self.residual_weights
            ],
            "reconstruction_error": self.reconstruction_error,
        }


def local_content(dist: ProbDist, variant: str = "free") -> LocalContentResult:
    """Largest local weight lambda of the distribution, in two readings.

    remainder-free: max total weight of a subconvex combination of
    deterministic pairs fitting under the distribution entrywise.
    remainder-local: max lambda such that lambda P + (1-lambda) P' is a
    convex combination of deterministic pairs with P' itself one; both
    multipliers are LP variables, so a single solve suffices.
    """
    try:
        variant_name = _VARIANTS[variant]
    except KeyError:
        raise ValidationError(f"variant must be free or local, got {variant!r}") from None
    N, K = dist.N, dist.K
    D = vertex_matrix(N, K)
    n_entries, n_pairs = D.shape
    p_flat = dist.table.reshape(-1)
    if variant_name == VARIANT_FREE:
        lp = LinearProgram(
            objective=np.ones(n_pairs),
            rows=D,
            senses=("<=",) * n_entries,
            rhs=p_flat,
        )
        result = solve_lp(lp)
        if result.status != "optimal":
            raise NumericalError(f"local-content LP returned {result.status}")
        q = np.clip(result.x, 0.0, None)
        lam = float(result.value)
        overshoot = float(np.max(D @ result.x - p_flat))
        err = max(0.0, overshoot)
        residual = None
        if lam < 1.0 - CERT_TOL:
            residual = ProbDist(
                (dist.table - (D @ q).reshape(dist.table.shape)) / (1.0 - lam),
                neg_tol=1e-8,
                norm_tol=1e-7,
            )
        return LocalContentResult(
            lam=lam,
            variant=variant_name,
            weights=_decode_weights(q, N, K),
            residual_weights=None,
            residual_distribution=residual,
            reconstruction_error=err,
        )
    rows = np.zeros((n_entries + 2, 1 + 2 * n_pairs))
    rows[:n_entries, 0] = p_flat
    rows[:n_entries, 1 : 1 + n_pairs] = -D
    rows[:n_entries, 1 + n_pairs :] = D
    rows[n_entries, 1 : 1 + n_pairs] = 1.0
    rows[n_entries + 1, 0] = 1.0
    rows[n_entries + 1, 1 + n_pairs :] = 1.0
    rhs = np.concatenate([np.zeros(n_entries), [1.0, 1.0]])
    objective = np.zeros(1 + 2 * n_pairs)
    objective[0] = 1.0
    lp = LinearProgram(
        objective=objective, rows=rows, senses=("=",) * (n_entries + 2), rhs=rhs
    )
    result = solve_lp(lp)
    if result.status != "optimal":
        raise NumericalError(f"local-content LP returned {result.status}")
    lam = float(result.x[0])
    q = np.clip(result.x[1 : 1 + n_pairs], 0.0, None)
    r = np.clip(result.x[1 + n_pairs :], 0.0, None)
    err = float(np.max(np.abs(lam * p_flat - D @ q + D @ r)))
    residual = None
    if lam < 1.0 - CERT_TOL:
        residual = ProbDist(
            (D @ r).reshape(dist.table.shape) / (1.0 - lam), neg_tol=1e-8, norm_tol=1e-7
        )
    return LocalContentResult(
        lam=lam,
        variant=variant_name,
        weights=_decode_weights(q, N, K),
        residual_weights=_decode_weights(r, N, K),
        residual_distribution=residual,
        reconstruction_error=err,
    )


def lv_from_pi(pi: float) -> float:
    """Violation measure 2/pi - 1 from a local weight pi."""
    pi = float(pi)
    if not 0.0 < pi <= 1.0:
        raise ValidationError(f"local weight must lie in (0, 1], got {pi}")
    return 2.0 / pi - 1.0
