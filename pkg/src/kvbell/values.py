"""Game values: bilinear pairings, classical optima (exact and heuristic),
quantum distributions from states and measurements, and the bound chains
behind the super-activation and almost-activation experiments.

Method vocabulary used in results and reports:
  exact                  computed by full enumeration or dense algebra
  closed-form-validated  closed formula cross-checked against brute force
  heuristic-lb           lower bound from a randomized search
  formula-ub             upper bound evaluated from a stated formula
  formula-lb             lower bound evaluated from a stated formula
  formula-symbolic       formula kept symbolic (unknown constant)
  empirical              Monte Carlo estimate with sampling error
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import GuardError, ValidationError
from .kvgame import (
    BOUND_CONSTANTS,
    BellFunctional,
    CosetTable,
    Measurement,
    build_hadamard_subgroup,
    kv_functional,
    kv_measurements,
    noise_weights,
)
from .bitlinalg import popcount
from .states import (
    ENTANGLED,
    DensityMatrix,
    StateExpansion,
    make_mes,
    realize_term,
)

ENUMERATION_GUARD = 10**6
ORACLE_GUARD = 4096
JOINT_DIM_GUARD = 4096
TABLE_ENTRIES_GUARD = 1 << 24
EXACT_GAME_SIZES = (2, 4, 8)


class ProbDist:
    """Conditional outcome table P(a, b | x, y), stored as (N, N, K, K).

    Entries down to -neg_tol are treated as float noise and clamped to 0;
    anything lower is rejected.  Rows must be normalized per question pair
    within norm_tol.
    """

    def __init__(self, table, neg_tol: float = 1e-14, norm_tol: float = 1e-10):
        table = np.array(table, dtype=np.float64)
        if table.ndim != 4 or table.shape[0] != table.shape[1] or table.shape[2] != table.shape[3]:
            raise ValidationError(f"expected shape (N, N, K, K), got {table.shape}")
        low = float(table.min()) if table.size else 0.0
        if low < -neg_tol:
            raise ValidationError(f"entry {low:.3e} below -{neg_tol:.1e}")
        table = np.clip(table, 0.0, None)
        sums = table.sum(axis=(2, 3))
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > norm_tol:
            raise ValidationError(f"normalization off by {worst:.3e} (> {norm_tol:.1e})")
        self.table = table
        self.N = table.shape[0]
        self.K = table.shape[2]

    @classmethod
    def uniform(cls, N: int, K: int) -> "ProbDist":
        return cls(np.full((N, N, K, K), 1.0 / (K * K)))

    @classmethod
    def from_assignments(cls, alice, bob, N: int, K: int) -> "ProbDist":
        alice = np.asarray(alice, dtype=np.int64)
        bob = np.asarray(bob, dtype=np.int64)
        if alice.shape != (N,) or bob.shape != (N,):
            raise ValidationError("assignments must give one output per input")
        if alice.min() < 0 or alice.max() >= K or bob.min() < 0 or bob.max() >= K:
            raise ValidationError(f"assignment outputs must lie in [0, {K})")
        table = np.zeros((N, N, K, K))
        xs = np.arange(N)
        table[xs[:, None], xs[None, :], alice[:, None], bob[None, :]] = 1.0
        return cls(table)

    def mix(self, other: "ProbDist", lam: float) -> "ProbDist":
        if (self.N, self.K) != (other.N, other.K):
            raise ValidationError("cannot mix distributions of different shapes")
        return ProbDist(lam * self.table + (1.0 - lam) * other.table)


def pair(functional: BellFunctional, dist: ProbDist) -> float:
    """Bilinear pairing sum over (x, y, a, b) of coefficient times probability."""
    if (functional.num_inputs, functional.num_outputs) != (dist.N, dist.K):
        raise ValidationError(
            f"shape mismatch: functional ({functional.num_inputs}, {functional.num_outputs})"
            f" vs distribution ({dist.N}, {dist.K})"
        )
    if not functional.is_lazy:
        return float(np.sum(functional.dense() * dist.table))
    acc = 0.0
    for x in range(functional.num_inputs):
        for y in range(functional.num_inputs):
            acc += float(np.sum(functional.block(x, y) * dist.table[x, y]))
    return acc


def assignment_table(n_in: int, n_out: int) -> np.ndarray:
    """All n_out**n_in assignments as base-K counter rows, input 0 most significant.

    Row index doubles as the canonical strategy id everywhere (enumeration,
    vertex order, weight reporting), so the order must never change.
    """
    total = n_out**n_in
    place = n_out ** (n_in - 1 - np.arange(n_in, dtype=np.int64))
    return (np.arange(total, dtype=np.int64)[:, None] // place[None, :]) % n_out


def classical_value_exact(functional: BellFunctional, guard: int = ENUMERATION_GUARD) -> float:
    """Largest |pairing| over deterministic strategy pairs.

    Enumerates one party's assignments and lets the other respond greedily
    per question, on the functional and its negation.  The local polytope's
    extreme points are exactly the deterministic pairs, so this is exact.
    """
    n_in, n_out = functional.num_inputs, functional.num_outputs
    if n_out**n_in > guard:
        raise GuardError(
            f"{n_out}^{n_in} assignments exceed the guard ({guard}); "
            "use classical_value_heuristic"
        )
    dense = functional.dense()
    best = -math.inf
    for signed in (dense, -dense):
        reward = np.ascontiguousarray(signed.transpose(0, 2, 1, 3))
        best = max(best, float(kernels.enumerate_assignments_max(reward)))
    return best


def classical_value_bruteforce(functional: BellFunctional, guard: int = ORACLE_GUARD) -> float:
    """Independent oracle: scan every (assignment, assignment) pair outright.

    Sums run in the same ascending index order as the greedy kernels, so on
    shared inputs the two routes agree exactly, not just within tolerance.
    """
    n_in, n_out = functional.num_inputs, functional.num_outputs
    total = n_out**n_in
    if total > guard:
        raise GuardError(f"{n_out}^{n_in} assignments exceed the oracle guard ({guard})")
    digits = assignment_table(n_in, n_out)
    dense = functional.dense()
    best = -math.inf
    for signed in (dense, -dense):
        reward = signed.transpose(0, 2, 1, 3)
        score = np.zeros((total, n_in, n_out))
        for x in range(n_in):
            score += reward[x, digits[:, x]]
        for lo in range(0, total, 512):
            vals = np.zeros((min(512, total - lo), total))
            for y in range(n_in):
                vals += score[lo : lo + 512, y, :][:, digits[:, y]]
            best = max(best, float(vals.max()))
    return best


def classical_value_heuristic(
    functional: BellFunctional, restarts: int = 50, seed: int = 0
) -> float:
    """Lower bound by alternating best-response sweeps from random starts.

    Each restart draws a random second-party assignment, then alternates
    exact best responses until a sweep leaves the assignment unchanged.
    Runs on the functional and its negation; deterministic given seed.
    """
    if restarts < 1:
        raise ValidationError(f"restarts must be >= 1, got {restarts}")
    n_in, n_out = functional.num_inputs, functional.num_outputs
    dense = functional.dense()
    rng = np.random.Generator(np.random.PCG64(seed))
    ys = np.arange(n_in)
    best = -math.inf
    for signed in (dense, -dense):
        # by_x[x, a, y, b] and by_y[y, b, x, a] views for the two half-steps
        by_x = signed.transpose(0, 2, 1, 3)
        by_y = signed.transpose(1, 3, 0, 2)
        for _ in range(restarts):
            bob = rng.integers(0, n_out, size=n_in)
            value = -math.inf
            for _ in range(200):
                alice_gain = by_x[:, :, ys, bob].sum(axis=2)
                alice = alice_gain.argmax(axis=1)
                bob_gain = by_y[:, :, ys, alice].sum(axis=2)
                new_bob = bob_gain.argmax(axis=1)
                value = float(bob_gain.max(axis=1).sum())
                if np.array_equal(new_bob, bob):
                    break
                bob = new_bob
            best = max(best, value)
    return best


def _measurement_family(measurements, side: str):
    if not measurements:
        raise ValidationError(f"no measurements given for {side}")
    dim = measurements[0].dim
    k = measurements[0].num_outcomes
    for m in measurements:
        if m.dim != dim or m.num_outcomes != k:
            raise ValidationError(f"{side} measurements must share dim and outcome count")
    return dim, k


def quantum_prob(rho: DensityMatrix, alice, bob) -> ProbDist:
    """Outcome table P(a, b | x, y) = tr((E_x^a o F_y^b) rho).

    Uses the rank-1 vector route when every measurement carries vectors,
    the general operator contraction otherwise.
    """
    alice = list(alice)
    bob = list(bob)
    dim_a, k_a = _measurement_family(alice, "first party")
    dim_b, k_b = _measurement_family(bob, "second party")
    if len(alice) != len(bob) or k_a != k_b:
        raise ValidationError("both parties need equal input and outcome counts")
    n_in, n_out = len(alice), k_a
    if rho.dim != dim_a * dim_b:
        raise ValidationError(f"state dimension {rho.dim} != {dim_a}*{dim_b}")
    if rho.dim > JOINT_DIM_GUARD:
        raise GuardError(
            f"joint dimension {rho.dim} exceeds {JOINT_DIM_GUARD}; "
            "use quantum_value_kv_closed_form for large coset games"
        )
    if (n_in * n_out) ** 2 > TABLE_ENTRIES_GUARD:
        raise GuardError(
            "output table would exceed the size guard; "
            "use quantum_value_kv_closed_form for large coset games"
        )
    rho4 = rho.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    table = np.empty((n_in, n_in, n_out, n_out))
    vector_route = all(m.vectors is not None for m in alice + bob)
    if vector_route:
        for x in range(n_in):
            va = alice[x].vectors
            for y in range(n_in):
                vb = bob[y].vectors
                part = np.einsum("ai,bj,ijkl->abkl", va.conj(), vb.conj(), rho4, optimize=True)
                table[x, y] = np.einsum("abkl,ak,bl->ab", part, va, vb, optimize=True).real
    else:
        ops_a = [m.operators for m in alice]
        ops_b = [m.operators for m in bob]
        for x in range(n_in):
            for y in range(n_in):
                table[x, y] = np.einsum(
                    "aij,bkl,jlik->ab", ops_a[x], ops_b[y], rho4, optimize=True
                ).real
    return ProbDist(table)


def quantum_value_kv_closed_form(n: int, eta: float) -> float:
    """Coset-game value of the maximally entangled strategy:
    (1 - 2*eta)**2 + 4*eta*(1 - eta)/n.

    Not a quoted result; derived here and validated in tests against the
    direct sign-vector sum (kv_mes_value_direct) at n = 4 and n = 8 before
    being trusted at n = 16.
    """
    if n < 2:
        raise ValidationError(f"block length must be >= 2, got {n}")
    eta = float(eta)
    if not 0.0 < eta <= 0.5:
        raise ValidationError(f"noise rate must satisfy 0 < eta <= 1/2, got {eta}")
    return (1.0 - 2.0 * eta) ** 2 + 4.0 * eta * (1.0 - eta) / n


def kv_mes_value_direct(table: CosetTable, eta: float) -> float:
    """Brute-force oracle for the maximally entangled strategy value.

    Sums (1/N) * Pr_eta(a xor b) * <u_a|u_b>^2 / n over every ordered pair
    of group elements, with the sign vectors built explicitly.  Quadratic
    in the group size; independent of the game-table and quantum_prob
    machinery.
    """
    n = table.n
    per_weight = noise_weights(n, eta)
    values = np.arange(table.size, dtype=np.int64)
    shifts = n - 1 - np.arange(n)
    signs = (1.0 - 2.0 * ((values[:, None] >> shifts[None, :]) & 1)) / math.sqrt(n)
    overlaps = signs @ signs.T
    weights = per_weight[popcount(values[:, None] ^ values[None, :])]
    return float(np.sum(weights * overlaps**2) / (table.num_cosets * n))


@dataclass(frozen=True)
class ExpansionValue:
    """KV value of an expanded isotropic power.

    total is the exact weighted sum over all realized terms, or None on
    the bound path; mes_term is the all-entangled term's contribution,
    which lower-bounds the total because every term's value is >= 0.
    """

    total: float | None
    mes_term: float
    method: str


def kv_value_for_expansion(
    expansion: StateExpansion, eta: float, exact: bool | str = "auto"
) -> ExpansionValue:
    """Evaluate the coset game on an expanded isotropic tensor power.

    The exact route realizes every term densely and needs the effective
    block length d**k to be one of EXACT_GAME_SIZES; otherwise only the
    closed-form lower bound p**k * value(MES) is returned.
    """
    d, k, p = expansion.d, expansion.k, expansion.p
    n = d**k
    feasible = n in EXACT_GAME_SIZES
    if exact is True and not feasible:
        raise GuardError(
            f"exact evaluation needs d^k in {EXACT_GAME_SIZES}, got {n}; "
            "use the closed-form bound path"
        )
    use_exact = feasible if exact == "auto" else bool(exact)
    closed = quantum_value_kv_closed_form(n, eta)
    if not use_exact:
        return ExpansionValue(total=None, mes_term=p**k * closed, method="formula-lb")
    table = build_hadamard_subgroup(n.bit_length() - 1)
    game = kv_functional(table, eta)
    measurements = kv_measurements(table)
    total = 0.0
    mes_term = 0.0
    for weight, pattern in expansion.terms:
        state = realize_term(pattern, d, k)
        value = weight * pair(game, quantum_prob(state, measurements, measurements))
        if all(label == ENTANGLED for label in pattern):
            mes_term = value
        total += value
    return ExpansionValue(total=total, mes_term=mes_term, method="exact")


def superactivation_ratio_bound(d: int, k: int, alpha: float) -> float:
    """Bound (C'/C) * alpha**k / (k ln d)**2 on the violation ratio of the
    k-fold power, evaluated in log space so large k cannot overflow."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got {d}")
    if k < 1:
        raise ValidationError(f"copy count must be >= 1, got {k}")
    alpha = float(alpha)
    if alpha <= 0.0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    log_bound = (
        math.log(BOUND_CONSTANTS.entangled)
        - math.log(BOUND_CONSTANTS.classical)
        + k * math.log(alpha)
        - 2.0 * math.log(k * math.log(d))
    )
    # saturate instead of raising once the (finite) bound leaves float range
    if log_bound > 700.0:
        return math.inf
    return math.exp(log_bound)


def superactivation_monotone_from(d: int, alpha: float) -> int:
    """Smallest k0 = ceil(2 / ln alpha) past which the bound strictly grows."""
    if alpha <= 1.0:
        raise ValidationError("the bound only grows for alpha > 1")
    return max(1, math.ceil(2.0 / math.log(alpha)))


def superactivation_crossing(d: int, alpha: float, k_limit: int = 10**7) -> int | None:
    """Minimal k with bound > 1, or None when alpha <= 1 (no crossing)."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got {d}")
    alpha = float(alpha)
    if alpha <= 1.0:
        return None
    log_prefactor = math.log(BOUND_CONSTANTS.entangled) - math.log(BOUND_CONSTANTS.classical)
    log_alpha = math.log(alpha)
    log_ln_d = math.log(math.log(d))
    for k in range(1, k_limit + 1):
        if log_prefactor + k * log_alpha - 2.0 * (math.log(k) + log_ln_d) > 0.0:
            return k
    raise GuardError(f"no crossing found up to k = {k_limit}")


def _to_fraction(alpha) -> Fraction:
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, int):
        return Fraction(alpha)
    if isinstance(alpha, str):
        return Fraction(alpha)
    # floats go through repr so 0.1 means the decimal 1/10, not its binary image
    return Fraction(repr(float(alpha)))


def _check_alpha_range(frac: Fraction) -> Fraction:
    if not 0 < frac < Fraction(1, 2):
        raise ValidationError(f"exponent parameter must be in (0, 1/2), got {frac}")
    return frac


def almost_activation_mix_weight(d: int, alpha) -> float:
    """Mixing weight (ln d)^(1/2 - alpha) / d used by the almost-activation chain."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got {d}")
    frac = _check_alpha_range(_to_fraction(alpha))
    return math.log(d) ** float(Fraction(1, 2) - frac) / d


def almost_activation_exponent(alpha) -> Fraction:
    """Exact exponent 1/2 - 5*alpha of the lower-bound factor's growth in ln d."""
    frac = _check_alpha_range(_to_fraction(alpha))
    return Fraction(1, 2) - 5 * frac


def almost_activation_lower_factor(d: int, alpha) -> float:
    """Numeric lower-bound factor C'' * (ln d)^(1/2 - 5*alpha), C'' = (C'/C)/25."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got {d}")
    exponent = almost_activation_exponent(alpha)
    c2 = BOUND_CONSTANTS.entangled / BOUND_CONSTANTS.classical / 25.0
    return c2 * math.log(d) ** float(exponent)


def almost_activation_upper_formula(alpha) -> str:
    """Symbolic upper bound D*(ln d)^(-alpha) + 1; D is never given a number."""
    frac = _check_alpha_range(_to_fraction(alpha))
    return f"D*(ln d)^(-{frac}) + 1"


@dataclass(frozen=True)
class ViolationReport:
    """Classical and quantum values of one functional with method labels."""

    label: str
    classical_value: float | None
    classical_method: str
    quantum_value: float
    quantum_method: str
    ratio: float | None
    classical_upper_bound: float | None = None
    quantum_lower_bound: float | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.classical_method == "exact" and self.classical_value > 0:
            expected = self.quantum_value / self.classical_value
            if self.ratio is None or abs(self.ratio - expected) > 1e-12:
                raise ValidationError("ratio must equal quantum/classical for exact values")

    def to_json_dict(self) -> dict:
        bounds = {}
        if self.classical_upper_bound is not None:
            bounds["classical_upper_bound"] = {
                "value": self.classical_upper_bound,
                "method": "formula-ub",
            }
        if self.quantum_lower_bound is not None:
            bounds["quantum_lower_bound"] = {
                "value": self.quantum_lower_bound,
                "method": "formula-lb",
            }
        return {
            "functional": self.label,
            "classical": {"value": self.classical_value, "method": self.classical_method},
            "quantum": {"value": self.quantum_value, "method": self.quantum_method},
            "ratio": self.ratio,
            "bounds": bounds,
            "notes": list(self.notes),
        }


@dataclass
class SeesawResult:
    """Best strategy found by the alternating heuristic and its exact value."""

    value: float
    alice: list
    bob: list


def _random_projective(rng, dim: int, n_out: int) -> Measurement:
    gauss = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(gauss)
    ops = np.zeros((n_out, dim, dim), dtype=complex)
    for col in range(dim):
        v = q[:, col]
        ops[col % n_out] += np.outer(v, v.conj())
    return Measurement(dim, operators=ops)


def _greedy_response(rewards: np.ndarray) -> Measurement:
    """Projective measurement from per-outcome reward operators.

    Diagonalizes an outcome-weighted combination, then gives each
    eigenvector to the outcome whose reward is largest on it.
    """
    n_out, dim = rewards.shape[0], rewards.shape[1]
    mixer = np.einsum("a,aij->ij", np.arange(1, n_out + 1, dtype=float), rewards)
    mixer = (mixer + mixer.conj().T) / 2.0
    _, vecs = np.linalg.eigh(mixer)
    ops = np.zeros((n_out, dim, dim), dtype=complex)
    for col in range(dim):
        v = vecs[:, col]
        scores = np.einsum("i,aij,j->a", v.conj(), rewards, v).real
        ops[int(scores.argmax())] += np.outer(v, v.conj())
    return Measurement(dim, operators=ops)


def _mes_strategy_value(dense: np.ndarray, alice, bob, dim: int) -> float:
    # tr((E o F) MES) = tr(E F^T)/dim collapses the pairing to 2-index sums
    ea = np.stack([m.operators for m in alice])
    fb = np.stack([m.operators for m in bob])
    overlap = np.einsum("xaij,ybij->xyab", ea, fb).real / dim
    return float(np.sum(dense * overlap))


def seesaw_lower_bound(
    functional: BellFunctional,
    dim: int,
    seed: int = 0,
    iters: int = 50,
    restarts: int = 20,
) -> SeesawResult:
    """Heuristic lower bound on the quantum value over maximally entangled
    strategies, by alternating greedy measurement updates.

    Keeps the best iterate seen (single updates need not improve), and
    returns the pairing of the reported strategy computed through
    quantum_prob, so the value is exactly what the certificate achieves.
    """
    if dim > 16:
        raise GuardError(f"joint search dimension {dim} exceeds 16")
    n_in, n_out = functional.num_inputs, functional.num_outputs
    if n_in * n_out > 64:
        raise GuardError(f"scenario size N*K = {n_in * n_out} exceeds 64")
    if iters < 1 or restarts < 1:
        raise ValidationError("iters and restarts must be >= 1")
    dense = functional.dense()
    rng = np.random.Generator(np.random.PCG64(seed))
    best_value = -math.inf
    best_pair = None
    for _ in range(restarts):
        alice = [_random_projective(rng, dim, n_out) for _ in range(n_in)]
        bob = [_random_projective(rng, dim, n_out) for _ in range(n_in)]
        for _ in range(iters):
            fb = np.stack([m.operators for m in bob])
            for x in range(n_in):
                rewards = np.einsum("yab,ybij->aji", dense[x], fb) / dim
                alice[x] = _greedy_response(rewards)
            value = _mes_strategy_value(dense, alice, bob, dim)
            if value > best_value:
                best_value = value
                best_pair = ([m for m in alice], [m for m in bob])
            ea = np.stack([m.operators for m in alice])
            for y in range(n_in):
                rewards = np.einsum("xab,xaij->bji", dense[:, y], ea) / dim
                bob[y] = _greedy_response(rewards)
            value = _mes_strategy_value(dense, alice, bob, dim)
            if value > best_value:
                best_value = value
                best_pair = ([m for m in alice], [m for m in bob])
    alice, bob = best_pair
    exact_value = pair(functional, quantum_prob(make_mes(dim), alice, bob))
    return SeesawResult(value=exact_value, alice=alice, bob=bob)


def uniform_dist(N: int, K: int) -> ProbDist:
    return ProbDist.uniform(N, K)


def chsh_functional() -> BellFunctional:
    """Two-input two-output win functional: weight 1/4 on a xor b = x and y."""
    table = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    if a ^ b == x * y:
                        table[x, y, a, b] = 0.25
    return BellFunctional(2, 2, table=table, meta={"kind": "chsh"})


def pr_box_dist() -> ProbDist:
    """Nonsignaling box winning the two-input xor game with certainty."""
    table = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    if a ^ b == x * y:
                        table[x, y, a, b] = 0.5
    return ProbDist(table)
