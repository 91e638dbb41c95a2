"""Coset nonlocal games at small block length: construction, classical and
quantum values, copy-activation bound chains, and local-polytope LP tools."""

from .errors import GuardError, KvBellError, NumericalError, ValidationError
from .kvgame import (
    BOUND_CONSTANTS,
    BellFunctional,
    BoundConstants,
    CosetTable,
    Measurement,
    RefereeSamples,
    asymptotic_eta,
    build_hadamard_subgroup,
    classical_upper_bound_asymptotic,
    entangled_lower_bound_asymptotic,
    kv_classical_upper_bound,
    kv_functional,
    kv_game_to_json,
    kv_measurements,
    kv_question_marginal,
    noise_string_probs,
    noise_weights,
    referee_sample,
)
from .localpolytope import (
    LinearProgram,
    LocalContentResult,
    LocalWitness,
    LPResult,
    is_local,
    local_content,
    lv_from_pi,
    solve_lp,
    vertex_matrix,
)
from .states import (
    DensityMatrix,
    StateExpansion,
    expand_tensor_power,
    interleave_to_blocked,
    locality_threshold,
    make_isotropic,
    make_mes,
    mes_vector,
    realize_term,
    tensor_power_blocked,
    threshold_copy_gain,
)
from .values import (
    ExpansionValue,
    ProbDist,
    SeesawResult,
    ViolationReport,
    almost_activation_exponent,
    almost_activation_lower_factor,
    almost_activation_mix_weight,
    almost_activation_upper_formula,
    assignment_table,
    chsh_functional,
    classical_value_bruteforce,
    classical_value_exact,
    classical_value_heuristic,
    kv_mes_value_direct,
    kv_value_for_expansion,
    pair,
    pr_box_dist,
    quantum_prob,
    quantum_value_kv_closed_form,
    seesaw_lower_bound,
    superactivation_crossing,
    superactivation_monotone_from,
    superactivation_ratio_bound,
    uniform_dist,
)

__version__ = "0.1.0"

__all__ = [
    "BOUND_CONSTANTS",
    "BellFunctional",
    "BoundConstants",
    "CosetTable",
    "DensityMatrix",
    "ExpansionValue",
    "GuardError",
    "KvBellError",
    "LPResult",
    "LinearProgram",
    "LocalContentResult",
    "LocalWitness",
    "Measurement",
    "NumericalError",
    "ProbDist",
    "RefereeSamples",
    "SeesawResult",
    "StateExpansion",
    "ValidationError",
    "ViolationReport",
    "almost_activation_exponent",
    "almost_activation_lower_factor",
    "almost_activation_mix_weight",
    "almost_activation_upper_formula",
    "assignment_table",
    "asymptotic_eta",
    "build_hadamard_subgroup",
    "chsh_functional",
    "classical_upper_bound_asymptotic",
    "classical_value_bruteforce",
    "classical_value_exact",
    "classical_value_heuristic",
    "entangled_lower_bound_asymptotic",
    "expand_tensor_power",
    "interleave_to_blocked",
    "is_local",
    "kv_classical_upper_bound",
    "kv_functional",
    "kv_game_to_json",
    "kv_measurements",
    "kv_mes_value_direct",
    "kv_question_marginal",
    "kv_value_for_expansion",
    "local_content",
    "locality_threshold",
    "lv_from_pi",
    "make_isotropic",
    "make_mes",
    "mes_vector",
    "noise_string_probs",
    "noise_weights",
    "pair",
    "pr_box_dist",
    "quantum_prob",
    "quantum_value_kv_closed_form",
    "realize_term",
    "referee_sample",
    "seesaw_lower_bound",
    "solve_lp",
    "superactivation_crossing",
    "superactivation_monotone_from",
    "superactivation_ratio_bound",
    "tensor_power_blocked",
    "threshold_copy_gain",
    "uniform_dist",
    "vertex_matrix",
    "__version__",
]
