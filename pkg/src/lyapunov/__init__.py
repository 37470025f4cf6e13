from src.lyapunov.functional import LyapunovConfig, eval_H, grad_H, hess_H, make_config
from src.lyapunov.condition import (
    Certificate,
    ConditionMatrix,
    ConditionReport,
    KRecursion,
    build_condition_matrix,
    check_condition,
    coupling_ratios,
    exponent_tuples,
    format_certificate,
    h_from_minors,
    k_recursion,
    make_certificate,
    normalized_condition_matrix,
    factored_seed_forms,
    theta_search,
    write_certificate,
)

__all__ = [
    "LyapunovConfig",
    "eval_H",
    "grad_H",
    "hess_H",
    "make_config",
    "Certificate",
    "ConditionMatrix",
    "ConditionReport",
    "KRecursion",
    "build_condition_matrix",
    "check_condition",
    "coupling_ratios",
    "exponent_tuples",
    "format_certificate",
    "h_from_minors",
    "k_recursion",
    "make_certificate",
    "normalized_condition_matrix",
    "factored_seed_forms",
    "theta_search",
    "write_certificate",
]
