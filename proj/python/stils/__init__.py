from ._stils import (
    ExprEvalError,
    ExprParseError,
    NoConvergence,
    backtrack,
    discrete_constant,
    divergence_a,
    eval_expr,
    free_vars,
    lift,
    solve_transport,
    vlasov_ratio,
)

__all__ = [
    "ExprEvalError",
    "ExprParseError",
    "NoConvergence",
    "backtrack",
    "discrete_constant",
    "divergence_a",
    "eval_expr",
    "free_vars",
    "lift",
    "solve_transport",
    "vlasov_ratio",
]
