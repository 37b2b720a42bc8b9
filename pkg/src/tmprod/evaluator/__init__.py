"""Evaluation of weighted single and double infinite products."""

from .blocks import direct_log_sum, weighted_log_sum
from .core import (CERTIFIED, HEURISTIC, DivergentSpec, EvalOptions, EvalResult, InvalidParameter,
                   PrecisionNotAchieved, ProductSpec, eval_product, log_product, pairing_tail_bound)
from .double import (COLLAPSED, DIRECT, DoubleProductSpec, MissingCollapsedForm, NotEpsilonWeight,
                     eval_double, lemma_rhs, lemma_term, split_even_odd)
from .euler_maclaurin import NotAbsolutelySummable, euler_maclaurin_sum

__all__ = [
    "COLLAPSED", "DIRECT", "DoubleProductSpec", "MissingCollapsedForm", "NotEpsilonWeight",
    "eval_double", "lemma_rhs", "lemma_term", "split_even_odd",
    "CERTIFIED", "HEURISTIC", "DivergentSpec", "EvalOptions", "EvalResult", "InvalidParameter",
    "NotAbsolutelySummable", "PrecisionNotAchieved", "ProductSpec", "direct_log_sum",
    "euler_maclaurin_sum", "eval_product", "log_product", "pairing_tail_bound", "weighted_log_sum",
]
