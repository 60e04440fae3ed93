"""Fuzzy-number sequence spaces built from generalized weighted means and moduli.

Submodules:

* :mod:`fuzzyseq.fuzzy`: piecewise-linear fuzzy numbers, arithmetic, metric d
* :mod:`fuzzyseq.weighted_mean`: the factorable-matrix transform t_k
* :mod:`fuzzyseq.modulus`: modulus functions and their axioms
* :mod:`fuzzyseq.spaces`: metrics D, D_p and finite-horizon membership verdicts
* :mod:`fuzzyseq.dsl`: expression language for schemes, sequences and moduli
* :mod:`fuzzyseq.oracle`: exact-arithmetic recomputation of transforms
* :mod:`fuzzyseq.harness`: the case catalog and its reports
* :mod:`fuzzyseq.cli`: the ``fuzzyseq`` command
"""

from .fuzzy import (
    ZERO,
    FuzzyArray,
    FuzzyNumber,
    InvalidFuzzyNumber,
    Order,
    abs_fuzzy,
    leq,
    make_crisp,
    make_triangular,
    metric_d,
    validate,
)
from .modulus import ID, RAT, ModulusFn, Power, beta, check_iterate_growth, validate_modulus
from .spaces import Space, classify, diagnose, metric_D, metric_Dp
from .weighted_mean import WeightScheme, cesaro, transform, transform_pair

__all__ = [
    "ZERO",
    "FuzzyArray",
    "FuzzyNumber",
    "InvalidFuzzyNumber",
    "Order",
    "abs_fuzzy",
    "leq",
    "make_crisp",
    "make_triangular",
    "metric_d",
    "validate",
    "ID",
    "RAT",
    "ModulusFn",
    "Power",
    "beta",
    "check_iterate_growth",
    "validate_modulus",
    "Space",
    "classify",
    "diagnose",
    "metric_D",
    "metric_Dp",
    "WeightScheme",
    "cesaro",
    "transform",
    "transform_pair",
]
