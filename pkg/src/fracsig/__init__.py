"""Signatures of piecewise-linear paths: classical, fractional, and discrete."""

from .caputo import (
    ExpansionCoefficients,
    LinearVectorField,
    evaluate_expansion,
    expansion_coefficients,
    picard_iterates,
)
from .classical import brute_force_iterated_integral, segment_signature, signature
from .discrete import (
    HorizonContext,
    base_case,
    base_case_simplex_oracle,
    discrete_signature,
    discrete_signature_interval,
)
from .features import (
    FeatureMatrix,
    embed_digit,
    export_features,
    extract_features,
    load_features,
    load_idx,
    standardize,
)
from .fractional import (
    Alpha,
    PrefixFunctionGrid,
    fractional_prefix_grids,
    fractional_signature,
    linear_closed_form,
    reparametrization_counterexample,
)
from .path import PiecewiseLinearPath, evaluate, segment_slope, time_dilate, translate
from .specfun import Tolerance, beta, incomplete_beta, ln_gamma, mittag_leffler
from .words import TruncatedSignature, chen_product, enumerate_words, word_column_names, word_index

__all__ = [
    "Alpha",
    "ExpansionCoefficients",
    "FeatureMatrix",
    "HorizonContext",
    "LinearVectorField",
    "PiecewiseLinearPath",
    "PrefixFunctionGrid",
    "Tolerance",
    "TruncatedSignature",
    "base_case",
    "base_case_simplex_oracle",
    "beta",
    "brute_force_iterated_integral",
    "chen_product",
    "discrete_signature",
    "discrete_signature_interval",
    "embed_digit",
    "enumerate_words",
    "evaluate",
    "evaluate_expansion",
    "expansion_coefficients",
    "export_features",
    "extract_features",
    "fractional_prefix_grids",
    "fractional_signature",
    "incomplete_beta",
    "linear_closed_form",
    "ln_gamma",
    "load_features",
    "load_idx",
    "mittag_leffler",
    "picard_iterates",
    "reparametrization_counterexample",
    "segment_signature",
    "segment_slope",
    "signature",
    "standardize",
    "time_dilate",
    "translate",
    "word_column_names",
    "word_index",
]
