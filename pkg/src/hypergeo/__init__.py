"""Exact arithmeticity certificates for symplectic hypergeometric groups."""

from .errors import HypergeoError
from .polycore import IntPoly, cyclotomic, difference_profile, parse_poly, render, root_angles
from .ratlinalg import RatMat, RatVec
from .monodromy import MonodromyData, Normalization, invariant_form, monodromy_pair
from .criterion import (
    Classification,
    Limits,
    Verdict,
    analyze_pair,
    build_triple,
    check_hypotheses,
    check_thm2,
    classify_thm1,
    extended_triple_search,
    levi_matrices,
    sl2_membership,
    triple_from_conjugator,
)
from .witness import Word, eval_word, flag_basis, parse_word, verify_relation

__all__ = [
    "Classification",
    "HypergeoError",
    "IntPoly",
    "Limits",
    "MonodromyData",
    "Normalization",
    "RatMat",
    "RatVec",
    "Verdict",
    "Word",
    "analyze_pair",
    "build_triple",
    "check_hypotheses",
    "check_thm2",
    "classify_thm1",
    "cyclotomic",
    "difference_profile",
    "eval_word",
    "extended_triple_search",
    "flag_basis",
    "invariant_form",
    "levi_matrices",
    "monodromy_pair",
    "parse_poly",
    "parse_word",
    "render",
    "root_angles",
    "sl2_membership",
    "triple_from_conjugator",
    "verify_relation",
]
