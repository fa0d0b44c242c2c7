"""Exact-arithmetic polynomial semigroup dynamics on the rational plane."""

__version__ = "0.1.0"

from .poly import (  # noqa: E402
    DepressedForm,
    LinearMap,
    MonomialEquivalence,
    Polynomial,
    compose,
    depress,
    is_monomial_equivalent,
    linear_inverse,
)
from .orbits import (  # noqa: E402
    Line,
    Order,
    OrbitRecord,
    PolyPair,
    SemigroupSystem,
    SequenceSpec,
    enumerate_semigroup_orbit,
    enumerate_sequence_orbit,
    evaluate_word,
    extract_coherent_suffix,
    intersect_with_line,
)

__all__ = [
    "DepressedForm",
    "LinearMap",
    "MonomialEquivalence",
    "Polynomial",
    "compose",
    "depress",
    "is_monomial_equivalent",
    "linear_inverse",
    "Line",
    "Order",
    "OrbitRecord",
    "PolyPair",
    "SemigroupSystem",
    "SequenceSpec",
    "enumerate_semigroup_orbit",
    "enumerate_sequence_orbit",
    "evaluate_word",
    "extract_coherent_suffix",
    "intersect_with_line",
]
