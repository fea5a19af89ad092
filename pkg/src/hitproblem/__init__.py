"""Exact computations for the hit problem over F2: admissible monomial
bases of QP_k = P_k / A^+ P_k, weight-graded pieces and their p-map kernels."""
from .hit_engine import (
    QuotientReport, ResourceRefusal, admissible_basis, check_admissible, check_hit,
    check_strictly_inadmissible, configure, quotient_by_weight, sf_tilde, split_B0_Bplus,
)
from .monomial_core import Monomial, WeightVector, minimal_spike, mu, weight_vector
from .poly_f2 import PolynomialF2

__version__ = "0.1.0"

__all__ = [
    "Monomial", "PolynomialF2", "QuotientReport", "ResourceRefusal", "WeightVector",
    "admissible_basis", "check_admissible", "check_hit", "check_strictly_inadmissible",
    "configure", "minimal_spike", "mu", "quotient_by_weight", "sf_tilde", "split_B0_Bplus",
    "weight_vector",
]
