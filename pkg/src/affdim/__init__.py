"""Certified dimension computations for systems of contracting linear maps.

Computes two-sided brackets for the affinity dimension and the generalised
q-dimension formula of self-affine measures, lower spectral radius brackets,
and empirical q-dimension estimates from chaos-game sampling, plus the
packaged experiment showing the q-dimension formula jumping at explicit
matrix pairs while the perturbation distance goes to zero.
"""

from .backends import backend_name, have_compiled
from .engine import (
    BudgetExceededError,
    FoldSpec,
    MinNormResult,
    ResistanceReport,
    fold_words,
    min_norm,
    resistance_check,
)
from .linalg import diagonal, log_phi, mat_mul, operator_norm, phi, rotation, singular_values
from .measure import AffineIFS, SampleSet, chaos_game, dq_estimate, mesh_moments
from .pressure import (
    DimensionBracket,
    PressureBracket,
    R_n,
    R_upper,
    S_lower,
    S_n,
    affinity_dimension,
    closed_form_commuting_rq,
    hypothesis_check,
    q_dimension,
)
from .spectral import LsrBracket, degenerate_perturbation, growth_witness, lsr_bracket
from .systems import MatrixSystem, ProbabilityVector, conformal_system, diagonal_pair, rotated_pair

__version__ = "0.1.0"

__all__ = [
    "AffineIFS",
    "BudgetExceededError",
    "DimensionBracket",
    "FoldSpec",
    "LsrBracket",
    "MatrixSystem",
    "MinNormResult",
    "PressureBracket",
    "ProbabilityVector",
    "R_n",
    "R_upper",
    "ResistanceReport",
    "S_lower",
    "S_n",
    "SampleSet",
    "affinity_dimension",
    "backend_name",
    "chaos_game",
    "closed_form_commuting_rq",
    "conformal_system",
    "degenerate_perturbation",
    "diagonal",
    "diagonal_pair",
    "dq_estimate",
    "fold_words",
    "growth_witness",
    "have_compiled",
    "hypothesis_check",
    "log_phi",
    "lsr_bracket",
    "mat_mul",
    "mesh_moments",
    "min_norm",
    "operator_norm",
    "phi",
    "q_dimension",
    "resistance_check",
    "rotated_pair",
    "rotation",
    "singular_values",
]
