"""Optimal polynomial approximants and cyclicity in weighted Hardy spaces."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .approximants import (
    ApproximationResult,
    CyclicityVerdict,
    closed_form_one_minus_z,
    cyclicity_verdict,
    lemma_sum_check,
    optimal_approximant,
    optimal_norm_sequence,
    phi,
    product_experiment,
    rate_check,
    rotation_experiment,
)
from .gram import GramSystem, assemble, solve
from .series import CoeffSeries, evaluate, multiply, reciprocal_taylor, rotate, wiener_norm
from .space import (
    DirichletAlpha,
    SpaceModel,
    Table,
    TruncationPolicy,
    inner_product,
    kernel_value,
    norm_squared,
    shift_norm_bounds,
    weight,
)
from .zeros import (
    Annulus,
    RootSet,
    enestrom_annulus,
    factor_boundary_zeros,
    find_roots,
    pstar_region,
    residual_zero_region,
)
