"""Period-tripling renormalization of symmetric cubic bimodal maps."""
from .bimodal_family import MapParameter, Side, eval_map, orbit
from .scaling import (
    FixedPointResult,
    ScalingTriple,
    continuum_sweep,
    feasible_domain,
    find_fixed_point,
    find_perturbed_fixed_point,
    fixed_point,
    scaling_ratios,
)
from .tower import IntervalTower, PiecewiseAffineMap, build_fs, renormalize, stationary_tower
from .extension import ExtensionGraph, JoinedMap, build_extension, join_bimodal
from .shift import SymbolSequence, build_b_alpha, default_triples, shift

__version__ = "0.1.0"

__all__ = [
    "MapParameter", "Side", "eval_map", "orbit",
    "FixedPointResult", "ScalingTriple", "continuum_sweep", "feasible_domain",
    "find_fixed_point", "find_perturbed_fixed_point", "fixed_point", "scaling_ratios",
    "IntervalTower", "PiecewiseAffineMap", "build_fs", "renormalize", "stationary_tower",
    "ExtensionGraph", "JoinedMap", "build_extension", "join_bimodal",
    "SymbolSequence", "build_b_alpha", "default_triples", "shift",
]
