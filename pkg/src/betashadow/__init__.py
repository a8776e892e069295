"""Exact and guarded-float tools for pseudo-orbits of piecewise affine interval
maps: iteration, shadowing decisions, non-shadowable pseudo-orbit
constructions and first-return renormalization of beta-transformations."""

__version__ = "0.1.0"

from .errors import ShadowingError  # noqa: E402
from .expansions import DigitString, coding, reconstruct, truncation_bound  # noqa: E402
from .maps import BetaParams, BranchSpec, PiecewiseAffineMap, beta_map  # noqa: E402
from .orbits import PseudoOrbit, find_preimage_in, iterate, validate_pseudo_orbit  # noqa: E402
from .renorm import (  # noqa: E402
    RenormalizationData,
    invariant_hull,
    is_transitive,
    lift_pseudo_orbit,
    renormalize,
    sweep,
    theorem_b_witness,
)
from .shadowing import ShadowReport, check_shadowing, grid_shadow_oracle  # noqa: E402
from .witness import WitnessTrace, case1_witness, case2_witness, theorem_a_witness  # noqa: E402

__all__ = [
    "BetaParams",
    "BranchSpec",
    "DigitString",
    "PiecewiseAffineMap",
    "PseudoOrbit",
    "RenormalizationData",
    "ShadowReport",
    "ShadowingError",
    "WitnessTrace",
    "beta_map",
    "case1_witness",
    "case2_witness",
    "check_shadowing",
    "coding",
    "find_preimage_in",
    "grid_shadow_oracle",
    "invariant_hull",
    "is_transitive",
    "iterate",
    "lift_pseudo_orbit",
    "reconstruct",
    "renormalize",
    "sweep",
    "theorem_a_witness",
    "theorem_b_witness",
    "truncation_bound",
    "validate_pseudo_orbit",
]
