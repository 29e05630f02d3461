"""Discrete Lipschitz truncation toolkit.

Grid fields, maximal operators, the asymmetric McShane extension, the three
truncation pipelines, analytic test-function generators, and verifiers for
the quantitative inequalities and exponent arithmetic they feed.
"""

__version__ = "0.1.0"

from .field import (
    FieldFormatError,
    GridSpec,
    OrliczWeight,
    ScalarField,
    VectorField,
    gradient,
    log_integral,
    negative_part,
    orlicz_integral,
    positive_part,
    read_field,
    superlevel_measure,
    write_field,
)
from .maximal import (
    RadiusSet,
    aniso_maximal,
    composed_maximal,
    directional_maximal,
    hl_maximal,
    lp_norm_ratio,
    weak_type_constants,
)
from .asymlip import (
    AsymMetricParams,
    ExtensionResult,
    SampleSet,
    asym_dist,
    asym_dist_scalar,
    asym_lip_modulus,
    mcshane_extend,
    mcshane_extend_fast,
    modulus_by_bisection,
    slope_steps,
)
from .truncate import (
    ConvexPolytope,
    TruncationParams,
    TruncationResult,
    asym_truncate,
    asym_truncate_zero_boundary,
    changed_set_bound,
    l1_gradient_magnitude,
    lipschitz_truncate,
    part_box_maxima,
)
from .generators import (
    PHarmonicAnalytics,
    RadialMapAnalytics,
    SawtoothAnalytics,
    gen_p_harmonic_radial,
    gen_radial_map,
    gen_sawtooth,
)
from .functionals import (
    QuasiconcaveFunctional,
    F_eval,
    F_split,
    gradient_matrix,
    null_lagrangian_check,
)
from .elliptic import (
    EllipticOperatorSpec,
    a1_profile,
    elliptic_eval,
    good_bad_split,
    weak_form_pairing,
)
from .exponents import (
    ExponentState,
    exponent_alpha,
    exponent_iterate,
    improvement_step,
    q3_feasibility,
)
from .inequalities import (
    orlicz_conclusion_check,
    verify_consequently,
    verify_intermediary,
)

__all__ = [
    "__version__",
    "FieldFormatError",
    "GridSpec",
    "OrliczWeight",
    "ScalarField",
    "VectorField",
    "gradient",
    "log_integral",
    "negative_part",
    "orlicz_integral",
    "positive_part",
    "read_field",
    "superlevel_measure",
    "write_field",
    "RadiusSet",
    "aniso_maximal",
    "composed_maximal",
    "directional_maximal",
    "hl_maximal",
    "lp_norm_ratio",
    "weak_type_constants",
    "AsymMetricParams",
    "ExtensionResult",
    "SampleSet",
    "asym_dist",
    "asym_dist_scalar",
    "asym_lip_modulus",
    "mcshane_extend",
    "mcshane_extend_fast",
    "modulus_by_bisection",
    "slope_steps",
    "ConvexPolytope",
    "TruncationParams",
    "TruncationResult",
    "asym_truncate",
    "asym_truncate_zero_boundary",
    "changed_set_bound",
    "l1_gradient_magnitude",
    "lipschitz_truncate",
    "part_box_maxima",
    "PHarmonicAnalytics",
    "RadialMapAnalytics",
    "SawtoothAnalytics",
    "gen_p_harmonic_radial",
    "gen_radial_map",
    "gen_sawtooth",
    "QuasiconcaveFunctional",
    "F_eval",
    "F_split",
    "gradient_matrix",
    "null_lagrangian_check",
    "EllipticOperatorSpec",
    "a1_profile",
    "elliptic_eval",
    "good_bad_split",
    "weak_form_pairing",
    "ExponentState",
    "exponent_alpha",
    "exponent_iterate",
    "improvement_step",
    "q3_feasibility",
    "orlicz_conclusion_check",
    "verify_consequently",
    "verify_intermediary",
]
