"""Numerical tools for CR inversions, Kelvin transforms and moving spheres on
the Heisenberg group H^n."""

from __future__ import annotations

from .crmaps import (
    CRInv,
    CRMap,
    Dilate,
    GCRInversion,
    Iota,
    Rotate,
    Translate,
    build_m,
    cr_inversion,
    fixed_point_center,
    gcr_apply,
    iota,
    jacobian_det_abs,
    radius_from_decay,
)
from .errors import (
    BracketError,
    ConfigurationError,
    ConvergenceError,
    DimensionError,
    DomainError,
    EqualityError,
    FieldSpecError,
    HeisError,
    MonotonicityError,
    NoLimitError,
    ParseError,
    SingularityError,
)
from .fields import (
    BubbleParams,
    FBetaParams,
    ScalarField,
    alpha_beta_of,
    blackbox,
    bubble,
    centered_bubble,
    constant,
    fbeta,
    field_to_spec,
    kelvin,
    kelvin_field,
    lambda_of_xi,
    parse_field_spec,
)
from .hgroup import (
    HPoint,
    Unitary,
    ball_volume,
    dilate,
    dist,
    group_inv,
    group_mul,
    homogeneous_dimension,
    koranyi_norm,
    rotate,
    sample_ball,
)
from .movesphere import (
    SphereConfig,
    SphereReport,
    estimate_lambda_underline,
    moving_spheres_demo,
    terracini_quantities,
    violation_measure,
)
from .subcalc import (
    FDConfig,
    calc_lemma_derivative_checks,
    conformal_covariance_check,
    exact_bubble_derivatives,
    horizontal_gradient,
    pde_residual_ratio,
    sub_laplacian,
    subcritical_residual_check,
)
from .verify import CheckResult, CheckSpec, comparison_falsifier, default_suite, registered_checks, run_suite

__version__ = "0.1.0"
