"""Generalized p-fusion frames over R^n with l^p norms.

Thin layer over the C++ library: frames, bound estimation, classification,
Riesz and duality checks, constructions and the seeded generator.
"""

from ._core import (
    RNG_ALGORITHM,
    ContractError,
    DimensionError,
    DomainError,
    Frame,
    ParseError,
    Projection,
    RankError,
    UnsupportedError,
    ValidationError,
    check_riesz,
    classify,
    direct_sum,
    dual_exponent,
    duality_map,
    estimate_bounds,
    generate,
    is_gf_complete,
    measure_perturbation_radius,
    p_norm,
    perturbation_condition_holds,
    predicted_perturbed_bounds,
    rescale_to_parseval,
    run_check,
    run_riesz,
    simple_perturbation_bounds,
    tensor_product,
    verify_duality,
)

__all__ = [name for name in dir() if not name.startswith("_")]
