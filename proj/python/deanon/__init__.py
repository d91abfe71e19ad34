"""Seedless network de-anonymization with overlapping communities."""

from ._core import (
    DeanonError,
    Instance,
    accuracy,
    approx_ratio,
    brute_mmse,
    brute_wemp,
    cbda_solve,
    edge_probability,
    f0,
    f0_perm,
    f_xi,
    ga_solve,
    generate,
    grad_f_xi,
    load_bundle,
    make_instance,
    nme,
    solve_lap,
    weight_of,
)

__all__ = [
    "DeanonError",
    "Instance",
    "accuracy",
    "approx_ratio",
    "brute_mmse",
    "brute_wemp",
    "cbda_solve",
    "edge_probability",
    "f0",
    "f0_perm",
    "f_xi",
    "ga_solve",
    "generate",
    "grad_f_xi",
    "load_bundle",
    "make_instance",
    "nme",
    "solve_lap",
    "weight_of",
]
