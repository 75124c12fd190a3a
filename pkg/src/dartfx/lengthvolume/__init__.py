# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
from .chains import ChainDistance, ChainGraph, build_chain_graph, chain_distance, face_distances
from .content import (
    ContentSearchParameters,
    CubeImage,
    FiniteMetricSpace,
    content_lower_bound,
    content_upper_bound,
    identity_image,
    pseudometric_quotient,
)
from .cover import Face, OpenBox, WeightedCover, load_cover, save_cover, validate_cover
from .derrick import CertifyParameters, LVCertificate, build_proxies, evaluate_f, verify_lv
from .exceptions import InputError, InvariantViolation, LengthVolumeError, MetricAxiomError, ParameterError
from .generators import circle, generate, grid_cover, random_boxes
from .metricdiag import check_llc, cross_check_alc, delta_path_length, doubling_estimate
from .nerve import NerveComplex, build_nerve, evaluate_phi
from .reduction import reduce_spanning, reduction_margins, spanning_demo
from .simplex import SimplexCover, simplex_diameter, verify_simplex_bounds
from .suite import run_suite

__all__ = [
    "CertifyParameters",
    "ChainDistance",
    "ChainGraph",
    "ContentSearchParameters",
    "CubeImage",
    "Face",
    "FiniteMetricSpace",
    "InputError",
    "InvariantViolation",
    "LVCertificate",
    "LengthVolumeError",
    "MetricAxiomError",
    "NerveComplex",
    "OpenBox",
    "ParameterError",
    "SimplexCover",
    "WeightedCover",
    "build_chain_graph",
    "build_nerve",
    "build_proxies",
    "chain_distance",
    "check_llc",
    "circle",
    "content_lower_bound",
    "content_upper_bound",
    "cross_check_alc",
    "delta_path_length",
    "doubling_estimate",
    "evaluate_f",
    "evaluate_phi",
    "face_distances",
    "generate",
    "grid_cover",
    "identity_image",
    "load_cover",
    "pseudometric_quotient",
    "random_boxes",
    "reduce_spanning",
    "reduction_margins",
    "run_suite",
    "save_cover",
    "simplex_diameter",
    "spanning_demo",
    "validate_cover",
    "verify_lv",
    "verify_simplex_bounds",
]
