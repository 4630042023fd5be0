"""Pinning control of network-coupled dynamical systems.

Thin Python layer over the C++ core: load a scenario, simulate it, evaluate
the stability certificate.
"""

from ._core import (
    EstimationError,
    ParseError,
    Scenario,
    SimulationFault,
    certificate_lambda_max,
    certify,
    cli,
    estimate_theta_f,
    estimate_theta_h,
    kron_identity_norm,
    laplacian,
    load_scenario,
    min_certified_gain,
    order_parameter,
    parse_scenario,
    reproduce,
    simulate,
    spectral_norm,
)

__all__ = [
    "EstimationError",
    "ParseError",
    "Scenario",
    "SimulationFault",
    "certificate_lambda_max",
    "certify",
    "cli",
    "estimate_theta_f",
    "estimate_theta_h",
    "kron_identity_norm",
    "laplacian",
    "load_scenario",
    "min_certified_gain",
    "order_parameter",
    "parse_scenario",
    "reproduce",
    "simulate",
    "spectral_norm",
]
