"""Probably certifiably correct minimum bisection for the two-community SBM."""
from .certifier import CertificateReport, CertifyConfig, certify
from .linops import SignedAdjacency, b_matvec, build_dual_diagonal, m_matvec, quad_form
from .sbm import Instance, SbmParams, make_params, sample_instance
from .solver import SolverConfig, solve

__all__ = [
    "CertificateReport", "CertifyConfig", "certify",
    "SignedAdjacency", "b_matvec", "build_dual_diagonal", "m_matvec", "quad_form",
    "Instance", "SbmParams", "make_params", "sample_instance",
    "SolverConfig", "solve",
]
