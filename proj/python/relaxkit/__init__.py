"""Dielectric relaxation models (Debye, Cole-Cole, Cole-Davidson, Havriliak-Negami,
JWS, KWW), their memory kernels, and least-squares fitting."""

from ._relaxkit import (
    ConvergenceFailure,
    DomainError,
    ModelKind,
    ModelSpec,
    ParseError,
    QuadratureFailure,
    figure_tables,
    fit_relaxation,
    fit_spectrum,
    hyper_pfq,
    levy_density,
    memory_k,
    memory_k_hat,
    memory_M,
    memory_M_hat,
    pdf,
    permittivity,
    prabhakar,
    relaxation,
    response,
    spectral,
    suite_names,
    synthesize_spectrum,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
