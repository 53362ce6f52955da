"""Steady states and stability of 1D viscous channel gas flow.

Library layout:

- :mod:`nschannel.thermo` — pressure laws
- :mod:`nschannel.steady` — steady-profile boundary value solver
- :mod:`nschannel.evans` — Evans function and stability index
- :mod:`nschannel.spectrum` — winding numbers, eigenvalue location, oracle
- :mod:`nschannel.evolve` — time-dependent solver and decay fitting
- :mod:`nschannel.diagnostics` — discrete norms and inequality self-tests
- :mod:`nschannel.cli` — command-line front end
"""
from .errors import (
    BlowUpError,
    InconclusiveError,
    NonconvergenceError,
    NSChannelError,
    NumericalFailureError,
    UnsupportedBoundaryError,
)
from .evans import EvansEvaluation, StabilityIndex, evans, evans_many, stability_index
from .evolve import DecayFit, GasState, NormHistory, evolve, fit_decay, perturb
from .spectrum import (
    Contour,
    SpectrumReport,
    build_contour,
    locate_roots,
    matrix_winding_oracle,
    spectral_abscissa,
    winding_number,
)
from .steady import (
    FlowParams,
    RawBoundary,
    SlopeClass,
    SteadyProfile,
    classify,
    normalize_bc,
    solve_steady,
)
from .thermo import CallableLaw, GammaLaw, PressureLaw

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "CallableLaw",
    "Contour",
    "DecayFit",
    "EvansEvaluation",
    "FlowParams",
    "GammaLaw",
    "GasState",
    "InconclusiveError",
    "NSChannelError",
    "NonconvergenceError",
    "NormHistory",
    "NumericalFailureError",
    "PressureLaw",
    "RawBoundary",
    "SlopeClass",
    "SpectrumReport",
    "StabilityIndex",
    "SteadyProfile",
    "UnsupportedBoundaryError",
    "build_contour",
    "classify",
    "evans",
    "evans_many",
    "evolve",
    "fit_decay",
    "locate_roots",
    "matrix_winding_oracle",
    "normalize_bc",
    "perturb",
    "solve_steady",
    "spectral_abscissa",
    "stability_index",
    "winding_number",
]
