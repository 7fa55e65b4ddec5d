"""Pseudomode relaxation toolkit bindings."""

from ._core import (
    LorentzianBath,
    PseudomodeMode,
    PseudomodeSpec,
    __version__,
    analytic_propagator,
    closed_form_roots,
    coherent_cutoff,
    coherent_distance,
    correlation_function,
    detect_crossing,
    distance_curve,
    evolve_propagator,
    gap_sweep,
    is_lep,
    lamb_shift,
    liouvillian_eigenvalue,
    locate_lep,
    lorentzian_to_pseudomode,
    markovian_distance,
    markovian_propagator,
    markovian_rate,
    roots,
    spectral_gap,
    steady_state_diagnostics,
)

__all__ = [
    "LorentzianBath",
    "PseudomodeMode",
    "PseudomodeSpec",
    "__version__",
    "analytic_propagator",
    "closed_form_roots",
    "coherent_cutoff",
    "coherent_distance",
    "correlation_function",
    "detect_crossing",
    "distance_curve",
    "evolve_propagator",
    "gap_sweep",
    "is_lep",
    "lamb_shift",
    "liouvillian_eigenvalue",
    "locate_lep",
    "lorentzian_to_pseudomode",
    "markovian_distance",
    "markovian_propagator",
    "markovian_rate",
    "roots",
    "spectral_gap",
    "steady_state_diagnostics",
]
