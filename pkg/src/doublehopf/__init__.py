"""Toolkit for the weakly resonant double Hopf bifurcation of invariant tori."""

from .bifurcation import droplet_sample, fold_hopf_points, hopf_curves
from .dynamics import integrate
from .equilibria import basis_equilibria, classify_region
from .invariants import make_resonance
from .model import ReducedState, ScaledParameters, example_coefficients, load_coefficients

__version__ = "0.1.0"

__all__ = [
    "ReducedState",
    "ScaledParameters",
    "basis_equilibria",
    "classify_region",
    "droplet_sample",
    "example_coefficients",
    "fold_hopf_points",
    "hopf_curves",
    "integrate",
    "load_coefficients",
    "make_resonance",
]
