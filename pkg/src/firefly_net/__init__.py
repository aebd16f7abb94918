"""Finite-state pulse-coupled oscillators ("firefly networks") on graphs."""

from .dynamics import Configuration, Orbit, blinking_state, compute_orbit, step
from .graph import Graph, build_family
from .statespace import StateSpace

__all__ = [
    "Configuration",
    "Graph",
    "Orbit",
    "StateSpace",
    "blinking_state",
    "build_family",
    "compute_orbit",
    "step",
]
