"""Dual-lane instruction routing and task planning over a simulated tabletop.

Incoming instructions are classified FAST or SLOW by nearest-exemplar
retrieval; fast commands execute directly through a strict grammar, slow
ones are decomposed into monitored sub-goal plans. Everything runs
against a deterministic grid-world simulator with a benchmark harness,
dataset generator, and session HTTP service on top.
"""

from .kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
