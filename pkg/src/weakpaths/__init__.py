"""Particle-path (weak diffeomorphism) formulations of 1D conservation laws.

Each physical system is solved two ways: directly in Eulerian variables and
through a conservative system for a particle path ``gamma`` with
``gamma_x = eta``. Reconstructing the Eulerian fields by pulling the path
solution back through ``gamma^{-1}`` gives a numerical test of the
equivalence of the two frames.
"""

from weakpaths.core import (
    CellField, ConvexExtension, DegenerateDiffeomorphismError, Grid1D,
    InadmissibleStateError, SpaceTimeField, SystemSpec, make_grid, sample_ic,
    total_variation)
from weakpaths.diffeo import (
    DiffeoPath, invert, pullback, reconstruct_gamma, solve_with_path,
    verify_change_of_variables)
from weakpaths.solver import SchemeConfig, SolveError, solve

__all__ = [
    "CellField", "ConvexExtension", "DegenerateDiffeomorphismError",
    "DiffeoPath", "Grid1D", "InadmissibleStateError", "SchemeConfig",
    "SolveError", "SpaceTimeField", "SystemSpec", "invert", "make_grid",
    "pullback", "reconstruct_gamma", "sample_ic", "solve", "solve_with_path",
    "total_variation", "verify_change_of_variables",
]
