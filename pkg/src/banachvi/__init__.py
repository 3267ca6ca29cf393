"""Solvers for monotone variational inequalities and generalized equilibrium
problems in 2-uniformly convex, uniformly smooth Banach spaces."""

from ._kernels import BACKEND
from .geometry import (SpaceSpec, dual_norm, duality_map, inverse_duality_map,
                       lyapunov_phi, norm, v_functional)
from .sets import (Ball, Box, CutSet, Halfspace, Intersection, WholeSpace,
                   contains, cut_set, generalized_project, project_onto_cut)

__version__ = "0.1.0"
