"""Exact bipartiteness and Cheeger constants of regular multigraphs from group data,
with mechanical checks of the inequalities relating them to the spectrum."""

from __future__ import annotations

from .combinatorics import (birkhoff_decompose, edge_bipartiteness, edge_cheeger, perfect_matching,
                            vertex_bipartiteness, vertex_cheeger)
from .graphs import (RegularMultigraph, cayley, cayley_sum, cycle_graph, from_action_graph, square_graph,
                     twisted_cayley, twisted_cayley_sum)
from .groups import GroupAction, GroupTable, cyclic, dihedral, direct_product, from_permutations, symmetric
from .spectral import jacobi, normalized_spectrum

__version__ = "0.1.0"
