"""Critical dimer measurements on positroid cells.

Exact and numeric boundary measurements of weighted planar bipartite graphs
in a disk, the combinatorics that governs their critical weight choices
(bounded affine permutations, strand diagrams), explicit curve-based bases,
duality/shift symmetries, and the electrical-network specialization.
"""

from critdimer.laurent import Bracket, LaurentPoly, bracket, bracket_eval, exact_divide
from critdimer.permutations import BoundedAffinePermutation, GrassmannNecklace, Pairing

__all__ = [
    "Bracket",
    "LaurentPoly",
    "bracket",
    "bracket_eval",
    "exact_divide",
    "BoundedAffinePermutation",
    "GrassmannNecklace",
    "Pairing",
]
