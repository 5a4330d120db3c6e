"""Exact sheaves on finite directed graphs: homology, twisted Betti numbers,
maximum excess, Galois covers and rho-kernels over finite fields."""

from .digraph import (
    Bigraph,
    Digraph,
    GraphMorphism,
    abelian_girth,
    bouquet,
    classify_morphism,
    fibre_product,
    girth,
    invariants,
    is_isomorphic,
    random_cover,
    random_digraph,
)
from .errors import BudgetExceeded, InputError
from .excess import CompartmentalizedSubspace, excess, max_excess, max_excess_subsheaf_oracle
from .galois import (
    FiniteGroup,
    GaloisCover,
    GaloisCoordinates,
    cayley_bigraph,
    cover_from_coordinates,
    normal_extension,
)
from .linalg import DEFAULT_PRIME, ExtensionField, PrimeField, Subspace, rank
from .rho import build_kernel, shnc_verify, stallings_core, vertex_family_check
from .sheaf import Sheaf, homology, pullback, structure_sheaf
from .twisted import twisted_betti
from .formats import data_file, parse_digraph, parse_sheaf

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
