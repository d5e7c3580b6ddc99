"""One-way communication protocols for subgroup membership in finite groups."""
from .kernels import BACKEND
from .groups import FiniteGroup, Subgroup, build_group, parse_subgroup
from .characters import character_table
from .modrep import decompose_regular
from .complexrep import complex_irreps
from .harness import evaluate, make_protocol

__version__ = "0.1.0"

__all__ = ["BACKEND", "FiniteGroup", "Subgroup", "build_group", "parse_subgroup", "character_table",
           "decompose_regular", "complex_irreps", "evaluate", "make_protocol", "__version__"]
