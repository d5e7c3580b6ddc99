"""JSON caches for groups, character tables and decompositions.

Every entry is keyed by the group digest (a hash of the multiplication
table), so a stale file for a different group is never picked up. Loaded
entries are re-certified before use.
"""
from __future__ import annotations

import json
from pathlib import Path

from .characters import CharacterTable, character_table, load_table, save_table
from .complexrep import UnitaryIrrepSet, complex_irreps
from .fields import FqField
from .groups import FiniteGroup
from .modrep import DecompositionError, ModularIrrepSet, decompose_regular


def _write(path: Path, data: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, sort_keys=True))
    return path


def group_path(G: FiniteGroup, cache_dir) -> Path:
    return Path(cache_dir) / f"group-{G.digest}.json"


def save_group(G: FiniteGroup, cache_dir) -> Path:
    return _write(group_path(G, cache_dir), G.to_json())


def load_group(path) -> FiniteGroup:
    G = FiniteGroup.from_json(json.loads(Path(path).read_text()))
    G.check()
    return G


def cached_table(G: FiniteGroup, cache_dir=None) -> CharacterTable:
    if cache_dir is None:
        return character_table(G)
    table = load_table(G, cache_dir)
    if table is None:
        table = character_table(G)
        save_table(table, cache_dir)
    return table


def cached_modular(G: FiniteGroup, F: FqField, cache_dir=None) -> ModularIrrepSet:
    if cache_dir is None:
        return decompose_regular(G, F)
    path = Path(cache_dir) / f"modrep-{G.digest}-{F.p}-{F.k}.json"
    if path.exists():
        irreps = ModularIrrepSet.from_json(G, json.loads(path.read_text()))
        if tuple(irreps.field.modulus) != tuple(F.modulus):
            raise DecompositionError("cached decomposition uses a different modulus")
        if not all(r.check_homomorphism() for r in irreps.irreps):
            raise DecompositionError("cached decomposition fails the homomorphism check")
        return irreps
    irreps = decompose_regular(G, F)
    _write(path, irreps.to_json())
    return irreps


def cached_complex(G: FiniteGroup, cache_dir=None) -> UnitaryIrrepSet:
    if cache_dir is None:
        return complex_irreps(G)
    path = Path(cache_dir) / f"complexrep-{G.digest}.json"
    if path.exists():
        return UnitaryIrrepSet.from_json(G, json.loads(path.read_text()))
    irreps = complex_irreps(G)
    _write(path, irreps.to_json())
    return irreps
