"""Complex character tables from class-algebra structure constants.

Normalised characters omega(C_j) = |C_j| chi(g_j) / chi(1) are common
eigenvectors of the class multiplication matrices M_i[j, k] = c_ijk, so a
random combination of the M_i separates them. The resulting table is checked
against row orthogonality before it is returned.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .groups import ENUMERATION_BOUND, FiniteGroup, Subgroup, conjugacy_classes, greedy_generators

CERT_TOL = 1e-8
INT_TOL = 1e-6


class CharacterTableError(RuntimeError):
    pass


@dataclass(eq=False)
class CharacterTable:
    group: FiniteGroup
    classes: list
    values: np.ndarray  # (num chars, num classes), complex

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.group.order, dtype=np.int64)
        for i, c in enumerate(self.classes):
            out[list(c)] = i
        return out

    @property
    def class_reps(self) -> list:
        return [c[0] for c in self.classes]

    @property
    def class_sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.classes])

    def __len__(self):
        return len(self.values)

    @cached_property
    def degrees(self) -> list:
        return [int(round(v.real)) for v in self.values[:, 0]]

    @cached_property
    def exact(self) -> list:
        """Per character: every value is a rational integer (within CERT_TOL)."""
        v = self.values
        return [bool(np.all(np.abs(row - np.round(row.real)) < CERT_TOL)) for row in v]

    def chi(self, i: int, g: int) -> complex:
        return complex(self.values[i, self.class_of[int(g)]])

    def on_elements(self, i: int) -> np.ndarray:
        return self.values[i, self.class_of]

    @property
    def dmax(self) -> int:
        return max(self.degrees)

    def to_json(self) -> dict:
        return {
            "group_hash": self.group.digest,
            "class_reps": self.class_reps,
            "classes": [list(c) for c in self.classes],
            "char_values": [[[float(z.real), float(z.imag)] for z in row] for row in self.values],
            "degrees": self.degrees,
        }

    @classmethod
    def from_json(cls, G: FiniteGroup, data: dict) -> "CharacterTable":
        if data["group_hash"] != G.digest:
            raise CharacterTableError("cache entry belongs to a different group")
        vals = np.array([[complex(re, im) for re, im in row] for row in data["char_values"]])
        table = cls(G, [tuple(c) for c in data["classes"]], vals)
        certify(table)
        return table


def structure_constants(G: FiniteGroup, classes) -> np.ndarray:
    """c[i, j, k] = #{(x, y) in C_i x C_j : x y = z_k} for fixed z_k in C_k."""
    r = len(classes)
    class_of = np.empty(G.order, dtype=np.int64)
    for i, c in enumerate(classes):
        class_of[list(c)] = i
    c = np.zeros((r, r, r), dtype=np.int64)
    xs = np.arange(G.order)
    for k, cls in enumerate(classes):
        z = cls[0]
        ys = G.mul[G.inv[xs], z]
        np.add.at(c, (class_of[xs], class_of[ys], k), 1)
    return c


def certify(table: CharacterTable) -> None:
    G = table.group
    v = table.values
    sizes = table.class_sizes
    if len(v) != len(table.classes):
        raise CharacterTableError("number of characters differs from number of classes")
    gram = (v * sizes) @ v.conj().T / G.order
    if np.abs(gram - np.eye(len(v))).max() > CERT_TOL:
        raise CharacterTableError(f"row orthogonality fails (residual {np.abs(gram - np.eye(len(v))).max():.2e})")
    degs = v[:, 0]
    if np.abs(degs - np.round(degs.real)).max() > INT_TOL:
        raise CharacterTableError("degrees are not integers")
    if sum(d * d for d in table.degrees) != G.order:
        raise CharacterTableError("sum of squared degrees differs from |G|")


def _sort_key(row, degree):
    return (degree, tuple((-round(z.real, 6), -round(z.imag, 6)) for z in row))


_TABLE_CACHE: dict = {}


def character_table(G: FiniteGroup, seed: int = 0, bound: int = ENUMERATION_BOUND) -> CharacterTable:
    """Characters ordered by degree, then by values in decreasing order; the
    trivial character is always index 0."""
    if G.digest in _TABLE_CACHE:
        return _TABLE_CACHE[G.digest]
    if G.order > bound:
        raise CharacterTableError(f"|G|={G.order} exceeds the bound {bound}")
    classes = conjugacy_classes(G)
    sizes = np.array([len(c) for c in classes], dtype=float)
    c = structure_constants(G, classes)
    r = len(classes)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        coeffs = rng.standard_normal(r)
        M = np.tensordot(coeffs, c.astype(float), axes=(0, 0))
        evals, evecs = np.linalg.eig(M)
        gaps = np.abs(evals[:, None] - evals[None, :]) + np.eye(r) * 1e9
        if r == 1 or gaps.min() > 1e-6:
            break
    else:
        raise CharacterTableError("could not separate the central characters")
    omega = evecs / evecs[0]
    norm = (np.abs(omega) ** 2 / sizes[:, None]).sum(axis=0)
    deg = np.sqrt(G.order / norm)
    chars = (deg * omega / sizes[:, None]).T
    degrees = np.round(chars[:, 0].real).astype(int)
    # snap values within CERT_TOL of integers to kill eig noise
    snapped = np.where(np.abs(chars - np.round(chars.real)) < CERT_TOL, np.round(chars.real), chars)
    order = sorted(range(r), key=lambda i: _sort_key(snapped[i], degrees[i]))
    table = CharacterTable(G, classes, snapped[order])
    certify(table)
    _TABLE_CACHE[G.digest] = table
    return table


def char_kernel(table: CharacterTable, i: int) -> Subgroup:
    G = table.group
    vals = table.on_elements(i)
    mask = np.abs(vals - vals[0]) < CERT_TOL
    elements = tuple(int(g) for g in np.nonzero(mask)[0])
    return Subgroup(G, elements, greedy_generators(G, elements))


def lambda_H(table: CharacterTable, N: Subgroup) -> list[int]:
    """Indices of characters whose kernel contains the normal subgroup N;
    checks that their squared degrees add up to [G:N]."""
    if not N.is_normal:
        raise ValueError(f"{N} is not normal in {table.group.label}")
    els = list(N.elements)
    out = []
    for i in range(len(table)):
        vals = table.on_elements(i)[els]
        if np.all(np.abs(vals - table.degrees[i]) < CERT_TOL):
            out.append(i)
    total = sum(table.degrees[i] ** 2 for i in out)
    if total != N.index:
        raise CharacterTableError(f"squared degrees over Lambda sum to {total}, expected [G:N]={N.index}")
    return out


def verify_eq2(table: CharacterTable, normals) -> list[dict]:
    rows = []
    for N in normals:
        lam = lambda_H(table, N)
        rows.append({"subgroup": N.describe(), "order": N.order, "index": N.index,
                     "lambda": lam, "sum": sum(table.degrees[i] ** 2 for i in lam)})
    return rows


def save_table(table: CharacterTable, cache_dir) -> Path:
    path = Path(cache_dir) / f"chartable-{table.group.digest}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(table.to_json()))
    return path


def load_table(G: FiniteGroup, cache_dir) -> CharacterTable | None:
    path = Path(cache_dir) / f"chartable-{G.digest}.json"
    if not path.exists():
        return None
    return CharacterTable.from_json(G, json.loads(path.read_text()))


def format_table(table: CharacterTable) -> str:
    G = table.group
    head = ["class"] + [G.name(r) for r in table.class_reps]
    sizes = ["size"] + [str(len(c)) for c in table.classes]
    rows = [head, sizes]
    for i, row in enumerate(table.values):
        cells = [f"chi{i}"]
        for z in row:
            if abs(z.imag) < CERT_TOL:
                cells.append(f"{z.real:.0f}" if abs(z.real - round(z.real)) < CERT_TOL else f"{z.real:.4f}")
            else:
                cells.append(f"{z.real:.3f}{z.imag:+.3f}i")
        rows.append(cells)
    widths = [max(len(r[c]) for r in rows) for c in range(len(head))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)


def dmax_complex(G: FiniteGroup) -> int:
    return character_table(G).dmax


def log2ceil(n: int) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0
