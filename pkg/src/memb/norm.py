"""The normal-closure protocol: Alice names a character from Lambda of the
normal closure of H, Bob checks whether his element lies in its kernel.

For normal H this decides membership in H itself; for arbitrary H it decides
membership in the normal closure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .characters import CERT_TOL, CharacterTable, CharacterTableError, lambda_H
from .groups import FiniteGroup, Subgroup, normal_closure


@dataclass(frozen=True)
class NormMessage:
    char_index: int
    bit_cost: int
    bit_bound: int


def norm_bits(table: CharacterTable) -> int:
    n = len(table)
    return math.ceil(math.log2(n)) if n > 1 else 0


def norm_bit_bound(G: FiniteGroup) -> int:
    return math.ceil(math.log2(G.order)) if G.order > 1 else 0


def norm_weights(table: CharacterTable, H: Subgroup):
    """(Lambda indices, integer weights chi(1)^2 |N|) with N the normal closure;
    the weights sum to |G|."""
    N = normal_closure(table.group, H)
    lam = lambda_H(table, N)
    w = [table.degrees[i] ** 2 * N.order for i in lam]
    if sum(w) != table.group.order:
        raise CharacterTableError("character weights do not sum to |G|")
    return lam, w


def alice_norm(table: CharacterTable, H: Subgroup, rng) -> NormMessage:
    lam, w = norm_weights(table, H)
    cum = np.cumsum(w)
    j = int(np.searchsorted(cum, rng.integers(0, int(cum[-1])), side="right"))
    return NormMessage(lam[j], norm_bits(table), norm_bit_bound(table.group))


def bob_norm(table: CharacterTable, y: int, char_index: int) -> int:
    return int(abs(table.chi(char_index, y) - table.degrees[char_index]) < CERT_TOL)


def run_norm(table: CharacterTable, H: Subgroup, y: int, rng):
    msg = alice_norm(table, H, rng)
    return bob_norm(table, y, msg.char_index), msg.bit_cost


def norm_exact_error(table: CharacterTable, H: Subgroup, y: int) -> Fraction:
    """Acceptance probability on y outside the normal closure N, which is
    |N| / |K| for K the normal closure of N and y; zero when y is in N."""
    G = table.group
    N = normal_closure(G, H)
    if y in N:
        return Fraction(0)
    K = normal_closure(G, tuple(N.generators) + (int(y),))
    lam_k = lambda_H(table, K)
    via_chars = Fraction(N.order, G.order) * sum(table.degrees[i] ** 2 for i in lam_k)
    direct = Fraction(N.order, K.order)
    if via_chars != direct:
        raise CharacterTableError("error formula disagrees with |N|/|K|")
    return direct


def norm_completeness(table: CharacterTable, H: Subgroup, y: int) -> bool:
    """Deterministic check: every character in Lambda passes Bob's test on y."""
    lam, _ = norm_weights(table, H)
    return all(bob_norm(table, y, i) for i in lam)


def norm_batch(table: CharacterTable, H: Subgroup, y: int, rng, trials: int):
    """Simulate ``trials`` runs; returns (per-trial decisions, per-trial bits)."""
    lam, w = norm_weights(table, H)
    cum = np.cumsum(w)
    picks = np.searchsorted(cum, rng.integers(0, int(cum[-1]), size=trials), side="right")
    passes = np.array([bob_norm(table, y, i) for i in lam])
    return passes[picks].astype(bool), np.full(trials, norm_bits(table), dtype=np.int64)
