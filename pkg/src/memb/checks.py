"""Sweeps behind ``memb verify``: the fixed-space and character identities,
the modular degree inequality and the sphere-codec guarantee."""
from __future__ import annotations

import time

import numpy as np

from .cache import cached_modular, cached_table
from .characters import dmax_complex
from .complexrep import EpsilonCodec, epsilon_for_group
from .groups import FiniteGroup, enumerate_subgroups, normal_subgroups
from .modrep import DecompositionError, dmax_modular, modrep_field, verify_eq1


def fixed_space_identity(G: FiniteGroup, primes, cache_dir=None) -> dict:
    """sum_rho mult(rho) dim I_H(rho) = [G:H] for every subgroup H, over the
    splitting field of each prime."""
    start = time.perf_counter()
    subs = enumerate_subgroups(G)
    rows = []
    for p in primes:
        irreps = cached_modular(G, modrep_field(G, p), cache_dir)
        for H in subs:
            r = verify_eq1(irreps, H)
            rows.append({"p": p, "q": irreps.field.q, "subgroup": r["subgroup"], "index": r["index"],
                         "sum": r["sum"]})
    ok = all(r["sum"] == r["index"] for r in rows)
    return {"check": "eq1", "group": G.label, "primes": list(primes), "subgroups": len(subs),
            "rows": rows, "holds": ok, "seconds": time.perf_counter() - start}


def character_identity(G: FiniteGroup, cache_dir=None) -> dict:
    """sum over Lambda_N of chi(1)^2 = [G:N] for every normal N, and
    sum chi(1)^2 = |G|."""
    table = cached_table(G, cache_dir)
    rows = []
    for N in normal_subgroups(G):
        lam = [i for i in range(len(table))
               if np.all(np.abs(table.on_elements(i)[list(N.elements)] - table.degrees[i]) < 1e-8)]
        rows.append({"subgroup": N.describe(), "index": N.index,
                     "sum": sum(table.degrees[i] ** 2 for i in lam)})
    total = sum(d * d for d in table.degrees)
    ok = total == G.order and all(r["sum"] == r["index"] for r in rows)
    return {"check": "eq2", "group": G.label, "degree_square_sum": total, "order": G.order,
            "rows": rows, "holds": ok}


def modular_degree_inequality(G: FiniteGroup, primes) -> dict:
    """d_max over F_p against d_max over C times ord_m(p), for p not dividing |G|."""
    d0 = dmax_complex(G)
    rows = []
    for p in primes:
        if G.order % p == 0:
            rows.append({"p": p, "skipped": "p divides |G|"})
            continue
        try:
            rows.append(dmax_modular(G, p, d0))
        except DecompositionError as exc:
            rows.append({"p": p, "holds": False, "error": str(exc)})
    ok = all(r.get("holds", True) for r in rows)
    return {"check": "appendix-ineq", "group": G.label, "dmax_0": d0, "rows": rows, "holds": ok}


def net_check(dims=(1, 2, 3), epsilon: float | None = None, vectors: int = 10_000, seed: int = 0,
              order: int | None = None) -> dict:
    """Encode and decode Haar-random unit vectors; count vectors with
    |<n, v>|^2 <= 1 - eps^2 and codes that do not round-trip."""
    if epsilon is None:
        epsilon = epsilon_for_group(order) if order else 1 / 8
    rows = []
    for d in dims:
        rng = np.random.default_rng([seed, d])
        codec = EpsilonCodec(d, epsilon)
        v = rng.standard_normal((vectors, d)) + 1j * rng.standard_normal((vectors, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        code = codec.encode(v)
        n = codec.decode(code)
        overlap = np.abs(np.einsum("ti,ti->t", n.conj(), v)) ** 2
        rows.append({
            "d": d,
            "bits_per_vector": codec.bits_per_vector,
            "violations": int((overlap <= 1 - epsilon ** 2).sum()),
            "worst_gap_over_eps2": float((1 - overlap).max() / epsilon ** 2),
            "roundtrip_failures": int((codec.encode(n) != code).any(axis=1).sum()),
        })
    ok = all(r["violations"] == 0 and r["roundtrip_failures"] == 0 for r in rows)
    return {"check": "net", "epsilon": epsilon, "vectors": vectors, "rows": rows, "holds": ok}
