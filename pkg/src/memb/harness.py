"""Protocol-agnostic evaluation engine.

Wraps the three representation-theoretic protocols and two baselines behind
one interface, runs them over exhaustive or sampled (H, y) sweeps, and
assembles reports with bit accounting, analytic comparisons and lower-bound
fields. Everything is deterministic given the seed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cache import cached_complex, cached_modular, cached_table
from .characters import dmax_complex
from .complexrep import (comprep_batch, comprep_bit_bound, comprep_completeness, comprep_limit_accept,
                         epsilon_for_group)
from .groups import (ENUMERATION_BOUND, FiniteGroup, GroupError, Subgroup, closure_mask, enumerate_subgroups,
                     greedy_generators, independent_subset_gamma, normal_closure, subgroup_generate)
from .modrep import (modrep_batch, modrep_bit_bound, modrep_completeness, modrep_exact_accept,
                     modrep_field)
from .norm import norm_batch, norm_bit_bound, norm_completeness, norm_exact_error

SCHEMA = 1
SIGMA_BAND = 4.0


class BoundViolation(AssertionError):
    pass


def log2ceil(n: int) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0


# ---------------------------------------------------------------------------
# protocols

class Protocol:
    """One-way protocol for membership of y in ``target(H)``."""

    name = "protocol"

    def __init__(self, G: FiniteGroup):
        self.G = G

    def admits(self, H: Subgroup) -> bool:
        return True

    def target(self, H: Subgroup) -> Subgroup:
        return H

    def batch(self, H: Subgroup, y: int, rng, trials: int):
        """(per-trial decisions, per-trial bits)."""
        raise NotImplementedError

    def analytic(self, H: Subgroup, y: int) -> Fraction | None:
        return None

    def complete(self, H: Subgroup, y: int) -> bool:
        """Deterministic completeness certificate for y in the target."""
        return True

    def bit_bound(self) -> int:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"protocol": self.name}

    def extra(self, H: Subgroup, y: int) -> dict:
        return {}


class NormProtocol(Protocol):
    """``mode="memb"`` accepts only normal H, where the protocol decides
    membership in H; ``mode="closure"`` takes any H and decides membership in
    its normal closure."""

    name = "norm"

    def __init__(self, G, mode: str = "memb", cache_dir=None):
        super().__init__(G)
        if mode not in ("memb", "closure"):
            raise ValueError("mode must be 'memb' or 'closure'")
        self.mode = mode
        self.table = cached_table(G, cache_dir)

    def admits(self, H):
        return self.mode == "closure" or H.is_normal

    def target(self, H):
        return normal_closure(self.G, H)

    def batch(self, H, y, rng, trials):
        return norm_batch(self.table, H, y, rng, trials)

    def analytic(self, H, y):
        return Fraction(1) if y in self.target(H) else norm_exact_error(self.table, H, y)

    def complete(self, H, y):
        return norm_completeness(self.table, H, y)

    def bit_bound(self):
        return norm_bit_bound(self.G)

    def describe(self):
        return {"protocol": self.name, "mode": self.mode}


class ModrepProtocol(Protocol):
    name = "modrep"

    def __init__(self, G, p: int, k: int | None = None, cache_dir=None):
        super().__init__(G)
        self.irreps = cached_modular(G, modrep_field(G, p, k), cache_dir)
        self.irreps.require_split()

    def batch(self, H, y, rng, trials):
        return modrep_batch(self.irreps, H, y, rng, trials)

    def analytic(self, H, y):
        return modrep_exact_accept(self.irreps, H, y)

    def complete(self, H, y):
        return modrep_completeness(self.irreps, H, y)

    def bit_bound(self):
        return modrep_bit_bound(self.irreps)

    def describe(self):
        F = self.irreps.field
        return {"protocol": self.name, "p": F.p, "k": F.k, "q": F.q, "modulus": list(F.modulus)}


class ComprepProtocol(Protocol):
    name = "comprep"

    def __init__(self, G, epsilon: float | None = None, cache_dir=None):
        super().__init__(G)
        self.irreps = cached_complex(G, cache_dir)
        self.epsilon = epsilon_for_group(G.order) if epsilon is None else float(epsilon)

    def batch(self, H, y, rng, trials):
        return comprep_batch(self.irreps, H, y, rng, trials, self.epsilon)

    def complete(self, H, y):
        return comprep_completeness(self.irreps, H, y)

    def bit_bound(self):
        return comprep_bit_bound(self.irreps, self.epsilon)

    def describe(self):
        return {"protocol": self.name, "epsilon": self.epsilon}

    def extra(self, H, y):
        return {"limit_accept": str(comprep_limit_accept(self.irreps, H, y))}


def trivial_message(G: FiniteGroup, H: Subgroup) -> str:
    """Count header, then a greedy generating sequence at fixed width."""
    w = log2ceil(G.order)
    gens = greedy_generators_of(G, H)
    header = log2ceil(w + 1)
    out = format(len(gens), f"0{header}b") if header else ""
    return out + "".join(format(g, f"0{w}b") for g in gens)


def trivial_decode(G: FiniteGroup, bits: str) -> Subgroup:
    w = log2ceil(G.order)
    header = log2ceil(w + 1)
    count = int(bits[:header], 2) if header else 0
    if len(bits) != header + count * w:
        raise ValueError("message length does not match its header")
    gens = [int(bits[header + i * w: header + (i + 1) * w], 2) for i in range(count)]
    return subgroup_generate(G, gens)


def greedy_generators_of(G: FiniteGroup, H: Subgroup) -> tuple:
    """Each generator strictly enlarges the subgroup generated so far."""
    return greedy_generators(G, H.elements)


def trivial_payload_bits(G: FiniteGroup, H: Subgroup) -> int:
    return len(greedy_generators_of(G, H)) * log2ceil(G.order)


def trivial_protocol(G: FiniteGroup, H: Subgroup, y: int):
    """(decision, bits sent); Bob rebuilds H from the message and answers exactly."""
    msg = trivial_message(G, H)
    return int(y in trivial_decode(G, msg)), len(msg)


class TrivialProtocol(Protocol):
    name = "trivial"

    def batch(self, H, y, rng, trials):
        bit, bits = trivial_protocol(self.G, H, y)
        return np.full(trials, bool(bit)), np.full(trials, bits, dtype=np.int64)

    def analytic(self, H, y):
        return Fraction(int(y in H))

    def complete(self, H, y):
        return trivial_protocol(self.G, H, y)[0] == 1

    def bit_bound(self):
        w = log2ceil(self.G.order)
        return w * (w + 1)


def quantum_reference(G: FiniteGroup, H: Subgroup, y: int):
    """(acceptance probability, qubits) of the coset-state swap test."""
    return (Fraction(1) if y in H else Fraction(1, 2)), log2ceil(G.order)


class QuantumReference(Protocol):
    """Closed form only; the empirical column is a Bernoulli draw at the
    analytic rate."""

    name = "quantum"

    def batch(self, H, y, rng, trials):
        p, qubits = quantum_reference(self.G, H, y)
        return rng.random(trials) < float(p), np.full(trials, qubits, dtype=np.int64)

    def analytic(self, H, y):
        return quantum_reference(self.G, H, y)[0]

    def bit_bound(self):
        return log2ceil(self.G.order)


class Amplified(Protocol):
    """k independent rounds, accept iff every round accepts."""

    def __init__(self, base: Protocol, k: int):
        if k < 1:
            raise ValueError("k must be at least 1")
        super().__init__(base.G)
        self.base, self.k = base, k
        self.name = base.name

    def admits(self, H):
        return self.base.admits(H)

    def target(self, H):
        return self.base.target(H)

    def batch(self, H, y, rng, trials):
        if self.k == 1:
            return self.base.batch(H, y, rng, trials)
        dec, bits = self.base.batch(H, y, rng, trials * self.k)
        return dec.reshape(trials, self.k).all(axis=1), bits.reshape(trials, self.k).sum(axis=1)

    def analytic(self, H, y):
        a = self.base.analytic(H, y)
        return None if a is None else a ** self.k

    def complete(self, H, y):
        return self.base.complete(H, y)

    def bit_bound(self):
        return self.k * self.base.bit_bound()

    def describe(self):
        return {**self.base.describe(), "amplify": self.k}

    def extra(self, H, y):
        return self.base.extra(H, y)


def amplify(protocol: Protocol, k: int) -> Protocol:
    return Amplified(protocol, k)


def rounds_for_third(accept) -> int:
    """Smallest k with accept^k <= 1/3."""
    a = Fraction(accept).limit_denominator(10 ** 9) if not isinstance(accept, Fraction) else accept
    if a >= 1:
        raise ValueError("a protocol that always accepts cannot be amplified")
    k = 1
    while a ** k > Fraction(1, 3):
        k += 1
    return k


PROTOCOLS = ("norm", "norm-closure", "modrep", "comprep", "trivial", "quantum")


def make_protocol(name: str, G: FiniteGroup, p: int | None = None, k: int | None = None,
                  epsilon: float | None = None, amplify_k: int = 1, cache_dir=None) -> Protocol:
    if name == "norm":
        proto: Protocol = NormProtocol(G, "memb", cache_dir)
    elif name == "norm-closure":
        proto = NormProtocol(G, "closure", cache_dir)
    elif name == "modrep":
        if p is None:
            raise ValueError("modrep needs a prime p")
        proto = ModrepProtocol(G, p, k, cache_dir)
    elif name == "comprep":
        proto = ComprepProtocol(G, epsilon, cache_dir)
    elif name == "trivial":
        proto = TrivialProtocol(G)
    elif name == "quantum":
        proto = QuantumReference(G)
    else:
        raise ValueError(f"unknown protocol {name!r}; choose from {', '.join(PROTOCOLS)}")
    return Amplified(proto, amplify_k) if amplify_k != 1 else proto


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class ProtocolRun:
    protocol: str
    group: str
    H: tuple
    y: str
    decision: int
    bits_sent: int
    seed: int


def run_once(protocol: Protocol, H: Subgroup, y: int, seed: int) -> ProtocolRun:
    dec, bits = protocol.batch(H, y, np.random.default_rng(seed), 1)
    G = protocol.G
    return ProtocolRun(protocol.name, G.label, tuple(G.name(g) for g in H.generators), G.name(y),
                       int(dec[0]), int(bits[0]), seed)


@dataclass
class EvalReport:
    config: dict
    rows: list
    summary: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "config": self.config, "rows": self.rows, "summary": self.summary}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        cols = ["H", "H_order", "y", "y_in_target", "trials", "accepts", "empirical_accept",
                "analytic_accept", "stderr", "within_4sigma", "completeness_verified",
                "bits_max", "bits_mean", "bit_bound", "row_seed"]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({**row, "H": " ".join(row["H"])})
        return buf.getvalue()

    def write(self, path) -> None:
        text = self.to_csv() if str(path).endswith(".csv") else self.dumps()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _pairs(protocol: Protocol, plan: str, seed: int, samples: int):
    G = protocol.G
    if plan == "exhaustive":
        if G.order > ENUMERATION_BOUND:
            raise GroupError(f"|G|={G.order} exceeds the enumeration bound {ENUMERATION_BOUND}")
        for H in enumerate_subgroups(G):
            if protocol.admits(H):
                for y in range(G.order):
                    yield H, y
    elif plan == "sampled":
        rng = np.random.default_rng([seed, 1])
        for _ in range(samples):
            m = int(rng.integers(1, max(log2ceil(G.order), 1) + 1))
            H = subgroup_generate(G, [int(g) for g in rng.integers(0, G.order, size=m)])
            if not protocol.admits(H):
                H = normal_closure(G, H)
            yield H, int(rng.integers(0, G.order))
    else:
        raise ValueError("plan must be 'exhaustive' or 'sampled'")


def evaluate_row(protocol: Protocol, H: Subgroup, y: int, trials: int, row_seed) -> dict:
    G = protocol.G
    rng = np.random.default_rng(row_seed)
    dec, bits = protocol.batch(H, y, rng, trials)
    accepts = int(dec.sum())
    emp = accepts / trials
    inside = y in protocol.target(H)
    a = protocol.analytic(H, y)
    row = {
        "H": [G.name(g) for g in H.generators],
        "H_order": H.order,
        "y": G.name(y),
        "y_in_target": inside,
        "trials": trials,
        "accepts": accepts,
        "empirical_accept": emp,
        "analytic_accept": None if a is None else str(a),
        "stderr": None,
        "deviation": None,
        "within_4sigma": None,
        "completeness_verified": None,
        "bits_max": int(bits.max()),
        "bits_mean": float(bits.mean()),
        "bit_bound": protocol.bit_bound(),
        "row_seed": list(row_seed),
    }
    if a is not None:
        se = math.sqrt(float(a) * (1 - float(a)) / trials)
        dev = abs(emp - float(a))
        row.update(stderr=se, deviation=dev, within_4sigma=bool(dev <= SIGMA_BAND * se + 1e-12))
    if inside:
        row["completeness_verified"] = bool(protocol.complete(H, y) and accepts == trials)
    row.update(protocol.extra(H, y))
    return row


def lower_bound_fields(G: FiniteGroup) -> dict:
    if G.order > ENUMERATION_BOUND:
        return {"gamma": None, "vc_bound": None}
    lb = vc_lower_bound(G)
    return {"gamma": lb["gamma"], "gamma_exact": lb["exact"], "vc_bound": lb["bound"]}


def evaluate(protocol: Protocol, plan: str = "exhaustive", trials: int = 1000, seed: int = 0,
             samples: int = 16, pairs=None) -> EvalReport:
    """Run every (H, y) of the plan, or the explicit ``pairs``, and summarise."""
    G = protocol.G
    todo = list(pairs) if pairs is not None else list(_pairs(protocol, plan, seed, samples))
    rows = [evaluate_row(protocol, H, y, trials, (seed, 2, i)) for i, (H, y) in enumerate(todo)]
    config = {**protocol.describe(), "group": G.label, "group_hash": G.digest,
              "plan": "explicit" if pairs is not None else plan, "trials": trials, "seed": seed}
    if plan == "sampled" and pairs is None:
        config["samples"] = samples
    return EvalReport(config, rows, summarize(protocol, rows))


def summarize(protocol: Protocol, rows: list) -> dict:
    yes = [r for r in rows if r["y_in_target"]]
    no = [r for r in rows if not r["y_in_target"]]
    checked = [r for r in rows if r["within_4sigma"] is not None]
    bits_max = max((r["bits_max"] for r in rows), default=0)
    out = {
        "rows": len(rows),
        "completeness_verified": all(r["completeness_verified"] for r in yes) if yes else None,
        "bits_max": bits_max,
        "bits_mean": float(np.mean([r["bits_mean"] for r in rows])) if rows else 0.0,
        "bit_bound": protocol.bit_bound(),
        "bound_respected": bits_max <= protocol.bit_bound(),
        "within_4sigma_fraction": (sum(r["within_4sigma"] for r in checked) / len(checked)) if checked else None,
        **lower_bound_fields(protocol.G),
    }
    if no:
        worst = max(r["empirical_accept"] for r in no)
        out["max_soundness_accept_empirical"] = worst
        out["delta_emp"] = 1 - worst
        exact = [Fraction(r["analytic_accept"]) for r in no if r["analytic_accept"] is not None]
        if len(exact) == len(no):
            worst_exact = max(exact)
            out["max_soundness_accept_analytic"] = str(worst_exact)
            if worst_exact < 1:
                k = rounds_for_third(worst_exact)
                out["rounds_for_one_third"] = k
                out["amplified_bits"] = k * protocol.bit_bound()
        elif worst < 1:
            k = rounds_for_third(worst)
            out["rounds_for_one_third"] = k
            out["amplified_bits"] = k * protocol.bit_bound()
    return out


# ---------------------------------------------------------------------------
# lower bound and cost tables

def binary_entropy(x: float) -> float:
    if x in (0, 1):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def verify_shattering(G: FiniteGroup, S) -> bool:
    """For every R subset of S, the members of S inside <R> are exactly R."""
    S = [int(s) for s in S]
    for mask in range(1 << len(S)):
        R = [s for i, s in enumerate(S) if mask >> i & 1]
        inside = closure_mask(G.mul, R)
        if any(bool(inside[s]) != bool(mask >> i & 1) for i, s in enumerate(S)):
            return False
    return True


def vc_lower_bound(G: FiniteGroup) -> dict:
    """(1 - h(1/3)) * gamma(G) with the independent-set witness checked by
    shattering."""
    res = independent_subset_gamma(G)
    if not verify_shattering(G, res.witness):
        raise GroupError(f"independent set {res.witness} is not shattered")
    h = binary_entropy(1 / 3)
    return {
        "group": G.label,
        "gamma": res.size,
        "exact": res.exact,
        "reading": res.reading,
        "witness": [G.name(g) for g in res.witness],
        "shattering_verified": True,
        "entropy_one_third": h,
        "bound": (1 - h) * res.size,
    }


def cost_table(protocol: str, groups, p: int | None = None, epsilon: float | None = None,
               trials: int = 200, seed: int = 0, samples: int = 8, cache_dir=None) -> list[dict]:
    """Observed worst-case bits against the protocol's bound for each group;
    raises BoundViolation if any row exceeds it."""
    rows = []
    for G in groups:
        proto = make_protocol(protocol, G, p=p, epsilon=epsilon, cache_dir=cache_dir)
        rep = evaluate(proto, "sampled", trials=trials, seed=seed, samples=samples)
        observed = rep.summary["bits_max"]
        bound = proto.bit_bound()
        if observed > bound:
            raise BoundViolation(f"{protocol} on {G.label}: {observed} bits > bound {bound}")
        d0 = dmax_complex(G)
        row = {"group": G.label, "order": G.order, "log2_order": log2ceil(G.order), "dmax_0": d0,
               "bits_max": observed, "bit_bound": bound}
        if protocol == "comprep":
            row["bits_per_dmax_log"] = observed / (d0 * max(math.log2(G.order), 1))
        rows.append(row)
    return rows
