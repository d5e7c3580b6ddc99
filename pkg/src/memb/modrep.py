"""Irreducible F_q-representations of a finite group and the modular protocol.

The regular module F_q[G] is split into composition factors with a small
MeatAxe: a random algebra element A, an irreducible factor f of the minimal
polynomial of a random vector under A, and a spin of a vector from ker f(A).
A factor is certified irreducible by Norton's criterion (both the kernel
vector and a vector of the transposed kernel spin to the whole space when
dim ker f(A) = deg f). Since p does not divide |G| the module is semisimple,
so the composition factors are the direct summands.

Alice's vector is drawn uniformly from all of I_H(rho), zero included.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .fields import FieldError, FqField, choose_splitting_field, multiplicative_order
from .groups import FiniteGroup, Subgroup, exponent, join

DECOMPOSE_BUDGET = 400


class DecompositionError(RuntimeError):
    pass


class ProtocolError(ValueError):
    pass


# ---------------------------------------------------------------------------
# modules given by generator matrices (acting on column vectors)

def spin(F: FqField, vectors, gens, transpose=False) -> np.ndarray:
    """Echelon basis (rows) of the smallest invariant subspace containing ``vectors``."""
    mats = [g.T if transpose else g for g in gens]
    basis = F.echelon_basis(vectors)
    while True:
        images = [F.matmul(basis, m.T) for m in mats]  # rows: (m b)^T
        new = F.echelon_basis(np.vstack([basis] + images))
        if len(new) == len(basis):
            return new
        basis = new


def _restrict(F, S, gens):
    """Matrices of the action on the submodule with echelon row basis S."""
    out = []
    for g in gens:
        img = F.matmul(S, g.T)
        out.append(F.solve_in_basis(S, img).T.copy())
    return out


def _quotient(F, S, gens):
    n = gens[0].shape[0]
    piv = [int(np.nonzero(row)[0][0]) for row in S]
    rest = [c for c in range(n) if c not in set(piv)]
    out = []
    for g in gens:
        cols = g[:, rest].T.copy()  # images of e_j (j in rest) as rows
        # reduce modulo S: subtract coefficient * basis row for each pivot
        for row, pc in zip(S, piv):
            coef = cols[:, pc]
            cols = F.add[cols, F.neg[F.mul[coef[:, None], row[None, :]]]]
        out.append(cols[:, rest].T.copy())
    return out


def _random_algebra_element(F, gens, rng):
    n = gens[0].shape[0]
    acc = F.scale(int(rng.integers(0, F.q)), F.eye(n))
    for _ in range(4):
        word = F.eye(n)
        for _ in range(int(rng.integers(1, 5))):
            word = F.matmul(word, gens[int(rng.integers(len(gens)))])
        acc = F.madd(acc, F.scale(int(rng.integers(1, F.q)), word))
    return acc


def _vector_min_poly(F, A, v):
    n = len(v)
    rows = [np.asarray(v, dtype=np.int64)]
    for m in range(1, n + 1):
        rows.append(F.matvec(A, rows[-1]))
        K = np.vstack(rows)
        if F.rank(K) <= m:
            coeffs = F.nullspace(K.T)[0]  # sum c_i A^i v = 0
            return F.pmonic([int(c) for c in coeffs])
    raise DecompositionError("Krylov sequence did not close")


def meataxe_step(F: FqField, gens, rng, budget: int = DECOMPOSE_BUDGET):
    """Return ``("split", S)`` with S a proper submodule basis, or
    ``("irreducible", certificate)``."""
    n = gens[0].shape[0]
    if n == 1:
        return "irreducible", {"criterion": "dimension 1"}
    for attempt in range(budget):
        A = _random_algebra_element(F, gens, rng)
        v = F.random_elements(rng, n)
        if not v.any():
            continue
        g = _vector_min_poly(F, A, v)
        for f in F.factor(g, rng):
            B = F.poly_of_matrix(f, A)
            N = F.nullspace(B)
            if len(N) == 0:
                continue
            S = spin(F, N[:1], gens)
            if len(S) < n:
                return "split", S
            if len(N) == len(f) - 1:
                NT = F.nullspace(B.T)
                U = spin(F, NT[:1], gens, transpose=True)
                if len(U) < n:
                    return "split", F.nullspace(U)
                return "irreducible", {"criterion": "norton", "factor": f, "attempt": attempt}
    raise DecompositionError(f"no split or certificate after {budget} random elements (dim {n}, q={F.q})")


def hom_dimension(F: FqField, gens1, gens2) -> int:
    """dim Hom_G(V1, V2): solutions X of X rho1(g) = rho2(g) X."""
    d1, d2 = gens1[0].shape[0], gens2[0].shape[0]
    blocks = []
    I1, I2 = np.eye(d1, dtype=np.int64), np.eye(d2, dtype=np.int64)
    for a, b in zip(gens1, gens2):
        left = _kron(F, I2, a.T)
        right = _kron(F, b, I1)
        blocks.append(F.msub(left, right))
    return F.nullspace(np.vstack(blocks)).shape[0]


def _kron(F, a, b):
    out = F.mul[a[:, None, :, None], b[None, :, None, :]]
    return out.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ModularIrrep:
    group: FiniteGroup
    field: FqField
    gen_matrices: list
    index: int = -1
    certificate: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.gen_matrices[0].shape[0] if self.gen_matrices else 1

    @cached_property
    def matrices(self) -> np.ndarray:
        G, F = self.group, self.field
        d = self.dim
        out = np.zeros((G.order, d, d), dtype=np.int64)
        out[0] = np.eye(d, dtype=np.int64)
        order, parent, via = G.schreier
        for x in order[1:]:
            out[x] = F.matmul(out[parent[x]], self.gen_matrices[via[x]])
        out.setflags(write=False)
        return out

    def __call__(self, g: int) -> np.ndarray:
        return self.matrices[int(g)]

    @cached_property
    def traces(self) -> tuple:
        F = self.field
        tr = []
        for m in self.matrices:
            t = 0
            for i in range(self.dim):
                t = int(F.add[t, m[i, i]])
            tr.append(t)
        return tuple(tr)

    def check_homomorphism(self, pairs: int = 100, seed: int = 0) -> bool:
        G, F = self.group, self.field
        rng = np.random.default_rng(seed)
        for a, b in rng.integers(0, G.order, size=(pairs, 2)):
            if not (F.matmul(self(a), self(b)) == self(G.mul[a, b])).all():
                return False
        return True


@dataclass(frozen=True)
class FixedSpace:
    irrep_index: int
    basis: np.ndarray  # rows, reduced echelon

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])


@dataclass(eq=False)
class ModularIrrepSet:
    group: FiniteGroup
    field: FqField
    irreps: list
    multiplicities: list
    seed: int = 0

    def __len__(self):
        return len(self.irreps)

    @property
    def dims(self) -> list:
        return [r.dim for r in self.irreps]

    @property
    def dmax(self) -> int:
        return max(self.dims)

    @property
    def is_split(self) -> bool:
        return all(m == r.dim for m, r in zip(self.multiplicities, self.irreps))

    def dimension_count(self) -> int:
        return sum(m * r.dim for m, r in zip(self.multiplicities, self.irreps))

    def fixed_space(self, i: int, H: Subgroup) -> FixedSpace:
        return fixed_space(self.irreps[i], H)

    def require_split(self):
        if not self.is_split:
            raise ProtocolError(
                f"F_{self.field.q} is not a splitting field for {self.group.label}; "
                "the protocol weights only form a distribution over a splitting field")

    def to_json(self) -> dict:
        return {
            "group_hash": self.group.digest,
            "p": self.field.p,
            "k": self.field.k,
            "modulus": list(self.field.modulus),
            "seed": self.seed,
            "irreps": [[m.tolist() for m in r.gen_matrices] for r in self.irreps],
            "multiplicities": list(self.multiplicities),
        }

    @classmethod
    def from_json(cls, G: FiniteGroup, data: dict) -> "ModularIrrepSet":
        if data["group_hash"] != G.digest:
            raise ValueError("cache entry belongs to a different group")
        F = FqField(data["p"], data["k"], data["modulus"])
        irreps = [ModularIrrep(G, F, [np.asarray(m, dtype=np.int64) for m in gens], i)
                  for i, gens in enumerate(data["irreps"])]
        return cls(G, F, irreps, list(data["multiplicities"]), data.get("seed", 0))


def regular_module(G: FiniteGroup, F: FqField, elements=None) -> list:
    """Permutation matrices of x . e_g = e_{xg} for the given elements
    (default: the group's generators)."""
    if G.order % F.p == 0:
        raise FieldError(f"characteristic {F.p} divides |G|={G.order}")
    elements = G.generators if elements is None else elements
    n = G.order
    mats = []
    for x in elements:
        m = np.zeros((n, n), dtype=np.int64)
        m[G.mul[int(x)], np.arange(n)] = 1
        mats.append(m)
    return mats


_DECOMP_CACHE: dict = {}


def decompose_regular(G: FiniteGroup, F: FqField, seed: int = 0) -> ModularIrrepSet:
    key = (G.digest, F.p, F.k, F.modulus, seed)
    if key in _DECOMP_CACHE:
        return _DECOMP_CACHE[key]
    rng = np.random.default_rng(seed)
    if G.order == 1:
        one = ModularIrrep(G, F, [], 0, {"criterion": "trivial group"})
        result = ModularIrrepSet(G, F, [one], [1], seed)
        _DECOMP_CACHE[key] = result
        return result
    pending = [regular_module(G, F)]
    found: list[ModularIrrep] = []
    mult: list[int] = []
    while pending:
        gens = pending.pop()
        kind, data = meataxe_step(F, gens, rng)
        if kind == "split":
            pending.append(_quotient(F, data, gens))
            pending.append(_restrict(F, data, gens))
            continue
        rep = ModularIrrep(G, F, gens, certificate=data)
        for i, other in enumerate(found):
            if other.dim == rep.dim and other.traces == rep.traces and hom_dimension(F, other.gen_matrices, gens) > 0:
                mult[i] += 1
                break
        else:
            found.append(rep)
            mult.append(1)
    order = sorted(range(len(found)), key=lambda i: (found[i].dim, found[i].traces))
    irreps = [found[i] for i in order]
    for i, r in enumerate(irreps):
        r.index = i
    result = ModularIrrepSet(G, F, irreps, [mult[i] for i in order], seed)
    if result.dimension_count() != G.order:
        raise DecompositionError("dimension count of F_q[G] does not match |G|")
    _DECOMP_CACHE[key] = result
    return result


def fixed_space(rho: ModularIrrep, H: Subgroup) -> FixedSpace:
    F = rho.field
    d = rho.dim
    gens = [g for g in H.generators if g != 0]
    if not gens:
        return FixedSpace(rho.index, np.eye(d, dtype=np.int64))
    stacked = np.vstack([F.msub(rho(h), np.eye(d, dtype=np.int64)) for h in gens])
    return FixedSpace(rho.index, F.nullspace(stacked))


def verify_eq1(irreps: ModularIrrepSet, H: Subgroup) -> dict:
    """Check sum over irreps of multiplicity * dim I_H(rho) == [G:H]."""
    terms = [(m, fixed_space(r, H).dim) for m, r in zip(irreps.multiplicities, irreps.irreps)]
    total = sum(m * f for m, f in terms)
    if total != H.index:
        raise DecompositionError(f"fixed-space identity fails for {H}: {total} != {H.index}")
    return {"subgroup": H.describe(), "index": H.index, "sum": total, "terms": terms,
            "split_form": irreps.is_split}


# ---------------------------------------------------------------------------
# the protocol

@dataclass(frozen=True)
class ModMessage:
    irrep_index: int
    vector: tuple
    bits: int


def modrep_weights(irreps: ModularIrrepSet, H: Subgroup) -> list[int]:
    """Integer numerators |H| d_rho dim I_H(rho); they sum to |G|."""
    irreps.require_split()
    w = [H.order * r.dim * fixed_space(r, H).dim for r in irreps.irreps]
    if sum(w) != irreps.group.order:
        raise DecompositionError("protocol weights do not sum to |G|")
    return w


def _sample_index(weights, rng, size=None):
    cum = np.cumsum(weights)
    u = rng.integers(0, int(cum[-1]), size=size)
    return np.searchsorted(cum, u, side="right")


def modrep_message_bits(irreps: ModularIrrepSet, i: int) -> int:
    header = math.ceil(math.log2(len(irreps))) if len(irreps) > 1 else 0
    return header + irreps.irreps[i].dim * irreps.field.bits_per_element


def modrep_bit_bound(irreps: ModularIrrepSet) -> int:
    return math.ceil(math.log2(irreps.group.order)) + irreps.dmax * math.ceil(math.log2(irreps.field.q))


def alice_modrep(irreps: ModularIrrepSet, H: Subgroup, rng) -> ModMessage:
    i = int(_sample_index(modrep_weights(irreps, H), rng))
    fs = fixed_space(irreps.irreps[i], H)
    F = irreps.field
    coeffs = F.random_elements(rng, fs.dim).reshape(1, -1)
    if fs.dim:
        v = F.matmul(coeffs, fs.basis).ravel()
    else:
        v = np.zeros(irreps.irreps[i].dim, dtype=np.int64)
    return ModMessage(i, tuple(int(x) for x in v), modrep_message_bits(irreps, i))


def bob_modrep(irreps: ModularIrrepSet, y: int, msg: ModMessage) -> int:
    rho = irreps.irreps[msg.irrep_index]
    v = np.asarray(msg.vector, dtype=np.int64)
    return int((irreps.field.matvec(rho(y), v) == v).all())


def encode_mod_message(irreps: ModularIrrepSet, msg: ModMessage) -> str:
    """Fixed-width bit string: irrep index, then each coordinate as an
    integer below q (base-p digits of the polynomial representative)."""
    header = math.ceil(math.log2(len(irreps))) if len(irreps) > 1 else 0
    w = irreps.field.bits_per_element
    out = format(msg.irrep_index, f"0{header}b") if header else ""
    return out + "".join(format(c, f"0{w}b") for c in msg.vector)


def decode_mod_message(irreps: ModularIrrepSet, bits: str) -> ModMessage:
    header = math.ceil(math.log2(len(irreps))) if len(irreps) > 1 else 0
    i = int(bits[:header], 2) if header else 0
    w = irreps.field.bits_per_element
    d = irreps.irreps[i].dim
    body = bits[header:]
    if len(body) != d * w:
        raise ValueError("message length does not match the irrep dimension")
    vec = tuple(int(body[j * w:(j + 1) * w], 2) for j in range(d))
    return ModMessage(i, vec, len(bits))


def modrep_exact_accept(irreps: ModularIrrepSet, H: Subgroup, y: int) -> Fraction:
    """sum_rho Pr[rho] q^(dim I_K(rho) - dim I_H(rho)) with K = <H, y>."""
    G = irreps.group
    if y in H:
        return Fraction(1)
    K = join(G, H, [y])
    q = irreps.field.q
    total = Fraction(0)
    for w, r in zip(modrep_weights(irreps, H), irreps.irreps):
        if w:
            dh = fixed_space(r, H).dim
            dk = fixed_space(r, K).dim
            total += Fraction(w, G.order) * Fraction(1, q ** (dh - dk))
    return total


def modrep_completeness(irreps: ModularIrrepSet, H: Subgroup, y: int) -> bool:
    """For y in H: rho(y) fixes a spanning set of every I_H(rho) with positive weight."""
    F = irreps.field
    for w, r in zip(modrep_weights(irreps, H), irreps.irreps):
        if not w:
            continue
        B = fixed_space(r, H).basis
        if len(B) and not (F.matmul(B, r(y).T) == B).all():
            return False
    return True


def modrep_batch(irreps: ModularIrrepSet, H: Subgroup, y: int, rng, trials: int):
    """Simulate ``trials`` independent runs; returns (per-trial decisions, bits)."""
    F = irreps.field
    idx = _sample_index(modrep_weights(irreps, H), rng, size=trials)
    decisions = np.zeros(trials, dtype=bool)
    bits = np.empty(trials, dtype=np.int64)
    for i in np.unique(idx):
        sel = idx == i
        cnt = int(sel.sum())
        bits[sel] = modrep_message_bits(irreps, int(i))
        fs = fixed_space(irreps.irreps[i], H)
        if fs.dim == 0:
            decisions[sel] = True
            continue
        V = F.matmul(F.random_elements(rng, (cnt, fs.dim)), fs.basis)
        Y = F.matmul(V, irreps.irreps[i](y).T)
        decisions[sel] = (Y == V).all(axis=1)
    return decisions, bits


def modrep_field(G: FiniteGroup, p: int, k: int | None = None) -> FqField:
    """The ord_m(p) splitting field by default, or F_{p^k} when k is given."""
    if k is None:
        return choose_splitting_field(exponent(G), p, G.order)
    if G.order % p == 0:
        raise FieldError(f"p={p} divides |G|={G.order}")
    return FqField(p, k)


def dmax_modular(G: FiniteGroup, p: int, dmax_complex: int) -> dict:
    """d_max over the prime field F_p and the bound d_max^0 * ord_m(p)."""
    if G.order % p == 0:
        raise FieldError(f"p={p} divides |G|={G.order}")
    irreps = decompose_regular(G, FqField(p, 1))
    ordm = multiplicative_order(p, exponent(G))
    bound = dmax_complex * ordm
    if irreps.dmax > bound:
        raise DecompositionError(f"d_max^{p}={irreps.dmax} exceeds {dmax_complex}*{ordm}")
    return {"group": G.label, "p": p, "dmax_p": irreps.dmax, "dmax_0": dmax_complex,
            "ord_m_p": ordm, "bound": bound, "dims": irreps.dims,
            "multiplicities": irreps.multiplicities, "holds": True}
