"""Unitary complex irreducibles, invariant subspaces, the sphere codec and the
complex-representation protocol.

Irreps come from explicit formulas where the family allows it (linear
characters, dihedral rotations, induction from an abelian subgroup of index
two, Young's orthogonal form); otherwise the regular representation is split
along the eigenspaces of a random Hermitian operator averaged over G. Every
construction is certified (unitary, multiplicative, degrees matching the
character table) and indexed like the character table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .characters import CharacterTable, character_table
from .groups import FiniteGroup, Subgroup, closure_mask, join, subgroup_as_group, subgroup_generate

CERT_TOL = 1e-8
INT_TOL = 1e-6
UNIT_TOL = 1e-9


class RepresentationError(RuntimeError):
    pass


@dataclass(eq=False)
class UnitaryIrrep:
    group: FiniteGroup
    matrices: np.ndarray  # (|G|, d, d)
    index: int = -1
    method: str = ""

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, g: int) -> np.ndarray:
        return self.matrices[int(g)]

    @cached_property
    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)


@dataclass(eq=False)
class UnitaryIrrepSet:
    group: FiniteGroup
    irreps: list
    table: CharacterTable

    def __len__(self):
        return len(self.irreps)

    @property
    def dims(self) -> list:
        return [r.dim for r in self.irreps]

    @property
    def dmax(self) -> int:
        return max(self.dims)

    def residuals(self) -> dict:
        G = self.group
        unit = homo = 0.0
        for r in self.irreps:
            M = r.matrices
            eye = np.eye(r.dim)
            unit = max(unit, float(np.abs(M @ np.conj(np.transpose(M, (0, 2, 1))) - eye).max()))
            if G.order <= 64:
                prod = np.einsum("aij,bjk->abik", M, M)
                homo = max(homo, float(np.abs(prod - M[G.mul]).max()))
            else:
                rng = np.random.default_rng(0)
                a, b = rng.integers(0, G.order, size=(2, 2000))
                homo = max(homo, float(np.abs(M[a] @ M[b] - M[G.mul[a, b]]).max()))
        return {"unitarity": unit, "homomorphism": homo}

    def to_json(self) -> dict:
        res = self.residuals()
        return {
            "group_hash": self.group.digest,
            "irreps": [[[[float(z.real), float(z.imag)] for z in row] for g in r.matrices for row in g]
                       for r in self.irreps],
            "dims": self.dims,
            "methods": [r.method for r in self.irreps],
            "certification_residuals": res,
        }


    @classmethod
    def from_json(cls, G: FiniteGroup, data: dict) -> "UnitaryIrrepSet":
        if data["group_hash"] != G.digest:
            raise RepresentationError("cached irreps belong to a different group")
        table = character_table(G)
        irreps = []
        for i, (flat, d, method) in enumerate(zip(data["irreps"], data["dims"], data["methods"])):
            arr = np.array(flat, dtype=float)
            mats = (arr[..., 0] + 1j * arr[..., 1]).reshape(G.order, d, d)
            irreps.append(UnitaryIrrep(G, mats, i, method))
        return _certify(UnitaryIrrepSet(G, irreps, table))


# ---------------------------------------------------------------------------
# constructions

def _from_generator_images(G: FiniteGroup, gens, images) -> np.ndarray:
    d = images[0].shape[0]
    out = np.zeros((G.order, d, d), dtype=complex)
    seen = np.zeros(G.order, dtype=bool)
    out[0] = np.eye(d)
    seen[0] = True
    queue = [0]
    for x in queue:
        for s, m in zip(gens, images):
            y = int(G.mul[x, s])
            if not seen[y]:
                seen[y] = True
                out[y] = out[x] @ m
                queue.append(y)
    if not seen.all():
        raise RepresentationError("generator images do not reach every element")
    return out


def _linear(table: CharacterTable) -> list:
    out = []
    for i, d in enumerate(table.degrees):
        if d == 1:
            vals = table.on_elements(i)
            out.append(UnitaryIrrep(table.group, vals.reshape(-1, 1, 1).astype(complex), method="linear"))
    return out


def _dihedral(G: FiniteGroup) -> list:
    n = G.family[1]
    out = []
    S = np.array([[1, 0], [0, -1]], dtype=complex)
    for k in range(1, (n - 1) // 2 + 1):
        mats = np.zeros((G.order, 2, 2), dtype=complex)
        for g, (a, e) in enumerate(G.elements):
            th = 2 * math.pi * k * a / n
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            mats[g] = R @ np.linalg.matrix_power(S, e)
        out.append(UnitaryIrrep(G, mats, method="dihedral"))
    return out


def _index_two_abelian(G: FiniteGroup) -> Subgroup:
    fam = G.family[0]
    if fam == "semidirect_reversal":
        els = [g for g, (s, _) in enumerate(G.elements) if s == 0]
        return Subgroup(G, tuple(els), tuple(els))
    if fam == "quaternion8":
        return subgroup_generate(G, [G.element("i")])
    raise RepresentationError(f"no index-2 abelian subgroup recorded for {G.label}")


def _induced(G: FiniteGroup, A: Subgroup) -> list:
    """Two-dimensional irreps induced from linear characters lam of A with
    lam^t != lam, one per conjugate pair."""
    t = next(g for g in range(G.order) if g not in A)
    tinv = int(G.inv[t])
    AG = subgroup_as_group(G, A)
    atab = character_table(AG)
    lam_full = []
    for i in range(len(atab)):
        v = np.zeros(G.order, dtype=complex)
        v[list(A.elements)] = atab.on_elements(i)
        lam_full.append(v)
    conj = np.array([G.mul[G.mul[tinv, a], t] for a in range(G.order)])
    done = set()
    out = []
    reps = [0, t]
    for i, lam in enumerate(lam_full):
        lam_t = lam[conj]
        if np.allclose(lam_t, lam) or i in done:
            continue
        j = next(j for j, mu in enumerate(lam_full) if np.allclose(mu, lam_t))
        done.update({i, j})
        mats = np.zeros((G.order, 2, 2), dtype=complex)
        for g in range(G.order):
            for a, ra in enumerate(reps):
                for b, rb in enumerate(reps):
                    x = int(G.mul[G.mul[G.inv[ra], g], rb])
                    if x in A:
                        mats[g, a, b] = lam[x]
        out.append(UnitaryIrrep(G, mats, method="induced"))
    return out


def _partitions(n, maxpart=None):
    maxpart = n if maxpart is None else maxpart
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def standard_tableaux(shape) -> list:
    """All standard Young tableaux of ``shape``; each is a dict value -> (row, col)."""
    n = sum(shape)
    out = []

    def fill(v, rows, pos):
        if v > n:
            out.append(dict(pos))
            return
        for r in range(len(shape)):
            c = rows[r]
            if c < shape[r] and (r == 0 or rows[r - 1] > c):
                rows[r] += 1
                pos[v] = (r, c)
                fill(v + 1, rows, pos)
                rows[r] -= 1
                del pos[v]

    fill(1, [0] * len(shape), {})
    return out


def young_orthogonal_generators(shape) -> list:
    """Matrices of the adjacent transpositions s_1..s_{n-1} on the standard
    tableaux basis: s_i e_T = (1/r) e_T + sqrt(1 - 1/r^2) e_{s_i T}, r the
    content of i+1 minus the content of i."""
    n = sum(shape)
    tabs = standard_tableaux(shape)
    key = {tuple(sorted(t.items())): k for k, t in enumerate(tabs)}
    d = len(tabs)
    mats = []
    for i in range(1, n):
        M = np.zeros((d, d))
        for k, T in enumerate(tabs):
            (r1, c1), (r2, c2) = T[i], T[i + 1]
            r = (c2 - r2) - (c1 - r1)
            M[k, k] = 1.0 / r
            if abs(r) > 1:
                swapped = dict(T)
                swapped[i], swapped[i + 1] = T[i + 1], T[i]
                M[key[tuple(sorted(swapped.items()))], k] = math.sqrt(1 - 1.0 / r ** 2)
        mats.append(M)
    return mats


def _young(G: FiniteGroup) -> list:
    n = G.family[1]
    if n == 1:
        return [UnitaryIrrep(G, np.ones((1, 1, 1), dtype=complex), method="young")]
    gens = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = i + 1, i
        gens.append(G.elements.index(tuple(p)))
    out = []
    for shape in _partitions(n):
        images = [m.astype(complex) for m in young_orthogonal_generators(shape)]
        out.append(UnitaryIrrep(G, _from_generator_images(G, gens, images), method="young"))
    return out


def _generic(G: FiniteGroup, table: CharacterTable, seed: int = 0) -> list:
    """Split C[G] along eigenspaces of a G-averaged random Hermitian operator."""
    n = G.order
    rng = np.random.default_rng(seed)
    perm = G.mul  # left regular: e_g -> e_{xg}
    for _ in range(10):
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        X = X + X.conj().T
        T = np.zeros((n, n), dtype=complex)
        for x in range(n):
            p = perm[x]
            T[np.ix_(p, p)] += X
        T /= n
        evals, evecs = np.linalg.eigh(T)
        clusters = np.split(np.arange(n), np.nonzero(np.diff(evals) > 1e-7)[0] + 1)
        out = []
        found = set()
        ok = True
        for cl in clusters:
            B = evecs[:, cl]
            mats = np.zeros((n, len(cl), len(cl)), dtype=complex)
            for x in range(n):
                mats[x] = B.conj().T @ _permute_rows(B, perm[x])
            chi = np.trace(mats, axis1=1, axis2=2)
            match = _match_character(table, chi)
            if match is None:
                ok = False
                break
            if match not in found:
                found.add(match)
                out.append(UnitaryIrrep(G, mats, method="generic"))
        if ok and len(found) == len(table):
            return out
    raise RepresentationError(f"numerical decomposition of C[{G.label}] failed")


def _permute_rows(B, p):
    # (R(x) B)[xg] = B[g], i.e. the row for xg receives row g
    out = np.empty_like(B)
    out[p] = B
    return out


def _match_character(table: CharacterTable, chi_on_elements) -> int | None:
    reps = table.class_reps
    vals = np.asarray(chi_on_elements)[reps]
    for i, row in enumerate(table.values):
        if np.abs(row - vals).max() < INT_TOL:
            return i
    return None


_IRREP_CACHE: dict = {}


def complex_irreps(G: FiniteGroup, method: str | None = None) -> UnitaryIrrepSet:
    """Certified unitary irreps, ``irreps[i]`` affording character ``i`` of
    the character table. ``method="generic"`` forces the numerical route."""
    key = (G.digest, method)
    if key in _IRREP_CACHE:
        return _IRREP_CACHE[key]
    table = character_table(G)
    fam = G.family[0] if G.family else None
    if method == "generic":
        found = _generic(G, table)
    elif G.is_abelian:
        found = _linear(table)
    elif fam == "symmetric":
        found = _young(G)
    elif fam == "dihedral":
        found = _linear(table) + _dihedral(G)
    elif fam in ("semidirect_reversal", "quaternion8"):
        found = _linear(table) + _induced(G, _index_two_abelian(G))
    else:
        found = _generic(G, table)
    slots: list = [None] * len(table)
    for rep in found:
        i = _match_character(table, rep.character)
        if i is None or slots[i] is not None:
            raise RepresentationError(f"{rep.method} irrep does not match a fresh character of {G.label}")
        rep.index = i
        slots[i] = rep
    if any(s is None for s in slots):
        raise RepresentationError(f"missing irreps for {G.label}")
    result = _certify(UnitaryIrrepSet(G, slots, table))
    _IRREP_CACHE[key] = result
    return result


def _certify(irreps: UnitaryIrrepSet) -> UnitaryIrrepSet:
    G, table = irreps.group, irreps.table
    res = irreps.residuals()
    if res["unitarity"] > CERT_TOL or res["homomorphism"] > CERT_TOL:
        raise RepresentationError(f"certification failed for {G.label}: {res}")
    if sum(d * d for d in irreps.dims) != G.order or irreps.dims != table.degrees:
        raise RepresentationError("irrep degrees disagree with the character table")
    for i, r in enumerate(irreps.irreps):
        if _match_character(table, r.character) != i:
            raise RepresentationError(f"irrep {i} does not afford character {i}")
    return irreps


# ---------------------------------------------------------------------------
# invariant subspaces

def projector(rho: UnitaryIrrep, H: Subgroup) -> np.ndarray:
    return rho.matrices[list(H.elements)].mean(axis=0)


def fixed_space_C(rho: UnitaryIrrep, H: Subgroup) -> np.ndarray:
    """Orthonormal basis (columns) of the vectors fixed by every element of H."""
    P = projector(rho, H)
    if np.abs(P @ P - P).max() > CERT_TOL:
        raise RepresentationError("averaging projector is not idempotent")
    tr = float(np.trace(P).real)
    dim = int(round(tr))
    if abs(tr - dim) > INT_TOL:
        raise RepresentationError(f"projector trace {tr} is not an integer")
    if dim == 0:
        return np.zeros((rho.dim, 0), dtype=complex)
    evals, evecs = np.linalg.eigh((P + P.conj().T) / 2)
    return evecs[:, evals > 0.5]


def fixed_dims_C(irreps: UnitaryIrrepSet, H: Subgroup) -> list[int]:
    return [fixed_space_C(r, H).shape[1] for r in irreps.irreps]


# ---------------------------------------------------------------------------
# the sphere codec

def epsilon_for_group(order: int) -> float:
    if order < 2:
        raise ValueError("need |G| >= 2")
    return min(1 / 8, 1 / (64 * order ** 2 * (1 + math.log2(order)) ** 3))


class EpsilonCodec:
    """Fixed-width code for unit vectors of C^d.

    The 2d real coordinates are divided by their largest magnitude, so one
    coordinate sits exactly at +-1, and the rest are rounded to a grid of step
    at most ``delta = eps / (2 sqrt(2d))`` on [-1, 1]. Decoding renormalises.
    Pinning the largest coordinate makes decode followed by encode the
    identity on emitted codes, and the reconstruction is within eps/2 of the
    input in Euclidean norm.
    """

    def __init__(self, d: int, epsilon: float):
        if not 0 < epsilon <= 1 / 8:
            raise ValueError("epsilon must lie in (0, 1/8]")
        self.d = d
        self.epsilon = epsilon
        self.delta = epsilon / (2 * math.sqrt(2 * d))
        self.levels = math.ceil(2 / self.delta)  # grid points are -1 + i*step, i = 0..levels
        self.step = 2 / self.levels
        self.bits_per_coord = math.ceil(math.log2(2 / self.delta + 1))
        self.bits_per_vector = 2 * d * self.bits_per_coord

    def encode(self, v) -> np.ndarray:
        """Integer codes, shape (..., 2d)."""
        v = np.asarray(v, dtype=complex)
        x = np.concatenate([v.real, v.imag], axis=-1)
        scale = np.abs(x).max(axis=-1, keepdims=True)
        u = x / scale
        idx = np.rint((u + 1) / self.step)
        return np.clip(idx, 0, self.levels).astype(np.int64)

    def decode(self, code) -> np.ndarray:
        w = -1 + np.asarray(code, dtype=float) * self.step
        z = w[..., : self.d] + 1j * w[..., self.d:]
        return z / np.linalg.norm(z, axis=-1, keepdims=True)

    def to_bits(self, code) -> str:
        code = np.asarray(code).ravel()
        if len(code) != 2 * self.d:
            raise ValueError("code length mismatch")
        return "".join(format(int(c), f"0{self.bits_per_coord}b") for c in code)

    def from_bits(self, bits: str) -> np.ndarray:
        if len(bits) != self.bits_per_vector:
            raise ValueError("code length mismatch")
        w = self.bits_per_coord
        return np.array([int(bits[i * w:(i + 1) * w], 2) for i in range(2 * self.d)], dtype=np.int64)


# ---------------------------------------------------------------------------
# the protocol

@dataclass(frozen=True)
class CompMessage:
    irrep_index: int
    code: tuple
    vector: np.ndarray
    bits: int


def comprep_weights(irreps: UnitaryIrrepSet, H: Subgroup) -> list[int]:
    """Integer numerators |H| d dim I_H(rho) over |G|."""
    w = [H.order * r.dim * d for r, d in zip(irreps.irreps, fixed_dims_C(irreps, H))]
    if sum(w) != irreps.group.order:
        raise RepresentationError("protocol weights do not sum to |G|")
    return w


def _header_bits(irreps) -> int:
    return math.ceil(math.log2(len(irreps))) if len(irreps) > 1 else 0


def comprep_message_bits(irreps: UnitaryIrrepSet, i: int, epsilon: float) -> int:
    return _header_bits(irreps) + EpsilonCodec(irreps.irreps[i].dim, epsilon).bits_per_vector


def comprep_bit_bound(irreps: UnitaryIrrepSet, epsilon: float) -> int:
    """Worst case over irreps: name plus the codec length at d_max."""
    G = irreps.group
    return math.ceil(math.log2(G.order)) + EpsilonCodec(irreps.dmax, epsilon).bits_per_vector


def haar_vectors(basis: np.ndarray, rng, count: int) -> np.ndarray:
    """Rows: Haar-uniform unit vectors of the column span of an orthonormal basis."""
    k = basis.shape[1]
    c = rng.standard_normal((count, k)) + 1j * rng.standard_normal((count, k))
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    return c @ basis.T


def alice_comprep(irreps: UnitaryIrrepSet, H: Subgroup, rng, epsilon: float) -> CompMessage:
    w = comprep_weights(irreps, H)
    cum = np.cumsum(w)
    i = int(np.searchsorted(cum, rng.integers(0, int(cum[-1])), side="right"))
    rho = irreps.irreps[i]
    v = haar_vectors(fixed_space_C(rho, H), rng, 1)[0]
    codec = EpsilonCodec(rho.dim, epsilon)
    code = codec.encode(v)
    return CompMessage(i, tuple(int(c) for c in code), codec.decode(code), comprep_message_bits(irreps, i, epsilon))


def bob_comprep(rho_y: np.ndarray, n: np.ndarray, epsilon: float) -> int:
    return int(abs(1 - np.vdot(n, rho_y @ n)) <= 2 * epsilon)


def comprep_batch(irreps: UnitaryIrrepSet, H: Subgroup, y: int, rng, trials: int, epsilon: float):
    """Simulate ``trials`` runs; returns (per-trial decisions, per-trial bits)."""
    w = comprep_weights(irreps, H)
    cum = np.cumsum(w)
    idx = np.searchsorted(cum, rng.integers(0, int(cum[-1]), size=trials), side="right")
    decisions = np.zeros(trials, dtype=bool)
    bits = np.empty(trials, dtype=np.int64)
    for i in np.unique(idx):
        sel = idx == i
        cnt = int(sel.sum())
        rho = irreps.irreps[int(i)]
        bits[sel] = comprep_message_bits(irreps, int(i), epsilon)
        codec = EpsilonCodec(rho.dim, epsilon)
        N = codec.decode(codec.encode(haar_vectors(fixed_space_C(rho, H), rng, cnt)))
        inner = np.einsum("ti,ti->t", N.conj(), N @ rho(y).T)
        decisions[sel] = np.abs(1 - inner) <= 2 * epsilon
    return decisions, bits


def comprep_limit_accept(irreps: UnitaryIrrepSet, H: Subgroup, y: int) -> Fraction:
    """Acceptance as epsilon -> 0: the weight of irreps whose H-fixed space is
    already fixed by y (there v is fixed exactly; elsewhere almost never)."""
    if y in H:
        return Fraction(1)
    K = join(H.parent, H, [y])
    dh, dk = fixed_dims_C(irreps, H), fixed_dims_C(irreps, K)
    w = comprep_weights(irreps, H)
    return sum((Fraction(wi, irreps.group.order) for wi, a, b in zip(w, dh, dk) if wi and a == b), Fraction(0))


def comprep_completeness(irreps: UnitaryIrrepSet, H: Subgroup, y: int) -> bool:
    """y in H fixes each I_H(rho) exactly (to CERT_TOL), which with the codec's
    eps/2 closeness keeps |1 - <rho(y)n, n>| <= eps^2 + eps <= 2 eps."""
    for r, wi in zip(irreps.irreps, comprep_weights(irreps, H)):
        if not wi:
            continue
        B = fixed_space_C(r, H)
        if np.abs(r(y) @ B - B).max() > CERT_TOL:
            return False
    return True


# ---------------------------------------------------------------------------
# Cayley-graph diagnostic

def symmetric_generating_set(G: FiniteGroup, H: Subgroup) -> list[int]:
    """Identity plus generators of H and their inverses."""
    A = {0}
    for h in H.generators:
        A.add(int(h))
        A.add(int(G.inv[h]))
    return sorted(A)


def cayley_second_eigenvalue(G: FiniteGroup, K: Subgroup, A, y: int) -> float:
    """Largest eigenvalue of the normalised adjacency of Cay(K, yA u Ay^-1)
    orthogonal to the constant vector."""
    A = [int(a) for a in A]
    if not A:
        raise ValueError("A must be non-empty")
    if any(int(G.inv[a]) not in A for a in A):
        raise ValueError("A is not symmetric")
    S = [int(G.mul[y, a]) for a in A] + [int(G.mul[a, G.inv[y]]) for a in A]
    if any(s not in K for s in S):
        raise ValueError("yA u Ay^-1 is not contained in K")
    if closure_mask(G.mul, S).sum() != K.order:
        raise ValueError("yA u Ay^-1 does not generate K")
    els = list(K.elements)
    pos = {g: i for i, g in enumerate(els)}
    n = len(els)
    P = np.zeros((n, n))
    for s in S:
        for x in els:
            P[pos[x], pos[int(G.mul[x, s])]] += 1.0 / len(S)
    if n == 1:
        raise ValueError("K is trivial; there is no nontrivial spectrum")
    Q, _ = np.linalg.qr(np.hstack([np.ones((n, 1)) / math.sqrt(n), np.eye(n)[:, : n - 1]]))
    comp = Q[:, 1:]
    lam = float(np.linalg.eigvalsh(comp.T @ P @ comp).max())
    if not lam < 1 - 1e-9:
        raise RepresentationError(f"second eigenvalue {lam} is not below 1")
    return lam


def cayley_via_irreps(G: FiniteGroup, K: Subgroup, A, y: int) -> float:
    """Same quantity from the nontrivial irreps sigma of K:
    max eigenvalue of (sigma(y) S_A + S_A sigma(y^-1)) / 2."""
    KG = subgroup_as_group(G, K)
    pos = {g: i for i, g in enumerate(K.elements)}
    irr = complex_irreps(KG, method="generic") if not KG.is_abelian else complex_irreps(KG)
    best = -np.inf
    for sigma in irr.irreps[1:]:
        SA = np.mean([sigma(pos[a]) for a in A], axis=0)
        M = (sigma(pos[y]) @ SA + SA @ sigma(pos[int(G.inv[y])])) / 2
        best = max(best, float(np.linalg.eigvalsh((M + M.conj().T) / 2).max()))
    return best
