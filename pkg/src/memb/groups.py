"""Finite groups as explicit multiplication tables, with subgroup machinery.

Elements are the integers ``0..n-1`` and ``0`` is always the identity.
Every group built here keeps a ``family`` tag so later code can pick a
specialised representation construction.
"""
from __future__ import annotations

import hashlib
import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from .kernels import closure_mask

DEFAULT_MAX_ORDER = 5040
ENUMERATION_BOUND = 200
GAMMA_EXACT_BOUND = 64


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    label: str
    element_names: tuple | None = None
    family: tuple | None = None
    elements: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        mul = np.ascontiguousarray(self.mul, dtype=np.int64)
        mul.setflags(write=False)
        object.__setattr__(self, "mul", mul)

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    identity = 0

    @cached_property
    def inv(self) -> np.ndarray:
        inv = np.argmax(self.mul == 0, axis=1).astype(np.int64)
        inv.setflags(write=False)
        return inv

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256(self.label.encode())
        h.update(self.mul.tobytes())
        return h.hexdigest()[:16]

    def __hash__(self):
        return hash(self.digest)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.digest == other.digest

    def __repr__(self):
        return f"FiniteGroup({self.label!r}, order={self.order})"

    def name(self, g: int) -> str:
        if self.element_names is None:
            return f"#{g}"
        return self.element_names[g]

    @cached_property
    def _name_index(self):
        if self.element_names is None:
            return {}
        return {n: i for i, n in enumerate(self.element_names)}

    def element(self, text) -> int:
        """Look up an element by index, ``#i`` or its printed name."""
        if isinstance(text, (int, np.integer)):
            g = int(text)
        else:
            text = text.strip()
            if text.startswith("#"):
                g = int(text[1:])
            elif text in self._name_index:
                g = self._name_index[text]
            elif text in ("e", "1", "()") and self.element_names is not None:
                g = 0
            else:
                g = _parse_element_fallback(self, text)
        if not 0 <= g < self.order:
            raise GroupError(f"element {text!r} out of range for {self.label}")
        return g

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        idx = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        cur = idx.copy()
        for k in range(1, n + 1):
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            if orders.all():
                break
            cur = self.mul[cur, idx]
        return orders

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    @cached_property
    def generators(self) -> tuple:
        """Greedy generating sequence; each new element enlarges the span."""
        return greedy_generators(self, range(self.order))

    @cached_property
    def schreier(self):
        """BFS spanning tree over ``generators``: ``(order, parent, via)`` where
        element ``x = parent[x] * generators[via[x]]``."""
        gens = self.generators
        parent = np.full(self.order, -1, dtype=np.int64)
        via = np.full(self.order, -1, dtype=np.int64)
        seen = np.zeros(self.order, dtype=bool)
        seen[0] = True
        order = [0]
        head = 0
        while head < len(order):
            x = order[head]
            head += 1
            for j, s in enumerate(gens):
                y = int(self.mul[x, s])
                if not seen[y]:
                    seen[y] = True
                    parent[y], via[y] = x, j
                    order.append(y)
        return order, parent, via

    def check(self, sample: int = 20000, seed: int = 0) -> None:
        """Raise GroupError unless the table is a group table with identity 0."""
        n = self.order
        mul = self.mul
        target = np.arange(n)
        if not (np.sort(mul, axis=1) == target).all() or not (np.sort(mul, axis=0) == target[:, None]).all():
            raise GroupError("multiplication table is not a Latin square")
        if not (mul[0] == target).all() or not (mul[:, 0] == target).all():
            raise GroupError("element 0 is not the identity")
        if not (mul[target, self.inv] == 0).all():
            raise GroupError("inverse table inconsistent")
        if n <= 256:
            for a in range(n):
                if not (mul[mul[a]] == mul[a][mul]).all():
                    raise GroupError(f"associativity fails at a={a}")
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, size=(3, sample))
            if not (mul[mul[a, b], c] == mul[a, mul[b, c]]).all():
                raise GroupError("associativity fails on a sampled triple")

    def to_json(self) -> dict:
        out = {"label": self.label, "order": self.order, "mul": self.mul.ravel().tolist()}
        if self.element_names is not None:
            out["names"] = list(self.element_names)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        n = int(data["order"])
        mul = np.asarray(data["mul"], dtype=np.int64).reshape(n, n)
        names = tuple(data["names"]) if "names" in data else None
        g = cls(mul, data["label"], names)
        g.check()
        return g


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    elements: tuple
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        return m

    def __contains__(self, g) -> bool:
        return bool(self.mask[int(g)])

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.parent == other.parent and self.elements == other.elements

    def __hash__(self):
        return hash((self.parent.digest, self.elements))

    def __le__(self, other: "Subgroup") -> bool:
        return bool(other.mask[list(self.elements)].all())

    def __repr__(self):
        gens = ",".join(self.parent.name(g) for g in self.generators)
        return f"Subgroup(<{gens}>, order={self.order})"

    @cached_property
    def is_normal(self) -> bool:
        G = self.parent
        for h in self.generators:
            conj = G.mul[G.mul[:, h], G.inv]
            if not self.mask[conj].all():
                return False
        return True

    def describe(self) -> str:
        return "<" + ",".join(self.parent.name(g) for g in self.generators) + ">"


# ---------------------------------------------------------------------------
# construction

@dataclass(frozen=True)
class GroupSpec:
    family: str
    params: tuple = ()

    def __str__(self):
        return spec_label(self)


_FAMILIES = {"cyclic", "elementary_abelian", "dihedral", "symmetric", "quaternion8",
             "direct_product", "semidirect_reversal"}


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def spec_order(spec: GroupSpec) -> int:
    f, a = spec.family, spec.params
    if f == "cyclic":
        return a[0]
    if f == "elementary_abelian":
        return a[0] ** a[1]
    if f == "dihedral":
        return 2 * a[0]
    if f == "symmetric":
        return math.factorial(a[0])
    if f == "quaternion8":
        return 8
    if f == "direct_product":
        return spec_order(a[0]) * spec_order(a[1])
    if f == "semidirect_reversal":
        return 2 ** (a[0] + 1)
    raise GroupError(f"unknown family {f!r}")


def spec_label(spec: GroupSpec) -> str:
    f, a = spec.family, spec.params
    if f == "cyclic":
        return f"C{a[0]}"
    if f == "elementary_abelian":
        return f"Z{a[0]}^{a[1]}"
    if f == "dihedral":
        return f"D{2 * a[0]}"
    if f == "symmetric":
        return f"S{a[0]}"
    if f == "quaternion8":
        return "Q8"
    if f == "direct_product":
        return f"prod({spec_label(a[0])},{spec_label(a[1])})"
    if f == "semidirect_reversal":
        return f"Z2xZ2^{a[0]}"
    raise GroupError(f"unknown family {f!r}")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse ``S3``, ``Z2^4``, ``D8``, ``Q8``, ``C6``, ``Z2xZ2^5``, ``prod(C2,C3)``."""
    t = text.strip().replace(" ", "")
    if t.startswith("prod(") and t.endswith(")"):
        inner = t[5:-1]
        depth = 0
        for i, ch in enumerate(inner):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "," and depth == 0:
                return GroupSpec("direct_product", (parse_group_spec(inner[:i]), parse_group_spec(inner[i + 1:])))
        raise GroupError(f"cannot parse {text!r}")
    patterns = [
        (r"Z2xZ2\^(\d+)", lambda m: GroupSpec("semidirect_reversal", (int(m[1]),))),
        (r"Z(\d+)\^(\d+)", lambda m: GroupSpec("elementary_abelian", (int(m[1]), int(m[2])))),
        (r"[CZ](\d+)", lambda m: GroupSpec("cyclic", (int(m[1]),))),
        (r"S(\d+)", lambda m: GroupSpec("symmetric", (int(m[1]),))),
        (r"Q8", lambda m: GroupSpec("quaternion8")),
        (r"D(\d+)", lambda m: _dihedral_from_order(int(m[1]))),
    ]
    for pat, make in patterns:
        m = re.fullmatch(pat, t)
        if m:
            return make(m)
    raise GroupError(f"cannot parse group spec {text!r}")


def _dihedral_from_order(order: int) -> GroupSpec:
    if order < 2 or order % 2:
        raise GroupError("dihedral label D<n> needs an even order n")
    return GroupSpec("dihedral", (order // 2,))


def build_group(spec: GroupSpec | str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    if spec.family not in _FAMILIES:
        raise GroupError(f"unknown family {spec.family!r}")
    _validate(spec)
    n = spec_order(spec)
    if n > max_order:
        raise GroupError(f"{spec_label(spec)} has order {n} > {max_order}")
    G = _BUILDERS[spec.family](spec)
    return G


def _validate(spec: GroupSpec) -> None:
    f, a = spec.family, spec.params
    if f == "cyclic" and a[0] < 1:
        raise GroupError("cyclic(n) needs n >= 1")
    if f == "elementary_abelian" and (not _is_prime(a[0]) or a[1] < 1):
        raise GroupError(f"elementary_abelian needs prime p and r >= 1, got {a}")
    if f == "dihedral" and a[0] < 1:
        raise GroupError("dihedral(n) needs n >= 1")
    if f == "symmetric" and a[0] < 1:
        raise GroupError("symmetric(n) needs n >= 1")
    if f == "semidirect_reversal" and a[0] < 1:
        raise GroupError("semidirect_reversal(n) needs n >= 1")
    if f == "direct_product":
        _validate(a[0])
        _validate(a[1])


def _table(elements, op) -> np.ndarray:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        mul[i] = [index[op(a, b)] for b in elements]
    return mul


def _cyclic(spec):
    n = spec.params[0]
    idx = np.arange(n)
    mul = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(mul, spec_label(spec), tuple(str(k) for k in range(n)), ("cyclic", n), tuple(range(n)))


def _elementary_abelian(spec):
    p, r = spec.params
    elements = list(itertools.product(range(p), repeat=r))
    digits = np.array(elements, dtype=np.int64)
    weights = p ** np.arange(r - 1, -1, -1)
    summed = (digits[:, None, :] + digits[None, :, :]) % p
    mul = summed @ weights
    sep = "" if p <= 10 else ","
    names = tuple(sep.join(map(str, e)) for e in elements)
    return FiniteGroup(mul, spec_label(spec), names, ("elementary_abelian", p, r), tuple(elements))


def _dihedral(spec):
    n = spec.params[0]
    elements = [(k, e) for e in range(2) for k in range(n)]

    def op(a, b):
        return ((a[0] + (-1) ** a[1] * b[0]) % n, a[1] ^ b[1])

    def nm(el):
        k, e = el
        if k == 0 and e == 0:
            return "e"
        return (f"r{k}" if k else "") + ("s" if e else "")

    return FiniteGroup(_table(elements, op), spec_label(spec), tuple(map(nm, elements)),
                       ("dihedral", n), tuple(elements))


_QUAT_UNITS = ["1", "i", "j", "k"]
_QUAT_MUL = {  # (a, b) -> (sign, unit)
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def _quaternion8(spec):
    elements = [(s, u) for u in _QUAT_UNITS for s in (1, -1)]

    def op(a, b):
        s, u = _QUAT_MUL[a[1], b[1]]
        return (a[0] * b[0] * s, u)

    names = tuple(("" if s == 1 else "-") + u for s, u in elements)
    return FiniteGroup(_table(elements, op), "Q8", names, ("quaternion8",), tuple(elements))


def _perm_name(p) -> str:
    seen = set()
    cycles = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        cycles.append("(" + "".join(str(c + 1) for c in cyc) + ")")
    return "".join(cycles) or "e"


def _symmetric(spec):
    n = spec.params[0]
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    base = n ** np.arange(n - 1, -1, -1)
    codes = perms @ base  # lexicographic rank order == code order
    N = len(perms)
    mul = np.empty((N, N), dtype=np.int64)
    for i in range(N):
        composed = perms[i][perms]  # (g*h)(x) = g(h(x))
        mul[i] = np.searchsorted(codes, composed @ base)
    elements = tuple(tuple(int(x) for x in p) for p in perms)
    return FiniteGroup(mul, spec_label(spec), tuple(_perm_name(p) for p in elements),
                       ("symmetric", n), elements)


def _semidirect_reversal(spec):
    n = spec.params[0]
    size = 1 << n
    rev = np.array([int(format(v, f"0{n}b")[::-1], 2) for v in range(size)], dtype=np.int64)
    s = np.repeat([0, 1], size)
    v = np.tile(np.arange(size), 2)
    v2 = np.where(s[:, None] == 1, rev[v][None, :], v[None, :])
    mul = (s[:, None] ^ s[None, :]) * size + (v[:, None] ^ v2)
    names = tuple(("t" if si else "") + format(vi, f"0{n}b") for si, vi in zip(s, v))
    elements = tuple((int(si), int(vi)) for si, vi in zip(s, v))
    return FiniteGroup(mul, spec_label(spec), names, ("semidirect_reversal", n), elements)


def _direct_product(spec):
    A = build_group(spec.params[0])
    B = build_group(spec.params[1])
    nb = B.order
    mul = (A.mul[:, None, :, None] * nb + B.mul[None, :, None, :]).reshape(A.order * nb, A.order * nb)
    names = tuple(f"[{A.name(a)},{B.name(b)}]" for a in range(A.order) for b in range(nb))
    elements = tuple((a, b) for a in range(A.order) for b in range(nb))
    return FiniteGroup(mul, spec_label(spec), names, ("direct_product", A, B), elements)


_BUILDERS = {
    "cyclic": _cyclic,
    "elementary_abelian": _elementary_abelian,
    "dihedral": _dihedral,
    "symmetric": _symmetric,
    "quaternion8": _quaternion8,
    "semidirect_reversal": _semidirect_reversal,
    "direct_product": _direct_product,
}


def _parse_element_fallback(G: FiniteGroup, text: str) -> int:
    # cycle notation for symmetric groups, e.g. "(12)(34)" or "(1,2)"
    if G.family and G.family[0] == "symmetric" and re.fullmatch(r"(\([\d, ]*\))+", text):
        n = G.family[1]
        perm = list(range(n))
        for cyc in reversed(re.findall(r"\(([\d, ]*)\)", text)):
            pts = [int(c) - 1 for c in (cyc.split(",") if "," in cyc else list(cyc.replace(" ", "")))]
            step = list(range(n))
            for a, b in zip(pts, pts[1:] + pts[:1]):
                step[a] = b
            perm = [step[perm[i]] for i in range(n)]
        return G.elements.index(tuple(perm))
    raise GroupError(f"unknown element {text!r} in {G.label}")


def split_top_level(text: str, sep: str = ",") -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return [c.strip() for c in out]


# ---------------------------------------------------------------------------
# subgroups

def subgroup_generate(G: FiniteGroup, gens) -> Subgroup:
    gens = tuple(int(g) for g in gens)
    for g in gens:
        if not 0 <= g < G.order:
            raise GroupError(f"invalid element index {g}")
    mask = closure_mask(G.mul, gens)
    return Subgroup(G, tuple(int(x) for x in np.nonzero(mask)[0]), gens)


def parse_subgroup(G: FiniteGroup, text: str) -> Subgroup:
    """``gens=(12),(13)`` style; elements by name, ``#i`` or cycle notation."""
    t = text.strip()
    if t.startswith("gens="):
        t = t[5:]
    if t in ("", "{}", "[]"):
        return subgroup_generate(G, [])
    return subgroup_generate(G, [G.element(x) for x in split_top_level(t)])


def greedy_generators(G: FiniteGroup, candidates) -> tuple:
    """Walk candidates from highest element order down, keeping those that
    enlarge the generated subgroup."""
    candidates = [int(c) for c in candidates]
    cands = sorted((c for c in candidates if c != 0), key=lambda g: (-G.element_orders[g], g))
    gens: list[int] = []
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    target = len(set(candidates) | {0})
    for g in cands:
        if mask.sum() >= target:
            break
        if not mask[g]:
            gens.append(g)
            mask = closure_mask(G.mul, gens)
    return tuple(gens)


def normal_closure(G: FiniteGroup, H: Subgroup | list) -> Subgroup:
    gens = H.generators if isinstance(H, Subgroup) else tuple(H)
    if not gens:
        return subgroup_generate(G, [])
    conj = np.unique(G.mul[G.mul[:, list(gens)], G.inv[:, None]])
    N = subgroup_generate(G, conj)
    return Subgroup(G, N.elements, greedy_generators(G, N.elements))


def join(G: FiniteGroup, H: Subgroup, extra) -> Subgroup:
    """Smallest subgroup containing H and the elements ``extra``."""
    return subgroup_generate(G, tuple(H.generators) + tuple(int(x) for x in extra))


def enumerate_subgroups(G: FiniteGroup, bound: int = ENUMERATION_BOUND) -> list[Subgroup]:
    if G.order > bound:
        raise GroupError(f"|G|={G.order} exceeds the enumeration bound {bound}; use sampled subgroups")
    found: dict[bytes, Subgroup] = {}
    cyclics = []
    for g in range(G.order):
        H = subgroup_generate(G, [g] if g else [])
        key = H.mask.tobytes()
        if key not in found:
            found[key] = H
            cyclics.append(H)
    frontier = list(cyclics)
    while frontier:
        nxt = []
        for A in frontier:
            for C in cyclics:
                if not C.generators or A.mask[C.generators[0]]:
                    continue
                J = subgroup_generate(G, A.generators + C.generators)
                key = J.mask.tobytes()
                if key not in found:
                    found[key] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


def normal_subgroups(G: FiniteGroup, bound: int = ENUMERATION_BOUND) -> list[Subgroup]:
    return [H for H in enumerate_subgroups(G, bound) if H.is_normal]


def conjugacy_classes(G: FiniteGroup) -> list[tuple]:
    assigned = np.zeros(G.order, dtype=bool)
    classes = []
    for x in range(G.order):
        if assigned[x]:
            continue
        cls = np.unique(G.mul[G.mul[:, x], G.inv])
        assigned[cls] = True
        classes.append(tuple(int(c) for c in cls))
    return classes


def exponent(G: FiniteGroup) -> int:
    return int(reduce(math.lcm, (int(o) for o in G.element_orders), 1))


def coset_index(G: FiniteGroup, H: Subgroup):
    """Return ``([G:H], left cosets)``; cosets as sorted tuples in order of
    their smallest element."""
    assigned = np.zeros(G.order, dtype=bool)
    cosets = []
    hs = list(H.elements)
    for g in range(G.order):
        if assigned[g]:
            continue
        c = np.sort(G.mul[g, hs])
        assigned[c] = True
        cosets.append(tuple(int(x) for x in c))
    return G.order // H.order, cosets


def subgroup_as_group(G: FiniteGroup, H: Subgroup, label: str | None = None) -> FiniteGroup:
    """Re-index H as a standalone group (element i of the result is H.elements[i])."""
    els = np.array(H.elements, dtype=np.int64)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[els] = np.arange(len(els))
    mul = pos[G.mul[np.ix_(els, els)]]
    names = tuple(G.name(int(e)) for e in els) if G.element_names else None
    return FiniteGroup(mul, label or f"{G.label}|{H.describe()}", names)


def big_omega(n: int) -> int:
    """Number of prime factors of n counted with multiplicity."""
    count, d = 0, 2
    while d * d <= n:
        while n % d == 0:
            n //= d
            count += 1
        d += 1
    return count + (n > 1)


@dataclass(frozen=True)
class GammaResult:
    size: int
    witness: tuple
    exact: bool
    reading: str = "g not in <S minus g> (products with repetition and inverses)"


def _independent(G: FiniteGroup, S) -> bool:
    for i, g in enumerate(S):
        rest = S[:i] + S[i + 1:]
        if closure_mask(G.mul, rest)[g]:
            return False
    return True


def independent_subset_gamma(G: FiniteGroup, exact_bound: int = GAMMA_EXACT_BOUND) -> GammaResult:
    """Largest S with each g in S outside the subgroup generated by the rest.

    An independent set gives a strict subgroup chain, so its size is at most
    the number of prime factors of |G|; the exact search stops once that
    ceiling is reached. Above ``exact_bound`` a greedy witness is returned
    with ``exact=False``.
    """
    ceiling = big_omega(G.order) if G.order > 1 else 0
    cands = sorted(range(1, G.order), key=lambda g: (-G.element_orders[g], g))
    if G.order > exact_bound:
        S: tuple = ()
        for g in cands:
            if _independent(G, S + (g,)):
                S = S + (g,)
        return GammaResult(len(S), S, False)

    best: list = [()]

    def dfs(S: tuple, start: int) -> bool:
        if len(S) > len(best[0]):
            best[0] = S
            if len(S) == ceiling:
                return True
        if len(S) + (len(cands) - start) <= len(best[0]):
            return False
        for i in range(start, len(cands)):
            T = S + (cands[i],)
            if _independent(G, T) and dfs(T, i + 1):
                return True
        return False

    dfs((), 0)
    return GammaResult(len(best[0]), best[0], True)
