"""Arithmetic in F_q = F_p[x]/(f) through lookup tables, plus the matrix and
polynomial routines the module decomposition needs.

An element is the integer ``sum(c_i * p**i)`` for the coefficient vector
``c`` of its polynomial representative. Tables are q-by-q, so this is meant
for q up to a few hundred.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property, lru_cache

import numpy as np

from . import kernels


class FieldError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def multiplicative_order(a: int, m: int) -> int:
    """Order of a in (Z/m)^*; requires gcd(a, m) == 1. ord_1 is 1."""
    if m == 1:
        return 1
    if math.gcd(a, m) != 1:
        raise FieldError(f"{a} is not a unit modulo {m}")
    k, x = 1, a % m
    while x != 1:
        x = x * a % m
        k += 1
    return k


# small polynomial helpers over F_p, coefficient lists low degree first

def _ptrim(a):
    while a and a[-1] == 0:
        a = a[:-1]
    return a


def _pmod_p(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _ptrim(a)
    return a


def _is_irreducible_p(f, p) -> bool:
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            if not _pmod_p(f, g, p):
                return False
    return True


@lru_cache(maxsize=None)
def lowest_irreducible(p: int, k: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree k over F_p,
    ordering by the integer sum(c_i p^i) of the lower coefficients."""
    if k == 1:
        return (0, 1)
    for code in range(p ** k):
        tail = [(code // p ** i) % p for i in range(k)]
        if tail[0] == 0:
            continue
        f = tail + [1]
        if _is_irreducible_p(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")


class FqField:
    def __init__(self, p: int, k: int = 1, modulus=None):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        if k < 1:
            raise FieldError("extension degree must be >= 1")
        self.p, self.k = p, k
        self.q = p ** k
        self.modulus = tuple(modulus) if modulus is not None else lowest_irreducible(p, k)
        if len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if k > 1 and not _is_irreducible_p(list(self.modulus), p):
            raise FieldError(f"modulus {self.modulus} is reducible over F_{p}")
        self._build_tables()

    def __repr__(self):
        return f"FqField(p={self.p}, k={self.k})"

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        digits = np.array([[(x // p ** i) % p for i in range(k)] for x in range(q)], dtype=np.int64)
        weights = p ** np.arange(k)
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        # multiply polynomials then reduce x^j for j >= k via precomputed residues
        red = np.zeros((2 * k - 1, k), dtype=np.int64)
        for j in range(2 * k - 1):
            mono = [0] * j + [1]
            r = _pmod_p(mono, list(self.modulus), p) if j >= k else mono
            red[j, :len(r)] = r
        prod = np.zeros((q, q, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[:, :, i + j] += digits[:, None, i] * digits[None, :, j]
        self.mul = ((prod @ red) % p) @ weights
        self.inv = np.zeros(q, dtype=np.int64)
        nz = np.nonzero(self.mul == 1)
        self.inv[nz[0]] = nz[1]
        for t in (self.add, self.mul, self.neg, self.inv):
            t.setflags(write=False)
        self.tables = (self.add, self.mul, self.neg, self.inv)

    @property
    def one(self) -> int:
        return 1

    def from_int(self, n: int) -> int:
        return n % self.p

    def power(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = int(self.mul[r, a])
            a = int(self.mul[a, a])
            e >>= 1
        return r

    @cached_property
    def bits_per_element(self) -> int:
        return max(1, math.ceil(math.log2(self.q)))

    def describe(self) -> dict:
        return {"p": self.p, "k": self.k, "q": self.q, "modulus": list(self.modulus)}

    # ----- matrices ----------------------------------------------------
    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, a, b) -> np.ndarray:
        return kernels.fq_matmul(a, b, self.tables)

    def matvec(self, a, v) -> np.ndarray:
        return self.matmul(a, np.asarray(v).reshape(-1, 1)).ravel()

    def madd(self, a, b) -> np.ndarray:
        return self.add[a, b]

    def msub(self, a, b) -> np.ndarray:
        return self.add[a, self.neg[b]]

    def scale(self, c: int, a) -> np.ndarray:
        return self.mul[c, a]

    def rref(self, m):
        return kernels.fq_rref(np.asarray(m, dtype=np.int64).reshape(len(m), -1), self.tables)

    def rank(self, m) -> int:
        m = np.asarray(m, dtype=np.int64)
        if m.size == 0:
            return 0
        return len(self.rref(m)[1])

    def nullspace(self, m) -> np.ndarray:
        """Rows form a basis of {x : m x = 0}, in reduced echelon form."""
        m = np.asarray(m, dtype=np.int64)
        ncols = m.shape[1]
        if m.shape[0] == 0:
            return np.eye(ncols, dtype=np.int64)
        r, piv = self.rref(m)
        free = [c for c in range(ncols) if c not in set(piv)]
        basis = np.zeros((len(free), ncols), dtype=np.int64)
        for i, f in enumerate(free):
            basis[i, f] = 1
            for row, pc in enumerate(piv):
                basis[i, pc] = self.neg[r[row, f]]
        if len(basis):
            basis, _ = self.rref(basis)
        return basis

    def echelon_basis(self, vectors) -> np.ndarray:
        """Reduced echelon basis of the row span."""
        v = np.asarray(vectors, dtype=np.int64)
        if v.size == 0:
            return v.reshape(0, v.shape[-1] if v.ndim == 2 else 0)
        r, piv = self.rref(v)
        return r[: len(piv)]

    def inverse(self, m) -> np.ndarray:
        n = len(m)
        aug = np.hstack([np.asarray(m, dtype=np.int64), np.eye(n, dtype=np.int64)])
        r, piv = self.rref(aug)
        if piv[:n] != list(range(n)):
            raise FieldError("matrix is singular")
        return r[:, n:]

    def solve_in_basis(self, basis, vectors) -> np.ndarray:
        """Coordinates of each row of ``vectors`` w.r.t. the rows of an echelon ``basis``."""
        piv = [int(np.nonzero(row)[0][0]) for row in basis]
        coords = np.asarray(vectors, dtype=np.int64)[:, piv]
        # basis is reduced echelon with unit pivots, so pivot entries are the coordinates
        return coords

    def poly_of_matrix(self, coeffs, a) -> np.ndarray:
        """f(A) for f given by coefficients low degree first (Horner)."""
        n = len(a)
        out = np.zeros((n, n), dtype=np.int64)
        for c in reversed(list(coeffs)):
            out = self.matmul(out, a)
            out[np.arange(n), np.arange(n)] = self.add[out[np.arange(n), np.arange(n)], c]
        return out

    def random_elements(self, rng, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    # ----- polynomials over F_q (lists of ints, low degree first) -------
    def ptrim(self, a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    def padd(self, a, b):
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        return self.ptrim([int(self.add[x, y]) for x, y in zip(a, b)])

    def psub(self, a, b):
        return self.padd(a, [int(self.neg[x]) for x in b])

    def pmul(self, a, b):
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = int(self.add[out[i + j], self.mul[x, y]])
        return self.ptrim(out)

    def pdivmod(self, a, b):
        a = self.ptrim(a)
        b = self.ptrim(b)
        if not b:
            raise ZeroDivisionError
        inv_lead = int(self.inv[b[-1]])
        quo = [0] * max(0, len(a) - len(b) + 1)
        while len(a) >= len(b):
            c = int(self.mul[a[-1], inv_lead])
            shift = len(a) - len(b)
            quo[shift] = c
            for i, bi in enumerate(b):
                a[shift + i] = int(self.add[a[shift + i], self.neg[self.mul[c, bi]]])
            a = self.ptrim(a)
        return self.ptrim(quo), a

    def pmod(self, a, b):
        return self.pdivmod(a, b)[1]

    def pmonic(self, a):
        a = self.ptrim(a)
        if not a:
            return a
        c = int(self.inv[a[-1]])
        return [int(self.mul[c, x]) for x in a]

    def pgcd(self, a, b):
        a, b = self.ptrim(a), self.ptrim(b)
        while b:
            a, b = b, self.pmod(a, b)
        return self.pmonic(a)

    def ppowmod(self, a, e: int, m):
        result = [1]
        a = self.pmod(a, m)
        while e:
            if e & 1:
                result = self.pmod(self.pmul(result, a), m)
            a = self.pmod(self.pmul(a, a), m)
            e >>= 1
        return result

    def pderiv(self, a):
        return self.ptrim([int(self.mul[self.from_int(i), c]) for i, c in enumerate(a)][1:])

    def factor(self, f, rng) -> list:
        """Distinct monic irreducible factors of f (multiplicities dropped)."""
        f = self.pmonic(f)
        if len(f) <= 2:
            return [f] if len(f) == 2 else []
        # reduce to the squarefree part
        g = self.pgcd(f, self.pderiv(f))
        if len(g) > 1:
            if len(self.pderiv(f)) == 0:
                # f(x) = h(x^p): take the p-th root of coefficients
                root = [self.power(c, self.q // self.p) for c in f[:: self.p]]
                return self.factor(root, rng)
            out = self.factor(self.pdivmod(f, g)[0], rng)
            for h in self.factor(g, rng):
                if h not in out:
                    out.append(h)
            return out
        factors = []
        rest = f
        d = 1
        xq = [0, 1]
        while len(rest) - 1 >= 2 * d:
            xq = self.ppowmod(xq, self.q, rest)
            h = self.pgcd(rest, self.psub(xq, [0, 1]))
            if len(h) > 1:
                factors.extend(self._equal_degree(h, d, rng))
                rest = self.pdivmod(rest, h)[0]
                xq = self.pmod(xq, rest)
            d += 1
        if len(rest) > 1:
            factors.append(self.pmonic(rest))
        return sorted(factors, key=lambda h: (len(h), h))

    def _equal_degree(self, f, d, rng):
        n = len(f) - 1
        if n == d:
            return [f]
        while True:
            a = self.ptrim([int(x) for x in rng.integers(0, self.q, size=n)])
            if len(a) < 2:
                continue
            if self.p == 2:
                # trace map a + a^2 + ... + a^(2^(kd-1))
                t, s = a, a
                for _ in range(self.k * d - 1):
                    s = self.pmod(self.pmul(s, s), f)
                    t = self.padd(t, s)
                b = t
            else:
                b = self.psub(self.ppowmod(a, (self.q ** d - 1) // 2, f), [1])
            g = self.pgcd(f, b)
            if 1 < len(g) < len(f):
                return self._equal_degree(g, d, rng) + self._equal_degree(self.pdivmod(f, g)[0], d, rng)


def choose_splitting_field(group_exponent: int, p: int, group_order: int | None = None) -> FqField:
    """F_q with q = p^(ord_m(p)), m the exponent of the group."""
    if group_order is not None and group_order % p == 0:
        raise FieldError(f"p={p} divides |G|={group_order}")
    if not _is_prime(p):
        raise FieldError(f"{p} is not prime")
    return FqField(p, multiplicative_order(p, group_exponent))
