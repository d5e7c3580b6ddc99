"""Pure-numpy versions of the compiled kernels (same signatures and results)."""
import numpy as np


def closure_mask(mul, gens):
    n = mul.shape[0]
    seen = np.zeros(n, dtype=np.uint8)
    seen[0] = 1
    gens = np.asarray(gens, dtype=np.int64)
    if gens.size == 0:
        return seen
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        step = np.unique(mul[np.ix_(frontier, gens)].ravel())
        frontier = step[seen[step] == 0]
        seen[frontier] = 1
    return seen


def fq_rref(m, add, mul, neg, inv):
    rows, cols = m.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        s = inv[m[r, c]]
        if s != 1:
            m[r] = mul[s, m[r]]
        col = m[:, c].copy()
        col[r] = 0
        others = np.nonzero(col)[0]
        if others.size:
            f = neg[col[others]]
            m[others] = add[m[others], mul[f[:, None], m[r][None, :]]]
        pivots.append(c)
        r += 1
    return pivots


def fq_matmul(a, b, add, mul):
    n, k = a.shape
    out = np.zeros((n, b.shape[1]), dtype=np.int64)
    for t in range(k):
        out = add[out, mul[a[:, t][:, None], b[t][None, :]]]
    return out
