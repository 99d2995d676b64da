"""Linear algebra over small finite fields with elements coded 0..q-1.

Field operations come as flat lookup tables (index a*q + b) so the same
data can be handed to the compiled kernel.  Matrices are lists of rows.
"""

from itertools import permutations, product


def mat_mul(a, b, add, mul, q):
    n, m, k = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = a[i]
        r = [0] * k
        for t in range(m):
            c = row[t]
            if c:
                bt = b[t]
                base = c * q
                for j in range(k):
                    r[j] = add[r[j] * q + mul[base + bt[j]]]
        out.append(r)
    return out


def mat_inverse(a, add, mul, neg, inv, q):
    """Gauss-Jordan inverse; returns None when singular."""
    n = len(a)
    m = [list(a[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    w = 2 * n
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        s = inv[m[col][col]]
        prow = m[col] = [mul[s * q + x] for x in m[col]]
        for r in range(n):
            c = m[r][col]
            if r != col and c:
                nc = neg[c] * q
                row = m[r]
                m[r] = [add[row[j] * q + mul[nc + prow[j]]] for j in range(w)]
    return [row[n:] for row in m]


def transpose(a):
    return [list(r) for r in zip(*a)]


def rank(rows, add, mul, neg, inv, q):
    m = [list(r) for r in rows]
    if not m:
        return 0
    rk, ncol = 0, len(m[0])
    for col in range(ncol):
        piv = next((r for r in range(rk, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        s = inv[m[rk][col]]
        m[rk] = [mul[s * q + x] for x in m[rk]]
        for r in range(len(m)):
            c = m[r][col]
            if r != rk and c:
                nc = neg[c] * q
                m[r] = [add[m[r][j] * q + mul[nc + m[rk][j]]] for j in range(ncol)]
        rk += 1
    return rk


def dual_flag_basis(basis, form, add, mul, neg, inv, q):
    """Adapted basis of the flag (V_{n}^perp, ..., V_1^perp) for the flag
    spanned by the rows of ``basis``: the dual basis d_k with
    b_i . form . d_k^T = [i == k], listed in reverse."""
    g = mat_inverse(mat_mul(basis, form, add, mul, q), add, mul, neg, inv, q)
    if g is None:
        raise ValueError("degenerate form")
    d = transpose(g)
    return d[::-1]


def jump_permutation(coords, add, mul, neg, inv, q):
    """Relative position of two flags.

    Row j of ``coords`` gives the (j+1)-th basis vector of the second flag
    in the adapted basis of the first.  Entry j of the result is the
    smallest i with U_{j+1} inside V_{i+1} + U_j, i.e. the position of the
    (j, i) jump in the intersection-dimension table.
    """
    n = len(coords)
    pivots = {}
    out = [0] * n
    for j in range(n):
        v = list(coords[j])
        while True:
            h = n - 1
            while h >= 0 and not v[h]:
                h -= 1
            if h < 0:
                raise ValueError("rows are dependent")
            r = pivots.get(h)
            if r is None:
                break
            nc = neg[v[h]] * q
            v = [add[v[t] * q + mul[nc + r[t]]] for t in range(n)]
        s = inv[v[h]]
        pivots[h] = [mul[s * q + x] for x in v]
        out[j] = h
    return tuple(out)


def canonical_flags(n, q, leads=None):
    """Every complete flag of GF(q)^n once, as its canonical adapted basis.

    Row i has its leading 1 at column p[i] and zeros in the columns of the
    earlier leading entries; the remaining columns to the right are free.
    ``leads`` optionally restricts the pivot permutations p.
    """
    for p in leads if leads is not None else permutations(range(n)):
        slots = []
        for i in range(n):
            used = set(p[:i])
            slots.append([c for c in range(p[i] + 1, n) if c not in used])
        flat = [(i, c) for i in range(n) for c in slots[i]]
        for values in product(range(q), repeat=len(flat)):
            rows = [[0] * n for _ in range(n)]
            for i in range(n):
                rows[i][p[i]] = 1
            for (i, c), x in zip(flat, values):
                rows[i][c] = x
            yield rows


def canonicalize(rows, add, mul, neg, inv, q):
    """Canonical adapted basis of the flag spanned by successive rows."""
    n = len(rows[0])
    out, leads = [], []

    def axpy(v, c, b):
        nc = neg[c] * q
        return [add[v[t] * q + mul[nc + b[t]]] for t in range(n)]

    for r in rows:
        v = list(r)
        while True:
            lead = next((c for c in range(n) if v[c]), None)
            if lead is None:
                raise ValueError("rows are dependent")
            if lead not in leads:
                break
            v = axpy(v, v[lead], out[leads.index(lead)])
        s = inv[v[lead]]
        v = [mul[s * q + x] for x in v]
        for c in sorted(leads):
            if c > lead and v[c]:
                v = axpy(v, v[c], out[leads.index(c)])
        out.append(v)
        leads.append(lead)
    return out
