# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in _pykernels, same signatures."""

from itertools import permutations

from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

from .errors import ClassTooLarge

cdef enum:
    MAXN = 8
    MAXQ = 8


def twisted_orbit(bytes start, lefts, rights, Py_ssize_t cap):
    cdef Py_ssize_t k = len(lefts), i, j, t
    cdef unsigned char *ls = <unsigned char *> malloc(k * 256)
    cdef unsigned char *rs = <unsigned char *> malloc(k * 256)
    cdef unsigned char buf[256]
    cdef const unsigned char *x
    cdef bytes y, cur
    try:
        for j in range(k):
            memcpy(ls + 256 * j, <const unsigned char *> (<bytes> lefts[j]), 256)
            memcpy(rs + 256 * j, <const unsigned char *> (<bytes> rights[j]), 256)
        seen = {start}
        order = [start]
        i = 0
        while i < len(order):
            cur = order[i]
            x = cur
            i += 1
            for j in range(k):
                for t in range(256):
                    buf[t] = ls[256 * j + x[rs[256 * j + t]]]
                y = buf[:256]
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    if len(order) > cap:
                        raise ClassTooLarge(f"class exceeds {cap} elements")
        return order
    finally:
        free(ls)
        free(rs)


def group_layers(gens, simple_index, Py_ssize_t npos):
    cdef Py_ssize_t k = len(gens), j, t, ln
    cdef unsigned char *gs = <unsigned char *> malloc(k * 256)
    cdef int *roots = <int *> malloc(k * sizeof(int))
    cdef unsigned char inv[256]
    cdef unsigned char buf[256]
    cdef const unsigned char *x
    cdef bytes cur
    try:
        for j in range(k):
            memcpy(gs + 256 * j, <const unsigned char *> (<bytes> gens[j]), 256)
            roots[j] = simple_index[j]
        ident = bytes(range(256))
        layer = [ident]
        out = [(ident, 0)]
        ln = 0
        while layer:
            ln += 1
            nxt = {}
            for cur in layer:
                x = cur
                for t in range(256):
                    inv[x[t]] = <unsigned char> t
                for j in range(k):
                    if inv[roots[j]] < npos:
                        for t in range(256):
                            buf[t] = gs[256 * j + x[t]]
                        nxt[buf[:256]] = None
            layer = list(nxt)
            out.extend((y, ln) for y in layer)
        return out
    finally:
        free(gs)
        free(roots)


cdef struct Field:
    int q
    int add[MAXQ * MAXQ]
    int mul[MAXQ * MAXQ]
    int neg[MAXQ]
    int inv[MAXQ]


cdef void mat_mul(int n, int (*a)[MAXN], int (*b)[MAXN], int (*out)[MAXN], Field *f) nogil:
    cdef int i, j, t, c, r, q = f.q
    for i in range(n):
        for j in range(n):
            r = 0
            for t in range(n):
                c = a[i][t]
                if c:
                    r = f.add[r * q + f.mul[c * q + b[t][j]]]
            out[i][j] = r


cdef int mat_inverse(int n, int (*a)[MAXN], int (*out)[MAXN], Field *f) nogil:
    cdef int m[MAXN][2 * MAXN]
    cdef int i, j, r, col, piv, s, c, nc, q = f.q, w = 2 * n, tmp
    for i in range(n):
        for j in range(n):
            m[i][j] = a[i][j]
            m[i][n + j] = 1 if i == j else 0
    for col in range(n):
        piv = -1
        for r in range(col, n):
            if m[r][col]:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != col:
            for j in range(w):
                tmp = m[col][j]
                m[col][j] = m[piv][j]
                m[piv][j] = tmp
        s = f.inv[m[col][col]]
        for j in range(w):
            m[col][j] = f.mul[s * q + m[col][j]]
        for r in range(n):
            c = m[r][col]
            if r != col and c:
                nc = f.neg[c] * q
                for j in range(w):
                    m[r][j] = f.add[m[r][j] * q + f.mul[nc + m[col][j]]]
    for i in range(n):
        for j in range(n):
            out[i][j] = m[i][n + j]
    return 1


cdef int jump_code(int n, int (*coords)[MAXN], int *code, Field *f) nogil:
    cdef int piv[MAXN][MAXN]
    cdef int has[MAXN]
    cdef int v[MAXN]
    cdef int i, j, h, t, nc, s, q = f.q
    for i in range(n):
        has[i] = 0
    for j in range(n):
        for t in range(n):
            v[t] = coords[j][t]
        while True:
            h = n - 1
            while h >= 0 and not v[h]:
                h -= 1
            if h < 0:
                return 0
            if not has[h]:
                break
            nc = f.neg[v[h]] * q
            for t in range(n):
                v[t] = f.add[v[t] * q + f.mul[nc + piv[h][t]]]
        s = f.inv[v[h]]
        for t in range(n):
            piv[h][t] = f.mul[s * q + v[t]]
        has[h] = 1
        code[j] = h
    return 1


cdef int perm_rank(int n, int *p) nogil:
    """Lehmer rank of a permutation of 0..n-1."""
    cdef int r = 0, i, j, c
    for i in range(n):
        c = 0
        for j in range(i + 1, n):
            if p[j] < p[i]:
                c += 1
        r = r * (n - i) + c
    return r


def flag_spectrum(int n1, int q, add, mul, neg, inv, int mode, mat, dict out, leads=None):
    cdef Field f
    cdef int basis[MAXN][MAXN]
    cdef int image[MAXN][MAXN]
    cdef int tmp[MAXN][MAXN]
    cdef int binv[MAXN][MAXN]
    cdef int coords[MAXN][MAXN]
    cdef int M[MAXN][MAXN]
    cdef int code[MAXN]
    cdef int slot_row[MAXN * MAXN]
    cdef int slot_col[MAXN * MAXN]
    cdef int vals[MAXN * MAXN]
    cdef int nslots, i, j, t, pos, total = 1
    cdef long long *counts
    if n1 > MAXN or q > MAXQ:
        raise ValueError("dimension or field too large for the compiled kernel")
    f.q = q
    for i in range(q * q):
        f.add[i] = add[i]
        f.mul[i] = mul[i]
    for i in range(q):
        f.neg[i] = neg[i]
        f.inv[i] = inv[i]
    for i in range(n1):
        for j in range(n1):
            M[i][j] = mat[i][j]
    for i in range(2, n1 + 1):
        total *= i
    counts = <long long *> malloc(total * sizeof(long long))
    for i in range(total):
        counts[i] = 0
    try:
        for p in (leads if leads is not None else permutations(range(n1))):
            nslots = 0
            for i in range(n1):
                for j in range(n1):
                    basis[i][j] = 0
                basis[i][p[i]] = 1
                for j in range(p[i] + 1, n1):
                    if j not in p[:i]:
                        slot_row[nslots] = i
                        slot_col[nslots] = j
                        nslots += 1
            for i in range(nslots):
                vals[i] = 0
            with nogil:
                while True:
                    for i in range(nslots):
                        basis[slot_row[i]][slot_col[i]] = vals[i]
                    if mode == 0:
                        mat_mul(n1, basis, M, image, &f)
                    else:
                        mat_mul(n1, basis, M, tmp, &f)
                        mat_inverse(n1, tmp, binv, &f)
                        # reversed rows of the transpose
                        for i in range(n1):
                            for j in range(n1):
                                image[n1 - 1 - i][j] = binv[j][i]
                    mat_inverse(n1, basis, binv, &f)
                    mat_mul(n1, image, binv, coords, &f)
                    jump_code(n1, coords, code, &f)
                    counts[perm_rank(n1, code)] += 1
                    # odometer over the free entries
                    pos = 0
                    while pos < nslots:
                        vals[pos] += 1
                        if vals[pos] < q:
                            break
                        vals[pos] = 0
                        pos += 1
                    if pos == nslots:
                        break
        for rank_, perm in enumerate(permutations(range(n1))):
            if counts[rank_]:
                out[perm] = out.get(perm, 0) + counts[rank_]
        return out
    finally:
        free(counts)
