"""Pure-Python kernels.  Same signatures as the compiled module."""

from .errors import ClassTooLarge


def twisted_orbit(start, lefts, rights, cap):
    """Closure of ``start`` under x -> L x R for the paired tables.

    Permutations are 256-byte tables; (L x R)[i] = L[x[R[i]]].
    Returns the elements in breadth-first order.
    """
    pairs = list(zip(lefts, rights))
    seen = {start}
    order = [start]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for left, right in pairs:
            y = right.translate(x).translate(left)
            if y not in seen:
                seen.add(y)
                order.append(y)
                if len(order) > cap:
                    raise ClassTooLarge(f"class exceeds {cap} elements")
    return order


def group_layers(gens, simple_index, npos):
    """All group elements as (perm, length), layer by layer in length."""
    ident = bytes(range(256))
    layer = [ident]
    out = [(ident, 0)]
    k = 0
    pairs = list(zip(simple_index, gens))
    while layer:
        k += 1
        nxt = {}
        for x in layer:
            for r, g in pairs:
                # s is a left ascent of x iff x^-1(alpha_s) is positive
                if x.index(r) < npos:
                    y = x.translate(g)
                    nxt[y] = None
        layer = list(nxt)
        out.extend((y, k) for y in layer)
    return out


def flag_spectrum(n1, q, add, mul, neg, inv, mode, mat, out, leads=None):
    """Displacement counts of a linear automorphism or correlation on all
    complete flags of GF(q)^n1.  Fields are given by flattened tables.

    mode 0: collineation, image basis = B @ mat
    mode 1: correlation w.r.t. the bilinear form ``mat``; image flag is
            the orthogonal flag listed in reverse.
    ``out`` maps a permutation code (tuple) to its count and is updated.
    ``leads`` restricts the run to flags with the given pivot permutations.
    """
    from .flagalg import canonical_flags, dual_flag_basis, jump_permutation, mat_inverse, mat_mul

    for basis in canonical_flags(n1, q, leads):
        if mode == 0:
            image = mat_mul(basis, mat, add, mul, q)
        else:
            image = dual_flag_basis(basis, mat, add, mul, neg, inv, q)
        binv = mat_inverse(basis, add, mul, neg, inv, q)
        coords = mat_mul(image, binv, add, mul, q)
        code = jump_permutation(coords, add, mul, neg, inv, q)
        out[code] = out.get(code, 0) + 1
    return out
