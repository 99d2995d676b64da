"""Finite Coxeter systems realised as permutation groups on their roots.

Every group element is stored as the permutation it induces on the
enumerated root set.  Positive roots get indices 0..N-1 and the negative
of root i is root i+N, so the sign of a root is just ``index >= N``.
Permutations are kept as 256-byte tables (identity past 2N) which lets
composition run through ``bytes.translate``.

Generators are labelled 1..n in the public API (Bourbaki numbering);
internal arrays are 0-based.
"""

import re
from dataclasses import dataclass
from functools import cached_property
from math import prod

from .errors import InvalidType, NoSuchGenerator, NonCrystallographic

IDENT = bytes(range(256))

_TYPE_RE = re.compile(r"^\s*([ABDEFGHI])(\d+)(?:\((\d+)\))?\s*$")


@dataclass(frozen=True)
class TypeSpec:
    family: str  # one of A B D E F H I
    rank_or_m: int  # rank, or the gonality m for I2

    def __post_init__(self):
        f, n = self.family, self.rank_or_m
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "D": n >= 4,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "H": n in (3, 4),
            # 2m roots must fit into one byte
            "I": 3 <= n <= 127,
        }.get(f, False)
        if not ok:
            raise InvalidType(f"no finite Coxeter type {f}{n}")

    @property
    def rank(self):
        return 2 if self.family == "I" else self.rank_or_m

    @property
    def name(self):
        if self.family == "I":
            return f"I2({self.rank_or_m})"
        return f"{self.family}{self.rank_or_m}"

    def __str__(self):
        return self.name


def parse_type(text):
    """'E7' -> TypeSpec('E', 7); 'I2(8)' -> TypeSpec('I', 8); 'G2' is I2(6)."""
    if isinstance(text, TypeSpec):
        return text
    m = _TYPE_RE.match(str(text))
    if not m:
        raise InvalidType(f"cannot parse type {text!r}")
    fam, n, gon = m.group(1), int(m.group(2)), m.group(3)
    if fam == "G":
        if n != 2 or gon:
            raise InvalidType(f"cannot parse type {text!r}")
        return TypeSpec("I", 6)
    if fam == "I":
        if n != 2 or gon is None:
            raise InvalidType("dihedral types are written I2(m)")
        return TypeSpec("I", int(gon))
    if gon is not None:
        raise InvalidType(f"cannot parse type {text!r}")
    return TypeSpec(fam, n)


def degrees(spec):
    f, n = spec.family, spec.rank_or_m
    if f == "A":
        return list(range(2, n + 2))
    if f == "B":
        return list(range(2, 2 * n + 1, 2))
    if f == "D":
        return sorted(list(range(2, 2 * n - 1, 2)) + [n])
    if f == "I":
        return [2, n]
    return {
        ("E", 6): [2, 5, 6, 8, 9, 12],
        ("E", 7): [2, 6, 8, 10, 12, 14, 18],
        ("E", 8): [2, 8, 12, 14, 18, 20, 24, 30],
        ("F", 4): [2, 6, 8, 12],
        ("H", 3): [2, 6, 10],
        ("H", 4): [2, 12, 20, 30],
    }[(f, n)]


class Golden:
    """a + b*tau with tau^2 = tau + 1."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a, self.b = a, b

    def __add__(self, o):
        o = _gold(o)
        return Golden(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _gold(o)
        return Golden(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _gold(o) - self

    def __neg__(self):
        return Golden(-self.a, -self.b)

    def __mul__(self, o):
        o = _gold(o)
        # (a + b t)(c + d t) = ac + (ad + bc) t + bd (t + 1)
        bd = self.b * o.b
        return Golden(self.a * o.a + bd, self.a * o.b + self.b * o.a + bd)

    __rmul__ = __mul__

    def __eq__(self, o):
        o = _gold(o)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def sign(self):
        # value = (x + y*sqrt5)/2 with x = 2a + b, y = b
        x, y = 2 * self.a + self.b, self.b
        if x >= 0 and y >= 0:
            return 0 if x == y == 0 else 1
        if x <= 0 and y <= 0:
            return -1
        if x > 0:
            return 1 if x * x > 5 * y * y else -1
        return 1 if 5 * y * y > x * x else -1

    def __repr__(self):
        return f"Golden({self.a}, {self.b})"


def _gold(x):
    return x if isinstance(x, Golden) else Golden(x, 0)


def _sign(c):
    if isinstance(c, Golden):
        return c.sign()
    return (c > 0) - (c < 0)


def _graph(spec):
    """Coxeter matrix (0-based) and, when there is one, the pairing matrix
    pair[k][j] = 2(a_k, a_j)/(a_k, a_k) used to reflect root coordinates."""
    f, n = spec.family, spec.rank
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    edges = []
    if f == "A":
        edges = [(i, i + 1, 3) for i in range(n - 1)]
    elif f == "B":
        edges = [(i, i + 1, 3) for i in range(n - 2)] + [(n - 2, n - 1, 4)]
    elif f == "D":
        edges = [(i, i + 1, 3) for i in range(n - 2)] + [(n - 3, n - 1, 3)]
    elif f == "E":
        edges = [(0, 2, 3), (1, 3, 3)] + [(i, i + 1, 3) for i in range(2, n - 1)]
    elif f == "F":
        edges = [(0, 1, 3), (1, 2, 4), (2, 3, 3)]
    elif f == "H":
        edges = [(0, 1, 5)] + [(i, i + 1, 3) for i in range(1, n - 1)]
    elif f == "I":
        edges = [(0, 1, spec.rank_or_m)]
    for i, j, w in edges:
        m[i][j] = m[j][i] = w
    if f == "I":
        return m, None
    zero = Golden(0) if f == "H" else 0
    pair = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        pair[i][i] = pair[i][i] + 2
    for i, j, w in edges:
        if w == 3:
            pair[i][j] = pair[j][i] = zero - 1
        elif w == 5:
            pair[i][j] = pair[j][i] = Golden(0, -1)
        elif w == 4:
            # long root first in Bourbaki numbering for B_n and F4
            pair[i][j], pair[j][i] = -1, -2
    return m, pair


def _g2_pair():
    # Bourbaki G2: alpha_1 short, alpha_2 long
    return [[2, -3], [-1, 2]]


def _enumerate_roots(pair, n):
    """Positive roots in simple-root coordinates by closing the simple roots
    under simple reflections."""
    zero = pair[0][0] - pair[0][0]
    one = zero + 1
    simple = [tuple(one if j == i else zero for j in range(n)) for i in range(n)]
    roots = list(simple)
    seen = set(roots)
    k = 0
    while k < len(roots):
        beta = roots[k]
        for i in range(n):
            if beta == simple[i]:
                continue
            c = zero
            for j in range(n):
                c = c + beta[j] * pair[i][j]
            gamma = tuple(beta[j] - c if j == i else beta[j] for j in range(n))
            if gamma not in seen:
                seen.add(gamma)
                roots.append(gamma)
        k += 1
    for r in roots:
        assert all(_sign(c) >= 0 for c in r)
    return roots


def _reflect(beta, i, pair):
    c = beta[0] - beta[0]
    for j in range(len(beta)):
        c = c + beta[j] * pair[i][j]
    return tuple(beta[j] - c if j == i else beta[j] for j in range(len(beta)))


class GroupElement:
    """A group element as a 256-byte permutation table of root indices."""

    __slots__ = ("perm", "_length")

    def __init__(self, perm, length=None):
        self.perm = perm
        self._length = length

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.perm == other.perm

    def __hash__(self):
        return hash(self.perm)

    def __repr__(self):
        return f"GroupElement(<{len(self.perm)} bytes>, length={self._length})"


@dataclass(frozen=True)
class DiagramAutomorphism:
    """Permutation of the generator labels; node_perm[i-1] is the image of i."""

    node_perm: tuple

    def __call__(self, label):
        return self.node_perm[label - 1]

    @property
    def order(self):
        k, p = 1, self.node_perm
        while any(p[i] != i + 1 for i in range(len(p))):
            p = tuple(self.node_perm[x - 1] for x in p)
            k += 1
        return k

    @property
    def is_identity(self):
        return self.order == 1

    def compose(self, other):
        """self after other."""
        return DiagramAutomorphism(tuple(self(other(i + 1)) for i in range(len(self.node_perm))))

    def inverse(self):
        inv = [0] * len(self.node_perm)
        for i, x in enumerate(self.node_perm):
            inv[x - 1] = i + 1
        return DiagramAutomorphism(tuple(inv))

    def orbits(self, labels=None):
        """Orbits of <sigma> on ``labels`` (default all nodes), each sorted,
        listed by smallest member.  ``labels`` must be sigma-stable."""
        labels = set(range(1, len(self.node_perm) + 1) if labels is None else labels)
        out = []
        for s in sorted(labels):
            if any(s in o for o in out):
                continue
            orb, t = [s], self(s)
            while t != s:
                orb.append(t)
                t = self(t)
            if not set(orb) <= labels:
                raise ValueError(f"{sorted(labels)} is not stable under {self.node_perm}")
            out.append(tuple(sorted(orb)))
        return out

    def is_stable(self, labels):
        return {self(s) for s in labels} == set(labels)


def identity_automorphism(rank):
    return DiagramAutomorphism(tuple(range(1, rank + 1)))


class CoxeterSystem:
    """Finite Coxeter system with its root permutation representation.

    Attributes: spec, rank, coxeter_matrix (0-based list of lists),
    simple_roots, all_roots, positive_count (N), simple_index (root index
    of each simple root), generators (GroupElement per generator, 0-based).
    """

    def __init__(self, spec, crystal=False):
        self.spec = spec
        self.rank = n = spec.rank
        self.coxeter_matrix, pair = _graph(spec)
        if crystal:
            # I2(3), I2(4), I2(6) realised by the A2, B2, G2 root systems
            pair = {3: [[2, -1], [-1, 2]], 4: [[2, -1], [-2, 2]], 6: _g2_pair()}[spec.rank_or_m]
        self._pair = pair
        if spec.family == "I" and not crystal:
            m = spec.rank_or_m
            # root k sits at angle k*pi/m; 0..m-1 are positive
            self.positive_count = N = m
            self.all_roots = [(k,) for k in range(2 * m)]
            self.simple_index = [0, m - 1]
            tables = [
                [(m - k) % (2 * m) for k in range(2 * m)],
                [(m - 2 - k) % (2 * m) for k in range(2 * m)],
            ]
        else:
            pos = _enumerate_roots(pair, n)
            self.positive_count = N = len(pos)
            neg = [tuple(-c for c in r) for r in pos]
            self.all_roots = pos + neg
            index = {r: i for i, r in enumerate(self.all_roots)}
            self.simple_index = list(range(n))
            tables = [[index[_reflect(r, i, pair)] for r in self.all_roots] for i in range(n)]
        if 2 * N > 256:
            raise InvalidType(f"{spec} has too many roots for byte permutations")
        tables = self._group_roots_by_class(tables, N)
        self.simple_roots = [self.all_roots[i] for i in self.simple_index]
        self.generators = [GroupElement(bytes(t) + IDENT[2 * N:], 1) for t in tables]
        self.identity_element = GroupElement(IDENT, 0)
        # x -> 1 iff root x is negative; used to count inversions quickly
        self._negtab = bytes(1 if N <= x < 2 * N else 0 for x in range(256))
        self._build_root_parents()
        self._check()

    # -- construction helpers ------------------------------------------
    def _group_roots_by_class(self, tables, N):
        """Re-index so the positive roots of each W-orbit (one per generator
        conjugacy class) are contiguous; per-class inversion counts then
        become slice counts."""
        classes = self.generator_classes()
        gen_class = {s: ci for ci, cl in enumerate(classes) for s in cl}
        root_class = {r: gen_class[k + 1] for k, r in enumerate(self.simple_index)}
        queue = list(root_class)
        for r in queue:
            for t in tables:
                x = t[r]
                if x < N and x not in root_class:
                    root_class[x] = root_class[r]
                    queue.append(x)
        order = sorted(range(N), key=lambda i: (root_class[i], i))
        new = [0] * (2 * N)
        for ni, oi in enumerate(order):
            new[oi], new[oi + N] = ni, ni + N
        out = []
        for t in tables:
            nt = [0] * (2 * N)
            for i in range(2 * N):
                nt[new[i]] = new[t[i]]
            out.append(nt)
        roots = [None] * (2 * N)
        for i in range(2 * N):
            roots[new[i]] = self.all_roots[i]
        self.all_roots = roots
        self.simple_index = [new[r] for r in self.simple_index]
        self.root_class_of = [root_class[oi] for oi in order]
        self.class_ranges = []
        for ci in range(len(classes)):
            idx = [i for i in range(N) if self.root_class_of[i] == ci]
            self.class_ranges.append((idx[0], idx[-1] + 1))
        self.generator_class_index = [gen_class[s] for s in range(1, self.rank + 1)]
        return out

    def class_counts(self, w):
        """Occurrences of each generator class in any reduced word of w."""
        p, neg = w.perm, self._negtab
        return tuple(p[a:b].translate(neg).count(1) for a, b in self.class_ranges)

    def _build_root_parents(self):
        """For each root index r record (p, k) with root r = s_k(root p);
        simple roots get (None, k)."""
        N = self.positive_count
        parent = {}
        queue = []
        for k, r in enumerate(self.simple_index):
            parent[r] = (None, k)
            queue.append(r)
        i = 0
        while i < len(queue):
            r = queue[i]
            for k, g in enumerate(self.generators):
                x = g.perm[r]
                if x < N and x not in parent:
                    parent[x] = (r, k)
                    queue.append(x)
            i += 1
        if len(parent) != N:
            raise AssertionError("simple roots do not generate the positive roots")
        self._root_parent = parent

    def _check(self):
        N = self.positive_count
        for g in self.generators:
            p = g.perm
            assert all(p[p[i]] == i for i in range(2 * N))
            assert all(p[i + N] == (p[i] + N) % (2 * N) for i in range(N))
            assert sum(1 for i in range(N) if p[i] >= N) == 1
        assert N == sum(d - 1 for d in degrees(self.spec))

    @property
    def order(self):
        return prod(degrees(self.spec))

    @property
    def labels(self):
        return list(range(1, self.rank + 1))

    def __repr__(self):
        return f"CoxeterSystem({self.spec})"

    def _gen(self, label):
        if not 1 <= label <= self.rank:
            raise NoSuchGenerator(f"{self.spec} has no generator {label}")
        return self.generators[label - 1]

    # -- group arithmetic ------------------------------------------------
    def identity(self):
        return self.identity_element

    def generator(self, label):
        return self._gen(label)

    def multiply(self, a, b):
        return GroupElement(b.perm.translate(a.perm))

    def invert(self, a):
        return GroupElement(bytes.maketrans(a.perm, IDENT), a._length)

    def element_from_word(self, word):
        perm = IDENT
        for s in reversed(list(word)):
            perm = perm.translate(self._gen(s).perm)
        return GroupElement(perm)

    def element(self, word):
        """Accepts a word as a list of labels or a space-separated string."""
        if isinstance(word, str):
            word = parse_word(word)
        return self.element_from_word(word)

    def length(self, w):
        if w._length is None:
            w._length = w.perm[: self.positive_count].translate(self._negtab).count(1)
        return w._length

    def right_descents(self, w):
        N = self.positive_count
        return {k + 1 for k, r in enumerate(self.simple_index) if w.perm[r] >= N}

    def left_descents(self, w):
        N = self.positive_count
        return {k + 1 for k, r in enumerate(self.simple_index) if w.perm.index(r) >= N}

    def is_left_descent(self, w, label):
        return w.perm.index(self.simple_index[label - 1]) >= self.positive_count

    def is_right_descent(self, w, label):
        return w.perm[self.simple_index[label - 1]] >= self.positive_count

    def reduced_word(self, w):
        """Strip the smallest left descent until the identity is reached."""
        word = []
        perm = w.perm
        N = self.positive_count
        while perm != IDENT:
            for k, r in enumerate(self.simple_index):
                if perm.index(r) >= N:
                    break
            else:  # pragma: no cover
                raise AssertionError("non-identity element without descents")
            word.append(k + 1)
            perm = perm.translate(self.generators[k].perm)
        w._length = len(word)
        return word

    def word_string(self, w):
        return " ".join(map(str, self.reduced_word(w)))

    def longest_element(self, J=None):
        """w_J, built by multiplying on the right by ascents inside J."""
        J = self.labels if J is None else sorted(J)
        perm, N, steps = IDENT, self.positive_count, 0
        idx = [(self.simple_index[s - 1], self._gen(s).perm) for s in J]
        while True:
            for r, g in idx:
                if perm[r] < N:
                    perm = g.translate(perm)
                    steps += 1
                    break
            else:
                return GroupElement(perm, steps)

    @cached_property
    def w0(self):
        return self.longest_element()

    def support(self, w):
        return set(self.reduced_word(w))

    def parabolic_contains(self, J, w):
        return self.support(w) <= set(J)

    def reflection(self, root_index):
        """The reflection in the given root, as a group element."""
        N = self.positive_count
        r = root_index % N
        p, k = self._root_parent[r]
        g = self.generators[k]
        if p is None:
            return g
        inner = self.reflection(p)
        return self.multiply(self.multiply(g, inner), g)

    def generator_classes(self):
        """Partition of labels into conjugacy classes (odd-m connectivity)."""
        n = self.rank
        comp = list(range(n))

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for i in range(n):
            for j in range(i + 1, n):
                if self.coxeter_matrix[i][j] % 2 == 1:
                    comp[find(i)] = find(j)
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i + 1)
        return sorted(groups.values())

    # -- diagram automorphisms -------------------------------------------
    @cached_property
    def _automorphisms(self):
        n, m = self.rank, self.coxeter_matrix
        found = []

        def extend(img):
            i = len(img)
            if i == n:
                found.append(DiagramAutomorphism(tuple(x + 1 for x in img)))
                return
            for x in range(n):
                if x in img:
                    continue
                if m[x][x] != m[i][i]:
                    continue
                if all(m[img[j]][x] == m[j][i] for j in range(i)):
                    extend(img + [x])

        extend([])
        return found

    def diagram_automorphisms(self):
        return list(self._automorphisms)

    def involutive_automorphisms(self):
        return [a for a in self._automorphisms if a.order <= 2]

    def _conj_generator(self, x, label):
        g = self.multiply(self.multiply(x, self._gen(label)), x)
        for t, h in enumerate(self.generators):
            if h == g:
                return t + 1
        return None

    @cached_property
    def _opposition(self):
        w0 = self.w0
        img = tuple(self._conj_generator(w0, s) for s in self.labels)
        sigma0 = DiagramAutomorphism(img)
        if None in img or sigma0 not in self._automorphisms:
            raise AssertionError("conjugation by w0 is not a diagram automorphism")
        return sigma0

    def opposition(self):
        return self._opposition

    def identity_sigma(self):
        return identity_automorphism(self.rank)

    def _sigma_table(self, sigma):
        """Root permutation pi with pi s_k pi^-1 = s_{sigma(k)}."""
        cache = self.__dict__.setdefault("_sigma_cache", {})
        if sigma.node_perm in cache:
            return cache[sigma.node_perm]
        if sigma not in self._automorphisms:
            raise ValueError(f"{sigma.node_perm} is not a diagram automorphism of {self.spec}")
        N = self.positive_count
        pi = list(range(256))
        parent = self._root_parent
        # roots in BFS order so parents are mapped first
        order = sorted(parent, key=lambda r: _depth(parent, r))
        for r in order:
            p, k = parent[r]
            img_k = sigma(k + 1) - 1
            if p is None:
                pi[r] = self.simple_index[img_k]
            else:
                pi[r] = self.generators[img_k].perm[pi[p]]
            pi[r + N] = (pi[r] + N) % (2 * N)
        pi = bytes(pi)
        piinv = bytes.maketrans(pi, IDENT)
        for k, g in enumerate(self.generators):
            conj = piinv.translate(g.perm).translate(pi)
            if conj != self.generators[sigma(k + 1) - 1].perm:
                raise AssertionError("sigma does not extend to the root permutations")
        cache[sigma.node_perm] = (pi, piinv)
        return pi, piinv

    def apply_sigma(self, sigma, w):
        if sigma.is_identity:
            return w
        pi, piinv = self._sigma_table(sigma)
        return GroupElement(piinv.translate(w.perm).translate(pi), w._length)

    def sigma_by_name(self, name):
        """'id', 'flip' (the opposition, or the 3<->4 swap in D4 / the
        non-trivial involution where unique), 'triality', 'triality2'."""
        name = name.strip().lower()
        if name in ("id", "identity", "1"):
            return self.identity_sigma()
        autos = self._automorphisms
        if name == "flip":
            invs = [a for a in autos if a.order == 2]
            if not invs:
                raise ValueError(f"{self.spec} has no non-trivial diagram involution")
            if self.spec.family == "D":
                n = self.rank
                swap = list(range(1, n + 1))
                swap[n - 2], swap[n - 1] = n, n - 1
                return DiagramAutomorphism(tuple(swap))
            if len(invs) > 1:  # pragma: no cover - only D4 has several
                raise ValueError("ambiguous flip")
            return invs[0]
        if name in ("triality", "triality2"):
            if self.spec.family != "D" or self.rank != 4:
                raise ValueError("triality exists only for D4")
            tri = DiagramAutomorphism((3, 2, 4, 1))  # 1 -> 3 -> 4 -> 1
            return tri if name == "triality" else tri.inverse()
        if name.startswith("perm:"):
            img = tuple(int(x) for x in name[5:].split(","))
            a = DiagramAutomorphism(img)
            if a not in autos:
                raise ValueError(f"{img} is not a diagram automorphism")
            return a
        raise ValueError(f"unknown automorphism name {name!r}")

    # -- highest root ----------------------------------------------------
    def polar_check(self):
        """Highest root phi, the polar set {i : <alpha_i, phi> != 0}, and whether
        w0 * s_phi equals the longest element of the complementary parabolic."""
        spec = self.spec
        if spec.family == "H" or (spec.family == "I" and spec.rank_or_m not in (3, 4, 6)):
            raise NonCrystallographic(f"{spec} has no crystallographic root system")
        if spec.family == "I" and self._pair is None:
            return CoxeterSystem(spec, crystal=True).polar_check()
        N = self.positive_count
        pos = self.all_roots[:N]
        heights = [sum(r) for r in pos]
        top = max(range(N), key=heights.__getitem__)
        assert heights.count(heights[top]) == 1
        phi = pos[top]
        pair = self._pair
        polar = {i + 1 for i in range(self.rank) if sum(phi[j] * pair[i][j] for j in range(self.rank)) != 0}
        lhs = self.multiply(self.w0, self.reflection(top))
        rhs = self.longest_element(set(self.labels) - polar)
        return phi, polar, lhs == rhs

    def enumerate_group(self):
        from .kernels import enumerate_group

        return [GroupElement(p, l) for p, l in enumerate_group(self)]


def _depth(parent, r):
    d = 0
    while parent[r][0] is not None:
        r = parent[r][0]
        d += 1
    return d


_CACHE = {}


def build_system(spec):
    """Build (and cache) the Coxeter system for a TypeSpec or type string."""
    spec = parse_type(spec)
    if spec not in _CACHE:
        _CACHE[spec] = CoxeterSystem(spec)
    return _CACHE[spec]


def parse_word(text):
    """'1 2 1' or '121' (single digits) -> [1, 2, 1]."""
    text = text.strip()
    if not text:
        return []
    if " " in text or "," in text:
        return [int(x) for x in text.replace(",", " ").split()]
    return [int(c) for c in text]
