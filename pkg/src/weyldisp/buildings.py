"""Thin Coxeter complexes and complete-flag buildings over GF(q), with
automorphisms, Weyl distance and displacement spectra.

Flags are stored as canonical adapted bases (lists of row vectors over
GF(q) coded 0..q-1).  Linear maps act on row vectors from the right, so a
matrix written for column vectors enters as its transpose.
"""

import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product

from . import flagalg
from .coxeter import build_system, parse_type
from .errors import EvenDimension, NoSuchGenerator, NotAFlag, ReduciblePolynomial
from .kernels import flag_spectrum as _flag_kernel

# -- finite fields -----------------------------------------------------------


class FiniteField:
    """GF(q) for q in {2, 3, 4, 5}, elements coded 0..q-1 with 0 and 1 the
    additive and multiplicative identities.  GF(4) = GF(2)[x]/(x^2+x+1)
    with code a0 + 2*a1."""

    SUPPORTED = (2, 3, 4, 5)

    def __init__(self, q):
        if q not in self.SUPPORTED:
            raise ValueError(f"GF({q}) is not supported; use one of {self.SUPPORTED}")
        self.q = q
        if q == 4:
            add = [a ^ b for a in range(4) for b in range(4)]
            mul = [_gf4_mul(a, b) for a in range(4) for b in range(4)]
        else:
            add = [(a + b) % q for a in range(q) for b in range(q)]
            mul = [(a * b) % q for a in range(q) for b in range(q)]
        self.add, self.mul = add, mul
        self.neg = [next(b for b in range(q) if add[a * q + b] == 0) for a in range(q)]
        self.inv = [0] + [next(b for b in range(1, q) if mul[a * q + b] == 1) for a in range(1, q)]

    @property
    def tables(self):
        return self.add, self.mul, self.neg, self.inv, self.q

    def a(self, x, y):
        return self.add[x * self.q + y]

    def m(self, x, y):
        return self.mul[x * self.q + y]

    def from_int(self, k):
        """Image of the integer k (prime fields) or the code k (GF(4))."""
        if self.q == 4:
            return k % 4
        return k % self.q

    def __repr__(self):
        return f"GF({self.q})"


def _gf4_mul(a, b):
    r = 0
    for i in range(2):
        if b >> i & 1:
            r ^= a << i
    if r & 4:
        r ^= 0b111
    return r


_FIELDS = {}


def field_of(q):
    if q not in _FIELDS:
        _FIELDS[q] = FiniteField(q)
    return _FIELDS[q]


# -- permutations and A_n elements ---------------------------------------------

# Orientation of the jump permutation.  A jump at (j, i) of the
# intersection table of (V_i) and (U_j) is read as w(j) = i and used as is.
# The inverse reading breaks delta(C, D) = s, delta(D, E) = w,
# l(sw) = l(w) + 1 => delta(C, E) = sw; the building-axiom test pins this.
_INVERT_JUMP = False


def permutation_word(perm):
    """Reduced word (labels 1..n) of a permutation of 0..n in one-line
    notation, s_k acting by swapping positions k-1 and k."""
    p = list(perm)
    word = []
    while True:
        for k in range(len(p) - 1):
            if p[k] > p[k + 1]:
                p[k], p[k + 1] = p[k + 1], p[k]
                word.append(k + 1)
                break
        else:
            return word[::-1]


def _inverse_perm(perm):
    out = [0] * len(perm)
    for j, i in enumerate(perm):
        out[i] = j
    return tuple(out)


# -- flag buildings --------------------------------------------------------------


class FlagBuilding:
    """Complete flags of GF(q)^(n+1): the building of type A_n over GF(q)."""

    def __init__(self, n, q):
        self.n = n
        self.dim = n + 1
        self.field = field_of(q)
        self.q = q
        self.system = build_system(parse_type(f"A{n}"))
        self._elements = {}

    @classmethod
    def from_model(cls, text):
        """'A3:F2' -> FlagBuilding(3, 2)."""
        t, f = text.upper().split(":")
        if not t.startswith("A") or not f.startswith("F"):
            raise ValueError(f"model must look like A3:F2, got {text!r}")
        return cls(int(t[1:]), int(f[1:]))

    @property
    def name(self):
        return f"A{self.n}:F{self.q}"

    def chambers(self):
        return flagalg.canonical_flags(self.dim, self.q)

    def chamber_count(self):
        from .counting import poincare

        return poincare(self.system, self.q)

    def canonical(self, rows):
        add, mul, neg, inv, q = self.field.tables
        if len(rows) != self.dim or any(len(r) != self.dim for r in rows):
            raise NotAFlag(f"need {self.dim} vectors of length {self.dim}")
        try:
            return flagalg.canonicalize(rows, add, mul, neg, inv, q)
        except ValueError as exc:
            raise NotAFlag(str(exc)) from None

    def random_chamber(self, rng):
        q, d = self.q, self.dim
        add, mul, neg, inv, _ = self.field.tables
        while True:
            rows = [[rng.randrange(q) for _ in range(d)] for _ in range(d)]
            if flagalg.rank(rows, add, mul, neg, inv, q) == d:
                return flagalg.canonicalize(rows, add, mul, neg, inv, q)

    def element_of_code(self, code):
        """Group element for a jump permutation code."""
        w = self._elements.get(code)
        if w is None:
            perm = _inverse_perm(code) if _INVERT_JUMP else code
            w = self.system.element_from_word(permutation_word(perm))
            self._elements[code] = w
        return w

    def distance_code(self, C, D):
        add, mul, neg, inv, q = self.field.tables
        cinv = flagalg.mat_inverse(C, add, mul, neg, inv, q)
        if cinv is None:
            raise NotAFlag("first argument is not a basis")
        coords = flagalg.mat_mul(D, cinv, add, mul, q)
        try:
            return flagalg.jump_permutation(coords, add, mul, neg, inv, q)
        except ValueError:
            raise NotAFlag("second argument is not a basis") from None

    def weyl_distance(self, C, D):
        return self.element_of_code(self.distance_code(C, D))

    def panel_neighbours(self, C, i):
        """Chambers differing from C exactly in the i-th subspace (1-based)."""
        q = self.q
        add, mul, *_ = self.field.tables
        out = []
        a, b = C[i - 1], C[i]
        # V_i' = V_{i-1} + <b + t a>, and V_i'' = V_{i-1} + <b>
        for t in range(q):
            v = [add[b[k] * q + mul[t * q + a[k]]] for k in range(self.dim)]
            rows = C[: i - 1] + [v, a] + C[i + 1:]
            out.append(self.canonical(rows))
        return [D for D in out if D != C]


@dataclass
class BuildingAutomorphism:
    """A collineation (mode 0, rows map v -> v M) or a correlation (mode 1,
    flag (V_i) -> (V_{n+1-i}^perp) for the bilinear form M)."""

    kind: str
    matrix: list
    mode: int
    sigma: object
    building: object = field(repr=False)
    label: str = ""

    def image(self, C):
        b = self.building
        add, mul, neg, inv, q = b.field.tables
        if self.mode == 0:
            rows = flagalg.mat_mul(C, self.matrix, add, mul, q)
        else:
            rows = flagalg.dual_flag_basis(C, self.matrix, add, mul, neg, inv, q)
        return b.canonical(rows)

    def to_json(self):
        return {"kind": self.kind, "label": self.label, "matrix": self.matrix, "sigma": list(self.sigma.node_perm)}


def collineation(b, matrix, label="matrix"):
    """Collineation v -> v M for a matrix given in row convention."""
    add, mul, neg, inv, q = b.field.tables
    m = [[b.field.from_int(x) for x in row] for row in matrix]
    if flagalg.mat_inverse(m, add, mul, neg, inv, q) is None:
        raise ValueError("matrix is singular")
    return BuildingAutomorphism("collineation", m, 0, b.system.identity_sigma(), b, label)


def correlation(b, form, label="correlation"):
    """Correlation sending each subspace to its perp under the bilinear form."""
    add, mul, neg, inv, q = b.field.tables
    m = [[b.field.from_int(x) for x in row] for row in form]
    if flagalg.mat_inverse(m, add, mul, neg, inv, q) is None:
        raise ValueError("form is degenerate")
    return BuildingAutomorphism("correlation", m, 1, b.system.opposition(), b, label)


def symplectic_form(dim, fld):
    m = [[0] * dim for _ in range(dim)]
    for k in range(0, dim, 2):
        m[k][k + 1] = 1
        m[k + 1][k] = fld.neg[1]
    return m


def symplectic_polarity(b):
    if b.dim % 2:
        raise EvenDimension("a symplectic polarity needs an even-dimensional space")
    return correlation(b, symplectic_form(b.dim, b.field), "symplectic-polarity")


def _mat_pow_order(m, fld, limit):
    add, mul, neg, inv, q = fld.tables
    ident = [[1 if i == j else 0 for j in range(len(m))] for i in range(len(m))]
    x = m
    for k in range(1, limit + 1):
        if x == ident:
            return k
        x = flagalg.mat_mul(x, m, add, mul, q)
    return None


def primitive_companion(fld):
    """2x2 matrix of multiplication by a generator lambda of GF(q^2)^*,
    lambda not in GF(q), on the basis (1, lambda)."""
    q = fld.q
    for c1, c0 in product(range(q), range(q)):
        # x^2 + c1 x + c0 without roots in GF(q)
        if any(fld.a(fld.a(fld.m(x, x), fld.m(c1, x)), c0) == 0 for x in range(q)):
            continue
        comp = [[0, 1], [fld.neg[c0], fld.neg[c1]]]
        if _mat_pow_order(comp, fld, q * q - 1) == q * q - 1:
            return comp
    raise NoSuchGenerator(f"no primitive quadratic over GF({q})")


def spread_collineation(b):
    """Multiplication by a primitive element of GF(q^2) on GF(q^2)^((n+1)/2)."""
    if b.dim % 2:
        raise EvenDimension("a line spread needs an even-dimensional space")
    comp = primitive_companion(b.field)
    m = [[0] * b.dim for _ in range(b.dim)]
    for k in range(0, b.dim, 2):
        for i in range(2):
            for j in range(2):
                m[k + i][k + j] = comp[i][j]
    return BuildingAutomorphism("spread_collineation", m, 0, b.system.identity_sigma(), b, "spread")


def sl3_matrix(fld, a):
    """[[-a, 0, 1], [-1, 0, 0], [0, -1, 0]] over the field."""
    a = fld.from_int(a)
    n1 = fld.neg[1]
    return [[fld.neg[a], 0, 1], [n1, 0, 0], [0, n1, 0]]


def sl3_example(q, a):
    """Collineation of the projective plane over GF(q) given by the matrix
    above acting on column vectors; needs X^3 + aX^2 - 1 irreducible."""
    fld = field_of(q)
    av = fld.from_int(a)
    for x in range(q):
        x2 = fld.m(x, x)
        val = fld.a(fld.a(fld.m(x2, x), fld.m(av, x2)), fld.neg[1])
        if val == 0:
            raise ReduciblePolynomial(f"X^3 + {a}X^2 - 1 has the root {x} in GF({q})")
    b = FlagBuilding(2, q)
    mat = flagalg.transpose(sl3_matrix(fld, a))
    return b, BuildingAutomorphism("sl3_example", mat, 0, b.system.identity_sigma(), b, f"sl3:{a}")


def fixed_points(b, theta):
    """Projective points fixed by a collineation."""
    fld = b.field
    add, mul, neg, inv, q = fld.tables
    out = []
    for v in product(range(q), repeat=b.dim):
        lead = next((x for x in v if x), None)
        if lead != 1:
            continue
        img = flagalg.mat_mul([list(v)], theta.matrix, add, mul, q)[0]
        if flagalg.rank([list(v), img], add, mul, neg, inv, q) == 1:
            out.append(v)
    return out


def spread_lines(b, theta):
    """Lines <v, v theta> through every point; for the spread collineation
    these are the GF(q^2)-points.  Returns (lines, all_fixed)."""
    fld = b.field
    add, mul, neg, inv, q = fld.tables
    seen, all_fixed = set(), True
    for v in product(range(q), repeat=b.dim):
        if next((x for x in v if x), None) != 1:
            continue
        v = list(v)
        img = flagalg.mat_mul([v], theta.matrix, add, mul, q)[0]
        if flagalg.rank([v, img], add, mul, neg, inv, q) != 2:
            # v is a fixed point, so <v, v theta> is not a line
            all_fixed = False
            continue
        key = _subspace_key([v, img], fld)
        if key in seen:
            continue
        seen.add(key)
        img2 = flagalg.mat_mul([img], theta.matrix, add, mul, q)[0]
        if flagalg.rank([v, img, img2], add, mul, neg, inv, q) != 2:
            all_fixed = False
    return seen, all_fixed


def _subspace_key(rows, fld):
    """Reduced row echelon form as a hashable key."""
    add, mul, neg, inv, q = fld.tables
    m = [list(r) for r in rows]
    ncol = len(m[0])
    rk = 0
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
    return tuple(tuple(r) for r in m[:rk])


# -- spectra ---------------------------------------------------------------------


def _kernel_job(args):
    n1, q, tables, mode, mat, perms = args
    add, mul, neg, inv = tables
    out = {}
    _flag_kernel(n1, q, add, mul, neg, inv, mode, mat, out, perms)
    return out


def default_threads():
    try:
        return max(1, int(os.environ.get("WEYLDISP_THREADS", "1")))
    except ValueError:
        return 1


def spectrum(b, theta, exhaustive=True, samples=None, seed=0, threads=None, progress=None):
    """Displacement spectrum w -> #{C : delta(C, C^theta) = w}."""
    threads = threads or default_threads()
    counts = Counter()
    if exhaustive:
        add, mul, neg, inv, q = b.field.tables
        leads = list(permutations(range(b.dim)))
        if threads > 1:
            chunks = [leads[i::threads] for i in range(threads)]
            jobs = [(b.dim, q, (add, mul, neg, inv), theta.mode, theta.matrix, ch) for ch in chunks]
            with ProcessPoolExecutor(threads) as ex:
                parts = list(ex.map(_kernel_job, jobs))
        else:
            parts = [_kernel_job((b.dim, q, (add, mul, neg, inv), theta.mode, theta.matrix, leads))]
        for part in parts:
            for code, k in part.items():
                counts[b.element_of_code(code)] += k
        visited = sum(counts.values())
        seed = None
    else:
        rng = random.Random(seed)
        samples = samples or 10000
        for i in range(samples):
            C = b.random_chamber(rng)
            counts[b.weyl_distance(C, theta.image(C))] += 1
            if progress and i % 1000 == 999:
                progress(f"{i + 1}/{samples} chambers sampled")
        visited = samples
    return SpectrumReport(b.system, theta.sigma, dict(counts), exhaustive, visited, seed,
                          model=b.name, automorphism=theta.label or theta.kind, q=b.q)


@dataclass
class SpectrumReport:
    system: object
    sigma: object
    counts: dict
    exhaustive: bool
    visited: int
    seed: object = None
    model: str = ""
    automorphism: str = ""
    q: object = None

    @property
    def disp(self):
        return set(self.counts)

    def sorted_items(self):
        sys = self.system
        return sorted(self.counts.items(), key=lambda kv: (sys.length(kv[0]), sys.reduced_word(kv[0])))

    def classes(self):
        """The sigma-classes meeting disp, each enumerated once."""
        from .twisted import enumerate_class

        out = []
        for w in self.disp:
            if not any(w in c for c in out):
                out.append(enumerate_class(self.system, w, self.sigma))
        return out

    def union_of_classes(self):
        return all(all(v in self.counts for v in c) for c in self.classes())

    def uniclass(self):
        cl = self.classes()
        return len(cl) == 1 and len(cl[0]) == len(self.counts)

    def upward_closed(self):
        """w in disp and l(s w s^sigma) = l(w) + 2 imply s w s^sigma in disp."""
        from .twisted import twisted_step

        sys = self.system
        for w in self.disp:
            lw = sys.length(w)
            for s in sys.labels:
                x = twisted_step(sys, w, s, self.sigma)
                if sys.length(x) == lw + 2 and x not in self.counts:
                    return False
        return True

    def contains_involution(self):
        e = self.system.identity()
        return any(self.system.multiply(w, w) == e for w in self.disp)

    def contains_sigma_involution(self):
        from .twisted import is_sigma_involution

        return any(is_sigma_involution(self.system, w, self.sigma) for w in self.disp)

    def all_sigma_involutions(self):
        from .twisted import is_sigma_involution

        return all(is_sigma_involution(self.system, w, self.sigma) for w in self.disp)

    def fixed_diagram(self):
        return _read_diagram(self.system, self.disp, self.sigma, opposite=False)

    def opposition_diagram(self):
        return _read_diagram(self.system, self.disp, self.sigma, opposite=True)

    def duality_holds(self):
        """Opp = psi(Fix); None when the spectrum is not a bi-capped class."""
        from .diagrams import psi_diagram
        from .errors import NotBicapped

        try:
            return psi_diagram(self.fixed_diagram()) == self.opposition_diagram()
        except NotBicapped:
            return None

    def verdicts(self):
        out = {
            "union_of_classes": self.union_of_classes(),
            "uniclass": self.uniclass(),
            "contains_involution": self.contains_involution(),
            "contains_sigma_involution": self.contains_sigma_involution(),
            "fixed_diagram": self.fixed_diagram().symbol,
            "opposition_diagram": self.opposition_diagram().symbol,
        }
        if self.exhaustive:
            out["upward_closed"] = self.upward_closed()
        if out["uniclass"]:
            out["opp_is_psi_fix"] = self.duality_holds()
        return out

    def to_json(self):
        sys = self.system
        data = {
            "model": self.model,
            "automorphism": self.automorphism,
            "exhaustive": self.exhaustive,
            "chambers": self.visited,
            "sigma": list(self.sigma.node_perm),
            "spectrum": [{"word": sys.word_string(w), "length": sys.length(w), "count": k} for w, k in self.sorted_items()],
            "verdicts": self.verdicts(),
        }
        if self.seed is not None:
            data["seed"] = self.seed
        return data


def _read_diagram(system, disp, sigma, opposite):
    """Encircled nodes: union over w in disp of the largest tau-stable subset
    of S outside supp(w) (fixed) or outside supp(w w0) (opposite)."""
    from .diagrams import AdmissibleDiagram
    from .twisted import sigma_times_opposition

    tau = sigma_times_opposition(system, sigma) if opposite else sigma
    S = set(system.labels)
    enc = set()
    for w in disp:
        x = system.multiply(w, system.w0) if opposite else w
        enc |= _stable_core(S - system.support(x), tau)
    return AdmissibleDiagram(system, frozenset(enc), tau)


def _stable_core(free, tau):
    """Largest tau-stable subset of ``free``."""
    out = set(free)
    changed = True
    while changed:
        changed = False
        for s in list(out):
            if tau(s) not in out:
                out.discard(s)
                changed = True
    return out


# -- counting recursion ------------------------------------------------------------


def counting_recursion_check(report, params=None):
    """Check |D_{sws^sigma}| = q_s|D_w| + (q_s - 1)|D_{sw}| and
    |D_{ws^sigma}| = |D_{sw}| whenever l(s w s^sigma) = l(w) + 2, over all w
    in W (missing counts are 0).  Returns (ok, first counterexample)."""
    from .twisted import twisted_step

    if not report.exhaustive:
        raise ValueError("the recursion check needs an exhaustive spectrum")
    sys = report.system
    sigma = report.sigma
    counts = {w.perm: k for w, k in report.counts.items()}
    qs = params or [report.q] * sys.rank
    for w in sys.enumerate_group():
        lw = sys.length(w)
        for s in sys.labels:
            x = twisted_step(sys, w, s, sigma)
            if sys.length(x) != lw + 2:
                continue
            sw = sys.multiply(sys.generator(s), w)
            ws = sys.multiply(w, sys.generator(sigma(s)))
            q = qs[s - 1]
            lhs = counts.get(x.perm, 0)
            rhs = q * counts.get(w.perm, 0) + (q - 1) * counts.get(sw.perm, 0)
            if lhs != rhs or counts.get(ws.perm, 0) != counts.get(sw.perm, 0):
                return False, {"w": sys.reduced_word(w), "s": s, "lhs": lhs, "rhs": rhs}
    return True, None


# -- thin buildings ----------------------------------------------------------------


@dataclass
class ThinAutomorphism:
    """u -> w u^sigma on the Coxeter complex."""

    base: object
    sigma: object


class ThinBuilding:
    """Chambers are the elements of W and delta(u, v) = u^-1 v."""

    def __init__(self, system):
        self.system = system

    def distance(self, u, v):
        return self.system.multiply(self.system.invert(u), v)

    def image(self, theta, u):
        return self.system.multiply(theta.base, self.system.apply_sigma(theta.sigma, u))

    def spectrum(self, theta):
        sys = self.system
        w = theta.base.perm
        if theta.sigma.is_identity:
            pi = piinv = None
        else:
            pi, piinv = sys._sigma_table(theta.sigma)
        ident = sys.identity().perm
        counts = Counter()
        for u in sys.enumerate_group():
            p = u.perm
            uinv = bytes.maketrans(p, ident)
            us = p if pi is None else piinv.translate(p).translate(pi)
            # u^-1 * w * u^sigma
            counts[us.translate(w).translate(uinv)] += 1
        from .coxeter import GroupElement

        return SpectrumReport(sys, theta.sigma, {GroupElement(p): k for p, k in counts.items()}, True, sum(counts.values()),
                              model=f"thin {sys.spec}", automorphism="thin")


def thin_spectrum(b, theta):
    """Spectrum of a thin automorphism, checked against the sigma-class of
    its base element."""
    from .errors import InternalContradiction
    from .twisted import enumerate_class

    rep = b.spectrum(theta)
    c = enumerate_class(b.system, theta.base, theta.sigma)
    if set(rep.counts) != set(c):
        raise InternalContradiction("thin spectrum differs from the twisted class")
    return rep
