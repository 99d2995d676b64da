"""Admissible diagrams: symbols, relative types and the duality on them.

A diagram is (system, encircled nodes, sigma).  The bi-capped class
behind it is the sigma-class of w_J where J is the set of nodes that are
not encircled.

Symbols follow ``[twist]<family><rank>;<orbits>[p][^j][(m)]``, e.g.
"2E6;4", "B4;2^2", "I2;1^1(8)", "D6;3p2".  Diagrams outside the named
families get an explicit form such as "E7;2[1,7]".
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from .coxeter import DiagramAutomorphism, build_system, parse_type
from .errors import ClassTooLarge, NotBicapped, NotCoxeterSystem
from .twisted import (
    cap_certificate,
    enumerate_class,
    sigma_times_opposition,
    twisted_step,
)


@dataclass(frozen=True)
class AdmissibleDiagram:
    system: object
    encircled: frozenset
    sigma: DiagramAutomorphism

    def __post_init__(self):
        object.__setattr__(self, "encircled", frozenset(self.encircled))
        if not self.sigma.is_stable(self.encircled):
            raise ValueError("encircled nodes must be a union of sigma-orbits")

    def __eq__(self, other):
        return (
            isinstance(other, AdmissibleDiagram)
            and self.system.spec == other.system.spec
            and self.encircled == other.encircled
            and self.sigma == other.sigma
        )

    def __hash__(self):
        return hash((self.system.spec, self.encircled, self.sigma))

    @property
    def J(self):
        """The non-encircled nodes, i.e. the lower cap of the class."""
        return frozenset(self.system.labels) - self.encircled

    @property
    def orbits(self):
        return self.sigma.orbits(self.encircled)

    @property
    def symbol(self):
        return diagram_symbol(self.system, self.encircled, self.sigma)

    def __repr__(self):
        return f"AdmissibleDiagram({self.symbol})"


# -- symbols --------------------------------------------------------------

def _evens(a, b):
    return frozenset(range(a, b + 1, 2))


@lru_cache(maxsize=None)
def _catalogue_for(spec):
    """{(encircled, sigma node_perm): symbol} for the named diagrams of a type."""
    system = build_system(spec)
    f, n = spec.family, spec.rank
    S = frozenset(system.labels)
    ident = system.identity_sigma().node_perm
    s0 = system.opposition().node_perm
    flip = None
    if any(a.order == 2 for a in system.diagram_automorphisms()):
        flip = system.sigma_by_name("flip").node_perm
    tw0 = "2" if s0 != ident and f != "D" else ""
    out = {}

    def put(E, sig, sym):
        out[(frozenset(E), sig)] = sym

    if f == "I":
        m = spec.rank_or_m
        put(S, ident, f"I2;2({m})")
        put((), s0, f"{tw0}I2;0({m})")
        if m % 2 == 0:
            put({1}, ident, f"I2;1^1({m})")
            put({2}, ident, f"I2;1^2({m})")
            put(S, flip, f"2I2;1({m})")
        return out
    put(S, ident, f"{f}{n};{n}")
    put((), s0, f"{tw0}{f}{n};0")
    if f == "A" and n % 2 == 1 and n > 1:
        put(_evens(2, n - 1), ident, f"A{n};{(n - 1) // 2}^2")
        put(S, flip, f"2A{n};{(n + 1) // 2}^1")
    elif f == "B":
        for j in range(n + 1):
            put(range(1, j + 1), ident, f"B{n};{j}^1")
        if n % 2 == 0:
            put(_evens(2, n), ident, f"B{n};{n // 2}^2")
        if n == 2:
            put(S, flip, "2B2;1")
    elif f == "D":
        for j in range(n + 1):
            if j == n:
                put(S, ident, f"D{n};{j}^1")
            elif j == n - 1:
                put(S, flip, f"D{n};{j}^1")
            else:
                put(range(1, j + 1), ident if (n - j) % 2 == 0 else flip, f"D{n};{j}^1")
        if n % 2 == 0:
            put(_evens(2, n - 2) | {n}, ident, f"D{n};{n // 2}^2")
            put(_evens(2, n - 2) | {n - 1}, ident, f"D{n};{n // 2}p2")
    elif f == "E" and n == 6:
        put({1, 6}, ident, "E6;2")
        put(S, flip, "2E6;4")
    elif f == "E" and n == 7:
        put({1, 6, 7}, ident, "E7;3")
        put({1, 3, 4, 6}, ident, "E7;4")
    elif f == "E" and n == 8:
        put({1, 6, 7, 8}, ident, "E8;4")
    elif f == "F":
        put({1, 4}, ident, "F4;2")
        put(S, flip, "2F4;2")
    return out


def diagram_symbol(system, encircled, sigma):
    cat = _catalogue_for(system.spec)
    sym = cat.get((frozenset(encircled), sigma.node_perm))
    if sym is not None:
        return sym
    spec = system.spec
    tw = str(sigma.order) if sigma.order > 1 else ""
    k = len(sigma.orbits(encircled))
    nodes = ",".join(map(str, sorted(encircled)))
    if spec.family == "I":
        return f"{tw}I2;{k}[{nodes}]({spec.rank_or_m})"
    sig = "" if sigma.order == 1 else "{" + ",".join(map(str, sigma.node_perm)) + "}"
    return f"{tw}{spec.family}{spec.rank};{k}[{nodes}]{sig}"


_SYMBOL_RE = re.compile(
    r"^(?P<tw>[23])?(?P<fam>[ABDEFHI])(?P<rank>\d+);(?P<k>\d+)"
    r"(?P<rest>p2|\^\d+)?(?:\[(?P<nodes>[\d,]*)\])?(?:\{(?P<perm>[\d,]+)\})?"
    r"(?:\((?P<m>\d+)\))?$"
)


def parse_symbol(text):
    """Symbol -> AdmissibleDiagram."""
    text = text.strip()
    mt = _SYMBOL_RE.match(text)
    if not mt:
        raise ValueError(f"cannot parse diagram symbol {text!r}")
    fam, rank = mt.group("fam"), int(mt.group("rank"))
    spec = parse_type(f"I2({mt.group('m')})" if fam == "I" else f"{fam}{rank}")
    system = build_system(spec)
    if mt.group("nodes") is not None:
        nodes = frozenset(int(x) for x in mt.group("nodes").split(",") if x)
        if mt.group("perm"):
            sigma = DiagramAutomorphism(tuple(int(x) for x in mt.group("perm").split(",")))
        elif mt.group("tw") and fam == "I":
            sigma = system.sigma_by_name("flip")
        else:
            sigma = system.identity_sigma()
        d = AdmissibleDiagram(system, nodes, sigma)
        if d.symbol != text:
            raise ValueError(f"{text!r} is not in canonical form")
        return d
    for (E, sig), sym in _catalogue_for(spec).items():
        if sym == text:
            return AdmissibleDiagram(system, E, DiagramAutomorphism(sig))
    raise ValueError(f"unknown diagram symbol {text!r}")


def catalogue_symbols(spec):
    return sorted(_catalogue_for(parse_type(spec)).values())


# -- relative types ---------------------------------------------------------

def _finite_catalogue(max_rank=8, max_m=32):
    out = []
    for n in range(1, max_rank + 1):
        out.append((f"A{n}", parse_type(f"A{n}")))
    for n in range(3, max_rank + 1):
        out.append((f"B{n}", parse_type(f"B{n}")))
    for n in range(4, max_rank + 1):
        out.append((f"D{n}", parse_type(f"D{n}")))
    for name in ("E6", "E7", "E8", "F4", "H3", "H4"):
        out.append((name, parse_type(name)))
    out.append(("B2", parse_type("I2(4)")))
    for m in range(5, max_m + 1):
        out.append((f"I2({m})", parse_type(f"I2({m})")))
    return out


@lru_cache(maxsize=None)
def _catalogue_matrices():
    from .coxeter import _graph

    return [(name, _graph(spec)[0]) for name, spec in _finite_catalogue()]


def _isomorphic(a, b):
    n = len(a)
    if len(b) != n:
        return False
    if sorted(map(sorted, a)) != sorted(map(sorted, b)):
        return False

    def extend(img):
        i = len(img)
        if i == n:
            return True
        for x in range(n):
            if x in img or sorted(a[i]) != sorted(b[x]):
                continue
            if all(b[img[j]][x] == a[j][i] for j in range(i)):
                if extend(img + [x]):
                    return True
        return False

    return extend([])


def _components(m):
    n = len(m)
    seen, comps = set(), []
    for i in range(n):
        if i in seen:
            continue
        stack, comp = [i], []
        seen.add(i)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in range(n):
                if y not in seen and m[x][y] != 2 and x != y:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def name_coxeter_matrix(m):
    """Type name of a finite Coxeter matrix; reducible ones as 'A1xB2'."""
    if not m:
        return "X0"
    parts = []
    for comp in _components(m):
        sub = [[m[i][j] for j in comp] for i in comp]
        for name, ref in _catalogue_matrices():
            if _isomorphic(sub, ref):
                parts.append(name)
                break
        else:
            raise NotCoxeterSystem(f"no finite type with Coxeter matrix {sub}")
    return "x".join(sorted(parts))


def _element_order(system, g, limit=1000):
    x, k = g, 1
    e = system.identity()
    while x != e:
        x = system.multiply(x, g)
        k += 1
        if k > limit:
            raise NotCoxeterSystem("element of unexpectedly large order")
    return k


def relative_generators(d, convention="literal"):
    """One generator per encircled sigma-orbit K.

    literal:  w_{S-E} w_K
    standard: w_{S-E} w_{(S-E) u K}
    where E is the encircled set.
    """
    system = d.system
    outside = d.J
    w_out = system.longest_element(outside)
    gens = []
    for K in d.orbits:
        if convention == "literal":
            other = system.longest_element(K)
        else:
            other = system.longest_element(outside | set(K))
        gens.append(system.multiply(w_out, other))
    return gens


def _relative_matrix(system, gens):
    e = system.identity()
    for g in gens:
        if g == e or system.multiply(g, g) != e:
            raise NotCoxeterSystem("a relative generator is not an involution")
    k = len(gens)
    m = [[1] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            m[i][j] = m[j][i] = _element_order(system, system.multiply(gens[i], gens[j]))
    return m


def _subgroup_order(system, gens, limit):
    from .kernels import twisted_orbit

    ident = system.identity().perm
    perms = [g.perm for g in gens]
    # left multiplication only: right factor is the identity table
    try:
        return len(twisted_orbit(ident, perms, [ident] * len(perms), limit))
    except ClassTooLarge:
        return limit + 1


def relative_type(d, convention="auto"):
    """(relative Coxeter matrix, type name, convention used).

    With convention="auto" the literal generator formula is tried first
    and the standard one is used when the literal one fails to produce a
    Coxeter system.
    """
    conventions = ["literal", "standard"] if convention == "auto" else [convention]
    err = None
    for conv in conventions:
        try:
            gens = relative_generators(d, conv)
            m = _relative_matrix(d.system, gens)
            name = name_coxeter_matrix(m)
            _check_group_order(d.system, gens, name)
            return m, name, conv
        except NotCoxeterSystem as exc:
            err = exc
    raise err


def _check_group_order(system, gens, name):
    from math import prod

    from .coxeter import degrees

    if name == "X0":
        return
    expected = 1
    for part in name.split("x"):
        spec = parse_type("I2(4)" if part == "B2" else part)
        expected *= prod(degrees(spec))
    if expected > 200000:
        return
    got = _subgroup_order(system, gens, expected + 1)
    if got != expected:
        raise NotCoxeterSystem(f"generated group has order {got}, a {name} group has {expected}")


def psi_diagram(d):
    """Dual diagram, via the class of w_J and its longest element."""
    system = d.system
    wJ = system.longest_element(d.J)
    if not all(twisted_step(system, wJ, s, d.sigma) == wJ for s in d.J):
        raise NotBicapped("w_J does not twist-commute with J")
    c = enumerate_class(system, wJ, d.sigma)
    cert = cap_certificate(c)
    if not cert.bicapped or cert.lower_J != d.J:
        raise NotBicapped(f"{d.symbol} is not the diagram of a bi-capped class")
    tau = sigma_times_opposition(system, d.sigma)
    return AdmissibleDiagram(system, frozenset(system.labels) - cert.upper_Jprime, tau)


def diagrams_of_class(c, cert=None):
    """(fixed diagram, opposition diagram) of a bi-capped class."""
    system = c.system
    cert = cert or cap_certificate(c)
    if not cert.bicapped:
        raise NotBicapped("class is not bi-capped")
    S = frozenset(system.labels)
    fixed = AdmissibleDiagram(system, S - cert.lower_J, c.sigma)
    opp = AdmissibleDiagram(system, S - cert.upper_Jprime, sigma_times_opposition(system, c.sigma))
    if psi_diagram(fixed) != opp:
        raise NotBicapped("opposition diagram is not the dual of the fixed diagram")
    return fixed, opp


# -- uniclass Weyl substructures (absolute type, relative type, class) -------

ALL_WS = [
    # family rule, relative type rule, symbol rule, description
    ("A odd", "B_{(n+1)/2}", "2A{n};{(n+1)/2}^1", "symplectic polarity"),
    ("A odd", "A_{(n-1)/2}", "A{n};{(n-1)/2}^2", "line spread"),
    ("B", "B_i", "B{n};{i}^1", "ideal subspace"),
    ("B even", "B_{n/2}", "B{n};{n/2}^2", "composition line spread"),
    ("D", "B_i", "D{n};{i}^1", "ideal subspace"),
    ("D even", "B_{n/2}", "D{n};{n/2}^2 or D{n};{n/2}p2", "composition line spread"),
    ("E6", "F4", "2E6;4", "symplectic polarity"),
    ("E6", "A2", "E6;2", "ideal Veronesean"),
    ("E7", "F4", "E7;4", "partial composition spread"),
    ("E7", "B3", "E7;3", "ideal dual polar Veronesean"),
    ("E8", "F4", "E8;4", "quaternion metasymplectic space"),
    ("F4", "B2", "F4;2", "ideal quadrangular Veronesean"),
    ("F4", "I2(8)", "2F4;2", "Ree-Tits octagon"),
    ("I2 even", "A1", "I2;1^j(m)", "Cl(s_i)"),
    ("I2 even", "A1", "2I2;1(m)", "twisted identity class"),
]


def class_of_diagram(d, cap=None):
    """The sigma-class of w_J where J is the non-encircled set."""
    from .twisted import DEFAULT_CAP

    return enumerate_class(d.system, d.system.longest_element(d.J), d.sigma, cap or DEFAULT_CAP)
