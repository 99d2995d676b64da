"""Twisted conjugacy classes, twisted involutions and their caps.

A sigma-class of w is {v^-1 w v^sigma}; it is generated from w by the
moves x -> s x s^sigma.  For classes of sigma-involutions the shortest
elements are parabolic longest elements w_J, and a class is called
bi-capped when both its shortest and its longest element are unique.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .coxeter import GroupElement
from .errors import (
    InternalContradiction,
    NotInvolutionClass,
    NotTwistedInvolution,
)
from .kernels import twisted_orbit

DEFAULT_CAP = 10**8


class TwistedClass:
    """A fully enumerated sigma-conjugacy class."""

    def __init__(self, system, sigma, perms):
        self.system = system
        self.sigma = sigma
        negtab, N = system._negtab, system.positive_count
        self.elements = {}
        self.by_length = {}
        for p in perms:
            w = GroupElement(p, p[:N].translate(negtab).count(1))
            self.elements[p] = w
            self.by_length.setdefault(w._length, []).append(w)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements.values())

    def __contains__(self, w):
        return w.perm in self.elements

    @property
    def min_length(self):
        return min(self.by_length)

    @property
    def max_length(self):
        return max(self.by_length)

    @property
    def min_elements(self):
        return self.by_length[self.min_length]

    @property
    def max_elements(self):
        return self.by_length[self.max_length]

    def representative(self):
        """Lexicographically smallest reduced word among the shortest elements."""
        return min(self.min_elements, key=self.system.reduced_word)

    def sorted_elements(self):
        sys = self.system
        return sorted(self, key=lambda w: (sys.length(w), sys.reduced_word(w)))

    def words(self):
        return {tuple(self.system.reduced_word(w)) for w in self}

    def same_set(self, other):
        return self.elements.keys() == other.elements.keys()

    def __repr__(self):
        return f"TwistedClass({self.system.spec}, sigma={self.sigma.node_perm}, size={len(self)})"


def enumerate_class(system, w, sigma=None, cap=DEFAULT_CAP):
    """Breadth-first closure of w under x -> s x s^sigma."""
    if sigma is None:
        sigma = system.identity_sigma()
    lefts = [g.perm for g in system.generators]
    rights = [system.generators[sigma(s) - 1].perm for s in system.labels]
    perms = twisted_orbit(w.perm, lefts, rights, cap)
    return TwistedClass(system, sigma, perms)


def is_sigma_involution(system, w, sigma=None):
    if sigma is None:
        sigma = system.identity_sigma()
    if sigma.order > 2:
        return False
    return system.multiply(w, system.apply_sigma(sigma, w)) == system.identity()


def twisted_step(system, w, s, sigma):
    """s * w * s^sigma"""
    left = system.generators[s - 1].perm
    right = system.generators[sigma(s) - 1].perm
    return GroupElement(right.translate(w.perm).translate(left))


def _commuting_descents(system, w, sigma):
    """K = {s in D_L(w) : s w = w s^sigma}"""
    out = set()
    for s in system.left_descents(w):
        if twisted_step(system, w, s, sigma) == w:
            out.add(s)
    return out


def downward_closure(system, w, sigma=None):
    """Walk a sigma-involution down to a parabolic longest element.

    Returns (J, v, trace) with v^-1 w v^sigma = w_J and
    l(w_J) = l(w) - 2 l(v).  At each step t is the smallest left
    descent of w_K w.
    """
    if sigma is None:
        sigma = system.identity_sigma()
    if not is_sigma_involution(system, w, sigma):
        raise NotTwistedInvolution("downward closure needs a sigma-involution")
    x = w
    trace = []
    while True:
        K = _commuting_descents(system, x, sigma)
        wK = system.longest_element(K)
        if x == wK:
            break
        y = system.multiply(wK, x)
        t = min(system.left_descents(y))
        nxt = twisted_step(system, x, t, sigma)
        if system.length(nxt) != system.length(x) - 2:
            raise InternalContradiction(
                f"step by {t} changed length {system.length(x)} -> {system.length(nxt)}"
            )
        trace.append(t)
        x = nxt
    v = system.element_from_word(trace)
    vinv = system.invert(v)
    check = system.multiply(system.multiply(vinv, w), system.apply_sigma(sigma, v))
    if check != x or system.length(x) != system.length(w) - 2 * len(trace):
        raise InternalContradiction("conjugator does not reproduce w_J")
    return frozenset(K), v, trace


@dataclass
class CapCertificate:
    lower_J: frozenset = None
    upper_Jprime: frozenset = None
    min_unique: bool = False
    max_unique: bool = False
    fix_rank: int = 0
    opp_rank: int = 0
    # canonical choices, recorded even when not unique
    min_J: frozenset = field(default=None, repr=False)
    dual_J: frozenset = field(default=None, repr=False)

    @property
    def bicapped(self):
        return self.min_unique and self.max_unique


def minimal_parabolic(system, m, sigma):
    """For a shortest element m of an involution class: the J with m = w_J,
    checked against s w_J = w_J s^sigma for s in J."""
    J = frozenset(system.left_descents(m))
    if system.longest_element(J) != m:
        raise InternalContradiction("shortest element is not a parabolic longest element")
    for s in J:
        if twisted_step(system, m, s, sigma) != m:
            raise InternalContradiction(f"generator {s} does not twist-commute with w_J")
    return J


def sigma_times_opposition(system, sigma):
    return sigma.compose(system.opposition())


def cap_certificate(c):
    system, sigma = c.system, c.sigma
    rep = next(iter(c))
    if not is_sigma_involution(system, rep, sigma):
        raise NotInvolutionClass("class does not consist of sigma-involutions")
    mins = c.min_elements
    Js = [minimal_parabolic(system, m, sigma) for m in mins]
    J = minimal_parabolic(system, c.representative(), sigma)
    tau = sigma_times_opposition(system, sigma)
    top = min(c.max_elements, key=system.reduced_word)
    dual_top = system.multiply(top, system.w0)
    Jp, _, _ = downward_closure(system, dual_top, tau)
    labels = set(system.labels)
    cert = CapCertificate(
        min_unique=len(mins) == 1,
        max_unique=len(c.max_elements) == 1,
        fix_rank=len(sigma.orbits(labels - J)),
        opp_rank=len(tau.orbits(labels - Jp)),
        min_J=J,
        dual_J=Jp,
    )
    # every shortest element gives the same number of sigma-orbits
    if len({len(sigma.orbits(labels - K)) for K in Js}) != 1:
        raise InternalContradiction("shortest elements disagree on orbit counts")
    if cert.min_unique:
        cert.lower_J = J
    if cert.max_unique:
        if system.multiply(system.longest_element(Jp), system.w0) != top:
            raise InternalContradiction("maximum is not w_J' w0")
        cert.upper_Jprime = Jp
    return cert


def dual_class(c, check=True):
    """The tau-class {x w0 : x in c} with tau = sigma sigma0."""
    system = c.system
    tau = sigma_times_opposition(system, c.sigma)
    w0 = system.w0.perm
    perms = [w0.translate(p) for p in c.elements]
    d = TwistedClass(system, tau, perms)
    if check:
        bfs = enumerate_class(system, next(iter(d)), tau)
        if not bfs.same_set(d):
            raise InternalContradiction("right multiplication by w0 does not give a class")
    return d


def class_report(c, cert=None):
    """Plain-dict summary used by the CLI and JSON output."""
    system = c.system
    if cert is None:
        try:
            cert = cap_certificate(c)
        except NotInvolutionClass:
            cert = None
    out = {
        "type": system.spec.name,
        "sigma": list(c.sigma.node_perm),
        "size": len(c),
        "min_length": c.min_length,
        "max_length": c.max_length,
        "lower_J": None,
        "upper_Jprime": None,
        "fix_rank": None,
        "opp_rank": None,
        "bicapped": False,
    }
    if cert is not None:
        out.update(
            lower_J=sorted(cert.lower_J) if cert.lower_J is not None else None,
            upper_Jprime=sorted(cert.upper_Jprime) if cert.upper_Jprime is not None else None,
            fix_rank=cert.fix_rank,
            opp_rank=cert.opp_rank,
            bicapped=cert.bicapped,
        )
    return out


def standard_sigmas(system):
    """Identity plus the standard diagram involution when there is one.

    For D4 only the 3<->4 swap is used so that labels match the usual
    tables; the other two involutions are its triality conjugates.
    """
    out = [system.identity_sigma()]
    if any(a.order == 2 for a in system.diagram_automorphisms()):
        out.append(system.sigma_by_name("flip"))
    return out


def twisted_commuting_subsets(system, sigma):
    """All J with w_J s w_J = s^sigma for every s in J."""
    out = []
    labels = system.labels
    for k in range(len(labels) + 1):
        for J in combinations(labels, k):
            if not sigma.is_stable(J):
                continue
            wJ = system.longest_element(J)
            if all(twisted_step(system, wJ, s, sigma) == wJ for s in J):
                out.append(frozenset(J))
    return out


def involution_classes(system, sigma, cap=DEFAULT_CAP):
    """Every sigma-involution class, each listed once (all of them contain
    some w_J with J twist-commuting)."""
    classes = []
    for J in twisted_commuting_subsets(system, sigma):
        wJ = system.longest_element(J)
        if any(wJ in c for c in classes):
            continue
        classes.append(enumerate_class(system, wJ, sigma, cap))
    return classes


@dataclass
class BicappedRow:
    sigma: object
    J: frozenset
    Jprime: frozenset
    size: int
    fix_rank: int
    opp_rank: int
    fixed: object  # AdmissibleDiagram
    opposite: object
    relative_type: str
    dual_relative_type: str

    @property
    def symbol(self):
        return self.fixed.symbol

    @property
    def dual_symbol(self):
        return self.opposite.symbol


def classify_bicapped(system, sigmas=None, cap=DEFAULT_CAP, progress=None):
    """All bi-capped sigma-involution classes for sigma in ``sigmas``
    (default: identity and the standard involution)."""
    from .diagrams import AdmissibleDiagram, relative_type

    if sigmas is None:
        sigmas = standard_sigmas(system)
    labels = set(system.labels)
    rows = []
    for sigma in sigmas:
        tau = sigma_times_opposition(system, sigma)
        for c in involution_classes(system, sigma, cap):
            if progress:
                progress(f"{system.spec} sigma={sigma.node_perm} class of size {len(c)}")
            cert = cap_certificate(c)
            if not cert.bicapped:
                continue
            fixed = AdmissibleDiagram(system, frozenset(labels - cert.lower_J), sigma)
            opp = AdmissibleDiagram(system, frozenset(labels - cert.upper_Jprime), tau)
            rows.append(
                BicappedRow(
                    sigma=sigma,
                    J=cert.lower_J,
                    Jprime=cert.upper_Jprime,
                    size=len(c),
                    fix_rank=cert.fix_rank,
                    opp_rank=cert.opp_rank,
                    fixed=fixed,
                    opposite=opp,
                    relative_type=relative_type(fixed)[1],
                    dual_relative_type=relative_type(opp)[1],
                )
            )
    return rows
