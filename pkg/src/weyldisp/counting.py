"""Poincaré polynomials, class sums and displacement counts at numeric
parameters, all in exact integer / radical arithmetic."""

import re
from collections import Counter
from dataclasses import dataclass, field
from math import prod

from .coxeter import build_system, degrees, parse_type
from .errors import CapMissing, InternalContradiction, InvalidParameters, NotDivisible
from .radical import RadicalNumber, squarefree_split

BFS_LIMIT = 10**7


class ParameterMap:
    """Panel parameters q_s, one positive integer per generator.

    Accepted inputs: an int (all equal); a sequence of per-label values;
    a string such as "2", "2,2,4", "1=2,3=4" or "l=2,s=4" (long/short
    nodes of B, F4 and G2).
    """

    def __init__(self, system, values, sigma=None):
        self.system = system
        vals = self._resolve(system, values)
        if any(not isinstance(v, int) or v < 1 for v in vals):
            raise InvalidParameters(f"parameters must be positive integers, got {vals}")
        for cl in system.generator_classes():
            if len({vals[s - 1] for s in cl}) != 1:
                raise InvalidParameters(f"parameters differ inside the conjugacy class {sorted(cl)}")
        self.values = tuple(vals)
        self.class_values = [None] * len(system.class_ranges)
        for s in system.labels:
            self.class_values[system.generator_class_index[s - 1]] = vals[s - 1]
        # squarefree splitting per class, for square roots of q_w
        self._splits = [squarefree_split(q) for q in self.class_values]
        if sigma is not None:
            self.check_sigma(sigma)

    @staticmethod
    def _resolve(system, values):
        n = system.rank
        if isinstance(values, ParameterMap):
            return list(values.values)
        if isinstance(values, int):
            return [values] * n
        if isinstance(values, (list, tuple)):
            if len(values) != n:
                raise InvalidParameters(f"need {n} parameters, got {len(values)}")
            return list(values)
        text = str(values).strip().replace(" ", "")
        if re.fullmatch(r"\d+", text):
            return [int(text)] * n
        if "=" not in text:
            parts = [int(x) for x in text.split(",")]
            return ParameterMap._resolve(system, parts)
        out = [None] * n
        for item in text.split(","):
            key, val = item.split("=")
            val = int(val)
            if key in ("l", "s"):
                for lab in _long_short(system)[key]:
                    out[lab - 1] = val
            else:
                out[int(key) - 1] = val
        if None in out:
            raise InvalidParameters(f"parameters missing for nodes {[i + 1 for i, v in enumerate(out) if v is None]}")
        return out

    def check_sigma(self, sigma):
        for s in self.system.labels:
            if self.values[s - 1] != self.values[sigma(s) - 1]:
                raise InvalidParameters("parameters are not invariant under sigma")

    def q(self, label):
        return self.values[label - 1]

    def q_power(self, w):
        """q_w as an integer."""
        return prod(q**k for q, k in zip(self.class_values, self.system.class_counts(w)))

    def q_power_half_counts(self, counts):
        rat, rad = 1, 1
        for (c, d), k in zip(self._splits, counts):
            rat *= c**k * d ** (k // 2)
            if k % 2:
                rad *= d
        c2, d2 = squarefree_split(rad)
        return RadicalNumber({d2: rat * c2})

    def is_uniform(self):
        return len(set(self.values)) == 1

    def __repr__(self):
        return f"ParameterMap({self.system.spec}, {self.values})"


def _long_short(system):
    spec = system.spec
    n = system.rank
    if spec.family == "B":
        return {"l": list(range(1, n)), "s": [n]}
    if spec.family == "F":
        return {"l": [1, 2], "s": [3, 4]}
    if spec.family == "I" and spec.rank_or_m == 6:
        # G2 with node 1 short and node 2 long
        return {"l": [2], "s": [1]}
    raise InvalidParameters(f"long/short parameters make no sense for {spec}")


def as_params(system, params):
    return params if isinstance(params, ParameterMap) else ParameterMap(system, params)


def q_power_half(system, w, params):
    """sqrt(q_w) exactly."""
    params = as_params(system, params)
    return params.q_power_half_counts(system.class_counts(w))


# -- Poincaré polynomials ---------------------------------------------------

def _coset_sum(system, J, j, params):
    """Sum of q_u over minimal length representatives u of W_J / W_{J - {j}}."""
    N = system.positive_count
    rest = [(system.simple_index[s - 1]) for s in J if s != j]
    gens = [(s, system.generators[s - 1].perm, system.simple_index[s - 1]) for s in J]
    start = system.identity().perm
    layer = {start}
    total = 0
    while layer:
        total += sum(params.q_power_from_perm(p) for p in layer)
        nxt = set()
        for p in layer:
            for s, g, r in gens:
                # grow on the left: the representatives are closed under
                # removing a left descent
                if p.index(r) >= N:
                    continue
                y = p.translate(g)
                if all(y[x] < N for x in rest):
                    nxt.add(y)
        layer = nxt
    return total


def _attach_perm_power(params):
    system = params.system
    neg = system._negtab
    ranges = system.class_ranges
    qs = params.class_values

    def q_power_from_perm(p):
        out = 1
        for (a, b), q in zip(ranges, qs):
            out *= q ** p[a:b].translate(neg).count(1)
        return out

    params.q_power_from_perm = q_power_from_perm


def poincare_by_cosets(system, params, J=None):
    """W_J(q) as a product of coset sums along a chain of parabolics."""
    params = as_params(system, params)
    if not hasattr(params, "q_power_from_perm"):
        _attach_perm_power(params)
    J = sorted(system.labels if J is None else J)
    total = 1
    while J:
        j = J[-1]
        total *= _coset_sum(system, J, j, params)
        J = J[:-1]
    return total


def poincare_by_bfs(system, params):
    params = as_params(system, params)
    from .kernels import enumerate_group

    if not hasattr(params, "q_power_from_perm"):
        _attach_perm_power(params)
    return sum(params.q_power_from_perm(p) for p, _ in enumerate_group(system))


def _q_int(q, d):
    """[d]_q = 1 + q + ... + q^(d-1)"""
    return sum(q**i for i in range(d))


def poincare_by_product(system, params):
    """Closed forms: degrees for equal parameters, two-parameter B_n."""
    params = as_params(system, params)
    spec = system.spec
    if params.is_uniform():
        q = params.values[0]
        return prod(_q_int(q, d) for d in degrees(spec))
    n = system.rank
    if spec.family == "B":
        a, b = params.values[0], params.values[-1]
        return prod(_q_int(a, i) * (1 + b * a ** (i - 1)) for i in range(1, n + 1))
    if spec.family == "I" and spec.rank_or_m % 2 == 0:
        m = spec.rank_or_m
        a, b = params.values
        # W = (1 + a)(1 + b)(1 + ab + ... + (ab)^(m/2 - 1))
        return (1 + a) * (1 + b) * _q_int(a * b, m // 2)
    raise NotImplementedError(f"no closed form for {spec} with unequal parameters")


def poincare(system, params, method="cosets"):
    """W(q) = sum of q_w over W.

    method: "cosets" (exact summation organised along a parabolic chain),
    "bfs" (sum over every element), "product" (closed form).
    """
    params = as_params(system, params)
    if method == "cosets":
        return poincare_by_cosets(system, params)
    if method == "bfs":
        if system.order > BFS_LIMIT:
            raise ValueError(f"|W| = {system.order} is too large for element-by-element summation")
        return poincare_by_bfs(system, params)
    if method == "product":
        return poincare_by_product(system, params)
    raise ValueError(f"unknown method {method!r}")


# -- class sums and counts --------------------------------------------------

def class_count_profile(c):
    """Counter of per-generator-class length vectors over the class."""
    system = c.system
    return Counter(system.class_counts(w) for w in c)


def class_sum(c, params):
    """C(q^1/2) = sum over the class of sqrt(q_w)."""
    params = as_params(c.system, params)
    total = RadicalNumber()
    for counts, mult in class_count_profile(c).items():
        total = total + params.q_power_half_counts(counts) * mult
    if params.values and all(v == 1 for v in params.values) and total != len(c):
        raise InternalContradiction("class sum at q = 1 differs from the class size")
    return total


@dataclass
class CountRow:
    word: list
    length: int
    q_w: int
    count: object  # RadicalNumber, or None when the division failed


@dataclass
class CountReport:
    descriptor: str
    params: tuple
    poincare: int
    class_sum: object
    rows: list = field(default_factory=list)
    integral: bool = True
    witness: str = None
    witness_quotient: dict = None
    derived_class_sum: object = None

    def per_length(self):
        out = {}
        for r in self.rows:
            out.setdefault(r.length, r.count)
        return out

    def to_json(self):
        return {
            "class": self.descriptor,
            "params": list(self.params),
            "poincare": str(self.poincare),
            "class_sum": str(self.class_sum),
            "derived_class_sum": None if self.derived_class_sum is None else str(self.derived_class_sum),
            "integral": self.integral,
            "witness": self.witness,
            "rows": [
                {"word": " ".join(map(str, r.word)), "length": r.length, "q_w": str(r.q_w),
                 "count": None if r.count is None else str(r.count)}
                for r in self.rows
            ],
        }


def _descriptor(c):
    from .twisted import cap_certificate

    try:
        cert = cap_certificate(c)
        if cert.bicapped:
            from .diagrams import diagrams_of_class

            return diagrams_of_class(c, cert)[0].symbol
    except Exception:
        pass
    return "Cl(" + " ".join(map(str, c.system.reduced_word(c.representative()))) + ")"


def counts_uniclass(c, params, descriptor=None):
    """|Delta_w| = W(q) sqrt(q_w) / C(q^1/2) for each w in the class.

    Failure of exact integral division is reported as a witness, not raised.
    """
    system = c.system
    params = as_params(system, params)
    params.check_sigma(c.sigma)
    W = poincare(system, params)
    C = class_sum(c, params)
    report = CountReport(descriptor or _descriptor(c), params.values, W, C)
    # the count depends only on sqrt(q_w), so divide once per distinct value
    cache = {}
    for w in c.sorted_elements():
        counts = system.class_counts(w)
        half = params.q_power_half_counts(counts)
        if half not in cache:
            try:
                val = (half * W).div_exact(C)
                if not val.is_rational():
                    raise NotDivisible(f"count {val} is irrational", {d: c for d, c in val.terms.items()})
                if val.to_int() < 0:
                    raise NotDivisible(f"count {val} is negative", {1: val.to_int()})
                cache[half] = val
            except NotDivisible as exc:
                cache[half] = None
                if report.integral:
                    report.integral = False
                    word = " ".join(map(str, system.reduced_word(w)))
                    report.witness = f"|Delta_w| for w = {word or '1'}: {exc}"
                    report.witness_quotient = exc.quotient
        report.rows.append(CountRow(system.reduced_word(w), system.length(w), params.q_power(w), cache[half]))
    if report.integral:
        total = sum(r.count.to_int() for r in report.rows)
        if total != W:
            raise InternalContradiction(f"counts add up to {total}, not W(q) = {W}")
    return report


def counts_substructure(c, params, sub_system, sub_params, descriptor=None):
    """|Delta_w| = W_J(q) W'(q') sqrt(q_w / q_{w_J}) from a fixed substructure of
    type sub_system with parameters sub_params; also returns the implied class
    sum W(q) sqrt(q_{w_J}) / (W_J(q) W'(q')) and compares it with the direct
    class sum.  A mismatch is reported through ``integral``/``witness``."""
    from .twisted import cap_certificate

    system = c.system
    params = as_params(system, params)
    cert = cap_certificate(c)
    if not cert.min_unique:
        raise CapMissing("class has no unique shortest element")
    J = cert.lower_J
    wJ = system.longest_element(J)
    sub_params = as_params(sub_system, sub_params) if sub_system is not None else None
    W = poincare(system, params)
    WJ = poincare_by_cosets(system, params, J)
    Wsub = 1 if sub_system is None else poincare(sub_system, sub_params)
    half_J = q_power_half(system, wJ, params)
    C = class_sum(c, params)
    report = CountReport(descriptor or _descriptor(c), params.values, W, C)
    report.derived_class_sum = _divide_or_witness(half_J * W, WJ * Wsub, report)
    if report.derived_class_sum is not None and report.derived_class_sum != C:
        report.integral = False
        report.witness = f"implied class sum {report.derived_class_sum} differs from the direct sum {C}"
    base = WJ * Wsub
    for w in c.sorted_elements():
        half = q_power_half(system, w, params)
        val = _divide_or_witness(half * base, half_J, report)
        report.rows.append(CountRow(system.reduced_word(w), system.length(w), params.q_power(w), val))
    return report


def _divide_or_witness(num, den, report):
    num, den = RadicalNumber.coerce(num), RadicalNumber.coerce(den)
    try:
        return num.div_exact(den)
    except NotDivisible as exc:
        report.integral = False
        report.witness = report.witness or str(exc)
        return None


# -- polynomial display in v = q^(1/2) -----------------------------------------

def class_polynomial(c, exponents=None):
    """{k: coefficient} with C(v) = sum_w v^(sum_c e_c * n_c(w)), where q_c = q^(e_c).

    Default exponents are all 1, giving the length generating function.
    """
    system = c.system
    exponents = exponents or [1] * len(system.class_ranges)
    out = Counter()
    for counts, mult in class_count_profile(c).items():
        out[sum(e * k for e, k in zip(exponents, counts))] += mult
    return dict(sorted(out.items()))


def format_polynomial(poly, var="v"):
    parts = []
    for k, coeff in sorted(poly.items(), reverse=True):
        if not coeff:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if coeff == 1 and mono:
            parts.append(mono)
        else:
            parts.append(f"{coeff}{mono}")
    return " + ".join(parts) or "0"


# -- finite Weyl substructure table -------------------------------------------

@dataclass(frozen=True)
class FWSRow:
    ref: int
    relative: str
    sub_params: tuple
    symbol: str
    remark: str
    guard_ok: bool
    guard: str = ""
    # parameters as tabulated, when they differ from the ones that count correctly
    printed_params: tuple = None


def _is_power(q, p):
    """q = p^k with k >= 1; returns k or 0."""
    k = 0
    while q > 1 and q % p == 0:
        q //= p
        k += 1
    return k if q == 1 else 0


def finite_ws_rows(system, params):
    """Nontrivial finite Weyl substructures applicable to the building of
    type ``system`` with parameters ``params``.  Each row carries its
    relative type, the relative parameters (one per relative node), the
    symbol of the fixed diagram and whether its arithmetic guard holds."""
    params = as_params(system, params)
    spec = system.spec
    f, n = spec.family, spec.rank
    vals = params.values
    rows = []

    def B_params(k, s, t):
        if k == 0:
            return ()
        if k == 1:
            return (t,)
        return (s,) * (k - 1) + (t,)

    if f == "A" and n % 2 == 1 and n >= 3 and params.is_uniform():
        q, m = vals[0], (n - 1) // 2
        rows.append(FWSRow(1, f"B{m + 1}" if m + 1 > 1 else "A1", B_params(m + 1, q, q), f"2A{n};{m + 1}^1", "symplectic polarity", True))
        rows.append(FWSRow(2, f"A{m}" if m else "X0", (q * q,) * m, f"A{n};{m}^2", "line spread", True))
    elif f == "B" or (f == "I" and spec.rank_or_m == 4):
        if f == "I":
            n = 2
        s, t = vals[0], vals[-1]
        if s == t:
            q = s
            odd = q % 2 == 1
            rows.append(FWSRow(3, _bname(n - 1), B_params(n - 1, q, q * q), f"B{n};{n - 1}^1", "parabolic", odd, "q odd"))
            if n % 2 == 0:
                rows.append(FWSRow(4, _bname(n // 2), B_params(n // 2, q * q, q * q), f"B{n};{n // 2}^2", "symplectic", odd, "q odd"))
            if n == 2:
                e2 = _is_power(q, 2)
                ok = e2 % 2 == 1
                # tabulated as 2^(4e+1) = q^2/2; only q^2 reproduces the class sum
                rows.append(FWSRow(6, "A1", (q * q,), "2B2;1", "polarity", ok, "q = 2^(2e+1)", (q * q // 2,)))
        elif t == s * s and n % 2 == 0:
            rows.append(FWSRow(5, _bname(n // 2), B_params(n // 2, s * s, s**3), f"B{n};{n // 2}^2", "", True))
    elif f == "D" and params.is_uniform():
        q = vals[0]
        rows.append(FWSRow(7, _bname(n - 1), B_params(n - 1, q, q), f"D{n};{n - 1}^1", "parabolic", True))
        rows.append(FWSRow(8, _bname(n - 2), B_params(n - 2, q, q * q), f"D{n};{n - 2}^1", "", True))
        if n % 2 == 0:
            rows.append(FWSRow(9, _bname(n // 2), B_params(n // 2, q * q, q), f"D{n};{n // 2}^2", "", True))
    elif f == "E" and n == 6 and params.is_uniform():
        q = vals[0]
        rows.append(FWSRow(11, "F4", (q, q, q, q), "2E6;4", "polarity", True))
    elif f == "E" and n == 7:
        q = vals[0]
        rows.append(FWSRow(12, "F4", (q, q, q * q, q * q), "E7;4", "", True))
    elif f == "F" and params.is_uniform():
        q = vals[0]
        ok = _is_power(q, 2) % 2 == 1
        rows.append(FWSRow(13, "I2(8)", (q, q * q), "2F4;2", "polarity", ok, "q = 2^(2e+1)"))
    elif f == "I" and spec.rank_or_m == 6 and params.is_uniform():
        q = vals[0]
        rows.append(FWSRow(14, "A1", (q**3,), "I2;1^1(6)", "", q % 3 == 2, "q = 2 mod 3"))
        ok = _is_power(q, 3) % 2 == 1
        rows.append(FWSRow(15, "A1", (q**3,), "2I2;1(6)", "polarity", ok, "q = 3^(2e+1)"))
    return rows


def _bname(k):
    if k == 0:
        return "X0"
    if k == 1:
        return "A1"
    if k == 2:
        return "B2"
    return f"B{k}"


def relative_system(name):
    """Coxeter system for a relative type name from the substructure table
    (None for the empty type)."""
    if name == "X0":
        return None
    return build_system(parse_type("I2(4)" if name == "B2" else name))
