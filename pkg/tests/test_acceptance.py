"""Acceptance criteria 1-12.  Each test records PASS/FAIL; the lines are
printed in the pytest terminal summary, or directly when run as a script."""

import contextlib
import functools
import io
import json
import random
import time
from collections import Counter
from functools import lru_cache

from weyldisp import RadicalNumber as R
from weyldisp import CoxeterSystem, build_system, enumerate_class
from weyldisp import buildings as bd
from weyldisp.cli import main as cli_main
from weyldisp.counting import class_sum, counts_substructure, counts_uniclass, poincare, relative_system
from weyldisp.diagrams import class_of_diagram, parse_symbol
from weyldisp.twisted import is_sigma_involution

RESULTS = {}


def criterion(n):
    def wrap(fn):
        @functools.wraps(fn)
        def test():
            t0 = time.perf_counter()
            try:
                fn()
            except BaseException as exc:
                RESULTS[n] = ("FAIL", str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__)
                raise
            RESULTS[n] = ("PASS", f"{time.perf_counter() - t0:.1f}s")
        return test
    return wrap


def summary_lines():
    return [f"criterion {n:2d}: {RESULTS[n][0]}  {RESULTS[n][1]}" for n in sorted(RESULTS)]


# -- criterion 1 and 2: the bi-capped table ------------------------------------

TYPES = ([f"A{n}" for n in range(2, 9)] + [f"B{n}" for n in range(2, 9)] + [f"D{n}" for n in range(4, 9)]
         + ["E6", "E7", "E8", "F4"] + [f"I2({m})" for m in range(3, 11)])


def _rel(name):
    name = {"B1": "A1", "B0": "X0", "A0": "X0", "I2(3)": "A2", "I2(4)": "B2", "G2": "I2(6)"}.get(name, name)
    return name


def table_rows(t):
    """Rows of the bi-capped table for type t, written with our symbols:
    {class symbol: (dual symbol, relative type, dual relative type)}."""
    fam, n = t[0], None
    rows = {}

    def put(a, b, ra, rb, override=False):
        for x, y, rx, ry in ((a, b, ra, rb), (b, a, rb, ra)):
            if x in rows and not override:
                continue
            rows[x] = (y, _rel(rx), _rel(ry))

    if fam == "I":
        m = int(t[3:-1])
        top, bottom = f"I2;2({m})", (f"I2;0({m})" if m % 2 == 0 else f"2I2;0({m})")
        put(top, bottom, t, "X0", override=True)
        if m % 2 == 0:
            for j in (1, 2):
                put(f"I2;1^{j}({m})", f"I2;1^{j}({m})", "A1", "A1")
            put(f"2I2;1({m})", f"2I2;1({m})", "A1", "A1")
        return rows
    n = int(t[1:])
    if fam == "A":
        put(f"A{n};{n}", f"2A{n};0", t, "X0", override=True)
        if n % 2:
            put(f"A{n};{(n - 1) // 2}^2", f"2A{n};{(n + 1) // 2}^1", f"A{(n - 1) // 2}", f"B{(n + 1) // 2}")
    elif fam in "BD":
        # the trivial rows take precedence over the j = 0 and j = n entries
        put(f"{t};{n}^1", f"{t};0^1", t, "X0", override=True)
        for j in range(0, n + 1):
            put(f"{t};{j}^1", f"{t};{n - j}^1", f"B{j}", f"B{n - j}")
        if n % 2 == 0:
            if fam == "B":
                put(f"B{n};{n // 2}^2", f"B{n};{n // 2}^2", f"B{n // 2}", f"B{n // 2}")
                if n == 2:
                    # B2 is I2(4), so the twisted dihedral row applies as well
                    put("2B2;1", "2B2;1", "A1", "A1")
            else:
                put(f"D{n};{n // 2}^2", f"D{n};{n // 2}p2", f"B{n // 2}", f"B{n // 2}")
    elif t == "E6":
        put("E6;6", "2E6;0", "E6", "X0")
        put("E6;2", "2E6;4", "A2", "F4")
    elif t == "E7":
        put("E7;7", "E7;0", "E7", "X0")
        put("E7;3", "E7;4", "B3", "F4")
    elif t == "E8":
        put("E8;8", "E8;0", "E8", "X0")
        put("E8;4", "E8;4", "F4", "F4")
    elif t == "F4":
        put("F4;4", "F4;0", "F4", "X0")
        put("F4;2", "F4;2", "B2", "B2")
        put("2F4;2", "2F4;2", "I2(8)", "I2(8)")
    return rows


def iso_key(symbol):
    """Orbit representative of a diagram under the graph automorphisms."""
    d = parse_symbol(symbol)
    S = d.system
    best = None
    for tau in S.diagram_automorphisms():
        inv = tau.inverse()
        enc = tuple(sorted(tau(s) for s in d.encircled))
        sig = tuple(tau(d.sigma(inv(s))) for s in S.labels)
        key = (enc, sig)
        best = key if best is None or key < best else best
    return (str(S.spec),) + best


def cli_json(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(list(argv))
    assert code == 0, f"exit {code} for {argv}"
    return json.loads(buf.getvalue())


@lru_cache(maxsize=None)
def classify_rows(t):
    return tuple(cli_json("classify", "--type", t, "--format", "json")["rows"])


@criterion(1)
def test_criterion_01_bicapped_table():
    bad = []
    for t in TYPES:
        got = Counter(
            (iso_key(r["symbol"]), iso_key(r["dual"]), _rel(r["relative_type"]), _rel(r["dual_relative_type"]))
            for r in classify_rows(t)
        )
        want = Counter((iso_key(a), iso_key(b), ra, rb) for a, (b, ra, rb) in table_rows(t).items())
        if got != want:
            bad.append(t)
    # the two D_{n;n/2}^2 diagrams are told apart by their encircled nodes
    for n in (4, 6, 8):
        assert sorted(parse_symbol(f"D{n};{n // 2}^2").encircled) == list(range(2, n - 1, 2)) + [n]
        assert sorted(parse_symbol(f"D{n};{n // 2}p2").encircled) == list(range(2, n - 1, 2)) + [n - 1]
    assert not bad, f"rows differ for {bad}"


@criterion(2)
def test_criterion_02_rank_sum():
    checked = 0
    for t in TYPES:
        rank = build_system(t).rank
        for r in classify_rows(t):
            assert r["fix_rank"] + r["opp_rank"] == rank, (t, r["symbol"])
            checked += 1
    assert checked > 150


# -- criterion 3 and 4: low rank class sums -----------------------------------

def _class(t, word, sigma="id", tail=None):
    S = build_system(t)
    sig = {"id": S.identity_sigma, "opp": S.opposition, "flip": lambda: S.sigma_by_name("flip")}[sigma]()
    x = S.element_from_word(word) if tail is None else S.multiply(S.longest_element(tail), S.element_from_word(word))
    return enumerate_class(S, S.multiply(x, S.w0), sig)


# (type, class, params, class sum at q^(1/2), W(q), a shortest element named alongside)
LOWRANK = [
    ("A3", ([1], "opp"), 2, R({2: 17}), 315, None),
    ("B3", ([1], "id"), "2,2,4", R({2: 94}), 16065, (1, 3)),
    ("D4", ([1], "id"), 2, R({2: 206}), 42525, (1, 3, 4)),
    ("D4", ([1], "flip"), 2, R({2: 210}), 42525, (1,)),
    ("D5", ([1], "id"), 2, R({2: 5456}), 22410675, (1, 4, 5)),
    ("E6", ([2], "id"), 2, R({2: 2083706}), 3126356394525, (1, 2, 6)),
    ("E7", ([1, 2, 5, 7], "id"), 2, R({2: 8877543572}), 867088089921935556675, (1, 2, 7)),
    ("E8", ([8], "id", [2, 3, 4, 5]), 2, R({2: 141388830406973542}),
     254136050560806452394291280512170128125, (1, 2, 8)),
]


@lru_cache(maxsize=None)
def lowrank_class(i):
    t, spec, *_ = LOWRANK[i]
    return _class(t, spec[0], spec[1], spec[2] if len(spec) > 2 else None)


@criterion(3)
def test_criterion_03_class_sums():
    for i, (t, _, params, csum, wq, shortest) in enumerate(LOWRANK):
        c = lowrank_class(i)
        assert poincare(c.system, params) == wq, t
        assert class_sum(c, params) == csum, t
        if shortest:
            w = c.system.element_from_word(shortest)
            assert w in c and c.system.length(w) == c.min_length, (t, shortest)
    c = lowrank_class(1)
    assert class_sum(c, 2) == 54
    rep = counts_uniclass(c, 2)
    assert {tuple(r.word): r.count for r in rep.rows}[(1, 3)] == 105
    A3 = lowrank_class(0)
    assert {tuple(A3.system.reduced_word(w)) for w in A3} == {
        (2,), (1, 2, 3), (3, 2, 1), (1, 2, 1, 3, 2), (1, 2, 3, 2, 1), (2, 1, 3, 2, 1)}


@criterion(4)
def test_criterion_04_nonintegrality():
    for i, (t, _, params, *_rest) in enumerate(LOWRANK):
        rep = counts_uniclass(lowrank_class(i), params)
        assert not rep.integral and rep.witness, t
    assert "315/17" in counts_uniclass(lowrank_class(0), 2).witness
    assert "405/2" in counts_uniclass(lowrank_class(3), 2).witness
    rep = counts_uniclass(lowrank_class(1), 2)
    assert rep.integral and {tuple(r.word): r.count for r in rep.rows}[(1, 3)] == 105


# -- criterion 5: E7 worked example -----------------------------------------------

@criterion(5)
def test_criterion_05_e7_example():
    E7 = build_system("E7")
    literal = enumerate_class(E7, E7.element_from_word([3, 5, 7]))
    fixed = class_of_diagram(parse_symbol("E7;4"))  # Cl(w_J), J = {2,5,7}
    notes = []
    size_ok = len(literal) == 315
    notes.append(f"|Cl(s3s5s7)| = {len(literal)}, |Cl(s2s5s7)| = {len(fixed)}")
    sums_ok = True
    for q in (2, 3):
        closed = (q**5 - 1) * (q**9 - 1) * (q**14 - 1) // ((q - 1) ** 3 * (q + 1))
        for name, c in (("Cl(s3s5s7)", literal), ("Cl(s2s5s7)", fixed)):
            got = class_sum(c, q)
            if got != closed:
                sums_ok = False
                notes.append(f"C for {name} at q={q} is {got}, closed form {closed}")
    q = 2
    rep = counts_substructure(fixed, q, relative_system("F4"), (q, q, q * q, q * q))
    head = (q + 1) ** 3 * (q**2 + 1) * (q**4 + 1) * (q**5 + 1) * (q**9 + 1) * (q**6 - 1) * (q**12 - 1) // (q - 1) ** 2
    counts_ok = len(rep.rows) == 315 and all(
        (r.length - 3) % 2 == 0 and r.count == head * q ** ((r.length - 3) // 2) for r in rep.rows)
    notes.append(f"|Delta_w| formula over the 315 elements: {counts_ok}")
    assert size_ok and sums_ok and counts_ok, "; ".join(notes)


# -- criterion 6, 7 --------------------------------------------------------------

TRIALITY_WORDS = ["121324", "321421", "121321", "123242", "142132", "214213", "232421", "232423", "121421",
                  "12324213", "13421324", "13214213", "2132421324", "2132142132", "121321421324", "1213242132"]


@criterion(6)
def test_criterion_06_d4_triality():
    D4 = build_system("D4")
    sigma = D4.sigma_by_name("triality")
    assert (sigma(1), sigma(3), sigma(4), sigma(2)) == (3, 4, 1, 2)
    listed = {D4.element_from_word([int(ch) for ch in w]) for w in TRIALITY_WORDS}
    assert len(listed) == 16
    assert set(enumerate_class(D4, D4.w0, sigma)) == listed


@criterion(7)
def test_criterion_07_f4_duality():
    F4 = build_system("F4")
    sigma = F4.sigma_by_name("flip")
    one = set(enumerate_class(F4, F4.identity(), sigma))
    assert one == set(enumerate_class(F4, F4.w0, sigma))
    invols = {w for w in F4.enumerate_group() if is_sigma_involution(F4, w, sigma)}
    assert len(F4.enumerate_group()) == 1152
    assert invols == one


# -- criterion 8: thin buildings -----------------------------------------------------

THIN_TYPES = ["A1", "A2", "A3", "A4", "A5", "B2", "B3", "B4", "B5", "D4", "D5", "F4", "H3", "H4",
              "I2(5)", "I2(6)", "I2(8)"]


@criterion(8)
def test_criterion_08_thin_oracle():
    rng = random.Random(8)
    for t in THIN_TYPES:
        S = build_system(t)
        b = bd.ThinBuilding(S)
        autos = S.diagram_automorphisms()
        for _ in range(50):
            w = S.element_from_word([rng.choice(S.labels) for _ in range(rng.randrange(3 * S.rank + 4))])
            sigma = rng.choice(autos)
            rep = b.spectrum(bd.ThinAutomorphism(w, sigma))
            c = enumerate_class(S, w, sigma)
            assert set(rep.counts) == set(c), (t, w, sigma)
            assert set(rep.counts.values()) == {S.order // len(c)}


# -- criterion 9, 10: thick buildings ------------------------------------------------

@criterion(9)
def test_criterion_09_sl3():
    t0 = time.perf_counter()
    b, theta = bd.sl3_example(2, 1)
    rep = bd.spectrum(b, theta)
    elapsed = time.perf_counter() - t0
    words = {tuple(b.system.reduced_word(w)) for w in rep.counts}
    assert words == {(1, 2), (2, 1), (1, 2, 1)}
    assert not rep.union_of_classes()
    assert elapsed < 1.0, f"{elapsed:.2f}s"


def _uniclass_run(n, q, make):
    b = bd.FlagBuilding(n, q)
    rep = bd.spectrum(b, make(b))
    assert rep.visited == b.chamber_count()
    assert rep.uniclass(), (n, q)
    c = rep.classes()[0]
    assert set(rep.counts) == set(c)
    pred = counts_uniclass(c, q)
    assert pred.integral
    for r in pred.rows:
        assert rep.counts[b.system.element_from_word(r.word)] == r.count.to_int()
    ok, bad = bd.counting_recursion_check(rep)
    assert ok, bad
    assert rep.duality_holds()
    return rep


@criterion(10)
def test_criterion_10_uniclass_end_to_end():
    for q in (2, 3):
        _uniclass_run(3, q, bd.symplectic_polarity)
        _uniclass_run(3, q, bd.spread_collineation)
    t0 = time.perf_counter()
    rep = _uniclass_run(5, 2, bd.symplectic_polarity)
    assert rep.fixed_diagram().symbol == "2A5;3^1"
    assert time.perf_counter() - t0 < 300


# -- criterion 11, 12 ----------------------------------------------------------------

CRYSTAL = ([f"A{n}" for n in range(1, 9)] + [f"B{n}" for n in range(2, 9)] + [f"D{n}" for n in range(4, 9)]
           + ["E6", "E7", "E8", "F4", "G2"])


def _commutes(S, a, b):
    return S.multiply(a, b) == S.multiply(b, a)


@criterion(11)
def test_criterion_11_highest_root():
    for t in CRYSTAL:
        S = build_system(t)
        if t == "G2":
            S = CoxeterSystem(S.spec, crystal=True)
        phi, polar, ok = S.polar_check()
        assert ok, t
        # the polar set, recomputed as the generators not commuting with s_phi
        s_phi = S.reflection(S.all_roots.index(tuple(phi)))
        assert polar == {i for i in S.labels if not _commutes(S, S.generator(i), s_phi)
                         or S.generator(i) == s_phi}, t
        assert S.multiply(S.w0, s_phi) == S.longest_element(set(S.labels) - polar), t
    # type C shares its Weyl group with B; its highest root reflects in the
    # highest short root of B, which is conjugate to the short generator
    for n in range(2, 9):
        S = build_system(f"B{n}")
        short_class = next(i for i, cls in enumerate(S.generator_classes()) if n in cls)
        N = S.positive_count
        short = [k for k in range(N) if S.class_counts(S.reflection(k))[short_class] % 2 == 1]
        top = max(short, key=lambda k: sum(S.all_roots[k]))
        s = S.reflection(top)
        polar = {i for i in S.labels if not _commutes(S, S.generator(i), s)}
        assert polar == {1}, n
        assert S.multiply(S.w0, s) == S.longest_element(set(S.labels) - polar)


def _w_ge(S, k):
    return S.longest_element({i for i in S.labels if i >= k})


def _is_minimal(S, w, c):
    return w in c and S.length(w) == c.min_length


@criterion(12)
def test_criterion_12_classfacts():
    s1 = lambda S: S.generator(1)  # noqa: E731
    for n in (4, 5):
        S = build_system(f"B{n}")
        for i in range(3, n):
            target = S.multiply(S.multiply(s1(S), _w_ge(S, i + 1)), S.w0)
            c = enumerate_class(S, target)
            assert _is_minimal(S, S.multiply(s1(S), _w_ge(S, n - i + 3)), c), (n, i)
    for n in (5, 6):
        S = build_system(f"D{n}")
        flip = S.sigma_by_name("flip")
        rho = flip if n % 2 == 0 else S.identity_sigma()
        c = enumerate_class(S, S.multiply(s1(S), S.w0), rho)
        assert _is_minimal(S, S.multiply(s1(S), _w_ge(S, 4)), c), (n, "item 1")
        for i in range(3, n - 1):
            target = S.multiply(S.multiply(s1(S), _w_ge(S, i + 1)), S.w0)
            if i % 2 == 0:
                c = enumerate_class(S, target)
            else:
                c = enumerate_class(S, target, flip)
            expected = s1(S) if i == 3 else S.multiply(s1(S), _w_ge(S, n - i + 3))
            assert _is_minimal(S, expected, c), (n, i)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except Exception:
                pass
    print("\n".join(summary_lines()))
