"""Time the compiled kernels against the pure-Python ones on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

import argparse
import time

from weyldisp import _pykernels, build_system
from weyldisp import buildings as bd

try:
    from weyldisp import _ckernels
except ImportError:
    _ckernels = None


def orbit_case(t, word):
    S = build_system(t)
    w = S.element_from_word(word)
    gens = [g.perm for g in S.generators]
    return f"twisted_orbit {t} Cl({' '.join(map(str, word))})", lambda k: k.twisted_orbit(w.perm, gens, gens, 10**7)


def layers_case(t):
    S = build_system(t)
    gens = [g.perm for g in S.generators]
    return f"group_layers {t}", lambda k: k.group_layers(gens, S.simple_index, S.positive_count)


def flags_case(n, q, make):
    b = bd.FlagBuilding(n, q)
    th = make(b)
    add, mul, neg, inv, _ = b.field.tables

    def run(k):
        out = {}
        k.flag_spectrum(b.dim, q, add, mul, neg, inv, th.mode, th.matrix, out)
        return out

    return f"flag_spectrum A{n}(F{q}) {th.label}", run


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled kernels not built; run pip install -e . --no-build-isolation")
    cases = [orbit_case("E7", [3, 5, 7]), layers_case("E6"), flags_case(3, 3, bd.symplectic_polarity)]
    slow = []
    if not args.quick:
        # the pure-Python A5(F2) run takes over a minute, so it is timed once
        cases += [orbit_case("E8", [2, 3, 4, 5, 8]), layers_case("E7")]
        slow = [flags_case(5, 2, bd.symplectic_polarity)]
    print(f"{'kernel':46s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in cases + slow:
        tp, rp = best_of(lambda: fn(_pykernels), 1 if (name, fn) in slow else args.repeat)
        tc, rc = best_of(lambda: fn(_ckernels), args.repeat)
        assert rp == rc, f"{name}: backends disagree"
        print(f"{name:46s} {tp:10.3f} {tc:10.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
