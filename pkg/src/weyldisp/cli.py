"""weyldisp command line: classify, class, count, building."""

import argparse
import csv
import io
import json
import re
import sys

from .coxeter import build_system, parse_word
from .errors import WeyldispError

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for mathematical failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _progress(enabled):
    if not enabled:
        return None

    def say(msg):
        print(msg, file=sys.stderr, flush=True)

    return say


# -- argument helpers -------------------------------------------------------

_TOKEN = re.compile(r"w0|w[({\[]([\d,\s]*)[)}\]]|\d+")


def parse_element(system, text):
    """Word syntax: generator indices separated by spaces (or a run of single
    digits), plus the shorthands ``w0`` and ``w(2,3,4,5)`` for longest
    elements.  Example: "w(2,3,4,5) 8 w0"."""
    text = (text or "").strip()
    if re.fullmatch(r"[\d\s,]*", text):
        word = parse_word(text)
        bad = [s for s in word if s not in system.labels]
        if bad:
            raise UsageError(f"generator {bad[0]} is not a node of {system.spec}")
        return system.element_from_word(word)
    w = system.identity()
    pos = 0
    for m in _TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise UsageError(f"cannot parse word near {text[pos:m.start()]!r}")
        pos = m.end()
        tok = m.group(0)
        if tok == "w0":
            x = system.w0
        elif tok.startswith("w"):
            J = parse_word(m.group(1))
            x = system.longest_element(J)
        else:
            x = system.element_from_word(parse_word(tok))
        w = system.multiply(w, x)
    if text[pos:].strip():
        raise UsageError(f"cannot parse word near {text[pos:]!r}")
    return w


def _system(args):
    try:
        return build_system(args.type)
    except WeyldispError as exc:
        raise UsageError(str(exc)) from exc


def _sigma(system, name):
    try:
        return system.sigma_by_name(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params(system, args, sigma=None):
    from .counting import ParameterMap

    text = args.params if args.params is not None else args.q
    if text is None:
        raise UsageError("give --q or --params")
    try:
        return ParameterMap(system, text, sigma)
    except (WeyldispError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _target_class(system, args):
    """The class named by --symbol or by --word/--sigma."""
    from .twisted import enumerate_class

    cap = args.max_class_size
    if getattr(args, "symbol", None):
        from .diagrams import class_of_diagram, parse_symbol

        try:
            d = parse_symbol(args.symbol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if d.system.spec != system.spec:
            raise UsageError(f"{args.symbol} is a diagram of {d.system.spec.name}, not {system.spec.name}")
        return class_of_diagram(d, cap)
    sigma = _sigma(system, args.sigma)
    w = parse_element(system, args.word)
    return enumerate_class(system, w, sigma, cap)


# -- output -------------------------------------------------------------------

def _emit(fmt, data, pretty, rows=None, columns=None, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(data, indent=2) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([r.get(c, "") for c in columns])
        out.write(buf.getvalue())
    else:
        out.write(pretty)


def _table(rows, columns):
    cells = [[str(c) for c in columns]] + [["" if r.get(c) is None else str(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _labels(J):
    return None if J is None else " ".join(map(str, sorted(J)))


# -- subcommands --------------------------------------------------------------

def cmd_classify(args):
    from .twisted import classify_bicapped

    system = _system(args)
    sigmas = None
    if args.sigma:
        sigmas = [_sigma(system, s) for s in args.sigma.split(",")]
    found = classify_bicapped(system, sigmas, args.max_class_size, _progress(args.progress))
    rows = []
    for r in found:
        rows.append({
            "symbol": r.symbol,
            "dual": r.dual_symbol,
            "sigma": " ".join(map(str, r.sigma.node_perm)),
            "J": _labels(r.J),
            "Jprime": _labels(r.Jprime),
            "size": r.size,
            "fix_rank": r.fix_rank,
            "opp_rank": r.opp_rank,
            "relative_type": r.relative_type,
            "dual_relative_type": r.dual_relative_type,
        })
    data = {"type": system.spec.name, "rows": rows}
    cols = ["symbol", "dual", "relative_type", "dual_relative_type", "fix_rank", "opp_rank", "size", "J", "Jprime", "sigma"]
    pretty = f"bi-capped classes of {system.spec.name}\n" + _table(rows, cols)
    _emit(args.format, data, pretty, rows, cols)
    return EXIT_OK


def cmd_class(args):
    from .counting import class_sum
    from .errors import NotBicapped, NotInvolutionClass
    from .twisted import cap_certificate, class_report

    system = _system(args)
    c = _target_class(system, args)
    try:
        cert = cap_certificate(c)
    except NotInvolutionClass:
        cert = None
    data = class_report(c, cert)
    data["representative"] = system.word_string(c.representative())
    data["fixed_diagram"] = data["opposition_diagram"] = None
    if cert is not None and cert.bicapped:
        from .diagrams import diagrams_of_class, relative_type

        try:
            fixed, opp = diagrams_of_class(c, cert)
            data["fixed_diagram"], data["opposition_diagram"] = fixed.symbol, opp.symbol
            data["relative_type"] = relative_type(fixed)[1]
        except NotBicapped:
            pass
    if args.q is not None or args.params is not None:
        params = _params(system, args, c.sigma)
        data["params"] = list(params.values)
        data["class_sum"] = str(class_sum(c, params))
    if args.enumerate:
        data["elements"] = [system.word_string(w) for w in c.sorted_elements()]
    lines = [f"{k}: {v}" for k, v in data.items() if k != "elements"]
    if args.enumerate:
        lines.append("elements:")
        lines += [f"  {w or '1'}" for w in data["elements"]]
    rows = [{"word": w, "length": system.length(x)} for w, x in
            ((system.word_string(x), x) for x in c.sorted_elements())] if args.format == "csv" else None
    _emit(args.format, data, "\n".join(lines) + "\n", rows, ["word", "length"])
    return EXIT_OK


def _substructure(system, c, params, spec_text):
    """(sub_system, sub_params, label) for --substructure."""
    from .counting import finite_ws_rows, relative_system

    if spec_text == "auto":
        from .diagrams import diagrams_of_class

        fixed = diagrams_of_class(c)[0].symbol
        for row in finite_ws_rows(system, params):
            if row.symbol == fixed:
                return relative_system(row.relative), row.sub_params, f"row {row.ref}: {row.relative}{list(row.sub_params)}"
        raise UsageError(f"no tabulated Weyl substructure for {fixed} at {list(params.values)}")
    if spec_text in ("X0", "none", ""):
        return None, None, "X0"
    name, _, vals = spec_text.partition(":")
    try:
        sub = relative_system(name)
    except WeyldispError as exc:
        raise UsageError(str(exc)) from exc
    if not vals:
        raise UsageError("substructure needs parameters, e.g. F4:2,2,4,4")
    return sub, vals, spec_text


def cmd_count(args):
    from .counting import counts_substructure, counts_uniclass

    system = _system(args)
    c = _target_class(system, args)
    params = _params(system, args, c.sigma)
    say = _progress(args.progress)
    if say:
        say(f"class of size {len(c)}")
    if args.substructure:
        sub, sub_params, label = _substructure(system, c, params, args.substructure)
        report = counts_substructure(c, params, sub, sub_params)
    else:
        label = None
        report = counts_uniclass(c, params)
    data = report.to_json()
    data["type"] = system.spec.name
    data["sigma"] = list(c.sigma.node_perm)
    data["size"] = len(c)
    data["substructure"] = label
    rows = data["rows"]
    cols = ["word", "length", "q_w", "count"]
    head = [
        f"class {report.descriptor} in {system.spec.name}, {len(c)} elements, params {list(report.params)}",
        f"W(q) = {report.poincare}",
        f"C(q^1/2) = {report.class_sum}",
    ]
    if label:
        head.append(f"substructure {label}: implied C(q^1/2) = {report.derived_class_sum}")
    head.append(f"integral: {report.integral}")
    if report.witness:
        head.append(f"witness: {report.witness}")
    pretty = "\n".join(head) + "\n" + _table(rows, cols)
    _emit(args.format, data, pretty, rows, cols)
    return EXIT_OK if report.integral else EXIT_MATH


def _automorphism(b, text):
    from . import buildings as bd

    kind, _, arg = text.partition(":")
    try:
        if kind == "symplectic-polarity":
            return bd.symplectic_polarity(b)
        if kind == "spread":
            return bd.spread_collineation(b)
        if kind == "sl3":
            if b.dim != 3:
                raise UsageError("sl3 needs an A2 model")
            return bd.sl3_example(b.q, int(arg or "1"))[1]
        if kind in ("matrix", "correlation"):
            if not arg.startswith("@"):
                raise UsageError(f"{kind} needs @file")
            with open(arg[1:]) as fh:
                mat = [[int(x) for x in line.replace(",", " ").split()] for line in fh if line.strip() and not line.startswith("#")]
            if kind == "matrix":
                return bd.collineation(b, mat, label=f"matrix {arg[1:]}")
            return bd.correlation(b, mat, label=f"correlation {arg[1:]}")
    except WeyldispError as exc:
        raise UsageError(str(exc)) from exc
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown automorphism {text!r}")


def cmd_building(args):
    from .buildings import FlagBuilding, counting_recursion_check, spectrum

    try:
        b = FlagBuilding.from_model(args.model)
    except (WeyldispError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    theta = _automorphism(b, args.auto)
    exhaustive = not args.samples
    say = _progress(args.progress)
    if say:
        say(f"{b.name}: {b.chamber_count()} chambers, {'exhaustive' if exhaustive else f'{args.samples} samples'}")
    rep = spectrum(b, theta, exhaustive=exhaustive, samples=args.samples, seed=args.seed, threads=args.threads, progress=say)
    data = rep.to_json()
    status = EXIT_OK
    if exhaustive:
        ok, bad = counting_recursion_check(rep)
        data["verdicts"]["counting_recursion"] = ok
        if not ok:
            data["verdicts"]["counting_recursion_counterexample"] = bad
            status = EXIT_MATH
        if data["verdicts"]["uniclass"]:
            from .counting import counts_uniclass

            c = rep.classes()[0]
            pred = counts_uniclass(c, b.q)
            match = pred.integral and all(
                r.count.to_int() == rep.counts.get(b.system.element_from_word(r.word), 0) for r in pred.rows
            )
            data["verdicts"]["counts_match_prediction"] = match
            if not match:
                status = EXIT_MATH
    rows = data["spectrum"]
    cols = ["word", "length", "count"]
    head = [f"{data['model']}  {data['automorphism']}  chambers visited: {data['chambers']}"]
    if "seed" in data:
        head.append(f"seed: {data['seed']}")
    pretty = "\n".join(head) + "\n" + _table([{**r, "word": r["word"] or "1"} for r in rows], cols)
    pretty += "".join(f"{k}: {v}\n" for k, v in data["verdicts"].items())
    _emit(args.format, data, pretty, rows, cols)
    return status


# -- parser ---------------------------------------------------------------------

def build_parser():
    from .buildings import default_threads
    from .twisted import DEFAULT_CAP

    p = _Parser(prog="weyldisp", description="Twisted involution classes, chamber counts and displacement spectra.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("--format", choices=["pretty", "json", "csv"], default="pretty")
        sp.add_argument("--max-class-size", type=int, default=DEFAULT_CAP)
        sp.add_argument("--threads", type=int, default=default_threads())
        sp.add_argument("--progress", action="store_true", help="progress messages on stderr")

    def klass(sp):
        sp.add_argument("--type", required=True)
        sp.add_argument("--sigma", default="id", help="id, flip, triality, triality2 or perm:a,b,...")
        sp.add_argument("--word", default="", help='e.g. "1 2 1", "w0", "w(2,3,4,5) 8 w0"')
        sp.add_argument("--symbol", help="select the class of an admissible diagram, e.g. E7;4")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--q")
        g.add_argument("--params", help='"2,2,4", "1=2,3=4" or "l=2,s=4"')

    sp = sub.add_parser("classify", help="bi-capped classes of a type")
    sp.add_argument("--type", required=True)
    sp.add_argument("--sigma", help="comma separated; default identity and the standard involution")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("class", help="report on one twisted class")
    klass(sp)
    sp.add_argument("--enumerate", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_class)

    sp = sub.add_parser("count", help="displacement counts for a class")
    klass(sp)
    sp.add_argument("--substructure", help='"auto", "X0" or TYPE:params such as "F4:2,2,4,4"')
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("building", help="displacement spectrum on a flag building")
    sp.add_argument("--model", required=True, help="A{n}:F{q}, q in 2,3,4,5")
    sp.add_argument("--auto", required=True, help="symplectic-polarity, spread, sl3:a, matrix:@file, correlation:@file")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", default=True)
    g.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_building)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"weyldisp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WeyldispError as exc:
        print(f"weyldisp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep quiet
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
