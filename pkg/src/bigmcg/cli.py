"""Command-line front end.

Exit codes: 0 success, 2 parse or validity error, 3 resource budget
exhausted, 4 precondition failure.  Every argument that names an input file
may instead be an inline expression: it is read as text when it contains
"=" and no path separator.
"""

import argparse
import contextlib
import io
import json
import os
import sys

from . import classifier, curve_twist, end_space, fraisse, mann_rafi
from .errors import ParseError, PreconditionError, ResourceError, ValidityError

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE, EXIT_PRECONDITION = 0, 2, 3, 4

PROPERTY_NAMES = {
    "hp": "HP",
    "jep": "JEP",
    "ap": "AP",
    "wap": "WAP",
    "local-wap": "LocalWAP",
    "jep-fp": "JEP_Fp",
    "wap-fp": "WAP_Fp",
    "local-wap-fp": "LocalWAP_Fp",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # report usage problems as exceptions so dispatch() owns the exit code
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def is_inline(arg):
    return "=" in arg and os.sep not in arg and "/" not in arg


def read_input(arg):
    if is_inline(arg):
        return arg
    try:
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidityError(f"cannot read {arg!r}: {exc.strerror}") from None


def _load_json(arg, loader):
    text = read_input(arg)
    try:
        return loader(text)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidityError(f"malformed structure file {arg!r}: {exc}") from None


def build_parser():
    p = _Parser(prog="bigmcg", description="Conjugacy-class verdicts for big mapping class groups, "
                "a Fraisse engine and a braid/multicurve engine.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="classify the conjugacy classes of MCG of a surface")
    c.add_argument("surface", help="surface file or inline 'genus = ...; ends = ...'")
    c.add_argument("--strict", action="store_true", help="disable heuristic criteria")
    c.add_argument("--format", choices=("text", "structured"), default="text")

    e = sub.add_parser("ends", help="end-space normal forms and the Mann-Rafi order")
    e.add_argument("action", choices=("normalize", "order", "maximal"))
    e.add_argument("expr", help="end expression, or a full surface specification")

    f = sub.add_parser("fraisse", help="Fraisse class engine")
    fsub = f.add_subparsers(dest="action", required=True, parser_class=_Parser)
    fc = fsub.add_parser("check", help="check a class property at the class bounds")
    fc.add_argument("classfile")
    fc.add_argument("--property", required=True, choices=tuple(PROPERTY_NAMES))
    fch = fsub.add_parser("chain", help="build a bounded Fraisse limit chain")
    fch.add_argument("classfile")
    fch.add_argument("--steps", type=int, required=True)
    ff = fsub.add_parser("fraissefy", help="enrich a structure by orbit relations")
    ff.add_argument("structfile")
    ff.add_argument("--generators", required=True, help="file with {\"generators\": [[...], ...]}")

    cv = sub.add_parser("curves", help="multicurves on the punctured disk")
    csub = cv.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ca = csub.add_parser("act", help="act on a multicurve by a braid word")
    ca.add_argument("--n", type=int)
    ca.add_argument("--coords", required=True, help="'n=4; a=[..]; b=[..]' or comma-separated a then b")
    ca.add_argument("--word", required=True, help="braid word such as 's1 s2^-1'")
    ct = csub.add_parser("twist", help="Dehn twist word about a round curve")
    ct.add_argument("--round", required=True, dest="round_curve", metavar="I,J")
    ct.add_argument("--n", type=int)
    ct.add_argument("--power", type=int, default=1)
    ci = csub.add_parser("intersect", help="intersection number with a round curve")
    ci.add_argument("--round", required=True, dest="round_curve", metavar="I,J")
    ci.add_argument("--coords", required=True)
    ci.add_argument("--n", type=int)
    return p


# ---------------------------------------------------------------- handlers

def _classify(args):
    spec = end_space.parse_surface(read_input(args.surface).strip())
    report = classifier.classify(spec, classifier.ClassifierConfig(strict=args.strict))
    return report.to_structured() if args.format == "structured" else report.to_text()


def _surface_for_ends(text):
    if "ends" in text and "=" in text:
        return end_space.parse_surface(text)
    expr = end_space.parse_ends(text)
    genus = end_space.INF if end_space.has_nonplanar(expr) else 0
    return end_space.SurfaceSpec(genus, expr)


def _ends(args):
    spec = _surface_for_ends(args.expr.strip())
    if args.action == "normalize":
        return end_space.normalize(spec.ends).record()
    if args.action == "order":
        return mann_rafi.end_equivalence_classes(spec).record()
    return f"maximal ends: {mann_rafi.maximal_ends(spec)}"


def _fraisse(args):
    if args.action == "check":
        cls = _load_json(args.classfile, fraisse.class_from_json)
        prop = PROPERTY_NAMES[args.property]
        if prop in fraisse.PAIR_PROPERTIES:
            return str(fraisse.check_pair_property(cls, prop))
        return str(fraisse.check_class_property(cls, prop))
    if args.action == "chain":
        if args.steps < 0:
            raise ValidityError("--steps must be non-negative")
        cls = _load_json(args.classfile, fraisse.class_from_json)
        result = fraisse.fraisse_chain(cls, args.steps)
        lines = [f"stage {t}: size {S.size}" for t, S in enumerate(result.stages)]
        lines += [str(e) for e in result.ledger]
        lines.append(f"final: {result.final}")
        return "\n".join(lines)
    K = _load_json(args.structfile, fraisse.structure_from_json)
    gens = _load_json(args.generators, fraisse.generators_from_json)
    Kt, G = fraisse.fraissefy(K, gens)
    extra = len(Kt.signature.relations) - len(K.signature.relations)
    lines = [
        f"group order: {len(G)}",
        "group: " + "; ".join(" ".join(map(str, g)) for g in G),
        f"orbit relations: {extra}",
        f"ultrahomogeneous: {fraisse.check_ultrahomogeneous(Kt)}",
    ]
    return "\n".join(lines)


def _coords(text, n):
    text = text.strip()
    if text.startswith("n"):
        L = curve_twist.parse_coords(text)
        if n is not None and n != L.n:
            raise ValidityError(f"--n {n} disagrees with coordinates for n={L.n}")
        return L
    if n is None:
        raise ValidityError("a bare coordinate vector needs --n")
    try:
        vec = [int(x) for x in text.replace("[", "").replace("]", "").split(",") if x.strip()]
    except ValueError:
        raise ValidityError(f"cannot parse coordinate vector {text!r}") from None
    if len(vec) != 2 * n - 4:
        raise ValidityError(f"expected {2 * n - 4} coordinates for n={n}, got {len(vec)}")
    return curve_twist.MultiCurveCoords.from_vector(n, vec)


def _curves(args):
    if args.action == "act":
        L = _coords(args.coords, args.n)
        return str(curve_twist.act_word(L, curve_twist.parse_word(args.word)))
    c = curve_twist.parse_round(args.round_curve)
    if args.action == "twist":
        word = curve_twist.round_twist_word(c, args.power)
        lines = [f"word: {curve_twist.format_word(word)}"]
        if args.n is not None:
            lines.append(f"round curve: {curve_twist.round_coords(args.n, c)}")
        return "\n".join(lines)
    L = _coords(args.coords, args.n)
    return str(curve_twist.intersection_with_round(L, c))


HANDLERS = {"classify": _classify, "ends": _ends, "fraisse": _fraisse, "curves": _curves}


def dispatch(argv):
    """Run one command; returns ``(exit code, output text)``."""
    buf = io.StringIO()
    try:
        with contextlib.redirect_stdout(buf):
            args = build_parser().parse_args(argv)
    except _UsageError as exc:
        return EXIT_INVALID, str(exc)
    except SystemExit:
        # --help
        return EXIT_OK, buf.getvalue().rstrip("\n")
    try:
        return EXIT_OK, HANDLERS[args.command](args)
    except ResourceError as exc:
        return EXIT_RESOURCE, f"error: resource budget exhausted: {exc}"
    except PreconditionError as exc:
        return EXIT_PRECONDITION, f"error: precondition failed: {exc}"
    except (ParseError, ValueError) as exc:
        return EXIT_INVALID, f"error: {exc}"


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    code, text = dispatch(argv)
    stream = sys.stdout if code == EXIT_OK else sys.stderr
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
