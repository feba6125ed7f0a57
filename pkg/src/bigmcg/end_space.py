"""Surface specifications: a genus plus a nested end space (E, E_inf).

End spaces are built from four node kinds:

``Pt(mark)``
    a single isolated end.
``OmegaSeq(child, limit_mark)``
    a sequence of copies of ``child`` converging to one limit end.
``Cantor(mark)``
    a Cantor set of ends, uniformly marked.
``Sum(children)``
    a disjoint union.

A mark is either planar or nonplanar (accumulated by genus).  Text syntax::

    genus = inf; ends = pt* + omega(pt)

where ``*`` marks a nonplanar end, and on ``omega(...)`` marks its limit.
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .errors import ParseError, ResourceError, ValidityError
from .ordinals import ZERO, Ordinal

INF = math.inf
MAX_NESTING = 200
DECOMPOSITION_BUDGET = 20000


class Mark(str, Enum):
    PLANAR = "planar"
    NONPLANAR = "nonplanar"


PLANAR = Mark.PLANAR
NONPLANAR = Mark.NONPLANAR


class _Node:
    __slots__ = ()

    def __repr__(self):
        return f"{type(self).__name__}<{to_text(self)}>"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Pt(_Node):
    mark: Mark = PLANAR


@dataclass(frozen=True, repr=False)
class OmegaSeq(_Node):
    child: object
    limit_mark: Mark = PLANAR


@dataclass(frozen=True, repr=False)
class Cantor(_Node):
    mark: Mark = PLANAR


@dataclass(frozen=True, repr=False)
class Sum(_Node):
    children: tuple


def make_sum(children):
    """Disjoint union of ``children``, flattening nested sums."""
    flat = []
    for c in children:
        if isinstance(c, Sum):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        raise ValueError("a sum needs at least one summand")
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


@dataclass(frozen=True)
class SurfaceSpec:
    genus: object
    ends: object

    def is_infinite_genus(self):
        return self.genus == INF

    def to_text(self):
        g = "inf" if self.genus == INF else str(self.genus)
        return f"genus = {g}; ends = {to_text(self.ends)}"


@dataclass(frozen=True)
class Cardinality:
    """Size of a set of ends: finite, countably infinite, or a Cantor set."""

    kind: str
    n: int = 0

    def __add__(self, other):
        if "cantor" in (self.kind, other.kind):
            return CANTOR_MANY
        if "countable" in (self.kind, other.kind):
            return COUNTABLY_MANY
        return Finite(self.n + other.n)

    def is_finite(self):
        return self.kind == "finite"

    def __str__(self):
        if self.kind == "finite":
            return str(self.n)
        return "countably many" if self.kind == "countable" else "Cantor set"


def Finite(n):
    return Cardinality("finite", n)


COUNTABLY_MANY = Cardinality("countable")
CANTOR_MANY = Cardinality("cantor")


class _NotCountable:
    def __repr__(self):
        return "NotCountable"

    __str__ = __repr__


NOT_COUNTABLE = _NotCountable()


# ---------------------------------------------------------------- text

def to_text(expr):
    """Render an expression in the surface DSL."""
    if isinstance(expr, Pt):
        return "pt*" if expr.mark is NONPLANAR else "pt"
    if isinstance(expr, Cantor):
        return "cantor*" if expr.mark is NONPLANAR else "cantor"
    if isinstance(expr, OmegaSeq):
        star = "*" if expr.limit_mark is NONPLANAR else ""
        return f"omega({to_text(expr.child)}){star}"
    if isinstance(expr, Sum):
        return "+".join(to_text(c) for c in expr.children)
    raise TypeError(f"not an end-space expression: {expr!r}")


def _tokenize(text):
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        j = i
        if ch.isdigit():
            while j < len(text) and text[j].isdigit():
                j += 1
            kind = "nat"
        elif ch.isalpha():
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            kind = "word"
        else:
            j, kind = i + 1, "sym"
        tokens.append((kind, text[i:j], line, col))
        col, i = col + (j - i), j
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.nesting = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "eof":
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def surface(self):
        self.expect("genus")
        self.expect("=")
        tok = self.take()
        if tok[0] == "word" and tok[1] == "inf":
            genus = INF
        elif tok[0] == "nat":
            genus = int(tok[1])
        else:
            self.fail(f"expected 'inf' or a natural number, found {tok[1] or 'end of input'!r}", tok)
        self.expect(";")
        self.expect("ends")
        self.expect("=")
        ends = self.expr()
        self.end()
        return SurfaceSpec(genus, ends)

    def end(self):
        tok = self.peek()
        if tok[0] != "eof":
            self.fail(f"unexpected {tok[1]!r}")

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] == "+" and self.peek()[0] == "sym":
            self.take()
            terms.append(self.term())
        return make_sum(terms)

    def star(self):
        if self.peek()[0] == "sym" and self.peek()[1] == "*":
            self.take()
            return NONPLANAR
        return PLANAR

    def term(self):
        tok = self.take()
        if tok[0] == "word" and tok[1] == "pt":
            return Pt(self.star())
        if tok[0] == "word" and tok[1] == "cantor":
            return Cantor(self.star())
        if tok[0] == "word" and tok[1] == "omega":
            self.nesting += 1
            if self.nesting > MAX_NESTING:
                raise ResourceError(f"omega nesting deeper than {MAX_NESTING}")
            self.expect("(")
            child = self.expr()
            self.expect(")")
            self.nesting -= 1
            return OmegaSeq(child, self.star())
        self.fail(f"expected 'pt', 'omega' or 'cantor', found {tok[1] or 'end of input'!r}", tok)


def parse_surface(text):
    """Parse and validate a surface specification.

    >>> parse_surface("genus = 0; ends = omega(pt)").ends
    OmegaSeq<omega(pt)>
    """
    spec = _Parser(text).surface()
    problems = validate(spec)
    if problems:
        raise ValidityError("; ".join(str(p) for p in problems), problems)
    return spec


def parse_ends(text):
    """Parse a bare end-space expression and check its closure invariant."""
    p = _Parser(text)
    expr = p.expr()
    p.end()
    problems = validate_expr(expr)
    if problems:
        raise ValidityError("; ".join(str(v) for v in problems), problems)
    return expr


# ---------------------------------------------------------------- validity

@dataclass(frozen=True)
class Violation:
    invariant: str
    path: str
    detail: str = ""

    def __str__(self):
        extra = f": {self.detail}" if self.detail else ""
        return f"{self.invariant} at {self.path}{extra}"


def has_nonplanar(expr):
    if isinstance(expr, Pt):
        return expr.mark is NONPLANAR
    if isinstance(expr, Cantor):
        return expr.mark is NONPLANAR
    if isinstance(expr, OmegaSeq):
        return expr.limit_mark is NONPLANAR or has_nonplanar(expr.child)
    return any(has_nonplanar(c) for c in expr.children)


def has_cantor(expr):
    if isinstance(expr, Cantor):
        return True
    if isinstance(expr, OmegaSeq):
        return has_cantor(expr.child)
    if isinstance(expr, Sum):
        return any(has_cantor(c) for c in expr.children)
    return False


def validate_expr(expr, path="ends"):
    out = []
    if isinstance(expr, (Pt, Cantor)):
        if not isinstance(expr.mark, Mark):
            out.append(Violation("mark", path, f"unknown mark {expr.mark!r}"))
    elif isinstance(expr, OmegaSeq):
        out.extend(validate_expr(expr.child, path + ".child"))
        if has_nonplanar(expr.child) and expr.limit_mark is not NONPLANAR:
            out.append(Violation("closure", path, "E_inf not closed: nonplanar ends accumulate at a planar limit"))
    elif isinstance(expr, Sum):
        if len(expr.children) < 2:
            out.append(Violation("sum-arity", path, "a sum needs at least two summands"))
        for k, c in enumerate(expr.children):
            if isinstance(c, Sum):
                out.append(Violation("sum-flattened", f"{path}[{k}]", "nested sum"))
            out.extend(validate_expr(c, f"{path}[{k}]"))
    else:
        out.append(Violation("node-kind", path, f"unknown node {expr!r}"))
    return out


def validate(spec):
    """Return the list of violated invariants; empty means valid."""
    out = []
    g = spec.genus
    if not (g == INF or (isinstance(g, int) and not isinstance(g, bool) and g >= 0)):
        out.append(Violation("genus", "genus", f"expected a natural number or infinity, got {g!r}"))
    problems = validate_expr(spec.ends)
    out.extend(problems)
    if not any(p.invariant == "node-kind" for p in problems):
        if (g == INF) != has_nonplanar(spec.ends):
            detail = ("infinite genus needs a nonplanar end" if g == INF
                      else "nonplanar end with finite genus")
            out.append(Violation("genus-e-inf", "ends", detail))
    return out


def is_infinite_type(spec):
    return spec.genus == INF or has_cantor(spec.ends) or _has_omega(spec.ends)


def _has_omega(expr):
    if isinstance(expr, OmegaSeq):
        return True
    if isinstance(expr, Sum):
        return any(_has_omega(c) for c in expr.children)
    return False


# ---------------------------------------------------------------- characteristic

def characteristic(expr):
    """Cantor-Bendixson characteristic ``(alpha, n)`` or ``NOT_COUNTABLE``.

    A countable compact space with characteristic ``(alpha, n)`` is
    homeomorphic to ``w^alpha * n + 1`` (``n`` points when ``alpha`` is 0).
    """
    if has_cantor(expr):
        return NOT_COUNTABLE
    return _char(expr)


def _char(expr):
    if isinstance(expr, Pt):
        return (ZERO, 1)
    if isinstance(expr, OmegaSeq):
        alpha, _ = _char(expr.child)
        return (alpha.successor(), 1)
    chars = [_char(c) for c in expr.children]
    top = max(a for a, _ in chars)
    return (top, sum(n for a, n in chars if a == top))


def space_ordinal(char):
    """The ordinal ``w^alpha * n + 1`` whose order topology realises ``char``."""
    alpha, n = char
    if alpha.is_zero():
        return Ordinal.from_int(n)
    return Ordinal.omega(alpha) * n + 1


def format_characteristic(char):
    if char is NOT_COUNTABLE:
        return "not countable"
    alpha, n = char
    if alpha.is_zero():
        return f"({alpha}, {n}) ~ {n} point{'s' if n != 1 else ''}"
    return f"({alpha}, {n}) ~ {space_ordinal(char)}"


# ---------------------------------------------------------------- normal form

def marks_of(expr):
    if isinstance(expr, Pt):
        return {expr.mark}
    if isinstance(expr, Cantor):
        return {expr.mark}
    if isinstance(expr, OmegaSeq):
        return {expr.limit_mark} | marks_of(expr.child)
    out = set()
    for c in expr.children:
        out |= marks_of(c)
    return out


def tower(alpha, mark=PLANAR):
    """The canonical expression for ``w^alpha + 1`` with a uniform mark."""
    node = Pt(mark)
    for _ in range(alpha.to_int()):
        node = OmegaSeq(node, mark)
    return node


def sort_key(expr):
    text = to_text(expr)
    char = characteristic(expr)
    if char is NOT_COUNTABLE:
        return (1, ZERO, 0, text)
    return (0, char[0], char[1], text)


def _summands(expr):
    return expr.children if isinstance(expr, Sum) else (expr,)


@lru_cache(maxsize=None)
def _norm(expr):
    if isinstance(expr, (Pt, Cantor)):
        return expr
    if isinstance(expr, OmegaSeq):
        child = _norm(expr.child)
        # a sequence of copies of X+X is a sequence of copies of X
        kids = sorted(set(_summands(child)), key=sort_key)
        child = make_sum(kids)
        if isinstance(child, Cantor) and child.mark == expr.limit_mark:
            return child
        node = OmegaSeq(child, expr.limit_mark)
    else:
        kids = []
        for c in expr.children:
            kids.extend(_summands(_norm(c)))
        kids = _absorb(kids)
        node = make_sum(sorted(kids, key=sort_key))
    marks = marks_of(node)
    if len(marks) == 1 and not has_cantor(node):
        (mark,) = marks
        alpha, n = _char(node)
        return make_sum([tower(alpha, mark)] * n)
    return node


def _absorb(kids):
    """Drop summands that a sibling sequence already repeats infinitely often."""
    repeated = set()
    for k in kids:
        if isinstance(k, OmegaSeq):
            repeated.update(_summands(k.child))
            repeated.add(k.child)
    out = []
    seen_cantor = set()
    for k in kids:
        if k in repeated:
            continue
        if isinstance(k, Cantor):
            # two Cantor sets side by side form one Cantor set
            if k.mark in seen_cantor:
                continue
            seen_cantor.add(k.mark)
        out.append(k)
    return out


@dataclass(frozen=True)
class CanonicalEndForm:
    countable_part: object
    cantor_parts: tuple
    raw_normal_form: object = field(compare=True)

    def record(self):
        """Deterministic structured text, one field per line."""
        if self.countable_part is None:
            countable = "none"
            profile = "none"
        else:
            char, profile_expr = self.countable_part
            countable = format_characteristic(char)
            profile = to_text(profile_expr)
        cantors = ", ".join(f"{m}:{t}" for m, t in self.cantor_parts) or "none"
        return "\n".join([
            f"normal_form: {to_text(self.raw_normal_form)}",
            f"countable_part: {countable}",
            f"marking_profile: {profile}",
            f"cantor_parts: {cantors}",
        ])


def normalize(expr):
    """Syntactic normal form; equal forms denote homeomorphic end pairs."""
    nf = _norm(expr)
    countable = [s for s in _summands(nf) if not has_cantor(s)]
    uncountable = [s for s in _summands(nf) if has_cantor(s)]
    countable_part = None
    if countable:
        part = make_sum(countable)
        countable_part = (_char(part), part)
    cantor_parts = []
    for s in uncountable:
        marks = marks_of(s)
        label = next(iter(marks)).value if len(marks) == 1 else "mixed"
        cantor_parts.append((label, to_text(s)))
    return CanonicalEndForm(countable_part, tuple(cantor_parts), nf)


# ---------------------------------------------------------------- ends

@dataclass(frozen=True)
class EndDescriptor:
    path: str
    kind: str
    multiplicity: Cardinality
    mark: Mark
    germ: object

    def __str__(self):
        return f"{self.kind} {self.mark.value} x{self.multiplicity} at {self.path} (germ {to_text(self.germ)})"


def list_ends(expr):
    """Every named end position of the expression, in tree order."""
    out = []

    def walk(e, path, inside):
        many = COUNTABLY_MANY if inside else Finite(1)
        if isinstance(e, Pt):
            out.append(EndDescriptor(path, "isolated", many, e.mark, Pt(e.mark)))
        elif isinstance(e, Cantor):
            out.append(EndDescriptor(path, "cantor", CANTOR_MANY, e.mark, e))
        elif isinstance(e, OmegaSeq):
            walk(e.child, path + ".child", True)
            out.append(EndDescriptor(path, "limit", many, e.limit_mark, e))
        else:
            for k, c in enumerate(e.children):
                walk(c, f"{path}[{k}]", inside)

    walk(expr, "ends", False)
    return out


# ---------------------------------------------------------------- clopen pieces

def _multiset_partitions(counts, bound=None):
    """Partitions of a multiset given by multiplicities, blocks in decreasing order."""
    if not any(counts):
        yield []
        return
    for block in itertools.product(*(range(c, -1, -1) for c in counts)):
        if not any(block) or (bound is not None and block > bound):
            continue
        rest = tuple(c - b for c, b in zip(counts, block))
        for tail in _multiset_partitions(rest, block):
            yield [block] + tail


def _one_step(expr, kmax):
    if isinstance(expr, Pt):
        return
    if isinstance(expr, Cantor):
        yield (expr, expr)
    elif isinstance(expr, OmegaSeq):
        for k in range(1, kmax + 1):
            yield (make_sum([expr.child] * k), expr)
    else:
        # equal summands are interchangeable, so split the multiset of kinds
        kinds = {}
        for c in expr.children:
            kinds.setdefault(to_text(c), [c, 0])[1] += 1
        reps = [rep for rep, _ in kinds.values()]
        for part in _multiset_partitions(tuple(n for _, n in kinds.values())):
            if len(part) >= 2:
                yield tuple(make_sum([r for r, k in zip(reps, block) for _ in range(k)]) for block in part)


def _dec_key(pieces):
    return tuple(sorted(to_text(p) for p in pieces))


def clopen_decompositions(expr, depth, budget=DECOMPOSITION_BUDGET):
    """Partitions into at least two clopen pieces from the natural basis.

    Level one splits the whole space once (a sum into blocks of summands, a
    sequence into ``k <= depth`` leading copies plus its tail, a Cantor set
    into halves); each further level splits one piece of a coarser
    decomposition the same way.  Pieces are returned as expressions.
    ``budget`` bounds the candidate splits examined, repeats included, since
    sums of equal summands produce many identical partitions.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    found = {}
    examined = 0

    def add(dec, into):
        nonlocal examined
        examined += 1
        if examined > budget:
            raise ResourceError(f"more than {budget} candidate clopen decompositions")
        key = _dec_key(dec)
        if key not in found:
            found[key] = tuple(sorted(dec, key=to_text))
            into.append(found[key])

    frontier = []
    for dec in _one_step(expr, depth):
        add(dec, frontier)
    for _ in range(depth - 1):
        nxt = []
        for dec in frontier:
            for i, piece in enumerate(dec):
                for split in _one_step(piece, depth):
                    add(dec[:i] + tuple(split) + dec[i + 1:], nxt)
        frontier = nxt
    return [found[k] for k in sorted(found)]


def clopen_subsets(expr, depth, budget=DECOMPOSITION_BUDGET):
    """The piece itself and every union of pieces of its decompositions."""
    seen = {to_text(expr): expr}
    unions = 0
    for dec in clopen_decompositions(expr, depth, budget):
        unions += 2 ** len(dec)
        if unions > budget * 16:
            raise ResourceError(f"more than {budget * 16} unions of clopen pieces")
        for r in range(1, len(dec)):
            for combo in itertools.combinations(dec, r):
                sub = make_sum(combo)
                seen.setdefault(to_text(sub), sub)
    return [seen[k] for k in sorted(seen)]


@dataclass(frozen=True)
class HoldsUpToDepth:
    depth: int

    def __str__(self):
        return f"HoldsUpToDepth({self.depth})"


@dataclass(frozen=True)
class FailsWithWitness:
    decomposition: tuple

    def __str__(self):
        return "FailsWithWitness(" + " | ".join(to_text(p) for p in self.decomposition) + ")"


def is_self_similar_bounded(expr, depth):
    """Check self-similarity against every decomposition up to ``depth``.

    For each decomposition some piece must contain a clopen copy of the whole
    marked space.  A decomposition where no piece does is returned as witness.
    """
    target = _norm(expr)
    for dec in clopen_decompositions(expr, depth):
        if not any(_contains_copy(piece, target, depth) for piece in dec):
            return FailsWithWitness(dec)
    return HoldsUpToDepth(depth)


def _contains_copy(piece, target, depth):
    if _norm(piece) == target:
        return True
    return any(_norm(sub) == target for sub in clopen_subsets(piece, depth))


# ---------------------------------------------------------------- names

NAMED = {
    ("inf", "pt*"): "LochNess",
    ("inf", "pt*+pt*"): "JacobsLadder",
    ("0", "omega(pt)"): "Flute",
    ("0", "cantor"): "CantorTree",
}


def recognize_named(spec):
    g = "inf" if spec.genus == INF else str(spec.genus)
    return NAMED.get((g, to_text(_norm(spec.ends))))
