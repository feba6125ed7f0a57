"""The Mann-Rafi preorder on ends, its equivalence classes and maximal ends.

An end ``y`` precedes ``x`` when every neighbourhood of ``x`` contains a
homeomorphic copy of some neighbourhood of ``y``.  On this fragment every
end has a germ: a clopen neighbourhood all of whose smaller basic
neighbourhoods are homeomorphic to it.  The preorder is decided through end
types: the type of a limit end is its mark together with the set of types
met in every deleted neighbourhood, and a neighbourhood of ``y`` embeds
(clopen, mark-preserving) near ``x`` exactly when ``y`` has the type of
``x`` or a type occurring in the repeated child of ``x``.
"""

from dataclasses import dataclass
from functools import lru_cache

from .end_space import (
    CANTOR_MANY,
    Cantor,
    Finite,
    OmegaSeq,
    Pt,
    characteristic,
    list_ends,
    normalize,
    sort_key,
    to_text,
)


@dataclass(frozen=True)
class EndGerm:
    germ_expr: object
    mark: object
    path: str = ""

    def __str__(self):
        return to_text(self.germ_expr)


@lru_cache(maxsize=None)
def end_type(germ):
    """Hashable type of the end whose germ is ``germ``."""
    if isinstance(germ, Pt):
        return ("pt", germ.mark.value)
    if isinstance(germ, Cantor):
        return ("cantor", germ.mark.value)
    if isinstance(germ, OmegaSeq):
        near = types_in(germ.child)
        # a sequence of Cantor sets converging to a like-marked point is a Cantor set
        if near == frozenset({("cantor", germ.limit_mark.value)}):
            return ("cantor", germ.limit_mark.value)
        return ("limit", germ.limit_mark.value, near)
    raise TypeError(f"not a germ: {germ!r}")


@lru_cache(maxsize=None)
def types_in(expr):
    """Types of all ends of ``expr``; closed downward under the preorder."""
    if isinstance(expr, (Pt, Cantor)):
        return frozenset({end_type(expr)})
    if isinstance(expr, OmegaSeq):
        return types_in(expr.child) | {end_type(expr)}
    out = frozenset()
    for c in expr.children:
        out |= types_in(c)
    return out


def type_leq(t_y, t_x):
    return t_y == t_x or (t_x[0] == "limit" and t_y in t_x[2])


def germ_leq(y, x):
    """True when ``y`` precedes ``x`` in the Mann-Rafi order."""
    return type_leq(end_type(y.germ_expr), end_type(x.germ_expr))


def germs(spec):
    return [EndGerm(d.germ, d.mark, d.path) for d in list_ends(spec.ends)]


@dataclass(frozen=True)
class EndClass:
    representative: EndGerm
    cardinality: object
    members: tuple

    def __str__(self):
        return f"{to_text(normalize(self.representative.germ_expr).raw_normal_form)} [{self.cardinality}]"


@dataclass(frozen=True)
class EndClassReport:
    classes: tuple
    order: tuple
    maximal_classes: tuple

    def record(self):
        lines = []
        for i, c in enumerate(self.classes):
            flag = " maximal" if i in self.maximal_classes else ""
            lines.append(f"class {i}: {c}{flag}")
        if self.order:
            lines.append("order: " + ", ".join(f"{a}<{b}" for a, b in self.order))
        else:
            lines.append("order: none")
        return "\n".join(lines)


def _class_key(cls):
    germ = cls.representative.germ_expr
    return sort_key(normalize(germ).raw_normal_form)


def end_equivalence_classes(spec):
    """Group ends into types, with cardinalities and the strict order."""
    groups = {}
    for g, d in zip(germs(spec), list_ends(spec.ends)):
        t = end_type(g.germ_expr)
        rep, card, members = groups.get(t, (g, None, ()))
        card = d.multiplicity if card is None else card + d.multiplicity
        groups[t] = (rep, card, members + (g.path,))
    classes = [EndClass(rep, card, members) for rep, card, members in groups.values()]
    classes.sort(key=_class_key)
    types = [end_type(c.representative.germ_expr) for c in classes]
    order = []
    for i, ti in enumerate(types):
        for j, tj in enumerate(types):
            if i != j and type_leq(ti, tj) and not type_leq(tj, ti):
                order.append((i, j))
    below = {i for i, _ in order}
    maximal = tuple(i for i in range(len(classes)) if i not in below)
    return EndClassReport(tuple(classes), tuple(order), maximal)


@dataclass(frozen=True)
class MaximalEnds:
    count: object
    classes: tuple

    def __str__(self):
        return f"{self.count} ({'; '.join(str(c) for c in self.classes)})"


def maximal_ends(spec):
    """Total number of maximal ends and the maximal classes themselves."""
    report = end_equivalence_classes(spec)
    classes = tuple(report.classes[i] for i in report.maximal_classes)
    count = Finite(0)
    for c in classes:
        if c.cardinality.kind == "countable":
            raise RuntimeError(f"internal inconsistency: countably many maximal ends in class {c}")
        count = count + c.cardinality
    return MaximalEnds(count, classes)


def germ_rank(germ):
    """Cantor-Bendixson rank of a countable germ (``None`` if uncountable)."""
    char = characteristic(germ)
    return None if char is characteristic(Cantor()) else char[0]


__all__ = [
    "CANTOR_MANY",
    "EndClass",
    "EndClassReport",
    "EndGerm",
    "MaximalEnds",
    "end_equivalence_classes",
    "end_type",
    "germ_leq",
    "germ_rank",
    "germs",
    "maximal_ends",
    "type_leq",
    "types_in",
]
