import pytest
from hypothesis import given

from bigmcg.end_space import (
    INF,
    NONPLANAR,
    NOT_COUNTABLE,
    PLANAR,
    Cantor,
    FailsWithWitness,
    HoldsUpToDepth,
    OmegaSeq,
    Pt,
    SurfaceSpec,
    characteristic,
    clopen_decompositions,
    is_self_similar_bounded,
    list_ends,
    make_sum,
    marks_of,
    normalize,
    parse_ends,
    parse_surface,
    recognize_named,
    to_text,
    validate,
)
from bigmcg.errors import ParseError, ValidityError
from bigmcg.ordinals import Ordinal

from strategies import countable_planar, depth, expressions, surfaces


def E(text):
    return parse_ends(text)


def char_pair(expr):
    alpha, n = characteristic(expr)
    return alpha.to_int(), n


# ---------------------------------------------------------------- CB oracle

def derived(expr):
    """The Cantor-Bendixson derivative: delete the isolated points."""
    if isinstance(expr, Pt):
        return None
    if isinstance(expr, OmegaSeq):
        d = derived(expr.child)
        # the limit survives; it is isolated again once its copies vanish
        return Pt() if d is None else OmegaSeq(d)
    parts = [d for d in (derived(c) for c in expr.children) if d is not None]
    return make_sum(parts) if parts else None


def count_points(expr):
    if isinstance(expr, Pt):
        return 1
    return sum(count_points(c) for c in expr.children)


def cb_oracle(expr):
    rank = 0
    while (d := derived(expr)) is not None:
        expr, rank = d, rank + 1
    return rank, count_points(expr)


def strip_marks(expr):
    if isinstance(expr, Pt):
        return Pt()
    if isinstance(expr, OmegaSeq):
        return OmegaSeq(strip_marks(expr.child))
    return make_sum([strip_marks(c) for c in expr.children])


# ---------------------------------------------------------------- parsing

def test_parse_flute():
    spec = parse_surface("genus = 0; ends = omega(pt)")
    assert spec.genus == 0
    assert spec.ends == OmegaSeq(Pt(PLANAR), PLANAR)
    assert char_pair(spec.ends) == (1, 1)


def test_parse_loch_ness():
    spec = parse_surface("genus = inf; ends = pt*")
    assert spec.genus == INF
    assert spec.ends == Pt(NONPLANAR)


def test_nonplanar_end_with_finite_genus_rejected():
    with pytest.raises(ValidityError, match="finite genus"):
        parse_surface("genus = 0; ends = pt*")


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_surface("genus = 0;\nends = omega(pt")
    assert info.value.line == 2


def test_unknown_token_rejected():
    with pytest.raises(ParseError):
        parse_surface("genus = 0; ends = disk")


@given(expressions())
def test_text_round_trip(expr):
    assert parse_ends(to_text(expr)) == expr


@given(surfaces())
def test_parsed_specs_are_valid(spec):
    assert validate(parse_surface(spec.to_text())) == []


# ---------------------------------------------------------------- validation

def test_validate_loch_ness_clean():
    assert validate(SurfaceSpec(INF, Pt(NONPLANAR))) == []


def test_validate_genus_mismatch():
    (v,) = validate(SurfaceSpec(INF, Pt(PLANAR)))
    assert v.invariant == "genus-e-inf"


def test_validate_closure():
    problems = validate(SurfaceSpec(INF, OmegaSeq(Pt(NONPLANAR), PLANAR)))
    assert [p.invariant for p in problems] == ["closure"]
    assert problems[0].path == "ends"


# ---------------------------------------------------------------- characteristic

@pytest.mark.parametrize("text, expected", [
    ("pt", (0, 1)),
    ("omega(pt)", (1, 1)),
    ("omega(omega(pt))", (2, 1)),
    ("omega(pt)+omega(pt)", (1, 2)),
    ("pt+pt+pt", (0, 3)),
    ("omega(omega(pt)+pt)", (2, 1)),
])
def test_characteristic_examples(text, expected):
    assert char_pair(E(text)) == expected


def test_cantor_not_countable():
    assert characteristic(E("omega(pt)+cantor")) is NOT_COUNTABLE


@given(countable_planar(8))
def test_characteristic_matches_derivative_oracle(expr):
    assert char_pair(expr) == cb_oracle(expr)


@given(countable_planar())
def test_doubling_doubles_coefficient(expr):
    alpha, n = characteristic(expr)
    assert characteristic(make_sum([expr, expr])) == (alpha, 2 * n)


# ---------------------------------------------------------------- normal form

@given(expressions())
def test_normalize_idempotent(expr):
    nf = normalize(expr)
    assert normalize(nf.raw_normal_form) == nf


@given(expressions())
def test_normalize_keeps_characteristic_and_marks(expr):
    nf = normalize(expr).raw_normal_form
    assert characteristic(nf) == characteristic(expr)
    assert marks_of(nf) == marks_of(expr)


@given(countable_planar())
def test_normal_form_complete_on_unmarked_countable(expr):
    # w^a*n+1 has one normal form, so equal characteristics give equal forms
    alpha, n = characteristic(expr)
    canonical = E("+".join(["omega(" * alpha.to_int() + "pt" + ")" * alpha.to_int()] * n))
    assert normalize(expr) == normalize(canonical)


def test_normalize_record_is_stable():
    assert normalize(E("omega(pt)+pt+omega(pt)")).record() == (
        "normal_form: omega(pt)+omega(pt)\n"
        "countable_part: (1, 2) ~ w*2+1\n"
        "marking_profile: omega(pt)+omega(pt)\n"
        "cantor_parts: none"
    )


def test_sequence_of_cantor_sets_is_cantor():
    assert normalize(E("omega(cantor)")).raw_normal_form == Cantor(PLANAR)


# ---------------------------------------------------------------- ends

def test_list_ends_flute():
    kinds = [(d.kind, str(d.multiplicity)) for d in list_ends(E("omega(pt)"))]
    assert kinds == [("isolated", "countably many"), ("limit", "1")]


def test_list_ends_loch_ness():
    (d,) = list_ends(E("pt*"))
    assert (d.kind, d.mark) == ("isolated", NONPLANAR)


def test_list_ends_mixed():
    ends = list_ends(E("omega(pt)+pt*"))
    assert [(d.kind, d.mark) for d in ends] == [
        ("isolated", PLANAR), ("limit", PLANAR), ("isolated", NONPLANAR)]


# ---------------------------------------------------------------- decompositions

def test_two_points_split_once():
    assert clopen_decompositions(E("pt+pt"), 1) == [(Pt(), Pt())]


def test_flute_split_tail_is_flute():
    for depth_ in (1, 2, 3):
        for dec in clopen_decompositions(E("omega(pt)"), depth_):
            assert any(char_pair(p) == (1, 1) for p in dec)


def test_cantor_halves():
    assert clopen_decompositions(E("cantor"), 1) == [(Cantor(), Cantor())]


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        clopen_decompositions(E("pt"), 0)


def _brute_splits(children):
    # every set partition of the summands, compared up to reordering
    def partitions(items):
        if not items:
            yield []
            return
        for part in partitions(items[1:]):
            yield [[items[0]]] + part
            for i in range(len(part)):
                yield part[:i] + [[items[0]] + part[i]] + part[i + 1:]

    def key(block):
        return tuple(sorted(to_text(c) for c in block))

    return {tuple(sorted(key(b) for b in part)) for part in partitions(children) if len(part) >= 2}


@pytest.mark.parametrize("text", ["pt+pt+pt+pt", "pt+pt+omega(pt)+omega(pt)+cantor", "pt*+pt+pt*+pt"])
def test_sum_splits_match_set_partitions(text):
    expr = E(text)
    got = set()
    for dec in clopen_decompositions(expr, 1):
        pieces = [p.children if hasattr(p, "children") else (p,) for p in dec]
        got.add(tuple(sorted(tuple(sorted(to_text(c) for c in block)) for block in pieces)))
    assert got == _brute_splits(list(expr.children))


@given(countable_planar(5))
def test_pieces_recombine(expr):
    for dec in clopen_decompositions(expr, 2):
        assert characteristic(make_sum(dec)) == characteristic(expr)


def test_self_similarity_examples():
    assert is_self_similar_bounded(E("omega(pt)"), 2) == HoldsUpToDepth(2)
    assert isinstance(is_self_similar_bounded(E("omega(pt)+omega(pt)"), 1), FailsWithWitness)
    assert is_self_similar_bounded(E("pt"), 1) == HoldsUpToDepth(1)
    assert is_self_similar_bounded(E("cantor"), 2) == HoldsUpToDepth(2)


# ---------------------------------------------------------------- names

@pytest.mark.parametrize("text, name", [
    ("genus = inf; ends = pt*", "LochNess"),
    ("genus = inf; ends = pt*+pt*", "JacobsLadder"),
    ("genus = 0; ends = cantor", "CantorTree"),
    ("genus = 0; ends = omega(pt)", "Flute"),
    ("genus = 0; ends = omega(pt)+omega(pt)", None),
])
def test_recognize_named(text, name):
    assert recognize_named(parse_surface(text)) == name


def test_ordinal_arithmetic():
    w = Ordinal.omega()
    assert str(w * 2 + 1) == "w*2+1"
    assert Ordinal.from_int(5) < w < w * 2 < Ordinal.omega(Ordinal.from_int(2))
    assert 1 + w == w
    assert (w + 1) + w == w * 2


@given(countable_planar(5))
def test_expression_depth_bounds_rank(expr):
    assert characteristic(expr)[0].to_int() < depth(expr)
