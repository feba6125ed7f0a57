import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigmcg.errors import IllFormedPair, NotAutomorphism, PreconditionError, ValidityError
from bigmcg.fraisse import (
    FiniteStructure,
    PartialIsoPair,
    Signature,
    StructureClass,
    automorphisms,
    build_pair_class,
    check_class_property,
    check_pair_property,
    check_ultrahomogeneous,
    class_from_json,
    class_to_json,
    enumerate_embeddings,
    extension_realized,
    fraisse_chain,
    fraissefy,
    graphs,
    is_embedding,
    is_isomorphic,
    linear_orders,
    pair_canonical,
    pair_embeds,
    structure_from_json,
    structure_to_json,
)

from helpers import (
    brute_automorphisms,
    brute_embeddings,
    brute_is_embedding,
    brute_isomorphic,
    chain,
    cycle,
    graph,
    load_class,
    path,
)

REL = Signature((("R", 2),))
UNARY = Signature((("P", 1),))
ORDER_SIG = Signature((("lt", 2),))


@st.composite
def structures(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    pairs = list(itertools.product(range(n), repeat=2))
    tuples = draw(st.lists(st.sampled_from(pairs), max_size=8))
    return FiniteStructure.build(REL, n, {"R": tuples})


@st.composite
def relabelled(draw):
    A = draw(structures())
    perm = draw(st.permutations(range(A.size)))
    return A, A.relabel(perm)


# ---------------------------------------------------------------- embeddings

def test_vertex_into_edge():
    assert [e.mapping for e in enumerate_embeddings(graph(1, []), graph(2, [(0, 1)]))] == [(0,), (1,)]


def test_edge_into_triangle():
    embs = enumerate_embeddings(graph(2, [(0, 1)]), cycle(3))
    assert len(embs) == 6
    assert [e.mapping for e in embs] == sorted(e.mapping for e in embs)


def test_edge_into_non_edge():
    assert enumerate_embeddings(graph(2, [(0, 1)]), graph(2, [])) == []


def test_isomorphism_examples():
    assert is_isomorphic(path(3), graph(3, [(2, 0), (0, 1)])) is not None
    assert is_isomorphic(path(3), cycle(3)) is None


def test_posets_differing_by_one_pair():
    # 0<1<2 with 3 above 0, against 0<1<2 with 3 below 2
    P = FiniteStructure.build(ORDER_SIG, 4, {"lt": [(0, 1), (1, 2), (0, 2), (0, 3)]})
    Q = FiniteStructure.build(ORDER_SIG, 4, {"lt": [(0, 1), (1, 2), (0, 2), (3, 2)]})
    assert is_isomorphic(P, Q) is None
    assert not brute_isomorphic(P, Q)


@given(structures(4), structures(5))
def test_embeddings_match_brute_force(A, B):
    assert [e.mapping for e in enumerate_embeddings(A, B)] == brute_embeddings(A, B)


@given(structures(3), structures(4), structures(5))
def test_composition_is_embedding(A, B, C):
    for f in enumerate_embeddings(A, B)[:3]:
        for g in enumerate_embeddings(B, C)[:3]:
            h = f.compose(g)
            assert brute_is_embedding(A, C, h.mapping)


@given(relabelled())
def test_isomorphism_is_an_equivalence(pair):
    A, B = pair
    f = is_isomorphic(A, B)
    assert f is not None and brute_is_embedding(A, B, f.mapping)
    g = is_isomorphic(B, A)
    assert g is not None
    assert brute_is_embedding(A, A, f.compose(g).mapping)
    assert is_isomorphic(A, A) is not None


@given(structures(4), structures(4))
def test_isomorphism_matches_brute_force(A, B):
    assert (is_isomorphic(A, B) is not None) == brute_isomorphic(A, B)


def test_class_rejects_isomorphic_members():
    with pytest.raises(ValidityError):
        StructureClass(REL, (path(2), graph(2, [(1, 0)])), 1, 2)


# ---------------------------------------------------------------- class properties

def test_orders_hp_jep_ap():
    cls = linear_orders(4, (2, 4))
    for prop in ("HP", "JEP", "AP", "WAP", "LocalWAP"):
        assert check_class_property(cls, prop), prop


def test_all_graphs_jep():
    assert str(check_class_property(graphs(4, bounds=(2, 4)), "JEP")) == "Holds (bounds s=2,k=4)"


def test_hp_failure_witness():
    cls = StructureClass(path(3).signature, (path(3),), 2, 3)
    res = check_class_property(cls, "HP")
    assert not res
    assert res.witness.member == 0


def test_jep_failure():
    # no structure of size 2 holds both a marked and an unmarked point
    a = FiniteStructure.build(UNARY, 1, {"P": [(0,)]})
    b = FiniteStructure.build(UNARY, 1, {})
    aa = FiniteStructure.build(UNARY, 2, {"P": [(0,), (1,)]})
    res = check_class_property(StructureClass(UNARY, (a, b, aa), 1, 2), "JEP")
    assert not res
    assert {res.witness.first, res.witness.second} == {a, b}


@pytest.mark.parametrize("cls", [
    linear_orders(3, (2, 3)),
    graphs(3, bounds=(2, 3)),
    graphs(3, max_degree=1, bounds=(2, 3)),
    graphs(4, max_degree=2, bounds=(2, 4)),
], ids=["orders", "graphs", "matchings", "degree-2"])
def test_ap_implies_wap(cls):
    if check_class_property(cls, "AP"):
        assert check_class_property(cls, "WAP")
    if check_class_property(cls, "WAP"):
        assert check_class_property(cls, "LocalWAP")


def test_class_file_round_trip():
    cls = graphs(3, bounds=(2, 3))
    text = class_to_json(cls)
    again = class_from_json(text)
    assert again == cls
    assert class_to_json(again) == text


def test_structure_file_round_trip():
    K = cycle(5)
    assert structure_from_json(structure_to_json(K)) == K


# ---------------------------------------------------------------- pairs

def test_pairs_of_a_point():
    pairs = build_pair_class(linear_orders(1, (1, 1)))
    assert [p.psi for p in pairs] == [(), ((0, 0),)]


def test_order_pairs_include_shift():
    pairs = build_pair_class(linear_orders(3, (3, 3)))
    shift = PartialIsoPair(chain(3), {0: 1, 1: 2})
    assert any(p.A.size == 3 and pair_canonical(p) == pair_canonical(shift) for p in pairs)


def _brute_pair_types(cls):
    types = set()
    for M in cls.members:
        autos = brute_automorphisms(M)
        for r in range(M.size + 1):
            for dom in itertools.combinations(range(M.size), r):
                for cod in itertools.permutations(range(M.size), r):
                    sub_d, sub_c = M.induced(dom), M.induced(cod)
                    # order-preserving relabelling of cod to compare induced structures
                    pos = {x: i for i, x in enumerate(sorted(cod))}
                    m = tuple(pos[c] for c in cod)
                    if not brute_is_embedding(sub_d, sub_c, m):
                        continue
                    orbit = frozenset(
                        tuple(sorted((p[b], p[c]) for b, c in zip(dom, cod))) for p in autos)
                    types.add((M.size, M.relations, orbit))
    return types


def test_graph_pair_count_matches_brute_force():
    cls = graphs(2, bounds=(2, 2))
    assert len(build_pair_class(cls)) == len(_brute_pair_types(cls)) == 12


def test_order_pair_count_matches_brute_force():
    cls = linear_orders(3, (3, 3))
    assert len(build_pair_class(cls)) == len(_brute_pair_types(cls))


def test_chain_pair_embedding():
    S = PartialIsoPair(chain(3), {0: 1, 1: 2})
    T = PartialIsoPair(chain(5), {0: 1, 1: 2, 2: 3})
    f = pair_embeds(S, T)
    assert f is not None and f.mapping == (0, 1, 2)
    # the condition of the definition, checked by hand
    for b, c in S.psi:
        assert T.mapping[f(b)] == f(c)


def test_pair_embeds_into_itself():
    S = PartialIsoPair(cycle(4), {0: 1, 1: 2})
    assert pair_embeds(S, S).mapping == (0, 1, 2, 3)


def test_fixed_point_cannot_land_on_fixed_point_free():
    S = PartialIsoPair(graph(2, []), {0: 0})
    T = PartialIsoPair(graph(2, []), {0: 1, 1: 0})
    assert pair_embeds(S, T) is None


def test_ill_formed_pair():
    A = FiniteStructure.build(UNARY, 2, {"P": [(0,)]})
    PartialIsoPair(A, {0: 0})
    with pytest.raises(IllFormedPair):
        PartialIsoPair(A, {0: 1})


def test_jep_fp_orders():
    assert check_pair_property(linear_orders(4, (2, 4)), "JEP_Fp")


def test_wap_fp_orders():
    cls = linear_orders(3, (1, 3))
    assert check_pair_property(cls, "WAP_Fp")
    assert check_pair_property(cls, "LocalWAP_Fp")


def test_jep_fp_fails_for_two_class_equivalences():
    cls = load_class("equivalence_two_classes.cls")
    for prop in ("HP", "JEP", "AP"):
        assert check_class_property(cls, prop), prop
    res = check_pair_property(cls, "JEP_Fp")
    assert not res
    S, T = res.witness.first, res.witness.second
    # S fixes a point, T swaps two inequivalent points into each other's class
    assert S.psi == ((0, 0),)
    assert T.psi == ((0, 1),) and (0, 1) not in T.A.rel("E")


# ---------------------------------------------------------------- chains

def test_chain_zero_steps():
    cls = linear_orders(4, (2, 4))
    result = fraisse_chain(cls, 0)
    assert result.stages == (cls.members[0],)


def test_chain_needs_hp():
    cls = StructureClass(path(3).signature, (path(3),), 2, 3)
    with pytest.raises(PreconditionError):
        fraisse_chain(cls, 2)


def test_chain_monotone_and_ledger_realized():
    cls = graphs(3, bounds=(2, 3))
    result = fraisse_chain(cls, 10)
    for t, e in enumerate(result.embeddings):
        assert e.source == result.stages[t]
        assert is_embedding(result.stages[t], result.stages[t + 1], e.mapping)
        assert result.stages[t + 1].induced(range(result.stages[t].size)) == result.stages[t]
    final = result.final
    for M in cls.members:
        assert enumerate_embeddings(M, final)
    for entry in result.ledger:
        if entry.kind == "extend":
            M = cls.members[entry.member]
            assert extension_realized(final, entry.base, M, entry.base_map, entry.witness)


def test_chain_realizes_every_small_extension():
    cls = graphs(3, bounds=(2, 3))
    result = fraisse_chain(cls, 10)
    final = result.final
    # newest elements still wait for their extensions; older ones must be served
    old = result.stages[2].size
    for r in (1, 2):
        for X in itertools.combinations(range(old), r):
            A = final.induced(X)
            for Y in cls.members:
                if Y.size != r + 1:
                    continue
                for e in enumerate_embeddings(A, Y):
                    assert any(extension_realized(final, X, Y, e.mapping, z) for z in range(final.size))


# ---------------------------------------------------------------- fraissefication

def test_fraissefy_five_cycle():
    Kt, G = fraissefy(cycle(5), [(1, 2, 3, 4, 0)])
    assert len(G) == 5
    assert brute_automorphisms(Kt) == G
    assert check_ultrahomogeneous(Kt)


def test_fraissefy_trivial_group():
    K = path(3)
    Kt, G = fraissefy(K, [])
    assert G == [(0, 1, 2)]
    assert brute_automorphisms(Kt) == [(0, 1, 2)]


def test_fraissefy_path_flip():
    Kt, G = fraissefy(path(3), [(2, 1, 0)])
    assert brute_automorphisms(Kt) == G == [(0, 1, 2), (2, 1, 0)]


def test_not_automorphism():
    with pytest.raises(NotAutomorphism) as info:
        fraissefy(path(3), [(1, 0, 2)])
    assert info.value.generator == [1, 0, 2]


def test_ultrahomogeneity_examples():
    assert check_ultrahomogeneous(cycle(3))
    res = check_ultrahomogeneous(path(3))
    assert not res
    assert res.witness == ((0, 1),)


@given(structures(4))
def test_fraissefied_full_group_is_ultrahomogeneous(K):
    Kt, G = fraissefy(K, automorphisms(K))
    assert brute_automorphisms(Kt) == G == brute_automorphisms(K)
    assert check_ultrahomogeneous(Kt)


@given(structures(4), st.data())
def test_fraissefied_subgroup(K, data):
    auts = automorphisms(K)
    gens = data.draw(st.lists(st.sampled_from(auts), max_size=2))
    Kt, G = fraissefy(K, gens)
    assert brute_automorphisms(Kt) == G
    assert check_ultrahomogeneous(Kt)
