"""Shared fixtures: brute-force embedding checks and the class corpus."""

import itertools
from pathlib import Path

from bigmcg.fraisse import FiniteStructure, Signature, class_from_json

DATA = Path(__file__).resolve().parent.parent / "data"
GRAPH = Signature((("E", 2),))
ORDER = Signature((("lt", 2),))


def load_class(name):
    return class_from_json((DATA / name).read_text())


def graph(n, edges):
    return FiniteStructure.build(GRAPH, n, {"E": list(edges) + [(b, a) for a, b in edges]})


def chain(n):
    return FiniteStructure.build(ORDER, n, {"lt": [(i, j) for i in range(n) for j in range(i + 1, n)]})


def cycle(n):
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def brute_is_embedding(A, B, m):
    """Straight from the definition: a tuple holds in A iff its image holds in B."""
    if len(set(m)) != len(m):
        return False
    for name, arity in A.signature.relations:
        ra, rb = set(A.rel(name)), set(B.rel(name))
        for t in itertools.product(range(A.size), repeat=arity):
            if (t in ra) != (tuple(m[x] for x in t) in rb):
                return False
    return True


def brute_embeddings(A, B):
    return [m for m in itertools.permutations(range(B.size), A.size) if brute_is_embedding(A, B, m)]


def brute_isomorphic(A, B):
    return A.size == B.size and bool(brute_embeddings(A, B))


def brute_automorphisms(K):
    return sorted(p for p in itertools.permutations(range(K.size)) if brute_is_embedding(K, K, p))


# lines printed by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LOG = []
