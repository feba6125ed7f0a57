"""Finite relational structures and bounded Fraisse-class checks.

Structures have universe ``0..size-1`` and store each relation as a sorted
tuple of tuples, so equality is structural.  Embeddings are induced: a tuple
holds in the source exactly when its image holds in the target.

Class properties are checked with bounded quantifiers.  A class carries a
``source_bound`` ``s`` and a ``target_bound`` ``k``: spans and joint
embeddings start from members of size at most ``s`` and land in members of
size at most ``k``.  An amalgam may be larger than ``k``; it is accepted when
every induced substructure of size at most ``k`` that is not already inside
one of the two factors is isomorphic to a member.
"""

import itertools
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import IllFormedPair, NotAutomorphism, PreconditionError, ResourceError, ValidityError

MAX_ARITY = 4
EMBED_BUDGET = 2_000_000
AMALGAM_BUDGET = 500_000
FRAISSEFY_MAX_SIZE = 7


# ---------------------------------------------------------------- data

@dataclass(frozen=True)
class Signature:
    relations: tuple
    max_arity: int = MAX_ARITY

    def __post_init__(self):
        rels = tuple((str(n), int(a)) for n, a in self.relations)
        object.__setattr__(self, "relations", rels)
        names = [n for n, _ in rels]
        if len(set(names)) != len(names):
            raise ValidityError(f"duplicate relation names in {names}")
        for n, a in rels:
            if not 1 <= a <= self.max_arity:
                raise ValidityError(f"relation {n} has arity {a}, allowed 1..{self.max_arity}")

    @property
    def names(self):
        return tuple(n for n, _ in self.relations)

    def index(self, name):
        return self.names.index(name)


@dataclass(frozen=True)
class FiniteStructure:
    signature: Signature
    size: int
    relations: tuple

    @classmethod
    def build(cls, signature, size, relations=None):
        relations = relations or {}
        unknown = set(relations) - set(signature.names)
        if unknown:
            raise ValidityError(f"unknown relations {sorted(unknown)}")
        rels = []
        for name, arity in signature.relations:
            tuples = set()
            for t in relations.get(name, ()):
                t = tuple(int(x) for x in t)
                if len(t) != arity:
                    raise ValidityError(f"tuple {t} in {name} should have arity {arity}")
                if any(not 0 <= x < size for x in t):
                    raise ValidityError(f"tuple {t} in {name} leaves the universe 0..{size - 1}")
                tuples.add(t)
            rels.append(tuple(sorted(tuples)))
        return cls(signature, size, tuple(rels))

    def rel(self, name):
        return self.relations[self.signature.index(name)]

    @cached_property
    def sets(self):
        return tuple(frozenset(r) for r in self.relations)

    @cached_property
    def tuple_count(self):
        return sum(len(r) for r in self.relations)

    @cached_property
    def by_max(self):
        out = [[] for _ in range(self.size)]
        for ri, rel in enumerate(self.relations):
            for t in rel:
                out[max(t)].append((ri, t))
        return out

    @cached_property
    def by_elem(self):
        out = [[] for _ in range(self.size)]
        for ri, rel in enumerate(self.relations):
            for t in rel:
                for x in set(t):
                    out[x].append((ri, t))
        return out

    @cached_property
    def by_elemset(self):
        out = {}
        for ri, rel in enumerate(self.relations):
            for t in rel:
                out.setdefault(frozenset(t), []).append((ri, t))
        return out

    @cached_property
    def profiles(self):
        width = [a for _, a in self.signature.relations]
        out = []
        for x in range(self.size):
            counts = []
            for ri, rel in enumerate(self.relations):
                for pos in range(width[ri]):
                    counts.append(sum(1 for t in rel if t[pos] == x))
            out.append(tuple(counts))
        return out

    @cached_property
    def invariant(self):
        return (self.size, tuple(len(r) for r in self.relations), tuple(sorted(self.profiles)))

    def induced(self, subset):
        """Induced substructure on ``subset``, relabelled in increasing order."""
        elems = sorted(subset)
        pos = {x: i for i, x in enumerate(elems)}
        rels = []
        for rel in self.relations:
            rels.append(tuple(sorted(tuple(pos[x] for x in t) for t in rel if all(x in pos for x in t))))
        return FiniteStructure(self.signature, len(elems), tuple(rels))

    def relabel(self, perm):
        """The isomorphic copy in which element ``x`` is renamed ``perm[x]``."""
        rels = tuple(tuple(sorted(tuple(perm[x] for x in t) for t in rel)) for rel in self.relations)
        return FiniteStructure(self.signature, self.size, rels)

    def as_dict(self):
        return {
            "size": self.size,
            "relations": {n: [list(t) for t in r] for n, r in zip(self.signature.names, self.relations)},
        }

    def __str__(self):
        parts = [f"size {self.size}"]
        for name, rel in zip(self.signature.names, self.relations):
            if rel:
                parts.append(f"{name}: " + " ".join("(" + ",".join(map(str, t)) + ")" for t in rel))
        return "; ".join(parts)


@dataclass(frozen=True)
class Embedding:
    source: FiniteStructure
    target: FiniteStructure
    mapping: tuple

    def __call__(self, x):
        return self.mapping[x]

    def compose(self, other):
        """``other`` after ``self``."""
        return Embedding(self.source, other.target, tuple(other.mapping[y] for y in self.mapping))

    def __str__(self):
        return ", ".join(f"{x}->{y}" for x, y in enumerate(self.mapping)) or "empty map"


def _same_signature(A, B):
    if A.signature.relations != B.signature.relations:
        raise ValidityError("structures have different signatures")


# ---------------------------------------------------------------- embeddings

def iter_embeddings(A, B, budget=EMBED_BUDGET):
    """Induced embeddings ``A -> B`` as mapping tuples, in lexicographic order."""
    _same_signature(A, B)
    m, n = A.size, B.size
    if m > n:
        return
    pa, pb = A.profiles, B.profiles
    cand = [[b for b in range(n) if all(x <= y for x, y in zip(pa[a], pb[b]))] for a in range(m)]
    sets_a, sets_b = A.sets, B.sets
    by_max, by_elem = A.by_max, B.by_elem
    image = [None] * m
    pre = {}
    nodes = 0

    def consistent(a, b):
        for ri, t in by_max[a]:
            if tuple(image[x] for x in t) not in sets_b[ri]:
                return False
        for ri, t in by_elem[b]:
            if all(y in pre for y in t) and tuple(pre[y] for y in t) not in sets_a[ri]:
                return False
        return True

    def extend(a):
        nonlocal nodes
        if a == m:
            yield tuple(image)
            return
        for b in cand[a]:
            if b in pre:
                continue
            nodes += 1
            if nodes > budget:
                raise ResourceError(f"embedding search exceeded {budget} nodes")
            image[a] = b
            pre[b] = a
            if consistent(a, b):
                yield from extend(a + 1)
            del pre[b]
            image[a] = None

    yield from extend(0)


def enumerate_embeddings(A, B, budget=EMBED_BUDGET):
    """All induced embeddings of ``A`` into ``B``, ordered by the map."""
    return [Embedding(A, B, m) for m in iter_embeddings(A, B, budget)]


def first_embedding(A, B, budget=EMBED_BUDGET):
    for m in iter_embeddings(A, B, budget):
        return Embedding(A, B, m)
    return None


def is_isomorphic(A, B, budget=EMBED_BUDGET):
    """A witness isomorphism ``A -> B`` or ``None``."""
    _same_signature(A, B)
    if A.invariant != B.invariant:
        return None
    return first_embedding(A, B, budget)


def is_embedding(A, B, mapping):
    if len(set(mapping)) != len(mapping) or any(not 0 <= y < B.size for y in mapping):
        return False
    inv = {y: x for x, y in enumerate(mapping)}
    for ri, rel in enumerate(A.relations):
        if any(tuple(mapping[x] for x in t) not in B.sets[ri] for t in rel):
            return False
        for t in B.relations[ri]:
            if all(y in inv for y in t) and tuple(inv[y] for y in t) not in A.sets[ri]:
                return False
    return True


def is_partial_iso(K, mapping):
    """Is the dict ``mapping`` an isomorphism between induced substructures of ``K``?"""
    if len(set(mapping.values())) != len(mapping):
        return False
    dom, cod = set(mapping), set(mapping.values())
    for ri, rel in enumerate(K.relations):
        inside = [t for t in rel if all(x in dom for x in t)]
        if any(tuple(mapping[x] for x in t) not in K.sets[ri] for t in inside):
            return False
        if sum(1 for t in rel if all(x in cod for x in t)) != len(inside):
            return False
    return True


def automorphisms(K, budget=EMBED_BUDGET):
    return [m for m in iter_embeddings(K, K, budget)]


# ---------------------------------------------------------------- classes

@dataclass(frozen=True)
class StructureClass:
    signature: Signature
    members: tuple
    source_bound: int
    target_bound: int

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        for M in self.members:
            _same_signature(M, self.members[0])
        for i, j in itertools.combinations(range(len(self.members)), 2):
            if is_isomorphic(self.members[i], self.members[j]):
                raise ValidityError(f"members {i} and {j} are isomorphic")
        if not 0 <= self.source_bound <= self.target_bound:
            raise ValidityError("bounds must satisfy 0 <= source <= target")

    @cached_property
    def _index(self):
        out = {}
        for i, M in enumerate(self.members):
            out.setdefault(M.invariant, []).append(i)
        return out

    @cached_property
    def _memo(self):
        return {}

    def member_index(self, X):
        """Index of the member isomorphic to ``X``, or ``None``."""
        key = (X.size, X.relations)
        memo = self._memo
        if key not in memo:
            memo[key] = next((i for i in self._index.get(X.invariant, ())
                              if is_isomorphic(X, self.members[i])), None)
        return memo[key]

    def upto(self, bound):
        return [(i, M) for i, M in enumerate(self.members) if M.size <= bound]

    def bounds_text(self):
        return f"s={self.source_bound},k={self.target_bound}"


@dataclass(frozen=True)
class Holds:
    prop: str
    bounds: str
    detail: str = ""

    def __bool__(self):
        return True

    def __str__(self):
        extra = f"; {self.detail}" if self.detail else ""
        return f"Holds (bounds {self.bounds}){extra}"


@dataclass(frozen=True)
class Fails:
    prop: str
    bounds: str
    witness: object
    witnesses: tuple = ()

    def __bool__(self):
        return False

    def __str__(self):
        more = f" ({len(self.witnesses)} failing instances)" if len(self.witnesses) > 1 else ""
        return f"Fails (bounds {self.bounds}): {self.witness}{more}"


@dataclass(frozen=True)
class Span:
    """Two embeddings ``f: A -> B`` and ``g: A -> C`` of a common base."""

    A: FiniteStructure
    f: tuple
    B: FiniteStructure
    g: tuple
    C: FiniteStructure

    def __str__(self):
        return (f"A=[{self.A}] f={_map_text(self.f)} B=[{self.B}] "
                f"g={_map_text(self.g)} C=[{self.C}]")


def _map_text(m):
    return "{" + ", ".join(f"{x}->{y}" for x, y in enumerate(m)) + "}"


# ---------------------------------------------------------------- amalgamation

@dataclass(frozen=True)
class Amalgam:
    D: FiniteStructure
    into_b: tuple
    into_c: tuple


def _identifications(B, C, forced_c, c_free, b_free, r):
    """Overlap-consistent partial injections ``c_free -> b_free`` with ``r`` identifications."""
    gmap = dict(forced_c)
    inv = {b: c for c, b in gmap.items()}
    n = len(c_free)

    def consistent(c, b):
        for ri, t in C.by_elem[c]:
            if all(x in gmap for x in t):
                m = tuple(gmap[x] for x in t)
                if all(y is not None for y in m) and m not in B.sets[ri]:
                    return False
        for ri, t in B.by_elem[b]:
            if all(y in inv for y in t) and tuple(inv[y] for y in t) not in C.sets[ri]:
                return False
        return True

    def walk(i, left):
        if i == n:
            if left == 0:
                yield tuple(gmap.get(c) for c in c_free)
            return
        c = c_free[i]
        if left > 0:
            for b in b_free:
                if b in inv:
                    continue
                gmap[c], inv[b] = b, c
                if consistent(c, b):
                    yield from walk(i + 1, left - 1)
                del gmap[c], inv[b]
        if n - i - 1 >= left:
            gmap[c] = None
            yield from walk(i + 1, left)
            del gmap[c]

    # forced points must already agree with each other
    for c in forced_c:
        del gmap[c]
        del inv[forced_c[c]]
    for c, b in sorted(forced_c.items()):
        gmap[c], inv[b] = b, c
        if not consistent(c, b):
            return
    yield from walk(0, r)


def amalgamate(B, C, pairs, cls, budget=AMALGAM_BUDGET):
    """Find the smallest admissible ``D`` with ``B -> D <- C`` agreeing on ``pairs``.

    ``pairs`` lists ``(b, c)`` points that must be sent to the same place.
    ``B`` is embedded as the first ``|B|`` elements of ``D``.
    """
    _same_signature(B, C)
    forced_c = {c: b for b, c in pairs}
    c_free = [c for c in range(C.size) if c not in forced_c]
    b_free = [b for b in range(B.size) if b not in forced_c.values()]
    state = {"nodes": 0}
    for r in range(min(len(c_free), len(b_free)), -1, -1):
        for ident in _identifications(B, C, forced_c, c_free, b_free, r):
            found = _amalgam_with(B, C, forced_c, c_free, ident, cls, budget, state)
            if found is not None:
                return found
    return None


def _amalgam_with(B, C, forced_c, c_free, ident, cls, budget, state):
    gmap = dict(forced_c)
    nxt = B.size
    for c, target in zip(c_free, ident):
        if target is None:
            gmap[c] = nxt
            nxt += 1
        else:
            gmap[c] = target
    size = nxt
    into_c = tuple(gmap[c] for c in range(C.size))
    image_c = set(into_c)
    base = [set(B.sets[ri]) | {tuple(gmap[x] for x in t) for t in C.relations[ri]}
            for ri in range(len(B.relations))]
    new = set(range(B.size, size))
    b_only = set(range(B.size)) - image_c
    k = cls.target_bound
    if not new or not b_only:
        D = FiniteStructure(B.signature, size, tuple(tuple(sorted(r)) for r in base))
        return Amalgam(D, tuple(range(B.size)), into_c)

    cross = []
    for ri, (_, arity) in enumerate(B.signature.relations):
        for t in itertools.product(range(size), repeat=arity):
            s = set(t)
            if s & new and s & b_only and len(s) <= k:
                cross.append((ri, t))
    cross.sort(key=lambda rt: (tuple(sorted(set(rt[1]), reverse=True)), rt[0], rt[1]))
    last_for_set = {}
    for idx, (_, t) in enumerate(cross):
        last_for_set[frozenset(t)] = idx
    checks = {}
    rest = [x for x in range(size) if x not in new and x not in b_only]
    for s in _mixed_subsets(sorted(new), sorted(b_only), rest, min(k, size)):
        done = -1
        for q in range(2, len(s) + 1):
            for sub in itertools.combinations(s, q):
                done = max(done, last_for_set.get(frozenset(sub), -1))
        checks.setdefault(done, []).append(s)

    by_set = {}
    for ri, rel in enumerate(base):
        for t in rel:
            by_set.setdefault(frozenset(t), []).append((ri, t))

    def admissible(s):
        pos = {x: i for i, x in enumerate(s)}
        rels = [[] for _ in base]
        for q in range(1, len(s) + 1):
            for sub in itertools.combinations(s, q):
                for ri, t in by_set.get(frozenset(sub), ()):
                    rels[ri].append(tuple(pos[x] for x in t))
        X = FiniteStructure(B.signature, len(s), tuple(tuple(sorted(r)) for r in rels))
        return cls.member_index(X) is not None

    if not all(admissible(s) for s in checks.get(-1, ())):
        return None

    def search(idx):
        if idx == len(cross):
            return True
        ri, t = cross[idx]
        key = frozenset(t)
        for present in (False, True):
            state["nodes"] += 1
            if state["nodes"] > budget:
                raise ResourceError(f"amalgam search exceeded {budget} nodes")
            if present:
                base[ri].add(t)
                by_set.setdefault(key, []).append((ri, t))
            if all(admissible(s) for s in checks.get(idx, ())) and search(idx + 1):
                return True
            if present:
                base[ri].discard(t)
                by_set[key].remove((ri, t))
        return False

    if not search(0):
        return None
    D = FiniteStructure(B.signature, size, tuple(tuple(sorted(r)) for r in base))
    return Amalgam(D, tuple(range(B.size)), into_c)


# ---------------------------------------------------------------- class properties

PROPERTIES = ("HP", "JEP", "AP", "WAP", "LocalWAP")


def check_class_property(cls, prop):
    """Check one of HP, JEP, AP, WAP, LocalWAP at the class bounds."""
    checks = {"HP": _check_hp, "JEP": _check_jep, "AP": _check_ap,
              "WAP": _check_wap, "LocalWAP": _check_local_wap}
    if prop not in checks:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    return checks[prop](cls)


@dataclass(frozen=True)
class HPWitness:
    member: int
    subset: tuple

    def __str__(self):
        return f"member {self.member} restricted to {list(self.subset)} is not in the class"


def _check_hp(cls):
    bad = []
    for i, M in cls.upto(cls.target_bound):
        for r in range(1, M.size):
            for sub in itertools.combinations(range(M.size), r):
                if cls.member_index(M.induced(sub)) is None:
                    bad.append(HPWitness(i, sub))
    if bad:
        return Fails("HP", cls.bounds_text(), bad[0], tuple(bad))
    return Holds("HP", cls.bounds_text())


@dataclass(frozen=True)
class PairWitness:
    first: object
    second: object

    def __str__(self):
        return f"no joint embedding of [{self.first}] and [{self.second}]"


def _check_jep(cls):
    small = cls.upto(cls.source_bound)
    bad = []
    for (i, A), (j, B) in itertools.combinations_with_replacement(small, 2):
        if amalgamate(A, B, (), cls) is None:
            bad.append(PairWitness(A, B))
    if bad:
        return Fails("JEP", cls.bounds_text(), bad[0], tuple(bad))
    return Holds("JEP", cls.bounds_text())


def spans(cls, source_bound=None):
    """Every span with base of size at most ``s`` into members of size at most ``k``."""
    s = cls.source_bound if source_bound is None else source_bound
    targets = cls.upto(cls.target_bound)
    for _, A in cls.upto(s):
        arrows = [(M, m) for _, M in targets for m in iter_embeddings(A, M)]
        for (B, f), (C, g) in itertools.product(arrows, repeat=2):
            yield Span(A, f, B, g, C)


def amalgamate_span(span, cls):
    pairs = tuple((span.f[a], span.g[a]) for a in range(span.A.size))
    return amalgamate(span.B, span.C, pairs, cls)


def _mixed_subsets(new, b_only, rest, k):
    """Sorted subsets of size at most ``k`` meeting both ``new`` and ``b_only``."""
    for a in range(1, k):
        for part_n in itertools.combinations(new, a):
            for b in range(1, k - a + 1):
                for part_b in itertools.combinations(b_only, b):
                    for c in range(0, k - a - b + 1):
                        for part_r in itertools.combinations(rest, c):
                            yield tuple(sorted(part_n + part_b + part_r))


def _check_ap(cls):
    bad = []
    verdict = {}
    for sp in spans(cls):
        # amalgamability does not depend on the order of the two legs
        key = sp.A, frozenset({(sp.B, sp.f), (sp.C, sp.g)})
        if key not in verdict:
            verdict[key] = amalgamate_span(sp, cls) is not None
        if not verdict[key]:
            bad.append(sp)
    if bad:
        return Fails("AP", cls.bounds_text(), bad[0], tuple(bad))
    return Holds("AP", cls.bounds_text())


def _extensions(T, cls):
    return [(M, m) for _, M in cls.upto(cls.target_bound) for m in iter_embeddings(T, M)]


def _wap_partner(S, cls):
    """A ``(T, e)`` that makes the weak amalgamation condition hold for ``S``."""
    candidates = [(S, tuple(range(S.size)))]
    candidates += [(T, e) for _, T in cls.upto(cls.target_bound) for e in iter_embeddings(S, T)
                   if not (T == S and e == tuple(range(S.size)))]
    for T, e in candidates:
        exts = _extensions(T, cls)
        ok = True
        for (T0, f), (T1, g) in itertools.product(exts, repeat=2):
            pairs = tuple((f[e[x]], g[e[x]]) for x in range(S.size))
            if amalgamate(T0, T1, pairs, cls) is None:
                ok = False
                break
        if ok:
            return T, e
    return None


@dataclass(frozen=True)
class WapWitness:
    S: FiniteStructure

    def __str__(self):
        return f"no extension of [{self.S}] amalgamates all its spans"


def _check_wap(cls):
    bad = [WapWitness(S) for _, S in cls.upto(cls.source_bound) if _wap_partner(S, cls) is None]
    if bad:
        return Fails("WAP", cls.bounds_text(), bad[0], tuple(bad))
    return Holds("WAP", cls.bounds_text())


def _check_local_wap(cls):
    small = cls.upto(cls.source_bound)
    wap_ok = {i: _wap_partner(S, cls) is not None for i, S in small}
    for i, A in small:
        above = [j for j, B in small if first_embedding(A, B) is not None]
        if all(wap_ok[j] for j in above):
            return Holds("LocalWAP", cls.bounds_text(), f"base [{A}]")
    return Fails("LocalWAP", cls.bounds_text(), "no member works as a base")


# ---------------------------------------------------------------- pairs

@dataclass(frozen=True)
class PartialIsoPair:
    """A structure ``A`` with an isomorphism ``psi`` between two induced substructures."""

    A: FiniteStructure
    psi: tuple

    def __post_init__(self):
        items = list(self.psi.items()) if isinstance(self.psi, dict) else list(self.psi)
        if len({b for b, _ in items}) != len(items):
            raise IllFormedPair("psi is not a function")
        psi = tuple(sorted((int(b), int(c)) for b, c in items))
        object.__setattr__(self, "psi", psi)
        if any(not (0 <= b < self.A.size and 0 <= c < self.A.size) for b, c in psi):
            raise IllFormedPair("psi leaves the universe")
        if not is_partial_iso(self.A, dict(psi)):
            raise IllFormedPair(f"psi {dict(psi)} is not an isomorphism between induced substructures")

    @property
    def mapping(self):
        return dict(self.psi)

    @property
    def B(self):
        return tuple(b for b, _ in self.psi)

    @property
    def C(self):
        return tuple(sorted(c for _, c in self.psi))

    def __str__(self):
        return f"<{self.A}; psi {{{', '.join(f'{b}->{c}' for b, c in self.psi)}}}>"


def _pair_key(A, psi, perm):
    rels = tuple(tuple(sorted(tuple(perm[x] for x in t) for t in rel)) for rel in A.relations)
    return rels, tuple(sorted((perm[b], perm[c]) for b, c in psi))


def pair_canonical(S):
    return min(_pair_key(S.A, S.psi, p) for p in itertools.permutations(range(S.A.size)))


def _partial_isos(A):
    out = []
    for r in range(A.size + 1):
        for dom in itertools.combinations(range(A.size), r):
            for cod in itertools.permutations(range(A.size), r):
                m = dict(zip(dom, cod))
                if is_partial_iso(A, m):
                    out.append(tuple(sorted(m.items())))
    return out


def build_pair_class(cls, bound=None):
    """All pairs on members of size at most ``bound``, one per pair-isomorphism type."""
    bound = cls.target_bound if bound is None else bound
    seen = set()
    out = []
    for _, A in cls.upto(bound):
        for psi in _partial_isos(A):
            S = PartialIsoPair(A, psi)
            key = (A.size, pair_canonical(S))
            if key not in seen:
                seen.add(key)
                out.append(S)
    return out


def _pair_condition(S, T, f):
    m = T.mapping
    for b, c in S.psi:
        if f[b] not in m or m[f[b]] != f[c]:
            return False
    cod_t = set(m.values())
    return all(f[c] in cod_t for c in S.C)


def iter_pair_embeddings(S, T):
    for f in iter_embeddings(S.A, T.A):
        if _pair_condition(S, T, f):
            yield f


def pair_embeds(S, T):
    """An embedding of pair ``S`` into pair ``T``, or ``None``."""
    for f in iter_pair_embeddings(S, T):
        return Embedding(S.A, T.A, f)
    return None


def joint_pair_embedding(S, T, host):
    """Embeddings of ``S.A`` and ``T.A`` into ``host`` under which both maps glue."""
    for f in iter_embeddings(S.A, host):
        for g in iter_embeddings(T.A, host):
            glued = {}
            ok = True
            for b, c in S.psi:
                if glued.setdefault(f[b], f[c]) != f[c]:
                    ok = False
                    break
            if ok:
                for b, c in T.psi:
                    if glued.setdefault(g[b], g[c]) != g[c]:
                        ok = False
                        break
            if ok and is_partial_iso(host, glued):
                return f, g
    return None


PAIR_PROPERTIES = ("JEP_Fp", "WAP_Fp", "LocalWAP_Fp")


def check_pair_property(cls, prop):
    """Check JEP, WAP or local WAP for the class of pairs at the class bounds."""
    if prop == "JEP_Fp":
        return _check_jep_fp(cls)
    if prop in ("WAP_Fp", "LocalWAP_Fp"):
        return _check_wap_fp(cls, local=prop == "LocalWAP_Fp")
    raise ValueError(f"unknown pair property {prop!r}; expected one of {PAIR_PROPERTIES}")


def _check_jep_fp(cls):
    pairs = build_pair_class(cls, cls.source_bound)
    hosts = [M for _, M in cls.upto(cls.target_bound)]
    bad = []
    for S, T in itertools.combinations_with_replacement(pairs, 2):
        if not any(joint_pair_embedding(S, T, H) is not None for H in hosts):
            bad.append(PairWitness(S, T))
    if bad:
        return Fails("JEP_Fp", cls.bounds_text(), bad[0], tuple(bad))
    return Holds("JEP_Fp", cls.bounds_text())


def _check_wap_fp(cls, local):
    small = build_pair_class(cls, cls.source_bound)
    big = build_pair_class(cls, cls.target_bound)
    pair_embs = {}

    def embs(X, Y):
        key = (id(X), id(Y))
        if key not in pair_embs:
            pair_embs[key] = list(iter_pair_embeddings(X, Y))
        return pair_embs[key]

    def amalgamates(S, m0, T0, m1, T1):
        for U in big:
            for r in embs(T0, U):
                for s in embs(T1, U):
                    if all(r[m0[x]] == s[m1[x]] for x in range(S.A.size)):
                        return True
        return False

    def wap_ok(S):
        for T in big:
            for e in embs(S, T):
                exts = [(T0, f) for T0 in big for f in embs(T, T0)]
                if all(amalgamates(S, tuple(f[e[x]] for x in range(S.A.size)), T0,
                                   tuple(g[e[x]] for x in range(S.A.size)), T1)
                       for (T0, f), (T1, g) in itertools.product(exts, repeat=2)):
                    return True
        return False

    ok = {id(S): wap_ok(S) for S in small}
    name = "LocalWAP_Fp" if local else "WAP_Fp"
    if not local:
        bad = [S for S in small if not ok[id(S)]]
        if bad:
            return Fails(name, cls.bounds_text(), bad[0], tuple(bad))
        return Holds(name, cls.bounds_text())
    for A in small:
        if all(ok[id(B)] for B in small if pair_embeds(A, B) is not None):
            return Holds(name, cls.bounds_text(), f"base {A}")
    return Fails(name, cls.bounds_text(), "no pair works as a base")


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class LedgerEntry:
    step: int
    kind: str
    detail: str
    base: tuple = ()
    member: int = -1
    base_map: tuple = ()
    witness: int = -1

    def __str__(self):
        return f"step {self.step}: {self.kind} {self.detail}"


@dataclass(frozen=True)
class ChainResult:
    stages: tuple
    embeddings: tuple
    ledger: tuple

    @property
    def final(self):
        return self.stages[-1]


def fraisse_chain(cls, steps, extensions_per_step=3):
    """Build ``B_0 <= B_1 <= ... <= B_steps`` joining class members one by one.

    Stage ``t`` contains stage ``t-1`` as its first elements.  When the class
    has AP, each step also realizes up to ``extensions_per_step`` missing
    one-point extensions over small substructures.
    """
    for prop in ("HP", "JEP"):
        res = check_class_property(cls, prop)
        if not res:
            raise PreconditionError(f"{prop} fails: {res.witness}")
    if not cls.members:
        raise PreconditionError("empty class")
    has_ap = bool(check_class_property(cls, "AP")) if steps else False
    D = cls.members[0]
    stages, embs, ledger = [D], [], []
    base_size = min(cls.source_bound, cls.target_bound - 1)
    for t in range(1, steps + 1):
        idx = t % len(cls.members)
        M = cls.members[idx]
        am = amalgamate(D, M, (), cls)
        if am is None:
            raise PreconditionError(f"cannot jointly embed stage {t - 1} and member {idx}")
        D = am.D
        ledger.append(LedgerEntry(t, "join", f"member {idx} via {_map_text(am.into_c)}", member=idx,
                                  base_map=am.into_c))
        if has_ap:
            for _ in range(extensions_per_step):
                task = _missing_extension(D, cls, base_size)
                if task is None:
                    break
                X, j, e = task
                am = amalgamate(D, cls.members[j], tuple(zip(X, e)), cls)
                if am is None:
                    raise PreconditionError(f"extension over {X} by member {j} is not realizable")
                D = am.D
                extra = next(am.into_c[y] for y in range(cls.members[j].size) if y not in e)
                ledger.append(LedgerEntry(t, "extend", f"base {list(X)} by member {j} at {extra}",
                                          base=X, member=j, base_map=e, witness=extra))
        embs.append(Embedding(stages[-1], D, tuple(range(stages[-1].size))))
        stages.append(D)
    return ChainResult(tuple(stages), tuple(embs), tuple(ledger))


def extension_realized(D, X, Y, e, z):
    """Does ``X + [z]`` in ``D`` realize member ``Y`` extending the base map ``e``?"""
    if z in X:
        return False
    extra = [y for y in range(Y.size) if y not in e]
    if len(extra) != 1:
        return False
    mapping = [None] * Y.size
    for x, y in zip(X, e):
        mapping[y] = x
    mapping[extra[0]] = z
    sub = sorted(mapping)
    pos = {x: i for i, x in enumerate(sub)}
    return is_embedding(Y, D.induced(sub), tuple(pos[x] for x in mapping))


def _bases(size, base_size):
    # ordered by largest element so that older elements are served first
    for top in range(size):
        for r in range(1, base_size + 1):
            for rest in itertools.combinations(range(top), r - 1):
                yield rest + (top,)


def _missing_extension(D, cls, base_size):
    for X in _bases(D.size, base_size):
        A = D.induced(X)
        for j, Y in enumerate(cls.members):
            if Y.size != len(X) + 1:
                continue
            for e in iter_embeddings(A, Y):
                if not any(extension_realized(D, X, Y, e, z) for z in range(D.size)):
                    return X, j, e
    return None


# ---------------------------------------------------------------- fraissefication

def _compose(g, h):
    return tuple(g[x] for x in h)


def fraissefy(K, generators, max_size=FRAISSEFY_MAX_SIZE):
    """Enrich ``K`` by the orbit relations of the group generated by ``generators``.

    Returns ``(K_tilde, G)`` with ``G`` the sorted list of group elements.
    One relation ``orbit{n}_{i}`` of arity ``n`` is added for each orbit of
    injective ``n``-tuples, ``n <= |K|``.
    """
    n = K.size
    if n > max_size:
        raise ResourceError(f"structure of size {n} exceeds the bound {max_size}")
    gens = []
    for g in generators:
        g = tuple(int(x) for x in g)
        if sorted(g) != list(range(n)) or K.relabel(g) != K:
            raise NotAutomorphism(f"{list(g)} is not an automorphism", generator=list(g))
        gens.append(g)
    identity = tuple(range(n))
    group = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for h in gens:
            gh = _compose(h, g)
            if gh not in group:
                group.add(gh)
                queue.append(gh)
    G = sorted(group)
    new_rels, new_tuples = [], {}
    for arity in range(1, n + 1):
        assigned = set()
        count = 0
        for t in itertools.permutations(range(n), arity):
            if t in assigned:
                continue
            orbit = {tuple(g[x] for x in t) for g in G}
            assigned |= orbit
            name = f"orbit{arity}_{count}"
            count += 1
            new_rels.append((name, arity))
            new_tuples[name] = orbit
    sig = Signature(K.signature.relations + tuple(new_rels),
                    max(K.signature.max_arity, n))
    rels = {name: K.rel(name) for name in K.signature.names}
    rels.update(new_tuples)
    return FiniteStructure.build(sig, n, rels), G


@dataclass(frozen=True)
class UltrahomogeneityResult:
    holds: bool
    witness: tuple = ()

    def __bool__(self):
        return self.holds

    def __str__(self):
        if self.holds:
            return "True"
        return "False (witness " + ", ".join(f"{a}->{b}" for a, b in self.witness) + ")"


def check_ultrahomogeneous(K, max_size=FRAISSEFY_MAX_SIZE):
    """Does every isomorphism between induced substructures extend to an automorphism?"""
    if K.size > max_size:
        raise ResourceError(f"structure of size {K.size} exceeds the bound {max_size}")
    auts = automorphisms(K)
    elemsets = K.by_elemset
    for r in range(1, K.size + 1):
        for dom in itertools.combinations(range(K.size), r):
            restrictions = {tuple(a[x] for x in dom) for a in auts}
            for cod in itertools.permutations(range(K.size), r):
                if cod in restrictions:
                    continue
                if _local_iso(elemsets, dom, cod):
                    return UltrahomogeneityResult(False, tuple(zip(dom, cod)))
    return UltrahomogeneityResult(True)


def _local_iso(elemsets, dom, cod):
    m = dict(zip(dom, cod))
    for q in range(1, len(dom) + 1):
        for sub in itertools.combinations(dom, q):
            here = elemsets.get(frozenset(sub), ())
            there = elemsets.get(frozenset(m[x] for x in sub), ())
            if len(here) != len(there):
                return False
            if {(ri, tuple(m[x] for x in t)) for ri, t in here} != set(there):
                return False
    return True


# ---------------------------------------------------------------- files

def signature_from_json(items, max_arity=None):
    rels = tuple((d["name"], d["arity"]) for d in items)
    top = max([a for _, a in rels] + [MAX_ARITY]) if max_arity is None else max_arity
    return Signature(rels, top)


def signature_to_json(sig):
    return [{"name": n, "arity": a} for n, a in sig.relations]


def class_from_json(text):
    data = json.loads(text)
    sig = signature_from_json(data["signature"])
    members = [FiniteStructure.build(sig, d["size"], d.get("relations", {})) for d in data["structures"]]
    top = max((M.size for M in members), default=0)
    bounds = data.get("bounds", {})
    return StructureClass(sig, tuple(members), bounds.get("source", top), bounds.get("target", top))


def class_to_json(cls):
    data = {
        "signature": signature_to_json(cls.signature),
        "structures": [M.as_dict() for M in cls.members],
        "bounds": {"source": cls.source_bound, "target": cls.target_bound},
    }
    return json.dumps(data, indent=2)


def structure_from_json(text):
    data = json.loads(text)
    sig = signature_from_json(data["signature"])
    return FiniteStructure.build(sig, data["size"], data.get("relations", {}))


def structure_to_json(K):
    return json.dumps({"signature": signature_to_json(K.signature), **K.as_dict()}, indent=2)


def generators_from_json(text):
    return [tuple(g) for g in json.loads(text)["generators"]]


# ---------------------------------------------------------------- common classes

def linear_orders(max_size, bounds=None):
    sig = Signature((("lt", 2),))
    members = [FiniteStructure.build(sig, n, {"lt": [(i, j) for i in range(n) for j in range(i + 1, n)]})
               for n in range(1, max_size + 1)]
    s, k = bounds or (max_size, max_size)
    return StructureClass(sig, tuple(members), s, k)


def graphs(max_size, max_degree=None, bounds=None):
    """Simple graphs up to isomorphism, stored with symmetric edge tuples."""
    sig = Signature((("E", 2),))
    members = []
    for n in range(1, max_size + 1):
        pairs = list(itertools.combinations(range(n), 2))
        found = []
        for mask in range(1 << len(pairs)):
            edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
            if max_degree is not None and any(sum(v in e for e in edges) > max_degree for v in range(n)):
                continue
            G = FiniteStructure.build(sig, n, {"E": edges + [(b, a) for a, b in edges]})
            if not any(is_isomorphic(G, H) for H in found):
                found.append(G)
        found.sort(key=lambda G: (G.tuple_count, G.relations))
        members.extend(found)
    s, k = bounds or (max_size, max_size)
    return StructureClass(sig, tuple(members), s, k)


__all__ = [name for name in dir() if not name.startswith("_")]
