"""Integral multicurves on the n-punctured disk and the braid group action.

Multicurves are stored by Dynnikov coordinates ``(a_1..a_{n-2}, b_1..b_{n-2})``.
Punctures ``1..n`` sit on a horizontal line.  For ``2 <= m <= n-1`` let
``up(m)`` and ``down(m)`` count minimal crossings with the vertical rays from
puncture ``m`` to the boundary, and let ``beta(k)`` count crossings with the
vertical chord between punctures ``k`` and ``k+1``.  Then

    a_i = (down(i+1) - up(i+1)) / 2,    b_i = (beta(i) - beta(i+1)) / 2.

Every integer vector is the coordinate vector of exactly one integral
lamination; the zero vector is the empty multicurve.

Braid words act on the right: ``act_word(L, u + v)`` is
``act_word(act_word(L, u), v)``.

The module also contains an independent oracle.  It represents each curve
as a cyclic word in the free group of the punctured disk, acts by the
Artin automorphisms, and reads crossing numbers off letter counts in bases
dual to systems of rays.
"""

import re
from dataclasses import dataclass

from .errors import ResourceError, ValidityError


def _pos(x):
    return x if x > 0 else 0


def _neg(x):
    return x if x < 0 else 0


@dataclass(frozen=True)
class MultiCurveCoords:
    n: int
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if self.n < 3:
            raise ValidityError("the disk needs at least 3 punctures")
        if len(self.a) != self.n - 2 or len(self.b) != self.n - 2:
            raise ValidityError(f"expected {self.n - 2} a- and b-coordinates for n={self.n}")

    @classmethod
    def zero(cls, n):
        return cls(n, (0,) * (n - 2), (0,) * (n - 2))

    @classmethod
    def from_vector(cls, n, vec):
        vec = list(vec)
        return cls(n, vec[: n - 2], vec[n - 2:])

    @property
    def vector(self):
        return self.a + self.b

    def is_empty(self):
        return not any(self.vector)

    def __add__(self, other):
        # only meaningful for disjoint multicurves
        if self.n != other.n:
            raise ValueError("different numbers of punctures")
        return MultiCurveCoords(self.n, [x + y for x, y in zip(self.a, other.a)],
                                [x + y for x, y in zip(self.b, other.b)])

    def __str__(self):
        return f"n={self.n}; a=[{', '.join(map(str, self.a))}]; b=[{', '.join(map(str, self.b))}]"


_COORDS = re.compile(r"^\s*n\s*=\s*(\d+)\s*;\s*a\s*=\s*\[([^\]]*)\]\s*;\s*b\s*=\s*\[([^\]]*)\]\s*$")


def parse_coords(text):
    m = _COORDS.match(text)
    if not m:
        raise ValidityError(f"cannot parse coordinates {text!r}; expected 'n=4; a=[..]; b=[..]'")

    def ints(s):
        return [int(x) for x in s.split(",") if x.strip()]

    return MultiCurveCoords(int(m.group(1)), ints(m.group(2)), ints(m.group(3)))


# ---------------------------------------------------------------- braid words

@dataclass(frozen=True)
class Gen:
    index: int
    sign: int = 1

    def inverse(self):
        return Gen(self.index, -self.sign)

    def __str__(self):
        return f"s{self.index}" + ("^-1" if self.sign < 0 else "")


_GEN = re.compile(r"^s(\d+)(\^-1)?$")


def parse_word(text):
    out = []
    for tok in text.split():
        m = _GEN.match(tok)
        if not m or int(m.group(1)) < 1:
            raise ValidityError(f"bad braid generator {tok!r}; expected s<i> or s<i>^-1")
        out.append(Gen(int(m.group(1)), -1 if m.group(2) else 1))
    return tuple(out)


def format_word(word):
    return " ".join(str(g) for g in word)


def inverse_word(word):
    return tuple(g.inverse() for g in reversed(word))


def free_reduce_word(word):
    out = []
    for g in word:
        if out and out[-1].index == g.index and out[-1].sign == -g.sign:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


# ---------------------------------------------------------------- action

def beta_counts(L):
    """Crossings ``beta(1..n-1)`` with the vertical chords between punctures."""
    partial = [0]
    for x in L.b:
        partial.append(partial[-1] + x)
    top = max((abs(L.a[k]) + _pos(L.b[k]) + partial[k] for k in range(L.n - 2)), default=0)
    top = max(top, 0)
    return [2 * top - 2 * partial[i] for i in range(L.n - 1)]


def _pair_step(p, q, sign):
    (x1, y1), (x2, y2) = p, q
    if sign > 0:
        z = x1 - _neg(y1) - x2 + _pos(y2)
        return ((x1 + _pos(y1) + _pos(_pos(y2) - z), y2 - _pos(z)),
                (x2 + _neg(y2) + _neg(_neg(y1) + z), y1 + _pos(z)))
    z = x1 + _neg(y1) - x2 - _pos(y2)
    return ((x1 - _pos(y1) - _pos(_pos(y2) + z), y2 + _neg(z)),
            (x2 - _neg(y2) - _neg(_neg(y1) - z), y1 - _neg(z)))


def act_generator(L, g):
    """Image of the multicurve under one half twist ``s_i`` or its inverse."""
    n = L.n
    if not 1 <= g.index <= n - 1:
        raise ValidityError(f"generator {g} out of range for n={n}")
    beta = beta_counts(L)
    # pad with the (a, b) pairs of the two outermost punctures
    pairs = [(0, -beta[0] // 2)] + list(zip(L.a, L.b)) + [(0, beta[-1] // 2)]
    i = g.index - 1
    pairs[i], pairs[i + 1] = _pair_step(pairs[i], pairs[i + 1], g.sign)
    if pairs[0][0] or pairs[-1][0]:
        raise AssertionError(f"outer pair gained an a-coordinate acting by {g} on {L}")
    inner = pairs[1:-1]
    return MultiCurveCoords(n, [p[0] for p in inner], [p[1] for p in inner])


def act_word(L, word):
    """Apply the generators of ``word`` left to right."""
    for g in word:
        L = act_generator(L, g)
    return L


# ---------------------------------------------------------------- round curves

@dataclass(frozen=True)
class RoundCurve:
    i: int
    j: int

    def check(self, n):
        if not 1 <= self.i < self.j <= n:
            raise ValidityError(f"round curve [{self.i},{self.j}] needs 1 <= i < j <= {n}")

    def __str__(self):
        return f"[{self.i},{self.j}]"


def parse_round(text):
    try:
        i, j = (int(x) for x in text.replace("[", "").replace("]", "").split(","))
    except ValueError:
        raise ValidityError(f"cannot parse round curve {text!r}; expected i,j") from None
    return RoundCurve(i, j)


def round_coords(n, c):
    """Coordinates of the round curve enclosing punctures ``c.i..c.j``."""
    c.check(n)
    b = [0] * (n - 2)
    if c.i >= 2:
        b[c.i - 2] = -1
    if c.j <= n - 1:
        b[c.j - 2] = 1
    return MultiCurveCoords(n, [0] * (n - 2), b)


def half_twist_word(i, j):
    """Positive half twist on strands ``i..j``."""
    word = []
    for top in range(j - 1, i - 1, -1):
        word.extend(Gen(k) for k in range(i, top + 1))
    return tuple(word)


def round_twist_word(c, power=1):
    """The Dehn twist about ``c`` (to the given power) as a braid word."""
    if c.j <= c.i:
        raise ValidityError(f"round curve {c} encloses fewer than two punctures")
    full = half_twist_word(c.i, c.j) * 2
    if power >= 0:
        return full * power
    return inverse_word(full) * (-power)


def shift_to_left_word(c):
    """A braid word taking the round curve ``c`` to ``[1, j-i+1]``."""
    m = c.j - c.i + 1
    word = []
    for p in range(c.i - 1, 0, -1):
        word.extend(Gen(k) for k in range(p, p + m))
    return tuple(word)


def ray_counts(L):
    """Crossings ``(up, down)`` with the vertical rays from punctures ``2..n-1``."""
    beta = beta_counts(L)
    up, down = [], []
    for i in range(L.n - 2):
        top = max(beta[i], beta[i + 1])
        up.append(top // 2 - L.a[i])
        down.append(top // 2 + L.a[i])
    return up, down


def _outer_arcs(L, m):
    """Arcs left of the gap after puncture ``m`` that enclose punctures ``1..m``.

    Such arcs are parallel to the boundary, so they are the outermost strands
    on the vertical chord; each cell either keeps them (through strands above
    and below its puncture) or cuts them off.
    """
    beta = beta_counts(L)
    up, down = ray_counts(L)
    e = beta[0] // 2
    for k in range(1, m):
        loops = abs(beta[k] - beta[k - 1]) // 2
        e = min(e, up[k - 1] - loops, down[k - 1] - loops)
    return e


def intersection_with_round(L, c):
    """Geometric intersection number of the multicurve with a round curve."""
    c.check(L.n)
    m = c.j - c.i + 1
    if m >= L.n:
        return 0
    moved = act_word(L, shift_to_left_word(c))
    return beta_counts(moved)[m - 1] - 2 * _outer_arcs(moved, m)


def round_image(L):
    """The round curve whose coordinates are ``L``, or ``None``."""
    for i in range(1, L.n):
        for j in range(i + 1, L.n + 1):
            if (i, j) != (1, L.n) and round_coords(L.n, RoundCurve(i, j)) == L:
                return RoundCurve(i, j)
    return None


# ---------------------------------------------------------------- oracle

ORACLE_MAX_N = 6
ORACLE_MAX_LETTERS = 200_000


def _reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def cyclic_reduce(word):
    w = _reduce(word)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i, j = i + 1, j - 1
    return tuple(w[i:j + 1])


def _substitute(word, images):
    out = []
    for x in word:
        img = images[abs(x)]
        out.extend(img if x > 0 else [-y for y in reversed(img)])
        if len(out) > ORACLE_MAX_LETTERS:
            raise ResourceError("oracle word grew past its budget")
    return _reduce(out)


def _artin(n, g):
    images = {k: [k] for k in range(1, n + 1)}
    i = g.index
    if g.sign > 0:
        images[i] = [i, i + 1, -i]
        images[i + 1] = [i]
    else:
        images[i] = [i + 1]
        images[i + 1] = [-(i + 1), i, i + 1]
    return images


@dataclass(frozen=True)
class FreeCurve:
    """A multicurve as cyclic words in loops ``x_1..x_n`` around the punctures."""

    n: int
    components: tuple

    def __str__(self):
        return f"n={self.n}; " + " | ".join(" ".join(map(str, w)) for w in self.components)


def oracle_round(n, c):
    c.check(n)
    return FreeCurve(n, (tuple(range(c.i, c.j + 1)),))


def oracle_multicurve(n, curves):
    comps = []
    for c in curves:
        comps.extend(oracle_round(n, c).components)
    return FreeCurve(n, tuple(comps))


def oracle_act(curve, word):
    """Push each component through the Artin automorphisms and reduce."""
    if curve.n > ORACLE_MAX_N:
        raise ResourceError(f"oracle limited to n <= {ORACLE_MAX_N}")
    comps = [list(w) for w in curve.components]
    for g in word:
        images = _artin(curve.n, g)
        comps = [_substitute(w, images) for w in comps]
    return FreeCurve(curve.n, tuple(cyclic_reduce(w) for w in comps))


def _to_mixed_basis(word, k):
    """Rewrite an x-word in the basis dual to rays down from ``1..k`` and up from ``k+1..n``."""
    out = []
    for x in word:
        j = abs(x)
        if j <= k:
            img = [j]
        else:
            prefix = list(range(j - 1, k, -1))
            img = [-y for y in reversed(prefix)] + [j] + prefix
        out.extend(img if x > 0 else [-y for y in reversed(img)])
    return cyclic_reduce(out)


def _straddles(word, k):
    if len(word) < 2:
        return 0
    return sum(1 for p, q in zip(word, word[1:] + word[:1]) if (abs(p) <= k) != (abs(q) <= k))


def _is_boundary(word, n):
    # conjugates of x_1...x_n are parallel to the boundary, which counts as empty
    if len(word) != n:
        return False
    loop = tuple(range(1, n + 1))
    for w in (tuple(word), tuple(-x for x in reversed(word))):
        if any(w[r:] + w[:r] == loop for r in range(n)):
            return True
    return False


def oracle_crossings(curve):
    """Crossing counts ``(up, down, beta)`` read off letter counts in dual bases."""
    n = curve.n
    up, down, beta = [0] * (n + 1), [0] * (n + 1), [0] * n
    for w in curve.components:
        w = cyclic_reduce(w)
        if len(w) <= 1 or _is_boundary(w, n):
            continue
        for x in w:
            down[abs(x)] += 1
        for x in _to_mixed_basis(w, 0):
            up[abs(x)] += 1
        for k in range(1, n):
            beta[k] += _straddles(_to_mixed_basis(w, k), k)
    return up, down, beta


def _is_power_of(word, loop):
    k, r = divmod(len(word), len(loop))
    if r or not k:
        return False
    unit = loop if word[0] == loop[0] else tuple(-x for x in reversed(loop))
    return tuple(word) == unit * k


def _syllables(word, m):
    """Cyclic syllables of ``word`` split by whether letters lie in ``1..m``."""
    out = []
    for x in word:
        side = abs(x) <= m
        if out and out[-1][0] == side:
            out[-1][1].append(x)
        else:
            out.append((side, [x]))
    if len(out) > 1 and out[0][0] == out[-1][0]:
        side, tail = out.pop()
        out[0] = (side, tail + out[0][1])
    return out


def oracle_intersection(curve, c):
    """Crossings with the round curve ``c``, as a cyclic syllable length.

    The curve around ``c.i..c.j`` splits the free group as an amalgam over
    the cyclic group of its own loop; a cyclically reduced word whose
    syllables avoid that subgroup crosses it once per syllable.
    """
    n = curve.n
    c.check(n)
    m = c.j - c.i + 1
    if m >= n:
        return 0
    moved = oracle_act(curve, shift_to_left_word(c))
    loop = tuple(range(1, m + 1))
    total = 0
    for w in moved.components:
        w = cyclic_reduce(w)
        if len(w) <= 1 or _is_boundary(w, n):
            continue
        sylls = _syllables(w, m)
        while len(sylls) > 1:
            k = next((k for k, (_, s) in enumerate(sylls)
                      if _is_power_of(tuple(_reduce(s)), loop)), None)
            if k is None:
                break
            # a power of the loop lies in both factors: fold it into its neighbours
            rot = sylls[k - 1:] + sylls[:k - 1]
            merged = rot[0][1] + rot[1][1] + (rot[2][1] if len(rot) > 2 else [])
            sylls = [(rot[0][0], _reduce(merged))] + rot[3:]
        if len(sylls) > 1:
            total += len(sylls)
    return total


def oracle_coords(curve):
    up, down, beta = oracle_crossings(curve)
    n = curve.n
    a = [(down[i + 1] - up[i + 1]) // 2 for i in range(1, n - 1)]
    b = [(beta[i] - beta[i + 1]) // 2 for i in range(1, n - 1)]
    return MultiCurveCoords(n, a, b)
