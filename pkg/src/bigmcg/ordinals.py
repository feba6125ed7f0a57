"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a tuple of ``(exponent, coefficient)`` terms with strictly
decreasing exponents, each exponent itself an :class:`Ordinal`.  The empty
tuple is zero.

>>> w = Ordinal.omega()
>>> str(w * 2 + 1)
'w*2+1'
>>> Ordinal.from_int(3) < w
True
"""

from functools import total_ordering

from .errors import ResourceError

MAX_DEPTH = 32


@total_ordering
class Ordinal:
    __slots__ = ("terms",)

    def __init__(self, terms=()):
        terms = tuple(terms)
        for i, (exp, coeff) in enumerate(terms):
            if not isinstance(exp, Ordinal):
                raise TypeError("exponents must be Ordinal instances")
            if not isinstance(coeff, int) or coeff < 1:
                raise ValueError("coefficients must be positive integers")
            if i and not exp < terms[i - 1][0]:
                raise ValueError("exponents must be strictly decreasing")
        self.terms = terms
        if self.depth() > MAX_DEPTH:
            raise ResourceError(f"ordinal nesting deeper than {MAX_DEPTH}")

    @classmethod
    def from_int(cls, n):
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return cls(((ZERO, n),)) if n else ZERO

    @classmethod
    def omega(cls, exponent=None):
        """Return omega raised to ``exponent`` (default 1)."""
        if exponent is None:
            exponent = ONE
        return cls(((exponent, 1),))

    def depth(self):
        if not self.terms:
            return 0
        return 1 + max(exp.depth() for exp, _ in self.terms)

    def is_zero(self):
        return not self.terms

    def is_finite(self):
        return all(exp.is_zero() for exp, _ in self.terms)

    def to_int(self):
        if not self.is_finite():
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1] if self.terms else 0

    def _cmp(self, other):
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            c = e1._cmp(e2)
            if c:
                return c
            if c1 != c2:
                return -1 if c1 < c2 else 1
        return (len(self.terms) > len(other.terms)) - (len(self.terms) < len(other.terms))

    def __eq__(self, other):
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        if not other.terms:
            return self
        lead, lead_coeff = other.terms[0]
        kept = [t for t in self.terms if lead < t[0]]
        same = [c for e, c in self.terms if e == lead]
        if same:
            return Ordinal(kept + [(lead, same[0] + lead_coeff)] + list(other.terms[1:]))
        return Ordinal(kept + list(other.terms))

    def __radd__(self, other):
        if isinstance(other, int):
            return Ordinal.from_int(other) + self
        return NotImplemented

    def __mul__(self, k):
        """Right multiplication by a natural number."""
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0 or not self.terms:
            return ZERO
        (e, c), rest = self.terms[0], self.terms[1:]
        return Ordinal(((e, c * k),) + rest)

    def successor(self):
        return self + ONE

    def __repr__(self):
        return f"Ordinal({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            if exp.is_zero():
                parts.append(str(coeff))
                continue
            text = str(exp)
            if exp == ONE:
                base = "w"
            elif "+" in text or "*" in text:
                base = f"w^({text})"
            else:
                base = f"w^{text}"
            parts.append(base if coeff == 1 else f"{base}*{coeff}")
        return "+".join(parts)


ZERO = Ordinal.__new__(Ordinal)
ZERO.terms = ()
ONE = Ordinal(((ZERO, 1),))
