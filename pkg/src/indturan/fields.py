"""Finite fields GF(p) and GF(p^2) with elements encoded as small integers.

An element ``a + b*x`` of GF(p^2) = GF(p)[x] / (x^2 - d) is stored as the index
``a + b*p``; elements of GF(p) use ``b = 0``.  ``d`` is the smallest quadratic
non-residue mod ``p``, which makes ``x^2 - d`` irreducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_nonresidue(p: int) -> int:
    squares = {(x * x) % p for x in range(1, p)}
    for d in range(2, p):
        if d not in squares:
            return d
    raise InputError(f"no quadratic non-residue mod {p}")


class Field:
    """GF(p) (``degree=1``) or GF(p^2) (``degree=2``)."""

    def __init__(self, p: int, degree: int = 1):
        if not is_prime(p):
            raise InputError(f"{p} is not prime")
        if degree not in (1, 2):
            raise InputError("only GF(p) and GF(p^2) are supported")
        if degree == 2 and p == 2:
            raise InputError("GF(4) is not supported (need odd p)")
        self.p = p
        self.degree = degree
        self.order = p**degree
        self.nonresidue = smallest_nonresidue(p) if degree == 2 else None

    def __repr__(self):
        if self.degree == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^2, x^2 - {self.nonresidue})"

    def coords(self, e: int) -> tuple[int, int]:
        return e % self.p, e // self.p

    def element(self, a: int, b: int = 0) -> int:
        return (a % self.p) + (b % self.p) * self.p

    def add(self, x: int, y: int) -> int:
        (a, b), (c, d) = self.coords(x), self.coords(y)
        return self.element(a + c, b + d)

    def sub(self, x: int, y: int) -> int:
        (a, b), (c, d) = self.coords(x), self.coords(y)
        return self.element(a - c, b - d)

    def neg(self, x: int) -> int:
        return self.sub(0, x)

    def mul(self, x: int, y: int) -> int:
        (a, b), (c, d) = self.coords(x), self.coords(y)
        if self.degree == 1:
            return (a * c) % self.p
        # (a + b x)(c + d x) with x^2 = nonresidue
        return self.element(a * c + b * d * self.nonresidue, a * d + b * c)

    def square(self, x: int) -> int:
        return self.mul(x, x)

    def elements(self) -> range:
        return range(self.order)

    def nonzero_squares(self) -> frozenset:
        return frozenset(self.square(x) for x in range(1, self.order))

    def base_field(self) -> list[int]:
        """The prime subfield GF(p) as element indices."""
        return [self.element(a, 0) for a in range(self.p)]


@dataclass(frozen=True)
class FieldElement:
    """Arithmetic wrapper around an element index of a :class:`Field`."""

    field: Field
    value: int

    def _wrap(self, v):
        return FieldElement(self.field, v)

    def _val(self, other):
        return other.value if isinstance(other, FieldElement) else self.field.element(other)

    def __add__(self, other):
        return self._wrap(self.field.add(self.value, self._val(other)))

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.value, self._val(other)))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.value, self._val(other)))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, k: int):
        out = self._wrap(self.field.element(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        return self.value == self.field.element(other)

    def __hash__(self):
        return hash((id(self.field), self.value))


def field_for_order(q: int) -> Field:
    """GF(q) for q prime or q = p^2 with p an odd prime."""
    if is_prime(q):
        return Field(q, 1)
    r = int(round(q**0.5))
    for cand in (r - 1, r, r + 1):
        if cand > 1 and cand * cand == q and is_prime(cand):
            return Field(cand, 2)
    raise InputError(f"unsupported field order {q}: need a prime or the square of an odd prime")
