"""Ordinal arithmetic in Cantor normal form, for ordinals below epsilon_0.

An ordinal is stored as a tuple of (exponent, coefficient) pairs with the
exponents themselves ordinals, strictly decreasing, and every coefficient a
positive integer.  Zero is the empty tuple.  Addition, comparison and left
subtraction are exact; there is no general multiplication (the rest of the
package only ever needs ``omega_power(e) * n``, which is a single term).

The literal syntax is ``w^2*3 + w*5 + 4``: terms joined by ``+``, each term
either a natural number or ``w`` with an optional ``^`` power (a natural
number, or a parenthesised ordinal) and an optional ``*`` coefficient.
"""

from __future__ import annotations

import re
from functools import lru_cache, total_ordering
from typing import Iterator


@total_ordering
class Ordinal:
    """An ordinal below epsilon_0 in Cantor normal form."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: tuple[tuple["Ordinal", int], ...] = ()):
        for exp, coeff in terms:
            if not isinstance(exp, Ordinal):
                raise TypeError(f"exponent must be an Ordinal, got {exp!r}")
            if not isinstance(coeff, int) or coeff < 1:
                raise ValueError(f"coefficient must be a positive int, got {coeff!r}")
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if not e1 > e2:
                raise ValueError("exponents must be strictly decreasing")
        self.terms = terms
        self._hash = hash(terms)

    # -- construction helpers --------------------------------------

    @staticmethod
    def from_int(n: int) -> "Ordinal":
        if n < 0:
            raise ValueError(f"ordinals are non-negative, got {n}")
        if n == 0:
            return ZERO
        return Ordinal(((ZERO, n),))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other: "Ordinal | int") -> bool:
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            if e1 != e2:
                return e1 < e2
            if c1 != c2:
                return c1 < c2
        return len(self.terms) < len(other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Ordinal | int") -> "Ordinal":
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        return add(self, other)

    def __radd__(self, other: int) -> "Ordinal":
        return add(Ordinal.from_int(other), self)

    # -- structure ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_exp(self) -> "Ordinal":
        if not self.terms:
            raise ValueError("zero has no leading term")
        return self.terms[0][0]

    @property
    def leading_coeff(self) -> int:
        if not self.terms:
            raise ValueError("zero has no leading term")
        return self.terms[0][1]

    @property
    def last_exp(self) -> "Ordinal":
        """Exponent of the final (smallest) term."""
        if not self.terms:
            raise ValueError("zero has no last term")
        return self.terms[-1][0]

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero)

    def as_int(self) -> int:
        """The value as a Python int; raises for infinite ordinals."""
        if not self.terms:
            return 0
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1]

    def coeff_of(self, exp: "Ordinal") -> int:
        """Coefficient of ``w^exp`` in the normal form (0 if absent)."""
        for e, c in self.terms:
            if e == exp:
                return c
        return 0

    def classify(self) -> str:
        """One of ``"zero"``, ``"successor"``, ``"limit"``."""
        if not self.terms:
            return "zero"
        if self.terms[-1][0].is_zero:
            return "successor"
        return "limit"

    def predecessor(self) -> "Ordinal":
        """Predecessor of a successor ordinal."""
        if self.classify() != "successor":
            raise ValueError(f"{self} is not a successor")
        *head, (e, c) = self.terms
        if c > 1:
            return Ordinal((*head, (e, c - 1)))
        return Ordinal(tuple(head))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            if exp.is_zero:
                parts.append(str(coeff))
                continue
            if exp == ONE:
                base = "w"
            elif exp.is_finite:
                base = f"w^{exp.as_int()}"
            else:
                base = f"w^({exp})"
            parts.append(base if coeff == 1 else f"{base}*{coeff}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Ordinal({self})"


ZERO = Ordinal()
ONE = Ordinal.from_int(1)
OMEGA = Ordinal(((ONE, 1),))


def omega_term(exp: Ordinal | int, coeff: int = 1) -> Ordinal:
    """The single-term ordinal ``w^exp * coeff``."""
    if isinstance(exp, int):
        exp = Ordinal.from_int(exp)
    if coeff == 0:
        return ZERO
    return Ordinal(((exp, coeff),))


def omega_power(exp: Ordinal | int) -> Ordinal:
    return omega_term(exp, 1)


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal addition (left argument may be partially absorbed)."""
    if not b.terms:
        return a
    if not a.terms:
        return b
    e = b.terms[0][0]
    kept = [t for t in a.terms if t[0] > e]
    merged = list(b.terms)
    # a term of a with exponent exactly e merges into b's leading coefficient
    for exp, coeff in a.terms:
        if exp == e:
            merged[0] = (e, coeff + merged[0][1])
    return Ordinal(tuple(kept) + tuple(merged))


def left_subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique d with a + d == b, defined whenever a <= b."""
    if a > b:
        raise ValueError(f"left_subtract requires a <= b, got a={a}, b={b}")
    ta, tb = a.terms, b.terms
    i = 0
    while i < len(ta) and i < len(tb) and ta[i] == tb[i]:
        i += 1
    if i == len(ta):
        return Ordinal(tb[i:])
    ea, ca = ta[i]
    eb, cb = tb[i]
    if ea < eb:
        # the remainder of a is absorbed by b's next term
        return Ordinal(tb[i:])
    # ea == eb with ca < cb (anything else would contradict a <= b)
    return Ordinal(((eb, cb - ca),) + tb[i + 1:])


class OrdinalSyntaxError(ValueError):
    """Raised when an ordinal literal fails to parse; carries the offset."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at offset {pos} in {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(r"\s*(w|\d+|\^|\*|\+|\(|\))")


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise OrdinalSyntaxError(
                f"unexpected character {stripped[0]!r}", text, len(text) - len(stripped)
            )
        yield m.group(1), m.start(1)
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][1]
        return len(self.text)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise OrdinalSyntaxError("unexpected end of input", self.text, self.pos())
        self.i += 1
        return tok

    def expect(self, want: str) -> None:
        tok = self.peek()
        if tok != want:
            raise OrdinalSyntaxError(f"expected {want!r}", self.text, self.pos())
        self.i += 1

    def nat(self) -> int:
        tok = self.peek()
        if tok is None or not tok.isdigit():
            raise OrdinalSyntaxError("expected a natural number", self.text, self.pos())
        self.i += 1
        return int(tok)

    def ordinal(self) -> Ordinal:
        total = self.term()
        while self.peek() == "+":
            self.take()
            total = add(total, self.term())
        return total

    def term(self) -> Ordinal:
        tok = self.peek()
        if tok is None:
            raise OrdinalSyntaxError("expected a term", self.text, self.pos())
        if tok.isdigit():
            self.take()
            return Ordinal.from_int(int(tok))
        if tok != "w":
            raise OrdinalSyntaxError(f"unexpected token {tok!r}", self.text, self.pos())
        self.take()
        exp = ONE
        if self.peek() == "^":
            self.take()
            if self.peek() == "(":
                self.take()
                exp = self.ordinal()
                self.expect(")")
            else:
                exp = Ordinal.from_int(self.nat())
        coeff = 1
        if self.peek() == "*":
            self.take()
            coeff = self.nat()
        return omega_term(exp, coeff)


@lru_cache(maxsize=4096)
def parse_ordinal(text: str) -> Ordinal:
    """Parse an ordinal literal.  Non-normal sums are normalised.

    >>> str(parse_ordinal("1 + w"))
    'w'
    """
    parser = _Parser(text)
    value = parser.ordinal()
    if parser.peek() is not None:
        raise OrdinalSyntaxError(
            f"trailing input {parser.peek()!r}", text, parser.pos()
        )
    return value
