"""Compact ordinal spaces [0, gamma], their clopen intervals and block systems.

A point of the space ``[0, gamma]`` is any ordinal ``x <= gamma``.  The
clopen sets we work with are finite unions of *clopen intervals*: either
``(lo, hi]`` with ``lo < hi``, or the initial segment ``[0, hi]`` (written
with ``lo = None`` and called the *bottom* interval, since it is the only
kind whose minimum is an isolated-from-below endpoint rather than a limit
from the left).

The Cantor-Bendixson rank data of an interval is read off the Cantor
normal form of its order type: an interval of order type ``w^r * d + 1``
(closed type) has rank ``r + 1`` and degree ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Literal, Optional, Union

from ordspace.ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    left_subtract,
    omega_power,
    omega_term,
    parse_ordinal,
)


@dataclass(frozen=True)
class Space:
    """The ordinal interval [0, gamma] with the order topology."""

    gamma: Ordinal

    @staticmethod
    def parse(text: str) -> "Space":
        return Space(parse_ordinal(text))

    def __str__(self) -> str:
        return str(self.gamma)

    def contains(self, x: Ordinal) -> bool:
        return x <= self.gamma

    def full_interval(self) -> "ClopenInterval":
        return ClopenInterval(None, self.gamma)


def point_level(space: Space, x: Ordinal) -> Ordinal:
    """Level of x in [0, gamma]: largest b with x a limit of level-(b-1) points.

    Equivalently, the exponent of the last CNF term of x (and 0 for x = 0):
    isolated points are exactly the successors and zero, a point ``... + w``
    is a limit of isolated points only, and so on.
    """
    if not space.contains(x):
        raise ValueError(f"{x} is outside [0, {space.gamma}]")
    if x.is_zero:
        return ZERO
    return x.last_exp


@dataclass(frozen=True)
class SpaceInvariants:
    rank: Ordinal
    degree: int
    limit_capacity: Ordinal  # maximal level of any point, rank - 1


def space_invariants(space: Space) -> SpaceInvariants:
    """Rank/degree of [0, gamma], from the CNF of the closed order type gamma+1."""
    closed = add(space.gamma, ONE)
    e = closed.leading_exp
    return SpaceInvariants(
        rank=add(e, ONE), degree=closed.leading_coeff, limit_capacity=e
    )


@dataclass(frozen=True)
class ClopenInterval:
    """A clopen interval of some [0, gamma]: (lo, hi], or [0, hi] when lo is None."""

    lo: Optional[Ordinal]
    hi: Ordinal

    def __post_init__(self):
        if self.lo is not None and not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got ({self.lo}, {self.hi}]")

    @property
    def is_bottom(self) -> bool:
        return self.lo is None

    def __str__(self) -> str:
        if self.lo is None:
            return f"[0, {self.hi}]"
        return f"({self.lo}, {self.hi}]"

    @staticmethod
    def parse(text: str) -> "ClopenInterval":
        text = text.strip()
        if not (text.endswith("]") and (text.startswith("(") or text.startswith("["))):
            raise ValueError(f"bad interval literal {text!r}")
        body = text[1:-1]
        lo_txt, _, hi_txt = body.partition(",")
        if not _:
            raise ValueError(f"bad interval literal {text!r}")
        hi = parse_ordinal(hi_txt)
        if text.startswith("["):
            if parse_ordinal(lo_txt) != ZERO:
                raise ValueError(f"closed-left interval must start at 0: {text!r}")
            return ClopenInterval(None, hi)
        return ClopenInterval(parse_ordinal(lo_txt), hi)

    def contains(self, x: Ordinal) -> bool:
        if self.lo is None:
            return x <= self.hi
        return self.lo < x <= self.hi

    def length(self) -> Ordinal:
        """hi - lo for (lo, hi]; for [0, hi] this is just hi (the half-open part)."""
        if self.lo is None:
            return self.hi
        return left_subtract(self.lo, self.hi)

    def otype(self) -> Ordinal:
        """Closed order type: the type of the interval with both endpoints glued.

        For a bottom interval [0, hi] this is hi + 1 (the literal order type);
        for (lo, hi] it is (hi - lo) + 1, i.e. the type of [lo, hi].  Two
        non-bottom intervals admit an order isomorphism exactly when these
        agree, so this is the invariant all matching rules are stated in.
        """
        return add(self.length(), ONE)

    def true_otype(self) -> Ordinal:
        """The honest order type of the point set itself."""
        if self.lo is None:
            return add(self.hi, ONE)
        d = self.length()
        return d if d.is_finite else add(d, ONE)

    def rank(self) -> Ordinal:
        return add(self.otype().leading_exp, ONE)

    def degree(self) -> int:
        return self.otype().leading_coeff

    def intersect(self, other: "ClopenInterval") -> Optional["ClopenInterval"]:
        lo = _max_lo(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo is None:
            return ClopenInterval(None, hi)
        return ClopenInterval(lo, hi) if lo < hi else None

    def subtract(self, other: "ClopenInterval") -> list["ClopenInterval"]:
        """self minus other, as 0..2 clopen intervals."""
        mid = self.intersect(other)
        if mid is None:
            return [self]
        out: list[ClopenInterval] = []
        if _lo_lt(self.lo, mid.lo):
            out.append(ClopenInterval(self.lo, mid.lo))  # type: ignore[arg-type]
        if mid.hi < self.hi:
            out.append(ClopenInterval(mid.hi, self.hi))
        return out

    def covers(self, other: "ClopenInterval") -> bool:
        return not other.subtract(self)


def _max_lo(a: Optional[Ordinal], b: Optional[Ordinal]) -> Optional[Ordinal]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _lo_lt(a: Optional[Ordinal], b: Optional[Ordinal]) -> bool:
    """Is the left boundary a strictly lower than b (None = bottom)?"""
    if a is None:
        return b is not None
    return b is not None and a < b


@dataclass(frozen=True)
class IntervalInvariants:
    otype: Ordinal
    rank: Ordinal
    degree: int


def interval_invariants(iv: ClopenInterval) -> IntervalInvariants:
    t = iv.otype()
    return IntervalInvariants(otype=t, rank=add(t.leading_exp, ONE), degree=t.leading_coeff)


LevelPoints = Union[tuple[Literal["finite"], list[Ordinal]], tuple[Literal["infinite"], None]]


def level_points(iv: ClopenInterval, beta: Ordinal) -> LevelPoints:
    """The level-beta points of the interval: a finite list, or "infinite".

    The level-beta points of (lo, hi] with hi - lo = delta are the points
    lo + w^beta * c with w^beta * c <= delta and the CNF of the remainder
    not reaching below beta -- concretely: infinitely many iff the leading
    exponent of delta exceeds beta, else one per unit of delta's w^beta
    coefficient.  A bottom interval additionally contains 0 at level 0.
    """
    delta = iv.length()
    extra: list[Ordinal] = []
    if iv.is_bottom and beta == ZERO:
        extra = [ZERO]
    if delta.is_zero:
        return ("finite", extra)
    if delta.leading_exp > beta:
        return ("infinite", None)
    count = delta.coeff_of(beta)
    base = ZERO if iv.lo is None else iv.lo
    pts = [add(base, omega_term(beta, c)) for c in range(1, count + 1)]
    return ("finite", extra + pts)


def count_level_points(iv: ClopenInterval, beta: Ordinal) -> Optional[int]:
    """Number of level-beta points, or None when infinite."""
    kind, pts = level_points(iv, beta)
    return None if kind == "infinite" else len(pts)  # type: ignore[arg-type]


# --------------------------------------------------------------------------
# Block systems
# --------------------------------------------------------------------------


class BlockSystemError(ValueError):
    """The space does not admit the interval block decomposition."""


@dataclass(frozen=True)
class Column:
    """An infinite increasing family of blocks accumulating at a single point.

    Blocks 1..n_exceptional are stored explicitly; beyond those the blocks
    march arithmetically: block n = (base + period*(n - E - 1), base + period*(n - E)]
    where E = n_exceptional.  Every block has closed order type w^alpha + 1
    and the whole column accumulates exactly at ``limit``.
    """

    index: int
    exceptional: tuple[ClopenInterval, ...]
    base: Ordinal
    period: Ordinal  # always w^alpha for the system's alpha
    limit: Ordinal

    def block(self, n: int) -> ClopenInterval:
        if n < 1:
            raise ValueError(f"block index must be >= 1, got {n}")
        e = len(self.exceptional)
        if n <= e:
            return self.exceptional[n - 1]
        lo = self.base if n == e + 1 else add(self.base, _times_nat(self.period, n - e - 1))
        return ClopenInterval(lo, add(self.base, _times_nat(self.period, n - e)))

    def blocks(self, upto: int) -> Iterator[ClopenInterval]:
        for n in range(1, upto + 1):
            yield self.block(n)


def _times_nat(p: Ordinal, n: int) -> Ordinal:
    """p * n for p a power of w (single term)."""
    if n == 0 or p.is_zero:
        return ZERO
    if len(p.terms) != 1 or p.leading_coeff != 1:
        raise ValueError(f"expected a power of w, got {p}")
    return omega_term(p.leading_exp, n)


@dataclass(frozen=True)
class BlockSystem:
    """Decomposition of [0, gamma] into d columns of w^alpha-blocks.

    Requires rank = alpha + 2 for a successor alpha + 1 (the limit capacity
    must itself be a successor).  Column k lives in the k-th degree chunk
    Omega_k of the space and its blocks accumulate at the chunk's top
    level-(alpha+1) point mu_k; the blocks of all columns together with the
    d accumulation points partition the space.
    """

    space: Space
    alpha: Ordinal
    columns: tuple[Column, ...]

    @property
    def degree(self) -> int:
        return len(self.columns)

    def mu(self, k: int) -> Ordinal:
        return self.columns[k - 1].limit

    def chunk(self, k: int) -> ClopenInterval:
        """Omega_k: the k-th maximal-rank chunk of the space."""
        e = add(self.alpha, ONE)
        if k == 1:
            return ClopenInterval(None, self.space.gamma if self.degree == 1 else omega_power(e))
        lo = omega_term(e, k - 1)
        hi = self.space.gamma if k == self.degree else omega_term(e, k)
        return ClopenInterval(lo, hi)

    def locate(self, x: Ordinal) -> tuple[int, Optional[int]]:
        """(column, block index) for x; block index None when x is some mu_k."""
        for k in range(1, self.degree + 1):
            if x == self.mu(k):
                return (k, None)
            col = self.columns[k - 1]
            if not self.chunk(k).contains(x):
                continue
            e = len(col.exceptional)
            for n, blk in enumerate(col.blocks(e), start=1):
                if blk.contains(x):
                    return (k, n)
            if x > col.limit:
                # tail blocks above the accumulation point, scanned directly
                n = e
                while True:
                    n += 1
                    blk = col.block(n)
                    if blk.contains(x):
                        return (k, n)
                    if blk.lo is not None and blk.lo > x:
                        break
            else:
                # arithmetic region below the limit: index from the offset
                off = left_subtract(col.base, x) if x > col.base else None
                if off is not None and not off.is_zero:
                    q = off.coeff_of(self.alpha)
                    rem = left_subtract(omega_term(self.alpha, q), off) if q else off
                    n = len(col.exceptional) + q + (1 if rem and not rem.is_zero else 0)
                    if n > e and col.block(n).contains(x):
                        return (k, n)
        raise ValueError(f"{x} not located in any block of [0, {self.space.gamma}]")


def block_system(space: Space) -> BlockSystem:
    inv = space_invariants(space)
    e = inv.limit_capacity
    if e.classify() != "successor":
        raise BlockSystemError(
            f"[0, {space.gamma}] has limit capacity {e}, a limit ordinal: "
            "no block period one level down exists"
        )
    if e.is_zero:
        raise BlockSystemError(
            f"[0, {space.gamma}] has rank 1: there are no limit points to anchor columns"
        )
    alpha = e.predecessor()
    period = omega_power(alpha)
    d = inv.degree
    cols: list[Column] = []
    for k in range(1, d + 1):
        mu = omega_term(e, k)
        if k == 1:
            # the bottom block [0, w^alpha] absorbs the point 0
            first = ClopenInterval(None, period)
            cols.append(Column(1, (first,), period, period, mu))
            continue
        if k < d:
            cols.append(Column(k, (), omega_term(e, k - 1), period, mu))
            continue
        # last column: the chunk may carry residue material above mu_d
        rho = left_subtract(omega_term(e, d), add(space.gamma, ONE))
        rho = rho.predecessor() if rho.classify() == "successor" else rho
        base = omega_term(e, d - 1)
        if rho.is_zero:
            cols.append(Column(k, (), base, period, mu))
            continue
        c = rho.coeff_of(alpha)
        if c == 0:
            raise BlockSystemError(
                f"[0, {space.gamma}] has residue {rho} above its last accumulation "
                f"point with no w^{alpha} part: the tail cannot be cut into "
                "interval blocks of the column's type"
            )
        scrap = left_subtract(omega_term(alpha, c), rho) if rho != omega_term(alpha, c) else ZERO
        tail: list[ClopenInterval] = []
        for i in range(1, c + 1):
            lo = add(mu, _times_nat(period, i - 1))
            hi = add(mu, _times_nat(period, i))
            if i == c and not scrap.is_zero:
                hi = space.gamma  # the last tail block absorbs the scrap
            tail.append(ClopenInterval(lo, hi))
        cols.append(Column(k, tuple(tail), base, period, mu))
    return BlockSystem(space=space, alpha=alpha, columns=tuple(cols))
