"""Clopen-set algebra for [0, gamma]: intervals, point singletons and stripes.

A *stripe* is an infinite arithmetic family of same-sized intervals
("members"): member n is ``(base + p*(n-1), base + p*n]`` with
``p = w^period_exp``, for the class of indices ``n = start, start + stride,
start + 2*stride, ...``.  The members accumulate at ``base +
w^(period_exp + 1)`` (the stripe's limit, not itself part of the stripe).

Regions are finite unions of intervals, stripes and points, together with a
finite list of removed points (so that cutting a limit point out of an
interval stays representable).  Two stripes with the same period always
align after peeling at most one member; stripes with different periods can
be combined only when their limits differ (then one side meets the other's
hull in finitely many members).  Stripes with different periods but the
same limit leave the representable class and raise
:class:`UnsupportedRegionOperation`; that shape never arises from the block
and scene constructions in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Iterator, Optional, Union

from ordspace.ordinal import ONE, ZERO, Ordinal, add, left_subtract, omega_power, omega_term
from ordspace.space import ClopenInterval


class UnsupportedRegionOperation(ValueError):
    """The clopen sets involved leave the representable class."""


@dataclass(frozen=True)
class Pt:
    """A single point (as a region atom)."""

    x: Ordinal

    def __str__(self) -> str:
        return f"{{{self.x}}}"


@dataclass(frozen=True)
class Stripe:
    base: Ordinal
    period_exp: Ordinal
    start: int = 1
    stride: int = 1

    def __post_init__(self):
        if self.start < 1 or self.stride < 1:
            raise ValueError(f"bad stripe indices start={self.start} stride={self.stride}")

    @property
    def period(self) -> Ordinal:
        return omega_power(self.period_exp)

    @property
    def limit(self) -> Ordinal:
        return add(self.base, omega_power(add(self.period_exp, ONE)))

    def member(self, n: int) -> ClopenInterval:
        if n < 1:
            raise ValueError(f"member index must be >= 1, got {n}")
        lo = self.base if n == 1 else add(self.base, omega_term(self.period_exp, n - 1))
        return ClopenInterval(lo, add(self.base, omega_term(self.period_exp, n)))

    def in_class(self, n: int) -> bool:
        return n >= self.start and (n - self.start) % self.stride == 0

    def indices_from(self, n: int) -> int:
        """Smallest class index >= n."""
        if n <= self.start:
            return self.start
        k = -(-(n - self.start) // self.stride)
        return self.start + k * self.stride

    def class_indices_below(self, stop: int) -> Iterator[int]:
        n = self.start
        while n < stop:
            yield n
            n += self.stride

    def locate(self, x: Ordinal) -> Optional[int]:
        """The class index of the member containing x, if any."""
        if not x > self.base:
            return None
        off = left_subtract(self.base, x)
        if off.leading_exp > self.period_exp:
            return None
        q = off.coeff_of(self.period_exp)
        rem = left_subtract(omega_term(self.period_exp, q), off) if q else off
        n = q if rem.is_zero else q + 1
        return n if n >= 1 and self.in_class(n) else None

    def contains(self, x: Ordinal) -> bool:
        return self.locate(x) is not None

    def normalized(self) -> "Stripe":
        """An equal stripe rebased so that start lies in [1, stride]."""
        k = ((self.start - 1) // self.stride) * self.stride
        if k == 0:
            return self
        return Stripe(
            add(self.base, omega_term(self.period_exp, k)),
            self.period_exp,
            self.start - k,
            self.stride,
        )

    def __str__(self) -> str:
        return (
            f"stripe(base={self.base}, period=w^({self.period_exp}), "
            f"n={self.start},+{self.stride})"
        )


RAtom = Union[ClopenInterval, Stripe, Pt]


def rebase(s: Stripe, new_base: Ordinal) -> tuple[Optional[ClopenInterval], Stripe]:
    """Re-express a stripe over a lower base on the same period grid.

    Returns (peeled, stripe'): stripe' has base ``new_base`` and its class
    indices pick out the same members, except that when the offset is not a
    multiple of the period the stripe's literal first member (index 1) sits
    off-grid and is peeled off as a plain interval.
    """
    if new_base == s.base:
        return None, s
    if new_base > s.base:
        raise ValueError("rebase target must not exceed the stripe base")
    d = left_subtract(new_base, s.base)
    if d.leading_exp > s.period_exp:
        raise ValueError("rebase offset reaches past the stripe's limit scale")
    k = d.coeff_of(s.period_exp)
    rem = left_subtract(omega_term(s.period_exp, k), d) if k else d
    if rem.is_zero or s.start >= 2:
        # members at index >= 2 absorb the sub-period offset
        return None, Stripe(new_base, s.period_exp, s.start + k, s.stride)
    return s.member(1), Stripe(new_base, s.period_exp, 1 + s.stride + k, s.stride)


def reindex_offset(piece: Stripe, frame: Stripe) -> int:
    """o such that member n of ``piece`` is member n + o of ``frame``.

    Requires ``piece`` to be a union of full members of ``frame`` (up to the
    usual sub-period absorption).
    """
    if piece.period_exp != frame.period_exp:
        raise ValueError("reindex requires equal periods")
    if piece.base == frame.base:
        return 0
    if piece.base > frame.base:
        d = left_subtract(frame.base, piece.base)
        k = d.coeff_of(piece.period_exp)
        if d != omega_term(piece.period_exp, k):
            raise ValueError(f"stripe {piece} is not on the grid of {frame}")
        return k
    d = left_subtract(piece.base, frame.base)
    k = d.coeff_of(piece.period_exp)
    return -k


def _class_intersect(a1: int, t1: int, a2: int, t2: int) -> Optional[tuple[int, int]]:
    T = lcm(t1, t2)
    lo = max(a1, a2)
    for n in range(lo, lo + T):
        if (n - a1) % t1 == 0 and (n - a2) % t2 == 0:
            return (n, T)
    return None


def _class_subtract(a1: int, t1: int, a2: int, t2: int) -> tuple[list[tuple[int, int]], list[int]]:
    """Indices in class (a1, t1) but not in (a2, t2): residual classes + stragglers."""
    T = lcm(t1, t2)
    classes: list[tuple[int, int]] = []
    singles: list[int] = []
    for n0 in range(a1, a1 + T):
        if (n0 - a1) % t1:
            continue
        if (n0 - a2) % t2 == 0:
            n = n0
            while n < a2:
                singles.append(n)
                n += T
        else:
            classes.append((n0, T))
    return classes, singles


def stripe_interval_split(
    s: Stripe, iv: ClopenInterval
) -> tuple[list[tuple[int, ClopenInterval]], Optional[Stripe]]:
    """The stripe's members clipped to the interval.

    Returns (pieces, tail): finitely many (class index, member-part) pieces,
    plus the infinite sub-stripe of members wholly inside the interval when
    the interval reaches the stripe's limit.
    """
    limit = s.limit
    lo = iv.lo
    partial: Optional[tuple[int, Ordinal]] = None  # (index, cut point inside member)
    if lo is None or lo <= s.base:
        n_full = s.start
    else:
        if lo >= limit:
            return [], None
        off = left_subtract(s.base, lo)
        q = off.coeff_of(s.period_exp)
        rem = left_subtract(omega_term(s.period_exp, q), off) if q else off
        if rem.is_zero:
            n_full = s.indices_from(q + 1)
        else:
            if s.in_class(q + 1):
                partial = (q + 1, lo)
            n_full = s.indices_from(q + 2)
    pieces: list[tuple[int, ClopenInterval]] = []
    if iv.hi >= limit:
        if partial is not None:
            n, cut = partial
            pieces.append((n, ClopenInterval(cut, s.member(n).hi)))
        return pieces, Stripe(s.base, s.period_exp, n_full, s.stride)
    if not iv.hi > s.base:
        return [], None
    off2 = left_subtract(s.base, iv.hi)
    q2 = off2.coeff_of(s.period_exp)
    rem2 = left_subtract(omega_term(s.period_exp, q2), off2) if q2 else off2
    n_last = q2 if rem2.is_zero else q2 + 1  # last member meeting (.., hi]
    if partial is not None:
        n, cut = partial
        if n <= n_last:
            pieces.append((n, ClopenInterval(cut, min(s.member(n).hi, iv.hi))))
    n = n_full
    while n <= n_last:
        mem = s.member(n)
        pieces.append((n, mem if mem.hi <= iv.hi else ClopenInterval(mem.lo, iv.hi)))
        n += s.stride
    return pieces, None


def atom_contains(a: RAtom, x: Ordinal) -> bool:
    if isinstance(a, Pt):
        return a.x == x
    return a.contains(x)


def intersect_atoms(a: RAtom, b: RAtom) -> list[RAtom]:
    """The intersection of two atoms, as a list of atoms."""
    if isinstance(a, Pt):
        return [a] if atom_contains(b, a.x) else []
    if isinstance(b, Pt):
        return [b] if atom_contains(a, b.x) else []
    if isinstance(a, ClopenInterval) and isinstance(b, ClopenInterval):
        got = a.intersect(b)
        return [got] if got is not None else []
    if isinstance(a, ClopenInterval):
        a, b = b, a
    if isinstance(b, ClopenInterval):
        assert isinstance(a, Stripe)
        pieces, tail = stripe_interval_split(a, b)
        out: list[RAtom] = [iv for _, iv in pieces]
        if tail is not None:
            out.append(tail)
        return out
    assert isinstance(a, Stripe) and isinstance(b, Stripe)
    return _intersect_stripes(a, b)


def _intersect_stripes(a: Stripe, b: Stripe) -> list[RAtom]:
    if a.period_exp != b.period_exp:
        lo_side, hi_side = (a, b) if a.limit < b.limit else (b, a)
        if a.limit == b.limit:
            raise UnsupportedRegionOperation(
                f"stripes with different periods share the accumulation point {a.limit}"
            )
        hull = ClopenInterval(lo_side.base, lo_side.limit)
        pieces, tail = stripe_interval_split(hi_side, hull)
        assert tail is None
        out: list[RAtom] = []
        for _, piece in pieces:
            out.extend(intersect_atoms(lo_side, piece))
        return out
    if b.base < a.base:
        a, b = b, a
    if a.base < b.base:
        d = left_subtract(a.base, b.base)
        if d.leading_exp > a.period_exp:
            return []  # b starts at or past a's limit
    peeled, b2 = rebase(b, a.base)
    out = []
    if peeled is not None:
        out.extend(intersect_atoms(a, peeled))
    cls = _class_intersect(a.start, a.stride, b2.start, b2.stride)
    if cls is not None:
        out.append(Stripe(a.base, a.period_exp, cls[0], cls[1]))
    return out


def atoms_intersect(a: RAtom, b: RAtom) -> bool:
    return bool(intersect_atoms(a, b))


def subtract_atoms(a: RAtom, b: RAtom) -> tuple[list[RAtom], list[Ordinal]]:
    """a minus b, as (atoms, removed-points).

    Removed points are points that cannot be cut out of an interval because
    they are limit points; they always lie inside the returned atoms.
    """
    if isinstance(a, Pt):
        return ([], []) if atom_contains(b, a.x) else ([a], [])
    if isinstance(b, Pt):
        if not atom_contains(a, b.x):
            return [a], []
        return _remove_point(a, b.x)
    if isinstance(a, ClopenInterval) and isinstance(b, ClopenInterval):
        return list(a.subtract(b)), []
    if isinstance(a, ClopenInterval) and isinstance(b, Stripe):
        return _interval_minus_stripe(a, b)
    if isinstance(a, Stripe) and isinstance(b, ClopenInterval):
        return _stripe_minus_interval(a, b), []
    assert isinstance(a, Stripe) and isinstance(b, Stripe)
    return _stripe_minus_stripe(a, b)


def _remove_point(a: RAtom, x: Ordinal) -> tuple[list[RAtom], list[Ordinal]]:
    if isinstance(a, ClopenInterval):
        left: list[RAtom]
        if x.classify() == "successor":
            p = x.predecessor()
            if a.lo is None:
                left = [ClopenInterval(None, p)]
            else:
                left = [ClopenInterval(a.lo, p)] if a.lo < p else []
            right: list[RAtom] = [ClopenInterval(x, a.hi)] if x < a.hi else []
            return left + right, []
        if x.is_zero:
            # only a bottom interval contains 0; chopping it leaves (0, hi]
            return ([ClopenInterval(ZERO, a.hi)] if a.hi > ZERO else []), []
        return [a], [x]
    assert isinstance(a, Stripe)
    n = a.locate(x)
    assert n is not None
    out: list[RAtom] = [a.member(m) for m in a.class_indices_below(n)]
    out.append(Stripe(a.base, a.period_exp, n + a.stride, a.stride))
    atoms, removed = _remove_point(a.member(n), x)
    out.extend(atoms)
    return out, removed


def _interval_minus_stripe(a: ClopenInterval, s: Stripe) -> tuple[list[RAtom], list[Ordinal]]:
    pieces, tail = stripe_interval_split(s, a)
    if tail is None:
        rest: list[RAtom] = [a]
        for _, piece in pieces:
            nxt: list[RAtom] = []
            for r in rest:
                assert isinstance(r, ClopenInterval)
                nxt.extend(r.subtract(piece))
            rest = nxt
        return rest, []
    # the interval reaches past the stripe's limit
    limit = s.limit
    out: list[RAtom] = []
    if a.lo is None or a.lo < s.base:
        out.append(ClopenInterval(a.lo, s.base))
    # members of the full-period grid that are not in s's class
    comp_classes, comp_singles = _class_subtract(1, 1, s.start, s.stride)
    grid = [Stripe(s.base, s.period_exp, c0, ct) for c0, ct in comp_classes]
    for comp in grid:
        sub_pieces, sub_tail = stripe_interval_split(comp, a)
        out.extend(iv for _, iv in sub_pieces)
        if sub_tail is not None:
            out.append(sub_tail)
    for m in comp_singles:
        got = Stripe(s.base, s.period_exp, m, 1).member(m).intersect(a)
        if got is not None:
            out.append(got)
    # fragments of clipped class members (parts inside a but outside the bite
    # cannot exist: the bite is member-part-within-a)
    out.append(Pt(limit))
    if a.hi > limit:
        out.append(ClopenInterval(limit, a.hi))
    return out, []


def _stripe_minus_interval(s: Stripe, iv: ClopenInterval) -> list[RAtom]:
    pieces, tail = stripe_interval_split(s, iv)
    if not pieces and tail is None:
        return [s]
    touched = {n for n, _ in pieces}
    out: list[RAtom] = []
    if tail is not None:
        # everything from tail.start on is swallowed whole
        out.extend(s.member(n) for n in s.class_indices_below(tail.start) if n not in touched)
    else:
        n_next = s.indices_from(max(touched) + 1)
        out.append(Stripe(s.base, s.period_exp, n_next, s.stride))
        out.extend(s.member(n) for n in s.class_indices_below(n_next) if n not in touched)
    for n, piece in pieces:
        out.extend(s.member(n).subtract(piece))
    return out


def _stripe_minus_stripe(a: Stripe, b: Stripe) -> tuple[list[RAtom], list[Ordinal]]:
    if a.period_exp != b.period_exp:
        if a.limit == b.limit:
            raise UnsupportedRegionOperation(
                f"stripes with different periods share the accumulation point {a.limit}"
            )
        if b.limit < a.limit:
            # b's hull meets finitely many members of a
            hull_b = ClopenInterval(b.base, b.limit)
            pieces, tail = stripe_interval_split(a, hull_b)
            assert tail is None
            touched = {n for n, _ in pieces}
            out: list[RAtom] = []
            n_next = a.indices_from((max(touched) + 1) if touched else a.start)
            if touched:
                out.append(Stripe(a.base, a.period_exp, n_next, a.stride))
                out.extend(a.member(n) for n in a.class_indices_below(n_next) if n not in touched)
            else:
                out.append(a)
            removed_all: list[Ordinal] = []
            for n, piece in pieces:
                out.extend(a.member(n).subtract(piece))
                atoms, removed = _interval_minus_stripe(piece, b)
                out.extend(atoms)
                removed_all.extend(removed)
            return out, removed_all
        # a's hull meets finitely many members of b: chain-subtract them
        hull_a = ClopenInterval(a.base, a.limit)
        pieces, tail = stripe_interval_split(b, hull_a)
        assert tail is None
        rest: list[RAtom] = [a]
        removed_all = []
        for _, piece in pieces:
            nxt: list[RAtom] = []
            for r in rest:
                atoms, removed = subtract_atoms(r, piece)
                nxt.extend(atoms)
                removed_all.extend(removed)
            rest = nxt
        return rest, removed_all
    # equal periods
    if b.base < a.base:
        d = left_subtract(b.base, a.base)
        if d.leading_exp > b.period_exp:
            return [a], []  # a starts past b's limit
        peeled_a, a2 = rebase(a, b.base)
        out = []
        removed_all = []
        if peeled_a is not None:
            atoms, removed = subtract_atoms(peeled_a, b)
            out.extend(atoms)
            removed_all.extend(removed)
        atoms, removed = _stripe_minus_stripe(a2, b)
        out.extend(atoms)
        removed_all.extend(removed)
        return out, removed_all
    if a.base < b.base:
        d = left_subtract(a.base, b.base)
        if d.leading_exp > a.period_exp:
            return [a], []
    peeled_b, b2 = rebase(b, a.base)
    rest = [a]
    removed_all = []
    if peeled_b is not None:
        nxt = []
        for r in rest:
            atoms, removed = subtract_atoms(r, peeled_b)
            nxt.extend(atoms)
            removed_all.extend(removed)
        rest = nxt
    out = []
    for r in rest:
        if isinstance(r, Stripe) and r.base == a.base:
            classes, singles = _class_subtract(r.start, r.stride, b2.start, b2.stride)
            out.extend(Stripe(r.base, r.period_exp, c0, ct) for c0, ct in classes)
            out.extend(r.member(n) for n in singles)
        else:
            atoms, removed = subtract_atoms(r, b2)
            out.extend(atoms)
            removed_all.extend(removed)
    return out, removed_all


class Region:
    """A finite union of atoms minus finitely many removed points."""

    def __init__(self, atoms: list[RAtom], removed: list[Ordinal] | None = None):
        self.atoms = list(atoms)
        self.removed = [p for p in (removed or []) if any(atom_contains(a, p) for a in self.atoms)]

    def subtract_atom(self, b: RAtom) -> "Region":
        atoms: list[RAtom] = []
        removed = list(self.removed)
        for a in self.atoms:
            sub, rm = subtract_atoms(a, b)
            atoms.extend(sub)
            removed.extend(rm)
        return Region(atoms, removed)

    def subtract(self, other: "Region") -> "Region":
        out = self
        for b in other.atoms:
            out = out.subtract_atom(b)
        # points removed from other's atoms are not in other, so they survive
        atoms = list(out.atoms)
        removed = list(out.removed)
        for p in other.removed:
            if self.contains(p) and not out.contains(p):
                if p in removed:
                    removed.remove(p)
                else:
                    atoms.append(Pt(p))
        return Region(atoms, removed)

    def contains(self, x: Ordinal) -> bool:
        if x in self.removed:
            return False
        return any(atom_contains(a, x) for a in self.atoms)

    def is_empty(self) -> bool:
        return self.sample_point() is None

    def sample_point(self) -> Optional[Ordinal]:
        for a in self.atoms:
            if isinstance(a, Pt):
                if a.x not in self.removed:
                    return a.x
                continue
            if isinstance(a, Stripe):
                n = a.start
                for _ in range(len(self.removed) + 1):
                    cand = a.member(n).hi
                    if cand not in self.removed:
                        return cand
                    n += a.stride
                continue
            cand = ZERO if a.lo is None else add(a.lo, ONE)
            for _ in range(len(self.removed) + 1):
                if a.contains(cand) and cand not in self.removed:
                    return cand
                cand = add(cand, ONE)
        return None


def region_subtract(a_atoms: list[RAtom], b_atoms: list[RAtom]) -> Region:
    return Region(list(a_atoms)).subtract(Region(list(b_atoms)))


def regions_equal(a_atoms: list[RAtom], b_atoms: list[RAtom]) -> bool:
    return region_subtract(a_atoms, b_atoms).is_empty() and region_subtract(
        b_atoms, a_atoms
    ).is_empty()
