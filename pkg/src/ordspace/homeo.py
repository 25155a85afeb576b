"""Finitely-presented self-homeomorphisms of [0, gamma].

A map is stored as a finite list of *atoms*, each an exact description of
the map on one clopen piece; everything off the atoms is fixed pointwise.

* ``SingleAtom(src, dst)``: the unique order isomorphism between two clopen
  intervals of equal (honest) order type.
* ``LadderAtom(src, dst)``: two stripes with the same period and stride,
  the i-th member of one carried onto the i-th member of the other by the
  member-wise order isomorphism (a "rung" map).
* ``PointAtom(src, dst)``: a moved limit point.  These never stand alone:
  a homeomorphism can move a limit point only by moving a cofinal family
  of members below it, so every point atom rides on ladder atoms whose
  stripe limits it connects.

Because an order isomorphism between two intervals is unique when it
exists, composition never has to compose function formulas: it only has to
intersect the middle regions and transport the pieces, and the composite
atom is again determined by its source and target pieces alone.

The public JSON rule format (singles + column ladders) parses into atoms
and serialises back; a parsed map keeps its original presentation so a
rule file round-trips bit-exactly.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional, Union

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
from ordspace.region import (
    Pt,
    RAtom,
    Region,
    Stripe,
    atom_contains,
    intersect_atoms,
    reindex_offset,
    subtract_atoms,
)
from ordspace.space import ClopenInterval, Space, interval_invariants


class RuleMapError(ValueError):
    """A rule system fails to define a homeomorphism; carries the violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class IntervalMismatch(ValueError):
    """The intervals/regions cannot be matched by any homeomorphism."""


# --------------------------------------------------------------------------
# coordinates inside an interval
#
# Points of a non-bottom interval (lo, hi] are addressed by c = x - lo in
# (0, delta]; points of a bottom interval [0, hi] by c = 1 + x, which ranges
# over the same set when the honest order types agree.  Cuts (boundaries
# between "everything <= here" and the rest) get coordinate 0 at the very
# bottom.
# --------------------------------------------------------------------------


def _coord(iv: ClopenInterval, x: Ordinal) -> Ordinal:
    if iv.lo is None:
        return add(ONE, x)
    return left_subtract(iv.lo, x)


def _uncoord(iv: ClopenInterval, c: Ordinal) -> Ordinal:
    if iv.lo is None:
        # solve 1 + y == c
        return c if not c.is_finite else left_subtract(ONE, c) if c >= ONE else ZERO
    return add(iv.lo, c)


def _coord_cut(iv: ClopenInterval, cut: Optional[Ordinal]) -> Ordinal:
    """Coordinate of a cut; ``None`` is the cut below a bottom interval's 0."""
    if cut is None:
        return ZERO
    if iv.lo is None:
        return add(ONE, cut)
    return left_subtract(iv.lo, cut)


def _uncoord_cut(iv: ClopenInterval, c: Ordinal) -> Optional[Ordinal]:
    if c.is_zero:
        return iv.lo  # for a bottom interval this is None: the below-0 cut
    return _uncoord(iv, c)


@dataclass(frozen=True)
class SingleAtom:
    src: ClopenInterval
    dst: ClopenInterval

    def __post_init__(self):
        if self.src.true_otype() != self.dst.true_otype():
            raise IntervalMismatch(
                f"{self.src} and {self.dst} have different order types "
                f"({self.src.true_otype()} vs {self.dst.true_otype()})"
            )

    def apply(self, x: Ordinal) -> Ordinal:
        return _uncoord(self.dst, _coord(self.src, x))

    def unapply(self, y: Ordinal) -> Ordinal:
        return _uncoord(self.src, _coord(self.dst, y))

    def is_identity(self) -> bool:
        return self.src == self.dst

    def __str__(self) -> str:
        return f"{self.src} -> {self.dst}"


@dataclass(frozen=True)
class LadderAtom:
    src: Stripe
    dst: Stripe

    def __post_init__(self):
        if self.src.period_exp != self.dst.period_exp:
            raise IntervalMismatch("ladder stripes must have equal periods")
        if self.src.stride != self.dst.stride:
            raise IntervalMismatch("ladder stripes must have equal strides")

    @property
    def shift(self) -> int:
        return self.dst.start - self.src.start

    def dst_index(self, n: int) -> int:
        return n + self.shift

    def apply(self, x: Ordinal) -> Ordinal:
        n = self.src.locate(x)
        if n is None:
            raise ValueError(f"{x} is not in {self.src}")
        return _member_map(self.src.member(n), self.dst.member(n + self.shift), x)

    def unapply(self, y: Ordinal) -> Ordinal:
        m = self.dst.locate(y)
        if m is None:
            raise ValueError(f"{y} is not in {self.dst}")
        return _member_map(self.dst.member(m), self.src.member(m - self.shift), y)

    def is_identity(self) -> bool:
        # the ladder pairs the k-th members of the two families in order, so
        # it is the identity exactly when the families coincide; compare with
        # bases snapped to the first member since equal families can carry
        # different nominal (base, start) splits
        return (
            self.src.period_exp == self.dst.period_exp
            and self.src.stride == self.dst.stride
            and _rebase_tight(self.src) == _rebase_tight(self.dst)
        )

    def __str__(self) -> str:
        return f"{self.src} -> {self.dst}"


@dataclass(frozen=True)
class PointAtom:
    src: Ordinal
    dst: Ordinal

    def apply(self, x: Ordinal) -> Ordinal:
        assert x == self.src
        return self.dst

    def is_identity(self) -> bool:
        return self.src == self.dst

    def __str__(self) -> str:
        return f"{{{self.src}}} -> {{{self.dst}}}"


Atom = Union[SingleAtom, LadderAtom, PointAtom]


def _member_map(a: ClopenInterval, b: ClopenInterval, x: Ordinal) -> Ordinal:
    return _uncoord(b, _coord(a, x))


def atom_src_region(a: Atom) -> RAtom:
    if isinstance(a, PointAtom):
        return Pt(a.src)
    return a.src


def atom_dst_region(a: Atom) -> RAtom:
    if isinstance(a, PointAtom):
        return Pt(a.dst)
    return a.dst


@dataclass(frozen=True)
class Homeo:
    space: Space
    atoms: tuple[Atom, ...]
    presentation: Optional[dict] = field(default=None, compare=False)

    def eval(self, x: Ordinal) -> Ordinal:
        if not self.space.contains(x):
            raise ValueError(f"{x} is outside [0, {self.space.gamma}]")
        for a in self.atoms:
            if atom_contains(atom_src_region(a), x):
                if isinstance(a, SingleAtom):
                    return a.apply(x)
                if isinstance(a, LadderAtom):
                    return a.apply(x)
                return a.dst
        return x

    def is_identity(self) -> bool:
        return all(a.is_identity() for a in self.atoms)

    def support_atoms(self) -> list[RAtom]:
        out: list[RAtom] = []
        for a in self.atoms:
            if a.is_identity():
                continue
            out.append(atom_src_region(a))
            out.append(atom_dst_region(a))
        return out

    def __str__(self) -> str:
        if not self.atoms:
            return f"identity on [0, {self.space.gamma}]"
        return "; ".join(str(a) for a in self.atoms)


def identity(space: Space) -> Homeo:
    return Homeo(space, ())


def invert(h: Homeo) -> Homeo:
    out: list[Atom] = []
    for a in h.atoms:
        if isinstance(a, SingleAtom):
            out.append(SingleAtom(a.dst, a.src))
        elif isinstance(a, LadderAtom):
            out.append(LadderAtom(a.dst, a.src))
        else:
            out.append(PointAtom(a.dst, a.src))
    return Homeo(h.space, tuple(out))


# --------------------------------------------------------------------------
# transporting region pieces through atoms
# --------------------------------------------------------------------------


def _single_map_interval(a: SingleAtom, piece: ClopenInterval, forward: bool) -> ClopenInterval:
    frm, to = (a.src, a.dst) if forward else (a.dst, a.src)
    cl = _coord_cut(frm, piece.lo)
    cu = _coord(frm, piece.hi)
    lo = _uncoord_cut(to, cl)
    return ClopenInterval(lo, _uncoord(to, cu))


def _single_map_stripe(a: SingleAtom, piece: Stripe, forward: bool) -> Stripe:
    frm, to = (a.src, a.dst) if forward else (a.dst, a.src)
    if frm.lo is not None and piece.base < frm.lo:
        # the stripe's nominal base lies below the interval even though all
        # its members are inside: snap the base up to the first member
        piece = _rebase_tight(piece)
    c = _coord_cut(frm, piece.base)
    if to.lo is None and c.is_zero:
        raise AssertionError("stripe based at the bottom cut must be pre-split")
    new_base = _uncoord_cut(to, c)
    assert new_base is not None
    return Stripe(new_base, piece.period_exp, piece.start, piece.stride)


def _ladder_map_interval(a: LadderAtom, piece: ClopenInterval, forward: bool) -> ClopenInterval:
    frm, to = (a.src, a.dst) if forward else (a.dst, a.src)
    shift = a.shift if forward else -a.shift
    n = frm.locate(piece.hi)
    assert n is not None, f"{piece} not inside {frm}"
    return _translate(piece, frm.member(n), to.member(n + shift))


def _translate(piece: ClopenInterval, frm: ClopenInterval, to: ClopenInterval) -> ClopenInterval:
    cl = _coord_cut(frm, piece.lo)
    cu = _coord(frm, piece.hi)
    return ClopenInterval(_uncoord_cut(to, cl), _uncoord(to, cu))


def _ladder_map_stripe(a: LadderAtom, piece: Stripe, forward: bool) -> Stripe:
    frm, to = (a.src, a.dst) if forward else (a.dst, a.src)
    shift = a.shift if forward else -a.shift
    if piece.period_exp < frm.period_exp:
        # a finer stripe confined to a single member rides along with it
        first = piece.indices_from(1)
        n = frm.locate(piece.member(first).hi)
        assert n is not None, f"{piece} not inside {frm}"
        mem, img = frm.member(n), to.member(n + shift)
        assert piece.limit <= mem.hi and (mem.lo is None or piece.base >= mem.lo), (
            f"{piece} straddles members of {frm}"
        )
        c = _coord_cut(mem, piece.base)
        new_base = _uncoord_cut(img, c)
        assert new_base is not None
        return Stripe(new_base, piece.period_exp, piece.start, piece.stride)
    off = reindex_offset(piece, frm)
    # members of the piece, in frame indices, then shifted into the other frame
    start = piece.start + off + shift
    assert start >= 1, "ladder image index fell below 1"
    return Stripe(to.base, to.period_exp, start, piece.stride)


def _map_piece(a: Optional[Atom], piece: RAtom, forward: bool) -> RAtom:
    if a is None:
        return piece
    if isinstance(a, PointAtom):
        assert isinstance(piece, Pt)
        return Pt(a.dst if forward else a.src)
    if isinstance(piece, Pt):
        if isinstance(a, SingleAtom):
            return Pt(a.apply(piece.x) if forward else a.unapply(piece.x))
        return Pt(a.apply(piece.x) if forward else a.unapply(piece.x))
    if isinstance(piece, ClopenInterval):
        if isinstance(a, SingleAtom):
            return _single_map_interval(a, piece, forward)
        return _ladder_map_interval(a, piece, forward)
    assert isinstance(piece, Stripe)
    if isinstance(a, SingleAtom):
        return _single_map_stripe(a, piece, forward)
    return _ladder_map_stripe(a, piece, forward)


def _needs_peel(a: Optional[Atom], piece: RAtom, forward: bool) -> bool:
    """A stripe starting at the very bottom cut maps to a bottom interval
    plus a stripe, so the first member must be split off first."""
    if not isinstance(piece, Stripe) or not isinstance(a, SingleAtom):
        return False
    frm, to = (a.src, a.dst) if forward else (a.dst, a.src)
    return to.lo is None and frm.lo is not None and piece.base == frm.lo


def _rebase_tight(s: Stripe) -> Stripe:
    """Move the base up to the first class member, so index 1 is in the class."""
    if s.start == 1:
        return s
    return Stripe(
        add(s.base, omega_term(s.period_exp, s.start - 1)), s.period_exp, 1, s.stride
    )


def _presplit(piece: RAtom, back: Optional[Atom], fwd: Optional[Atom]) -> list[RAtom]:
    if isinstance(piece, Stripe):
        if _needs_peel(back, piece, forward=False) or _needs_peel(fwd, piece, forward=True):
            s = _rebase_tight(piece)
            if s.base != piece.base:
                return [s]  # no member touches the bottom cut after all
            return [
                s.member(1),
                _rebase_tight(Stripe(s.base, s.period_exp, 1 + s.stride, s.stride)),
            ]
    return [piece]


def _build_atom(src: RAtom, dst: RAtom) -> Atom:
    if isinstance(src, Pt):
        assert isinstance(dst, Pt)
        return PointAtom(src.x, dst.x)
    if isinstance(src, ClopenInterval):
        assert isinstance(dst, ClopenInterval)
        return SingleAtom(src, dst)
    assert isinstance(src, Stripe) and isinstance(dst, Stripe)
    return LadderAtom(src.normalized(), dst.normalized())


def _region_pieces(region: Region) -> list[RAtom]:
    atoms = list(region.atoms)
    for p in region.removed:
        nxt: list[RAtom] = []
        hit = False
        for a in atoms:
            if not hit and atom_contains(a, p):
                sub, removed = subtract_atoms(a, Pt(p))
                if removed:
                    raise IntervalMismatch(
                        f"the limit point {p} cannot be isolated from {a}"
                    )
                nxt.extend(sub)
                hit = True
            else:
                nxt.append(a)
        atoms = nxt
    return atoms


def transport_piece(a: Atom, piece: RAtom, forward: bool) -> list[tuple[RAtom, RAtom]]:
    """(source, image) sub-piece pairs of a region piece carried through an atom.

    ``piece`` must lie inside the atom's source (forward) or target; stripes
    are split when one end must be represented differently on the other side.
    """
    back, fwd = (None, a) if forward else (a, None)
    out: list[tuple[RAtom, RAtom]] = []
    for q in _presplit(piece, back, fwd):
        if forward:
            out.append((q, _map_piece(a, q, True)))
        else:
            out.append((_map_piece(a, q, False), q))
    return out


def compose(f: Homeo, g: Homeo) -> Homeo:
    """The homeomorphism x -> f(g(x))."""
    if f.space != g.space:
        raise ValueError("cannot compose maps over different spaces")
    out: list[Atom] = []
    for a in g.atoms:
        dst_a = atom_dst_region(a)
        remainder = Region([dst_a])
        for b in f.atoms:
            src_b = atom_src_region(b)
            for piece in intersect_atoms(dst_a, src_b):
                for q in _presplit(piece, a, b):
                    out.append(_build_atom(_map_piece(a, q, False), _map_piece(b, q, True)))
            remainder = remainder.subtract_atom(src_b)
        for piece in _region_pieces(remainder):
            for q in _presplit(piece, a, None):
                out.append(_build_atom(_map_piece(a, q, False), q))
    g_dsts = [atom_dst_region(a) for a in g.atoms]
    for b in f.atoms:
        remainder = Region([atom_src_region(b)])
        for d in g_dsts:
            remainder = remainder.subtract_atom(d)
        for piece in _region_pieces(remainder):
            for q in _presplit(piece, None, b):
                out.append(_build_atom(q, _map_piece(b, q, True)))
    return Homeo(g.space, tuple(x for x in out if not x.is_identity()))


def compose_all(maps: list[Homeo], space: Space) -> Homeo:
    """Compose a word of maps, the last entry applied first."""
    h = identity(space)
    for m in maps:
        h = compose(h, m)
    return h


def equals(f: Homeo, g: Homeo) -> bool:
    return compose(f, invert(g)).is_identity()


# --------------------------------------------------------------------------
# canonical maps between matching intervals
# --------------------------------------------------------------------------


def _carve_front(iv: ClopenInterval, tt: Ordinal) -> tuple[ClopenInterval, ClopenInterval]:
    """Split iv into (front, rest) with front of honest order type tt."""
    if iv.lo is None:
        # a bottom front [0, x] has honest type x + 1, always a successor
        if tt.classify() != "successor":
            raise ValueError(f"no bottom interval has honest type {tt}")
        x = tt.predecessor()
        return ClopenInterval(None, x), ClopenInterval(x, iv.hi)
    if tt.is_finite:
        z = tt
    else:
        # honest type of (u, u+z] with z infinite is z + 1
        if tt.classify() != "successor":
            raise ValueError(f"no clopen interval has honest type {tt}")
        z = tt.predecessor()
    mid = add(iv.lo, z)
    return ClopenInterval(iv.lo, mid), ClopenInterval(mid, iv.hi)


def canonical_rules(
    src: ClopenInterval, dst: ClopenInterval
) -> list[tuple[ClopenInterval, ClopenInterval]]:
    """At most three interval rules realising a homeomorphism src -> dst.

    Requires equal (rank, degree); additionally a finite bottom interval can
    only match another finite bottom interval (the point counts differ
    otherwise, despite equal invariants).
    """
    inv_s, inv_d = interval_invariants(src), interval_invariants(dst)
    if (inv_s.rank, inv_s.degree) != (inv_d.rank, inv_d.degree):
        raise IntervalMismatch(
            f"{src} has (rank, degree) = ({inv_s.rank}, {inv_s.degree}) but "
            f"{dst} has ({inv_d.rank}, {inv_d.degree})"
        )
    if src.true_otype() == dst.true_otype():
        return [(src, dst)]
    if inv_s.otype.is_finite:
        raise IntervalMismatch(
            f"{src} and {dst} have {inv_s.degree - (0 if src.is_bottom else 1)} and "
            f"{inv_d.degree - (0 if dst.is_bottom else 1)} points: no bijection exists"
        )
    rho = inv_s.otype.leading_exp
    lead = omega_term(rho, inv_s.degree)

    def split_tail(iv: ClopenInterval) -> tuple[ClopenInterval, Optional[ClopenInterval]]:
        base = ZERO if iv.lo is None else iv.lo
        a = add(base, lead)
        body = ClopenInterval(iv.lo, a)
        tail = ClopenInterval(a, iv.hi) if iv.hi > a else None
        return body, tail

    body_s, tail_s = split_tail(src)
    body_d, tail_d = split_tail(dst)
    rules: list[tuple[ClopenInterval, ClopenInterval]] = []
    rest_d = dst
    rest_s = src
    if tail_s is not None:
        head_d, rest_d = _carve_front(dst, tail_s.true_otype())
        rules.append((tail_s, head_d))
    if tail_d is not None:
        head_s, rest_s = _carve_front(src, tail_d.true_otype())
        rules.append((head_s, tail_d))
    mid_s = ClopenInterval(rest_s.lo, body_s.hi)
    mid_d = ClopenInterval(rest_d.lo, body_d.hi)
    rules.append((mid_s, mid_d))
    return rules


def canonical_homeo(space: Space, src: ClopenInterval, dst: ClopenInterval) -> Homeo:
    atoms = tuple(
        SingleAtom(s, d) for s, d in canonical_rules(src, dst) if s != d
    )
    return Homeo(space, atoms)


@dataclass
class _Cell:
    junk: list[ClopenInterval]
    body: ClopenInterval


def _cells_of(pieces: list[ClopenInterval], rho: Ordinal) -> list[_Cell]:
    cells: list[_Cell] = []
    junk: list[ClopenInterval] = []
    for piece in pieces:
        t = piece.otype()
        if t.leading_exp > rho:
            raise IntervalMismatch(f"piece {piece} exceeds rank w^{rho}")
        if t.leading_exp < rho:
            junk.append(piece)
            continue
        base = ZERO if piece.lo is None else piece.lo
        prev: Optional[Ordinal] = piece.lo
        first = piece.lo is None
        for c in range(1, t.leading_coeff + 1):
            top = add(base, omega_term(rho, c))
            body = ClopenInterval(None if first and c == 1 else prev, top)
            cells.append(_Cell(junk, body))
            junk = []
            prev = top
        if piece.hi > prev:
            junk.append(ClopenInterval(prev, piece.hi))
    if junk:
        if not cells:
            raise IntervalMismatch("region has lower rank than its counterpart")
        cells[-1].junk = cells[-1].junk + junk  # trailing junk joins the last cell
    return cells


def region_rules(
    src_pieces: list[ClopenInterval], dst_pieces: list[ClopenInterval]
) -> list[tuple[ClopenInterval, ClopenInterval]]:
    """Interval rules for a homeomorphism between two finite unions of
    disjoint clopen intervals with matching rank and degree."""
    rho_s = max((p.otype().leading_exp for p in src_pieces), default=ZERO)
    rho_d = max((p.otype().leading_exp for p in dst_pieces), default=ZERO)
    if rho_s != rho_d:
        raise IntervalMismatch(
            f"regions have different ranks (w^{rho_s} vs w^{rho_d} scale)"
        )
    src_sorted = _sorted_pieces(src_pieces)
    dst_sorted = _sorted_pieces(dst_pieces)
    if rho_s.is_zero and all(p.otype().is_finite for p in src_sorted + dst_sorted):
        return _finite_region_rules(src_sorted, dst_sorted)
    cells_s = _cells_of(src_sorted, rho_s)
    cells_d = _cells_of(dst_sorted, rho_d)
    if len(cells_s) != len(cells_d):
        raise IntervalMismatch(
            f"regions have degrees {len(cells_s)} and {len(cells_d)}"
        )
    rules: list[tuple[ClopenInterval, ClopenInterval]] = []
    for cs, cd in zip(cells_s, cells_d):
        b_s, b_d = cs.body, cd.body
        for j in cs.junk:
            part, b_d = _carve_front(b_d, j.true_otype())
            rules.append((j, part))
        for j in cd.junk:
            part, b_s = _carve_front(b_s, j.true_otype())
            rules.append((part, j))
        rules.append((b_s, b_d))
    return rules


def _finite_region_rules(src_sorted, dst_sorted):
    n_src = sum(p.true_otype().as_int() for p in src_sorted)
    n_dst = sum(p.true_otype().as_int() for p in dst_sorted)
    if n_src != n_dst:
        raise IntervalMismatch(f"regions have {n_src} and {n_dst} points")
    rules = []
    di = iter(dst_sorted)
    cur = next(di, None)
    for p in src_sorted:
        need = p.true_otype().as_int()
        lo = p.lo
        while need:
            assert cur is not None
            have = cur.true_otype().as_int()
            if have <= need:
                take_src, lo = _take_points(p, lo, have)
                rules.append((take_src, cur))
                need -= have
                cur = next(di, None)
            else:
                part, cur = _split_count(cur, need)
                take_src, lo = _take_points(p, lo, need)
                rules.append((take_src, part))
                need = 0
    return rules


def _take_points(p: ClopenInterval, lo: Optional[Ordinal], count: int):
    if lo is None:
        hi = Ordinal.from_int(count - 1)
        return ClopenInterval(None, hi), hi
    hi = add(lo, Ordinal.from_int(count))
    return ClopenInterval(lo, hi), hi


def _split_count(iv: ClopenInterval, count: int):
    if iv.lo is None:
        hi = Ordinal.from_int(count - 1)
        return ClopenInterval(None, hi), ClopenInterval(hi, iv.hi)
    hi = add(iv.lo, Ordinal.from_int(count))
    return ClopenInterval(iv.lo, hi), ClopenInterval(hi, iv.hi)


def _sorted_pieces(pieces: list[ClopenInterval]) -> list[ClopenInterval]:
    return sorted(pieces, key=lambda p: (p.lo is not None, p.lo if p.lo is not None else ZERO))


def region_homeo(
    space: Space, src_pieces: list[ClopenInterval], dst_pieces: list[ClopenInterval]
) -> Homeo:
    atoms = tuple(
        SingleAtom(s, d) for s, d in region_rules(src_pieces, dst_pieces) if s != d
    )
    return Homeo(space, atoms)


# --------------------------------------------------------------------------
# the public rule-file format
# --------------------------------------------------------------------------


def _parse_column(obj: dict, errs: list[str], label: str):
    try:
        base = parse_ordinal(obj["base"])
        period = parse_ordinal(obj["period"])
        limit = parse_ordinal(obj["limit"])
        exceptional = [ClopenInterval.parse(t) for t in obj.get("exceptional", [])]
    except (KeyError, ValueError) as e:
        errs.append(f"{label}: {e}")
        return None
    if len(period.terms) != 1 or period.leading_coeff != 1:
        errs.append(f"{label}: period {period} is not a power of w")
        return None
    pe = period.leading_exp
    if limit != add(base, omega_power(add(pe, ONE))):
        errs.append(
            f"{label}: limit {limit} does not match base {base} + w^({pe} + 1)"
        )
        return None
    return (base, pe, tuple(exceptional), limit)


def _column_block(col, n: int) -> ClopenInterval:
    base, pe, exceptional, _ = col
    e = len(exceptional)
    if n <= e:
        return exceptional[n - 1]
    lo = base if n == e + 1 else add(base, omega_term(pe, n - e - 1))
    return ClopenInterval(lo, add(base, omega_term(pe, n - e)))


def atoms_from_rules(space: Space, doc: dict, errs: list[str]) -> list[Atom]:
    atoms: list[Atom] = []
    for i, rule in enumerate(doc.get("singles", [])):
        try:
            src = ClopenInterval.parse(rule["src"])
            dst = ClopenInterval.parse(rule["dst"])
        except (KeyError, ValueError) as e:
            errs.append(f"singles[{i}]: {e}")
            continue
        for iv in (src, dst):
            if iv.hi > space.gamma:
                errs.append(f"singles[{i}]: {iv} reaches outside [0, {space.gamma}]")
        try:
            atoms.append(SingleAtom(src, dst))
        except IntervalMismatch as e:
            errs.append(f"singles[{i}]: {e}")
    for i, rule in enumerate(doc.get("ladders", [])):
        label = f"ladders[{i}]"
        col_s = _parse_column(rule.get("col_src", {}), errs, f"{label}.col_src")
        col_d = _parse_column(rule.get("col_dst", {}), errs, f"{label}.col_dst")
        if col_s is None or col_d is None:
            continue
        try:
            start = int(rule["start"])
            stride = int(rule["stride"])
            residue = int(rule.get("residue", start % stride))
            shift = int(rule.get("shift", 0))
        except (KeyError, ValueError) as e:
            errs.append(f"{label}: {e}")
            continue
        if col_s[1] != col_d[1]:
            errs.append(f"{label}: source and target columns have different periods")
            continue
        if start < 1 or stride < 1:
            errs.append(f"{label}: bad index class start={start} stride={stride}")
            continue
        while start % stride != residue % stride:
            start += 1
        e_s, e_d = len(col_s[2]), len(col_d[2])
        n = start
        if n + shift < 1:
            errs.append(f"{label}: shift {shift} sends block {n} below index 1")
            continue
        # explicit rungs until both sides are arithmetic
        while n <= e_s or n + shift <= e_d:
            try:
                rules = canonical_rules(_column_block(col_s, n), _column_block(col_d, n + shift))
            except IntervalMismatch as exc:
                errs.append(f"{label}: rung {n}: {exc}")
                rules = []
            for s, d in rules:
                atoms.append(SingleAtom(s, d))
            n += stride
        src_stripe = Stripe(col_s[0], col_s[1], n - e_s, stride).normalized()
        dst_stripe = Stripe(col_d[0], col_d[1], n + shift - e_d, stride).normalized()
        atoms.append(LadderAtom(src_stripe, dst_stripe))
    # materialise moved limit points implied by the ladders
    limits: dict[Ordinal, set[Ordinal]] = {}
    for a in atoms:
        if isinstance(a, LadderAtom):
            limits.setdefault(a.src.limit, set()).add(a.dst.limit)
    for lim, dsts in sorted(limits.items()):
        if len(dsts) > 1:
            errs.append(
                f"ladders accumulating at {lim} send it to multiple points: "
                f"{', '.join(str(d) for d in sorted(dsts))}"
            )
            continue
        (m,) = dsts
        if m == lim:
            continue
        if any(atom_contains(atom_src_region(a), lim) for a in atoms):
            continue
        atoms.append(PointAtom(lim, m))
    return atoms


def validate_atoms(space: Space, atoms: list[Atom]) -> list[str]:
    errs: list[str] = []
    srcs = [atom_src_region(a) for a in atoms]
    dsts = [atom_dst_region(a) for a in atoms]
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            if intersect_atoms(srcs[i], srcs[j]):
                errs.append(f"sources of rules {i} and {j} overlap")
            if intersect_atoms(dsts[i], dsts[j]):
                errs.append(f"targets of rules {i} and {j} overlap")
    left = Region(list(srcs)).subtract(Region(list(dsts)))
    if not left.is_empty():
        errs.append(
            f"sources cover {left.sample_point()}, which no target covers: "
            "the rules do not permute the space"
        )
    right = Region(list(dsts)).subtract(Region(list(srcs)))
    if not right.is_empty():
        errs.append(
            f"targets cover {right.sample_point()}, which no source covers: "
            "the rules do not permute the space"
        )
    h = Homeo(space, tuple(atoms))
    for a in atoms:
        if isinstance(a, LadderAtom):
            got = h.eval(a.src.limit)
            if got != a.dst.limit:
                errs.append(
                    f"discontinuity at {a.src.limit}: the members of {a.src} "
                    f"accumulate at {a.dst.limit} but the point itself maps to {got}"
                )
        if isinstance(a, PointAtom):
            if not any(
                isinstance(b, LadderAtom) and b.src.limit == a.src and b.dst.limit == a.dst
                for b in atoms
            ):
                errs.append(
                    f"the limit point {a.src} moves to {a.dst} with no cofinal "
                    "family of members moving with it"
                )
    return errs


def from_rules(doc: dict) -> Homeo:
    """Parse and validate a rule document; raises RuleMapError on failure."""
    errs: list[str] = []
    try:
        space = Space.parse(doc["space"])
    except (KeyError, ValueError) as e:
        raise RuleMapError([f"space: {e}"]) from e
    atoms = atoms_from_rules(space, doc, errs)
    if not errs:
        errs.extend(validate_atoms(space, atoms))
    if errs:
        raise RuleMapError(errs)
    return Homeo(space, tuple(a for a in atoms if not a.is_identity()), presentation=copy.deepcopy(doc))


def to_rules(h: Homeo) -> dict:
    """Serialise to the rule-file format; a parsed map returns its original text."""
    if h.presentation is not None:
        return copy.deepcopy(h.presentation)
    singles = []
    ladders = []
    for a in h.atoms:
        if isinstance(a, SingleAtom):
            singles.append({"src": str(a.src), "dst": str(a.dst)})
        elif isinstance(a, LadderAtom):
            ladders.append(
                {
                    "col_src": _trivial_column(a.src),
                    "col_dst": _trivial_column(a.dst),
                    "start": a.src.start,
                    "residue": a.src.start % a.src.stride,
                    "stride": a.src.stride,
                    "shift": a.shift,
                }
            )
        else:
            supported = any(
                isinstance(b, LadderAtom) and b.src.limit == a.src and b.dst.limit == a.dst
                for b in h.atoms
            )
            if not supported:
                raise IntervalMismatch(
                    f"moved limit point {a.src} has no supporting ladder"
                )
    return {"space": str(h.space.gamma), "singles": singles, "ladders": ladders}


def _trivial_column(s: Stripe) -> dict:
    return {
        "exceptional": [],
        "base": str(s.base),
        "period": str(omega_power(s.period_exp)),
        "limit": str(s.limit),
    }
