import pytest

from ordspace.ordinal import ONE, ZERO, Ordinal, parse_ordinal
from ordspace.region import (
    Pt,
    Region,
    Stripe,
    UnsupportedRegionOperation,
    atom_contains,
    intersect_atoms,
    rebase,
    regions_equal,
    region_subtract,
    reindex_offset,
    stripe_interval_split,
    subtract_atoms,
)
from ordspace.space import ClopenInterval

O = parse_ordinal


def iv(text):
    return ClopenInterval.parse(text)


def w_blocks(start=1, stride=1, base="0"):
    """Stripe of w-sized blocks: member n = (w*(n-1), w*n]."""
    return Stripe(O(base), ONE, start, stride)


class TestStripe:
    def test_members(self):
        s = w_blocks()
        assert s.member(1) == iv("(0, w]")
        assert s.member(3) == iv("(w*2, w*3]")
        assert s.limit == O("w^2")

    def test_locate(self):
        s = w_blocks(start=2, stride=2)
        assert s.locate(O("w + 5")) == 2
        assert s.locate(O("w*2")) == 2
        assert s.locate(O("w*2 + 1")) is None  # member 3 not in class
        assert s.locate(O("5")) is None  # member 1 not in class
        assert s.locate(O("w^2")) is None  # the limit is not in the stripe
        assert s.locate(ZERO) is None

    def test_contains_matches_members(self):
        s = w_blocks(start=1, stride=3)
        for n in (1, 4, 7):
            assert s.contains(s.member(n).hi)
        for n in (2, 3, 5):
            assert not s.contains(s.member(n).hi)

    def test_rebase_aligned(self):
        s = Stripe(O("w*2"), ONE, 1, 2)
        peeled, s2 = rebase(s, ZERO)
        assert peeled is None
        assert s2 == Stripe(ZERO, ONE, 3, 2)
        assert s2.member(3) == s.member(1)

    def test_rebase_misaligned_peels_first(self):
        s = Stripe(O("w*2 + 3"), ONE, 1, 1)
        peeled, s2 = rebase(s, ZERO)
        assert peeled == s.member(1)
        # members from the second on absorb the finite offset
        assert s2.member(4) == s.member(2)

    def test_reindex(self):
        frame = w_blocks()
        piece = Stripe(O("w*3"), ONE, 2, 2)
        off = reindex_offset(piece, frame)
        assert off == 3
        assert piece.member(2) == frame.member(5)


class TestSplit:
    def test_finite_overlap(self):
        pieces, tail = stripe_interval_split(w_blocks(), iv("(w + 3, w*3 + 5]"))
        assert tail is None
        assert pieces == [
            (2, iv("(w + 3, w*2]")),
            (3, iv("(w*2, w*3]")),
            (4, iv("(w*3, w*3 + 5]")),
        ]

    def test_reaches_limit(self):
        pieces, tail = stripe_interval_split(w_blocks(), iv("(w + 3, w^2]"))
        assert pieces == [(2, iv("(w + 3, w*2]"))]
        assert tail == Stripe(ZERO, ONE, 3, 1)

    def test_disjoint(self):
        assert stripe_interval_split(w_blocks(), iv("(w^2, w^2*2]")) == ([], None)
        assert stripe_interval_split(w_blocks(base="w^2"), iv("(0, w*5]")) == ([], None)


class TestIntersect:
    def test_stripe_stripe_same_period(self):
        a = w_blocks(start=1, stride=2)  # odd members
        b = w_blocks(start=2, stride=3)  # 2, 5, 8, ...
        got = intersect_atoms(a, b)
        assert got == [Stripe(ZERO, ONE, 5, 6)]

    def test_stripe_stripe_disjoint_classes(self):
        a = w_blocks(start=1, stride=2)
        b = w_blocks(start=2, stride=2)
        assert intersect_atoms(a, b) == []

    def test_stripe_stripe_offset_bases(self):
        a = w_blocks()
        b = Stripe(O("w*3"), ONE, 1, 1)
        got = intersect_atoms(a, b)
        assert got == [Stripe(ZERO, ONE, 4, 1)]

    def test_mixed_period_different_limits(self):
        small = Stripe(ZERO, ZERO, 1, 1)  # unit cells (n-1, n], limit w
        big = w_blocks()  # limit w^2
        got = intersect_atoms(small, big)
        # the small stripe lies inside big's first member
        assert got == [small]

    def test_mixed_period_same_limit_raises(self):
        small = Stripe(O("w"), ZERO, 1, 1)  # limit w*2... no: base w, limit w*2
        other = Stripe(ZERO, ONE, 1, 1)
        # construct two stripes accumulating at the same point
        s1 = Stripe(O("w^2"), ZERO, 1, 1)  # limit w^2 + w
        s2 = Stripe(O("w^2"), ZERO, 2, 2)
        # same period is fine:
        assert intersect_atoms(s1, s2) == [Stripe(O("w^2"), ZERO, 2, 2)]
        t1 = Stripe(ZERO, ONE, 1, 1)  # limit w^2
        t2 = Stripe(O("w*5"), ZERO, 1, 1)  # limit w*6 != w^2: fine, finite expansion
        assert intersect_atoms(t1, t2) == [t2]
        u1 = Stripe(ZERO, ZERO, 1, 1)  # limit w
        u2 = Stripe(ZERO, ONE, 1, 1)  # members (w(n-1), wn], limit w^2
        # u1 sits inside u2's first member: fine
        assert intersect_atoms(u2, u1) == [u1]

    def test_mixed_period_finite_expansion(self):
        a = Stripe(O("w*99"), ZERO, 1, 1)  # unit cells, limit w*100
        got = intersect_atoms(a, Stripe(ZERO, ONE, 1, 1))
        assert regions_equal(got, [a])


class TestSubtract:
    def test_interval_minus_interval(self):
        got, removed = subtract_atoms(iv("(0, w*4]"), iv("(w, w*2]"))
        assert removed == []
        assert got == [iv("(0, w]"), iv("(w*2, w*4]")]

    def test_interval_minus_stripe_finite(self):
        got, removed = subtract_atoms(iv("(0, w*2 + 5]"), w_blocks(start=2, stride=2))
        assert removed == []
        assert regions_equal(got, [iv("(0, w]"), iv("(w*2, w*2 + 5]")])

    def test_interval_minus_stripe_through_limit(self):
        got, removed = subtract_atoms(iv("[0, w^2]"), w_blocks(start=1, stride=2))
        assert removed == []
        # left with: {0}, the even members, and the limit point w^2
        expect = [iv("[0, 0]"), w_blocks(start=2, stride=2), Pt(O("w^2"))]
        assert regions_equal(got, expect)

    def test_remove_successor_point(self):
        got, removed = subtract_atoms(iv("(0, w]"), Pt(O("3")))
        assert removed == []
        assert regions_equal(got, [iv("(0, 2]"), iv("(3, w]")])

    def test_remove_limit_point_is_deferred(self):
        got, removed = subtract_atoms(iv("(0, w*2]"), Pt(O("w")))
        assert removed == [O("w")]
        assert got == [iv("(0, w*2]")]

    def test_stripe_minus_interval(self):
        got, removed = subtract_atoms(w_blocks(), iv("(w, w*3]"))
        assert removed == []
        assert regions_equal(got, [iv("(0, w]"), Stripe(ZERO, ONE, 4, 1)])

    def test_stripe_minus_stripe(self):
        got, removed = subtract_atoms(w_blocks(), w_blocks(start=2, stride=2))
        assert removed == []
        assert regions_equal(got, [w_blocks(start=1, stride=2)])


class TestRegion:
    def test_chunk_decomposition(self):
        # (0, w^2] = all w-members plus the limit point
        whole = [iv("(0, w^2]")]
        parts = [w_blocks(), Pt(O("w^2"))]
        assert regions_equal(whole, parts)

    def test_detects_missing_member(self):
        whole = [iv("(0, w^2]")]
        parts = [w_blocks(start=2, stride=1), Pt(O("w^2"))]
        left = region_subtract(whole, parts)
        assert not left.is_empty()
        p = left.sample_point()
        assert iv("(0, w]").contains(p)

    def test_detects_extra_point(self):
        a = [iv("(0, w]")]
        b = [iv("(0, w]"), Pt(O("w*2"))]
        assert region_subtract(a, b).is_empty()
        assert not region_subtract(b, a).is_empty()

    def test_removed_points_round_trip(self):
        # ((0, w*2] minus {w}) minus (0, w] == (w, w*2] minus {w} is wrong;
        # it equals (w, w*2], since w was already gone
        r = Region([iv("(0, w*2]")]).subtract_atom(Pt(O("w")))
        r2 = r.subtract(Region([iv("(0, w]")]))
        assert r2.contains(O("w + 1"))
        assert r2.contains(O("w*2"))
        assert not r2.contains(O("w"))
        assert not r2.contains(O("3"))

    def test_bottom_vs_parts(self):
        whole = [iv("[0, w^2*2]")]
        bs_parts = [
            iv("[0, w]"),
            Stripe(O("w"), ONE, 1, 1),
            Pt(O("w^2")),
            Stripe(O("w^2"), ONE, 1, 1),
            Pt(O("w^2*2")),
        ]
        assert regions_equal(whole, bs_parts)
