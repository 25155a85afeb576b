import pytest

from ordspace.ordinal import parse_ordinal as P
from ordspace.space import Space, ClopenInterval
from ordspace.homeo import compose, equals, identity, invert
from ordspace.generators import span_swap
from ordspace.distortion import (
    SceneError,
    build_scene,
    check_identity,
    commutator_word,
    compose_certificates,
    gamma_truncated,
    report_json,
    scene_certificate,
    scene_json,
    validate_scene,
    _translate_interval,
)


W3 = Space.parse("w^3")
W4 = Space.parse("w^4*2")


def point_swap(space, a, b):
    """Swap the intervals (a-1, a] and (b-1, b] (finite a < b)."""
    lo = ClopenInterval(P(str(a - 1)) if a > 1 else P("0"), P(str(a)))
    hi = ClopenInterval(P(str(b - 1)), P(str(b)))
    return span_swap(space, [(lo, hi)])


class TestScene:
    def test_seed_and_shifts(self):
        sc = build_scene(W3)
        assert str(sc.Z) == "(0, w]"
        assert sc.sigma.eval(P("w")) == P("w*2")
        assert sc.tau.eval(P("w^2")) == P("w^2*2")

    def test_validates(self):
        assert validate_scene(build_scene(W3)) == []
        assert validate_scene(build_scene(W4)) == []

    def test_small_space_rejected(self):
        with pytest.raises(SceneError):
            build_scene(Space.parse("w^2"))
        with pytest.raises(SceneError):
            build_scene(Space.parse("w*5+3"))

    def test_translates_are_disjoint_blocks(self):
        sc = build_scene(W3)
        seen = []
        for m in range(-4, 5):
            T = _translate_interval(sc, m)
            assert T.length() == P("w")
            assert T not in seen
            seen.append(T)

    def test_zigzag_translate_positions(self):
        # the forward orbit of Z visits the even-indexed blocks
        sc = build_scene(W3)
        assert _translate_interval(sc, 1) == ClopenInterval(P("w"), P("w*2"))
        assert _translate_interval(sc, 5) == ClopenInterval(P("w*9"), P("w*10"))
        # and the backward orbit the odd-indexed ones
        assert _translate_interval(sc, -1) == ClopenInterval(P("w*2"), P("w*3"))
        assert _translate_interval(sc, -2) == ClopenInterval(P("w*4"), P("w*5"))

    def test_shift_fixes_the_limit(self):
        sc = build_scene(W3)
        assert sc.sigma.eval(P("w^2")) == P("w^2")
        assert sc.tau.eval(P("w^3")) == P("w^3")

    def test_scene_json_shape(self):
        doc = scene_json(build_scene(W3))
        assert doc["space"] == "w^3"
        assert doc["Z"] == "(0, w]"
        assert "ladders" in doc["sigma"]


class TestTruncatedProduct:
    def test_identity_factors_give_identity(self):
        sc = build_scene(W3)
        tp = gamma_truncated(sc, [identity(W3)] * 3, 2)
        assert tp.gamma_M.is_identity()

    def test_factor_count(self):
        sc = build_scene(W3)
        g = point_swap(W3, 1, 2)
        tp = gamma_truncated(sc, [g], 2)
        # one g over (M+1) sigma-translates, two single atoms each
        assert len(tp.gamma_M.atoms) == 2 * 3

    def test_support_outside_seed_rejected(self):
        sc = build_scene(W3)
        g = point_swap(W3, 1, 2)
        far = span_swap(
            W3,
            [(ClopenInterval(P("w"), P("w+1")), ClopenInterval(P("w+1"), P("w+2")))],
        )
        with pytest.raises(SceneError):
            gamma_truncated(sc, [far], 2)
        with pytest.raises(SceneError):
            gamma_truncated(sc, [g] * 4, 2)  # more maps than window slots
        with pytest.raises(SceneError):
            gamma_truncated(sc, [g], 0)


class TestCommutator:
    def test_word_lengths(self):
        sc = build_scene(W3)
        for n in range(7):
            assert len(commutator_word(sc, n)) == 4 * n + 4

    def test_recovers_factor_on_seed(self):
        sc = build_scene(W3)
        g = point_swap(W3, 1, 3)
        tp = gamma_truncated(sc, [g, identity(W3), g], 4)
        for n in (0, 1, 2):
            rep = check_identity(sc, tp, n)
            assert rep.ok
            assert rep.word_length == 4 * n + 4
            want = tp.gs[n]
            got = rep.commutator
            for x in (P("1"), P("2"), P("3"), P("5")):
                assert got.eval(x) == want.eval(x)

    def test_defects_confined_to_window_edge(self):
        sc = build_scene(W3)
        g = point_swap(W3, 1, 2)
        tp = gamma_truncated(sc, [g], 3)
        rep = check_identity(sc, tp, 0)
        assert rep.ok
        # the commutator is not globally equal to g: the correction terms
        # survive on translates beyond the safe window
        assert rep.defects

    def test_values_stable_as_window_grows(self):
        sc = build_scene(W3)
        g = point_swap(W3, 2, 4)
        pts = [P("1"), P("2"), P("4"), P("w+1"), P("w^2+3")]
        rows = []
        for M in (3, 5, 7):
            tp = gamma_truncated(sc, [g] * (M + 1), M)
            h = check_identity(sc, tp, 1).commutator
            rows.append(tuple(h.eval(x) for x in pts))
        assert rows[0] == rows[1] == rows[2]

    def test_window_too_small(self):
        sc = build_scene(W3)
        tp = gamma_truncated(sc, [point_swap(W3, 1, 2)], 2)
        with pytest.raises(ValueError):
            check_identity(sc, tp, 3)

    def test_report_json(self):
        sc = build_scene(W3)
        tp = gamma_truncated(sc, [point_swap(W3, 1, 2)], 2)
        doc = report_json(check_identity(sc, tp, 0))
        assert doc["ok"] is True
        assert doc["word_length"] == 4
        assert {a["translate"] for a in doc["agreements"]} == {-1, 0, 1}


class TestCertificates:
    def test_scene_certificate(self):
        c = scene_certificate(build_scene(W3))
        assert (c.m, c.slope, c.intercept) == (3, 4, 4)
        assert c.w(10) == 44

    def test_compose(self):
        c = scene_certificate(build_scene(W3))
        cc = compose_certificates([c, c])
        assert (cc.m, cc.slope, cc.intercept) == (6, 8, 8)
        assert compose_certificates([c]) == c
        with pytest.raises(ValueError):
            compose_certificates([])

    def test_linear_growth_beats_any_word(self):
        # sublinear witness: word length grows linearly while the index is free
        c = scene_certificate(build_scene(W3))
        assert all(c.w(n + 1) - c.w(n) == c.slope for n in range(10))
