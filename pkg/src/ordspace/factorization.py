"""Factoring an accumulation-point-fixing homeomorphism over U and the shifts.

The algorithm clears the chunk crossings of g pair by pair.  For a pair
j < k it first empties the level-alpha crossing sets with one block-packing
move and a burst of shift letters (clear_top), then repeatedly knocks down
the highest surviving crossing level with a four-letter move built from the
odd shift and a rearrangement of the two lowest k-column blocks
(clear_level).  Each step strictly decreases the crossing level, so the
loop terminates; what remains after all pairs is a chunk-stabilizing
element, the final U-letter of the word.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ordinal import Ordinal, ZERO, ONE, add
from .space import ClopenInterval, BlockSystem, Space, level_points, point_level
from .region import Pt, RAtom, Stripe
from .homeo import (
    Homeo,
    SingleAtom,
    compose,
    compose_all,
    equals,
    from_rules,
    identity,
    invert,
    region_rules,
    to_rules,
)
from .generators import (
    GeneratorSet,
    column_swap,
    crossing_pieces,
    grid_span,
    is_in_G,
    is_in_U,
    level_span,
    span_swap,
)


class FactorizationError(ValueError):
    """The input is outside the algorithm's domain."""


# --------------------------------------------------------------------------
# Letters and words
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Letter:
    """One generator: a shift e/o with a sign, a U-element, or a column swap."""

    kind: str  # "e" | "o" | "u" | "p"
    j: int = 0
    k: int = 0
    sign: int = 1
    element: Homeo | None = field(default=None, compare=False)

    def homeo(self, gs: GeneratorSet) -> Homeo:
        if self.kind in ("u",):
            assert self.element is not None
            return self.element
        if self.kind == "p":
            if self.element is not None:
                return self.element
            return column_swap(gs.system, self.j, self.k)
        h = gs.shift(self.kind, self.j, self.k)
        return h if self.sign > 0 else invert(h)

    def inverse(self) -> "Letter":
        inv_el = None if self.element is None else invert(self.element)
        if self.kind == "p":
            return Letter("p", self.j, self.k, self.sign, inv_el)
        if self.kind == "u":
            return Letter("u", element=inv_el)
        return Letter(self.kind, self.j, self.k, -self.sign, inv_el)


@dataclass(frozen=True)
class Word:
    """A product of letters; letters[0] is applied last (outermost factor)."""

    letters: tuple[Letter, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def compose(self, gs: GeneratorSet, space: Space) -> Homeo:
        return compose_all([l.homeo(gs) for l in self.letters], space)


# --------------------------------------------------------------------------
# Crossing sets and levels
# --------------------------------------------------------------------------

CrossSet = tuple[str, "list[Ordinal] | None"]  # ("finite", pts) | ("infinite", None)


def _piece_level_points(space: Space, piece: RAtom, beta: Ordinal) -> CrossSet:
    if isinstance(piece, Pt):
        hit = [piece.x] if point_level(space, piece.x) == beta else []
        return ("finite", hit)
    if isinstance(piece, Stripe):
        return ("infinite", None) if beta <= piece.period_exp else ("finite", [])
    return level_points(piece, beta)


def _require_in_G(B: BlockSystem, g: Homeo) -> None:
    if not is_in_G(B, g):
        raise FactorizationError(
            "the map moves a column accumulation point; reduce_to_G first"
        )


def cross_sets(
    B: BlockSystem, g: Homeo, j: int, k: int, beta: Ordinal
) -> tuple[CrossSet, CrossSet]:
    """(O, I): the level-beta points of Omega_j sent into Omega_k, and of
    Omega_k sent into Omega_j."""
    _require_in_G(B, g)
    out = []
    for a, b in ((j, k), (k, j)):
        pts: list[Ordinal] = []
        infinite = False
        for piece in crossing_pieces(B, g, a, b):
            kind, sub = _piece_level_points(B.space, piece, beta)
            if kind == "infinite":
                infinite = True
                break
            pts.extend(sub)  # type: ignore[arg-type]
        out.append(("infinite", None) if infinite else ("finite", sorted(pts)))
    return out[0], out[1]


def _piece_requirement(piece: RAtom) -> Ordinal:
    """The least beta at which the piece has finitely many level-beta points."""
    if isinstance(piece, Pt):
        return ZERO
    if isinstance(piece, Stripe):
        return add(piece.period_exp, ONE)
    delta = piece.length()
    return ZERO if delta.is_zero else delta.leading_exp


def _cross_pieces_both(B: BlockSystem, g: Homeo, j: int, k: int) -> list[RAtom]:
    return crossing_pieces(B, g, j, k) + crossing_pieces(B, g, k, j)


def lambda_level(B: BlockSystem, g: Homeo, j: int, k: int) -> Ordinal:
    """The least level at which both crossing sets of the pair are finite."""
    _require_in_G(B, g)
    pieces = _cross_pieces_both(B, g, j, k)
    return max((_piece_requirement(p) for p in pieces), default=ZERO)


# --------------------------------------------------------------------------
# Point-packing moves
# --------------------------------------------------------------------------


def _assign_slots(
    images: list[Ordinal], slots: list[ClopenInterval]
) -> list[tuple[ClopenInterval, ClopenInterval]]:
    """Pair each image point's span with a slot, keeping points already in
    place on their own slot so that sources and targets never half-overlap."""
    taken: dict[int, Ordinal] = {}
    for q in images:
        for i, s in enumerate(slots):
            if i not in taken and s.hi == q:
                taken[i] = q
                break
    free = [i for i in range(len(slots)) if i not in taken]
    rest = [q for q in images if q not in taken.values()]
    pairs = []
    for i, q in zip(free, rest):
        taken[i] = q
    for i, q in sorted(taken.items()):
        span = level_span(q, q.last_exp)
        pairs.append((span, slots[i]))
    return pairs


def _pack_points(
    B: BlockSystem, images: list[Ordinal], slots: list[ClopenInterval]
) -> Homeo:
    if not images:
        return identity(B.space)
    return span_swap(B.space, _assign_slots(images, slots))


def clear_top(
    B: BlockSystem, gs: GeneratorSet, g: Homeo, j: int, k: int
) -> tuple[list[Letter], Homeo]:
    """Empty the level-alpha crossing sets of the pair.

    Returns the letters applied (innermost first) and the updated map.
    """
    _require_in_G(B, g)
    if lambda_level(B, g, j, k) < B.alpha:
        return [], g
    (ok, O), (ik, I) = cross_sets(B, g, j, k, B.alpha)
    assert ok == "finite" and ik == "finite"
    O, I = O or [], I or []
    colj, colk = B.columns[j - 1], B.columns[k - 1]

    def top_span(col, n):
        blk = col.block(n)
        base = ZERO if blk.lo is None else blk.lo
        return level_span(add(base, B.columns[0].period), B.alpha)

    a = _pack_points(B, [g.eval(x) for x in O],
                     [top_span(colk, 2 * i) for i in range(1, len(O) + 1)])
    b = _pack_points(B, [g.eval(z) for z in I],
                     [top_span(colj, 2 * i - 1) for i in range(1, len(I) + 1)])
    ab = compose(a, b)
    e = gs.e_maps[(j, k)]
    o = gs.o_maps[(j, k)]
    cur = compose_all([o] * len(I) + [invert(e)] * len(O) + [ab, g], B.space)
    letters = [] if ab.is_identity() else [Letter("u", element=ab)]
    letters += [Letter("e", j, k, -1)] * len(O)
    letters += [Letter("o", j, k, +1)] * len(I)
    new_lam = lambda_level(B, cur, j, k)
    assert new_lam < B.alpha, f"crossing level failed to drop: {new_lam}"
    return letters, cur


def _minus(block: ClopenInterval, spans: list[ClopenInterval]) -> list[ClopenInterval]:
    pieces = [block]
    for s in spans:
        pieces = [q for p in pieces for q in p.subtract(s)]
    return pieces


def _free_grid_spans(
    block: ClopenInterval, beta: Ordinal, count: int, avoid: list[ClopenInterval]
) -> list[ClopenInterval]:
    out: list[ClopenInterval] = []
    i = 1
    while len(out) < count:
        s = grid_span(block, beta, i)
        if all(s.intersect(a) is None for a in avoid):
            out.append(s)
        i += 1
    return out


def clear_level(
    B: BlockSystem, gs: GeneratorSet, g: Homeo, j: int, k: int
) -> tuple[list[Letter], Homeo]:
    """One descent step: empty the crossing sets at the current level lam.

    Precondition: level-alpha crossings already cleared and some crossing
    remains.  Emits exactly four letters.
    """
    _require_in_G(B, g)
    lam = lambda_level(B, g, j, k)
    if lam >= B.alpha:
        raise FactorizationError("top level not cleared; run clear_top first")
    if not _cross_pieces_both(B, g, j, k):
        raise FactorizationError("no crossings left to clear")
    (ok, O), (ik, I) = cross_sets(B, g, j, k, lam)
    assert ok == "finite" and ik == "finite"
    O, I = O or [], I or []
    assert O or I, "crossing level has no witnesses"
    colj, colk = B.columns[j - 1], B.columns[k - 1]
    ak1, ak2, aj1 = colk.block(1), colk.block(2), colj.block(1)

    c = _pack_points(B, [g.eval(x) for x in O],
                     [grid_span(ak2, lam, i) for i in range(1, len(O) + 1)])
    d = _pack_points(B, [g.eval(z) for z in I],
                     [grid_span(aj1, lam, i) for i in range(1, len(I) + 1)])
    dc = compose(d, c)
    o = gs.o_maps[(j, k)]
    mid = compose_all([o, dc, g], B.space)

    o_spans = []
    for x in O:
        q = mid.eval(x)
        assert ak2.contains(q)
        o_spans.append(level_span(q, lam))
    i_spans = []
    for z in I:
        y = mid.eval(z)
        assert ak1.contains(y)
        i_spans.append(level_span(y, lam))
    i2_spans = _free_grid_spans(ak2, lam, len(I), avoid=o_spans)
    o1_spans = _free_grid_spans(ak1, lam, len(O), avoid=i_spans)

    atoms = [SingleAtom(s, t) for s, t in zip(i_spans, i2_spans)]
    atoms += [SingleAtom(s, t) for s, t in zip(o_spans, o1_spans)]
    atoms += [
        SingleAtom(s, t)
        for s, t in region_rules(_minus(ak1, i_spans), _minus(ak1, o1_spans))
    ]
    atoms += [
        SingleAtom(s, t)
        for s, t in region_rules(_minus(ak2, o_spans), _minus(ak2, i2_spans))
    ]
    h = Homeo(B.space, tuple(a for a in atoms if not a.is_identity()))

    cur = compose_all([invert(o), h, mid], B.space)
    letters = [
        Letter("u", element=dc),
        Letter("o", j, k, +1),
        Letter("u", element=h),
        Letter("o", j, k, -1),
    ]
    if _cross_pieces_both(B, cur, j, k):
        new_lam = lambda_level(B, cur, j, k)
        assert new_lam < lam, f"crossing level failed to drop: {new_lam} vs {lam}"
    return letters, cur


# --------------------------------------------------------------------------
# The full factorization
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PairLog:
    j: int
    k: int
    o_alpha: list[Ordinal]
    i_alpha: list[Ordinal]
    lam_sequence: list[Ordinal]
    steps: int  # M: number of clear_level iterations
    length: int  # letters emitted for this pair
    bound: int  # 4M + 1 + |O_alpha| + |I_alpha|


@dataclass(frozen=True)
class FactorizationCertificate:
    word: Word
    pair_logs: list[PairLog]
    residual_is_identity: bool


def factorize(B: BlockSystem, gs: GeneratorSet, g: Homeo) -> FactorizationCertificate:
    """Express g in G as a word over U, the shifts, and a final U-letter."""
    _require_in_G(B, g)
    applied: list[Letter] = []  # in application order (first applied first)
    cur = g
    logs: list[PairLog] = []
    for j in range(1, B.degree + 1):
        for k in range(j + 1, B.degree + 1):
            (_, O), (_, I) = cross_sets(B, cur, j, k, B.alpha)
            o_alpha, i_alpha = O or [], I or []
            lam_seq = [lambda_level(B, cur, j, k)]
            w0, cur = clear_top(B, gs, cur, j, k)
            pair_letters = list(w0)
            steps = 0
            while _cross_pieces_both(B, cur, j, k):
                lam_seq.append(lambda_level(B, cur, j, k))
                w1, cur = clear_level(B, gs, cur, j, k)
                pair_letters += w1
                steps += 1
            applied += pair_letters
            bound = 4 * steps + 1 + len(o_alpha) + len(i_alpha)
            assert len(pair_letters) <= bound
            # strict descent between clearing steps (the first entry repeats
            # when the top level was already clear)
            assert all(b < a for a, b in zip(lam_seq[1:], lam_seq[2:]))
            assert len(lam_seq) < 2 or lam_seq[1] <= lam_seq[0]
            logs.append(
                PairLog(j, k, o_alpha, i_alpha, lam_seq, steps,
                        len(pair_letters), bound)
            )
    assert is_in_U(B, cur), "residual map still crosses a chunk boundary"
    letters = [l.inverse() for l in applied]
    if not cur.is_identity():
        letters.append(Letter("u", element=cur))
    return FactorizationCertificate(
        word=Word(tuple(letters)),
        pair_logs=logs,
        residual_is_identity=cur.is_identity(),
    )


def reduce_to_G(B: BlockSystem, h: Homeo) -> tuple[list[Letter], Homeo]:
    """Split h as (product of column swaps) o g with g fixing every mu_k."""
    d = B.degree
    mus = [B.mu(k) for k in range(1, d + 1)]
    perm = []
    for m in mus:
        img = h.eval(m)
        if img not in mus:
            raise FactorizationError(
                f"{m} maps to {img}, which is not an accumulation point"
            )
        perm.append(mus.index(img))
    letters: list[Letter] = []
    maps: list[Homeo] = []
    cur = list(range(d))
    for pos in range(d):
        i = cur.index(perm[pos])
        if i != pos:
            sw = column_swap(B, pos + 1, i + 1)
            letters.append(Letter("p", pos + 1, i + 1, element=sw))
            maps.append(sw)
            cur[pos], cur[i] = cur[i], cur[pos]
    p = compose_all(maps, B.space) if maps else identity(B.space)
    g = compose(invert(p), h)
    assert is_in_G(B, g)
    return letters, g


# --------------------------------------------------------------------------
# Certificate serialisation and verification
# --------------------------------------------------------------------------


def letter_json(l: Letter) -> dict:
    if l.kind == "u":
        return {"kind": "u", "rules": to_rules(l.element)}
    doc = {"kind": l.kind, "j": l.j, "k": l.k}
    if l.kind != "p":
        doc["sign"] = l.sign
    return doc


def letter_from_json(gs: GeneratorSet, doc: dict) -> Letter:
    kind = doc["kind"]
    if kind == "u":
        return Letter("u", element=from_rules(doc["rules"]))
    if kind == "p":
        return Letter("p", doc["j"], doc["k"])
    return Letter(kind, doc["j"], doc["k"], doc.get("sign", 1))


def certificate_json(cert: FactorizationCertificate) -> dict:
    return {
        "letters": [letter_json(l) for l in cert.word.letters],
        "length": len(cert.word),
        "pairs": [
            {
                "j": log.j,
                "k": log.k,
                "O_alpha": [str(x) for x in log.o_alpha],
                "I_alpha": [str(x) for x in log.i_alpha],
                "lambda_sequence": [str(x) for x in log.lam_sequence],
                "M": log.steps,
                "length": log.length,
                "bound": log.bound,
            }
            for log in cert.pair_logs
        ],
        "residual_identity": cert.residual_is_identity,
    }


def verify_certificate(
    B: BlockSystem, gs: GeneratorSet, doc: dict, g: Homeo
) -> bool:
    """Recompose the exported word and check it equals g."""
    try:
        letters = [letter_from_json(gs, l) for l in doc["letters"]]
    except (KeyError, ValueError):
        return False
    for log in doc.get("pairs", []):
        if log["length"] > log["bound"]:
            return False
    word = Word(tuple(letters))
    return equals(word.compose(gs, B.space), g)
