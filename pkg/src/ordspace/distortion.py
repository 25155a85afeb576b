"""Nested shift scenes and the commutator trick for strong distortion.

A scene consists of a seed interval Z together with two shifts: sigma pushes
Z along the omega-indexed family of inner blocks filling the first outer
block, and tau pushes the whole inner column along the outer blocks.  Both
shifts are zig-zags (block 1 -> block 2, even-indexed blocks slide up,
odd-indexed blocks slide down) so that they are genuine homeomorphisms
while still satisfying sigma^n(Z) ∩ sigma^m(Z) = ∅ for distinct n, m ≥ 0
with the translates ascending to the column limit.

Any sequence of maps g_0, ..., g_M supported in Z can then be packed into a
single truncated product gamma_M whose conjugate factors live on the
pairwise-disjoint translates tau^n(sigma^m(Z)), and each g_n is recovered
(up to a defect at the window edge) as the commutator [gamma_M^{tau^n},
sigma], a word of length exactly 4n+4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ordinal import Ordinal, ZERO, ONE, add, left_subtract, omega_power, omega_term
from .space import Space, ClopenInterval, Column
from .region import RAtom, intersect_atoms
from .homeo import (
    Homeo,
    LadderAtom,
    atom_src_region,
    atom_dst_region,
    compose,
    compose_all,
    from_rules,
    identity,
    invert,
    to_rules,
)


class SceneError(ValueError):
    """The space cannot host the nested shift construction."""


@dataclass(frozen=True)
class Scene:
    space: Space
    Z: ClopenInterval
    sigma: Homeo
    tau: Homeo
    inner_column: Column
    outer_column: Column


def _zigzag_doc(space: Space, base: Ordinal, period: Ordinal) -> dict:
    """Rules for the zig-zag shift along the blocks (base+p(n-1), base+pn]."""
    col = {
        "exceptional": [],
        "base": str(base),
        "period": str(period),
        "limit": str(add(base, omega_power(add(period.leading_exp, ONE)))),
    }
    first = ClopenInterval(base, add(base, period))
    second = ClopenInterval(add(base, period), add(base, omega_term(period.leading_exp, 2)))
    return {
        "space": str(space.gamma),
        "singles": [{"src": str(first), "dst": str(second)}],
        "ladders": [
            {"col_src": col, "col_dst": col, "start": 2, "residue": 0, "stride": 2, "shift": 2},
            {"col_src": col, "col_dst": col, "start": 3, "residue": 1, "stride": 2, "shift": -2},
        ],
    }


def build_scene(space: Space) -> Scene:
    """The standard two-level shift scene in the bottom w^3 of the space."""
    if space.gamma.leading_exp < Ordinal.from_int(3):
        raise SceneError(
            f"[0, {space.gamma}] is too small to nest two shift levels"
        )
    w, w2, w3 = omega_power(1), omega_power(2), omega_power(3)
    sigma = from_rules(_zigzag_doc(space, ZERO, w))
    tau = from_rules(_zigzag_doc(space, ZERO, w2))
    return Scene(
        space=space,
        Z=ClopenInterval(ZERO, w),
        sigma=sigma,
        tau=tau,
        inner_column=Column(1, (), ZERO, w, w2),
        outer_column=Column(1, (), ZERO, w2, w3),
    )


# --------------------------------------------------------------------------
# Scene validation
# --------------------------------------------------------------------------


def _image_block_index(col: Column, h: Homeo, i: int, horizon: int) -> int | None:
    """Index of the column block that h sends block i onto, or None."""
    top = h.eval(col.block(i).hi)
    for n in range(1, horizon + 1):
        if col.block(n).hi == top:
            return n
    return None


def _ladder_moves_up(a: LadderAtom) -> bool:
    """Whether the ladder carries every member strictly upward.

    With equal stripe periods the displacement between a member and its image
    is constant across the family, so comparing the first pair suffices.
    The class offsets cannot be compared directly: stripes are stored in
    normalized form, which rebases the start index and can zero the nominal
    shift of a genuinely ascending ladder.
    """
    n = a.src.indices_from(1)
    return a.dst.member(n + a.shift).hi > a.src.member(n).hi


def _orbit_check(col: Column, h: Homeo, start: int, label: str) -> list[str]:
    """Closed-form check that the h-orbit of block ``start`` consists of
    pairwise distinct blocks escaping to the column limit.

    The orbit is followed block-to-block; once the index enters a ladder
    class shifted upward by a fixed stride, the remaining translates form an
    arithmetic progression, which is injective and eventually leaves every
    clopen neighborhood of the limit.
    """
    errs: list[str] = []
    ladder_up = [
        a for a in h.atoms if isinstance(a, LadderAtom) and _ladder_moves_up(a)
    ]
    horizon = 64
    seen = {start}
    i = start
    for _ in range(horizon):
        for a in ladder_up:
            n = a.src.locate(col.block(i).hi)
            if n is not None:
                return errs  # arithmetic tail: distinct and escaping
        j = _image_block_index(col, h, i, horizon)
        if j is None:
            errs.append(f"{label}: block {i} is not carried onto a block")
            return errs
        if j in seen:
            errs.append(
                f"{label}: translates are not pairwise disjoint "
                f"(block {j} is revisited)"
            )
            return errs
        seen.add(j)
        i = j
    errs.append(f"{label}: the translates do not ascend to the column limit")
    return errs


def _support_within(h: Homeo, region: ClopenInterval) -> bool:
    return all(_piece_inside(p, region) for p in h.support_atoms())


def _piece_inside(piece: RAtom, region: ClopenInterval) -> bool:
    inter = intersect_atoms(piece, region)
    return len(inter) == 1 and inter[0] == piece


def validate_scene(sc: Scene) -> list[str]:
    """Exact checks of the nesting hypotheses; empty list means valid."""
    errs: list[str] = []
    if sc.sigma.eval(sc.Z.hi) == sc.Z.hi and sc.Z.hi == sc.inner_column.block(1).hi:
        errs.append("sigma translates are not pairwise disjoint (Z is fixed)")
    else:
        errs += _orbit_check(sc.inner_column, sc.sigma, 1, "sigma")
    outer_first = sc.outer_column.block(1)
    if not _support_within(sc.sigma, outer_first):
        errs.append(
            f"sigma is not supported inside the first outer block {outer_first}"
        )
    if sc.tau.eval(outer_first.hi) == outer_first.hi:
        errs.append("tau translates of supp(sigma) are not pairwise disjoint")
    else:
        errs += _orbit_check(sc.outer_column, sc.tau, 1, "tau")
    if not _piece_inside(sc.Z, sc.inner_column.block(1)):
        errs.append("Z is not the first inner block")
    return errs


# --------------------------------------------------------------------------
# Truncated infinite product
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedProduct:
    M: int
    gs: tuple[Homeo, ...]
    gamma_M: Homeo


def _bounding(h: Homeo) -> tuple[Ordinal, Ordinal]:
    los, his = [], []
    for a in h.atoms:
        for r in (atom_src_region(a), atom_dst_region(a)):
            if isinstance(r, ClopenInterval):
                los.append(ZERO if r.lo is None else r.lo)
                his.append(r.hi)
            else:  # pragma: no cover - factors are interval-supported
                raise SceneError("unexpected non-interval support")
    return min(los), max(his)


def gamma_truncated(sc: Scene, gs: list[Homeo], M: int) -> TruncatedProduct:
    """The finite window of the infinite conjugated product.

    Factor (n, m) is g_n conjugated to live on tau^n(sigma^m(Z)); the
    supports are pairwise disjoint, so the product is assembled directly.
    """
    if M < 1:
        raise SceneError("window must be positive")
    if len(gs) > M + 1:
        raise SceneError(f"{len(gs)} maps do not fit in a window of {M + 1}")
    for g in gs:
        if not _support_within(g, sc.Z):
            raise SceneError(f"a factor is not supported in Z = {sc.Z}")
    atoms = []
    boxes = []
    sig_pows = [identity(sc.space)]
    tau_pows = [identity(sc.space)]
    for _ in range(M):
        sig_pows.append(compose(sc.sigma, sig_pows[-1]))
        tau_pows.append(compose(sc.tau, tau_pows[-1]))
    for n, g in enumerate(gs):
        if g.is_identity():
            continue
        for m in range(M + 1):
            c = compose(tau_pows[n], sig_pows[m])
            factor = compose(compose(c, g), invert(c))
            atoms.extend(factor.atoms)
            boxes.append(_bounding(factor))
    boxes.sort()
    for (lo1, hi1), (lo2, hi2) in zip(boxes, boxes[1:]):
        if lo2 < hi1:
            raise SceneError("conjugated factors overlap")
    return TruncatedProduct(M=M, gs=tuple(gs), gamma_M=Homeo(sc.space, tuple(atoms)))


# --------------------------------------------------------------------------
# Commutator words
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SceneLetter:
    name: str  # "gamma" | "tau" | "sigma"
    sign: int = 1


@dataclass(frozen=True)
class SceneWord:
    letters: tuple[SceneLetter, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def compose(self, sc: Scene, gamma: Homeo) -> Homeo:
        table = {"gamma": gamma, "tau": sc.tau, "sigma": sc.sigma}
        maps = [
            table[l.name] if l.sign > 0 else invert(table[l.name])
            for l in self.letters
        ]
        return compose_all(maps, sc.space)


def commutator_word(sc: Scene, n: int) -> SceneWord:
    """[gamma^{tau^n}, sigma] spelled out: length is exactly 4n+4."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    conj = [SceneLetter("tau", -1)] * n + [SceneLetter("gamma", 1)] + [SceneLetter("tau", 1)] * n
    conj_inv = [SceneLetter("tau", -1)] * n + [SceneLetter("gamma", -1)] + [SceneLetter("tau", 1)] * n
    letters = conj + [SceneLetter("sigma", 1)] + conj_inv + [SceneLetter("sigma", -1)]
    return SceneWord(tuple(letters))


# --------------------------------------------------------------------------
# Agreement reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AgreementReport:
    n: int
    M: int
    word_length: int
    agreements: tuple[tuple[int, bool], ...]  # (translate index m, agrees)
    defects: tuple[str, ...]
    ok: bool
    commutator: "Homeo | None" = field(compare=False, default=None)


def _translate_interval(sc: Scene, m: int) -> ClopenInterval:
    """sigma^m(Z) for m of either sign."""
    h = sc.sigma if m >= 0 else invert(sc.sigma)
    top = sc.Z.hi
    for _ in range(abs(m)):
        top = h.eval(top)
    col = sc.inner_column
    off = left_subtract(col.base, top) if top > col.base else top
    i = off.coeff_of(col.period.leading_exp)
    blk = col.block(i)
    assert blk.hi == top
    return blk


def check_identity(sc: Scene, tp: TruncatedProduct, n: int) -> AgreementReport:
    """Compare the commutator word (with gamma_M) against g_n.

    Agreement is required on Z and on every translate sigma^m(Z) with
    |m| <= M - n - 1; defects may only live on the extreme translates.
    """
    if n > tp.M:
        raise ValueError(f"n = {n} exceeds the window M = {tp.M}")
    g_n = tp.gs[n] if n < len(tp.gs) else identity(sc.space)
    word = commutator_word(sc, n)
    value = word.compose(sc, tp.gamma_M)
    diff = compose(invert(g_n), value)
    defect_pieces = diff.support_atoms()
    safe = tp.M - n - 1
    agreements = []
    all_ok = True
    for m in range(-safe, safe + 1):
        T = _translate_interval(sc, m)
        agrees = all(not intersect_atoms(p, T) for p in defect_pieces)
        agreements.append((m, agrees))
        all_ok = all_ok and agrees
    return AgreementReport(
        n=n,
        M=tp.M,
        word_length=len(word),
        agreements=tuple(agreements),
        defects=tuple(str(p) for p in defect_pieces),
        ok=all_ok,
        commutator=value,
    )


def report_json(rep: AgreementReport) -> dict:
    return {
        "n": rep.n,
        "window": rep.M,
        "word_length": rep.word_length,
        "agreements": [{"translate": m, "agrees": a} for m, a in rep.agreements],
        "defects": list(rep.defects),
        "ok": rep.ok,
    }


def scene_json(sc: Scene) -> dict:
    return {
        "space": str(sc.space.gamma),
        "Z": str(sc.Z),
        "sigma": to_rules(sc.sigma),
        "tau": to_rules(sc.tau),
    }


# --------------------------------------------------------------------------
# Distortion certificates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionCertificate:
    """m generators suffice to spell the n-th element in a*n + b letters."""

    m: int
    slope: int
    intercept: int

    def __post_init__(self):
        if self.m < 1 or self.slope < 0 or self.intercept < 0:
            raise ValueError("certificate parameters must be nonnegative, m >= 1")

    def w(self, n: int) -> int:
        return self.slope * n + self.intercept


def scene_certificate(sc: Scene) -> DistortionCertificate:
    """The commutator witness: 3 generators, words of length 4n+4."""
    return DistortionCertificate(m=3, slope=4, intercept=4)


def compose_certificates(
    certs: list[DistortionCertificate],
) -> DistortionCertificate:
    if not certs:
        raise ValueError("no certificates to compose")
    return DistortionCertificate(
        m=sum(c.m for c in certs),
        slope=sum(c.slope for c in certs),
        intercept=sum(c.intercept for c in certs),
    )
