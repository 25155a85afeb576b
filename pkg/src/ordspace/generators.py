"""Generating data for the group of accumulation-point-fixing homeomorphisms.

Given a block system over [0, gamma] with columns Omega_1, ..., Omega_d, the
group G of homeomorphisms fixing every column accumulation point mu_k is
generated by the subgroup U of maps stabilizing each chunk together with a
finite set F of block shifts: for each pair j < k an "even" shift e_{j,k}
carrying block A_{j,2} across to A_{k,2} while sliding the even-indexed
blocks of both columns to make room, and an "odd" shift o_{j,k} doing the
same for A_{j,1} -> A_{k,1}.  Column swaps provide coset representatives for
G inside the full homeomorphism group.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ordinal import Ordinal, ZERO, add, omega_term
from .space import ClopenInterval, BlockSystem, point_level
from .region import Pt, RAtom, intersect_atoms
from .homeo import (
    Homeo,
    SingleAtom,
    LadderAtom,
    PointAtom,
    atom_src_region,
    canonical_rules,
    compose,
    from_rules,
    identity,
    invert,
    to_rules,
    transport_piece,
)


def _check_index(B: BlockSystem, k: int) -> None:
    if not 1 <= k <= B.degree:
        raise ValueError(f"column index {k} out of range 1..{B.degree}")


def _check_pair(B: BlockSystem, j: int, k: int) -> None:
    _check_index(B, j)
    _check_index(B, k)
    if not j < k:
        raise ValueError(f"need j < k, got j={j}, k={k}")


def column_doc(B: BlockSystem, k: int) -> dict:
    """The rule-file column description of column k."""
    col = B.columns[k - 1]
    return {
        "exceptional": [str(b) for b in col.exceptional],
        "base": str(col.base),
        "period": str(col.period),
        "limit": str(col.limit),
    }


def _shift_doc(B: BlockSystem, j: int, k: int, first: int) -> dict:
    """Shared construction for the even (first=2) and odd (first=1) shifts.

    Column k's blocks of index first, first+2, ... slide up by two to open
    the slot at index ``first``; A_{j,first} crosses over to fill it; column
    j's blocks of index first+2, first+4, ... slide down to close the gap.
    """
    bj = B.columns[j - 1].block(first)
    bk = B.columns[k - 1].block(first)
    residue = first % 2
    return {
        "space": str(B.space.gamma),
        "singles": [{"src": str(s), "dst": str(d)} for s, d in canonical_rules(bj, bk)],
        "ladders": [
            {
                "col_src": column_doc(B, k),
                "col_dst": column_doc(B, k),
                "start": first,
                "residue": residue,
                "stride": 2,
                "shift": 2,
            },
            {
                "col_src": column_doc(B, j),
                "col_dst": column_doc(B, j),
                "start": first + 2,
                "residue": residue,
                "stride": 2,
                "shift": -2,
            },
        ],
    }


def make_shift_e(B: BlockSystem, j: int, k: int) -> Homeo:
    """The even block shift e_{j,k}: A_{j,2} -> A_{k,2}, even blocks slide."""
    _check_pair(B, j, k)
    return from_rules(_shift_doc(B, j, k, 2))


def make_shift_o(B: BlockSystem, j: int, k: int) -> Homeo:
    """The odd block shift o_{j,k}: A_{j,1} -> A_{k,1}, odd blocks slide."""
    _check_pair(B, j, k)
    return from_rules(_shift_doc(B, j, k, 1))


def column_swap(B: BlockSystem, j: int, k: int) -> Homeo:
    """Exchange the chunks Omega_j and Omega_k, sending mu_j <-> mu_k."""
    if j == k:
        raise ValueError("column_swap needs two distinct columns")
    _check_index(B, j)
    _check_index(B, k)
    cj, ck = B.chunk(j), B.chunk(k)
    rules = canonical_rules(cj, ck) + canonical_rules(ck, cj)
    return Homeo(B.space, tuple(SingleAtom(s, d) for s, d in rules))


# --------------------------------------------------------------------------
# Chunk crossings
# --------------------------------------------------------------------------


def crossing_pieces(B: BlockSystem, g: Homeo, j: int, k: int) -> list[RAtom]:
    """The pieces of Omega_j that g carries into Omega_k (j != k).

    Returned pieces live on the source side; together they cover exactly
    {x in Omega_j : g(x) in Omega_k}.
    """
    cj, ck = B.chunk(j), B.chunk(k)
    out: list[RAtom] = []
    for a in g.atoms:
        if isinstance(a, PointAtom):
            if cj.contains(a.src) and ck.contains(a.dst):
                out.append(Pt(a.src))
            continue
        for p in intersect_atoms(atom_src_region(a), cj):
            for _, img in transport_piece(a, p, True):
                for r in intersect_atoms(img, ck):
                    out.extend(s for s, _ in transport_piece(a, r, False))
    return out


def is_in_U(B: BlockSystem, h: Homeo) -> bool:
    """True iff h stabilizes every chunk Omega_k setwise."""
    d = B.degree
    for j in range(1, d + 1):
        for k in range(1, d + 1):
            if j != k and crossing_pieces(B, h, j, k):
                return False
    return True


def is_in_G(B: BlockSystem, h: Homeo) -> bool:
    """True iff h fixes every accumulation point mu_k."""
    return all(h.eval(B.mu(k)) == B.mu(k) for k in range(1, B.degree + 1))


# --------------------------------------------------------------------------
# Spans and finite rearrangements
# --------------------------------------------------------------------------


def level_span(q: Ordinal, beta: Ordinal) -> ClopenInterval:
    """(q - w^beta, q]: the basic clopen neighborhood of a level-beta point."""
    if q.is_zero or q.last_exp != beta:
        raise ValueError(f"{q} is not a level-{beta} point above 0")
    exp, coeff = q.terms[-1]
    rest = q.terms[:-1] + (((exp, coeff - 1),) if coeff > 1 else ())
    return ClopenInterval(Ordinal(rest), q)


def grid_span(block: ClopenInterval, beta: Ordinal, i: int) -> ClopenInterval:
    """The i-th length-w^beta span of a block, counted from its bottom cut."""
    if i < 1:
        raise ValueError(f"grid index must be >= 1, got {i}")
    base = ZERO if block.lo is None else block.lo
    lo = base if i == 1 else add(base, omega_term(beta, i - 1))
    hi = add(base, omega_term(beta, i))
    if hi > block.hi:
        raise ValueError(f"span {i} at level {beta} does not fit inside {block}")
    return ClopenInterval(lo, hi)


def span_swap(space, pairs: list[tuple[ClopenInterval, ClopenInterval]]) -> Homeo:
    """The involution exchanging src and dst of every pair, identity elsewhere.

    All intervals involved (across all non-trivial pairs) must be pairwise
    disjoint and each pair order-isomorphic.
    """
    live = [(s, d) for s, d in pairs if s != d]
    pieces = [iv for pair in live for iv in pair]
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if pieces[i].intersect(pieces[j]) is not None:
                raise ValueError(f"swap pieces {pieces[i]} and {pieces[j]} overlap")
    atoms = []
    for s, d in live:
        atoms.append(SingleAtom(s, d))
        atoms.append(SingleAtom(d, s))
    return Homeo(space, tuple(atoms))


def finite_rearrangement(
    B: BlockSystem, k: int, moves: list[tuple[Ordinal, int]]
) -> Homeo:
    """A homeomorphism supported in Omega_k moving each listed point into
    its designated block of column k.

    Level-alpha points travel by whole-block swaps; lower-level points by
    swapping their basic span with a free grid span of the target block.
    """
    _check_index(B, k)
    col = B.columns[k - 1]
    chunk = B.chunk(k)
    targets: dict[Ordinal, int] = {}
    for p, t in moves:
        if not chunk.contains(p) or p == B.mu(k):
            raise ValueError(f"{p} is not a movable point of chunk {k}")
        if t < 1:
            raise ValueError(f"bad target block index {t}")
        if p in targets and targets[p] != t:
            raise ValueError(f"conflicting targets for {p}: {targets[p]} and {t}")
        targets[p] = t
    h = identity(B.space)
    for p, t in targets.items():
        cur = h.eval(p)
        tb = col.block(t)
        if tb.contains(cur):
            continue
        beta = point_level(B.space, cur)
        if beta == B.alpha:
            _, n = B.locate(cur)
            sb = col.block(n)
            g = Homeo(
                B.space,
                tuple(
                    SingleAtom(s, d)
                    for s, d in canonical_rules(sb, tb) + canonical_rules(tb, sb)
                ),
            )
        else:
            src = level_span(cur, beta)
            busy = [level_span(h.eval(q), point_level(B.space, h.eval(q)))
                    for q in targets if h.eval(q) != cur] + [src]
            i = 1
            while any(grid_span(tb, beta, i).intersect(b) is not None for b in busy):
                i += 1
            g = span_swap(B.space, [(src, grid_span(tb, beta, i))])
        h = compose(g, h)
    for p, t in targets.items():
        if not col.block(t).contains(h.eval(p)):
            raise ValueError(
                f"conflicting targets: moving {p} into block {t} undoes an earlier move"
            )
    return h


# --------------------------------------------------------------------------
# The generator set
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSet:
    """The shift set F and coset representatives over a block system."""

    system: BlockSystem
    e_maps: dict[tuple[int, int], Homeo]
    o_maps: dict[tuple[int, int], Homeo]
    coset_reps: dict[tuple[int, int], Homeo]

    def shift(self, kind: str, j: int, k: int) -> Homeo:
        table = self.e_maps if kind == "e" else self.o_maps
        return table[(j, k)]


def build_generators(B: BlockSystem) -> GeneratorSet:
    e_maps = {}
    o_maps = {}
    swaps = {}
    for j in range(1, B.degree + 1):
        for k in range(j + 1, B.degree + 1):
            e_maps[(j, k)] = make_shift_e(B, j, k)
            o_maps[(j, k)] = make_shift_o(B, j, k)
            swaps[(j, k)] = column_swap(B, j, k)
    return GeneratorSet(system=B, e_maps=e_maps, o_maps=o_maps, coset_reps=swaps)


def generator_manifest(gs: GeneratorSet) -> dict:
    """A serialisable listing of F (shifts and their inverses) by name."""
    rules = {}
    for (j, k), h in sorted(gs.e_maps.items()):
        rules[f"e_{j}_{k}"] = to_rules(h)
        rules[f"e_{j}_{k}_inv"] = to_rules(invert(h))
    for (j, k), h in sorted(gs.o_maps.items()):
        rules[f"o_{j}_{k}"] = to_rules(h)
        rules[f"o_{j}_{k}_inv"] = to_rules(invert(h))
    return {
        "space": str(gs.system.space.gamma),
        "names": sorted(rules),
        "rules": rules,
    }
