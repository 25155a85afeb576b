"""Acceptance gate: one test per headline guarantee, one PASS/FAIL line each.

Each test prints a single summary line so a log scrape shows the verdicts;
the asserts carry the same conditions.
"""

import itertools
import random
import time

import pytest

from ordspace.ordinal import Ordinal, ZERO, ONE, add, left_subtract, omega_term, parse_ordinal as P
from ordspace.space import (
    BlockSystemError,
    ClopenInterval,
    Space,
    block_system,
    interval_invariants,
    space_invariants,
)
from ordspace.homeo import (
    IntervalMismatch,
    canonical_homeo,
    canonical_rules,
    compose,
    compose_all,
    equals,
    from_rules,
    identity,
    invert,
    to_rules,
    validate_atoms,
    SingleAtom,
)
from ordspace.generators import build_generators, column_swap, span_swap
from ordspace.factorization import (
    FactorizationError,
    certificate_json,
    factorize,
    reduce_to_G,
    verify_certificate,
)
from ordspace.distortion import build_scene, check_identity, gamma_truncated
from ordspace.metrics import block_support_chain, chain_metric, lipschitz_audit

from oracles import (
    from_triple,
    oracle_add,
    oracle_left_subtract,
    oracle_rank_degree,
    to_triple,
)
from test_factorization import random_word_element


def verdict(number, ok, detail):
    line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def random_point(rng, gamma):
    """A uniform-ish random point of [0, gamma] built term by term."""
    while True:
        terms = []
        e = gamma.leading_exp
        exps = list(range(e.as_int() + 1)) if e.is_finite else [0, 1, 2]
        rng.shuffle(exps)
        for k in sorted(exps[: rng.randint(1, 3)], reverse=True):
            terms.append(omega_term(k, rng.randint(1, 4)))
        x = ZERO
        for t in terms:
            x = add(x, t)
        if x <= gamma:
            return x


def test_criterion_1_ordinal_oracle():
    start = time.time()
    coeffs = range(6)
    triples = list(itertools.product(coeffs, coeffs, coeffs))
    checked = 0
    for t1 in triples:
        x = from_triple(t1)
        for t2 in triples:
            y = from_triple(t2)
            assert to_triple(add(x, y)) == oracle_add(t1, t2)
            want = oracle_left_subtract(t1, t2)
            if want is None:
                with pytest.raises(ValueError):
                    left_subtract(x, y)
            else:
                assert to_triple(left_subtract(x, y)) == want
            checked += 1
    elapsed = time.time() - start
    verdict(
        1,
        checked == len(triples) ** 2 and elapsed < 30,
        f"add/left-subtract match the brute-force oracle on {checked} pairs "
        f"below w^3 in {elapsed:.1f}s",
    )


def test_criterion_2_cb_invariants():
    rng = random.Random(2024)
    ok = True
    for _ in range(200):
        terms = sorted(rng.sample(range(6), rng.randint(1, 3)), reverse=True)
        gamma = ZERO
        for e in terms:
            gamma = add(gamma, omega_term(e, rng.randint(1, 6)))
        if gamma.is_zero:
            gamma = ONE
        inv = space_invariants(Space(gamma))
        rank, degree = oracle_rank_degree(add(gamma, ONE))
        ok = ok and inv.rank.as_int() == rank and inv.degree == degree
    for g in (1, 2, 3):
        eta = add(omega_term(g, 2), ONE)
        inv = space_invariants(Space(eta))
        ok = ok and inv.rank.as_int() == g + 1 and inv.degree == 2
    verdict(
        2,
        ok,
        "rank/degree agree with the derivative-iteration oracle on 200 random "
        "spaces below w^w and on the eta = w^g*2+1 instances (g = 1, 2, 3)",
    )


def _random_rule_map(space, columns, rng):
    """A validated rule map: a few primitive moves, rule-refined."""
    maps = []
    for _ in range(rng.randint(1, 3)):
        kind = rng.choice(["pairswap", "blockswap", "pointswap"])
        cd = rng.choice(columns)
        if kind == "pairswap":
            doc = {
                "space": str(space.gamma),
                "singles": [],
                "ladders": [
                    {"col_src": cd, "col_dst": cd, "start": 1, "residue": 1,
                     "stride": 2, "shift": 1},
                    {"col_src": cd, "col_dst": cd, "start": 2, "residue": 0,
                     "stride": 2, "shift": -1},
                ],
            }
            maps.append(from_rules(doc))
        elif kind == "blockswap":
            base, pe = P(cd["base"]), P(cd["period"]).leading_exp
            m, n = rng.sample(range(1, 7), 2)
            blocks = [
                ClopenInterval(add(base, omega_term(pe, i - 1)) if (i > 1 or not base.is_zero) else None,
                               add(base, omega_term(pe, i)))
                for i in (m, n)
            ]
            if blocks[0].lo is None:
                blocks[0] = ClopenInterval(base if not base.is_zero else P("0"), blocks[0].hi)
            maps.append(span_swap(space, [tuple(blocks)]))
        else:
            a = rng.randint(1, 8)
            b = rng.randint(9, 16)
            maps.append(
                span_swap(
                    space,
                    [(ClopenInterval(P(str(a - 1)), P(str(a))),
                      ClopenInterval(P(str(b - 1)), P(str(b))))],
                )
            )
    h = compose_all(maps, space)
    return from_rules(to_rules(h))  # rule-refine: parse our own serialization


def test_criterion_3_group_axioms():
    start = time.time()
    cases = {
        "w^2*2": [
            {"exceptional": [], "base": "0", "period": "w", "limit": "w^2"},
            {"exceptional": [], "base": "w^2", "period": "w", "limit": "w^2*2"},
        ],
        "w^3*2+w*3": [
            {"exceptional": [], "base": "0", "period": "w", "limit": "w^2"},
            {"exceptional": [], "base": "0", "period": "w^2", "limit": "w^3"},
            {"exceptional": [], "base": "w^3", "period": "w^2", "limit": "w^3*2"},
        ],
    }
    rng = random.Random(7)
    ok = True
    for text, columns in cases.items():
        space = Space.parse(text)
        maps = [_random_rule_map(space, columns, rng) for _ in range(100)]
        one = identity(space)
        for i in range(0, 100, 2):
            f, g = maps[i], maps[i + 1]
            h = maps[(i * 7 + 3) % 100]
            ok = ok and equals(compose(compose(f, g), h), compose(f, compose(g, h)))
            ok = ok and equals(compose(f, one), f) and equals(compose(one, f), f)
            ok = ok and compose(f, invert(f)).is_identity()
            fg = compose(f, g)
            for _ in range(100):
                x = random_point(rng, space.gamma)
                ok = ok and fg.eval(x) == f.eval(g.eval(x))
    elapsed = time.time() - start
    verdict(
        3,
        ok and elapsed < 60,
        f"associativity/identity/inverse + pointwise composition law on 200 "
        f"random rule maps over two spaces in {elapsed:.1f}s",
    )


def _random_interval(rng, gamma):
    while True:
        hi = random_point(rng, gamma)
        if hi.is_zero:
            continue
        if rng.random() < 0.25:
            return ClopenInterval(None, hi)
        lo = random_point(rng, gamma)
        if lo < hi:
            return ClopenInterval(lo, hi)


def test_criterion_4_canonicalization():
    rng = random.Random(41)
    space = Space.parse("w^3")
    matched = 0
    mismatched = 0
    ok = True
    while matched < 100 or mismatched < 20:
        src, dst = _random_interval(rng, space.gamma), _random_interval(rng, space.gamma)
        a, b = interval_invariants(src), interval_invariants(dst)
        same = (a.rank, a.degree) == (b.rank, b.degree)
        if same and a.otype.is_finite and src.is_bottom != dst.is_bottom:
            continue  # a bottom-closed finite piece has one more point
        if same:
            matched += 1
            h = canonical_homeo(space, src, dst)
            rules = canonical_rules(src, dst)
            ok = ok and len(rules) <= 4 and len(h.atoms) <= 4
            if src.intersect(dst) is None:
                back = canonical_rules(dst, src)
                atoms = [SingleAtom(s, d) for s, d in rules + back if s != d]
                ok = ok and validate_atoms(space, atoms) == []
        elif mismatched < 20:
            mismatched += 1
            try:
                canonical_homeo(space, src, dst)
                ok = False
            except IntervalMismatch:
                pass
    verdict(
        4,
        ok,
        f"canonical maps used <= 4 rules and validated on {matched} matched "
        f"pairs; {mismatched} mismatched pairs rejected",
    )


def test_criterion_5_factorization():
    rng = random.Random(55)
    ok = True
    worst = 0.0
    for text in ("w^2*2", "w^2*3", "w^3*2+w^2*2", "w^2*2+w+5"):
        B = block_system(Space.parse(text))
        gs = build_generators(B)
        for _ in range(25):
            g = random_word_element(B, gs, rng, rng.randint(0, 20))
            g = from_rules(to_rules(g))  # hide the construction
            start = time.time()
            cert = factorize(B, gs, g)
            worst = max(worst, time.time() - start)
            ok = ok and equals(cert.word.compose(gs, B.space), g)
            for log in cert.pair_logs:
                ok = ok and log.length <= log.bound
                lam = log.lam_sequence
                ok = ok and all(b < a for a, b in zip(lam[1:], lam[2:]))
    verdict(
        5,
        ok and worst < 1.0,
        f"100 random words of length <= 20 refactored exactly, within the "
        f"4M+1+|O|+|I| bound, lambda strictly descending; worst {worst:.2f}s",
    )


def test_criterion_6_commutator_certificate():
    rng = random.Random(66)
    space = Space.parse("w^3")
    sc = build_scene(space)
    inputs = []
    for _ in range(8):
        a, b = sorted(rng.sample(range(1, 20), 2))
        inputs.append(
            span_swap(
                space,
                [(ClopenInterval(P(str(a - 1)), P(str(a))),
                  ClopenInterval(P(str(b - 1)), P(str(b))))],
            )
        )
    points = [random_point(rng, space.gamma) for _ in range(50)]
    ok = True
    values = {}
    for M in (8, 12, 16):
        tp = gamma_truncated(sc, inputs, M)
        rows = []
        for n in range(9):
            rep = check_identity(sc, tp, n)
            ok = ok and rep.ok and rep.word_length == 4 * n + 4
            rows.append(tuple(rep.commutator.eval(x) for x in points))
        values[M] = tuple(rows)
    ok = ok and values[8] == values[12] == values[16]
    verdict(
        6,
        ok,
        "commutator words of length 4n+4 recover each input on the safe "
        "window for n <= 8, with values at 50 points identical across "
        "windows M = 8, 12, 16",
    )


def test_criterion_7_lipschitz_audit():
    rng = random.Random(77)
    B = block_system(Space.parse("w^2*2"))
    letters = []
    for i in range(1, 5):
        blk = B.columns[0].block(i)
        lo = blk.lo if blk.lo is not None else ZERO
        cut = add(lo, ONE)
        letters.append(
            span_swap(B.space, [(ClopenInterval(lo, cut) if not lo.is_zero
                                 else ClopenInterval(P("0"), cut),
                                 ClopenInterval(cut, add(cut, ONE)))])
        )
    samples = []
    for _ in range(500):
        word = [rng.choice(letters) for _ in range(rng.randint(1, 6))]
        samples.append((compose_all(word, B.space), word))
    ok = True
    for squared in (False, True):
        rho = chain_metric(block_support_chain(B, 8), squared=squared)
        rep = lipschitz_audit(rho, samples)
        ok = ok and rep.ok and rep.K == (16 if squared else 4)
    verdict(
        7,
        ok,
        "zero violations of rho(1,g) <= K*|word| on 500 samples for the "
        "linear and squared chain metrics",
    )


def test_criterion_8_negative_gates():
    ok = True
    # spaces whose limit capacity is a limit, or whose tail breaks the blocks
    for bad in ("w^(w)", "w^(w)*2+w", "w^3*2+w*3"):
        try:
            block_system(Space.parse(bad))
            ok = False
        except BlockSystemError:
            pass
    # non-G elements are rejected until reduced
    B = block_system(Space.parse("w^2*2"))
    gs = build_generators(B)
    sw = column_swap(B, 1, 2)
    try:
        factorize(B, gs, sw)
        ok = False
    except FactorizationError:
        pass
    letters, g = reduce_to_G(B, sw)
    cert = factorize(B, gs, g)  # now fine
    ok = ok and letters and g.is_identity()
    # corrupted certificates fail verification
    e = gs.shift("e", 1, 2)
    doc = certificate_json(factorize(B, gs, e))
    ok = ok and verify_certificate(B, gs, doc, e)
    doc["letters"][0]["sign"] = -doc["letters"][0]["sign"]
    ok = ok and not verify_certificate(B, gs, doc, e)
    verdict(
        8,
        bool(ok),
        "bad spaces rejected by block_system; mu-moving elements rejected by "
        "factorize until reduced; corrupted certificates fail verification",
    )
