"""HTTP service exposing the classification / homeo / factorization toolkit.

Thin wrapper: every endpoint parses its request into core objects, calls the
library, and returns the same JSON payloads the command line emits.  The
report-building functions are plain dict-in/dict-out so the CLI can share
them without going through HTTP.
"""

from __future__ import annotations

import random

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .ordinal import add, parse_ordinal
from .space import (
    BlockSystemError,
    ClopenInterval,
    Space,
    block_system,
    space_invariants,
)
from .homeo import (
    RuleMapError,
    compose,
    compose_all,
    equals,
    from_rules,
    identity,
    invert,
    to_rules,
)
from .generators import build_generators, is_in_G, span_swap
from .factorization import (
    FactorizationError,
    certificate_json,
    factorize,
    letter_json,
    reduce_to_G,
    verify_certificate,
)
from .distortion import (
    SceneError,
    build_scene,
    check_identity,
    gamma_truncated,
    report_json,
    scene_json,
    validate_scene,
)
from .metrics import (
    MetricError,
    audit_json,
    block_support_chain,
    chain_metric,
    lipschitz_audit,
)


class InputError(ValueError):
    """Unparseable or inconsistent request data (CLI exit code 2)."""


class CheckFailure(ValueError):
    """Well-formed input whose requested check fails (CLI exit code 1)."""


def _space(text: str) -> Space:
    try:
        return Space.parse(text)
    except ValueError as e:
        raise InputError(f"bad space: {e}") from e


def _homeo(doc: dict) -> "Homeo":
    try:
        return from_rules(doc)
    except RuleMapError as e:
        raise InputError(f"bad rule file: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad rule file: {e}") from e


# --------------------------------------------------------------------------
# Report builders (shared with the CLI)
# --------------------------------------------------------------------------


def classify_report(space_text: str) -> dict:
    sp = _space(space_text)
    inv = space_invariants(sp)
    hypothesis = not inv.limit_capacity.is_zero and inv.limit_capacity.classify() == "successor"
    out = {
        "space": str(sp.gamma),
        "rank": str(inv.rank),
        "degree": inv.degree,
        "limit_capacity": str(inv.limit_capacity),
        "hypothesis_ok": hypothesis,
        "block_system": None,
    }
    if hypothesis:
        try:
            B = block_system(sp)
        except BlockSystemError as e:
            out["hypothesis_ok"] = False
            out["block_system_error"] = str(e)
            return out
        out["block_system"] = {
            "alpha": str(B.alpha),
            "degree": B.degree,
            "column_tops": [str(B.mu(k)) for k in range(1, B.degree + 1)],
        }
    return out


def homeo_check_report(doc: dict) -> dict:
    try:
        h = from_rules(doc)
    except RuleMapError as e:
        return {"valid": False, "errors": list(e.violations)}
    except (KeyError, TypeError, ValueError) as e:
        return {"valid": False, "errors": [str(e)]}
    return {"valid": True, "atoms": len(h.atoms), "identity": h.is_identity()}


def homeo_eval_report(doc: dict, point: str) -> dict:
    h = _homeo(doc)
    try:
        x = parse_ordinal(point)
    except ValueError as e:
        raise InputError(f"bad point: {e}") from e
    if x > h.space.gamma:
        raise InputError(f"{x} lies outside [0, {h.space.gamma}]")
    return {"point": str(x), "value": str(h.eval(x))}


def homeo_compose_report(docs: list[dict]) -> dict:
    if not docs:
        raise InputError("nothing to compose")
    maps = [_homeo(d) for d in docs]
    sp = maps[0].space
    if any(m.space.gamma != sp.gamma for m in maps):
        raise InputError("maps live on different spaces")
    return {"rules": to_rules(compose_all(maps, sp))}


def homeo_invert_report(doc: dict) -> dict:
    return {"rules": to_rules(invert(_homeo(doc)))}


def homeo_equal_report(first: dict, second: dict) -> dict:
    f, g = _homeo(first), _homeo(second)
    if f.space.gamma != g.space.gamma:
        raise InputError("maps live on different spaces")
    return {"equal": equals(f, g)}


def factorize_report(
    doc: dict,
    verify: bool = False,
    reduce: bool = False,
    certificate: dict | None = None,
) -> dict:
    g = _homeo(doc)
    try:
        B = block_system(g.space)
    except BlockSystemError as e:
        raise InputError(str(e)) from e
    gs = build_generators(B)

    if certificate is not None:
        ok = verify_certificate(B, gs, certificate, g)
        if not ok:
            raise CheckFailure("certificate does not verify against the element")
        return {"verified": True}

    reduction = []
    target = g
    if not is_in_G(B, target):
        if not reduce:
            raise CheckFailure(
                "element permutes the column tops; rerun with reduction enabled"
            )
        swaps, target = reduce_to_G(B, g)
        reduction = [letter_json(l) for l in swaps]
    try:
        cert = factorize(B, gs, target)
    except FactorizationError as e:
        raise CheckFailure(str(e)) from e
    out = {"reduction": reduction, "certificate": certificate_json(cert)}
    if verify:
        ok = verify_certificate(B, gs, out["certificate"], target)
        if not ok:
            raise CheckFailure("round-trip verification failed")
        out["verified"] = True
    return out


def _random_seed_maps(sp: Space, rng: random.Random, count: int) -> list:
    """Maps supported in (0, w]: products of disjoint finite-point swaps."""
    maps = []
    for _ in range(count):
        pts = rng.sample(range(1, 25), rng.choice([2, 4, 6]))
        pts.sort()
        pairs = []
        for a, b in zip(pts[::2], pts[1::2]):
            pairs.append(
                (
                    ClopenInterval(parse_ordinal(str(a - 1)), parse_ordinal(str(a))),
                    ClopenInterval(parse_ordinal(str(b - 1)), parse_ordinal(str(b))),
                )
            )
        maps.append(span_swap(sp, pairs))
    return maps


def distortion_report(space_text: str, n: int, window: int, seed: int) -> dict:
    sp = _space(space_text)
    if n < 0 or window < 1:
        raise InputError("need n >= 0 and window >= 1")
    if n > window:
        raise InputError(f"n = {n} exceeds the window M = {window}")
    try:
        sc = build_scene(sp)
    except SceneError as e:
        raise InputError(str(e)) from e
    problems = validate_scene(sc)
    if problems:
        raise InputError("; ".join(problems))
    rng = random.Random(seed)
    gs = _random_seed_maps(sp, rng, min(n, window) + 1)
    tp = gamma_truncated(sc, gs, window)
    reports = [report_json(check_identity(sc, tp, i)) for i in range(n + 1)]
    return {
        "scene": scene_json(sc),
        "window": window,
        "seed": seed,
        "reports": reports,
        "ok": all(r["ok"] for r in reports),
    }


def audit_report(
    space_text: str,
    depth: int = 8,
    squared: bool = False,
    seed: int = 0,
    count: int = 50,
    samples: list[list[dict]] | None = None,
) -> dict:
    sp = _space(space_text)
    try:
        B = block_system(sp)
    except BlockSystemError as e:
        raise InputError(str(e)) from e
    if depth < 1:
        raise InputError("chain depth must be >= 1")
    rho = chain_metric(block_support_chain(B, depth), squared=squared)

    if samples is not None:
        pairs = []
        for word_docs in samples:
            word = [_homeo(d) for d in word_docs]
            g = compose_all(word, sp) if word else identity(sp)
            pairs.append((g, word))
    else:
        rng = random.Random(seed)
        letters = []
        col = B.columns[0]
        for i in range(1, min(depth, 4) + 1):
            blk = col.block(i)
            lo = blk.lo if blk.lo is not None else parse_ordinal("0")
            a = ClopenInterval(lo, add(lo, parse_ordinal("1")))
            b = ClopenInterval(add(lo, parse_ordinal("1")), add(lo, parse_ordinal("2")))
            letters.append(span_swap(sp, [(a, b)]))
        pairs = []
        for _ in range(count):
            word = [rng.choice(letters) for _ in range(rng.randint(1, 6))]
            pairs.append((compose_all(word, sp), word))

    try:
        rep = lipschitz_audit(rho, pairs)
    except MetricError as e:
        raise InputError(str(e)) from e
    out = audit_json(rep)
    out["metric"] = rho.name
    return out


# --------------------------------------------------------------------------
# FastAPI wiring
# --------------------------------------------------------------------------


class ClassifyRequest(BaseModel):
    space: str


class RulesRequest(BaseModel):
    rules: dict


class EvalRequest(BaseModel):
    rules: dict
    point: str


class ComposeRequest(BaseModel):
    rules: list[dict]


class EqualRequest(BaseModel):
    first: dict
    second: dict


class FactorizeRequest(BaseModel):
    rules: dict
    verify: bool = False
    reduce: bool = False
    certificate: dict | None = None


class DistortionRequest(BaseModel):
    space: str
    n: int = Field(default=2, ge=0)
    window: int = Field(default=4, ge=1)
    seed: int = 0


class AuditRequest(BaseModel):
    space: str
    depth: int = 8
    squared: bool = False
    seed: int = 0
    count: int = 50
    samples: list[list[dict]] | None = None


app = FastAPI(title="ordspace", description="Homeomorphism toolkit for ordinal spaces")


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InputError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except CheckFailure as e:
        raise HTTPException(status_code=409, detail=str(e))


@app.post("/classify")
def classify_endpoint(req: ClassifyRequest) -> dict:
    return _run(classify_report, req.space)


@app.post("/homeo/check")
def homeo_check_endpoint(req: RulesRequest) -> dict:
    return _run(homeo_check_report, req.rules)


@app.post("/homeo/eval")
def homeo_eval_endpoint(req: EvalRequest) -> dict:
    return _run(homeo_eval_report, req.rules, req.point)


@app.post("/homeo/compose")
def homeo_compose_endpoint(req: ComposeRequest) -> dict:
    return _run(homeo_compose_report, req.rules)


@app.post("/homeo/invert")
def homeo_invert_endpoint(req: RulesRequest) -> dict:
    return _run(homeo_invert_report, req.rules)


@app.post("/homeo/equal")
def homeo_equal_endpoint(req: EqualRequest) -> dict:
    return _run(homeo_equal_report, req.first, req.second)


@app.post("/factorize")
def factorize_endpoint(req: FactorizeRequest) -> dict:
    return _run(
        factorize_report,
        req.rules,
        verify=req.verify,
        reduce=req.reduce,
        certificate=req.certificate,
    )


@app.post("/distortion")
def distortion_endpoint(req: DistortionRequest) -> dict:
    return _run(distortion_report, req.space, req.n, req.window, req.seed)


@app.post("/audit")
def audit_endpoint(req: AuditRequest) -> dict:
    return _run(
        audit_report,
        req.space,
        depth=req.depth,
        squared=req.squared,
        seed=req.seed,
        count=req.count,
        samples=req.samples,
    )
