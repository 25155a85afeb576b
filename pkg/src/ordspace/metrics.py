"""Word-norm bookkeeping and pseudo-metric audits.

Two constructions from the metric side of the theory:

* chain pseudo-metrics rho(g, h) = min{n : h^-1 g in H_n} over an increasing
  chain of subgroups (optionally with the n^2 schedule), and
* the Lipschitz audit: for a left-invariant pseudo-metric rho and a word
  g = s_1 ... s_k, the triangle inequality forces
  rho(1, g) <= K * k with K = max_i rho(1, s_i).  The audit realizes this
  bound on concrete samples and reports any violation.

word_norm_upper turns a factorization into an upper bound for the word norm
over the generating set (block-supported maps, shifts, column swaps).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .space import BlockSystem, ClopenInterval
from .region import subtract_atoms
from .homeo import Homeo, compose, compose_all, equals, identity, invert
from .generators import GeneratorSet
from .factorization import factorize, reduce_to_G


class MetricError(ValueError):
    pass


class UndefinedDistance(MetricError):
    """The pair falls outside the pseudo-metric's domain."""


def word_norm_upper(B: BlockSystem, gs: GeneratorSet, g: Homeo) -> int:
    """Upper bound for the word norm of g via the factorization pipeline."""
    if g.is_identity():
        return 0
    swaps, h = reduce_to_G(B, g)
    cert = factorize(B, gs, h)
    return len(swaps) + len(cert.word.letters)


# --------------------------------------------------------------------------
# Chain pseudo-metrics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PseudoMetricOracle:
    """A named pseudo-metric evaluator rho: (g, h) -> nonnegative integer.

    The evaluator must be symmetric, satisfy the triangle inequality, and be
    left-invariant on its domain; it raises UndefinedDistance outside it.
    """

    name: str
    domain: str
    evaluator: Callable[[Homeo, Homeo], int]

    def __call__(self, g: Homeo, h: Homeo) -> int:
        return self.evaluator(g, h)


MembershipOracle = Callable[[Homeo], bool]


def chain_metric(
    chain: Sequence[MembershipOracle], squared: bool = False, name: str = "chain"
) -> PseudoMetricOracle:
    """rho(g, h) = min{n : h^-1 g in H_n} for an increasing subgroup chain.

    Read literally the formula gives rho(g, g) = 1 (the identity already
    lies in H_1); we impose rho(g, g) = 0 so rho is a genuine pseudo-metric.
    With ``squared`` the schedule is n^2 instead of n.  Pairs whose quotient
    lies outside the union of the chain raise UndefinedDistance.
    """
    chain = list(chain)
    if not chain:
        raise MetricError("empty chain")

    def rho(g: Homeo, h: Homeo) -> int:
        diff = compose(invert(h), g)
        if diff.is_identity():
            return 0
        for n, member in enumerate(chain, start=1):
            if member(diff):
                return n * n if squared else n
        raise UndefinedDistance(
            f"element outside the union of the {len(chain)}-term chain"
        )

    label = name + ("-squared" if squared else "")
    return PseudoMetricOracle(
        name=label,
        domain=f"union of a {len(chain)}-term subgroup chain",
        evaluator=rho,
    )


def _supported_in(h: Homeo, region: ClopenInterval) -> bool:
    for piece in h.support_atoms():
        rest, removed = subtract_atoms(piece, region)
        if rest or removed:
            return False
    return True


def block_support_chain(B: BlockSystem, depth: int, column: int = 1) -> list[MembershipOracle]:
    """H_n = maps supported in the first n blocks of one column.

    The blocks are contiguous from the bottom of the chunk, so H_n is the
    subgroup supported in the clopen interval up to the n-th block top.
    """
    col = B.columns[column - 1]
    chunk = B.chunk(column)
    oracles: list[MembershipOracle] = []
    for n in range(1, depth + 1):
        top = col.block(n).hi
        region = ClopenInterval(chunk.lo, top)

        def member(h: Homeo, region=region) -> bool:
            return _supported_in(h, region)

        oracles.append(member)
    return oracles


# --------------------------------------------------------------------------
# Lipschitz audit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    K: int
    samples: tuple[tuple[int, int], ...]  # (word length, rho(1, g))
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _invariance_precheck(
    oracle: PseudoMetricOracle, one: Homeo, pool: list[Homeo]
) -> None:
    """Sampled sanity checks before trusting the oracle's values."""
    probes = pool[:4] or [one]
    for g in probes:
        if oracle(g, g) != 0:
            raise MetricError(f"{oracle.name}: rho(g, g) != 0")
    for g in probes:
        for h in probes:
            try:
                d = oracle(g, h)
                if d != oracle(h, g):
                    raise MetricError(f"{oracle.name}: not symmetric")
                for f in probes[:2]:
                    if oracle(compose(f, g), compose(f, h)) != d:
                        raise MetricError(f"{oracle.name}: not left-invariant")
            except UndefinedDistance:
                continue


def lipschitz_audit(
    oracle: PseudoMetricOracle, samples: Sequence[tuple[Homeo, Sequence[Homeo]]]
) -> AuditReport:
    """Check rho(1, g) <= K * |word| for each sample (g, word).

    K is the maximum letter cost rho(1, s) over all letters appearing in the
    samples.  A sample whose word does not compose to its element, or whose
    element lies outside the oracle's domain, is reported as a violation.
    """
    if not samples:
        return AuditReport(K=0, samples=(), violations=())
    space = samples[0][0].space
    one = identity(space)

    letters: list[Homeo] = []
    for _, word in samples:
        letters.extend(word)
    _invariance_precheck(oracle, one, letters)

    K = 0
    bad_letters: set[int] = set()
    violations: list[str] = []
    for i, (_, word) in enumerate(samples):
        for s in word:
            try:
                K = max(K, oracle(one, s))
            except UndefinedDistance:
                bad_letters.add(i)
    for i in sorted(bad_letters):
        violations.append(f"sample {i}: a letter lies outside the oracle's domain")

    rows: list[tuple[int, int]] = []
    for i, (g, word) in enumerate(samples):
        if i in bad_letters:
            continue
        if not equals(compose_all(list(word), space) if word else one, g):
            violations.append(f"sample {i}: word does not compose to the element")
            continue
        try:
            d = oracle(one, g)
        except UndefinedDistance as e:
            violations.append(f"sample {i}: undefined ({e})")
            continue
        rows.append((len(word), d))
        if d > K * len(word):
            violations.append(
                f"sample {i}: rho(1, g) = {d} > K*|word| = {K * len(word)}"
            )
    return AuditReport(K=K, samples=tuple(rows), violations=tuple(violations))


def audit_json(rep: AuditReport) -> dict:
    return {
        "K": rep.K,
        "samples": [{"word_length": n, "rho": d} for n, d in rep.samples],
        "violations": list(rep.violations),
        "ok": rep.ok,
    }
