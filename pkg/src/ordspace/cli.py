"""Command-line interface: classification, homeo algebra, factorization,
distortion demos, and metric audits, all emitting JSON on stdout.

Exit codes: 0 success, 1 a requested check failed, 2 bad input.
"""

from __future__ import annotations

import json
import sys

import click

from .service import (
    CheckFailure,
    InputError,
    audit_report,
    classify_report,
    distortion_report,
    factorize_report,
    homeo_check_report,
    homeo_compose_report,
    homeo_equal_report,
    homeo_eval_report,
    homeo_invert_report,
)


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _load(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        click.echo(f"error: cannot read {path}: {e}", err=True)
        sys.exit(2)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InputError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    except CheckFailure as e:
        click.echo(f"check failed: {e}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Homeomorphism toolkit for compact ordinal spaces."""


@main.command()
@click.argument("space")
def classify(space):
    """Rank, degree, and block-system summary of [0, SPACE]."""
    _emit(_guard(classify_report, space))


@main.group()
def homeo():
    """Operate on rule-file presentations of homeomorphisms."""


@homeo.command()
@click.argument("rules", type=click.Path(exists=True))
def check(rules):
    """Validate a rule file."""
    out = homeo_check_report(_load(rules))
    _emit(out)
    if not out["valid"]:
        sys.exit(2)


@homeo.command("eval")
@click.argument("rules", type=click.Path(exists=True))
@click.argument("point")
def eval_cmd(rules, point):
    """Evaluate the map at an ordinal point."""
    _emit(_guard(homeo_eval_report, _load(rules), point))


@homeo.command()
@click.argument("rules", type=click.Path(exists=True), nargs=-1, required=True)
def compose(rules):
    """Compose rule files (the last file is applied first)."""
    _emit(_guard(homeo_compose_report, [_load(r) for r in rules]))


@homeo.command()
@click.argument("rules", type=click.Path(exists=True))
def invert(rules):
    """Invert a rule file."""
    _emit(_guard(homeo_invert_report, _load(rules)))


@homeo.command()
@click.argument("first", type=click.Path(exists=True))
@click.argument("second", type=click.Path(exists=True))
def equal(first, second):
    """Semantic equality of two rule files (exit 1 when different)."""
    out = _guard(homeo_equal_report, _load(first), _load(second))
    _emit(out)
    if not out["equal"]:
        sys.exit(1)


@main.command()
@click.argument("rules", type=click.Path(exists=True))
@click.option("--verify", is_flag=True, help="Recompose the word and check it.")
@click.option("--reduce", "reduce_", is_flag=True, help="Allow column-top permutations.")
@click.option(
    "--certificate",
    type=click.Path(exists=True),
    default=None,
    help="Verify an existing certificate instead of producing one.",
)
def factorize(rules, verify, reduce_, certificate):
    """Factor a homeomorphism over the block-supported generating set."""
    cert = _load(certificate) if certificate else None
    _emit(
        _guard(
            factorize_report,
            _load(rules),
            verify=verify,
            reduce=reduce_,
            certificate=cert,
        )
    )


@main.command()
@click.option("--space", required=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--window", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def distortion(space, n, window, seed):
    """Commutator-recovery demo: check [gamma_M^{tau^n}, sigma] against g_n."""
    out = _guard(distortion_report, space, n, window, seed)
    _emit(out)
    if not out["ok"]:
        sys.exit(1)


@main.command()
@click.option("--space", required=True)
@click.option("--depth", type=int, default=8, show_default=True)
@click.option("--squared", is_flag=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=50, show_default=True)
@click.option(
    "--samples",
    type=click.Path(exists=True),
    default=None,
    help="JSON file with a list of words (each a list of rule docs).",
)
def audit(space, depth, squared, seed, count, samples):
    """Lipschitz audit of a chain pseudo-metric over block supports."""
    sample_words = _load(samples)["samples"] if samples else None
    out = _guard(
        audit_report,
        space,
        depth=depth,
        squared=squared,
        seed=seed,
        count=count,
        samples=sample_words,
    )
    _emit(out)
    if not out["ok"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
