import itertools

import pytest
from hypothesis import given, strategies as st

from ordspace.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    OrdinalSyntaxError,
    add,
    left_subtract,
    omega_power,
    omega_term,
    parse_ordinal,
)

from oracles import from_triple, oracle_add, oracle_left_subtract, to_triple


triples = st.tuples(
    st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)
)


def test_parse_examples():
    x = parse_ordinal("w^2*3 + w*5 + 4")
    assert str(x) == "w^2*3 + w*5 + 4"
    assert x.terms == (
        (Ordinal.from_int(2), 3),
        (ONE, 5),
        (ZERO, 4),
    )


def test_parse_normalizes():
    assert parse_ordinal("1 + w") == OMEGA
    assert parse_ordinal("w + w") == omega_term(1, 2)
    assert parse_ordinal("w*2 + w^2") == omega_power(2)


def test_parse_round_trip():
    for text in ["0", "1", "w", "w^2", "w^2*3 + w*5 + 4", "w^(w)", "w^(w + 1)*2 + 1"]:
        assert str(parse_ordinal(text)) == text


def test_parse_error_offset():
    with pytest.raises(OrdinalSyntaxError) as exc:
        parse_ordinal("w^")
    assert exc.value.pos == 2
    with pytest.raises(OrdinalSyntaxError):
        parse_ordinal("w^2*")
    with pytest.raises(OrdinalSyntaxError):
        parse_ordinal("w +")
    with pytest.raises(OrdinalSyntaxError):
        parse_ordinal("2 3")


def test_classify():
    assert ZERO.classify() == "zero"
    assert parse_ordinal("17").classify() == "successor"
    assert parse_ordinal("w*2 + 1").classify() == "successor"
    assert OMEGA.classify() == "limit"
    assert parse_ordinal("w^2 + w").classify() == "limit"


def test_predecessor():
    assert parse_ordinal("w + 1").predecessor() == OMEGA
    assert parse_ordinal("5").predecessor() == Ordinal.from_int(4)
    with pytest.raises(ValueError):
        OMEGA.predecessor()


def test_add_absorption():
    assert add(ONE, OMEGA) == OMEGA
    assert add(OMEGA, ONE) == parse_ordinal("w + 1")
    assert add(parse_ordinal("w*3 + 2"), parse_ordinal("w^2")) == omega_power(2)


def test_left_subtract_basic():
    assert left_subtract(OMEGA, parse_ordinal("w*2 + 3")) == parse_ordinal("w + 3")
    assert left_subtract(ZERO, OMEGA) == OMEGA
    assert left_subtract(OMEGA, OMEGA) == ZERO
    with pytest.raises(ValueError):
        left_subtract(parse_ordinal("w + 1"), OMEGA)


def test_comparison_total_order():
    vals = [
        ZERO, ONE, Ordinal.from_int(7), OMEGA, parse_ordinal("w + 1"),
        parse_ordinal("w*2"), omega_power(2), parse_ordinal("w^2 + w*3 + 1"),
        parse_ordinal("w^(w)"),
    ]
    for i, a in enumerate(vals):
        for j, b in enumerate(vals):
            assert (a < b) == (i < j)
            assert (a == b) == (i == j)


@given(triples, triples)
def test_add_matches_oracle(x, y):
    got = add(from_triple(x), from_triple(y))
    assert to_triple(got) == oracle_add(x, y)


@given(triples, triples)
def test_left_subtract_matches_oracle(x, y):
    a, b = from_triple(x), from_triple(y)
    expected = oracle_left_subtract(x, y)
    if expected is None:
        with pytest.raises(ValueError):
            left_subtract(a, b)
    else:
        assert to_triple(left_subtract(a, b)) == expected
        # defining property: a + (b - a) == b
        assert add(a, left_subtract(a, b)) == b


@given(triples, triples)
def test_add_is_associative_with_third(x, y):
    a, b = from_triple(x), from_triple(y)
    c = omega_term(1, 2)
    assert add(add(a, b), c) == add(a, add(b, c))


def test_exhaustive_small_pairs():
    small = [from_triple(t) for t in itertools.product(range(3), repeat=3)]
    for a in small:
        for b in small:
            s = add(a, b)
            assert to_triple(s) == oracle_add(to_triple(a), to_triple(b))
            if a <= b:
                assert add(a, left_subtract(a, b)) == b


def test_int_interop():
    assert OMEGA + 1 == parse_ordinal("w + 1")
    assert 1 + OMEGA == OMEGA
    assert Ordinal.from_int(3) == 3
    assert parse_ordinal("w").coeff_of(ONE) == 1
    assert parse_ordinal("w^2*5 + 3").coeff_of(omega_power(1)) == 0
