import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import C, T
from explind.terms import (
    InvalidPosition,
    apply_subst,
    format_position,
    match,
    occurrences,
    perm_smaller,
    subterm_at,
    variables,
)
from strategies import nat_terms


def test_subterm_at_examples(nat):
    c = C(nat, "(less y (ack x y))")
    assert subterm_at(c, (1, 1, 2)) == T(nat, "(ack x y)")
    c = C(nat, "(= x 0)")
    assert subterm_at(c, (1, 1)) == T(nat, "x", "nat")
    with pytest.raises(InvalidPosition):
        subterm_at(c, (2,))


def test_match_examples(nat):
    assert match(T(nat, "(less (s x) (s y))"), T(nat, "(less (s 0) (s (s 0)))")) == {
        T(nat, "x", "nat"): T(nat, "0"),
        T(nat, "y", "nat"): T(nat, "(s 0)"),
    }
    assert match(T(nat, "(s x)"), T(nat, "0")) is None
    theta = match(T(nat, "(ack x y)"), T(nat, "(ack (p x') (s 0))"))
    assert theta == {T(nat, "x", "nat"): T(nat, "(p x')"), T(nat, "y", "nat"): T(nat, "(s 0)")}


def test_match_is_not_unification(nat):
    assert match(T(nat, "(+ x x)"), T(nat, "(+ 0 (s 0))")) is None
    assert match(T(nat, "(+ 0 y)"), T(nat, "(+ x y)")) is None


def test_apply_subst_examples(nat):
    x, y = T(nat, "x", "nat"), T(nat, "y", "nat")
    assert apply_subst(T(nat, "(+ x y)"), {x: T(nat, "(s 0)")}) == T(nat, "(+ (s 0) y)")
    assert apply_subst(x, {}) == x
    got = apply_subst(T(nat, "(ack x y)"), {x: T(nat, "(s x')"), y: T(nat, "(s y')")})
    assert got == T(nat, "(ack (s x') (s y'))")


def test_occurrences_examples(nat):
    assert occurrences(T(nat, "z", "nat"), C(nat, "(= x 0)")) == set()
    got = occurrences(T(nat, "x", "nat"), C(nat, "(or (= x 0) (less x y))"))
    assert {format_position(p) for p in got} == {"1.1", "2.1.1"}


def test_occurrences_of_common_subterm(nat):
    c = C(nat, "(implies (and (less y' (ack (s x') y')) (less (ack (s x') y') (ack x' (ack (s x') y')))) "
               "(less (s y') (ack x' (ack (s x') y'))))")
    occ = occurrences(T(nat, "(ack (s x') y')"), c)
    assert len(occ) == 4


def test_perm_smaller_examples(nat):
    t = T(nat, "(+ x y)")
    assert not perm_smaller(t, t)
    assert perm_smaller(T(nat, "0"), T(nat, "(s 0)"))


def _ground(nat, depth):
    out = list(nat.ground_terms("nat", depth))
    for a, b in itertools.product(out, repeat=2):
        out.append(nat.app("+", a, b))
    return out


def test_perm_smaller_is_strict_total_order(nat):
    ts = _ground(nat, 3)
    for a, b in itertools.product(ts, repeat=2):
        if a == b:
            assert not perm_smaller(a, b)
        else:
            assert perm_smaller(a, b) != perm_smaller(b, a)
    for a, b, c in itertools.product(ts[:12], repeat=3):
        if perm_smaller(a, b) and perm_smaller(b, c):
            assert perm_smaller(a, c)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_match_round_trip(nat, data):
    t = data.draw(nat_terms(nat, 4))
    theta = {v: data.draw(nat_terms(nat, 3)) for v in variables(t)}
    got = match(t, apply_subst(t, theta))
    assert got is not None
    assert {v: got[v] for v in variables(t)} == theta
    assert apply_subst(t, got) == apply_subst(t, theta)
