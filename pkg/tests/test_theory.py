import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import FIXTURES, C, T, corpus
from explind.session import Session
from explind.theory import BudgetExhausted, Lemma, ShapeViolation
from strategies import nat_terms


def test_nat_destructor_equations(nat):
    assert nat.evaluate(T(nat, "(p 0)")) == T(nat, "0")
    assert nat.evaluate(T(nat, "(p (s (s 0)))")) == T(nat, "(s 0)")
    assert nat.is_destructor("p")


def test_bool_has_no_destructors(nat):
    assert [c.name for c in nat.ctors_of["bool"]] == ["true", "false"]
    assert not any(f.destructor_of and f.symbol.argsorts == ("bool",) for f in nat.functions.values())


def test_list_destructors_with_defaults(natlist):
    ev = lambda s: natlist.evaluate(T(natlist, s))  # noqa: E731
    assert ev("(car nil)") == T(natlist, "0")
    assert ev("(cdr nil)") == T(natlist, "nil")
    assert ev("(car (cns (s 0) nil))") == T(natlist, "(s 0)")
    assert ev("(cdr (cns 0 (cns (s 0) nil)))") == T(natlist, "(cns (s 0) nil)")


def test_plus_admitted_with_one_template(nat):
    f = nat.functions["+"]
    assert f.style == "constructor" and f.recursive
    assert [sorted(t.measured) for t in f.templates] == [[1]]


def test_destructor_ack_admitted_lexicographic(natd):
    (tpl,) = natd.functions["ack"].templates
    assert sorted(tpl.measured) == [1, 2]
    assert tpl.relation.kind == "lexicographic"


def _run(path):
    s = Session()
    return s, s.load_file(path)


def test_russell_rejected():
    _, r = _run(os.path.join(FIXTURES, "russell.thy"))
    last = r.results[-1]
    assert last.event.name == "russell" and last.status == "rejected"
    assert "russell" in last.detail


def test_partial_dlonce_needs_waiver():
    _, r = _run(os.path.join(FIXTURES, "dlonce-total.thy"))
    assert r.results[-1].status == "rejected"
    s, r = _run(corpus("list-base.thy"))
    assert r.ok
    f = s.theory.functions["dlonce"]
    assert f.partial
    # termination still holds, so the structural template is kept
    assert [sorted(t.measured) for t in f.templates] == [[2]]


def test_partial_evaluation_is_stuck_not_junk(natlist):
    t = T(natlist, "(dlonce (s 0) (cns 0 nil))")
    got = natlist.evaluate(t)
    assert got == T(natlist, "(cns 0 (dlonce (s 0) nil))")


@pytest.mark.parametrize(
    "src, want",
    [
        ("(+ (s 0) (s (s 0)))", "(s (s (s 0)))"),
        ("(less 0 (s 0))", "true"),
        ("(ack (s (s 0)) (s (s 0)))", "(s (s (s (s (s (s (s 0)))))))"),
    ],
)
def test_evaluate_examples(nat, src, want):
    assert nat.evaluate(T(nat, src)) == T(nat, want)


def test_ack_against_stack_oracle(nat):
    for x in range(3):
        for y in range(4):
            t = nat.app("ack", oracles.to_term(nat, "nat", x), oracles.to_term(nat, "nat", y))
            assert oracles.value(nat.evaluate(t)) == oracles.ack(x, y)


def test_eval_budget(nat):
    t = T(nat, "(ack (s (s (s 0))) (s (s (s 0))))")
    with pytest.raises(BudgetExhausted):
        nat.evaluate(t, budget=50)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_evaluator_deterministic_and_matches_reference(nat, data):
    t = data.draw(nat_terms(nat, 4, ground=True))
    a = nat.evaluate(t)
    assert nat.evaluate(t) == a
    assert oracles.value(a) == oracles.value(t)


def test_less_succ_proved_by_one_induction(session):
    s = session("nat-constructor.thy")
    r = s.load_text("(defthm less-succ (less x (s x)) :tags (rewrite))")
    (res,) = r.results
    assert res.status == "proved" and res.inductions == 1
    assert s.theory.rewrite_rules


def test_elimination_lemma_shape(session):
    s = session("nat-constructor.thy")
    r = s.load_text("(defthm s1p (implies (and (/= xx 0) (= x (p xx))) (= (s x) xx)) :tags (elimination))")
    assert r.ok
    assert any(e.name == "s1p" for e in s.theory.elim_lemmas)
    bad = C(s.theory, "(implies (and (/= xx 0) (= xx (p x))) (= (s x) xx))")
    with pytest.raises(ShapeViolation):
        s.theory.add_lemma(Lemma("bad", bad, frozenset({"elimination"})), "assume")


def test_unknown_tag_rejected(nat):
    with pytest.raises(ShapeViolation):
        nat.add_lemma(Lemma("t", C(nat, "(less x (s x))"), frozenset({"bogus"})), "assume")
