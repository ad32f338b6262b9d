import itertools
import os

import pytest

import oracles
from conftest import HERE, T, corpus
from explind.cli import main
from explind.templates import descends, extract_description, validate_template
from explind.terms import apply_subst, match


def _desc(th, name):
    return [repr(tr) for tr in extract_description(th.functions[name])]


def test_description_plus(nat, natd):
    assert _desc(nat, "+") == ["<+(s(x), y), {+(x, y)}, {}>"]
    assert _desc(natd, "+") == ["<+(x, y), {+(p(x), y)}, {x ≠ 0}>"]


def test_description_ack(nat):
    assert _desc(nat, "ack") == [
        "<ack(s(x), 0), {ack(x, s(0))}, {}>",
        "<ack(s(x), s(y)), {ack(s(x), y), ack(x, ack(s(x), y))}, {}>",
    ]


def test_templates_less(nat):
    tpls = nat.functions["less"].templates
    assert [sorted(t.measured) for t in tpls] == [[1], [2]]


def test_templates_ack(nat, natd):
    for th in (nat, natd):
        (tpl,) = th.functions["ack"].templates
        assert sorted(tpl.measured) == [1, 2]
        assert tpl.weight == (1, 2)
        assert str(tpl.relation) == "lexlimles<3>(nat-less,nat-less)"


def test_templates_plus(nat):
    assert [sorted(t.measured) for t in nat.functions["+"].templates] == [[1]]


def test_obligations_discharge(nat, natd):
    (tp,) = nat.functions["+"].templates
    assert validate_template(nat, tp) == (True, None)
    assert [o.discharged_by for o in tp.obligations] == ["syntactic"]
    (tpd,) = natd.functions["+"].templates
    validate_template(natd, tpd)
    assert [o.discharged_by for o in tpd.obligations] == ["destructor"]
    (ta,) = nat.functions["ack"].templates
    validate_template(nat, ta)
    third = ta.obligations[2]
    assert repr(third) == "[x, ack(s(x), y)] < [s(x), s(y)]"
    assert third.discharged_by == "lexicographic(1:syntactic)"


def test_descends_rejects_non_descent(nat):
    assert not descends(nat, T(nat, "(s x)"), T(nat, "x", "nat"), ())
    assert not descends(nat, T(nat, "x", "nat"), T(nat, "x", "nat"), ())


@pytest.mark.parametrize("name", ["less", "ack"])
def test_dump_templates_golden(name, capsys):
    code = main([corpus("nat-constructor.thy"), "--trace=none", f"--dump-templates={name}"])
    assert code == 0
    with open(os.path.join(HERE, "golden", f"templates-{name}.txt"), encoding="utf-8") as fh:
        assert capsys.readouterr().out == fh.read()


def _ground_descent(th, name, depth):
    """Every ground instance of a recursive call has a smaller weight."""
    f = th.functions[name]
    sorts = f.symbol.argsorts
    checked = 0
    for tpl in f.templates:
        for args in itertools.product(*(th.ground_terms(s, depth) for s in sorts)):
            u = th.app(name, *args)
            for tr in tpl.description:
                theta = match(tr.lhs, u)
                if theta is None:
                    continue
                env = {v.name: oracles.value(t) for v, t in theta.items()}
                if not all(oracles.lit_value(c, env) for c in tr.conds):
                    continue
                for call in tr.calls:
                    inst = [th.evaluate(apply_subst(a, theta)) for a in call.args]
                    small = [oracles.value(inst[i - 1]) for i in tpl.weight]
                    big = [oracles.value(args[i - 1]) for i in tpl.weight]
                    assert _lex_less(small, big), (name, u, call)
                    checked += 1
    return checked


def _lex_less(a, b):
    for x, y in zip(a, b):
        key = (lambda v: len(v)) if isinstance(x, tuple) else (lambda v: v)
        if key(x) != key(y):
            return key(x) < key(y)
    return False


@pytest.mark.parametrize("name", ["+", "*", "less", "ack"])
def test_template_ground_descent_nat(nat, natd, name):
    assert _ground_descent(nat, name, 4) > 0
    if name in natd.functions:
        assert _ground_descent(natd, name, 4) > 0


@pytest.mark.parametrize("name", ["length", "app", "rev", "mbp", "dlonce"])
def test_template_ground_descent_list(natlist, name):
    assert _ground_descent(natlist, name, 3) > 0
