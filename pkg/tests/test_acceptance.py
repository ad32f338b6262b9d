"""Acceptance gate: one test per criterion, each reported as a PASS/FAIL line.

Run `pytest tests/test_acceptance.py` (the lines appear in the terminal
summary) or `python3 tests/test_acceptance.py`.
"""

from __future__ import annotations

import functools
import glob
import io
import itertools
import os
import random
import sys
import time

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402
from conftest import CORPUS, FIXTURES, HERE, C, corpus  # noqa: E402
from explind import waterfall as w  # noqa: E402
from explind.cli import main  # noqa: E402
from explind.session import Session, load_theory  # noqa: E402
from explind.terms import Var, match  # noqa: E402

RESULTS: dict = {}
TITLES = {
    1: "commutativity of + with two generated lemmas",
    2: "ack-bound via generalization to the transitivity-step lemma",
    3: "less-trans-succ by one merged predecessor scheme",
    4: "template dumps match golden files",
    5: "scheme dump for ack-bound (destructor style)",
    6: "admissibility of russell, destructor +, partial dlonce",
    7: "evaluation against independent oracles",
    8: "property suites over exhaustive enumerations",
    9: "regression corpus",
}


def criterion(n):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*a, **k):
            t0 = time.perf_counter()
            try:
                fn(*a, **k)
            except BaseException as e:
                RESULTS[n] = (False, time.perf_counter() - t0, f"{type(e).__name__}: {e}"[:200])
                raise
            RESULTS[n] = (True, time.perf_counter() - t0, "")

        return run

    return wrap


def report_lines() -> list[str]:
    lines = []
    for n in sorted(TITLES):
        if n not in RESULTS:
            lines.append(f"criterion {n}: NOT RUN  {TITLES[n]}")
            continue
        ok, secs, why = RESULTS[n]
        tail = f"  ({why})" if why else ""
        lines.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {TITLES[n]}  [{secs:.2f}s]{tail}")
    return lines


def _theory(text):
    s = Session()
    r = s.load_text(text)
    assert r.ok
    return s.theory


def _induct_nodes(res):
    return [n for n in w.walk(res.trace) if n.stage == "induct"]


def is_variant(a, b) -> bool:
    """Clauses equal up to literal order and a bijective variable renaming."""
    if len(a.lits) != len(b.lits):
        return False
    for perm in itertools.permutations(b.lits):
        theta: dict | None = {}
        for la, lb in zip(a.lits, perm):
            if la.pos != lb.pos or theta is None:
                theta = None
                break
            theta = match(la.lhs, lb.lhs, theta)
            if theta is not None:
                theta = match(la.rhs, lb.rhs, theta)
        if theta is not None and all(type(v) is Var for v in theta.values()):
            if len(set(theta.values())) == len(theta):
                return True
    return False


# --------------------------------------------------------------------- 1


@criterion(1)
def test_criterion_1_plus_commutativity():
    th = _theory(
        "(data nat (0) (s (x nat)) :destructor (p 0))\n"
        "(defun (+ ((x nat) (y nat)) nat) (= (+ 0 y) y) (= (+ (s x) y) (s (+ x y))))"
    )
    res = w.prove(C(th, "(= (+ x y) (+ y x))"), th)
    assert res.proved, res.reason
    inducted = [n.clause for n in _induct_nodes(res)]
    assert len(inducted) == 3
    assert is_variant(inducted[1], C(th, "(= y (+ y 0))"))
    assert is_variant(inducted[2], C(th, "(= (s (+ y x')) (+ y (s x')))"))


# --------------------------------------------------------------------- 2


@criterion(2)
def test_criterion_2_ack_bound():
    s = load_theory(corpus("nat-constructor.thy"))
    assert s.load_text(
        "(defthm less-succ (less x (s x)) :tags (rewrite))\n"
        "(defthm less-pos (implies (less y z) (less 0 z)) :tags (rewrite))"
    ).ok
    th = s.theory
    res = w.prove(C(th, "(less y (ack x y))"), th)
    assert res.proved, res.reason
    trans_step = C(th, "(implies (and (less x y) (less y z)) (less (s x) z))")
    gens = [n for n in w.walk(res.trace) if n.stage == "generalize"]
    assert gens, "no generalization step"
    produced = gens[0].children[0]
    assert is_variant(produced.clause, trans_step), produced.clause
    # irrelevance leaves the clause as is; the very next stage that acts is one induction
    assert produced.stage == "induct"
    assert len(_induct_nodes_under(produced)) == 1
    assert res.inductions == 2


def _induct_nodes_under(node):
    return [n for n in w.walk(node) if n.stage == "induct"]


# --------------------------------------------------------------------- 3


@criterion(3)
def test_criterion_3_less_trans_succ():
    from explind.schemes import run_pipeline

    goal_text = "(implies (and (less x y) (less y z)) (less (s x) (s z)))"
    for name, expect_xi, expect_mu in [
        ("nat-destructor.thy", {}, {"x": "p(x)", "y": "p(y)", "z": "p(z)"}),
        ("nat-constructor.thy", {"x": "s(x')", "y": "s(y')", "z": "s(z')"}, {"x": "x'", "y": "y'", "z": "z'"}),
    ]:
        th = load_theory(corpus(name)).theory
        res = w.prove(C(th, goal_text), th)
        assert res.proved and res.inductions == 1, (name, res.reason, res.inductions)
        (node,) = _induct_nodes(res)
        sel, _ = run_pipeline(th, type(node.clause)(node.clause.lits))
        (case,) = sel.cases
        (mu,) = case.hyps
        assert {k.name: repr(v) for k, v in case.xi.items()} == expect_xi
        assert {k.name: repr(v) for k, v in mu.items()} == expect_mu
        assert all(ch.outcome == "proved" for ch in w.walk(node) if ch is not node and not ch.children)


# --------------------------------------------------------------------- 4


@criterion(4)
def test_criterion_4_template_golden():
    for name in ("less", "ack"):
        out = io.StringIO()
        assert main([corpus("nat-constructor.thy"), "--trace=none", f"--dump-templates={name}"], out) == 0
        with open(os.path.join(HERE, "golden", f"templates-{name}.txt"), "rb") as fh:
            assert out.getvalue().encode("utf-8") == fh.read()
    lines = open(os.path.join(HERE, "golden", "templates-less.txt"), encoding="utf-8").read().splitlines()
    assert [ln.split(", ")[2] for ln in lines] == ["{1}", "{2}"]
    (ack,) = open(os.path.join(HERE, "golden", "templates-ack.txt"), encoding="utf-8").read().splitlines()
    assert ", {1,2}, lexlimles<3>(" in ack


# --------------------------------------------------------------------- 5


@criterion(5)
def test_criterion_5_scheme_dump(tmp_path):
    f = tmp_path / "ack-bound.thy"
    f.write_text(f'(include "{corpus("nat-destructor.thy")}")\n(defthm ack-bound (less y (ack x y)))\n')
    out = io.StringIO()
    main([str(f), "--dump-schemes", "--trace=none", "--max-inductions=1"], out)
    lines = [ln.strip() for ln in out.getvalue().splitlines()]
    assert "built #1: scheme positions={1.1} vars={y} hitting=1/2 from less#1" in lines
    assert "mu1,1={x->x, y->p(y)}" in lines
    assert "built #2: scheme positions={1.1.2} vars={x,y} hitting=6/6 from ack#1" in lines
    for mu in ("mu1,1={x->p(x), y->s(0)}", "mu2,1={x->x, y->p(y)}", "mu2,2={x->p(x), y->ack(x, p(y))}"):
        assert mu in lines
    assert "subsume #1 into #2: scheme positions={1.1,1.1.2} hitting=3/2" in lines
    assert "selected #2: scheme positions={1.1,1.1.2} vars={x,y} hitting=3/2 from ack#1" in lines


# --------------------------------------------------------------------- 6


@criterion(6)
def test_criterion_6_admissibility():
    s = Session()
    r = s.load_file(os.path.join(FIXTURES, "russell.thy"))
    assert r.results[-1].event.name == "russell" and r.results[-1].status == "rejected"
    s = Session()
    assert s.load_file(corpus("nat-destructor.thy")).ok
    plus = s.theory.functions["+"]
    assert plus.style == "destructor" and plus.templates
    s = Session()
    r = s.load_file(os.path.join(FIXTURES, "dlonce-total.thy"))
    assert r.results[-1].event.name == "dlonce" and r.results[-1].status == "rejected"
    s = Session()
    assert s.load_file(corpus("list-base.thy")).ok
    assert s.theory.functions["dlonce"].partial


# --------------------------------------------------------------------- 7


def _random_ground(rng, th, depth):
    if depth <= 1 or rng.random() < 0.25:
        t = th.app("0")
        for _ in range(rng.randrange(3)):
            t = th.app("s", t)
        return t
    f = rng.choice(["+", "*", "s"])
    if f == "s":
        return th.app("s", _random_ground(rng, th, depth - 1))
    return th.app(f, _random_ground(rng, th, depth - 1), _random_ground(rng, th, depth - 1))


@criterion(7)
def test_criterion_7_evaluation():
    th = load_theory(corpus("nat-constructor.thy")).theory
    two = th.app("s", th.app("s", th.app("0")))
    got = th.evaluate(th.app("ack", two, two))
    assert oracles.value(got) == oracles.ack(2, 2) == 7
    assert repr(got) == "s(s(s(s(s(s(s(0)))))))"
    rng = random.Random(20261015)
    for _ in range(1000):
        if rng.random() < 0.3:
            t = th.app("less", _random_ground(rng, th, 3), _random_ground(rng, th, 3))
        else:
            t = _random_ground(rng, th, 4)
        assert oracles.value(th.evaluate(t)) == oracles.value(t), t


# --------------------------------------------------------------------- 8


@criterion(8)
def test_criterion_8_properties():
    import test_properties as tp
    import test_schemes as ts
    import test_templates as tt
    from hypothesis import given, settings
    from hypothesis import strategies as st
    from strategies import nat_terms

    nat = load_theory(corpus("nat-constructor.thy")).theory
    natd = load_theory(corpus("nat-destructor.thy")).theory
    natlist = load_theory(corpus("list-base.thy")).theory

    @settings(max_examples=100, deadline=None, database=None)
    @given(st.data())
    def match_and_eval(data):
        from explind.terms import apply_subst, variables

        t = data.draw(nat_terms(nat, 4))
        theta = {v: data.draw(nat_terms(nat, 3)) for v in variables(t)}
        assert match(t, apply_subst(t, theta)) == theta
        g = data.draw(nat_terms(nat, 4, ground=True))
        assert nat.evaluate(g) == nat.evaluate(g)

    match_and_eval()
    for th, names, depth in [(nat, ["+", "*", "less", "ack"], 4), (natd, ["+", "less", "ack"], 4),
                             (natlist, ["length", "app", "rev", "mbp", "dlonce"], 3)]:
        for n in names:
            assert tt._ground_descent(th, n, depth) > 0
    theories = {"nat": nat, "natd": natd, "natlist": natlist}
    for which, text in ts.GOALS:
        th = theories[which]
        assert ts.check_case_completeness(th, C(th, text))
        assert ts.check_ordering(th, C(th, text)) > 0
    checked = {}
    for stage, _, inp, outs in tp.HARVEST:
        if len(oracles.clause_vars(inp)) <= 5:
            checked[stage] = checked.get(stage, 0) + tp.check_preservation(stage, inp, outs)
    assert set(checked) == set(tp.STAGE_FNS) and all(checked.values()), checked


# --------------------------------------------------------------------- 9

REQUIRED = {"less-succ", "less-succ-plus", "less-trans-succ", "plus-comm", "ack-bound", "length-app", "length-app-comm",
            "mbp-app", "dlonce-length", "mbp-dlonce"}


@criterion(9)
def test_criterion_9_corpus():
    out = io.StringIO()
    assert main(["--regress", CORPUS], out) == 0, out.getvalue()
    proved = set()
    for path in sorted(glob.glob(os.path.join(CORPUS, "*.thy"))):
        s = Session()
        r = s.load_file(path)
        assert r.ok
        proved |= {x.event.name for x in r.results if x.status == "proved" and x.event.path == path}
    assert len(proved) >= 25, len(proved)
    assert REQUIRED <= proved, REQUIRED - proved


if __name__ == "__main__":
    import inspect
    import tempfile
    from pathlib import Path

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "tmp_path" in inspect.signature(fn).parameters:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except BaseException:
                pass
    print("\n".join(report_lines()))
    sys.exit(0 if all(ok for ok, _, _ in RESULTS.values()) else 1)
