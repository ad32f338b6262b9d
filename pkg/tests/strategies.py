"""Hypothesis strategies for terms and clauses over the shipped theories."""

from hypothesis import strategies as st

from explind.terms import App, Clause, Lit, Var

NAT_VARS = ("x", "y", "z")
LIST_VARS = ("l", "k")


def nat_terms(th, depth=3, funcs=("+", "*"), vars_=NAT_VARS, ground=False):
    leaves = [st.just(App(th.sym("0")))]
    if not ground:
        leaves.append(st.sampled_from([Var(v, "nat") for v in vars_]))
    base = st.one_of(*leaves)

    def extend(children):
        opts = [children.map(lambda a: App(th.sym("s"), (a,)))]
        for f in funcs:
            opts.append(st.tuples(children, children).map(lambda ab, f=f: App(th.sym(f), ab)))
        return st.one_of(*opts)

    return st.recursive(base, extend, max_leaves=depth + 1)


def list_terms(th, depth=3, ground=False):
    nat = nat_terms(th, 1, funcs=(), ground=ground)
    leaves = [st.just(App(th.sym("nil")))]
    if not ground:
        leaves.append(st.sampled_from([Var(v, "list") for v in LIST_VARS]))

    def extend(children):
        return st.one_of(
            st.tuples(nat, children).map(lambda a: App(th.sym("cns"), a)),
            st.tuples(children, children).map(lambda a: App(th.sym("app"), a)),
            children.map(lambda a: App(th.sym("rev"), (a,))),
        )

    return st.recursive(st.one_of(*leaves), extend, max_leaves=depth + 1)


def nat_literals(th, depth=2, funcs=("+", "*")):
    t = nat_terms(th, depth, funcs)
    true = App(th.sym("true"))
    eq = st.tuples(st.booleans(), t, t).map(lambda a: Lit(a[0], a[1], a[2]))
    less = st.tuples(st.booleans(), t, t).map(lambda a: Lit(a[0], App(th.sym("less"), (a[1], a[2])), true))
    return st.one_of(eq, less)


def nat_clauses(th, max_lits=3, depth=2, funcs=("+", "*")):
    return st.lists(nat_literals(th, depth, funcs), min_size=1, max_size=max_lits).map(Clause)


def list_literals(th, depth=2):
    true = App(th.sym("true"))
    lt = list_terms(th, depth)
    nt = nat_terms(th, 1, funcs=("+",))
    length = lt.map(lambda a: App(th.sym("length"), (a,)))
    nat_side = st.one_of(nt, length)
    return st.one_of(
        st.tuples(st.booleans(), lt, lt).map(lambda a: Lit(*a)),
        st.tuples(st.booleans(), nat_side, nat_side).map(lambda a: Lit(*a)),
        st.tuples(st.booleans(), nt, lt).map(lambda a: Lit(a[0], App(th.sym("mbp"), (a[1], a[2])), true)),
    )


def list_clauses(th, max_lits=3, depth=2):
    return st.lists(list_literals(th, depth), min_size=1, max_size=max_lits).map(Clause)
