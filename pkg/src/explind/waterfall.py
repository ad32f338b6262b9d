"""The waterfall: simplification, destructor elimination, fertilization,
generalization, elimination of irrelevance and induction over a clause pool."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import schemes as sch
from .terms import (
    App,
    Clause,
    Lit,
    Var,
    apply_subst,
    contains,
    homeomorphic_embedding,
    is_constructor_ground,
    is_constructor_term,
    match,
    perm_smaller,
    replace_all,
    subterms,
    variables,
)
from .theory import BOOL, FALSE, TRUE, BudgetExhausted, TheoryError

STAGES = ("simplify", "destructor-elim", "fertilize", "generalize", "irrelevance", "induct")


@dataclass
class Options:
    max_inductions: int = 10
    stage_cap: int = 500
    chain_depth: int = 8
    injective: bool = True
    fertilize_pairing: str = "cross"  # or "any"
    rewrite_fuel: int = 4000
    unfold_depth: int = 6
    max_leaves: int = 16


@dataclass
class TraceNode:
    clause: Clause
    stage: str = ""
    outcome: str = "open"  # open | changed | proved | failed
    children: list = field(default_factory=list)
    note: str = ""
    report: object = None


@dataclass
class ProofResult:
    proved: bool
    trace: TraceNode
    reason: str = ""
    inductions: int = 0
    passes: int = 0
    reports: list = field(default_factory=list)


class Failure:
    def __init__(self, reason: str):
        self.reason = reason


class Split(Exception):
    def __init__(self, cond: Lit):
        self.cond = cond


class _Undecided(Exception):
    pass


class _OutOfFuel(Exception):
    pass


# ------------------------------------------------------------ literal helpers


def norm_lit(lit: Lit) -> Lit:
    """Orient boolean literals so the constant `true` sits on the right."""
    if lit.lhs == TRUE or lit.lhs == FALSE:
        lit = Lit(lit.pos, lit.rhs, lit.lhs)
    if lit.rhs == FALSE and lit.lhs.sort == BOOL and lit.lhs != TRUE:
        lit = Lit(not lit.pos, lit.lhs, TRUE)
    return lit


def lit_key(lit: Lit) -> tuple:
    a, b = lit.lhs, lit.rhs
    if repr(b) < repr(a):
        a, b = b, a
    return (lit.pos, a, b)


def _on_ctor_path(t, x) -> bool:
    if t == x:
        return True
    return type(t) is App and t.sym.kind == "constructor" and any(_on_ctor_path(a, x) for a in t.args)


def nsyms(t) -> int:
    if type(t) is Var:
        return 0
    return 1 + sum(nsyms(a) for a in t.args)


# ------------------------------------------------------------ type sets


class TypeSet:
    """Possible top constructors of a term; '*' stands for stuck values."""

    def __init__(self, theory):
        self.theory = theory
        self._fn: dict[str, frozenset] = {}
        self._version = -1

    def _refresh(self):
        th = self.theory
        if self._version == len(th.order):
            return
        ts = {name: set() for name in th.functions}
        changed = True
        while changed:
            changed = False
            for name, fdef in th.functions.items():
                acc = ts[name]
                before = len(acc)
                if fdef.partial:
                    acc |= {c.name for c in th.ctors_of[fdef.symbol.sort]} | {"*"}
                for e in fdef.equations:
                    acc |= self._static(e.rhs, ts)
                if len(acc) != before:
                    changed = True
        self._fn = {k: frozenset(v) for k, v in ts.items()}
        self._version = len(th.order)

    def _static(self, t, ts) -> set:
        if type(t) is Var:
            return {c.name for c in self.theory.ctors_of[t.sort]}
        if t.sym.kind == "constructor":
            return {t.sym.name}
        return set(ts.get(t.sym.name, ()))

    def of(self, t, facts=()) -> frozenset:
        self._refresh()
        if type(t) is Var:
            out = {c.name for c in self.theory.ctors_of[t.sort]}
        elif t.sym.kind == "constructor":
            return frozenset({t.sym.name})
        else:
            out = set(self._fn.get(t.sym.name, ()))
        for f in facts:
            for a, b in ((f.lhs, f.rhs), (f.rhs, f.lhs)):
                if a == t and type(b) is App and b.sym.kind == "constructor":
                    if f.pos:
                        out &= {b.sym.name}
                    elif not b.args:
                        out.discard(b.sym.name)
        return frozenset(out)


# ------------------------------------------------------------ context


class Ctx:
    """Assumed facts (literals taken to hold) and the ground rewrite system they induce."""

    def __init__(self, facts=()):
        self.facts: list[Lit] = []
        self.keys: set = set()
        self.rules: dict = {}
        for f in facts:
            self._add(norm_lit(f))

    def _add(self, f: Lit):
        k = lit_key(f)
        if k in self.keys:
            return
        self.keys.add(k)
        self.facts.append(f)
        a, b = f.lhs, f.rhs
        if f.pos:
            if is_constructor_ground(b) and not is_constructor_ground(a):
                self.rules.setdefault(a, b)
            elif is_constructor_ground(a) and not is_constructor_ground(b):
                self.rules.setdefault(b, a)
        elif a.sort == BOOL and b == TRUE and a != FALSE:
            self.rules.setdefault(a, FALSE)

    def extend(self, more) -> "Ctx":
        c = Ctx()
        c.facts = list(self.facts)
        c.keys = set(self.keys)
        c.rules = dict(self.rules)
        for f in more:
            c._add(norm_lit(f))
        return c

    def holds(self, lit: Lit):
        k = lit_key(norm_lit(lit))
        if k in self.keys:
            return True
        if (not k[0],) + k[1:] in self.keys:
            return False
        return None


# ------------------------------------------------------------ simplifier


class Simplifier:
    def __init__(self, theory, options: Options, typeset: TypeSet | None = None):
        self.theory = theory
        self.opts = options
        self.ts = typeset or TypeSet(theory)
        self.fuel = 0
        self.chain: list = []
        self.clause_terms: set = set()

    # -------------------------------------------------------- deciding

    def eq_decide(self, a, b, ctx: Ctx):
        """True/False when a = b is decided by constructors and type sets."""
        if a == b:
            return True
        if is_constructor_ground(a) and is_constructor_ground(b):
            return False
        ca = type(a) is App and a.sym.kind == "constructor"
        cb = type(b) is App and b.sym.kind == "constructor"
        if ca and cb:
            if a.sym.name != b.sym.name:
                return False
            res = [self.eq_decide(x, y, ctx) for x, y in zip(a.args, b.args)]
            if any(r is False for r in res):
                return False
            if all(r is True for r in res):
                return True
            return None
        if type(a) is Var and cb and _on_ctor_path(b, a):
            return False
        if type(b) is Var and ca and _on_ctor_path(a, b):
            return False
        ta, tb = self.ts.of(a, ctx.facts), self.ts.of(b, ctx.facts)
        if "*" not in ta and "*" not in tb and not (ta & tb):
            return False
        return None

    def static(self, lit: Lit, ctx: Ctx):
        lit = norm_lit(lit)
        e = self.eq_decide(lit.lhs, lit.rhs, ctx)
        if e is not None:
            return e == lit.pos
        return ctx.holds(lit)

    def decide(self, lit: Lit, ctx: Ctx, depth: int):
        """(truth value or None, rewritten literal)."""
        try:
            new = norm_lit(Lit(lit.pos, self.rw(lit.lhs, ctx, depth), self.rw(lit.rhs, ctx, depth)))
        except Split:
            new = norm_lit(lit)
        return self.static(new, ctx), new

    # -------------------------------------------------------- rewriting

    def rw(self, t, ctx: Ctx, depth: int = 0):
        self.fuel -= 1
        if self.fuel < 0:
            raise _OutOfFuel()
        if type(t) is Var:
            return ctx.rules.get(t, t)
        if t in ctx.rules:
            return ctx.rules[t]
        args = tuple(self.rw(a, ctx, depth) for a in t.args)
        u = t if all(x is y for x, y in zip(args, t.args)) else App(t.sym, args)
        if u in ctx.rules:
            return ctx.rules[u]
        if u.sym.kind == "constructor":
            return u
        if all(is_constructor_ground(a) for a in args):
            try:
                v = self.theory.evaluate(u)
            except (BudgetExhausted, TheoryError):
                v = None
            if v is not None and is_constructor_ground(v):
                return v
        for rule in self.theory.rewrite_rules:
            r = self.apply_rule(rule, u, ctx, depth)
            if r is not None:
                return self.rw(r, ctx, depth)
        r = self.unfold(u, ctx, depth)
        if r is not None:
            return self.rw(r, ctx, depth)
        return u

    def apply_rule(self, rule, u, ctx: Ctx, depth: int):
        theta = match(rule.lhs, u)
        if theta is None:
            return None
        if rule.permutative and not perm_smaller(apply_subst(rule.rhs, theta), u):
            return None
        theta = self.relieve(list(rule.conds), theta, ctx, depth)
        if theta is None:
            return None
        return apply_subst(rule.rhs, theta)

    def relieve(self, conds, theta, ctx: Ctx, depth: int):
        if not conds:
            return theta
        c = norm_lit(conds[0])
        free = set(variables(c)) - set(theta)
        if free:
            for f in ctx.facts:
                if f.pos != c.pos:
                    continue
                for a, b in ((f.lhs, f.rhs), (f.rhs, f.lhs)):
                    th = match(c.lhs, a, theta)
                    th = match(c.rhs, b, th) if th is not None else None
                    if th is not None:
                        r = self.relieve(conds[1:], th, ctx, depth)
                        if r is not None:
                            return r
            return None
        ci = apply_subst(c, theta)
        if len(self.chain) >= self.opts.chain_depth:
            return None
        for prev in self.chain:
            if (
                prev.pos == ci.pos
                and homeomorphic_embedding(prev.lhs, ci.lhs)
                and homeomorphic_embedding(prev.rhs, ci.rhs)
            ):
                return None
        self.chain.append(ci)
        try:
            v, _ = self.decide(ci, ctx, depth)
        finally:
            self.chain.pop()
        if v is True:
            return self.relieve(conds[1:], theta, ctx, depth)
        return None

    # -------------------------------------------------------- unfolding

    def unfold(self, u: App, ctx: Ctx, depth: int):
        fdef = self.theory.functions.get(u.sym.name)
        if fdef is None or depth > self.opts.unfold_depth:
            return None
        if depth and fdef.recursive:
            # inside a hypothetical branch only non-recursive definitions open up
            return None
        try:
            leaves = self.case_tree(fdef, u, ctx, depth)
        except _Undecided:
            return None
        if fdef.recursive:
            for assumed, rhs in leaves:
                sub = ctx.extend(assumed)
                try:
                    r = self.rw(rhs, sub, depth + 1)
                except Split:
                    r = rhs
                calls = [s for _, s in subterms(r) if type(s) is App and s.sym.name == fdef.name]
                if not all(self.acceptable(call, u, fdef) for call in calls):
                    return None
        if len(leaves) == 1 and not leaves[0][0]:
            return leaves[0][1]
        raise Split(leaves[0][0][0])

    def case_tree(self, fdef, u: App, ctx: Ctx, depth: int) -> list:
        leaves: list = []
        eqs = fdef.equations

        def explore(i, assumed):
            while i < len(eqs):
                e = eqs[i]
                theta = match(e.lhs, u)
                if theta is None:
                    if _unifiable_lhs(e.lhs, u):
                        raise _Undecided()
                    i += 1
                    continue
                return conds(i, theta, list(e.conds), assumed)
            raise _Undecided()

        def conds(i, theta, cs, assumed):
            sub = ctx.extend(assumed) if assumed else ctx
            for k, c in enumerate(cs):
                v, ci = self.decide(apply_subst(c, theta), sub, depth + 1)
                if v is False:
                    return explore(i + 1, assumed)
                if v is None:
                    conds(i, theta, cs[k + 1:], assumed + [ci])
                    explore(i + 1, assumed + [ci.negate()])
                    return
            leaves.append((assumed, apply_subst(eqs[i].rhs, theta)))
            if len(leaves) > self.opts.max_leaves:
                raise _Undecided()

        explore(0, [])
        return leaves

    def acceptable(self, call: App, u: App, fdef) -> bool:
        if all(a in self.clause_terms for a in call.args):
            return True
        if sum(map(is_constructor_ground, call.args)) > sum(map(is_constructor_ground, u.args)):
            return True
        for tpl in fdef.templates:
            before = sum(nsyms(u.args[i - 1]) for i in tpl.measured)
            after = sum(nsyms(call.args[i - 1]) for i in tpl.measured)
            if after < before:
                return True
        return False

    # -------------------------------------------------------- clause level

    def simplify(self, c: Clause):
        """None when unchanged, else the fully simplified resulting clauses."""
        out: list[Clause] = []
        stack = [c]
        changed = False
        budget = 400
        while stack:
            cur = stack.pop()
            while True:
                budget -= 1
                r = self.one_pass(cur) if budget > 0 else None
                if r is None:
                    out.append(cur)
                    break
                changed = True
                if isinstance(r, list):
                    stack.extend(reversed(r))
                    break
                cur = r
        return out if changed else None

    def one_pass(self, c: Clause):
        r = self.cleanup(c)
        if r is not None:
            return r
        r = self.solved_variable(c)
        if r is not None:
            return r
        self.clause_terms = {t for lit in c.lits for side in (lit.lhs, lit.rhs) for _, t in subterms(side)}
        lits = list(c.lits)
        for i, lit in enumerate(lits):
            ctx = Ctx(o.negate() for j, o in enumerate(lits) if j != i)
            self.fuel = self.opts.rewrite_fuel
            try:
                new = norm_lit(Lit(lit.pos, self.rw(lit.lhs, ctx), self.rw(lit.rhs, ctx)))
            except Split as s:
                cond = s.cond
                return [c.with_lits(lits + [cond.negate()]), c.with_lits(lits + [cond])]
            except _OutOfFuel:
                continue
            if new != lit:
                lits[i] = new
                return c.with_lits(lits)
        return None

    def cleanup(self, c: Clause):
        """Literal-level decisions, duplicates, complements and decomposition."""
        empty = Ctx()
        out: list[Lit] = []
        keys: set = set()
        changed = False
        for lit in c.lits:
            n = norm_lit(lit)
            if n != lit:
                changed = True
            v = self.static(n, empty)
            if v is True:
                return []
            if v is False:
                changed = True
                continue
            k = lit_key(n)
            if k in keys:
                changed = True
                continue
            if (not k[0],) + k[1:] in keys:
                return []
            keys.add(k)
            out.append(n)
        for i, lit in enumerate(out):
            a, b = lit.lhs, lit.rhs
            if (
                type(a) is App
                and type(b) is App
                and a.sym.kind == "constructor"
                and a.sym is b.sym
                and a.args
            ):
                pairs = [Lit(lit.pos, x, y) for x, y in zip(a.args, b.args) if x != y]
                if lit.pos and len(pairs) > 1:
                    return [c.with_lits(out[:i] + [p] + out[i + 1:]) for p in pairs]
                return c.with_lits(out[:i] + pairs + out[i + 1:])
        return c.with_lits(out) if changed else None

    def solved_variable(self, c: Clause):
        for i, lit in enumerate(c.lits):
            if lit.pos:
                continue
            for x, t in ((lit.lhs, lit.rhs), (lit.rhs, lit.lhs)):
                if type(x) is Var and x not in variables(t):
                    rest = Clause(c.lits[:i] + c.lits[i + 1:], c.marks)
                    return apply_subst(rest, {x: t})
        return None


def _unifiable_lhs(p: App, t: App) -> bool:
    return all(_unifiable(a, b) for a, b in zip(p.args, t.args))


def _unifiable(p, t) -> bool:
    if type(p) is Var or type(t) is Var:
        return True
    if t.sym.kind != "constructor" or p.sym.kind != "constructor":
        return True
    return p.sym.name == t.sym.name and all(_unifiable(a, b) for a, b in zip(p.args, t.args))


# ------------------------------------------------------------ other stages


def eliminate_destructors(c: Clause, theory):
    """Replace d_i(v) by fresh variables and v by the constructor term over them."""
    names = {v.name for v in variables(c)}
    keys = {lit_key(norm_lit(lit)) for lit in c.lits}
    for elim in theory.elim_lemmas:
        heads = {td.sym.name for td in elim.destructor_terms.values()}
        cands = []
        for lit in c.lits:
            for side in (lit.lhs, lit.rhs):
                for _, t in subterms(side):
                    if (
                        type(t) is App
                        and t.sym.name in heads
                        and type(t.args[0]) is Var
                        and t.args[0] not in c.marks
                        and t.args[0] not in cands
                    ):
                        cands.append(t.args[0])
        for v in cands:
            if v.sort != elim.var.sort:
                continue
            theta = {elim.var: v}
            if not all(lit_key(norm_lit(apply_subst(m, theta))) in keys for m in elim.middle):
                continue
            avoid = set(names)
            fresh = {}
            ys = elim.constructor_term.args
            for k, y in enumerate(ys):
                base = v.name if (len(ys) == 1 and y.sort == v.sort) else f"{v.name}{k + 1}"
                name = base + "'"
                while name in avoid:
                    name += "'"
                avoid.add(name)
                fresh[y] = Var(name, y.sort)
            lits = list(c.lits)
            for y, td in elim.destructor_terms.items():
                inst = apply_subst(td, theta)
                lits = [lit.map(lambda s, a=inst, b=fresh[y]: replace_all(s, a, b)) for lit in lits]
            ctor = apply_subst(elim.constructor_term, fresh)
            lits = [lit.map(lambda s: replace_all(s, v, ctor)) for lit in lits]
            return [Clause(lits, set(c.marks) | set(fresh.values()))]
    return None


def cross_fertilize(c: Clause, pairing: str = "cross"):
    for hi, hyp in enumerate(c.lits):
        if hyp.pos or is_constructor_ground(hyp.lhs) or is_constructor_ground(hyp.rhs):
            continue
        for ci, con in enumerate(c.lits):
            if not con.pos or ci == hi:
                continue
            order = [(1, 1), (2, 2), (1, 2), (2, 1)] if pairing == "cross" else [(1, 1), (1, 2), (2, 1), (2, 2)]
            for hs, cs in order:
                old, new = hyp.side(hs), hyp.side(3 - hs)
                if type(old) is Var:
                    continue
                target, other = con.side(cs), con.side(3 - cs)
                if contains(target, old) and not contains(other, old):
                    side = replace_all(target, old, new)
                    nc = Lit(True, side, other) if cs == 1 else Lit(True, other, side)
                    lits = [nc if k == ci else lit for k, lit in enumerate(c.lits) if k != hi]
                    return [Clause(lits, c.marks)]
    return None


def _gen_candidates(c: Clause, theory) -> list:
    counts: dict = {}
    tops = {lit.lhs for lit in c.lits} | {lit.rhs for lit in c.lits}
    for lit in c.lits:
        for side in (lit.lhs, lit.rhs):
            for _, t in subterms(side):
                if type(t) is not App or is_constructor_term(t) or t in tops:
                    continue
                if theory.is_destructor(t.sym.name):
                    continue
                counts[t] = counts.get(t, 0) + 1
    cands = [t for t, n in counts.items() if n >= 2]
    return [t for t in cands if not any(o != t and contains(t, o) for o in cands)]


def generalize(c: Clause, theory):
    names = {v.name for v in variables(c)}
    lits = list(c.lits)
    changed = False
    k = 0
    while True:
        cands = _gen_candidates(Clause(lits), theory)
        if not cands:
            break
        t = cands[0]
        for lem in theory.lemmas_tagged("generalization"):
            if len(lem.clause.lits) != 1:
                continue
            glit = lem.clause.lits[0]
            for side in (glit.lhs, glit.rhs):
                for _, s in subterms(side):
                    if type(s) is App and s.sym.name == t.sym.name:
                        theta = match(s, t)
                        if theta is not None and set(variables(glit)) <= set(theta):
                            inst = apply_subst(glit, theta).negate()
                            if inst not in lits:
                                lits.append(inst)
        k += 1
        while f"z{k}" in names:
            k += 1
        z = Var(f"z{k}", t.sort)
        names.add(z.name)
        lits = [lit.map(lambda s: replace_all(s, t, z)) for lit in lits]
        changed = True
    return [Clause(lits, c.marks)] if changed else None


def literal_classes(c: Clause) -> list[list[int]]:
    n = len(c.lits)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    seen: dict = {}
    for i, lit in enumerate(c.lits):
        for v in variables(lit):
            if v in seen:
                parent[find(i)] = find(seen[v])
            else:
                seen[v] = i
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _irrelevant(c: Clause, cls: list, theory) -> bool:
    lits = [c.lits[i] for i in cls]
    syms = set()
    for lit in lits:
        for side in (lit.lhs, lit.rhs):
            for _, t in subterms(side):
                if type(t) is App:
                    syms.add(t.sym.name)
    if not any(theory.is_recursive(s) for s in syms):
        return True
    if len(lits) == 1 and lits[0].is_pred():
        a = lits[0].lhs
        if theory.is_recursive(a.sym.name) and all(type(x) is Var for x in a.args):
            return len(set(a.args)) == len(a.args)
    return False


def eliminate_irrelevance(c: Clause, theory):
    classes = literal_classes(c)
    bad = [cls for cls in classes if _irrelevant(c, cls, theory)]
    if not bad:
        return None
    if len(bad) == len(classes):
        return Failure("all literal classes irrelevant")
    drop = {i for cls in bad for i in cls}
    return [Clause([lit for i, lit in enumerate(c.lits) if i not in drop], c.marks)]


# ------------------------------------------------------------ the pool


class Waterfall:
    def __init__(self, theory, options: Options | None = None):
        self.theory = theory
        self.opts = options or Options()
        self.simp = Simplifier(theory, self.opts)
        self.inductions = 0
        self.reports: list = []

    def induct(self, c: Clause, node: TraceNode):
        goal = Clause(c.lits)
        if self.inductions >= self.opts.max_inductions:
            return Failure("budget-exhausted: induction budget used up")
        selected, report = sch.run_pipeline(self.theory, goal, self.opts.injective)
        if selected is None:
            return Failure("no-applicable-scheme")
        self.inductions += 1
        self.reports.append((goal, report))
        node.report = report
        node.note = selected.summary()
        return sch.instantiate(self.theory, selected, goal)

    def stage(self, name: str, c: Clause, node: TraceNode):
        if name == "simplify":
            return self.simp.simplify(c)
        if name == "destructor-elim":
            return eliminate_destructors(c, self.theory)
        if name == "fertilize":
            return cross_fertilize(c, self.opts.fertilize_pairing)
        if name == "generalize":
            return generalize(c, self.theory)
        if name == "irrelevance":
            return eliminate_irrelevance(c, self.theory)
        return self.induct(c, node)

    def run(self, goal: Clause) -> ProofResult:
        root = TraceNode(goal)
        stack = [root]
        passes = 0
        while stack:
            node = stack.pop()
            passes += 1
            if passes > self.opts.stage_cap:
                node.outcome = "failed"
                return self._fail(root, "budget-exhausted: stage-pass cap reached", passes)
            if not node.clause.lits:
                node.stage = "simplify"
                node.outcome = "failed"
                return self._fail(root, "contradiction: empty clause", passes)
            for name in STAGES:
                out = self.stage(name, node.clause, node)
                if out is None:
                    continue
                node.stage = name
                if isinstance(out, Failure):
                    node.outcome = "failed"
                    node.note = out.reason
                    return self._fail(root, out.reason, passes)
                node.outcome = "proved" if not out else "changed"
                node.children = [TraceNode(x) for x in out]
                stack.extend(reversed(node.children))
                break
        return ProofResult(True, root, "", self.inductions, passes, self.reports)

    def _fail(self, root, reason, passes) -> ProofResult:
        return ProofResult(False, root, reason, self.inductions, passes, self.reports)


def prove(goal: Clause, theory, options: Options | None = None) -> ProofResult:
    return Waterfall(theory, options).run(goal)


def simplify(c: Clause, theory, options: Options | None = None):
    return Simplifier(theory, options or Options()).simplify(c)


def induct(c: Clause, theory, options: Options | None = None):
    wf = Waterfall(theory, options)
    out = wf.induct(c, TraceNode(c))
    return out


def walk(node: TraceNode):
    yield node
    for ch in node.children:
        yield from walk(ch)
