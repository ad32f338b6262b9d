"""Data types, the definition principle, ground evaluation and the lemma store."""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field

from .terms import (
    App,
    Clause,
    Lit,
    SortError,
    Symbol,
    Term,
    Var,
    apply_subst,
    is_constructor_ground,
    is_constructor_term,
    match,
    perm_smaller,
    symbols,
    variables,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_EVAL_BUDGET = 100_000

BOOL = "bool"
TRUE_SYM = Symbol("true", "constructor", (), BOOL)
FALSE_SYM = Symbol("false", "constructor", (), BOOL)
TRUE = App(TRUE_SYM)
FALSE = App(FALSE_SYM)


class TheoryError(Exception):
    pass


class Rejected(TheoryError):
    """A definition failed the admissibility check named in `check`."""

    def __init__(self, check: str, detail: str):
        super().__init__(f"{check}: {detail}")
        self.check = check
        self.detail = detail


class ShapeViolation(TheoryError):
    pass


class BudgetExhausted(TheoryError):
    pass


@dataclass
class DataType:
    sort: str
    constructors: list  # [(name, [argsort, ...])]
    destructors: list = field(default_factory=list)  # [(name, default Term)] in argument order


@dataclass(frozen=True)
class PncEquation:
    lhs: App
    rhs: Term
    conds: tuple = ()

    def __repr__(self):
        s = f"{self.lhs} = {self.rhs}"
        if self.conds:
            s += " <= " + " & ".join(map(repr, self.conds))
        return s


@dataclass
class FunctionDef:
    symbol: Symbol
    equations: list
    partial: bool = False
    style: str = "constructor"
    recursive: bool = False
    templates: list = field(default_factory=list)
    destructor_of: tuple | None = None  # (constructor name, argument index)

    @property
    def name(self) -> str:
        return self.symbol.name


TAGS = {"rewrite", "elimination", "generalization", "induction"}


@dataclass
class Lemma:
    name: str
    clause: Clause
    tags: frozenset = frozenset()
    status: str = "assumed"


@dataclass
class RewriteRule:
    name: str
    lhs: Term
    rhs: Term
    conds: tuple  # literals that must hold
    permutative: bool


@dataclass
class ElimLemma:
    name: str
    constructor_term: App  # t^c over the designated variables
    var: Var  # x
    middle: tuple  # literals of the lemma between head and destructor literals
    destructor_terms: dict  # designated variable -> t^d


def _pred_lit(lit: Lit) -> Lit:
    """Orient p = false as p != true, and true = p as p = true."""
    if lit.lhs == TRUE or lit.lhs == FALSE:
        lit = Lit(lit.pos, lit.rhs, lit.lhs)
    if lit.rhs == FALSE and lit.lhs.sort == BOOL:
        lit = Lit(not lit.pos, lit.lhs, TRUE)
    return lit


class Theory:
    def __init__(self, eval_budget: int = DEFAULT_EVAL_BUDGET):
        self.eval_budget = eval_budget
        self.sorts: dict[str, DataType] = {}
        self.symbols: dict[str, Symbol] = {}
        self.ctors_of: dict[str, list[Symbol]] = {}
        self.functions: dict[str, FunctionDef] = {}
        self.order: dict[str, int] = {}
        self.lemmas: list[Lemma] = []
        self.rewrite_rules: list[RewriteRule] = []
        self.elim_lemmas: list[ElimLemma] = []
        self.log: list[str] = []
        self.sorts[BOOL] = DataType(BOOL, [("true", []), ("false", [])])
        self.ctors_of[BOOL] = [TRUE_SYM, FALSE_SYM]
        self.symbols["true"] = TRUE_SYM
        self.symbols["false"] = FALSE_SYM
        self.order["true"] = 0
        self.order["false"] = 1

    # ------------------------------------------------------------ helpers

    def sym(self, name: str) -> Symbol:
        try:
            return self.symbols[name]
        except KeyError:
            raise TheoryError(f"unknown symbol {name}") from None

    def app(self, name: str, *args: Term) -> App:
        return App(self.sym(name), args)

    def ground(self, spec) -> Term:
        """A ground term from a Term, a constant name or a nested list."""
        if isinstance(spec, Term):
            return spec
        if isinstance(spec, str):
            return self.app(spec)
        head, *args = spec
        return self.app(head, *(self.ground(a) for a in args))

    def is_destructor(self, name: str) -> bool:
        f = self.functions.get(name)
        return f is not None and f.destructor_of is not None

    def is_recursive(self, name: str) -> bool:
        f = self.functions.get(name)
        return f is not None and f.recursive

    def base_constructors(self, sort: str) -> list[Symbol]:
        return [c for c in self.ctors_of[sort] if not c.argsorts]

    def nat_like(self, sort: str) -> bool:
        cs = self.ctors_of.get(sort, [])
        return (
            len(cs) == 2
            and sorted(len(c.argsorts) for c in cs) == [0, 1]
            and any(c.argsorts == (sort,) for c in cs)
        )

    def ground_terms(self, sort: str, depth: int) -> list[Term]:
        """All constructor ground terms of `sort` with nesting depth <= depth."""
        memo = self.__dict__.setdefault("_ground_memo", {})
        key = (sort, depth)
        if key in memo:
            return memo[key]
        out = []
        if depth >= 1:
            for c in self.ctors_of[sort]:
                if not c.argsorts:
                    out.append(App(c))
                else:
                    pools = [self.ground_terms(s, depth - 1) for s in c.argsorts]
                    for args in itertools.product(*pools):
                        out.append(App(c, args))
        memo[key] = out
        return out

    # ------------------------------------------------------------ data types

    def declare_datatype(self, d: DataType) -> None:
        if d.sort in self.sorts:
            raise TheoryError(f"duplicate-sort: {d.sort}")
        names = [c for c, _ in d.constructors] + [n for n, _ in d.destructors]
        for n in names:
            if n in self.symbols:
                raise TheoryError(f"duplicate-symbol: {n}")
        if len(set(names)) != len(names):
            raise TheoryError(f"duplicate-symbol in declaration of {d.sort}")
        for _, argsorts in d.constructors:
            for s in argsorts:
                if s != d.sort and s not in self.sorts:
                    raise TheoryError(f"unknown sort {s}")
        if not any(all(s != d.sort for s in a) for _, a in d.constructors):
            raise TheoryError(f"uninhabited-sort: {d.sort} has no base constructor")
        self.sorts[d.sort] = d
        ctors = []
        for name, argsorts in d.constructors:
            s = Symbol(name, "constructor", tuple(argsorts), d.sort)
            self.symbols[name] = s
            self.order[name] = len(self.order)
            ctors.append(s)
        self.ctors_of[d.sort] = ctors
        self.log.append(f"data {d.sort}")
        self._declare_destructors(d, ctors)

    def _declare_destructors(self, d: DataType, ctors: list[Symbol]) -> None:
        slots = [(c, i) for c in ctors for i in range(len(c.argsorts))]
        if not d.destructors:
            return
        if len(d.destructors) != len(slots):
            raise TheoryError(
                f"{d.sort}: {len(d.destructors)} destructors for {len(slots)} constructor arguments"
            )
        x = Var("x", d.sort)
        for (c, i), (dname, default) in zip(slots, d.destructors):
            argsort = c.argsorts[i]
            default = self.ground(default)
            if not is_constructor_ground(default) or default.sort != argsort:
                raise TheoryError(f"default of {dname} must be a constructor ground term of sort {argsort}")
            dsym = Symbol(dname, "defined", (d.sort,), argsort)
            self.symbols[dname] = dsym
            self.order[dname] = len(self.order)
            eqs = []
            for c2 in ctors:
                args = tuple(Var(f"x{k + 1}", s) for k, s in enumerate(c2.argsorts))
                lhs = App(dsym, (App(c2, args),))
                rhs = args[i] if c2 is c else default
                eqs.append(PncEquation(lhs, rhs, ()))
            fdef = FunctionDef(dsym, eqs, style="constructor", destructor_of=(c.name, i))
            self.functions[dname] = fdef
        for c in ctors:
            if c.argsorts:
                self._auto_elim_lemma(d, c, ctors, x)

    def _auto_elim_lemma(self, d: DataType, c: Symbol, ctors, x: Var) -> None:
        """c(d1 x, ..., dn x) = x unless x is one of the other (nullary) constructors."""
        others = [o for o in ctors if o is not c]
        if any(o.argsorts for o in others):
            return
        dnames = []
        for dname, fdef in self.functions.items():
            if fdef.destructor_of and fdef.destructor_of[0] == c.name:
                dnames.append((fdef.destructor_of[1], dname))
        dnames.sort()
        if len(dnames) != len(c.argsorts):
            return
        avoid = {x.name}
        ys = []
        for k, s in enumerate(c.argsorts):
            name = f"y{k + 1}"
            ys.append(Var(name, s))
        head = Lit(True, App(c, tuple(ys)), x)
        middle = [Lit(True, x, App(o)) for o in others]
        tail = [Lit(False, y, App(self.symbols[dn], (x,))) for y, (_, dn) in zip(ys, dnames)]
        clause = Clause([head] + middle + tail)
        self.add_lemma(Lemma(f"{c.name}-elim", clause, frozenset({"elimination"}), "assumed"))
        del avoid

    # ------------------------------------------------------------ definitions

    def define_function(self, fdef: FunctionDef) -> FunctionDef:
        from . import templates as tpl

        f = fdef.symbol
        if f.name in self.symbols:
            raise TheoryError(f"duplicate-symbol: {f.name}")
        for s in f.argsorts + (f.sort,):
            if s not in self.sorts:
                raise TheoryError(f"unknown sort {s}")
        self.symbols[f.name] = f
        try:
            self._check_definition(fdef)
            fdef.recursive = any(
                f.name in symbols(e.rhs) for e in fdef.equations
            )
            fdef.style = _style(fdef)
            if fdef.recursive:
                fdef.templates = tpl.enumerate_templates(self, fdef)
                if not fdef.templates and not fdef.partial:
                    raise Rejected("termination", f"no valid induction template for {f.name}")
            self.functions[f.name] = fdef
            if not fdef.partial:
                complete, witness = self.check_complete(fdef)
                if not complete:
                    raise Rejected(
                        "completeness", f"{f.name} has no equation covering {witness}"
                    )
        except Exception:
            self.symbols.pop(f.name, None)
            self.functions.pop(f.name, None)
            raise
        self.order[f.name] = len(self.order)
        self.log.append(f"defun {f.name}")
        return fdef

    def _check_definition(self, fdef: FunctionDef) -> None:
        f = fdef.symbol
        if not fdef.equations:
            raise Rejected("shape", f"{f.name} has no equations")
        for e in fdef.equations:
            if type(e.lhs) is not App or e.lhs.sym.name != f.name:
                raise Rejected("shape", f"left-hand side {e.lhs} is not headed by {f.name}")
            vs = []
            for a in e.lhs.args:
                if not is_constructor_term(a):
                    raise Rejected("shape", f"argument {a} of {e.lhs} is not a constructor pattern")
                vs.extend(_var_occurrences(a))
            if len(vs) != len(set(vs)):
                raise Rejected("linearity", f"left-hand side {e.lhs} is not linear")
            lvars = set(vs)
            extra = set(variables(e.rhs)) - lvars
            for c in e.conds:
                extra |= set(variables(c.lhs)) | set(variables(c.rhs))
                extra -= lvars
                if f.name in symbols(c.lhs) | symbols(c.rhs):
                    raise Rejected(
                        "condition", f"condition {c} mentions the function {f.name} being defined"
                    )
            if extra:
                names = ", ".join(sorted(v.name for v in extra))
                raise Rejected("variables", f"{names} not bound by left-hand side {e.lhs}")
            for t in [e.rhs] + [s for c in e.conds for s in (c.lhs, c.rhs)]:
                for name in symbols(t):
                    if name != f.name and name not in self.symbols:
                        raise Rejected("shape", f"unknown symbol {name}")
        self._check_overlap(fdef)

    def _check_overlap(self, fdef: FunctionDef) -> None:
        eqs = fdef.equations
        for i in range(len(eqs)):
            for j in range(i + 1, len(eqs)):
                a = _canonical(eqs[i])
                b = _canonical(eqs[j])
                mgu = _unify_patterns(a.lhs, b.lhs)
                if mgu is None:
                    continue
                ca = {apply_subst(c, mgu) for c in a.conds}
                cb = {apply_subst(c, mgu) for c in b.conds}
                if any(_complement(c) in cb for c in ca):
                    continue
                if apply_subst(a.rhs, mgu) == apply_subst(b.rhs, mgu) and ca == cb:
                    continue
                if apply_subst(a.rhs, mgu) == apply_subst(b.rhs, mgu) and not ca and not cb:
                    continue
                raise Rejected(
                    "overlap",
                    f"equations {eqs[i]} and {eqs[j]} overlap without complementary conditions",
                )

    def check_complete(self, fdef: FunctionDef) -> tuple[bool, str]:
        rows = []
        for e in fdef.equations:
            ce = _canonical(e)
            rows.append((list(ce.lhs.args), list(ce.conds)))
        return self._complete_rows(rows, list(fdef.symbol.argsorts), [])

    def _complete_rows(self, rows, sorts, prefix) -> tuple[bool, str]:
        if not sorts:
            ok = _conds_complete([set(c) for _, c in rows])
            return ok, f"({', '.join(prefix)})" + ("" if ok else " under some condition")
        if all(type(r[0][0]) is Var for r in rows):
            return self._complete_rows([(r[0][1:], r[1]) for r in rows], sorts[1:], prefix + ["_"])
        sort = sorts[0]
        for c in self.ctors_of[sort]:
            sub = []
            for pats, conds in rows:
                p = pats[0]
                if type(p) is Var:
                    sub.append(([Var("_", s) for s in c.argsorts] + pats[1:], conds))
                elif p.sym.name == c.name:
                    sub.append((list(p.args) + pats[1:], conds))
            ok, w = self._complete_rows(sub, list(c.argsorts) + sorts[1:], prefix + [c.name])
            if not ok:
                return ok, w
        return True, ""

    # ------------------------------------------------------------ evaluation

    def evaluate(self, t: Term, budget: int | None = None) -> Term:
        """Innermost, leftmost evaluation of a ground term."""
        counter = [self.eval_budget if budget is None else budget]
        return self._eval(t, counter)

    def _eval(self, t: Term, counter: list) -> Term:
        if type(t) is Var:
            raise TheoryError(f"cannot evaluate non-ground term containing {t}")
        args = tuple(self._eval(a, counter) for a in t.args)
        if t.sym.kind == "constructor":
            return t if args == t.args else App(t.sym, args)
        u = App(t.sym, args)
        fdef = self.functions.get(t.sym.name)
        if fdef is None:
            raise TheoryError(f"undefined function {t.sym.name}")
        for e in fdef.equations:
            theta = match(e.lhs, u)
            if theta is None:
                continue
            if all(self._eval_cond(apply_subst(c, theta), counter) is True for c in e.conds):
                counter[0] -= 1
                if counter[0] < 0:
                    raise BudgetExhausted(f"evaluation budget exhausted on {t}")
                return self._eval(apply_subst(e.rhs, theta), counter)
        return u

    def _eval_cond(self, c: Lit, counter: list):
        a = self._eval(c.lhs, counter)
        b = self._eval(c.rhs, counter)
        if not (is_constructor_ground(a) and is_constructor_ground(b)):
            return None
        return (a == b) == c.pos

    def eval_lit(self, lit: Lit, budget: int | None = None):
        """True/False for a ground literal, None when stuck."""
        counter = [self.eval_budget if budget is None else budget]
        return self._eval_cond(lit, counter)

    def eval_clause(self, c: Clause, theta: dict, budget: int | None = None):
        """Truth value of a clause instance; None if some literal is stuck."""
        undecided = False
        for lit in c.lits:
            v = self.eval_lit(apply_subst(lit, theta), budget)
            if v is True:
                return True
            if v is None:
                undecided = True
        return None if undecided else False

    # ------------------------------------------------------------ lemmas

    def add_lemma(self, lemma: Lemma, mode: str = "assume", prover=None):
        bad = set(lemma.tags) - TAGS
        if bad:
            raise ShapeViolation(f"unknown tags {sorted(bad)}")
        rules = []
        if "rewrite" in lemma.tags:
            rules = rewrite_rules_of(lemma)
        elim = elim_lemma_of(lemma) if "elimination" in lemma.tags else None
        if "generalization" in lemma.tags and not lemma.clause.lits:
            raise ShapeViolation("empty generalization lemma")
        if "induction" in lemma.tags:
            _check_induction_shape(lemma)
        result = None
        if mode == "prove":
            if prover is None:
                raise TheoryError("prove mode requires a prover")
            result = prover(lemma.clause)
            if not result.proved:
                return result
            lemma.status = "proved"
        else:
            lemma.status = "assumed"
        self.lemmas.append(lemma)
        self.rewrite_rules.extend(rules)
        if elim is not None:
            self.elim_lemmas.append(elim)
        self.log.append(f"lemma {lemma.name} {lemma.status}")
        return result

    def lemmas_tagged(self, tag: str) -> list[Lemma]:
        return [lem for lem in self.lemmas if tag in lem.tags]


# ------------------------------------------------------------ module helpers


def _var_occurrences(t: Term) -> list[Var]:
    if type(t) is Var:
        return [t]
    return [v for a in t.args for v in _var_occurrences(a)]


def _style(fdef: FunctionDef) -> str:
    for e in fdef.equations:
        if any(type(a) is not Var for a in e.lhs.args):
            return "constructor"
    return "destructor"


def _canonical(e: PncEquation) -> PncEquation:
    """Rename variables after their argument path so that equations compare."""
    theta = {}

    def walk(t, path):
        if type(t) is Var:
            theta[t] = Var("#" + ".".join(map(str, path)), t.sort)
        else:
            for i, a in enumerate(t.args, 1):
                walk(a, path + (i,))

    walk(e.lhs, ())
    conds = tuple(_norm_lit(apply_subst(c, theta)) for c in e.conds)
    return PncEquation(apply_subst(e.lhs, theta), apply_subst(e.rhs, theta), conds)


def _norm_lit(lit: Lit) -> Lit:
    lit = _pred_lit(lit)
    if not lit.is_pred() and perm_smaller(lit.lhs, lit.rhs):
        return Lit(lit.pos, lit.rhs, lit.lhs)
    return lit


def _complement(lit: Lit) -> Lit:
    return lit.negate()


def _unify_patterns(a: Term, b: Term) -> dict | None:
    """Unifier of two variable-disjoint linear patterns (after canonical renaming
    the variable names encode paths, so bindings never chain)."""
    theta: dict = {}

    def go(x, y):
        if type(x) is Var:
            if type(y) is Var and x == y:
                return True
            theta[x] = y
            return True
        if type(y) is Var:
            theta[y] = x
            return True
        if x.sym.name != y.sym.name:
            return False
        return all(go(u, v) for u, v in zip(x.args, y.args))

    if not go(a, b):
        return None
    return theta


def _conds_complete(rows: list[set]) -> bool:
    """Propositional case-completeness of a family of condition conjunctions,
    by Shannon expansion on the atoms that occur."""
    if any(not r for r in rows):
        return True
    if not rows:
        return False
    lit = next(iter(rows[0]))
    neg = lit.negate()
    yes = [s - {lit} for s in rows if neg not in s]
    no = [s - {neg} for s in rows if lit not in s]
    return _conds_complete(yes) and _conds_complete(no)


def rewrite_rules_of(lemma: Lemma) -> list[RewriteRule]:
    lits = lemma.clause.lits
    if not lits:
        raise ShapeViolation(f"{lemma.name}: empty rewrite lemma")
    concl = _pred_lit(lits[0])
    conds = tuple(_pred_lit(lit.negate()) for lit in lits[1:])
    if concl.pos:
        lhs, rhs = concl.lhs, concl.rhs
    elif concl.is_pred():
        lhs, rhs = concl.lhs, FALSE
    else:
        raise ShapeViolation(f"{lemma.name}: a negative equation cannot be used for rewriting")
    if type(lhs) is Var:
        raise ShapeViolation(f"{lemma.name}: left-hand side is a variable")
    if not set(variables(rhs)) <= set(variables(lhs)):
        raise ShapeViolation(f"{lemma.name}: right-hand side has extra variables")
    perm = _is_permutative(lhs, rhs)
    return [RewriteRule(lemma.name, lhs, rhs, conds, perm)]


def _is_permutative(lhs: Term, rhs: Term) -> bool:
    theta = match(lhs, rhs)
    if theta is None:
        return False
    imgs = list(theta.values())
    return all(type(v) is Var for v in imgs) and len(set(imgs)) == len(imgs)


def elim_lemma_of(lemma: Lemma) -> ElimLemma:
    lits = lemma.clause.lits
    name = lemma.name
    if not lits or not lits[0].pos:
        raise ShapeViolation(f"{name}: first literal must be an equation t = x")
    tc, x = lits[0].lhs, lits[0].rhs
    if type(x) is not Var:
        tc, x = x, tc
    if type(x) is not Var or type(tc) is not App or tc.sym.kind != "constructor":
        raise ShapeViolation(f"{name}: first literal must equate a constructor term with a variable")
    if x in variables(tc):
        raise ShapeViolation(f"{name}: {x} occurs in {tc}")
    ys = variables(tc)
    if any(type(a) is not Var for a in tc.args) or len(ys) != len(tc.args):
        raise ShapeViolation(f"{name}: {tc} must apply a constructor to distinct variables")
    k = len(ys)
    if len(lits) < 1 + k:
        raise ShapeViolation(f"{name}: missing destructor literals")
    tail = lits[len(lits) - k:]
    middle = lits[1:len(lits) - k]
    dterms = {}
    for lit in tail:
        y, td = lit.lhs, lit.rhs
        if type(y) is not Var:
            y, td = td, y
        if lit.pos or y not in ys or y in dterms:
            raise ShapeViolation(f"{name}: trailing literal {lit} must be y != destructor term")
        if type(td) is not App or y in variables(td):
            raise ShapeViolation(f"{name}: trailing literal {lit} must be y != destructor term")
        dterms[y] = td
    if len(set(dterms.values())) != k:
        raise ShapeViolation(f"{name}: destructor terms must be distinct")
    for lit in middle:
        if set(variables(lit)) & set(ys):
            raise ShapeViolation(f"{name}: designated variable occurs in middle literal {lit}")
    return ElimLemma(name, tc, x, tuple(middle), dterms)


def _check_induction_shape(lemma: Lemma) -> None:
    lits = lemma.clause.lits
    if not lits or not lits[0].pos:
        raise ShapeViolation(f"{lemma.name}: induction lemma must start with a relation literal")
    concl = lits[0]
    if type(concl.lhs) is not App or len(concl.lhs.args) != 2:
        raise ShapeViolation(f"{lemma.name}: induction lemma must compare two weights")
    a, b = concl.lhs.args
    if type(a) is App and type(b) is App and a.sym.name == b.sym.name and b.sym.kind == "defined":
        if not all(type(v) is Var for v in b.args) or len(set(b.args)) != len(b.args):
            raise ShapeViolation(f"{lemma.name}: the larger weight must apply to distinct variables")


def check_sorts(t: Term) -> None:
    if type(t) is App:
        for a, s in zip(t.args, t.sym.argsorts):
            if a.sort != s:
                raise SortError(f"{a} has sort {a.sort}, expected {s}")
            check_sorts(a)
