"""Definition-time recursion analysis: relational descriptions and induction templates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .terms import App, Lit, Term, Var, apply_subst, contains, match, size

MAX_LEX = 3


@dataclass(frozen=True)
class RelationalTriple:
    lhs: App
    calls: tuple
    conds: tuple = ()

    def __repr__(self):
        calls = ", ".join(map(repr, self.calls))
        conds = ", ".join(map(repr, self.conds))
        return f"<{self.lhs}, {{{calls}}}, {{{conds}}}>"


@dataclass(frozen=True)
class WfRelation:
    kind: str  # 'nat-less', 'structural-size' or 'lexicographic'
    components: tuple = ()
    bound: int = 0

    def __str__(self):
        if self.kind == "lexicographic":
            inner = ",".join(map(str, self.components))
            return f"lexlimles<{self.bound}>({inner})"
        return self.kind


@dataclass
class ValidityObligation:
    triple: int
    call: int
    weights: tuple  # (call weight terms, lhs weight terms)
    conds: tuple
    discharged_by: str = ""

    def __repr__(self):
        small, big = self.weights
        body = f"{_wstr(small)} < {_wstr(big)}"
        if self.conds:
            body += " <= " + " & ".join(map(repr, self.conds))
        return body


@dataclass
class InductionTemplate:
    function: str
    weight: tuple  # argument positions, one entry per lexicographic component
    relation: WfRelation
    description: tuple
    measured: frozenset = frozenset()
    changeable: frozenset = frozenset()
    unchangeable: frozenset = frozenset()
    ident: str = ""
    obligations: list = field(default_factory=list)

    def weight_str(self) -> str:
        comps = ",".join(f"<{i}>" for i in self.weight)
        return comps if len(self.weight) == 1 else f"[{comps}]"

    def dump_line(self) -> str:
        measured = ",".join(map(str, sorted(self.measured)))
        return (
            f"{self.function}, {self.weight_str()}, {{{measured}}}, "
            f"{self.relation}, {len(self.description)}"
        )


def _wstr(ts) -> str:
    return ts[0].__repr__() if len(ts) == 1 else "[" + ", ".join(map(repr, ts)) + "]"


def extract_description(fdef) -> list[RelationalTriple]:
    """One triple per equation with recursive calls; conditions kept in full."""
    out = []
    for e in fdef.equations:
        calls = _calls(e.rhs, fdef.name)
        if calls:
            conds = e.conds if fdef.style == "destructor" else ()
            out.append(RelationalTriple(e.lhs, tuple(calls), tuple(conds)))
    return out


def _calls(t: Term, f: str) -> list[App]:
    """Recursive calls in post-order, so inner calls precede outer ones."""
    out: list = []

    def walk(u):
        if type(u) is App:
            for a in u.args:
                walk(a)
            if u.sym.name == f and u not in out:
                out.append(u)

    walk(t)
    return out


def _guards(theory, triple: RelationalTriple, positions) -> tuple:
    """Disequations against a base constructor on the variables at `positions`."""
    keep = []
    vs = {triple.lhs.args[i - 1] for i in positions}
    for c in triple.conds:
        if c.pos:
            continue
        a, b = c.lhs, c.rhs
        if type(a) is not Var:
            a, b = b, a
        if a in vs and type(b) is App and not b.args and b.sym.kind == "constructor":
            keep.append(c)
    return tuple(keep)


def descends(theory, small: Term, big: Term, conds) -> str:
    """How `small` < `big` is justified, or '' when it is not."""
    if small != big and type(big) is App and contains(big, small):
        if _constructor_path(big, small):
            return "syntactic"
    base = _destructor_base(theory, small)
    if base is not None and base == big:
        inner = _innermost_destructor(theory, small)
        ctor_name = theory.functions[inner].destructor_of[0]
        others = [c for c in theory.ctors_of[big.sort] if c.name != ctor_name]
        need = {Lit(False, big, App(c)) for c in others}
        have = set()
        for c in conds:
            have.add(c)
            have.add(Lit(c.pos, c.rhs, c.lhs))
        if all(not c.argsorts for c in others) and need <= have:
            return "destructor"
    if _lemma_descends(theory, small, big, conds):
        return "lemma"
    return ""


def _constructor_path(big: Term, small: Term) -> bool:
    if big == small:
        return True
    if type(big) is not App or big.sym.kind != "constructor":
        return False
    return any(_constructor_path(a, small) for a in big.args)


def _destructor_base(theory, t: Term):
    """For d1(...dk(u)) with k >= 1 sort-preserving destructors, return u."""
    k = 0
    while type(t) is App and theory.is_destructor(t.sym.name) and t.sort == t.args[0].sort:
        dflt = theory.functions[t.sym.name]
        if not _nullary_defaults(theory, dflt):
            return None
        t = t.args[0]
        k += 1
    return t if k else None


def _nullary_defaults(theory, fdef) -> bool:
    ctor = fdef.destructor_of[0]
    for e in fdef.equations:
        if e.lhs.args[0].sym.name != ctor and not (type(e.rhs) is App and not e.rhs.args):
            return False
    return True


def _innermost_destructor(theory, t: Term) -> str:
    name = None
    while type(t) is App and theory.is_destructor(t.sym.name) and t.sort == t.args[0].sort:
        name = t.sym.name
        t = t.args[0]
    return name


def _lemma_descends(theory, small: Term, big: Term, conds) -> bool:
    """Discharge small < big with a proved induction lemma r(a, b) <= H."""
    if not theory.nat_like(big.sort):
        return False
    have = set(conds) | {Lit(c.pos, c.rhs, c.lhs) for c in conds}
    for lem in theory.lemmas_tagged("induction"):
        lits = lem.clause.lits
        concl = lits[0]
        if not concl.pos or not concl.is_pred() or len(concl.lhs.args) != 2:
            continue
        if not _is_size_order(theory, concl.lhs.sym, big.sort):
            continue
        pat = App(concl.lhs.sym, concl.lhs.args)
        tgt = App(concl.lhs.sym, (small, big))
        theta = match(pat, tgt)
        if theta is None:
            continue
        hyps = [apply_subst(lit.negate(), theta) for lit in lits[1:]]
        if all(h in have for h in hyps):
            return True
    return False


def _is_size_order(theory, sym, sort: str) -> bool:
    """Ground check that `sym` behaves as the size order on small terms of `sort`."""
    cache = theory.__dict__.setdefault("_size_order_cache", {})
    key = (sym.name, sort)
    if key not in cache:
        ok = sym.argsorts == (sort, sort) and sym.name in theory.functions
        if ok:
            from .theory import TRUE

            pool = theory.ground_terms(sort, 5)
            for a, b in itertools.product(pool, pool):
                got = theory.evaluate(App(sym, (a, b)))
                if (got == TRUE) != (size(a) < size(b)):
                    ok = False
                    break
        cache[key] = ok
    return cache[key]


def _relation_for(theory, sort: str) -> WfRelation:
    return WfRelation("nat-less" if theory.nat_like(sort) else "structural-size")


def validate_template(theory, tpl: InductionTemplate) -> tuple[bool, ValidityObligation | None]:
    """Check every (triple, call) obligation; record how each was discharged."""
    tpl.obligations = []
    for ti, tr in enumerate(tpl.description):
        for ci, call in enumerate(tr.calls):
            small = tuple(call.args[i - 1] for i in tpl.weight)
            big = tuple(tr.lhs.args[i - 1] for i in tpl.weight)
            ob = ValidityObligation(ti, ci, (small, big), tr.conds)
            how = ""
            for k in range(len(small)):
                how = descends(theory, small[k], big[k], tr.conds)
                if how:
                    if len(small) > 1:
                        how = f"lexicographic({k + 1}:{how})"
                    break
                if small[k] != big[k]:
                    break
            ob.discharged_by = how
            tpl.obligations.append(ob)
            if not how:
                return False, ob
    return True, None


def enumerate_templates(theory, fdef) -> list[InductionTemplate]:
    full = extract_description(fdef)
    n = fdef.symbol.arity
    candidates = [(i,) for i in range(1, n + 1)]
    for k in range(2, min(MAX_LEX, n) + 1):
        candidates.extend(itertools.permutations(range(1, n + 1), k))
    kept: list[InductionTemplate] = []
    for weight in candidates:
        mset = frozenset(weight)
        if any(t.measured <= mset for t in kept):
            continue
        desc = tuple(
            RelationalTriple(tr.lhs, tr.calls, _guards(theory, tr, weight)) for tr in full
        )
        sorts = [fdef.symbol.argsorts[i - 1] for i in weight]
        if len(weight) == 1:
            rel = _relation_for(theory, sorts[0])
        else:
            rel = WfRelation(
                "lexicographic", tuple(_relation_for(theory, s) for s in sorts), len(weight) + 1
            )
        tpl = InductionTemplate(fdef.name, weight, rel, desc, measured=mset)
        ok, _ = validate_template(theory, tpl)
        if not ok:
            continue
        changeable = frozenset(
            i
            for i in mset
            if any(c.args[i - 1] != tr.lhs.args[i - 1] for tr in desc for c in tr.calls)
        )
        tpl.changeable = changeable
        tpl.unchangeable = mset - changeable
        tpl.ident = f"{fdef.name}#{len(kept) + 1}"
        kept.append(tpl)
    return kept


def weight_value(tpl: InductionTemplate, args) -> tuple:
    """Ground weight of an argument tuple: sizes at the measured positions."""
    return tuple(size(args[i - 1]) for i in tpl.weight)


def dump_templates(theory, names=None) -> str:
    lines = []
    for name, fdef in theory.functions.items():
        if names is not None and name not in names:
            continue
        for tpl in fdef.templates:
            lines.append(tpl.dump_line())
    return "\n".join(lines) + ("\n" if lines else "")
