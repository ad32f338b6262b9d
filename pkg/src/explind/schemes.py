"""Proof-time recursion analysis: induction schemes and their combination."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .terms import (
    App,
    Clause,
    Lit,
    Var,
    apply_subst,
    clause_positions,
    contains,
    format_position,
    match,
    subterm_at,
    variables,
)


@dataclass
class StepCase:
    xi: dict  # constructor substitution, only non-identity bindings
    hyps: list  # substitutions mu_j over the scheme domain
    cond: tuple  # literals


@dataclass
class InductionScheme:
    positions: list
    ind_vars: list
    cases: list
    hitting: Fraction
    domain: list
    origin: list
    created: int = 0
    template: object = None  # set only for schemes built directly from a template
    occurrence: tuple = ()
    counts: tuple | None = None  # raw (hits, total) before any combination

    def ratio(self) -> str:
        if self.counts is not None:
            return f"{self.counts[0]}/{self.counts[1]}"
        h = self.hitting
        return str(h.numerator) if h.denominator == 1 else f"{h.numerator}/{h.denominator}"

    def describe(self) -> str:
        pos = ",".join(format_position(p) for p in sorted(self.positions))
        vs = ",".join(v.name for v in self.ind_vars)
        lines = [f"scheme positions={{{pos}}} vars={{{vs}}} hitting={self.ratio()}"
                 f" from {'+'.join(self.origin)}"]
        for k, sc in enumerate(self.cases, 1):
            lines.append(f"  case {k}: xi={_fmt_subst(sc.xi)} C={{{', '.join(map(repr, sc.cond))}}}")
            for j, mu in enumerate(sc.hyps, 1):
                lines.append(f"    mu{k},{j}={_fmt_subst(mu)}")
        return "\n".join(lines)

    def summary(self) -> str:
        pos = ",".join(format_position(p) for p in sorted(self.positions))
        return f"scheme positions={{{pos}}} hitting={self.ratio()}"


def _fmt_subst(theta: dict) -> str:
    if not theta:
        return "id"
    return "{" + ", ".join(f"{v}->{t}" for v, t in sorted(theta.items(), key=lambda kv: kv[0].name)) + "}"


# ------------------------------------------------------------ applicability


def _fresh_name(base: str, avoid: set) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    avoid.add(name)
    return name


def constructor_match(pattern: App, term: App, fixed: set, avoid: set):
    """Find xi (constructor substitution on the variables of `term`, identity on
    `fixed`) and sigma with pattern.sigma = term.xi.  Returns (xi, sigma) or None."""
    xi: dict = {}
    binds: list = []

    def go(p, t) -> bool:
        if type(p) is Var:
            binds.append((p, t))
            return True
        if type(t) is Var:
            if t in xi:
                return go(p, xi[t])
            if t in fixed or p.sym.kind != "constructor":
                return False
            args = []
            for k, (a, s) in enumerate(zip(p.args, p.sym.argsorts)):
                if p.sym.arity == 1 and s == t.sort:
                    base = t.name
                elif type(a) is Var:
                    base = a.name
                else:
                    base = f"{t.name}{k + 1}"
                args.append(Var(_fresh_name(base, avoid), s))
            xi[t] = App(p.sym, tuple(args))
            return go(p, xi[t])
        if p.sym.name != t.sym.name or t.sym.kind != "constructor" and p.sym.kind == "constructor":
            return False
        return all(go(a, b) for a, b in zip(p.args, t.args))

    for a, b in zip(pattern.args, term.args):
        if not go(a, b):
            return None
    xi = _resolve(xi)
    sigma = {}
    for v, t in binds:
        sigma[v] = apply_subst(t, xi)
    return xi, sigma


def _resolve(xi: dict) -> dict:
    changed = True
    while changed:
        changed = False
        for v, t in list(xi.items()):
            u = apply_subst(t, xi)
            if u != t:
                xi[v] = u
                changed = True
    return xi


def applicable(theory, tpl, goal: Clause, occ: tuple):
    """Per-triple (xi, sigma) pairs if `tpl` applies at `occ`, else None."""
    term = subterm_at(goal, occ)
    if type(term) is not App or term.sym.name != tpl.function:
        return None
    args = term.args
    chvars = []
    for i in sorted(tpl.changeable):
        a = args[i - 1]
        if type(a) is not Var or a in goal.marks or a in chvars:
            return None
        chvars.append(a)
    fixed = set()
    for i in tpl.unchangeable:
        fixed |= set(variables(args[i - 1]))
    if fixed & set(chvars):
        return None
    fdef = theory.functions[tpl.function]
    avoid = {v.name for v in variables(goal)}
    out = []
    for tr in tpl.description:
        lhs = _rename_template(tr, avoid)
        if fdef.style == "constructor":
            res = constructor_match(lhs[0], term, fixed, set(avoid))
            if res is None:
                return None
        else:
            sigma = match(lhs[0], term)
            if sigma is None:
                return None
            res = ({}, sigma)
        out.append((res[0], res[1], lhs))
    return out


def _rename_template(tr, avoid: set):
    """Rename triple variables apart from the goal (suffix '#')."""
    theta = {}
    for v in variables(tr.lhs):
        theta[v] = Var(v.name + "#", v.sort)
    return (
        apply_subst(tr.lhs, theta),
        tuple(apply_subst(c, theta) for c in tr.calls),
        tuple(apply_subst(c, theta) for c in tr.conds),
    )


# ------------------------------------------------------------ building


def build_scheme(theory, tpl, goal: Clause, occ: tuple, created: int = 0) -> InductionScheme | None:
    res = applicable(theory, tpl, goal, occ)
    if res is None:
        return None
    term = subterm_at(goal, occ)
    args = term.args
    n = len(args)
    domain = variables(term)
    ind_vars = [args[i - 1] for i in sorted(tpl.changeable)]
    unmeasured = [i for i in range(1, n + 1) if i not in tpl.measured]
    hits = 0
    total = 0
    cases = []
    for xi, sigma, (lhs, calls, conds) in res:
        hyps = []
        for call in calls:
            target = [apply_subst(a, sigma) for a in call.args]
            mu: dict = {}
            for i in sorted(tpl.unchangeable):
                for v in variables(args[i - 1]):
                    mu[v] = v
            for i in sorted(tpl.changeable):
                mu[args[i - 1]] = target[i - 1]
            for i in unmeasured:
                ext = match(args[i - 1], target[i - 1], mu)
                if ext is not None:
                    mu = ext
            for v in domain:
                mu.setdefault(v, v)
            for i in range(n):
                total += 1
                if apply_subst(args[i], mu) == target[i]:
                    hits += 1
            hyps.append(mu)
        cond = tuple(apply_subst(c, sigma) for c in conds)
        cases.append(StepCase(dict(xi), hyps, cond))
    cases = normalize(cases)
    hitting = Fraction(hits, total) if total else Fraction(0)
    return InductionScheme(
        positions=[occ],
        ind_vars=ind_vars,
        cases=cases,
        hitting=hitting,
        domain=domain,
        origin=[tpl.ident],
        created=created,
        template=tpl,
        occurrence=occ,
        counts=(hits, total),
    )


def normalize(cases: list) -> list:
    """Merge step cases equal in xi and condition, uniting their hypotheses."""
    out: list[StepCase] = []
    for sc in cases:
        for o in out:
            if o.xi == sc.xi and set(o.cond) == set(sc.cond):
                for mu in sc.hyps:
                    if mu not in o.hyps:
                        o.hyps.append(mu)
                break
        else:
            out.append(StepCase(dict(sc.xi), list(sc.hyps), tuple(sc.cond)))
    return out


# ------------------------------------------------------------ subsumption


def _xi_compatible(x1: dict, x2: dict) -> bool:
    return all(x2.get(v, v) == t for v, t in x1.items()) or False


def _xi_consistent(x1: dict, x2: dict) -> bool:
    return all(x2.get(v, t) == t for v, t in x1.items())


def _mu_subsumed(mu: dict, mu2: dict) -> bool:
    for x, t in mu.items():
        if x not in mu2:
            return False
        t2 = mu2[x]
        if t == x and t2 != x:
            return False
        if not contains(t2, t):
            return False
    return True


def _injections(items_a, items_b, ok, injective: bool):
    """Yield maps a-index -> b-index with ok(a, b), injective if requested."""

    def go(i, used, acc):
        if i == len(items_a):
            yield dict(acc)
            return
        for j, b in enumerate(items_b):
            if injective and j in used:
                continue
            if ok(items_a[i], b):
                acc[i] = j
                yield from go(i + 1, used | {j}, acc)
                del acc[i]

    yield from go(0, frozenset(), {})


def _case_subsumed(a: StepCase, b: StepCase, injective: bool) -> bool:
    if not _xi_compatible(a.xi, b.xi):
        return False
    if not set(a.cond) <= set(b.cond):
        return False
    return next(_injections(a.hyps, b.hyps, _mu_subsumed, injective), None) is not None


def subsumes(a: InductionScheme, b: InductionScheme, injective: bool = True) -> bool:
    """True iff scheme `a` is subsumed by scheme `b`."""
    return (
        next(
            _injections(a.cases, b.cases, lambda x, y: _case_subsumed(x, y, injective), injective),
            None,
        )
        is not None
    )


def absorb(into: InductionScheme, other: InductionScheme) -> InductionScheme:
    """Bookkeeping when `other` is subsumed by or merged into `into`."""
    into.hitting = into.hitting + other.hitting
    into.counts = None
    for p in other.positions:
        if p not in into.positions:
            into.positions.append(p)
    for v in other.ind_vars:
        if v not in into.ind_vars:
            into.ind_vars.append(v)
    into.template = None
    return into


# ------------------------------------------------------------ merging


def mu_mergeable(m1: dict, m2: dict, nontrivial: bool) -> bool:
    shared = [x for x in m1 if x in m2]
    if any(m1[x] != m2[x] for x in shared):
        return False
    if nontrivial:
        return any(m1[y] != y for y in shared)
    return True


def _cases_mergeable(a: StepCase, b: StepCase) -> bool:
    if not _xi_consistent(a.xi, b.xi):
        return False
    return all(any(mu_mergeable(m1, m2, True) for m2 in b.hyps) for m1 in a.hyps)


def _merge_cases(a: StepCase, b: StepCase, va: list, vb: list) -> StepCase:
    hyps = []
    for m2 in b.hyps:
        partners = [m1 for m1 in a.hyps if mu_mergeable(m1, m2, False)]
        if partners:
            for m1 in partners:
                mu = dict(m1)
                mu.update(m2)
                if mu not in hyps:
                    hyps.append(mu)
        else:
            mu = {v: v for v in va if v not in vb}
            mu.update(m2)
            if mu not in hyps:
                hyps.append(mu)
    for m1 in a.hyps:
        if not any(mu_mergeable(m1, m2, False) for m2 in b.hyps):
            mu = {v: v for v in vb if v not in va}
            mu.update(m1)
            if mu not in hyps:
                hyps.append(mu)
    xi = dict(b.xi)
    xi.update(a.xi)
    cond = tuple(dict.fromkeys(a.cond + b.cond))
    return StepCase(xi, hyps, cond)


def _pad(sc: StepCase, extra: list) -> StepCase:
    hyps = []
    for mu in sc.hyps:
        m = {v: v for v in extra}
        m.update(mu)
        hyps.append(m)
    return StepCase(dict(sc.xi), hyps, sc.cond)


def merge(a: InductionScheme, b: InductionScheme, injective: bool = True) -> InductionScheme | None:
    """Merge scheme `a` into `b`, or None when they are not mergeable."""
    mapping = next(_injections(a.cases, b.cases, _cases_mergeable, injective), None)
    if mapping is None:
        return None
    va, vb = a.domain, b.domain
    domain = list(dict.fromkeys(vb + va))
    cases = []
    images = set(mapping.values())
    for j, sc in enumerate(b.cases):
        sources = [i for i, jj in mapping.items() if jj == j]
        if not sources:
            cases.append(_pad(sc, [v for v in va if v not in vb]))
        for i in sources:
            cases.append(_merge_cases(a.cases[i], sc, va, vb))
    del images
    merged = InductionScheme(
        positions=list(b.positions),
        ind_vars=list(b.ind_vars),
        cases=normalize(cases),
        hitting=b.hitting,
        domain=domain,
        origin=list(b.origin),
        created=b.created,
    )
    return absorb(merged, a)


# ------------------------------------------------------------ pipeline


def flawed(s: InductionScheme, others) -> bool:
    for o in others:
        if o is s:
            continue
        if set(s.ind_vars) & set(o.domain):
            return True
    return False


def filter_flawed(schemes: list) -> list:
    keep = [s for s in schemes if not flawed(s, schemes)]
    return keep if keep else list(schemes)


def select(schemes: list) -> InductionScheme:
    if not schemes:
        raise ValueError("empty-set: no induction scheme to select")
    return max(schemes, key=lambda s: (s.hitting, len(s.positions), -s.created))


@dataclass
class SchemeReport:
    built: list = field(default_factory=list)
    events: list = field(default_factory=list)
    final: list = field(default_factory=list)
    selected: InductionScheme | None = None

    def lines(self) -> list[str]:
        out = []
        for s in self.built:
            out.append(f"built #{s.created}: " + s.describe())
        out.extend(self.events)
        for s in self.final:
            out.append(f"candidate #{s.created}: " + s.summary())
        if self.selected is not None:
            out.append(f"selected #{self.selected.created}: " + self.selected.describe())
        return out


def _copy(s: InductionScheme) -> InductionScheme:
    return InductionScheme(
        list(s.positions),
        list(s.ind_vars),
        [StepCase(dict(c.xi), list(c.hyps), c.cond) for c in s.cases],
        s.hitting,
        list(s.domain),
        list(s.origin),
        s.created,
        s.template,
        s.occurrence,
        s.counts,
    )


def build_all(theory, goal: Clause) -> list:
    """Template-major creation order: functions in definition order, each
    template in turn, occurrences in clause order."""
    occs: dict[str, list] = {}
    for p, t in clause_positions(goal):
        if type(t) is App and t.sym.name in theory.functions:
            occs.setdefault(t.sym.name, []).append(p)
    out = []
    for name in sorted(occs, key=lambda n: theory.order.get(n, 0)):
        fdef = theory.functions[name]
        for tpl in fdef.templates:
            for p in occs[name]:
                s = build_scheme(theory, tpl, goal, p, len(out) + 1)
                if s is not None:
                    out.append(s)
    return out


def run_pipeline(theory, goal: Clause, injective: bool = True) -> tuple:
    report = SchemeReport()
    schemes = build_all(theory, goal)
    report.built = [_copy(s) for s in schemes]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(schemes)), 2):
            a, b = schemes[i], schemes[j]
            if subsumes(b, a, injective):
                absorb(a, b)
                report.events.append(f"subsume #{b.created} into #{a.created}: {a.summary()}")
                del schemes[j]
                changed = True
                break
            if subsumes(a, b, injective):
                absorb(b, a)
                report.events.append(f"subsume #{a.created} into #{b.created}: {b.summary()}")
                del schemes[i]
                changed = True
                break
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(schemes)), 2):
            a, b = schemes[i], schemes[j]
            m = merge(a, b, injective)
            if m is not None:
                report.events.append(f"merge #{a.created} into #{b.created}: {m.summary()}")
                schemes[j] = m
                del schemes[i]
                changed = True
                break
            m = merge(b, a, injective)
            if m is not None:
                report.events.append(f"merge #{b.created} into #{a.created}: {m.summary()}")
                schemes[i] = m
                del schemes[j]
                changed = True
                break
    kept = filter_flawed(schemes)
    for s in schemes:
        if s not in kept:
            report.events.append(f"flawed #{s.created}: {s.summary()}")
    if len(kept) == len(schemes) and len(schemes) > 1 and all(flawed(s, schemes) for s in schemes):
        report.events.append("all schemes flawed: keeping all")
    report.final = kept
    if kept:
        report.selected = select(kept)
    return report.selected, report


# ------------------------------------------------------------ instantiation


def _missing_patterns(theory, rows: list, sorts: list, avoid: set) -> list:
    """Constructor patterns (lists of terms) not covered by any row."""
    if not sorts:
        return [] if rows else [[]]
    if not rows:
        return [[None] * len(sorts)]
    if all(type(r[0]) is Var for r in rows):
        rest = _missing_patterns(theory, [r[1:] for r in rows], sorts[1:], avoid)
        return [[None] + m for m in rest]
    out = []
    for c in theory.ctors_of[sorts[0]]:
        sub = []
        for r in rows:
            p = r[0]
            if type(p) is Var:
                sub.append([Var("_", s) for s in c.argsorts] + r[1:])
            elif p.sym.name == c.name:
                sub.append(list(p.args) + r[1:])
        for m in _missing_patterns(theory, sub, list(c.argsorts) + sorts[1:], avoid):
            k = c.arity
            out.append([("ctor", c, m[:k])] + m[k:])
    return out


def _pattern_term(p, var: Var, avoid: set):
    if p is None:
        return var
    _, c, args = p
    built = []
    for k, (a, s) in enumerate(zip(args, c.argsorts)):
        base = var.name if (c.arity == 1 and s == var.sort) else f"{var.name}{k + 1}"
        fresh = Var(_fresh_name(base, avoid), s)
        built.append(_pattern_term(a, fresh, avoid))
    return App(c, tuple(built))


def base_substitutions(theory, steps: list, domain: list, avoid: set) -> list:
    xis = []
    for sc in steps:
        if sc.xi not in xis:
            xis.append(sc.xi)
    dom = [v for v in domain if any(v in xi for xi in xis)]
    if not dom:
        return []
    rows = [[xi.get(v, v) for v in dom] for xi in xis]
    out = []
    for m in _missing_patterns(theory, rows, [v.sort for v in dom], avoid):
        names = set(avoid)
        xi = {}
        for v, p in zip(dom, m):
            t = _pattern_term(p, v, names)
            if t != v:
                xi[v] = t
        out.append(xi)
    return out


def instantiate(theory, s: InductionScheme, goal: Clause) -> list[Clause]:
    goal = Clause(goal.lits)
    avoid = {v.name for v in variables(goal)}
    for sc in s.cases:
        for t in sc.xi.values():
            avoid |= {v.name for v in variables(t)}
    out: list[Clause] = []
    for xi in base_substitutions(theory, s.cases, s.domain, avoid):
        out.append(apply_subst(goal, xi))
    groups: dict = {}
    for sc in s.cases:
        key = tuple(sorted(((v.name, repr(t)) for v, t in sc.xi.items())))
        groups.setdefault(key, []).append(sc)
    for scs in groups.values():
        conds = [sc.cond for sc in scs]
        if all(conds):
            base_lits = []
            for choice in itertools.product(*conds):
                lits = list(dict.fromkeys(choice))
                if not any(set(b) <= set(lits) for b in base_lits):
                    base_lits = [b for b in base_lits if not set(lits) <= set(b)]
                    base_lits.append(lits)
            g = apply_subst(goal, scs[0].xi)
            for lits in base_lits:
                out.append(Clause(list(g.lits) + lits))
    for sc in s.cases:
        g = apply_subst(goal, sc.xi)
        negc = [c.negate() for c in sc.cond]
        hyp_instances = [apply_subst(goal, mu).lits for mu in sc.hyps]
        for choice in itertools.product(*hyp_instances):
            lits = list(g.lits) + negc + [lit.negate() for lit in choice]
            out.append(Clause(list(dict.fromkeys(lits))))
    return out


def case_descriptions(theory, s: InductionScheme, goal: Clause) -> list:
    """All (xi, condition literals that must hold) cases, base and step."""
    avoid = {v.name for v in variables(goal)}
    for sc in s.cases:
        for t in sc.xi.values():
            avoid |= {v.name for v in variables(t)}
    out = [(xi, ()) for xi in base_substitutions(theory, s.cases, s.domain, avoid)]
    groups: dict = {}
    for sc in s.cases:
        key = tuple(sorted(((v.name, repr(t)) for v, t in sc.xi.items())))
        groups.setdefault(key, []).append(sc)
    for scs in groups.values():
        conds = [sc.cond for sc in scs]
        if all(conds):
            for choice in itertools.product(*conds):
                out.append((scs[0].xi, tuple(c.negate() for c in dict.fromkeys(choice))))
    for sc in s.cases:
        out.append((sc.xi, sc.cond))
    return out


def lit_neg(lit: Lit) -> Lit:
    return lit.negate()
