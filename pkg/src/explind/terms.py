"""Many-sorted terms, literals and clauses.

Terms are immutable and hash-consed only by value: equality is structural,
hashes are cached.  Positions are tuples of 1-based indices.  For a clause the
first index picks a literal, the second picks the equation side (1 = lhs,
2 = rhs) and the rest descend into arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

Position = tuple


class TermError(Exception):
    pass


class InvalidPosition(TermError):
    pass


class SortError(TermError):
    pass


_INTERN: dict[tuple[str, str], int] = {}


def intern(kind: str, name: str) -> int:
    """Index of a name in the global intern table, allocated on first use."""
    key = (kind, name)
    idx = _INTERN.get(key)
    if idx is None:
        idx = len(_INTERN)
        _INTERN[key] = idx
    return idx


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str  # 'constructor' or 'defined'
    argsorts: tuple
    sort: str

    def __post_init__(self):
        intern("f", self.name)

    @property
    def arity(self) -> int:
        return len(self.argsorts)


class Term:
    __slots__ = ()

    def is_var(self) -> bool:
        return False


class Var(Term):
    __slots__ = ("name", "sort", "_h")

    def __init__(self, name: str, sort: str):
        self.name = name
        self.sort = sort
        self._h = hash(("v", name, sort))

    def is_var(self) -> bool:
        return True

    def __eq__(self, other):
        return self is other or (
            type(other) is Var and self.name == other.name and self.sort == other.sort
        )

    def __hash__(self):
        return self._h

    def __repr__(self):
        return self.name

    __str__ = __repr__


class App(Term):
    __slots__ = ("sym", "args", "_h", "_size")

    def __init__(self, sym: Symbol, args: tuple = ()):
        args = tuple(args)
        if len(args) != sym.arity:
            raise SortError(f"{sym.name} expects {sym.arity} arguments, got {len(args)}")
        for a, s in zip(args, sym.argsorts):
            if a.sort != s:
                raise SortError(f"argument {a} of {sym.name} has sort {a.sort}, expected {s}")
        self.sym = sym
        self.args = args
        self._h = hash((sym.name, args))
        self._size = 1 + sum(size(a) for a in args)

    @property
    def fn(self) -> str:
        return self.sym.name

    @property
    def sort(self) -> str:
        return self.sym.sort

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is App
            and self._h == other._h
            and self.sym.name == other.sym.name
            and self.args == other.args
        )

    def __hash__(self):
        return self._h

    def __repr__(self):
        if not self.args:
            return self.sym.name
        return f"{self.sym.name}({', '.join(map(repr, self.args))})"

    __str__ = __repr__


Subst = Mapping[Var, Term]


def size(t: Term) -> int:
    return 1 if type(t) is Var else t._size


def is_constructor_term(t: Term) -> bool:
    """Only constructors and variables."""
    if type(t) is Var:
        return True
    return t.sym.kind == "constructor" and all(is_constructor_term(a) for a in t.args)


def is_constructor_ground(t: Term) -> bool:
    if type(t) is Var:
        return False
    return t.sym.kind == "constructor" and all(is_constructor_ground(a) for a in t.args)


def is_ground(t: Term) -> bool:
    if type(t) is Var:
        return False
    return all(is_ground(a) for a in t.args)


def variables(t) -> list[Var]:
    """Variables in order of first occurrence (terms, literals or clauses)."""
    out: dict[Var, None] = {}
    _collect_vars(t, out)
    return list(out)


def _collect_vars(t, out: dict) -> None:
    if type(t) is Var:
        out[t] = None
    elif type(t) is App:
        for a in t.args:
            _collect_vars(a, out)
    elif type(t) is Lit:
        _collect_vars(t.lhs, out)
        _collect_vars(t.rhs, out)
    elif type(t) is Clause:
        for lit in t.lits:
            _collect_vars(lit, out)
    else:
        raise TypeError(t)


def symbols(t: Term) -> set[str]:
    out: set[str] = set()

    def walk(u):
        if type(u) is App:
            out.add(u.sym.name)
            for a in u.args:
                walk(a)

    walk(t)
    return out


def subterms(t: Term) -> Iterator[tuple[Position, Term]]:
    """Pre-order walk yielding (path, subterm)."""
    stack = [((), t)]
    while stack:
        path, u = stack.pop()
        yield path, u
        if type(u) is App:
            for i in range(len(u.args) - 1, -1, -1):
                stack.append((path + (i + 1,), u.args[i]))


def contains(t: Term, s: Term) -> bool:
    if t == s:
        return True
    return type(t) is App and any(contains(a, s) for a in t.args)


def term_at(t: Term, path: Position) -> Term:
    for i in path:
        if type(t) is not App or not 1 <= i <= len(t.args):
            raise InvalidPosition(path)
        t = t.args[i - 1]
    return t


def term_replace(t: Term, path: Position, new: Term) -> Term:
    if not path:
        if new.sort != t.sort:
            raise SortError(f"cannot put {new} of sort {new.sort} where {t.sort} is expected")
        return new
    if type(t) is not App or not 1 <= path[0] <= len(t.args):
        raise InvalidPosition(path)
    i = path[0] - 1
    args = list(t.args)
    args[i] = term_replace(args[i], path[1:], new)
    return App(t.sym, tuple(args))


def replace_all(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if type(t) is Var or not t.args:
        return t
    args = tuple(replace_all(a, old, new) for a in t.args)
    if args == t.args:
        return t
    return App(t.sym, args)


# ---------------------------------------------------------------- literals


class Lit:
    """A signed equation.  `p(..)` is represented as `p(..) = true`."""

    __slots__ = ("pos", "lhs", "rhs", "_h")

    def __init__(self, pos: bool, lhs: Term, rhs: Term):
        if lhs.sort != rhs.sort:
            raise SortError(f"equation sides differ in sort: {lhs}:{lhs.sort} vs {rhs}:{rhs.sort}")
        self.pos = pos
        self.lhs = lhs
        self.rhs = rhs
        self._h = hash((pos, lhs, rhs))

    def side(self, i: int) -> Term:
        if i == 1:
            return self.lhs
        if i == 2:
            return self.rhs
        raise InvalidPosition((i,))

    def negate(self) -> "Lit":
        return Lit(not self.pos, self.lhs, self.rhs)

    def map(self, fn) -> "Lit":
        lhs, rhs = fn(self.lhs), fn(self.rhs)
        if lhs is self.lhs and rhs is self.rhs:
            return self
        return Lit(self.pos, lhs, rhs)

    def is_pred(self) -> bool:
        return type(self.rhs) is App and self.rhs.sym.name == "true" and not self.rhs.args

    def __eq__(self, other):
        return self is other or (
            type(other) is Lit
            and self._h == other._h
            and self.pos == other.pos
            and self.lhs == other.lhs
            and self.rhs == other.rhs
        )

    def __hash__(self):
        return self._h

    def __repr__(self):
        if self.is_pred():
            return str(self.lhs) if self.pos else f"¬{self.lhs}"
        op = "=" if self.pos else "≠"
        return f"{self.lhs} {op} {self.rhs}"


class Clause:
    """Disjunction of literals plus the set of destructor-elimination marks."""

    __slots__ = ("lits", "marks", "_h")

    def __init__(self, lits, marks=frozenset()):
        self.lits = tuple(lits)
        vs = set(variables_of_lits(self.lits))
        self.marks = frozenset(m for m in marks if m in vs)
        self._h = hash(self.lits)

    def __len__(self):
        return len(self.lits)

    def __iter__(self):
        return iter(self.lits)

    def __eq__(self, other):
        return self is other or (
            type(other) is Clause and self.lits == other.lits and self.marks == other.marks
        )

    def __hash__(self):
        return self._h

    def with_lits(self, lits) -> "Clause":
        return Clause(lits, self.marks)

    def __repr__(self):
        if not self.lits:
            return "[]"
        body = ", ".join(map(repr, self.lits))
        if self.marks:
            marks = ",".join(sorted(v.name for v in self.marks))
            return f"[{body}]{{marked {marks}}}"
        return f"[{body}]"


def variables_of_lits(lits) -> list[Var]:
    out: dict[Var, None] = {}
    for lit in lits:
        _collect_vars(lit, out)
    return list(out)


def subterm_at(c: Clause, p: Position) -> Term:
    if len(p) < 2 or not 1 <= p[0] <= len(c.lits):
        raise InvalidPosition(p)
    return term_at(c.lits[p[0] - 1].side(p[1]), p[2:])


def replace_at(c: Clause, p: Position, new: Term) -> Clause:
    if len(p) < 2 or not 1 <= p[0] <= len(c.lits):
        raise InvalidPosition(p)
    lit = c.lits[p[0] - 1]
    if p[1] == 1:
        lit = Lit(lit.pos, term_replace(lit.lhs, p[2:], new), lit.rhs)
    elif p[1] == 2:
        lit = Lit(lit.pos, lit.lhs, term_replace(lit.rhs, p[2:], new))
    else:
        raise InvalidPosition(p)
    lits = list(c.lits)
    lits[p[0] - 1] = lit
    return Clause(lits, c.marks)


def clause_positions(c: Clause) -> Iterator[tuple[Position, Term]]:
    for i, lit in enumerate(c.lits, 1):
        for side in (1, 2):
            for path, t in subterms(lit.side(side)):
                yield (i, side) + path, t


def occurrences(t: Term, c: Clause) -> set:
    return {p for p, u in clause_positions(c) if u == t}


def format_position(p: Position) -> str:
    return ".".join(map(str, p))


# ---------------------------------------------------------------- substitution


def _check(theta: Subst) -> None:
    for v, t in theta.items():
        if v.sort != t.sort:
            raise SortError(f"{v} : {v.sort} cannot be bound to {t} : {t.sort}")


def _subst_term(t: Term, theta: Subst) -> Term:
    if type(t) is Var:
        return theta.get(t, t)
    if not t.args:
        return t
    args = tuple(_subst_term(a, theta) for a in t.args)
    if all(a is b for a, b in zip(args, t.args)):
        return t
    return App(t.sym, args)


Substitutable = Union[Term, "Lit", "Clause"]


def apply_subst(t, theta: Subst):
    """Simultaneous substitution on a term, literal or clause."""
    _check(theta)
    if not theta:
        return t
    if isinstance(t, Term):
        return _subst_term(t, theta)
    if type(t) is Lit:
        return t.map(lambda u: _subst_term(u, theta))
    if type(t) is Clause:
        marks = set()
        for m in t.marks:
            img = theta.get(m, m)
            if type(img) is Var:
                marks.add(img)
        return Clause([lit.map(lambda u: _subst_term(u, theta)) for lit in t.lits], marks)
    raise TypeError(t)


def match(pattern: Term, target: Term, theta: dict | None = None) -> dict | None:
    """Syntactic matching; extends `theta` (a copy) or returns None."""
    theta = dict(theta) if theta else {}
    return theta if _match(pattern, target, theta) else None


def _match(p: Term, t: Term, theta: dict) -> bool:
    if type(p) is Var:
        if p.sort != t.sort:
            return False
        bound = theta.get(p)
        if bound is None:
            theta[p] = t
            return True
        return bound == t
    if type(t) is not App or p.sym.name != t.sym.name:
        return False
    for a, b in zip(p.args, t.args):
        if not _match(a, b, theta):
            return False
    return True


def compose(theta: Subst, eta: Subst) -> dict:
    """x(theta;eta) = (x theta) eta."""
    out = {v: _subst_term(t, eta) for v, t in theta.items()}
    for v, t in eta.items():
        out.setdefault(v, t)
    return out


def fresh_var(base: str, sort: str, avoid: set) -> Var:
    """A variable named `base` with primes appended until unused."""
    name = base + "'"
    while name in avoid:
        name += "'"
    avoid.add(name)
    return Var(name, sort)


def rename_apart(t, avoid: set, suffix: str = "_") -> tuple:
    """Rename the variables of t away from the names in `avoid`."""
    theta = {}
    for v in variables(t):
        if v.name in avoid:
            name = v.name + suffix
            while name in avoid:
                name += suffix
            theta[v] = Var(name, v.sort)
    return apply_subst(t, theta), theta


# ---------------------------------------------------------------- ordering


def _key_cmp(a: Term, b: Term) -> int:
    sa, sb = size(a), size(b)
    if sa != sb:
        return -1 if sa < sb else 1
    ha = intern("v", a.name) if type(a) is Var else intern("f", a.sym.name)
    hb = intern("v", b.name) if type(b) is Var else intern("f", b.sym.name)
    if type(a) is not type(b):
        return -1 if type(a) is Var else 1
    if ha != hb:
        return -1 if ha < hb else 1
    if type(a) is Var:
        return 0
    for x, y in zip(a.args, b.args):
        c = _key_cmp(x, y)
        if c:
            return c
    return 0


def perm_smaller(a: Term, b: Term) -> bool:
    """Size, then intern index of the head symbol, then arguments left to right."""
    return _key_cmp(a, b) < 0


def homeomorphic_embedding(s: Term, t: Term) -> bool:
    """True iff s embeds into t (variables embed into equal variables)."""
    if type(s) is Var:
        return s == t or (type(t) is App and any(homeomorphic_embedding(s, a) for a in t.args))
    if type(t) is Var:
        return False
    if any(homeomorphic_embedding(s, a) for a in t.args):
        return True
    return s.sym.name == t.sym.name and all(
        homeomorphic_embedding(x, y) for x, y in zip(s.args, t.args)
    )


def to_sexpr(t: Term) -> str:
    if type(t) is Var or not t.args:
        return t.name if type(t) is Var else t.sym.name
    return "(" + " ".join([t.sym.name] + [to_sexpr(a) for a in t.args]) + ")"


def lit_sexpr(lit: Lit) -> str:
    if lit.is_pred():
        body = to_sexpr(lit.lhs)
    else:
        body = f"(= {to_sexpr(lit.lhs)} {to_sexpr(lit.rhs)})"
    return body if lit.pos else f"(not {body})"
