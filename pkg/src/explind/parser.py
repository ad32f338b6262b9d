"""S-expression reader and the event language.

    (data <sort> (<ctor> (<arg> <sort>)*)* [:destructor (<name> <default>)*])
    (defun (<f> ((<v> <sort>)*) <sort>) <equation>* [:partial])
        <equation> = (= <lhs> <rhs> [:when (<literal>*)])
    (defthm <name> <clause> [:tags (<tag>*)] [:assume])
    (include "<path>")

Literals are `(= a b)`, `(/= a b)`, `(not L)` or a boolean term `(p ...)`
(read as `(= (p ...) true)`).  Clauses are a literal, `(or L ...)` or
`(implies H C)` / `(implies (and H ...) C)`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import App, Clause, Lit, Symbol, Term, Var


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0, path: str = ""):
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {msg}")
        self.line = line
        self.col = col
        self.msg = msg


class Atom(str):
    """A symbol token that remembers where it was read."""

    line: int = 0
    col: int = 0


class Str(str):
    line: int = 0
    col: int = 0


class SList(list):
    line: int = 0
    col: int = 0


def _loc(obj, line, col):
    obj.line = line
    obj.col = col
    return obj


def read_all(text: str, path: str = "") -> list:
    """Read every top-level form of `text`."""
    forms = []
    stack: list[SList] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(_loc(SList(), line, col))
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col, path)
            done = stack.pop()
            (stack[-1] if stack else forms).append(done)
            i, col = i + 1, col + 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", line, col, path)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col, path)
            tok = _loc(Str(text[i + 1:j]), line, col)
            col += j + 1 - i
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"':
                j += 1
            tok = _loc(Atom(text[i:j]), line, col)
            col += j - i
            i = j
        (stack[-1] if stack else forms).append(tok)
    if stack:
        top = stack[-1]
        raise ParseError("missing ')' for list opened here", top.line, top.col, path)
    return forms


def show(form) -> str:
    if isinstance(form, Str):
        return '"' + form + '"'
    if isinstance(form, list):
        return "(" + " ".join(show(f) for f in form) + ")"
    return str(form)


@dataclass
class Event:
    kind: str  # data | defun | defthm | include
    name: str
    form: list
    path: str = ""
    line: int = 0
    options: dict = field(default_factory=dict)

    def __eq__(self, other):
        return isinstance(other, Event) and (self.kind, self.name, show(self.form)) == (
            other.kind,
            other.name,
            show(other.form),
        )

    def text(self) -> str:
        return show(self.form)


KEYWORDS = {
    "data": {":destructor"},
    "defun": {":partial"},
    "defthm": {":tags", ":assume"},
    "include": set(),
}


def parse_events(text: str, path: str = "") -> list[Event]:
    events = []
    for form in read_all(text, path):
        if not isinstance(form, list) or not form or not isinstance(form[0], Atom):
            line, col = getattr(form, "line", 0), getattr(form, "col", 0)
            raise ParseError("expected an event form", line, col, path)
        head = form[0]
        if head not in KEYWORDS:
            raise ParseError(f"unknown event {head}", head.line, head.col, path)
        for tok in form[1:]:
            if isinstance(tok, Atom) and tok.startswith(":") and tok not in KEYWORDS[head]:
                raise ParseError(f"unknown-keyword {tok}", tok.line, tok.col, path)
        if len(form) < 2:
            raise ParseError(f"{head} needs arguments", head.line, head.col, path)
        if head == "defun":
            sig = form[1]
            if not isinstance(sig, list) or not sig:
                raise ParseError("defun needs a signature (f ((v sort)*) sort)", head.line, head.col, path)
            name = str(sig[0])
        else:
            name = str(form[1])
        opts = _options(form)
        events.append(Event(str(head), name, form, path, form.line, opts))
    return events


def _options(form) -> dict:
    opts = {}
    i = 0
    while i < len(form):
        tok = form[i]
        if isinstance(tok, Atom) and tok.startswith(":"):
            if i + 1 < len(form) and not (isinstance(form[i + 1], Atom) and form[i + 1].startswith(":")):
                if tok in (":destructor",):
                    opts[str(tok)] = form[i + 1:]
                    break
                if tok == ":tags":
                    opts[str(tok)] = form[i + 1]
                    i += 2
                    continue
            opts[str(tok)] = True
        i += 1
    return opts


# ------------------------------------------------------------------ building


class TermBuilder:
    """Resolve s-expressions into sorted terms against a symbol lookup."""

    def __init__(self, lookup, path: str = ""):
        self.lookup = lookup
        self.env: dict[str, str] = {}
        self.path = path

    def error(self, msg, form):
        return ParseError(msg, getattr(form, "line", 0), getattr(form, "col", 0), self.path)

    def _sym(self, name):
        return self.lookup(str(name))

    def sort_of(self, form):
        """Sort of a form if it can be determined without context."""
        if isinstance(form, list):
            if not form:
                raise self.error("empty term", form)
            if form[0] == "if":
                return self.sort_of(form[2]) or self.sort_of(form[3])
            s = self._sym(form[0])
            if s is None:
                raise self.error(f"unknown function {form[0]}", form)
            return s.sort
        s = self._sym(form)
        if s is not None:
            return s.sort
        return self.env.get(str(form))

    def term(self, form, sort: str | None) -> Term:
        if isinstance(form, list):
            if not form:
                raise self.error("empty term", form)
            head = form[0]
            if head == "if":
                raise self.error("if is only allowed in defining equations", form)
            s = self._sym(head)
            if s is None:
                raise self.error(f"unknown function {head}", form)
            if len(form) - 1 != s.arity:
                raise self.error(f"{head} expects {s.arity} arguments, got {len(form) - 1}", form)
            args = tuple(self.term(a, srt) for a, srt in zip(form[1:], s.argsorts))
            t = App(s, args)
        else:
            if isinstance(form, Str):
                raise self.error("unexpected string", form)
            s = self._sym(form)
            if s is not None:
                if s.arity:
                    raise self.error(f"{form} expects {s.arity} arguments", form)
                t = App(s)
            else:
                name = str(form)
                known = self.env.get(name)
                if known is None:
                    if sort is None:
                        raise self.error(f"cannot infer the sort of variable {name}", form)
                    self.env[name] = sort
                    known = sort
                t = Var(name, known)
        if sort is not None and t.sort != sort:
            raise self.error(f"{show(form)} has sort {t.sort}, expected {sort}", form)
        return t

    def equation_sides(self, a, b):
        sa = self.sort_of(a)
        sb = self.sort_of(b)
        srt = sa or sb
        if srt is None:
            raise self.error("cannot infer the sort of an equation between variables", a)
        if sa is None:
            lhs_first = False
        else:
            lhs_first = True
        if lhs_first:
            x = self.term(a, srt)
            y = self.term(b, srt)
        else:
            y = self.term(b, srt)
            x = self.term(a, srt)
        return x, y

    def literal(self, form, true_term: Term) -> Lit:
        if isinstance(form, list) and form and form[0] == "not":
            if len(form) != 2:
                raise self.error("not takes one literal", form)
            return self.literal(form[1], true_term).negate()
        if isinstance(form, list) and form and form[0] in ("=", "/="):
            if len(form) != 3:
                raise self.error(f"{form[0]} takes two terms", form)
            x, y = self.equation_sides(form[1], form[2])
            return Lit(form[0] == "=", x, y)
        t = self.term(form, true_term.sort)
        return Lit(True, t, true_term)

    def clause(self, form, true_term: Term) -> list[Lit]:
        if isinstance(form, list) and form and form[0] == "or":
            return [self.literal(f, true_term) for f in form[1:]]
        if isinstance(form, list) and form and form[0] == "implies":
            if len(form) != 3:
                raise self.error("implies takes a hypothesis and a conclusion", form)
            hyp, concl = form[1], form[2]
            hyps = hyp[1:] if isinstance(hyp, list) and hyp and hyp[0] == "and" else [hyp]
            out = self.clause(concl, true_term)
            out += [self.literal(h, true_term).negate() for h in hyps]
            return out
        return [self.literal(form, true_term)]


def lift_ifs(lhs_form, rhs_form, when: list) -> list[tuple]:
    """Split `(if c a b)` in a right-hand side into two conditioned equations."""
    path = _find_if(rhs_form)
    if path is None:
        return [(lhs_form, rhs_form, when)]
    node = _get(rhs_form, path)
    if len(node) != 4:
        raise ParseError("if takes a condition and two branches", node.line, node.col)
    cond = node[1]
    neg = _negate_form(cond)
    then_rhs = _put(rhs_form, path, node[2])
    else_rhs = _put(rhs_form, path, node[3])
    return lift_ifs(lhs_form, then_rhs, when + [cond]) + lift_ifs(lhs_form, else_rhs, when + [neg])


def _negate_form(form):
    if isinstance(form, list) and form and form[0] == "not":
        return form[1]
    if isinstance(form, list) and form and form[0] == "=":
        return _loc(SList([Atom("/=")] + list(form[1:])), form.line, form.col)
    if isinstance(form, list) and form and form[0] == "/=":
        return _loc(SList([Atom("=")] + list(form[1:])), form.line, form.col)
    line, col = getattr(form, "line", 0), getattr(form, "col", 0)
    return _loc(SList([Atom("not"), form]), line, col)


def _find_if(form, path=()):
    if isinstance(form, list) and form:
        if form[0] == "if":
            return path
        for i, sub in enumerate(form[1:], 1):
            p = _find_if(sub, path + (i,))
            if p is not None:
                return p
    return None


def _get(form, path):
    for i in path:
        form = form[i]
    return form


def _put(form, path, new):
    if not path:
        return new
    out = _loc(SList(form), getattr(form, "line", 0), getattr(form, "col", 0))
    out[path[0]] = _put(form[path[0]], path[1:], new)
    return out


def make_symbol(name: str, kind: str, argsorts, sort: str) -> Symbol:
    return Symbol(name, kind, tuple(argsorts), sort)


def clause_from_lits(lits) -> Clause:
    return Clause(lits)
