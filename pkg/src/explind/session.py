"""Replay of event files into a theory."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .parser import Atom, Event, ParseError, TermBuilder, lift_ifs, parse_events, show
from .terms import App, Clause, Symbol
from .theory import TRUE, DataType, FunctionDef, Lemma, PncEquation, Theory, TheoryError


@dataclass
class EventResult:
    event: Event
    status: str  # admitted | proved | failed | rejected | assumed
    detail: str = ""
    millis: float = 0.0
    inductions: int = 0
    result: object = None


@dataclass
class SessionResult:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status in ("admitted", "proved", "assumed") for r in self.results)


class Session:
    def __init__(self, theory: Theory | None = None, options=None, on_prove=None):
        self.theory = theory or Theory()
        self.options = options
        self.on_prove = on_prove
        self.included: set = set()

    # ------------------------------------------------------------ loading

    def load_file(self, path: str, keep_going: bool = False) -> SessionResult:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        return self.run(parse_events(text, path), keep_going)

    def load_text(self, text: str, path: str = "<string>", keep_going: bool = False) -> SessionResult:
        return self.run(parse_events(text, path), keep_going)

    def run(self, events, keep_going: bool = False) -> SessionResult:
        out = SessionResult()
        for ev in events:
            if ev.kind == "include":
                base = os.path.dirname(ev.path) if ev.path else "."
                target = os.path.normpath(os.path.join(base, str(ev.form[1])))
                if target in self.included:
                    continue
                self.included.add(target)
                sub = self.load_file(target, keep_going)
                out.results.extend(sub.results)
                if not sub.ok and not keep_going:
                    break
                continue
            r = self.replay(ev)
            out.results.append(r)
            if r.status in ("failed", "rejected") and not keep_going:
                break
        return out

    def replay(self, ev: Event) -> EventResult:
        t0 = time.perf_counter()
        try:
            if ev.kind == "data":
                self.theory.declare_datatype(self.datatype(ev))
                r = EventResult(ev, "admitted")
            elif ev.kind == "defun":
                self.theory.define_function(self.function(ev))
                r = EventResult(ev, "admitted")
            else:
                r = self.theorem(ev)
        except (TheoryError, ParseError) as e:
            r = EventResult(ev, "rejected", f"{ev.path}:{ev.line}: {e}")
        r.millis = (time.perf_counter() - t0) * 1000
        return r

    # ------------------------------------------------------------ events

    def datatype(self, ev: Event) -> DataType:
        form = ev.form
        ctors = []
        for c in form[2:]:
            if isinstance(c, Atom) and c.startswith(":"):
                break
            if not isinstance(c, list) or not c:
                raise ParseError("constructor must be (name (arg sort)*)", ev.line, 0, ev.path)
            argsorts = []
            for a in c[1:]:
                if not isinstance(a, list) or len(a) != 2:
                    raise ParseError("constructor argument must be (name sort)", a.line, a.col, ev.path)
                argsorts.append(str(a[1]))
            ctors.append((str(c[0]), argsorts))
        dests = []
        for d in ev.options.get(":destructor", []) or []:
            if not isinstance(d, list) or len(d) != 2:
                raise ParseError("destructor must be (name default)", ev.line, 0, ev.path)
            dests.append((str(d[0]), _ground_spec(d[1])))
        return DataType(str(form[1]), ctors, dests)

    def function(self, ev: Event) -> FunctionDef:
        sig = ev.form[1]
        if len(sig) != 3 or not isinstance(sig[1], list):
            raise ParseError("defun signature is (f ((v sort)*) sort)", sig.line, sig.col, ev.path)
        argsorts = tuple(str(p[1]) for p in sig[1])
        f = Symbol(str(sig[0]), "defined", argsorts, str(sig[2]))
        lookup = lambda n: f if n == f.name else self.theory.symbols.get(n)  # noqa: E731
        eqs = []
        for eform in ev.form[2:]:
            if isinstance(eform, Atom):
                continue
            if isinstance(eform, list) and len(eform) == 1 and isinstance(eform[0], list):
                eform = eform[0]
            if not isinstance(eform, list) or not eform or eform[0] != "=":
                raise ParseError("equation must be (= lhs rhs [:when (...)])", eform.line, eform.col, ev.path)
            when = []
            if len(eform) == 5 and eform[3] == ":when":
                when = list(eform[4])
            elif len(eform) != 3:
                raise ParseError("equation must be (= lhs rhs [:when (...)])", eform.line, eform.col, ev.path)
            for lhs_f, rhs_f, conds_f in lift_ifs(eform[1], eform[2], when):
                tb = TermBuilder(lookup, ev.path)
                lhs = tb.term(lhs_f, f.sort)
                if type(lhs) is not App or lhs.sym.name != f.name:
                    raise ParseError(f"left-hand side must be headed by {f.name}", eform.line, eform.col, ev.path)
                rhs = tb.term(rhs_f, f.sort)
                conds = tuple(tb.literal(c, TRUE) for c in conds_f)
                eqs.append(PncEquation(lhs, rhs, conds))
        return FunctionDef(f, eqs, partial=bool(ev.options.get(":partial")))

    def clause(self, form, path: str = "") -> Clause:
        tb = TermBuilder(self.theory.symbols.get, path)
        return Clause(tb.clause(form, TRUE))

    def theorem(self, ev: Event) -> EventResult:
        from .waterfall import Options, prove

        if len(ev.form) < 3:
            raise ParseError("defthm needs a name and a clause", ev.line, 0, ev.path)
        c = self.clause(ev.form[2], ev.path)
        tags = ev.options.get(":tags")
        tags = frozenset(str(t) for t in tags) if isinstance(tags, list) else frozenset()
        lemma = Lemma(ev.name, c, tags)
        if ev.options.get(":assume"):
            self.theory.add_lemma(lemma, "assume")
            return EventResult(ev, "assumed")
        holder = {}

        def prover(clause):
            res = prove(clause, self.theory, self.options or Options())
            holder["r"] = res
            return res

        self.theory.add_lemma(lemma, "prove", prover)
        res = holder["r"]
        if self.on_prove:
            self.on_prove(ev, res)
        status = "proved" if res.proved else "failed"
        return EventResult(ev, status, res.reason, inductions=res.inductions, result=res)


def _ground_spec(form):
    if isinstance(form, list):
        return [_ground_spec(f) for f in form]
    return str(form)


def load_theory(*paths: str, options=None) -> Session:
    s = Session(options=options)
    for p in paths:
        r = s.load_file(p)
        if not r.ok:
            bad = next(x for x in r.results if x.status not in ("admitted", "proved", "assumed"))
            raise TheoryError(f"{bad.event.name}: {bad.status} {bad.detail}")
    return s


__all__ = ["Session", "SessionResult", "EventResult", "load_theory", "show"]
