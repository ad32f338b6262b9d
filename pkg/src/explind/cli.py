"""Command-line driver: replay event files, print traces, run regressions."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .parser import ParseError
from .session import Session, SessionResult
from .templates import dump_templates
from .theory import DEFAULT_EVAL_BUDGET
from .waterfall import Options, ProofResult, TraceNode, walk


def _node_line(n: TraceNode) -> str:
    if n.outcome == "proved":
        return f"[{n.stage}] {n.clause} ⇒ ⊤"
    if n.outcome == "failed":
        return f"[{n.stage or 'pool'}] {n.clause} ⇒ FAILED: {n.note}"
    k = len(n.children)
    line = f"[{n.stage}] {n.clause} ⇒ {k} clause{'s' if k != 1 else ''}"
    if n.stage == "induct" and n.note:
        line += f"  ({n.note})"
    return line


def print_trace(res: ProofResult, mode: str = "summary") -> str:
    """Deterministic text rendering of a proof attempt."""
    if mode == "none":
        return ""
    lines: list[str] = []
    if mode == "full":

        def rec(n: TraceNode, d: int):
            if n.outcome == "open":
                return
            lines.append("  " * d + _node_line(n))
            for ch in n.children:
                rec(ch, d + 1)

        rec(res.trace, 0)
    else:
        root = res.trace
        if root.outcome == "proved" and root.stage == "simplify":
            lines.append("[simplify] ⇒ ⊤")
        for n in walk(root):
            if n.stage == "induct" and n.report is not None:
                tag = "goal" if n is root else "subgoal"
                lines.append(f"induct {tag} {n.clause}")
                lines.append(f"  {n.note}")
            elif n.stage == "generalize":
                after = n.children[0].clause if n.children else None
                lines.append(f"generalize {n.clause} ⇒ {after}")
            elif n.stage == "fertilize":
                after = n.children[0].clause if n.children else None
                lines.append(f"fertilize {n.clause} ⇒ {after}")
    if res.proved:
        lines.append(f"PROVED ({res.inductions} induction{'s' if res.inductions != 1 else ''})")
    else:
        lines.append(f"FAILED: {res.reason}")
    return "\n".join(lines)


def dump_schemes(res: ProofResult) -> str:
    lines = []
    for goal, report in res.reports:
        lines.append(f"induction on {goal}")
        lines.extend("  " + ln for ln in report.lines())
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="explind", description="Explicit-induction prover for event files.")
    p.add_argument("files", nargs="*", help="event files replayed in order")
    p.add_argument("--trace", choices=("full", "summary", "none"), default="summary")
    p.add_argument("--max-inductions", type=int, default=10)
    p.add_argument("--eval-budget", type=int, default=DEFAULT_EVAL_BUDGET)
    p.add_argument("--dump-templates", nargs="?", const="", default=None, metavar="NAMES",
                   help="print induction templates (optionally only for a comma-separated list)")
    p.add_argument("--dump-schemes", action="store_true")
    p.add_argument("--regress", metavar="DIR")
    p.add_argument("--keep-going", action="store_true")
    p.add_argument("--drop-injectivity", action="store_true")
    p.add_argument("--json", action="store_true", help="machine-readable summary on stdout")
    return p


def _options(args) -> Options:
    return Options(max_inductions=args.max_inductions, injective=not args.drop_injectivity)


def run_files(files, args, out) -> tuple[int, list]:
    quiet = args.json
    sess = Session(options=_options(args))
    sess.theory.eval_budget = args.eval_budget

    def on_prove(ev, res):
        if quiet:
            return
        text = print_trace(res, args.trace)
        if text:
            out.write(f"-- {ev.name}\n{text}\n")
        if args.dump_schemes and res.reports:
            out.write(dump_schemes(res) + "\n")

    sess.on_prove = on_prove
    results = SessionResult()
    for f in files:
        r = sess.load_file(f, args.keep_going)
        results.results.extend(r.results)
        if not r.ok and not args.keep_going:
            break
    records = []
    for r in results.results:
        records.append(
            {
                "event": r.event.name,
                "kind": r.event.kind,
                "status": r.status,
                "ms": round(r.millis, 3),
                "inductions": r.inductions,
                "detail": r.detail,
            }
        )
        if not quiet and r.event.kind == "defthm":
            n = r.inductions
            out.write(f"{r.event.name}: {r.status} ({n} induction{'s' if n != 1 else ''}, {r.millis:.1f} ms)\n")
        elif not quiet and r.status == "rejected":
            out.write(f"{r.event.name}: rejected: {r.detail}\n")
    if args.dump_templates is not None and not quiet:
        names = [n for n in args.dump_templates.split(",") if n] or None
        out.write(dump_templates(sess.theory, names))
    return (0 if results.ok else 1), records


def regress(directory: str, args, out) -> int:
    files = sorted(
        os.path.join(directory, f) for f in os.listdir(directory) if f.endswith(".thy")
    )
    failed = 0
    table = []
    for f in files:
        sub = argparse.Namespace(**vars(args))
        sub.trace = "none"
        sub.dump_templates = None
        sub.dump_schemes = False
        sub.json = True
        code, records = run_files([f], sub, out)
        proved = sum(1 for r in records if r["status"] == "proved")
        status = "PASS" if code == 0 else "FAIL"
        failed += code != 0
        table.append((os.path.basename(f), status, proved, records))
    if args.json:
        json.dump([{"file": n, "status": s, "proved": p, "events": r} for n, s, p, r in table], out, indent=1)
        out.write("\n")
    else:
        for name, status, proved, records in table:
            out.write(f"{status}  {name}  ({proved} theorems)\n")
            for r in records:
                if r["status"] not in ("admitted", "proved", "assumed"):
                    out.write(f"      {r['event']}: {r['status']} {r['detail']}\n")
        out.write(f"{len(files) - failed}/{len(files)} files pass\n")
    return 0 if failed == 0 else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.regress:
        if not os.path.isdir(args.regress):
            print(f"error: {args.regress} is not a directory", file=sys.stderr)
            return 2
        return regress(args.regress, args, out)
    if not args.files:
        parser.print_usage(sys.stderr)
        return 2
    try:
        code, records = run_files(args.files, args, out)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.json:
        json.dump(records, out, indent=1)
        out.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
