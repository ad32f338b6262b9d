"""Templates, scheme analysis and the full proof of less(y, ack(x, y))."""

import os

from explind import waterfall
from explind.cli import dump_schemes, print_trace
from explind.schemes import run_pipeline
from explind.session import load_theory
from explind.templates import dump_templates

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")

s = load_theory(os.path.join(CORPUS, "nat-constructor.thy"))
s.load_text(
    "(defthm less-succ (less x (s x)) :tags (rewrite))\n"
    "(defthm less-pos (implies (less y z) (less 0 z)) :tags (rewrite))"
)
th = s.theory
print(dump_templates(th, ["less", "ack"]))

goal = s.clause(["less", "y", ["ack", "x", "y"]])
scheme, report = run_pipeline(th, goal)
print("\n".join(report.lines()))

res = waterfall.prove(goal, th)
print()
print(print_trace(res, "full"))
print()
print(dump_schemes(res))
