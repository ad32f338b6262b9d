"""The same conjectures over destructor-style definitions, side by side."""

import os

from explind import waterfall
from explind.cli import print_trace
from explind.parser import read_all
from explind.session import load_theory

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")
GOALS = [
    "(= (+ x y) (+ y x))",
    "(implies (and (less x y) (less y z)) (less (s x) (s z)))",
    "(less y (ack x y))",
]

for name in ("nat-constructor.thy", "nat-destructor.thy"):
    s = load_theory(os.path.join(CORPUS, name))
    print(f"== {name}")
    for text in GOALS:
        res = waterfall.prove(s.clause(read_all(text)[0]), s.theory)
        print(f"-- {text}")
        print(print_trace(res, "summary"))
