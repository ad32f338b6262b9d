"""Ground evaluation with the defining equations, and its step budget."""

import os

from explind.session import load_theory
from explind.theory import BudgetExhausted

th = load_theory(os.path.join(os.path.dirname(__file__), "..", "corpus", "list-base.thy")).theory


def nat(n):
    t = th.app("0")
    for _ in range(n):
        t = th.app("s", t)
    return t


def lst(*xs):
    t = th.app("nil")
    for x in reversed(xs):
        t = th.app("cns", nat(x), t)
    return t


for x, y in [(1, 1), (2, 2), (3, 2)]:
    print(f"ack({x},{y}) =", th.evaluate(th.app("ack", nat(x), nat(y))))
print("rev [0,1,2] =", th.evaluate(th.app("rev", lst(0, 1, 2))))
print("dlonce 2 [0,1] =", th.evaluate(th.app("dlonce", nat(2), lst(0, 1))), "(stuck, not junk)")
try:
    th.evaluate(th.app("ack", nat(3), nat(3)), budget=100)
except BudgetExhausted as e:
    print("budget:", e)
