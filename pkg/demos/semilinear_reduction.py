"""
Semilinear reduction of zigzag graphs
=====================================

Reduce the five summands of the 4-valent formula to elementary leaves,
read off an integer c with c2 = -c for every q, and check it against
-h(h+2).  The last part shows what a stuck reduction looks like.
"""

import time

from c2tools import reduction
from c2tools.graphs import zigzag
from c2tools.polyring import from_text, to_text

for h in (3, 4, 5, 6):
    t = time.perf_counter()
    rep = reduction.c2_slr(zigzag(h, completed=True), (2, 3, 5, 7), v=0)
    sizes = [len(tr.reachable()) for tr in rep.trees]
    print(f"h={h}: c = {rep.c} (h(h+2) = {h * (h + 2)}), tree sizes {sizes}, "
          f"bound ok {rep.bound_ok}, bad primes {rep.candidates or 'none'}  "
          f"({time.perf_counter() - t:.1f}s)")

# the first few nodes of the K4 pair (f0, f3), which is denominator-reducible
g = zigzag(3)
pair, amb = reduction.three_valent_pair(g, 0)
tree = reduction.slr_reduce(pair, amb)
print("K4 pair tree, generic value", reduction.evaluate_tree(tree, None))
for n in sorted(tree.reachable(), key=lambda n: n.id)[:6]:
    print(f"  node {n.id}: {n.rule} on {[to_text(p) for p in n.target]} -> {list(n.children)}")

# no rule applies to this quartic: the engine names the node instead of guessing
stuck = reduction.slr_reduce(from_text("a1^2*a2^2 + a1*a2*a3^2 + a3^4 + a1^3*a3 + a2^3*a3"))
print("complete:", stuck.complete)
print(stuck.failure_summary())
