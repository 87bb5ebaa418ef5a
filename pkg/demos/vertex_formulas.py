"""
c2 from a single vertex
=======================

At a 3-valent vertex c2 is the count of the pair (f0, f3); at a 4-valent
vertex it is assembled from one pair count and four 3-valent counts.
Both are compared with brute force.
"""

from c2tools import counting, reduction
from c2tools.graphs import complete_graph, zigzag

g = zigzag(4)
v = next(u for u in g.vertices if g.degree(u) == 3)
for q in (2, 3, 5):
    print(f"ZZ_4 q={q}: three-valent {reduction.c2_three_valent(g, v, q)}, "
          f"brute force {counting.c2_bruteforce(g, q)}")

# denominator reduction of ZZ_5 runs to the end
run = reduction.denominator_reduce(zigzag(5))
print("ZZ_5 denominator reduction:", run.status, "order", run.order)
print("  c2 mod 2, 3, 5:", [run.c2(q) for q in (2, 3, 5)])

# K5 = completed ZZ_3, where c2 = -15
k5 = complete_graph(5)
for q in (2, 3, 5, 7):
    print(f"K5 q={q}: four-valent {reduction.c2_four_valent(k5, 0, q)}, expected {(-15) % q}")
