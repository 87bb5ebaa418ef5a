"""
Counting points over finite fields
==================================

The c2 invariant is read off from the number of zeros of Psi over F_q.
This demo counts a few hypersurfaces and shows the divisibility by q^2.
"""

import time

from c2tools.counting import c2_bruteforce, count_affine, count_parallel
from c2tools.graphs import complete_graph, cycle_graph
from c2tools.kirchhoff import graph_polynomial
from c2tools.suites import subdivided_k4

# a linear form in three variables has q^2 zeros
tri = cycle_graph(3)
for q in (2, 3, 4, 5):
    n = count_affine([graph_polynomial(tri)], tri.labels, q).count
    print(f"[Psi(C3)]_{q} = {n}")

# K4 and K5 at several q, including the extension fields F_4 and F_8
for name, g, qs in (("K4", complete_graph(4), (2, 3, 4, 5, 8)), ("K5", complete_graph(5), (2, 3, 4, 5))):
    psi = graph_polynomial(g)
    for q in qs:
        t = time.perf_counter()
        n = count_affine([psi], g.labels, q).count
        print(f"{name} q={q}: count {n}, divisible by q^2: {n % (q * q) == 0}, "
              f"c2 = {(n // (q * q)) % q}  ({time.perf_counter() - t:.2f}s)")

# sharded counting gives the same number
psi = graph_polynomial(complete_graph(5))
print("8 shards agree:", count_parallel([psi], complete_graph(5).labels, 5, shards=8).count
      == count_affine([psi], complete_graph(5).labels, 5).count)

# a 2-valent vertex forces c2 = 0
print("subdivided K4, c2 at q=3:", c2_bruteforce(subdivided_k4(), 3))
