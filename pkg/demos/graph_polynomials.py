"""
Graph polynomials and Dodgson minors
====================================

Build a few small graphs, compute their Kirchhoff polynomials three ways
and look at the local structure around a 3-valent vertex.
"""

from c2tools.graphs import complete_graph, cycle_graph, zigzag
from c2tools.kirchhoff import dodgson, graph_polynomial, three_valent_data
from c2tools.polyring import to_text

# the triangle: each spanning tree leaves out one edge
tri = cycle_graph(3)
print("Psi(C3) =", to_text(graph_polynomial(tri)))

# K4 has 16 spanning trees, so 16 cotree monomials of degree h = 3
k4 = complete_graph(4)
psi = graph_polynomial(k4)
print("K4:", len(psi), "monomials, degree", psi.degree())

# all three backends give the same polynomial
for backend in ("trees", "determinant", "subgraphs"):
    print(f"  {backend:12s}", graph_polynomial(k4, backend) == psi)

# Dodgson polynomials: delete rows I, columns J, set K to zero
print("Psi^{1,2}(K4) =", to_text(dodgson(k4, [1], [2])))

# around a 3-valent vertex, Psi is determined by f0, f1, f2, f3 and f123
g = zigzag(4)
v = next(u for u in g.vertices if g.degree(u) == 3)
d = three_valent_data(g, v)
print("ZZ_4 vertex", v, "edges", d.edges)
print("  reconstruction exact:", d.reconstruct() == graph_polynomial(g))
print("  f0 f123 = f1 f2 + f2 f3 + f1 f3:", d.structure_identity_holds())
