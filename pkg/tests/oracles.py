"""Reference computations that share no code with the package.

Graph polynomials come from the weighted matrix-tree theorem in sympy,
point counts from plain enumeration over a prime field.
"""

import itertools

import sympy

from c2tools.polyring import Polynomial


def sym(p: Polynomial) -> sympy.Expr:
    expr = sympy.Integer(0)
    for mono, c in p.terms().items():
        term = sympy.Integer(c)
        for v, e in mono:
            term *= sympy.Symbol(f"a{v}") ** e
        expr += term
    return sympy.expand(expr)


def matrix_tree_psi(n_vertices, pairs) -> sympy.Expr:
    """prod(a_e) * det(reduced Laplacian weighted by 1/a_e)."""
    a = [sympy.Symbol(f"a{i}") for i in range(1, len(pairs) + 1)]
    L = sympy.zeros(n_vertices, n_vertices)
    for w, (u, v) in zip(a, pairs):
        if u == v:
            continue
        L[u, u] += 1 / w
        L[v, v] += 1 / w
        L[u, v] -= 1 / w
        L[v, u] -= 1 / w
    det = L[:-1, :-1].det(method="berkowitz")
    return sympy.expand(sympy.cancel(det * sympy.prod(a)))


def naive_count(polys, ambient, p: int) -> int:
    """Common zeros in F_p^ambient by direct substitution."""
    ambient = list(ambient)
    compiled = [[(c, [(ambient.index(v), e) for v, e in mono]) for mono, c in f.terms().items()] for f in polys]
    n = 0
    for pt in itertools.product(range(p), repeat=len(ambient)):
        ok = True
        for f in compiled:
            s = 0
            for c, mono in f:
                t = c
                for i, e in mono:
                    t *= pt[i] ** e
                s += t
            if s % p:
                ok = False
                break
        n += ok
    return n
