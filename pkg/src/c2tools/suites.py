"""Invariant suites: every identity the toolkit relies on, as runnable checks.

Each suite returns a list of :class:`Check` records.  The CLI ``verify``
command and the acceptance tests both drive these functions, with the
tests asking for larger randomized samples.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

import sympy

from . import counting, kirchhoff, reduction
from .graphs import Graph, complete_graph, cycle_graph, relabel, zigzag
from .kirchhoff import dodgson, graph_polynomial, match_sign, solve_signs
from .polyring import Polynomial, linear_split


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


def random_relabel(g: Graph, rng: random.Random) -> Graph:
    """Same graph with shuffled vertex ids and edge order."""
    perm = list(range(g.n_vertices))
    rng.shuffle(perm)
    index = {v: perm[i] for i, v in enumerate(g.vertices)}
    pairs = [(index[u], index[v]) for _, u, v in g.edges]
    rng.shuffle(pairs)
    return Graph.from_edges(g.n_vertices, pairs)


def subdivided_k4() -> Graph:
    """K4 with edge {0,1} replaced by a path through a new vertex 4."""
    pairs = [(0, 4), (4, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    return Graph.from_edges(5, pairs)


def octahedron() -> Graph:
    return zigzag(4, completed=True)


def corpus() -> dict[str, Graph]:
    """Small connected graphs with at least 3 vertices."""
    return {
        "triangle": cycle_graph(3),
        "K4": complete_graph(4),
        "K4-subdivided": subdivided_k4(),
        "ZZ4": zigzag(4),
        "K5": complete_graph(5),
        "K33": Graph.from_edges(6, [(a, b) for a in range(3) for b in range(3, 6)]),
        "wheel5": Graph.from_edges(6, [(0, i) for i in range(1, 6)] + [(i, i % 5 + 1) for i in range(1, 6)]),
    }


# ---------------------------------------------------------------------------
# identities (graph-polynomial level)


def _disjoint_sets(rng, labels, sizes):
    pool = list(labels)
    rng.shuffle(pool)
    out, i = [], 0
    for s in sizes:
        out.append(pool[i : i + s])
        i += s
    return out


def check_backends(n_random: int = 200, seed: int = 0, max_edges: int = 6) -> list[Check]:
    """Spanning-tree Psi equals determinant Psi on small multigraphs."""
    checks = []
    for g in all_connected_multigraphs(max_edges):
        a, b = graph_polynomial(g, "trees"), graph_polynomial(g, "determinant")
        checks.append(Check(f"backends {g.edges}", a == b))
    rng = random.Random(seed)
    for k in range(n_random):
        g = random_connected_multigraph(rng, rng.randint(1, 12))
        a, b = graph_polynomial(g, "trees"), graph_polynomial(g, "determinant")
        checks.append(Check(f"backends random#{k}", a == b, "" if a == b else str(g.edges)))
    return checks


def all_connected_multigraphs(max_edges: int):
    """Every connected loopless multigraph with at most ``max_edges`` edges.

    Enumerated as edge multisets on vertex sets ``0..n-1``; isomorphic
    copies are not removed.
    """
    for n in range(2, max_edges + 2):
        slots = list(itertools.combinations(range(n), 2))
        for m in range(n - 1, max_edges + 1):
            for combo in itertools.combinations_with_replacement(slots, m):
                if _spans(n, combo):
                    yield Graph.from_edges(n, combo)


def _spans(n: int, pairs) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    joined = 0
    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            joined += 1
    return joined == n - 1


def random_connected_multigraph(rng: random.Random, n_edges: int) -> Graph:
    n = rng.randint(2, n_edges + 1)
    pairs = [(rng.randrange(i), i) for i in range(1, n)]  # random spanning tree
    while len(pairs) < n_edges:
        u, v = rng.sample(range(n), 2)
        pairs.append((u, v))
    rng.shuffle(pairs)
    return Graph.from_edges(n, pairs)


def check_contraction_deletion(graphs: list[Graph], n: int, seed: int = 1) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(n):
        g = random_relabel(rng.choice(graphs), rng)
        if k % 2 == 0:
            # graph polynomial against edited graphs
            a = rng.choice([e for e in g.labels if not g.is_bridge(e)])
            psi = graph_polynomial(g)
            s = linear_split(psi, a)
            ok = s.leading == graph_polynomial(g.delete_edge(a)) and s.constant == graph_polynomial(g.contract_edge(a))
            checks.append(Check(f"Psi = Psi_(G-e) a + Psi_(G/e) #{k}", ok))
            continue
        size = rng.randint(0, 2)
        I, J, K, rest = _disjoint_sets(rng, g.labels, [size, size, rng.randint(0, 1), g.n_edges])
        a = rest[0]
        p = dodgson(g, I, J, K)
        s = linear_split(p, a)
        top = dodgson(g, I + [a], J + [a], K)
        low = dodgson(g, I, J, K + [a])
        ok = match_sign(s.leading, top) != 0 and match_sign(s.constant, low) != 0
        checks.append(Check(f"Dodgson contraction-deletion #{k}", ok, f"I={I} J={J} K={K} a={a}"))
    return checks


def check_first_dodgson(graphs: list[Graph], n: int, seed: int = 2) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(n):
        g = random_relabel(rng.choice(graphs), rng)
        size = rng.randint(0, 1)
        I, J, (a, b, x) = _disjoint_sets(rng, g.labels, [size, size, 3])
        lhs = dodgson(g, I + [x], J + [x]) * dodgson(g, I + [a], J + [b]) - dodgson(g, I + [x], J + [b]) * dodgson(g, I + [a], J + [x])
        rhs = dodgson(g, I, J) * dodgson(g, I + [a, x], J + [b, x])
        checks.append(Check(f"first Dodgson identity #{k}", match_sign(lhs, rhs) != 0, f"I={I} J={J} a,b,x={a},{b},{x}"))
    return checks


def check_jacobi(n: int, seed: int = 3) -> list[Check]:
    """det of the trailing block of adj(M) against det(M) and a leading minor."""
    rng = random.Random(seed)
    checks = []
    for t in range(n):
        size = rng.randint(2, 6)
        M = sympy.Matrix(size, size, lambda i, j: rng.randint(-5, 5))
        d = M.det()
        if d == 0:
            M = M + sympy.eye(size) * 7
            d = M.det()
        adj = M.adjugate()
        k = rng.randint(1, size - 1)
        lhs = adj[k:, k:].det()
        rhs = d ** (size - k - 1) * M[:k, :k].det()
        checks.append(Check(f"Jacobi n={size} k={k} #{t}", lhs == rhs))
    return checks


def check_three_valent(graphs: list[Graph], n: int, seed: int = 4) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(n):
        g = random_relabel(rng.choice(graphs), rng)
        v = rng.choice([u for u in g.vertices if g.degree(u) == 3])
        order = list(g.incident_edges(v))
        rng.shuffle(order)
        d = kirchhoff.three_valent_data(g, v, order=order)
        checks.append(Check(f"3-valent expansion #{k}", d.reconstruct() == graph_polynomial(g)))
        checks.append(Check(f"3-valent f0 f123 = f1f2 + f2f3 + f1f3 #{k}", d.structure_identity_holds()))
        e1, e2, e3 = order
        same = dodgson(g, [e1, e2], [e1, e2], [e3]) == dodgson(g, [e2, e3], [e2, e3], [e1]) == dodgson(g, [e1, e3], [e1, e3], [e2])
        checks.append(Check(f"3-valent Psi^12_3 = Psi^23_1 = Psi^13_2 #{k}", same))
        # vanishing 3x3 minor: first row gives Psi^1 = +-Psi^{1,2} +- Psi^{1,3}
        row = solve_signs(dodgson(g, [e1], [e1]), [dodgson(g, [e1], [e2]), dodgson(g, [e1], [e3])])
        checks.append(Check(f"3-valent vanishing minor row #{k}", row is not None))
    return checks


def check_four_valent(graphs: list[Graph], n: int, seed: int = 5) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(n):
        g = random_relabel(rng.choice(graphs), rng)
        v = rng.choice([u for u in g.vertices if g.degree(u) == 4])
        try:
            d = kirchhoff.four_valent_data(g, v)
        except kirchhoff.DodgsonError as exc:
            checks.append(Check(f"4-valent sign calibration #{k}", False, str(exc)))
            continue
        e = {i: d.label(i) for i in (1, 2, 3, 4)}
        D = lambda I, J, K=(): dodgson(g, [e[x] for x in I], [e[x] for x in J], [e[x] for x in K])
        row = solve_signs(D((1,), (1,)), [D((1,), (2,)), D((1,), (3,)), D((1,), (4,))])
        checks.append(Check(f"4-valent row identity #{k}", row is not None))
        ok_a = all(
            match_sign(d.a, D((i, j, kk), (i, j, t))) != 0 and d.a == D((i, j, kk), (i, j, kk), (t,))
            for i, j, kk, t in itertools.permutations((1, 2, 3, 4))
        )
        checks.append(Check(f"4-valent a = Psi^ijk,ijt = Psi^ijk_t #{k}", ok_a))
        ok_b = all(
            d.psi2[(i, j)] == d.b[(i, kk)] + d.b[(i, t)]
            for i, j in itertools.permutations((1, 2, 3, 4), 2)
            for kk, t in [sorted({1, 2, 3, 4} - {i, j})]
        )
        checks.append(Check(f"4-valent Psi^ij_kt = b^i_k + b^i_t #{k}", ok_b))
        ok_c = all(d.psi1[i] == sum((d.c[(i, j)] for j in (1, 2, 3, 4) if j != i), Polynomial()) for i in (1, 2, 3, 4))
        checks.append(Check(f"4-valent Psi^i_jkt = sum c #{k}", ok_c))
        ok_ideal = all(
            kirchhoff.in_principal_ideal(d.b[(i, t)] ** 2 - d.psi2[(i, j)] * d.psi2[(i, kk)], d.a)
            for i, j, kk, t in itertools.permutations((1, 2, 3, 4))
        )
        checks.append(Check(f"4-valent (b^i_t)^2 = Psi^ij_kt Psi^ik_jt mod a #{k}", ok_ideal))
        p1234 = D((1, 2), (3, 4))
        s1 = match_sign(p1234, d.b[(2, 4)] - d.b[(1, 4)])
        s2 = match_sign(p1234, d.b[(2, 3)] - d.b[(1, 3)])
        checks.append(Check(f"4-valent Psi^12,34 = b^2_4 - b^1_4 = b^2_3 - b^1_3 (up to sign) #{k}", s1 != 0 and s2 != 0))
    return checks


def _far_ends(g: Graph, v: int) -> dict[int, int]:
    edges = sorted(g.incident_edges(v))
    return {i + 1: g.other_end(lab, v) for i, lab in enumerate(edges)}


def check_forests(g: Graph) -> list[Check]:
    """Forest decompositions of Psi^{12,34} and b^1_4, b^2_4 at each 4-valent vertex."""
    checks = []
    for v in [u for u in g.vertices if g.degree(u) == 4]:
        w = _far_ends(g, v)
        h = g.remove_vertex(v)
        phi = lambda *blocks: kirchhoff.forest_polynomial(h, [{w[i] for i in b} for b in blocks])
        d = kirchhoff.four_valent_data(g, v)
        e = d.edges
        p1234 = dodgson(g, [e[0], e[1]], [e[2], e[3]])
        f43 = phi((1, 3), (2, 4)) - phi((2, 3), (1, 4))
        checks.append(Check(f"forest Psi^12,34 at v{v}", match_sign(p1234, f43) != 0))
        b14 = phi((2, 3), (1, 4)) + phi((1, 2, 3), (4,))
        b24 = phi((1, 3), (2, 4)) + phi((1, 2, 3), (4,))
        ok = d.b[(1, 4)] == b14 and d.b[(2, 4)] == b24
        checks.append(Check(f"forest b^1_4, b^2_4 at v{v}", ok))
    return checks


def check_surgery(g: Graph) -> list[Check]:
    checks = []
    for v in [u for u in g.vertices if g.degree(u) == 4]:
        e = sorted(g.incident_edges(v))
        lhs = dodgson(g, [e[0], e[1]], [e[2], e[3]])
        h, s, t = kirchhoff.surgery(g, v)
        rhs = dodgson(h, [s], [t])
        checks.append(Check(f"surgery Psi^12,34 = Psi^s,t at v{v}", match_sign(lhs, rhs) != 0))
    return checks


def identities_suite(n: int = 20, seed: int = 0) -> list[Check]:
    three = [complete_graph(4), zigzag(4), zigzag(5)]
    four = [complete_graph(5), octahedron()]
    base = [complete_graph(4), complete_graph(5), zigzag(4), octahedron()]
    out = []
    out += check_contraction_deletion(base, n, seed + 1)
    out += check_first_dodgson(base, n, seed + 2)
    out += check_jacobi(n, seed + 3)
    out += check_three_valent(three, n, seed + 4)
    out += check_four_valent(four, max(2, n // 4), seed + 5)
    out += check_forests(complete_graph(5))
    for g in four:
        out += check_surgery(g)
    return out


# ---------------------------------------------------------------------------
# counting


def _random_poly(rng, vars_, terms=3, max_deg=2):
    f = Polynomial()
    for _ in range(terms):
        m = Polynomial.const(rng.randint(-3, 3))
        for x in vars_:
            if rng.random() < 0.4:
                m = m * Polynomial.var(x) ** rng.randint(1, max_deg)
        f = f + m
    return f


def _random_linear_in(rng, x, others):
    return _random_poly(rng, others, 2) * Polynomial.var(x) + _random_poly(rng, others, 3)


def check_linear_elimination(n: int, qs=(2, 3, 5), seed: int = 6) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(n):
        others = [2, 3, 4]
        f = _random_linear_in(rng, 1, others)
        g = _random_linear_in(rng, 1, others)
        h = _random_poly(rng, others, 2) if rng.random() < 0.7 else Polynomial()
        if k % 10 == 0:
            f = _random_poly(rng, others, 3)  # degenerate: f^x = 0
        q = qs[k % len(qs)]
        for c in counting.verify_linear_elim(f, g, h, 1, q):
            checks.append(Check(f"{c.name} q={q} #{k}", c.ok, f"{c.lhs} vs {c.rhs}"))
    return checks


def check_divisibility(graphs: dict[str, Graph], qs=(2, 3, 4, 5)) -> list[Check]:
    checks = []
    for name, g in graphs.items():
        psi = graph_polynomial(g)
        for q in qs:
            if q ** (g.n_edges - 1) > 5_000_000:
                continue
            n = counting.count_affine([psi], g.labels, q).count
            checks.append(Check(f"q^2 | [Psi] {name} q={q}", n % (q * q) == 0, str(n)))
            for e in g.labels:
                s = linear_split(psi, e)
                amb = [x for x in g.labels if x != e]
                m = counting.count_affine([s.leading, s.constant], amb, q).count
                checks.append(Check(f"q | [Psi^e, Psi_e] {name} e={e} q={q}", m % q == 0, str(m)))
    return checks


def check_chevalley_warning(n: int, qs=(2, 3, 5), seed: int = 7) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    tried = 0
    while len(checks) < n and tried < 50 * n:
        tried += 1
        nv = rng.randint(2, 5)
        vs = list(range(1, nv + 1))
        polys = [_random_poly(rng, vs, rng.randint(1, 3), 2) for _ in range(rng.randint(1, 2))]
        if not counting.chevalley_warning_applies(polys, vs):
            continue
        q = rng.choice(qs)
        c = counting.count_affine(polys, vs, q).count
        checks.append(Check(f"Chevalley-Warning q={q} #{len(checks)}", c % q == 0, str(c)))
    return checks


def lemma13_sides(g: Graph, e1: int, e2: int, q: int) -> tuple[int, int]:
    """Both sides of the two-edge expansion of [Psi_G] as exact integers."""
    psi = graph_polynomial(g)
    D = lambda I, J, K=(): dodgson(g, I, J, K)
    N = g.n_edges
    A1 = [x for x in g.labels if x != e1]
    A12 = [x for x in g.labels if x not in (e1, e2)]
    c = lambda ps, amb: counting.count_affine(ps, amb, q).count
    lhs = c([psi], g.labels)
    four = [D([e1, e2], [e1, e2]), D([e1], [e1], [e2]), D([e2], [e2], [e1]), D([], [], [e1, e2])]
    rhs = (
        q ** (N - 1)
        - c([D([e1], [e1])], A1)
        + q * q * c(four, A12)
        + q * c([D([e1], [e2])], A12)
        - q * c([four[0], four[2]], A12)
    )
    return lhs, rhs


def prop_big_system(g: Graph, v: int):
    e = sorted(g.incident_edges(v))
    e1, e2 = e[0], e[1]
    four = [dodgson(g, [e1, e2], [e1, e2]), dodgson(g, [e1], [e1], [e2]), dodgson(g, [e2], [e2], [e1]), dodgson(g, [], [], [e1, e2])]
    return four, [x for x in g.labels if x not in (e1, e2)], e


def check_elimination_multi(n: int, qs=(2, 3), seed: int = 8) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    for k in range(n):
        m = 1 + k % 2
        others = [2, 3, 4]
        polys = [_random_linear_in(rng, 1, others) for _ in range(m)]
        q = qs[k % len(qs)]
        lhs = counting.count_affine(polys, [1] + others, q).count
        rhs = reduction.count_terms(reduction.eliminate_multi(polys, 1), others, q)
        checks.append(Check(f"multi-elimination n={m} q={q} #{k}", lhs == rhs, f"{lhs} vs {rhs}"))
    g = complete_graph(5)
    four, amb, e = prop_big_system(g, 0)
    x = e[2]
    lhs = counting.count_affine(four, amb, 2).count
    rhs = reduction.count_terms(reduction.eliminate_multi(four, x), [y for y in amb if y != x], 2)
    checks.append(Check("multi-elimination K5 4-system q=2", lhs == rhs, f"{lhs} vs {rhs}"))
    return checks


def counting_suite(n: int = 30, seed: int = 0) -> list[Check]:
    out = []
    out += check_linear_elimination(n, seed=seed + 6)
    out += check_divisibility(corpus(), (2, 3))
    out += check_chevalley_warning(n, seed=seed + 7)
    for name, g in (("K4", complete_graph(4)), ("K5", complete_graph(5))):
        for q in (2, 3):
            lhs, rhs = lemma13_sides(g, 1, 2, q)
            out.append(Check(f"two-edge expansion {name} q={q}", lhs == rhs, f"{lhs} vs {rhs}"))
    out += check_elimination_multi(max(4, n // 5), seed=seed + 8)
    return out


# ---------------------------------------------------------------------------
# 4-valent formula


def theorem3_sides(g: Graph, v: int, q: int) -> tuple[int, int]:
    """``[Psi_G]`` and ``-q^2([P, Q] + sum c2(G - e_i))``, both reduced mod q^3."""
    psi = graph_polynomial(g)
    lhs = counting.count_affine([psi], g.labels, q).count
    (P, Q), amb = reduction.four_valent_pair(g, v)
    pq = counting.count_affine([P, Q], amb, q).count
    c2s = sum(counting.c2_bruteforce(g.delete_edge(e), q) for e in g.incident_edges(v))
    return lhs % q**3, (-q * q * (pq + c2s)) % q**3


def lemma15_sides(g: Graph, v: int, q: int) -> tuple[int, int]:
    """``[Psi^{1,2}]`` and ``q(-[P, Q] - c2(G - e3) - c2(G - e4))`` mod q^2."""
    e = sorted(g.incident_edges(v))
    amb = [x for x in g.labels if x not in e[:2]]
    lhs = counting.count_affine([dodgson(g, [e[0]], [e[1]])], amb, q).count
    (P, Q), amb4 = reduction.four_valent_pair(g, v)
    pq = counting.count_affine([P, Q], amb4, q).count
    c3 = counting.c2_bruteforce(g.delete_edge(e[2]), q)
    c4 = counting.c2_bruteforce(g.delete_edge(e[3]), q)
    return lhs % q**2, (q * (-pq - c3 - c4)) % q**2


def resultant_product_identity(g: Graph, v: int) -> bool:
    """``Psi^{134,234} Psi^{1,2}_{34} - Psi^{13,23}_4 Psi^{14,24}_3 = +-Psi^{13,24} Psi^{14,23}``."""
    e1, e2, e3, e4 = sorted(g.incident_edges(v))
    D = lambda I, J, K=(): dodgson(g, I, J, K)
    lhs = D([e1, e3, e4], [e2, e3, e4]) * D([e1], [e2], [e3, e4]) - D([e1, e3], [e2, e3], [e4]) * D([e1, e4], [e2, e4], [e3])
    return match_sign(lhs, D([e1, e3], [e2, e4]) * D([e1, e4], [e2, e3])) != 0


def theorem3_suite(cases=None) -> list[Check]:
    cases = cases or [("K5", complete_graph(5), (2, 3)), ("octahedron", octahedron(), (2, 3))]
    out = []
    for name, g, qs in cases:
        out.append(Check(f"resultant product identity {name}", resultant_product_identity(g, 0)))
        for q in qs:
            lhs, rhs = theorem3_sides(g, 0, q)
            out.append(Check(f"4-valent formula mod q^3 {name} q={q}", lhs == rhs, f"{lhs} vs {rhs}"))
            lhs, rhs = lemma15_sides(g, 0, q)
            out.append(Check(f"[Psi^1,2] mod q^2 {name} q={q}", lhs == rhs, f"{lhs} vs {rhs}"))
            four, amb, _ = prop_big_system(g, 0)
            r = counting.count_affine(four, amb, q).count % q
            out.append(Check(f"four-system vanishes mod q {name} q={q}", r == 0, str(r)))
            fv = reduction.c2_four_valent(g, 0, q)
            bf = counting.c2_bruteforce(g, q)
            out.append(Check(f"4-valent c2 = brute force {name} q={q}", fv == bf, f"{fv} vs {bf}"))
    return out


# ---------------------------------------------------------------------------
# SLR


def slr_suite(hs=(3, 4), qs=(2, 3, 5)) -> list[Check]:
    out = []
    for h in hs:
        g = zigzag(h, completed=True)
        expect = h * (h + 2)
        reports = {}
        for strategy in ("greedy", "label"):
            rep = reduction.c2_slr(g, qs, v=0, strategy=strategy)
            reports[strategy] = rep
            for t in rep.trees:
                problems = reduction.replay_check(t)
                out.append(Check(f"replay ZZ^_{h} {strategy}", not problems, "; ".join(problems[:3])))
            out.append(Check(f"SLR constant ZZ^_{h} {strategy}", rep.c == expect, f"c={rep.c}"))
            out.append(Check(f"SLR bound ZZ^_{h} {strategy}", rep.bound_ok))
        same = all(reports["greedy"].residues[q] == reports["label"].residues[q] for q in qs)
        out.append(Check(f"strategies agree ZZ^_{h}", same))
        for q in qs:
            cm = reduction.c2_four_valent(g, 0, q, mode="count")
            out.append(Check(f"SLR vs count mode ZZ^_{h} q={q}", cm == reports["greedy"].residues[q]))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "identities": identities_suite,
    "counting": counting_suite,
    "theorem3": theorem3_suite,
    "slr": slr_suite,
}
