import random

import pytest
from hypothesis import given, settings

from c2tools import suites
from c2tools.graphs import Graph, GraphError, complete_graph, cycle_graph, zigzag
from c2tools.kirchhoff import (
    DodgsonError,
    dodgson,
    forest_polynomial,
    four_valent_data,
    graph_polynomial,
    match_sign,
    surgery,
    three_valent_data,
)
from c2tools.polyring import Polynomial
from oracles import matrix_tree_psi, sym
from test_graphs import connected_graphs

a = {i: Polynomial.var(i) for i in range(1, 13)}


def test_graph_polynomial_examples():
    assert graph_polynomial(cycle_graph(3)) == a[1] + a[2] + a[3]
    assert graph_polynomial(Graph.from_edges(2, [(0, 1), (0, 1)])) == a[1] + a[2]
    psi = graph_polynomial(complete_graph(4))
    assert len(psi) == 16 and psi.is_homogeneous() and psi.degree() == 3


@pytest.mark.parametrize("name", ["K4", "ZZ4", "K5", "K33", "wheel5"])
def test_graph_polynomial_matches_matrix_tree(name):
    g = suites.corpus()[name]
    pairs = [(g.vertices.index(u), g.vertices.index(v)) for _, u, v in g.edges]
    assert sym(graph_polynomial(g)) == matrix_tree_psi(g.n_vertices, pairs)


@settings(max_examples=40, deadline=None)
@given(connected_graphs())
def test_backends_agree(g):
    p = graph_polynomial(g, "trees")
    assert p == graph_polynomial(g, "determinant") == graph_polynomial(g, "subgraphs")
    assert p.is_multilinear() and p.degree() == g.loop_number()


def test_disconnected_rejected():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(GraphError):
        graph_polynomial(g)


def test_dodgson_examples():
    tri = cycle_graph(3)
    assert dodgson(tri) == graph_polynomial(tri)
    assert match_sign(dodgson(tri, [1], [2]), Polynomial.const(1)) != 0
    k4 = complete_graph(4)
    e = k4.incident_edges(0)
    assert dodgson(k4, e, e).is_zero()


def test_dodgson_spec_validation():
    k4 = complete_graph(4)
    with pytest.raises(DodgsonError):
        dodgson(k4, [1, 2], [3])
    with pytest.raises(DodgsonError):
        dodgson(k4, [1], [2], [1])
    with pytest.raises(DodgsonError):
        dodgson(k4, [99], [2])


def test_dodgson_backends_agree():
    rng = random.Random(11)
    for g in (complete_graph(4), zigzag(4), complete_graph(5)):
        for _ in range(15):
            pool = list(g.labels)
            rng.shuffle(pool)
            k = rng.randint(0, 2)
            I, J, K = pool[:k], pool[k : 2 * k], pool[2 * k : 2 * k + rng.randint(0, 2)]
            assert dodgson(g, I, J, K) == dodgson(g, I, J, K, backend="elimination")


def test_dodgson_symmetric_in_ij():
    g = complete_graph(5)
    assert dodgson(g, [1, 3], [2, 4]) == dodgson(g, [2, 4], [1, 3])


def test_forest_polynomials():
    tri = cycle_graph(3)
    # monomials are cotrees: one block gives the graph polynomial
    assert forest_polynomial(tri, [{0, 1, 2}]) == graph_polynomial(tri)
    # two-tree forests separating 0 and 1 are {e2} and {e3}
    assert forest_polynomial(tri, [{0}, {1}]) == a[1] * a[3] + a[1] * a[2]
    with pytest.raises(GraphError):
        forest_polynomial(tri, [{0}, {0, 1}])


def test_three_valent_structure():
    for g in (complete_graph(4), zigzag(4)):
        for v in g.vertices:
            if g.degree(v) == 3:
                d = three_valent_data(g, v)
                assert d.structure_identity_holds()
                assert d.reconstruct() == graph_polynomial(g)
    with pytest.raises(GraphError):
        three_valent_data(complete_graph(5), 0)


def test_four_valent_structure():
    for g in (complete_graph(5), suites.octahedron()):
        d = four_valent_data(g, 0)
        for i in range(1, 5):
            others = [j for j in range(1, 5) if j != i]
            assert sum((d.c[(i, j)] for j in others), Polynomial()) == d.psi1[i]
    with pytest.raises(GraphError):
        four_valent_data(complete_graph(4), 0)


def test_surgery():
    for g in (complete_graph(5), suites.octahedron()):
        g2, s, t = surgery(g, 0)
        e1, e2, e3, e4 = sorted(g.incident_edges(0))
        assert match_sign(dodgson(g, [e1, e2], [e3, e4]), dodgson(g2, [s], [t])) != 0
        assert g2.n_edges == g.n_edges - 2
    # pairing whose neighbours coincide
    g = Graph.from_edges(3, [(0, 1), (0, 1), (0, 2), (0, 2), (1, 2)])
    with pytest.raises(GraphError):
        surgery(g, 0, ((1, 2), (3, 4)))


@pytest.mark.parametrize("suite", ["forests", "surgery", "four-valent", "three-valent"])
def test_identity_groups(suite):
    k5, oct_ = complete_graph(5), suites.octahedron()
    run = {
        "forests": lambda: suites.check_forests(k5),
        "surgery": lambda: suites.check_surgery(k5) + suites.check_surgery(oct_),
        "four-valent": lambda: suites.check_four_valent([k5, oct_], 4),
        "three-valent": lambda: suites.check_three_valent([complete_graph(4), zigzag(4)], 10),
    }[suite]
    bad = [c.name for c in run() if not c.ok]
    assert not bad
