import pytest
from hypothesis import given, settings, strategies as st

from c2tools import counting
from c2tools.counting import (
    CountingError,
    DivisibilityError,
    c2_bruteforce,
    chevalley_warning_applies,
    count_affine,
    count_parallel,
    get_field,
    verify_linear_elim,
)
from c2tools.graphs import Graph, GraphError, complete_graph, cycle_graph, zigzag
from c2tools.kirchhoff import dodgson, graph_polynomial
from c2tools.polyring import Polynomial
from c2tools.suites import subdivided_k4
from oracles import naive_count
from test_polyring import polys

a1, a2, a3 = (Polynomial.var(i) for i in range(1, 4))


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27])
def test_extension_fields_are_fields(q):
    F = get_field(q)
    A, M = F.add_table, F.mul_table
    for x in range(1, q):
        assert M[x, F.inv[x]] == 1
    for x in range(q):
        assert A[x, F.neg[x]] == 0
        acc = 0
        for _ in range(F.p):
            acc = A[acc, x]
        assert acc == 0  # characteristic p
    els = range(q)
    assert all(M[x, A[y, z]] == A[M[x, y], M[x, z]] for x in els for y in els for z in els)
    assert all(M[M[x, y], z] == M[x, M[y, z]] for x in els for y in els for z in els)
    # the multiplicative group is cyclic of order q - 1
    orders = []
    for x in range(1, q):
        k, y = 1, x
        while y != 1:
            y, k = M[y, x], k + 1
        orders.append(k)
    assert max(orders) == q - 1


def test_unsupported_field():
    with pytest.raises(CountingError):
        get_field(6)


def test_count_examples():
    for q in (2, 3, 4, 5):
        assert count_affine([a1 + a2 + a3], [1, 2, 3], q).count == q * q
        assert count_affine([], [1, 2, 3, 4], q).count == q**4
    psi = graph_polynomial(complete_graph(4))
    n = count_affine([psi], complete_graph(4).labels, 2).count
    assert n == naive_count([psi], complete_graph(4).labels, 2)
    assert n % 4 == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(polys(n_vars=4, max_terms=4, max_deg=2), min_size=1, max_size=3), st.sampled_from([2, 3, 5]))
def test_count_matches_naive(ps, q):
    amb = [1, 2, 3, 4]
    expect = naive_count(ps, amb, q)
    assert count_affine(ps, amb, q).count == expect
    assert count_affine(ps, amb, q, linear=False).count == expect
    assert count_parallel(ps, amb, q, shards=3).count == expect


def test_ambient_must_cover_variables():
    with pytest.raises(CountingError):
        count_affine([a1 * a3], [1, 2], 3)


def test_parallel_sharding_consistent():
    psi = graph_polynomial(complete_graph(5))
    labels = complete_graph(5).labels
    base = count_affine([psi], labels, 3).count
    assert count_parallel([psi], labels, 3, shards=1).count == base
    assert count_parallel([psi], labels, 3, shards=8).count == base
    assert count_parallel([psi], labels, 3, shards=4, threads=2).count == base


def test_octahedron_count_runs():
    g = zigzag(4, completed=True)
    n = count_affine([graph_polynomial(g)], g.labels, 3).count
    assert n % 9 == 0


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_c2_k4(q):
    assert c2_bruteforce(complete_graph(4), q) == (-1) % q


def test_c2_k5_q7():
    assert c2_bruteforce(complete_graph(5), 7) == (-15) % 7


def test_c2_two_valent_vanishes():
    assert c2_bruteforce(subdivided_k4(), 3) == 0


def test_c2_small_graph_rejected():
    with pytest.raises(GraphError):
        c2_bruteforce(Graph.from_edges(2, [(0, 1), (0, 1)]), 3)


def test_divisibility_violation_raised(monkeypatch):
    monkeypatch.setattr(counting, "count_affine", lambda *a, **k: counting.CountResult(7, (1, 2, 3), 3))
    with pytest.raises(DivisibilityError):
        c2_bruteforce(cycle_graph(3), 3)


def test_linear_elimination_examples():
    for c in verify_linear_elim(a1 + a2, a2 * a1 + 1, Polynomial.const(1), 1, 2):
        assert c.ok, c
    # f with no x: leading part zero
    for c in verify_linear_elim(a2 + a3, a1 * a3 + a2, a2, 1, 3):
        assert c.ok, c


@settings(max_examples=60, deadline=None)
@given(
    polys(n_vars=2, max_terms=3, max_deg=2, first=2),
    polys(n_vars=2, max_terms=3, max_deg=2, first=2),
    polys(n_vars=2, max_terms=3, max_deg=2, first=2),
    polys(n_vars=2, max_terms=3, max_deg=2, first=2),
    polys(n_vars=2, max_terms=2, max_deg=2, first=2),
    st.sampled_from([2, 3, 5]),
)
def test_linear_elimination_property(p, q_, r, s, h, q):
    f, g = p * a1 + q_, r * a1 + s
    for c in verify_linear_elim(f, g, h, 1, q):
        assert c.ok, c


def test_chevalley_warning_predicate():
    assert chevalley_warning_applies([a1 + a2 + a3], [1, 2, 3])
    k4 = complete_graph(4)
    assert chevalley_warning_applies([graph_polynomial(k4)], k4.labels)
    k5 = complete_graph(5)
    e1, e2, e3, e4 = sorted(k5.incident_edges(0))
    P, Q = dodgson(k5, [e1, e3], [e2, e4]), dodgson(k5, [e1, e4], [e2, e3])
    amb = [x for x in k5.labels if x not in (e1, e2, e3, e4)]
    assert not chevalley_warning_applies([P, Q], amb)
