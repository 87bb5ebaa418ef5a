"""Graph polynomials, Dodgson polynomials and spanning forest polynomials.

Matrix convention (fixed once for the whole package):

* edge rows/columns of the expanded matrix are ordered by edge label;
* vertex columns of the incidence matrix are ordered by vertex id and the
  column of the highest id is dropped;
* an edge ``(u, v)`` with ``u < v`` has incidence ``+1`` at ``u`` and ``-1``
  at ``v``; self-loops have a zero row.

Every quantity has two independent routes.  Graph polynomials come from
spanning-tree enumeration or from the determinant of the expanded matrix;
Dodgson polynomials come from the all-minors expansion over subgraphs or
from fraction-free elimination of the matrix minor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, GraphError
from .polyring import BITS, Polynomial, PolynomialError, divexact

_CHUNK = 20000


class DodgsonError(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrices


def incidence_matrix(g: Graph) -> np.ndarray:
    """``N x (|V|-1)`` signed incidence matrix with the last vertex column removed."""
    cols = sorted(g.vertices)[:-1]
    index = {v: i for i, v in enumerate(cols)}
    E = np.zeros((g.n_edges, len(cols)), dtype=np.int64)
    for r, (_, u, v) in enumerate(g.edges):
        if u == v:
            continue
        if u in index:
            E[r, index[u]] += 1
        if v in index:
            E[r, index[v]] -= 1
    return E


def expanded_matrix(g: Graph) -> list[list[Polynomial]]:
    """The block matrix ``[[diag(alpha), E], [-E^T, 0]]``."""
    E = incidence_matrix(g)
    N, n = E.shape
    zero = Polynomial()
    M = [[zero] * (N + n) for _ in range(N + n)]
    for r, (lab, _, _) in enumerate(g.edges):
        M[r][r] = Polynomial.var(lab)
        for c in range(n):
            if E[r, c]:
                M[r][N + c] = Polynomial.const(int(E[r, c]))
                M[N + c][r] = Polynomial.const(-int(E[r, c]))
    return M


def _pivot_score(p: Polynomial):
    if p.is_constant():
        return (0, abs(p.constant_value()) != 1, 0)
    return (1, len(p), p.degree())


def det_bareiss(A: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free determinant with full pivoting (cheapest entry first)."""
    n = len(A)
    if n == 0:
        return Polynomial.const(1)
    A = [list(row) for row in A]
    sign = 1
    prev = Polynomial.const(1)
    for k in range(n):
        best = None
        for i in range(k, n):
            row = A[i]
            for j in range(k, n):
                if row[j]:
                    s = _pivot_score(row[j])
                    if best is None or s < best[0]:
                        best = (s, i, j)
                        if s == (0, False, 0):
                            break
            if best is not None and best[0] == (0, False, 0):
                break
        if best is None:
            return Polynomial()
        _, i, j = best
        if i != k:
            A[i], A[k] = A[k], A[i]
            sign = -sign
        if j != k:
            for row in A:
                row[j], row[k] = row[k], row[j]
            sign = -sign
        p = A[k][k]
        pivot_row = A[k]
        pivot_cols = [j for j in range(k + 1, n) if pivot_row[j]]
        unit = prev.is_constant() and prev.constant_value() == 1
        for i in range(k + 1, n):
            row = A[i]
            lead = row[k]
            if not lead:
                if p == prev:
                    continue  # row unchanged
                for j in range(k + 1, n):
                    if row[j]:
                        row[j] = divexact(p * row[j], prev)
                continue
            touched = pivot_cols if p == prev else range(k + 1, n)
            for j in touched:
                num = p * row[j] - lead * pivot_row[j] if row[j] else -(lead * pivot_row[j])
                row[j] = num if unit or not num else divexact(num, prev)
        prev = p
    return A[n - 1][n - 1] * sign


# ---------------------------------------------------------------------------
# graph polynomial


def spanning_trees(g: Graph) -> Iterable[tuple[int, ...]]:
    """Yield spanning trees as tuples of edge labels."""
    need = g.n_vertices - 1
    cand = [e for e in g.edges if e[1] != e[2]]
    for combo in itertools.combinations(cand, need):
        parent = {v: v for v in g.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for _, u, v in combo:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            yield tuple(e[0] for e in combo)


def _cotree_poly(g: Graph, forests: Iterable[Iterable[int]]) -> Polynomial:
    full = sum(1 << (BITS * lab) for lab in g.labels)
    terms: dict[int, int] = {}
    for f in forests:
        k = full - sum(1 << (BITS * lab) for lab in f)
        terms[k] = terms.get(k, 0) + 1
    return Polynomial(terms)


def graph_polynomial(g: Graph, backend: str = "trees") -> Polynomial:
    """Kirchhoff polynomial: sum over spanning trees of the cotree monomials."""
    if g.n_edges < 1:
        raise GraphError("graph polynomial needs at least one edge")
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    if backend == "trees":
        return _cotree_poly(g, spanning_trees(g))
    if backend == "determinant":
        return det_bareiss(expanded_matrix(g))
    if backend == "subgraphs":
        return dodgson(g, (), (), (), backend="subgraphs")
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# Dodgson polynomials


@dataclass(frozen=True)
class DodgsonSpec:
    """Rows ``I`` and columns ``J`` removed, variables in ``K`` set to zero."""

    I: frozenset = field(default_factory=frozenset)
    J: frozenset = field(default_factory=frozenset)
    K: frozenset = field(default_factory=frozenset)

    @classmethod
    def of(cls, I: Iterable[int] = (), J: Iterable[int] = (), K: Iterable[int] = ()) -> "DodgsonSpec":
        return cls(frozenset(I), frozenset(J), frozenset(K))

    def validate(self, g: Graph) -> None:
        labels = set(g.labels)
        if len(self.I) != len(self.J):
            raise DodgsonError("|I| must equal |J|")
        if not (self.I | self.J | self.K) <= labels:
            raise DodgsonError("spec mentions an edge not in the graph")
        if self.K & (self.I | self.J):
            raise DodgsonError("K must be disjoint from I and J")


def dodgson(
    g: Graph,
    I: Iterable[int] | DodgsonSpec = (),
    J: Iterable[int] = (),
    K: Iterable[int] = (),
    backend: str = "subgraphs",
) -> Polynomial:
    """``Psi^{I,J}_{G,K}``: determinant of the expanded matrix minor."""
    spec = I if isinstance(I, DodgsonSpec) else DodgsonSpec.of(I, J, K)
    spec.validate(g)
    if backend == "subgraphs":
        return _dodgson_subgraphs(g, spec)
    if backend == "elimination":
        return _dodgson_elimination(g, spec)
    raise ValueError(f"unknown backend {backend!r}")


def _dodgson_elimination(g: Graph, spec: DodgsonSpec) -> Polynomial:
    M = expanded_matrix(g)
    pos = {lab: r for r, lab in enumerate(g.labels)}
    rows = [r for r in range(len(M)) if not (r < g.n_edges and g.labels[r] in spec.I)]
    cols = [c for c in range(len(M)) if not (c < g.n_edges and g.labels[c] in spec.J)]
    kill = [pos[k] for k in spec.K]
    sub = []
    for r in rows:
        row = []
        for c in cols:
            entry = M[r][c]
            if r == c and r in kill:
                entry = Polynomial()
            row.append(entry)
        sub.append(row)
    return det_bareiss(sub)


def _dodgson_subgraphs(g: Graph, spec: DodgsonSpec) -> Polynomial:
    """All-minors expansion: one signed term per admissible forest ``U``.

    The coefficient of the cotree monomial of ``W`` is
    ``(-1)^{sum_{e in W} (#{i in I: i < e} + #{j in J: j < e})}``
    times ``det E[U + (J-I)] * det E[U + (I-J)]``.
    """
    E = incidence_matrix(g).astype(float)
    labels = g.labels
    row_of = {lab: r for r, lab in enumerate(labels)}
    n = E.shape[1]
    I, J, K = spec.I, spec.J, spec.K
    only_j = sorted(J - I)
    only_i = sorted(I - J)
    pool = [lab for lab in labels if lab not in I | J | K]
    m = n - len(only_j) - len(K)
    if m < 0 or m > len(pool):
        return Polynomial()
    weight = {e: (sum(i < e for i in I) + sum(j < e for j in J)) & 1 for e in labels}
    w_total = sum(weight[e] for e in pool)
    pool_key = sum(1 << (BITS * e) for e in pool)
    pool_rows = np.array([row_of[e] for e in pool], dtype=np.int64)
    fixed_r = np.array([row_of[e] for e in list(K) + only_j], dtype=np.int64)
    fixed_c = np.array([row_of[e] for e in list(K) + only_i], dtype=np.int64)

    terms: dict[int, int] = {}
    combos = itertools.combinations(range(len(pool)), m)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.int64).reshape(len(chunk), m)
        sel = pool_rows[idx]
        R = np.sort(np.concatenate([sel, np.broadcast_to(fixed_r, (len(chunk), len(fixed_r)))], axis=1), axis=1)
        C = np.sort(np.concatenate([sel, np.broadcast_to(fixed_c, (len(chunk), len(fixed_c)))], axis=1), axis=1)
        if n == 0:
            d1 = np.ones(len(chunk))
            d2 = np.ones(len(chunk))
        else:
            d1 = np.rint(np.linalg.det(E[R]))
            d2 = np.rint(np.linalg.det(E[C]))
        prod = (d1 * d2).astype(np.int64)
        for r in np.nonzero(prod)[0]:
            U = [pool[i] for i in chunk[r]]
            key = pool_key - sum(1 << (BITS * e) for e in U)
            parity = (w_total - sum(weight[e] for e in U)) & 1
            c = int(prod[r]) * (-1 if parity else 1)
            terms[key] = terms.get(key, 0) + c
    return Polynomial(terms)


# ---------------------------------------------------------------------------
# spanning forest polynomials


def forest_polynomial(g: Graph, partition: Sequence[Iterable[int]]) -> Polynomial:
    """Sum over spanning forests whose trees realize the vertex partition.

    The forest has one tree per block; tree ``i`` contains block ``i`` and
    no vertex of any other block.
    """
    blocks = [frozenset(b) for b in partition]
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise GraphError("empty block in partition")
        if b & seen or not b <= set(g.vertices):
            raise GraphError("malformed vertex partition")
        seen |= b
    k = len(blocks)
    need = g.n_vertices - k
    cand = [e for e in g.edges if e[1] != e[2]]
    forests = []
    for combo in itertools.combinations(cand, need):
        parent = {v: v for v in g.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for _, u, v in combo:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if not ok:
            continue
        roots = [{find(v) for v in b} for b in blocks]
        if all(len(r) == 1 for r in roots) and len({next(iter(r)) for r in roots}) == k:
            forests.append(tuple(e[0] for e in combo))
    return _cotree_poly(g, forests)


# ---------------------------------------------------------------------------
# sign calibration


def match_sign(p: Polynomial, q: Polynomial) -> int:
    """Return ``s`` in {1, -1} with ``p == s*q``, or 0 if neither holds."""
    if p == q:
        return 1
    if p == -q:
        return -1
    return 0


def solve_signs(target: Polynomial, parts: Sequence[Polynomial], prefer: Sequence[int] | None = None):
    """Signs ``s`` with ``target == sum(s_i * parts_i)``; None when impossible.

    ``prefer`` is tried first so a stated convention wins when it works.
    """
    options = list(itertools.product((1, -1), repeat=len(parts)))
    if prefer is not None:
        options.remove(tuple(prefer))
        options.insert(0, tuple(prefer))
    for signs in options:
        acc = Polynomial()
        for s, p in zip(signs, parts):
            acc = acc + p * s
        if acc == target:
            return signs
    return None


# ---------------------------------------------------------------------------
# 3-valent vertices


def _vertex_edges(g: Graph, v: int, valency: int) -> tuple[int, ...]:
    if v not in g.vertices:
        raise GraphError(f"no vertex {v}")
    edges = g.incident_edges(v)
    if g.degree(v) != valency or len(edges) != valency or any(g.is_loop(e) for e in edges):
        raise GraphError(f"vertex {v} is not {valency}-valent")
    return tuple(sorted(edges))


@dataclass(frozen=True)
class ThreeValentData:
    """Local data at a 3-valent vertex with incident edges ``e1 < e2 < e3``.

    ``f[k]`` is the signed ``Psi^{i,j}_k`` for the local index k, with the
    sign fixed so that ``Psi^i_{jk} = f_j + f_k``; ``signs[k]`` records
    that sign relative to the raw Dodgson polynomial of this package.
    """

    edges: tuple[int, int, int]
    f0: Polynomial
    f: dict
    f123: Polynomial
    signs: dict

    @property
    def f1(self) -> Polynomial:
        return self.f[1]

    @property
    def f2(self) -> Polynomial:
        return self.f[2]

    @property
    def f3(self) -> Polynomial:
        return self.f[3]

    def reconstruct(self) -> Polynomial:
        a1, a2, a3 = (Polynomial.var(e) for e in self.edges)
        f1, f2, f3 = self.f[1], self.f[2], self.f[3]
        return (
            self.f0 * (a1 * a2 + a2 * a3 + a1 * a3)
            + (f1 + f2) * a3
            + (f1 + f3) * a2
            + (f2 + f3) * a1
            + self.f123
        )

    def structure_identity_holds(self) -> bool:
        f1, f2, f3 = self.f[1], self.f[2], self.f[3]
        return self.f0 * self.f123 == f1 * f2 + f2 * f3 + f1 * f3


def three_valent_data(g: Graph, v: int, backend: str = "subgraphs", order: Sequence[int] | None = None) -> ThreeValentData:
    """``order`` optionally fixes which incident edge plays e1, e2, e3."""
    edges = _vertex_edges(g, v, 3)
    if order is not None:
        if sorted(order) != list(edges):
            raise GraphError("order must be a permutation of the incident edges")
        edges = tuple(order)
    e = {i + 1: lab for i, lab in enumerate(edges)}
    f0 = dodgson(g, (e[1], e[2]), (e[1], e[2]), (e[3],), backend=backend)
    single = {k: dodgson(g, (e[k],), (e[k],), [e[j] for j in (1, 2, 3) if j != k], backend=backend) for k in (1, 2, 3)}
    f = {}
    signs = {}
    for k in (1, 2, 3):
        i, j = [x for x in (1, 2, 3) if x != k]
        # Psi^i_{jk} = f_j + f_k  =>  f_k = (S_i + S_j - S_k) / 2
        fk = (single[i] + single[j] - single[k]).scale_div(2)
        raw = dodgson(g, (e[i],), (e[j],), (e[k],), backend=backend)
        s = match_sign(fk, raw)
        if s == 0:
            raise DodgsonError(f"3-valent structure failed at local edge {k}")
        f[k] = fk
        signs[k] = s
    f123 = graph_polynomial(g, "trees").set_zero(edges) if backend == "trees" else dodgson(
        g, (), (), edges, backend=backend
    )
    return ThreeValentData(edges, f0, f, f123, signs)


# ---------------------------------------------------------------------------
# 4-valent vertices


def paper_b_sign(i: int, j: int) -> tuple[int, int, int]:
    """``(k, t, sign)`` for ``b^i_j`` following the published exponent rule.

    ``{k, t}`` are the two remaining local indices taken in increasing order.
    """
    k, t = sorted({1, 2, 3, 4} - {i, j})
    r = (k - t) if (k - i) * (t - i) > 0 else (k - t - 1)
    return k, t, (-1) ** (r % 2)


@dataclass(frozen=True)
class FourValentData:
    """Local data at a 4-valent vertex with incident edges ``e1 < ... < e4``.

    ``b[(i, j)]`` is ``b^i_j`` and ``c[(i, j)]`` is ``c^{i,j}``, both with
    signs fixed by the sum rules; ``b_signs``/``c_signs`` record the sign
    relative to the raw Dodgson polynomial and ``*_paper`` whether that sign
    agrees with the published exponent rule.
    """

    edges: tuple[int, int, int, int]
    a: Polynomial
    b: dict
    c: dict
    b_raw: dict
    c_raw: dict
    b_signs: dict
    c_signs: dict
    b_paper: dict
    c_paper: dict
    psi2: dict  # (i, j) -> Psi^{ij}_{kt}
    psi1: dict  # i -> Psi^i_{jkt}

    def label(self, i: int) -> int:
        return self.edges[i - 1]


def four_valent_data(g: Graph, v: int, backend: str = "subgraphs") -> FourValentData:
    edges = _vertex_edges(g, v, 4)
    e = {i + 1: lab for i, lab in enumerate(edges)}
    idx = (1, 2, 3, 4)

    def others(*xs):
        return [x for x in idx if x not in xs]

    def D(I, J, K):
        return dodgson(g, [e[x] for x in I], [e[x] for x in J], [e[x] for x in K], backend=backend)

    a = D((1, 2, 3), (1, 2, 3), (4,))
    psi2 = {}
    for i, j in itertools.combinations(idx, 2):
        psi2[(i, j)] = psi2[(j, i)] = D((i, j), (i, j), others(i, j))
    psi1 = {i: D((i,), (i,), others(i)) for i in idx}

    b, b_raw, b_signs, b_paper = {}, {}, {}, {}
    for i in idx:
        for j in others(i):
            k, t = others(i, j)
            # Psi^{ij}_{kt} = b^i_k + b^i_t  =>  b^i_j = (T_ik + T_it - T_ij) / 2
            bij = (psi2[(i, k)] + psi2[(i, t)] - psi2[(i, j)]).scale_div(2)
            raw = D((k, i), (i, t), (j,))
            s = match_sign(bij, raw)
            if s == 0:
                raise DodgsonError(f"b^{i}_{j} is not a signed Dodgson polynomial")
            b[(i, j)], b_raw[(i, j)], b_signs[(i, j)] = bij, raw, s
            b_paper[(i, j)] = paper_b_sign(i, j)[2] == s

    c, c_raw, c_signs, c_paper = {}, {}, {}, {}
    for i in idx:
        js = others(i)
        raws = [D((i,), (j,), others(i, j)) for j in js]
        prefer = [(-1) ** ((i - j - 1) % 2) for j in js]
        signs = solve_signs(psi1[i], raws, prefer)
        if signs is None:
            raise DodgsonError(f"c^{{{i},j}} sum rule has no sign solution")
        for j, raw, s, p in zip(js, raws, signs, prefer):
            c[(i, j)] = raw * s
            c_raw[(i, j)] = raw
            c_signs[(i, j)] = s
            c_paper[(i, j)] = s == p
    return FourValentData(edges, a, b, c, b_raw, c_raw, b_signs, c_signs, b_paper, c_paper, psi2, psi1)


def in_principal_ideal(f: Polynomial, a: Polynomial) -> bool:
    """Whether ``f`` lies in the ideal generated by ``a``."""
    if f.is_zero():
        return True
    if a.is_zero():
        return False
    try:
        q = divexact(f, a)
    except PolynomialError:
        return False
    return q * a == f


def surgery(g: Graph, v: int, pairing: tuple[tuple[int, int], tuple[int, int]] = ((1, 2), (3, 4))) -> tuple[Graph, int, int]:
    """Replace a 4-valent vertex by two edges joining its neighbours.

    ``pairing`` lists the local edge indices whose far endpoints are joined
    by the new edge ``s`` and by the new edge ``t``.  Returns ``(G', s, t)``.
    """
    edges = _vertex_edges(g, v, 4)
    flat = [x for pair in pairing for x in pair]
    if len(pairing) != 2 or any(len(p) != 2 for p in pairing) or sorted(flat) != [1, 2, 3, 4]:
        raise GraphError("pairing must split the local indices 1..4 into two pairs")
    ends = {i + 1: g.other_end(lab, v) for i, lab in enumerate(edges)}
    (p, q), (r, w) = pairing
    if ends[p] == ends[q] or ends[r] == ends[w]:
        raise GraphError("pairing joins a neighbour to itself")
    s = max(g.labels) + 1
    t = s + 1
    h = g.remove_vertex(v).add_edges([(ends[p], ends[q]), (ends[r], ends[w])], labels=[s, t])
    return h, s, t
