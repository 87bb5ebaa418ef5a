"""Labeled multigraphs and the edit operations used on Feynman graphs.

A :class:`Graph` is an immutable value: a tuple of vertex ids and a tuple of
``(label, u, v)`` edges with ``u <= v``.  The orientation ``u -> v`` (low id
to high id) is what the incidence matrix in :mod:`c2tools.kirchhoff` uses.
Edge labels survive deletion and contraction, so polynomials of edited
graphs stay in the same variables as the original.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GraphInvariants:
    n_edges: int
    n_vertices: int
    loop_number: int
    delta: int
    degrees: tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        labels = [e[0] for e in self.edges]
        if len(set(labels)) != len(labels):
            raise GraphError("edge labels must be unique")
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        for lab, u, v in self.edges:
            if u not in vs or v not in vs:
                raise GraphError(f"edge {lab} uses an unknown vertex")
            if u > v:
                raise GraphError("edges must be stored low -> high")

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n_vertices: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Vertices ``0..n-1``; edge labels ``1..N`` in list order."""
        edges = []
        for lab, (u, v) in enumerate(pairs, start=1):
            u, v = int(u), int(v)
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise GraphError(f"edge {(u, v)} outside 0..{n_vertices - 1}")
            edges.append((lab, min(u, v), max(u, v)))
        return cls(tuple(range(n_vertices)), tuple(edges))

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        data = json.loads(text)
        return cls.from_edges(data["vertices"], data["edges"])

    def to_json(self) -> str:
        """Serialize with vertices renumbered ``0..n-1`` and labels in order."""
        index = {v: i for i, v in enumerate(self.vertices)}
        return json.dumps(
            {"vertices": len(self.vertices), "edges": [[index[u], index[v]] for _, u, v in self.edges]}
        )

    def to_dot(self) -> str:
        lines = ["graph G {"]
        lines += [f"  {v};" for v in self.vertices]
        lines += [f'  {u} -- {v} [label="{lab}"];' for lab, u, v in self.edges]
        lines.append("}")
        return "\n".join(lines)

    # queries ------------------------------------------------------------

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(e[0] for e in self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edge(self, label: int) -> tuple[int, int]:
        for lab, u, v in self.edges:
            if lab == label:
                return u, v
        raise GraphError(f"no edge labelled {label}")

    def has_edge(self, label: int) -> bool:
        return any(e[0] == label for e in self.edges)

    def degree(self, v: int) -> int:
        return sum((u == v) + (w == v) for _, u, w in self.edges)

    def degrees(self) -> dict[int, int]:
        deg = Counter({v: 0 for v in self.vertices})
        for _, u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return dict(deg)

    def incident_edges(self, v: int) -> tuple[int, ...]:
        return tuple(lab for lab, a, b in self.edges if a == v or b == v)

    def other_end(self, label: int, v: int) -> int:
        a, b = self.edge(label)
        return b if a == v else a

    def components(self) -> list[set[int]]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, u, v in self.edges:
            parent[find(u)] = find(v)
        comps: dict[int, set[int]] = {}
        for v in self.vertices:
            comps.setdefault(find(v), set()).add(v)
        return list(comps.values())

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def loop_number(self) -> int:
        return self.n_edges - self.n_vertices + len(self.components())

    def invariants(self) -> GraphInvariants:
        h = self.loop_number()
        return GraphInvariants(
            self.n_edges,
            self.n_vertices,
            h,
            2 * h - self.n_edges,
            tuple(sorted(self.degrees().values(), reverse=True)),
        )

    def is_loop(self, label: int) -> bool:
        u, v = self.edge(label)
        return u == v

    def is_bridge(self, label: int) -> bool:
        return len(self.delete_edge(label).components()) > len(self.components())

    # edits --------------------------------------------------------------

    def delete_edge(self, label: int) -> "Graph":
        if not self.has_edge(label):
            raise GraphError(f"no edge labelled {label}")
        return Graph(self.vertices, tuple(e for e in self.edges if e[0] != label))

    def delete_edges(self, labels: Iterable[int]) -> "Graph":
        g = self
        for lab in labels:
            g = g.delete_edge(lab)
        return g

    def contract_edge(self, label: int) -> "Graph":
        """Merge the endpoints of ``label`` into the lower vertex id."""
        u, v = self.edge(label)
        if u == v:
            raise GraphError(f"edge {label} is a self-loop and cannot be contracted")
        edges = []
        for lab, a, b in self.edges:
            if lab == label:
                continue
            a = u if a == v else a
            b = u if b == v else b
            edges.append((lab, min(a, b), max(a, b)))
        return Graph(tuple(x for x in self.vertices if x != v), tuple(edges))

    def contract_edges(self, labels: Iterable[int]) -> "Graph":
        g = self
        for lab in labels:
            g = g.contract_edge(lab)
        return g

    def remove_vertex(self, v: int) -> "Graph":
        if v not in self.vertices:
            raise GraphError(f"no vertex {v}")
        return Graph(
            tuple(x for x in self.vertices if x != v),
            tuple(e for e in self.edges if v not in (e[1], e[2])),
        )

    def add_edges(self, pairs: Iterable[tuple[int, int]], labels: Iterable[int] | None = None) -> "Graph":
        pairs = list(pairs)
        start = max(self.labels, default=0) + 1
        labels = list(labels) if labels is not None else list(range(start, start + len(pairs)))
        new = [(lab, min(u, v), max(u, v)) for lab, (u, v) in zip(labels, pairs)]
        return Graph(self.vertices, self.edges + tuple(new))

    def complete(self) -> "Graph":
        """Add one vertex joined to each of the four 3-valent vertices."""
        deg = self.degrees()
        three = sorted(v for v, d in deg.items() if d == 3)
        if len(three) != 4 or any(d not in (3, 4) for d in deg.values()):
            raise GraphError("completion needs four 3-valent vertices and all others 4-valent")
        w = max(self.vertices) + 1
        g = Graph(self.vertices + (w,), self.edges)
        return g.add_edges([(v, w) for v in three])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def circulant(n: int, steps: Iterable[int]) -> Graph:
    pairs = []
    for s in steps:
        for i in range(n):
            pairs.append((i, (i + s) % n))
    return Graph.from_edges(n, pairs)


def zigzag(h: int, completed: bool = False) -> Graph:
    """Zigzag graph with ``h`` loops, modelled through its completion.

    The completed graph is the circulant ``C_{h+2}(1, 2)``; the uncompleted
    one is that graph with vertex 0 removed and labels renumbered ``1..2h``.
    """
    if h < 3:
        raise GraphError("zigzag graphs need h >= 3")
    g = circulant(h + 2, (1, 2))
    if completed:
        return g
    return relabel(g.remove_vertex(0))


def relabel(g: Graph) -> Graph:
    """Renumber vertices to ``0..n-1`` and edge labels to ``1..N`` in order."""
    index = {v: i for i, v in enumerate(g.vertices)}
    return Graph.from_edges(len(g.vertices), [(index[u], index[v]) for _, u, v in g.edges])


def is_isomorphic(g1: Graph, g2: Graph) -> bool:
    """Brute-force multigraph isomorphism, intended for <= 8 vertices."""
    if g1.n_vertices != g2.n_vertices or g1.n_edges != g2.n_edges:
        return False
    if sorted(g1.degrees().values()) != sorted(g2.degrees().values()):
        return False
    if g1.n_vertices > 8:
        raise GraphError("isomorphism checker is limited to 8 vertices")
    target = Counter((u, v) for _, u, v in g2.edges)
    vs1 = g1.vertices
    deg1, deg2 = g1.degrees(), g2.degrees()
    for perm in itertools.permutations(g2.vertices):
        m = dict(zip(vs1, perm))
        if any(deg1[v] != deg2[m[v]] for v in vs1):
            continue
        image = Counter((min(m[u], m[v]), max(m[u], m[v])) for _, u, v in g1.edges)
        if image == target:
            return True
    return False
