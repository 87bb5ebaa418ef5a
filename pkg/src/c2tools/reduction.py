"""c2 through reduction formulas: 3-valent and 4-valent vertex formulas,
denominator reduction and the semilinear reduction (SLR) engine.

The SLR engine works on *targets*: a single polynomial or an unordered pair,
always together with an ambient variable set.  The value of a target is its
point count in ``F_q^ambient`` reduced mod ``q``.  A reduction tree rewrites
a target into smaller ones until every leaf has a value known for all ``q``:

* ``elementary-CW``: total degree below the number of variables, value 0;
* ``elementary-cone``: the ambient set has variables the target ignores,
  value 0 (the count carries a factor ``q``);
* ``elementary-linear``: ``m*x^d`` in one variable, value 1 unless ``p | m``;
* ``elementary-constant``: constant members, value decided by the constant.

Internal rules, with ``f = f^x * x + f_x``:

* ``linear-split``    ``[f]_A       = -[f^x]_{A-x}``                 (|A| >= 2)
* ``pair-split``      ``[f, g]_A    = [f^x g_x - f_x g^x]_{A-x} - [f^x, g^x]_{A-x}``
  (or ``[f]_{A-x} - [f, g^x]_{A-x}`` when ``f`` does not involve ``x``)
* ``product``         ``[f g]_A     = [f]_A + [g]_A - [f, g]_A``
* ``square-absorb``   ``[f^2 g]_A   = [f g]_A``
* ``axis-pair``       ``[f, m x]_A  = [m f_x]_{A-x}``  (exact only when ``p`` does not divide ``m``)

All identities except the axis rule at ``p | m`` hold exactly mod ``q``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import sympy

from .counting import count_affine, get_field, FiniteField
from .graphs import Graph, GraphError
from .kirchhoff import _vertex_edges, dodgson, graph_polynomial, three_valent_data
from .polyring import (
    Polynomial,
    PolynomialError,
    divexact,
    factor,
    from_text,
    gcd,
    linear_split,
    resultant_linear,
    sort_key,
    split_quadratic,
    to_text,
    variables_of,
)


class ReductionError(ValueError):
    pass


def _field(F) -> FiniteField:
    return get_field(F) if isinstance(F, int) else F


# ---------------------------------------------------------------------------
# vertex formulas


def c2_three_valent(g: Graph, v: int, F, order: Sequence[int] | None = None) -> int:
    """c2 mod q as the count of the pair ``(f0, f3)`` at a 3-valent vertex."""
    F = _field(F)
    if g.n_vertices < 4:
        raise GraphError("the 3-valent formula needs at least 4 vertices")
    data = three_valent_data(g, v, order=order)
    ambient = [lab for lab in g.labels if lab not in data.edges]
    return count_affine([data.f0, data.f3], ambient, F).count % F.q


def three_valent_pair(g: Graph, v: int, order: Sequence[int] | None = None):
    """The pair ``(f0, f3)`` and its ambient variables."""
    data = three_valent_data(g, v, order=order)
    ambient = tuple(lab for lab in g.labels if lab not in data.edges)
    return (data.f0, data.f3), ambient


def four_valent_pair(g: Graph, v: int):
    """``(Psi^{13,24}, Psi^{14,23})`` at a 4-valent vertex and its ambient."""
    e = _vertex_edges(g, v, 4)
    P = dodgson(g, (e[0], e[2]), (e[1], e[3]))
    Q = dodgson(g, (e[0], e[3]), (e[1], e[2]))
    ambient = tuple(lab for lab in g.labels if lab not in e)
    return (P, Q), ambient


def four_valent_summands(g: Graph, v: int):
    """The five targets of the 4-valent formula, as ``(pair, ambient)``.

    The first is the pair of Dodgson polynomials at ``v``; the other four are
    the 3-valent pairs of ``G - e_i`` at the (now 3-valent) vertex ``v``.
    """
    e = _vertex_edges(g, v, 4)
    if g.n_vertices < 5:
        raise GraphError("the 4-valent formula needs at least 5 vertices")
    out = [four_valent_pair(g, v)]
    for lab in e:
        out.append(three_valent_pair(g.delete_edge(lab), v))
    return out


def c2_four_valent(g: Graph, v: int, F, mode: str = "count", strategy: str = "greedy") -> int:
    """``-([Psi^{13,24}, Psi^{14,23}] + sum_i c2(G - e_i)) mod q``."""
    F = _field(F)
    summands = four_valent_summands(g, v)
    if mode == "count":
        total = sum(count_affine(pair, amb, F).count for pair, amb in summands)
    elif mode == "slr":
        total = 0
        for pair, amb in summands:
            tree = slr_reduce(pair, amb, strategy=strategy)
            if not tree.complete:
                raise ReductionError(f"SLR failed: {tree.failure_summary()}")
            total += evaluate_tree(tree, F)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return (-total) % F.q


# ---------------------------------------------------------------------------
# multi-polynomial elimination


@dataclass(frozen=True)
class CountTerm:
    """``sign * q^q_power * [polys]`` over the ambient set without ``x``."""

    sign: int
    q_power: int
    polys: tuple[Polynomial, ...]


def eliminate_multi(polys: Sequence[Polynomial], x: int) -> list[CountTerm]:
    """Eliminate ``x`` from a system linear in ``x``.

    Classifying points by the first index whose pair ``(f_i^x, f_{i,x})`` is
    nonzero gives

        [f_1..f_n] = q [all f_i^x, f_{i,x}] + [R_1] - [f_1^x..f_n^x]
                     + sum_{k=1}^{n-2} ([Z_k, R_{k+1}] - [Z_k])

    with ``Z_k`` the coefficients of ``f_1..f_k`` and ``R_k`` the resultants
    of ``f_k`` with every later ``f_i``.
    """
    polys = list(polys)
    if not polys:
        raise ReductionError("empty system")
    splits = [linear_split(f, x) for f in polys]
    n = len(polys)
    Z = lambda k: tuple(p for s in splits[:k] for p in (s.leading, s.constant))

    def R(k):  # 1-based
        return tuple(resultant_linear(polys[k - 1], polys[i], x) for i in range(k, n))

    terms = [CountTerm(1, 1, Z(n)), CountTerm(1, 0, R(1)), CountTerm(-1, 0, tuple(s.leading for s in splits))]
    for k in range(1, n - 1):
        terms.append(CountTerm(1, 0, Z(k) + R(k + 1)))
        terms.append(CountTerm(-1, 0, Z(k)))
    return terms


def count_terms(terms: Iterable[CountTerm], ambient: Iterable[int], F) -> int:
    F = _field(F)
    ambient = tuple(ambient)
    return sum(t.sign * F.q**t.q_power * count_affine(t.polys, ambient, F).count for t in terms)


# ---------------------------------------------------------------------------
# denominator reduction


@dataclass
class DenominatorRun:
    order: tuple[int, ...]
    D: dict[int, Polynomial]
    ambient: dict[int, tuple[int, ...]]
    status: str  # "reduced-to-end" | "weight-drop" | "stuck-at-k"
    last: int

    def c2(self, F) -> int:
        """``(-1)^k [D_k]`` mod q at the last computed step."""
        F = _field(F)
        k = self.last
        if self.status == "weight-drop":
            return 0
        n = count_affine([self.D[k]], self.ambient[k], F).count
        return ((-1) ** k * n) % F.q


def _dr_step(D: Polynomial, x: int):
    """Next denominator, or ``None`` when ``D`` does not split in ``x``."""
    d = D.degree_in(x)
    if d <= 0:
        return Polynomial()
    if d == 1:
        return linear_split(D, x).leading
    if d > 2:
        return None
    pair = split_quadratic(D, x)
    if pair is None:
        return None
    return resultant_linear(pair[0], pair[1], x)


def denominator_reduce(g: Graph, order: Sequence[int] | None = None) -> DenominatorRun:
    """Denominator reduction along ``order`` (greedy when ``order`` is None).

    The first three edges must meet at a 3-valent vertex; without an order
    the lowest 3-valent vertex is used and later edges are chosen greedily
    among those that split, preferring the smallest next denominator.
    """
    inv = g.invariants()
    if inv.delta != 0:
        raise GraphError("denominator reduction needs a log-divergent graph (N = 2h)")
    if order is None:
        three = [v for v in g.vertices if g.degree(v) == 3]
        if not three:
            raise GraphError("no 3-valent vertex")
        start = list(_vertex_edges(g, three[0], 3))
        order_given = None
    else:
        order = list(order)
        if len(set(order)) != len(order) or not set(order) <= set(g.labels):
            raise GraphError("order must list distinct edges of the graph")
        start = order[:3]
        order_given = order
        ends = [set(g.edge(e)) for e in start]
        common = ends[0] & ends[1] & ends[2]
        if not any(g.degree(v) == 3 for v in common):
            raise GraphError("the first three edges must meet at a 3-valent vertex")
    data = three_valent_data(g, next(v for v in set.intersection(*[set(g.edge(e)) for e in start]) if g.degree(v) == 3), order=start)
    D = {3: data.f0 * data.f3}
    amb = {3: tuple(lab for lab in g.labels if lab not in start)}
    seq = list(start)
    k = 3
    status = None
    while len(amb[k]) > 1:
        cur = D[k]
        if cur.is_zero():
            status = "weight-drop"
            break
        if order_given is not None:
            if len(order_given) <= k:
                break
            x = order_given[k]
            nxt = _dr_step(cur, x)
        else:
            best = None
            for y in amb[k]:
                cand = _dr_step(cur, y)
                if cand is not None and (best is None or (len(cand), y) < (len(best[1]), best[0])):
                    best = (y, cand)
            x, nxt = (None, None) if best is None else best
        if nxt is None:
            status = f"stuck-at-{k + 1}"
            break
        seq.append(x)
        k += 1
        D[k] = nxt
        amb[k] = tuple(v for v in amb[k - 1] if v != x)
    if status is None:
        status = "weight-drop" if D[k].is_zero() else "reduced-to-end"
    return DenominatorRun(tuple(seq), D, amb, status, k)


# ---------------------------------------------------------------------------
# SLR engine

LEAF_RULES = ("elementary-CW", "elementary-cone", "elementary-linear", "elementary-constant")
INNER_RULES = ("linear-split", "pair-split", "product", "square-absorb", "axis-pair")


@dataclass
class Node:
    id: int
    target: tuple[Polynomial, ...]
    ambient: tuple[int, ...]
    rule: str | None = None
    var: int | None = None
    children: tuple[tuple[int, int], ...] = ()  # (sign, node id)
    coefficient: int | None = None  # leaf integer for linear / constant leaves
    degenerate: bool = False  # pair split with one member free of var

    @property
    def is_pair(self) -> bool:
        return len(self.target) == 2

    @property
    def is_leaf(self) -> bool:
        return self.rule in LEAF_RULES


@dataclass
class ReductionTree:
    nodes: dict[int, Node]
    root: int
    failure: int | None = None

    @property
    def complete(self) -> bool:
        return self.failure is None

    def failure_summary(self) -> str:
        if self.failure is None:
            return "complete"
        n = self.nodes[self.failure]
        polys = ", ".join(to_text(p) for p in n.target)
        return f"no rule applies to ({polys}) in ambient {list(n.ambient)}"

    def bad_prime_candidates(self) -> set[int]:
        out = set()
        for n in self.reachable():
            m = None
            if n.rule in ("elementary-linear", "elementary-constant") and n.coefficient:
                m = n.coefficient
            elif n.rule == "axis-pair":
                m = n.coefficient
            if m is not None and abs(m) > 1:
                out |= set(sympy.primefactors(abs(m)))
        return out

    def reachable(self) -> list[Node]:
        seen, stack, out = set(), [self.root], []
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            out.append(self.nodes[i])
            stack.extend(c for _, c in self.nodes[i].children)
        return out

    # trace export -------------------------------------------------------

    def to_json(self) -> str:
        nodes = []
        for n in sorted(self.reachable(), key=lambda n: n.id):
            nodes.append(
                {
                    "id": n.id,
                    "target": [to_text(p) for p in n.target],
                    "ambient": list(n.ambient),
                    "rule": n.rule,
                    "var": n.var,
                    "children": [[s, c] for s, c in n.children],
                    "coefficient": n.coefficient,
                    "degenerate": n.degenerate,
                    "contribution": leaf_value(n, None) if n.is_leaf else None,
                }
            )
        data = {
            "root": self.root,
            "complete": self.complete,
            "failure": self.failure,
            "nodes": nodes,
        }
        return json.dumps(data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ReductionTree":
        data = json.loads(text)
        nodes = {}
        for d in data["nodes"]:
            nodes[d["id"]] = Node(
                d["id"],
                tuple(from_text(t) for t in d["target"]),
                tuple(d["ambient"]),
                d["rule"],
                d["var"],
                tuple((s, c) for s, c in d["children"]),
                d["coefficient"],
                d["degenerate"],
            )
        return cls(nodes, data["root"], data["failure"])


def _sign_normal(f: Polynomial) -> Polynomial:
    return -f if not f.is_zero() and f.leading_coefficient() < 0 else f


def _radical_monomial(f: Polynomial) -> Polynomial:
    """``m*x^d -> m*x``: same zero set, used for pair members."""
    vs = f.variables()
    if len(vs) == 1 and len(f) == 1:
        (x,) = vs
        return Polynomial.var(x) * f.leading_coefficient()
    return f


def normalize_target(polys: Sequence[Polynomial]) -> tuple[Polynomial, ...]:
    """Canonical form of a target with the same value for every ``q``.

    Signs are fixed, monomial pair members lose their exponent, zero
    members are dropped and a member that is a constant multiple of the
    other collapses the pair.
    """
    ps = [_sign_normal(p) for p in polys]
    if len(ps) == 1:
        return (ps[0],)
    ps = [_radical_monomial(p) for p in ps if not p.is_zero()]
    if not ps:
        return (Polynomial(),)
    if len(ps) == 1:
        return (ps[0],)
    f, g = sorted(ps, key=sort_key)
    if f == g:
        return (f,)
    if not f.is_constant() and not g.is_constant() and len(f) == len(g):
        kf, kg = f.leading_term()[0], g.leading_term()[0]
        if kf == kg:
            cf, cg = f.leading_coefficient(), g.leading_coefficient()
            if f * cg == g * cf:
                # g = (cg/cf) f or the reverse; keep the one dividing the other
                return (f,) if cg % cf == 0 else (g,) if cf % cg == 0 else (f, g)
    return (f, g)


def leaf_value(n: Node, p: int | None) -> int:
    """Value of a leaf; ``p=None`` gives the generic value."""
    if n.rule in ("elementary-CW", "elementary-cone"):
        return 0
    if n.rule == "elementary-linear":
        return 1 if p is None or n.coefficient % p else 0
    if n.rule == "elementary-constant":
        c = n.coefficient
        if n.is_pair or n.ambient:
            return 0
        return int(c == 0) if p is None else int(c % p == 0)
    raise ReductionError(f"not a leaf: {n.rule}")


class _Engine:
    def __init__(self, strategy: str, factorizer: str, budget: int):
        if strategy not in ("greedy", "label"):
            raise ValueError(f"unknown strategy {strategy!r}")
        if factorizer not in ("full", "limited"):
            raise ValueError(f"unknown factorizer {factorizer!r}")
        self.strategy = strategy
        self.factorizer = factorizer
        self.budget = budget
        self.nodes: dict[int, Node] = {}
        self.memo: dict = {}
        self.failed: dict = {}
        self.stuck: list[int] = []

    def new(self, target, ambient) -> Node:
        n = Node(len(self.nodes), target, ambient)
        self.nodes[n.id] = n
        return n

    def reduce(self, polys, ambient) -> tuple[int, bool]:
        target = normalize_target(polys)
        ambient = tuple(sorted(ambient))
        key = (target, ambient)
        if key in self.memo:
            return self.memo[key], True
        if key in self.failed:
            return self.failed[key], False
        self.budget -= 1
        if self.budget < 0:
            raise ReductionError("node budget exhausted")
        node = self.new(target, ambient)
        ok = self._expand(node)
        if ok:
            self.memo[key] = node.id
        else:
            self.failed[key] = node.id
        return node.id, ok

    def _leaf(self, node: Node) -> bool:
        t, amb = node.target, node.ambient
        consts = [p for p in t if p.is_constant()]
        if consts:
            node.rule = "elementary-constant"
            node.coefficient = consts[0].constant_value()
            return True
        vs = variables_of(*t)
        if not vs <= set(amb):
            raise ReductionError("target uses variables outside its ambient set")
        if vs != set(amb):
            node.rule = "elementary-cone"
            return True
        if not node.is_pair and len(vs) == 1:
            node.rule = "elementary-linear"
            node.coefficient = t[0].leading_coefficient()
            return True
        if sum(p.degree() for p in t) < len(vs):
            node.rule = "elementary-CW"
            return True
        return False

    def _children(self, node: Node, rule: str, var, kids, coefficient=None, degenerate=False) -> bool:
        self.applicable = True
        ids = []
        for sign, polys, amb in kids:
            cid, ok = self.reduce(polys, amb)
            if not ok:
                return False
            ids.append((sign, cid))
        node.rule, node.var, node.children = rule, var, tuple(ids)
        node.coefficient = coefficient
        node.degenerate = degenerate
        return True

    def _expand(self, node: Node) -> bool:
        if self._leaf(node):
            return True
        self.applicable = False
        ok = self._expand_pair(node) if node.is_pair else self._expand_single(node)
        if not ok and not self.applicable:
            self.stuck.append(node.id)
        return ok

    # singles ------------------------------------------------------------

    def _square_part(self, f: Polynomial) -> Polynomial | None:
        if self.factorizer == "full":
            c, facs = factor(f)
            s = Polynomial.const(1)
            for p, e in facs:
                if e >= 2:
                    s = s * p ** (e // 2)
            return None if s.is_constant() else s
        for x in sorted(f.variables()):
            if f.degree_in(x) < 2:
                continue
            d = gcd(f, f.derivative(x))
            if d.is_constant():
                continue
            s = gcd(d, divexact(f, d))
            if not s.is_constant():
                return s
        return None

    def _split_product(self, f: Polynomial):
        """A nontrivial factorization ``f = a * b`` or None."""
        if self.factorizer == "full":
            c, facs = factor(f)
            flat = [p for p, e in facs for _ in range(e)]
            if len(flat) < 2:
                return None
            a = flat[0] * c
            b = Polynomial.const(1)
            for p in flat[1:]:
                b = b * p
            return a, b
        for x in sorted(f.variables()):
            cont = _content_in(f, x)
            if not cont.is_constant():
                return cont, divexact(f, cont)
        for x in sorted(f.variables()):
            if f.degree_in(x) == 2:
                pair = split_quadratic(f, x)
                if pair is not None:
                    return pair
        return None

    def _order(self, cands, score):
        if self.strategy == "label":
            return sorted(cands)
        return sorted(cands, key=lambda x: (score(x), x))

    def _expand_single(self, node: Node) -> bool:
        (f,) = node.target
        amb = node.ambient
        if not f.is_multilinear():
            s = self._square_part(f)
            if s is not None:
                return self._children(node, "square-absorb", None, [(1, (divexact(f, s),), amb)])
        linear = [x for x in f.variables() if f.degree_in(x) == 1]
        for x in self._order(linear, lambda x: len(f.coefficient(x, 1)))[:2]:
            rest = tuple(v for v in amb if v != x)
            if self._children(node, "linear-split", x, [(-1, (f.coefficient(x, 1),), rest)]):
                return True
        split = self._split_product(f)
        if split is not None:
            a, b = split
            kids = [(1, (a,), amb), (1, (b,), amb), (-1, (a, b), amb)]
            if self._children(node, "product", None, kids):
                return True
        return False

    # pairs --------------------------------------------------------------

    def _expand_pair(self, node: Node) -> bool:
        f, g = node.target
        amb = node.ambient
        for a, b in ((f, g), (g, f)):
            if len(b) == 1 and b.degree() == 1:
                (x,) = b.variables()
                m = b.leading_coefficient()
                rest = tuple(v for v in amb if v != x)
                return self._children(node, "axis-pair", x, [(1, (a.subs(x, 0) * m,), rest)], coefficient=m)
        vs = variables_of(f, g)
        cands = [x for x in vs if f.degree_in(x) <= 1 and g.degree_in(x) <= 1]
        both = [x for x in cands if f.degree_in(x) == 1 and g.degree_in(x) == 1]
        pool = both or cands
        order = self._order(pool, lambda x: len(resultant_linear(f, g, x)))
        for x in order[:2]:
            rest = tuple(v for v in amb if v != x)
            if x in both:
                res = resultant_linear(f, g, x)
                kids = [(1, (res,), rest), (-1, (f.coefficient(x, 1), g.coefficient(x, 1)), rest)]
                ok = self._children(node, "pair-split", x, kids)
            else:
                free, lin = (f, g) if f.degree_in(x) == 0 else (g, f)
                kids = [(1, (free,), rest), (-1, (free, lin.coefficient(x, 1)), rest)]
                ok = self._children(node, "pair-split", x, kids, degenerate=True)
            if ok:
                return True
        return False


def _content_in(f: Polynomial, x: int) -> Polynomial:
    from .polyring import content_in

    return content_in(f, x)


def slr_reduce(
    target: Polynomial | Sequence[Polynomial],
    ambient: Iterable[int] | None = None,
    strategy: str = "greedy",
    factorizer: str = "full",
    budget: int = 2_000_000,
) -> ReductionTree:
    """Build a reduction tree for a polynomial or a pair of polynomials.

    ``ambient`` defaults to the variables of the target.  The result is
    complete or records the first node where no rule applied.
    """
    polys = (target,) if isinstance(target, Polynomial) else tuple(target)
    if not 1 <= len(polys) <= 2:
        raise ReductionError("target must be one polynomial or a pair")
    for p in polys:
        if not p.is_homogeneous():
            raise PolynomialError("SLR targets must be homogeneous")
    ambient = variables_of(*polys) if ambient is None else set(ambient)
    eng = _Engine(strategy, factorizer, budget)
    root, ok = eng.reduce(polys, ambient)
    failure = None
    if not ok:
        failure = _smallest_failure(eng)
    return ReductionTree(eng.nodes, root, failure)


def _smallest_failure(eng: _Engine) -> int:
    """The node where no rule applied that has the fewest terms."""
    pool = [eng.nodes[i] for i in eng.stuck] or [eng.nodes[i] for i in eng.failed.values()]
    return min(pool, key=lambda n: (sum(len(p) for p in n.target), n.id)).id


def evaluate_tree(tree: ReductionTree, F: FiniteField | int | None) -> int:
    """Residue mod q of the tree's target; ``F=None`` gives the generic integer."""
    if not tree.complete:
        raise ReductionError("cannot evaluate an incomplete tree")
    F = _field(F) if F is not None else None
    p = None if F is None else F.p
    cache: dict[int, int] = {}

    def val(i):
        if i in cache:
            return cache[i]
        n = tree.nodes[i]
        if n.is_leaf:
            v = leaf_value(n, p)
        elif n.rule is None:
            raise ReductionError(f"node {i} was never expanded")
        else:
            v = sum(s * val(c) for s, c in n.children)
        cache[i] = v
        return v

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10_000))
    try:
        v = val(tree.root)
    finally:
        sys.setrecursionlimit(old)
    return v if F is None else v % F.q


# ---------------------------------------------------------------------------
# structural replay


def expected_children(n: Node) -> list[tuple[int, tuple[Polynomial, ...], tuple[int, ...]]]:
    """Children targets a node's rule produces, recomputed from its target."""
    amb, x = n.ambient, n.var
    rest = tuple(v for v in amb if v != x)
    t = n.target
    if n.rule == "linear-split":
        return [(-1, normalize_target((t[0].coefficient(x, 1),)), rest)]
    if n.rule == "axis-pair":
        for a, b in ((t[0], t[1]), (t[1], t[0])):
            if len(b) == 1 and b.degree() == 1 and x in b.variables():
                m = b.leading_coefficient()
                return [(1, normalize_target((a.subs(x, 0) * m,)), rest)]
        raise ReductionError("axis rule without a monomial member")
    if n.rule == "pair-split":
        f, g = t
        if n.degenerate:
            free, lin = (f, g) if f.degree_in(x) == 0 else (g, f)
            return [(1, normalize_target((free,)), rest), (-1, normalize_target((free, lin.coefficient(x, 1))), rest)]
        res = resultant_linear(f, g, x)
        return [(1, normalize_target((res,)), rest), (-1, normalize_target((f.coefficient(x, 1), g.coefficient(x, 1))), rest)]
    raise ReductionError(f"no recomputation for {n.rule}")


def replay_check(tree: ReductionTree) -> list[str]:
    """Problems found when re-deriving every node from its target; empty if none."""
    problems = []
    for n in tree.reachable():
        if n.rule is None:
            if tree.failure != n.id:
                problems.append(f"node {n.id}: unexpanded")
            continue
        kids = [(s, tree.nodes[c]) for s, c in n.children]
        if n.is_leaf:
            if kids:
                problems.append(f"node {n.id}: leaf with children")
            vs = variables_of(*n.target)
            ok = {
                "elementary-CW": lambda: vs == set(n.ambient) and sum(p.degree() for p in n.target) < len(vs),
                "elementary-cone": lambda: vs < set(n.ambient),
                "elementary-linear": lambda: len(n.target) == 1 and len(vs) == 1 and len(n.target[0]) == 1,
                "elementary-constant": lambda: any(p.is_constant() for p in n.target),
            }[n.rule]()
            if not ok:
                problems.append(f"node {n.id}: {n.rule} conditions fail")
            continue
        if n.rule in ("square-absorb", "product"):
            (h,) = n.target
            if n.rule == "square-absorb":
                ((_, c),) = kids
                fg = c.target[0]
                # h = f^2 g and the child is f g: h / fg = f must divide fg again
                f = _quotient(h, fg)
                if f is None or f.is_constant() or _quotient(fg, f) is None:
                    problems.append(f"node {n.id}: square-absorb child is not h / f for a repeated f")
            else:
                (s1, a), (s2, b), (s3, ab) = kids
                prod = a.target[0] * b.target[0]
                if (s1, s2, s3) != (1, 1, -1) or not (prod == h or prod == -h):
                    problems.append(f"node {n.id}: product children do not multiply back")
                if normalize_target((a.target[0], b.target[0])) != ab.target:
                    problems.append(f"node {n.id}: product pair child mismatch")
            continue
        exp = expected_children(n)
        got = [(s, c.target, c.ambient) for s, c in kids]
        if exp != got:
            problems.append(f"node {n.id}: {n.rule} children differ from recomputation")
    return problems


def _quotient(a: Polynomial, b: Polynomial) -> Polynomial | None:
    """``a / b`` up to sign when exact, else None."""
    if b.is_zero():
        return None
    try:
        q = divexact(a, b)
    except PolynomialError:
        return None
    return q if q * b == a else None


# ---------------------------------------------------------------------------
# reports


@dataclass
class C2Report:
    residues: dict[int, int]
    c: int | None
    candidates: list[int]
    verified_bad: list[int]
    loop_number: int
    bound_ok: bool
    consistent: bool
    trees: list[ReductionTree] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "residues": {str(q): r for q, r in sorted(self.residues.items())},
            "c": self.c,
            "bad_prime_candidates": self.candidates,
            "verified_bad_primes": self.verified_bad,
            "loop_number": self.loop_number,
            "bound_ok": self.bound_ok,
            "consistent": self.consistent,
        }


def infer_constant(trees: Sequence[ReductionTree], h: int, qs: Iterable[int], sign: int = 1) -> C2Report:
    """Combine summand trees into ``c`` with ``c2 = -c``.

    ``sign`` is +1 for the 4-valent assembly (``c`` is the sum of the five
    summand values) and -1 for a single 3-valent pair (``c2`` equals the
    pair value).
    """
    for t in trees:
        if not t.complete:
            raise ReductionError(f"incomplete tree: {t.failure_summary()}")
    c = sign * sum(evaluate_tree(t, None) for t in trees)
    candidates = sorted(set().union(*(t.bad_prime_candidates() for t in trees)))
    residues, bad, consistent = {}, [], True
    for q in qs:
        F = get_field(q)
        r = (-sign * sum(evaluate_tree(t, F) for t in trees)) % q
        residues[q] = r
        if r != (-c) % q:
            if F.p in candidates:
                bad.append(F.p)
            else:
                consistent = False
    bound_ok = 2 * abs(c) < 4**h
    return C2Report(residues, c, candidates, sorted(set(bad)), h, bound_ok, consistent, list(trees))


def c2_slr(g: Graph, qs: Iterable[int], v: int | None = None, strategy: str = "greedy", factorizer: str = "full") -> C2Report:
    """Full SLR pipeline on a graph with a vertex of valency 3 or 4."""
    if v is None:
        deg = g.degrees()
        v = next((u for u in g.vertices if deg[u] == 3), None)
        if v is None:
            v = next((u for u in g.vertices if deg[u] == 4), None)
        if v is None:
            raise GraphError("no vertex of valency 3 or 4")
    deg = g.degree(v)
    if deg == 3:
        pair, amb = three_valent_pair(g, v)
        summands, sign = [(pair, amb)], -1
    elif deg == 4:
        summands, sign = four_valent_summands(g, v), 1
    else:
        raise GraphError(f"vertex {v} has valency {deg}")
    trees = []
    for pair, amb in summands:
        t = slr_reduce(pair, amb, strategy=strategy, factorizer=factorizer)
        if not t.complete:
            raise ReductionError(f"SLR failed: {t.failure_summary()}")
        trees.append(t)
    return infer_constant(trees, g.loop_number(), qs, sign)
