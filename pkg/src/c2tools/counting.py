"""Exact point counts of polynomial systems over finite fields.

Field elements are encoded as integers ``0..q-1``: the base-``p`` digits of
the encoding are the coefficients of the element in the polynomial basis
``1, x, x^2, ...`` modulo the fixed irreducible modulus.  Prime-field
elements are therefore just residues.

Counting works on value tables: a polynomial is evaluated on every point of
a block of ``F_q^m`` at once through a recursive Horner scheme over its
terms, and blocks are produced by fixing a prefix of coordinates.  When a
polynomial of the system is linear in some variable, that variable is
solved for instead of enumerated.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, GraphError
from .polyring import Polynomial, PolynomialError, linear_split, variables_of

# irreducible moduli, coefficients low -> high, monic
MODULI = {
    4: (2, (1, 1, 1)),
    8: (2, (1, 1, 0, 1)),
    16: (2, (1, 1, 0, 0, 1)),
    9: (3, (1, 0, 1)),
    27: (3, (1, 2, 0, 1)),
    25: (5, (3, 0, 1)),
}

_BLOCK = 1 << 20


class CountingError(ValueError):
    pass


class DivisibilityError(AssertionError):
    """A divisibility that holds as a theorem failed: an implementation bug."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


class FiniteField:
    """The field with ``q = p^k`` elements, backed by lookup tables."""

    def __init__(self, q: int):
        if _is_prime(q):
            p, k, modulus = q, 1, (0, 1)
        elif q in MODULI:
            p, modulus = MODULI[q]
            k = len(modulus) - 1
        else:
            raise CountingError(f"unsupported field size {q}")
        self.q, self.p, self.k, self.modulus = q, p, k, modulus
        self.is_prime = k == 1
        digits = [[(a // p**i) % p for i in range(k)] for a in range(q)]
        enc = lambda ds: sum(d * p**i for i, d in enumerate(ds))
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                add[a, b] = enc([(x + y) % p for x, y in zip(digits[a], digits[b])])
                prod = [0] * (2 * k - 1)
                for i, x in enumerate(digits[a]):
                    for j, y in enumerate(digits[b]):
                        prod[i + j] += x * y
                for d in range(2 * k - 2, k - 1, -1):
                    c = prod[d] % p
                    if c:
                        for i in range(k + 1):
                            prod[d - k + i] -= c * modulus[i]
                mul[a, b] = enc([c % p for c in prod[:k]])
        self.add_table = add
        self.mul_table = mul
        self.neg = np.array([int(np.nonzero(add[a] == 0)[0][0]) for a in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv = inv

    def __repr__(self) -> str:
        return f"FiniteField({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(self.q)

    def __reduce__(self):
        return (get_field, (self.q,))

    def from_int(self, c: int) -> int:
        return c % self.p

    def powers(self, max_e: int) -> np.ndarray:
        """``pw[x, e] = x^e`` for all elements ``x``."""
        pw = np.zeros((self.q, max_e + 1), dtype=np.int64)
        pw[:, 0] = 1
        for e in range(1, max_e + 1):
            pw[:, e] = self.mul_table[pw[:, e - 1], np.arange(self.q)]
        return pw

    def elements(self) -> range:
        return range(self.q)


@lru_cache(maxsize=None)
def get_field(q: int) -> FiniteField:
    return FiniteField(q)


# ---------------------------------------------------------------------------
# value tables


def _as_terms(f: Polynomial, order: Sequence[int], p: int):
    pos = {v: i for i, v in enumerate(order)}
    out = []
    for exps, c in f.terms().items():
        c %= p
        if not c:
            continue
        e = [0] * len(order)
        for v, k in exps:
            e[pos[v]] = k
        out.append((tuple(e), c))
    return out


def _table(terms, depth: int, n: int, F: FiniteField, pw: np.ndarray, fixed: Sequence[int]):
    """Values of a term list on the block where ``order[:len(fixed)]`` is fixed.

    Returns a flat array over the free coordinates (first free coordinate
    most significant) or a scalar once every coordinate is consumed.
    """
    if depth == n:
        return sum(c for _, c in terms) % F.p
    groups: dict[int, list] = {}
    for e, c in terms:
        groups.setdefault(e[depth], []).append((e, c))
    free = depth >= len(fixed)
    acc = None
    for e, group in groups.items():
        sub = _table(group, depth + 1, n, F, pw, fixed)
        if free:
            col = pw[:, e]
            if F.is_prime:
                term = np.multiply.outer(col, sub).reshape(-1) % F.p if np.ndim(sub) else (col * sub) % F.p
            else:
                term = F.mul_table[col[:, None], np.atleast_1d(sub)[None, :]].reshape(-1)
        else:
            x = pw[fixed[depth], e]
            term = (x * sub) % F.p if F.is_prime else F.mul_table[x, sub]
        if acc is None:
            acc = term
        elif F.is_prime:
            acc = (acc + term) % F.p
        else:
            acc = F.add_table[acc, term]
    return acc


def value_table(f: Polynomial, order: Sequence[int], F: FiniteField, fixed: Sequence[int] = ()) -> np.ndarray:
    """Values of ``f`` over the block of ``F^len(order)`` with a fixed prefix."""
    free = len(order) - len(fixed)
    size = F.q**free
    terms = _as_terms(f, order, F.p)
    if not terms:
        return np.zeros(size, dtype=np.int64)
    maxe = max(max(e) if e else 0 for e, _ in terms)
    pw = F.powers(max(maxe, 1))
    vals = _table(terms, 0, len(order), F, pw, fixed)
    vals = np.asarray(vals, dtype=np.int64).reshape(-1)
    assert vals.size == size
    return vals


# ---------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class CountResult:
    count: int
    ambient: tuple[int, ...]
    q: int

    def __post_init__(self):
        if not 0 <= self.count <= self.q ** len(self.ambient):
            raise CountingError("count outside [0, q^n]")


@dataclass(frozen=True)
class _Plan:
    order: tuple[int, ...]  # enumerated variables, prefix first
    linear: int | None  # solved variable
    lead: Polynomial | None
    const: Polynomial | None
    others: tuple[Polynomial, ...]
    extra: int  # ambient variables no polynomial mentions
    prefix_len: int


def _prepare(polys: Iterable[Polynomial], ambient: Iterable[int], F: FiniteField, linear: bool = True):
    ambient = tuple(sorted(set(ambient)))
    polys = list(polys)
    used = variables_of(*polys)
    if not used <= set(ambient):
        raise CountingError(f"variables {sorted(used - set(ambient))} are outside the ambient set")
    system = []
    for f in polys:
        if f.is_constant():
            if f.constant_value() % F.p:
                return ambient, None  # no solutions at all
            continue
        system.append(f)
    vars_ = tuple(sorted(variables_of(*system)))
    extra = len(ambient) - len(vars_)
    pick = None
    if linear:
        best = None
        for i, f in enumerate(system):
            for v in sorted(f.variables()):
                if f.degree_in(v) == 1:
                    others_with_v = sum(1 for j, g in enumerate(system) if j != i and v in g.variables())
                    score = (others_with_v, -len(vars_))
                    if best is None or score < best[0]:
                        best = (score, i, v)
        if best is not None:
            pick = best[1:]
    if pick is None:
        order = vars_
        lead = const = None
        others = tuple(system)
        lin = None
    else:
        i, lin = pick
        split = linear_split(system[i], lin)
        lead, const = split.leading, split.constant
        others = tuple(g for j, g in enumerate(system) if j != i)
        order = tuple(v for v in vars_ if v != lin)
    free_cap = max(1, int(math.log(_BLOCK, F.q)))
    prefix_len = max(0, len(order) - free_cap)
    return ambient, _Plan(order, lin, lead, const, others, extra, prefix_len)


def _count_block(plan: _Plan, F: FiniteField, fixed: Sequence[int]) -> int:
    q = F.q
    order = plan.order
    if plan.linear is None:
        ok = None
        for g in plan.others:
            z = value_table(g, order, F, fixed) == 0
            ok = z if ok is None else ok & z
        if ok is None:
            return q ** (len(order) - len(fixed))
        return int(ok.sum())
    a = value_table(plan.lead, order, F, fixed)
    b = value_table(plan.const, order, F, fixed)
    nz = a != 0
    both = (~nz) & (b == 0)
    if not plan.others:
        return int(nz.sum()) + q * int(both.sum())
    # x* = -b / a where a != 0
    xstar = np.zeros_like(a)
    if F.is_prime:
        xstar[nz] = (-b[nz] * F.inv[a[nz]]) % F.p
    else:
        xstar[nz] = F.mul_table[F.neg[b[nz]], F.inv[a[nz]]]
    full_order = order + (plan.linear,)
    ok_at = nz.copy()
    ok_all = None
    rows = np.arange(a.size)
    for g in plan.others:
        if plan.linear in g.variables():
            tab = value_table(g, full_order, F, fixed).reshape(a.size, q)
            ok_at &= tab[rows, xstar] == 0
            z = tab == 0
        else:
            tab = value_table(g, order, F, fixed)
            ok_at &= tab == 0
            z = np.repeat((tab == 0)[:, None], q, axis=1)
        ok_all = z if ok_all is None else ok_all & z
    return int(ok_at.sum()) + int(ok_all[both].sum())


def _prefixes(plan: _Plan, F: FiniteField):
    import itertools

    return itertools.product(range(F.q), repeat=plan.prefix_len)


def _count_prefixes(plan: _Plan, q: int, prefixes: list) -> int:
    F = get_field(q)
    return sum(_count_block(plan, F, fx) for fx in prefixes)


def count_affine(polys: Iterable[Polynomial], ambient: Iterable[int], F: FiniteField | int, linear: bool = True) -> CountResult:
    """Number of common zeros of ``polys`` in ``F^ambient``."""
    F = get_field(F) if isinstance(F, int) else F
    ambient, plan = _prepare(polys, ambient, F, linear)
    if plan is None:
        return CountResult(0, ambient, F.q)
    total = sum(_count_block(plan, F, fx) for fx in _prefixes(plan, F))
    return CountResult(total * F.q**plan.extra, ambient, F.q)


def count_parallel(polys: Iterable[Polynomial], ambient: Iterable[int], F: FiniteField | int, shards: int = 1, threads: int | None = None) -> CountResult:
    """Same result as :func:`count_affine`; prefix blocks split over shards.

    Shards run in worker processes when ``threads`` (default: ``shards``)
    is greater than one.
    """
    if shards < 1:
        raise CountingError("shards must be >= 1")
    F = get_field(F) if isinstance(F, int) else F
    ambient, plan = _prepare(polys, ambient, F)
    if plan is None:
        return CountResult(0, ambient, F.q)
    prefixes = list(_prefixes(plan, F))
    # make sure there is enough prefix to split
    while len(prefixes) < shards and plan.prefix_len < len(plan.order):
        plan = _Plan(plan.order, plan.linear, plan.lead, plan.const, plan.others, plan.extra, plan.prefix_len + 1)
        prefixes = list(_prefixes(plan, F))
    parts = [prefixes[i::shards] for i in range(shards)]
    workers = shards if threads is None else threads
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            totals = list(ex.map(_count_prefixes, [plan] * shards, [F.q] * shards, parts))
    else:
        totals = [_count_prefixes(plan, F.q, part) for part in parts]
    return CountResult(sum(totals) * F.q**plan.extra, ambient, F.q)


def count_naive(polys: Iterable[Polynomial], ambient: Iterable[int], F: FiniteField | int) -> int:
    """Point-by-point evaluation with Python integers (prime fields only)."""
    import itertools

    F = get_field(F) if isinstance(F, int) else F
    if not F.is_prime:
        raise CountingError("naive counter supports prime fields only")
    ambient = sorted(set(ambient))
    polys = list(polys)
    n = 0
    for pt in itertools.product(range(F.q), repeat=len(ambient)):
        point = dict(zip(ambient, pt))
        if all(f.evaluate(point) % F.p == 0 for f in polys):
            n += 1
    return n


# ---------------------------------------------------------------------------
# c2 by brute force and the counting lemmas


def c2_bruteforce(g: Graph, F: FiniteField | int, shards: int = 1) -> int:
    """``([Psi_G]_q / q^2) mod q`` from an exact point count."""
    from .kirchhoff import graph_polynomial

    F = get_field(F) if isinstance(F, int) else F
    if g.n_vertices < 3:
        raise GraphError("c2 is defined for graphs with at least 3 vertices")
    psi = graph_polynomial(g)
    res = count_parallel([psi], g.labels, F, shards=shards, threads=1) if shards > 1 else count_affine([psi], g.labels, F)
    q = F.q
    if res.count % (q * q):
        raise DivisibilityError(f"[Psi]_{q} = {res.count} is not divisible by q^2")
    return (res.count // (q * q)) % q


def chevalley_warning_applies(polys: Iterable[Polynomial], ambient: Iterable[int]) -> bool:
    """True when the degrees sum to less than the number of variables."""
    total = sum(max(f.degree(), 0) for f in polys if not f.is_zero())
    return total < len(set(ambient))


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: int
    rhs: int

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


def verify_linear_elim(f: Polynomial, g: Polynomial, h: Polynomial | None, x: int, F: FiniteField | int) -> list[IdentityCheck]:
    """Check the four linear elimination identities as exact integers.

    Counts on the left live in the ambient space containing ``x``; counts on
    the right in the same space without ``x``.
    """
    F = get_field(F) if isinstance(F, int) else F
    q = F.q
    h = Polynomial() if h is None else h
    if x in h.variables():
        raise PolynomialError("h must not involve the eliminated variable")
    sf, sg = linear_split(f, x), linear_split(g, x)
    big = tuple(sorted(variables_of(f, g, h) | {x}))
    small = tuple(v for v in big if v != x)

    def L(*ps):
        return count_affine(ps, big, F).count

    def R(*ps):
        return count_affine(ps, small, F).count

    f1, f0, g1, g0 = sf.leading, sf.constant, sg.leading, sg.constant
    res = f1 * g0 - g1 * f0
    n = len(big)
    return [
        IdentityCheck("lin11", L(f, h), R(h) - R(f1, h) + q * R(f1, f0, h)),
        IdentityCheck("lin1", L(f), q ** (n - 1) - R(f1) + q * R(f1, f0)),
        IdentityCheck("lin21", L(f, g, h), q * R(f1, f0, g1, g0, h) + R(res, h) - R(f1, g1, h)),
        IdentityCheck("lin2", L(f, g), q * R(f1, f0, g1, g0) + R(res) - R(f1, g1)),
    ]
