"""Sparse multivariate polynomials with exact integer coefficients.

Variables are indexed by nonnegative integers (edge labels).  A monomial is
stored as a single packed integer holding one 16-bit exponent field per
variable, so multiplying monomials is integer addition and the natural
integer order of the packed keys is a lexicographic monomial order in which
the highest variable index is most significant.

gcd, exact division and square roots are delegated to python-flint; every
result coming back is checked by exact multiplication where it matters.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

import flint

BITS = 16
MASK = (1 << BITS) - 1
MAX_VAR = 255

# above this many term products, multiplication is handed to flint
_FLINT_MUL_THRESHOLD = 4000


class PolynomialError(ValueError):
    pass


def _unpack(key: int) -> tuple[tuple[int, int], ...]:
    out = []
    v = 0
    while key:
        e = key & MASK
        if e:
            out.append((v, e))
        key >>= BITS
        v += 1
    return tuple(out)


def _pack(exps: Iterable[tuple[int, int]]) -> int:
    key = 0
    for v, e in exps:
        if v < 0 or v > MAX_VAR:
            raise PolynomialError(f"variable index {v} out of range")
        if e < 0 or e > MASK:
            raise PolynomialError(f"exponent {e} out of range")
        key += e << (BITS * v)
    return key


def _exp_of(key: int, v: int) -> int:
    return (key >> (BITS * v)) & MASK


def _key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & MASK
        key >>= BITS
    return d


class Polynomial:
    """Immutable sparse polynomial over the integers.

    ``terms`` maps packed exponent keys to nonzero integer coefficients.
    Construct through :meth:`var`, :meth:`const`, :meth:`from_terms` or by
    arithmetic on existing polynomials.
    """

    __slots__ = ("_t", "_hash", "_vars", "_deg")

    def __init__(self, terms: Mapping[int, int] | None = None):
        t = {} if terms is None else {k: c for k, c in terms.items() if c}
        self._t = t
        self._hash = None
        self._vars = None
        self._deg = None

    @classmethod
    def _raw(cls, t: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._t = t
        p._hash = None
        p._vars = None
        p._deg = None
        return p

    # construction -------------------------------------------------------

    @classmethod
    def var(cls, i: int) -> "Polynomial":
        return cls._raw({_pack([(i, 1)]): 1})

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls._raw({0: int(c)} if c else {})

    @classmethod
    def monomial(cls, exps: Mapping[int, int] | Iterable[tuple[int, int]], coeff: int = 1) -> "Polynomial":
        items = exps.items() if isinstance(exps, Mapping) else exps
        return cls._raw({_pack(items): int(coeff)} if coeff else {})

    @classmethod
    def from_terms(cls, terms: Mapping) -> "Polynomial":
        """Build from ``{exponents: coeff}`` where exponents is a mapping or
        an iterable of ``(variable, exponent)`` pairs."""
        out: dict[int, int] = {}
        for exps, c in terms.items():
            items = exps.items() if isinstance(exps, Mapping) else exps
            k = _pack(items)
            out[k] = out.get(k, 0) + int(c)
        return cls(out)

    # inspection ---------------------------------------------------------

    def terms(self) -> dict[tuple[tuple[int, int], ...], int]:
        """Exponent vectors as sorted ``((var, exp), ...)`` tuples."""
        return {_unpack(k): c for k, c in self._t.items()}

    def items(self):
        return self._t.items()

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise PolynomialError("not a constant")
        return self._t.get(0, 0)

    def constant_term(self) -> int:
        return self._t.get(0, 0)

    def variables(self) -> frozenset[int]:
        if self._vars is None:
            acc = 0
            for k in self._t:
                acc |= k
            vs = []
            v = 0
            while acc:
                if acc & MASK:
                    vs.append(v)
                acc >>= BITS
                v += 1
            self._vars = frozenset(vs)
        return self._vars

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._deg is None:
            self._deg = max((_key_degree(k) for k in self._t), default=-1)
        return self._deg

    def degree_in(self, v: int) -> int:
        if not self._t:
            return -1
        return max(_exp_of(k, v) for k in self._t)

    def is_homogeneous(self) -> bool:
        if not self._t:
            return True
        d = self.degree()
        return all(_key_degree(k) == d for k in self._t)

    def is_multilinear(self) -> bool:
        return all(e <= 1 for k in self._t for _, e in _unpack(k))

    def leading_term(self) -> tuple[int, int]:
        k = max(self._t)
        return k, self._t[k]

    def leading_coefficient(self) -> int:
        return self._t[max(self._t)] if self._t else 0

    def content(self) -> int:
        """Nonnegative gcd of the coefficients."""
        return reduce(math.gcd, self._t.values(), 0)

    # arithmetic ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({k: -c for k, c in self._t.items()})

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                del out[k]
        return Polynomial._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        out = dict(self._t)
        for k, c in other._t.items():
            s = out.get(k, 0) - c
            if s:
                out[k] = s
            else:
                del out[k]
        return Polynomial._raw(out)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            if not other:
                return Polynomial._raw({})
            return Polynomial._raw({k: c * other for k, c in self._t.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return Polynomial._raw({})
        if len(a) * len(b) > _FLINT_MUL_THRESHOLD:
            return _flint_binop(self, other, "mul")
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Polynomial._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolynomialError("negative power")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale_div(self, c: int) -> "Polynomial":
        """Divide every coefficient by the integer ``c`` (must be exact)."""
        out = {}
        for k, v in self._t.items():
            q, r = divmod(v, c)
            if r:
                raise PolynomialError(f"coefficient {v} not divisible by {c}")
            out[k] = q
        return Polynomial._raw(out)

    def primitive(self) -> "Polynomial":
        """Content removed, sign normalized to a positive leading coefficient."""
        if not self._t:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self if c == 1 else self.scale_div(c)

    # structure ----------------------------------------------------------

    def coefficients_in(self, v: int) -> dict[int, "Polynomial"]:
        """Coefficient polynomials of each power of variable ``v``."""
        shift = BITS * v
        buckets: dict[int, dict[int, int]] = {}
        for k, c in self._t.items():
            e = (k >> shift) & MASK
            buckets.setdefault(e, {})[k - (e << shift)] = c
        return {e: Polynomial._raw(t) for e, t in buckets.items()}

    def coefficient(self, v: int, e: int) -> "Polynomial":
        shift = BITS * v
        return Polynomial._raw(
            {k - (e << shift): c for k, c in self._t.items() if ((k >> shift) & MASK) == e}
        )

    def set_zero(self, vs: Iterable[int]) -> "Polynomial":
        """Substitute 0 for every variable in ``vs``."""
        mask = 0
        for v in vs:
            mask |= MASK << (BITS * v)
        if not mask:
            return self
        return Polynomial._raw({k: c for k, c in self._t.items() if not k & mask})

    def subs(self, v: int, value: int) -> "Polynomial":
        """Substitute an integer for one variable."""
        out: dict[int, int] = {}
        shift = BITS * v
        for k, c in self._t.items():
            e = (k >> shift) & MASK
            nk = k - (e << shift)
            out[nk] = out.get(nk, 0) + c * value**e
        return Polynomial(out)

    def rename(self, mapping: Mapping[int, int]) -> "Polynomial":
        out: dict[int, int] = {}
        for k, c in self._t.items():
            nk = _pack((mapping.get(v, v), e) for v, e in _unpack(k))
            out[nk] = out.get(nk, 0) + c
        return Polynomial(out)

    def derivative(self, v: int) -> "Polynomial":
        shift = BITS * v
        out = {}
        for k, c in self._t.items():
            e = (k >> shift) & MASK
            if e:
                out[k - (1 << shift)] = c * e
        return Polynomial._raw(out)

    def evaluate(self, point: Mapping[int, int]) -> int:
        total = 0
        for k, c in self._t.items():
            term = c
            for v, e in _unpack(k):
                term *= point[v] ** e
            total += term
        return total

    # text ---------------------------------------------------------------

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Polynomial({to_text(self)!r})"


# ---------------------------------------------------------------------------
# flint bridge


def _flint_ctx(vs):
    names = tuple(f"a{v}" for v in vs)
    return flint.fmpz_mpoly_ctx.get(names, "lex")


def _to_flint(p: Polynomial, vs, ctx):
    idx = {v: i for i, v in enumerate(vs)}
    n = len(vs)
    d = {}
    for k, c in p._t.items():
        exps = [0] * n
        for v, e in _unpack(k):
            exps[idx[v]] = e
        d[tuple(exps)] = c
    return ctx.from_dict(d)


def _from_flint(fp, vs) -> Polynomial:
    shifts = [BITS * v for v in vs]
    out = {}
    for exps, c in fp.to_dict().items():
        k = 0
        for s, e in zip(shifts, exps):
            if e:
                k += int(e) << s
        out[k] = int(c)
    return Polynomial._raw(out)


def _common_vars(*ps: Polynomial) -> tuple[int, ...]:
    vs = set()
    for p in ps:
        vs |= p.variables()
    return tuple(sorted(vs)) or (0,)


def _flint_binop(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    vs = _common_vars(a, b)
    ctx = _flint_ctx(vs)
    fa, fb = _to_flint(a, vs, ctx), _to_flint(b, vs, ctx)
    if op == "mul":
        r = fa * fb
    elif op == "gcd":
        r = fa.gcd(fb)
    elif op == "div":
        try:
            r = fa / fb
        except Exception as exc:  # flint raises DomainError
            raise PolynomialError("division is not exact") from exc
    else:  # pragma: no cover
        raise ValueError(op)
    return _from_flint(r, vs)


def divexact(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact quotient ``a / b``; raises :class:`PolynomialError` otherwise."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if b.is_constant():
        return a.scale_div(b.constant_value())
    if a.is_zero():
        return a
    return _flint_binop(a, b, "div")


def divides(b: Polynomial, a: Polynomial) -> bool:
    try:
        q = divexact(a, b)
    except (PolynomialError, ZeroDivisionError):
        return False
    return q * b == a


def gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Greatest common divisor, primitive with positive leading coefficient.

    ``gcd(f, 0)`` is ``f`` normalized; ``gcd(0, 0)`` is 0.
    """
    if f.is_zero():
        return g.primitive()
    if g.is_zero():
        return f.primitive()
    if f.is_constant() or g.is_constant():
        return Polynomial.const(1)
    d = _flint_binop(f, g, "gcd").primitive()
    if not (divides(d, f) and divides(d, g)):  # pragma: no cover - guard
        raise PolynomialError("gcd post-check failed")
    return d


def poly_sqrt(f: Polynomial) -> Polynomial | None:
    """Return ``g`` with ``g*g == f`` (positive leading coefficient), or None."""
    if f.is_zero():
        return f
    if f.leading_coefficient() < 0:
        return None
    if f.is_constant():
        c = f.constant_value()
        r = math.isqrt(c)
        return Polynomial.const(r) if r * r == c else None
    vs = _common_vars(f)
    ctx = _flint_ctx(vs)
    try:
        r = _to_flint(f, vs, ctx).sqrt()
    except Exception:
        return None
    g = _from_flint(r, vs)
    if g.leading_coefficient() < 0:
        g = -g
    return g if g * g == f else None



def factor(f: Polynomial) -> tuple[int, list[tuple[Polynomial, int]]]:
    """Irreducible factorization over the integers: ``(content, [(p, e), ...])``.

    Factors are primitive with positive leading coefficient; the signed
    integer content absorbs the rest.
    """
    if f.is_constant():
        return f.constant_value(), []
    vs = _common_vars(f)
    c, facs = _to_flint(f, vs, _flint_ctx(vs)).factor()
    out = []
    c = int(c)
    for fp, e in facs:
        g = _from_flint(fp, vs)
        if g.leading_coefficient() < 0:
            g = -g
            c *= (-1) ** int(e)
        out.append((g, int(e)))
    out.sort(key=lambda t: sort_key(t[0]))
    return c, out


# ---------------------------------------------------------------------------
# linear structure


@dataclass(frozen=True)
class LinearSplit:
    """``f = leading * x + constant`` with neither part involving ``x``."""

    leading: Polynomial
    constant: Polynomial
    variable: int

    def reconstruct(self) -> Polynomial:
        return self.leading * Polynomial.var(self.variable) + self.constant


def linear_split(f: Polynomial, x: int) -> LinearSplit:
    if f.degree_in(x) > 1:
        raise PolynomialError(f"polynomial has degree {f.degree_in(x)} in a{x}")
    return LinearSplit(f.coefficient(x, 1), f.coefficient(x, 0), x)


def resultant_linear(f: Polynomial, g: Polynomial, x: int) -> Polynomial:
    """``f^x g_x - f_x g^x`` for ``f, g`` of degree at most one in ``x``."""
    sf, sg = linear_split(f, x), linear_split(g, x)
    return sf.leading * sg.constant - sf.constant * sg.leading


def split_quadratic(f: Polynomial, x: int) -> tuple[Polynomial, Polynomial] | None:
    """Factor ``f`` into two integer polynomials each of degree one in ``x``.

    Works through the discriminant: ``f = A x^2 + B x + C`` splits over the
    integers only if ``B^2 - 4AC`` is a perfect square ``r^2``; the candidate
    factor is the primitive part of ``2A x + B + r`` (or with ``-r``), kept
    only when it divides ``f`` exactly.  The pair is returned in canonical
    order (smaller packed leading term first).
    """
    d = f.degree_in(x)
    if d > 2:
        raise PolynomialError(f"degree {d} in a{x} exceeds 2")
    if d < 2:
        return None
    cs = f.coefficients_in(x)
    A = cs.get(2, Polynomial())
    B = cs.get(1, Polynomial())
    C = cs.get(0, Polynomial())
    r = poly_sqrt(B * B - A * C * 4)
    if r is None:
        return None
    X = Polynomial.var(x)
    for sign in (1, -1):
        cand = A * X * 2 + B + r * sign
        if cand.is_zero():
            continue
        # strip integer content and any x-free polynomial content
        cand = _primitive_in(cand, x)
        if cand.degree_in(x) != 1:
            continue
        try:
            other = divexact(f, cand)
        except PolynomialError:
            continue
        if other * cand == f and other.degree_in(x) == 1:
            return _order_pair(cand, other)
    return None


def _primitive_in(p: Polynomial, x: int) -> Polynomial:
    """Remove the content of ``p`` viewed as a polynomial in ``x``."""
    cs = list(p.coefficients_in(x).values())
    c = reduce(gcd, cs[1:], cs[0].primitive())
    if not c.is_constant():
        p = divexact(p, c)
    return p.primitive()


def _order_pair(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    return (a, b) if sort_key(a) <= sort_key(b) else (b, a)


def sort_key(p: Polynomial) -> tuple:
    return tuple(sorted(p._t.items(), reverse=True))


def content_in(p: Polynomial, x: int) -> Polynomial:
    """gcd of the coefficients of ``p`` as a polynomial in ``x`` (primitive)."""
    cs = list(p.coefficients_in(x).values())
    return reduce(gcd, cs[1:], cs[0].primitive())


# ---------------------------------------------------------------------------
# degree bookkeeping


@dataclass(frozen=True)
class DeltaInfo:
    degree: int
    n_vars: int
    delta: int


def delta_of(f: Polynomial) -> DeltaInfo:
    """``2d - N`` for a homogeneous polynomial of degree d in N variables."""
    if not f.is_homogeneous():
        raise PolynomialError("delta requires a homogeneous polynomial")
    d, n = max(f.degree(), 0), len(f.variables())
    return DeltaInfo(d, n, 2 * d - n)


def delta_of_pair(f: Polynomial, g: Polynomial) -> DeltaInfo:
    """``deg f + deg g - N(f, g)`` for a pair of homogeneous polynomials."""
    if not (f.is_homogeneous() and g.is_homogeneous()):
        raise PolynomialError("delta requires homogeneous polynomials")
    d = max(f.degree(), 0) + max(g.degree(), 0)
    n = len(f.variables() | g.variables())
    return DeltaInfo(d, n, d - n)


# ---------------------------------------------------------------------------
# text format:  "a1*a2^2 - 3*a4 + 7"


def to_text(p: Polynomial) -> str:
    if not p._t:
        return "0"
    parts = []
    for k in sorted(p._t, reverse=True):
        c = p._t[k]
        mono = "*".join(f"a{v}" if e == 1 else f"a{v}^{e}" for v, e in _unpack(k))
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")


def from_text(s: str) -> Polynomial:
    s = s.strip()
    if s == "0":
        return Polynomial()
    out: dict[int, int] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise PolynomialError(f"cannot parse polynomial text at {s[pos:]!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = 1
        exps = []
        for factor in m.group(2).strip().split("*"):
            factor = factor.strip()
            if factor.startswith("a"):
                name, _, e = factor[1:].partition("^")
                exps.append((int(name), int(e) if e else 1))
            elif factor.isdigit():
                coeff *= int(factor)
            else:
                raise PolynomialError(f"cannot parse factor {factor!r} in {s!r}")
        k = _pack(exps)
        out[k] = out.get(k, 0) + sign * coeff
    return Polynomial(out)


def variables_of(*ps: Polynomial) -> frozenset[int]:
    vs: frozenset[int] = frozenset()
    for p in ps:
        vs |= p.variables()
    return vs
