"""Series truncated in the normal directions.

A :class:`TruncatedSeries` over a :class:`SeriesRing` with ``m`` normal
variables ``z'`` and ``n - m`` tangential variables ``z''`` is a finite map

    I  ->  c_I(z'')        (|I| <= K)

standing for the germ ``sum_I c_I(z'') z'^I`` modulo the ideal generated by
the normal monomials of degree ``K + 1``.  Coefficients are exact rational
functions (see :mod:`formalnbhd.rational`).

Examples
--------
>>> R = SeriesRing(["u"], ["w"], 2)
>>> u, w = R.gens
>>> print(compose(1 / w, [u, w + u]))
(((1))/((w))) + (((-1))/((w^2)))*u + (((1))/((w^3)))*u^2
"""

from __future__ import annotations

import bisect
import itertools
from math import factorial
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from sympy.polys.fields import FracElement

from .errors import (
    AdaptednessError,
    NotAUnitError,
    ShapeMismatchError,
    UnknownVariableError,
)
from .rational import (
    coefficient_field,
    evaluate,
    format_rational,
    partial,
    to_coefficient,
)

__all__ = [
    "ABOVE_K",
    "AboveK",
    "NormalOrder",
    "SeriesRing",
    "TruncatedSeries",
    "add",
    "mul",
    "derive",
    "compose",
    "restrict_to_S",
    "normal_order",
    "exponents_to_indices",
    "indices_to_exponents",
]


class AboveK:
    """Sentinel normal order of a series that vanishes after truncation.

    Compares greater than every integer.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AboveK"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("AboveK")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __reduce__(self):
        return (AboveK, ())


ABOVE_K = AboveK()
NormalOrder = Union[int, AboveK]


def exponents_to_indices(exponents: Sequence[int]) -> tuple[int, ...]:
    """``(2, 0, 1) -> (0, 0, 2)``: exponent vector to sorted multi-index."""
    return tuple(i for i, e in enumerate(exponents) for _ in range(e))


def indices_to_exponents(indices: Iterable[int], m: int) -> tuple[int, ...]:
    """Inverse of :func:`exponents_to_indices`."""
    out = [0] * m
    for i in indices:
        if not 0 <= i < m:
            raise ValueError(f"normal index {i} out of range 0..{m - 1}")
        out[i] += 1
    return tuple(out)


def _term_key(exponents: tuple[int, ...]):
    return (sum(exponents), tuple(-e for e in exponents))


class SeriesRing:
    """Ring of series truncated at normal degree ``order``.

    Parameters
    ----------
    normal, tangential : sequence of str
        Variable names; normal variables come first in the variable order.
    order : int
        Truncation order K (largest retained normal degree).
    """

    __slots__ = ("normal", "tangential", "order", "field", "_key", "_gens")

    def __init__(self, normal: Sequence[str], tangential: Sequence[str], order: int):
        normal = tuple(str(x) for x in normal)
        tangential = tuple(str(x) for x in tangential)
        names = normal + tangential
        if len(normal) < 1:
            raise ShapeMismatchError("a series ring needs at least one normal variable")
        if len(set(names)) != len(names):
            raise ShapeMismatchError(f"variable names must be distinct: {names}")
        if int(order) != order or order < 0:
            raise ShapeMismatchError(f"truncation order must be a nonnegative integer, got {order}")
        self.normal = normal
        self.tangential = tangential
        self.order = int(order)
        self.field = coefficient_field(tangential)
        self._key = (normal, tangential, self.order)
        self._gens = None

    # shape ------------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.normal) + len(self.tangential)

    @property
    def m(self) -> int:
        return len(self.normal)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.normal + self.tangential

    def with_order(self, order: int) -> "SeriesRing":
        return SeriesRing(self.normal, self.tangential, order)

    def __eq__(self, other) -> bool:
        return isinstance(other, SeriesRing) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"SeriesRing(normal={list(self.normal)}, tangential={list(self.tangential)}, order={self.order})"

    # construction -----------------------------------------------------------
    def index(self, var: Union[str, int]) -> int:
        if isinstance(var, int):
            if not 0 <= var < self.n:
                raise ShapeMismatchError(f"variable index {var} out of range")
            return var
        try:
            return self.variables.index(var)
        except ValueError:
            raise UnknownVariableError(f"unknown variable {var!r} in ring {self.variables}", name=var) from None

    def constant(self, value) -> "TruncatedSeries":
        c = to_coefficient(value, self.field)
        return TruncatedSeries(self, {(0,) * self.m: c} if c else {}, _trusted=True)

    def monomial(self, exponents: Sequence[int], coefficient=1) -> "TruncatedSeries":
        return TruncatedSeries(self, {tuple(exponents): coefficient})

    def gen(self, var: Union[str, int]) -> "TruncatedSeries":
        return self.gens[self.index(var)]

    @property
    def gens(self) -> tuple["TruncatedSeries", ...]:
        if self._gens is None:
            m = self.m
            gens = []
            for r in range(m):
                e = tuple(1 if i == r else 0 for i in range(m))
                gens.append(TruncatedSeries(self, {e: self.field.one} if self.order >= 1 else {}, _trusted=True))
            for g in self.field.gens:
                gens.append(TruncatedSeries(self, {(0,) * m: g}, _trusted=True))
            self._gens = tuple(gens)
        return self._gens

    @property
    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {}, _trusted=True)

    @property
    def one(self) -> "TruncatedSeries":
        return self.constant(1)

    def monomials(self, degree: int | None = None) -> list[tuple[int, ...]]:
        """Exponent vectors of total degree ``degree`` (or all with |I| <= K)."""
        degrees = range(self.order + 1) if degree is None else [degree]
        out = []
        for d in degrees:
            for combo in itertools.combinations_with_replacement(range(self.m), d):
                out.append(indices_to_exponents(combo, self.m))
        return sorted(out, key=_term_key)


class TruncatedSeries:
    """Immutable truncated series; see the module docstring."""

    __slots__ = ("ring", "_terms", "_sorted")

    def __init__(self, ring: SeriesRing, terms: Mapping | None = None, *, _trusted: bool = False):
        self.ring = ring
        self._sorted = None
        if _trusted:
            self._terms = terms
            return
        clean = {}
        K, m, field = ring.order, ring.m, ring.field
        for key, value in (terms or {}).items():
            key = tuple(int(e) for e in key)
            if len(key) != m or any(e < 0 for e in key):
                raise ShapeMismatchError(f"bad normal exponent vector {key} for m={m}")
            if sum(key) > K:
                continue
            c = to_coefficient(value, field)
            if c:
                clean[key] = clean.get(key, field.zero) + c
                if not clean[key]:
                    del clean[key]
        self._terms = clean

    # basic accessors ----------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], FracElement]:
        return MappingProxyType(self._terms)

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def m(self) -> int:
        return self.ring.m

    @property
    def K(self) -> int:
        return self.ring.order

    def sorted_terms(self) -> list[tuple[tuple[int, ...], FracElement]]:
        if self._sorted is None:
            self._sorted = sorted(self._terms.items(), key=lambda kv: _term_key(kv[0]))
        return self._sorted

    def coefficient(self, exponents: Sequence[int]) -> FracElement:
        return self._terms.get(tuple(exponents), self.ring.field.zero)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def restrict_to_S(self) -> FracElement:
        return self.coefficient((0,) * self.m)

    def normal_order(self) -> NormalOrder:
        if not self._terms:
            return ABOVE_K
        return min(sum(k) for k in self._terms)

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, {k: v for k, v in self._terms.items() if sum(k) == degree}, _trusted=True)

    def truncate(self, degree: int) -> "TruncatedSeries":
        """Drop terms of normal degree above ``degree`` (same ring)."""
        return TruncatedSeries(self.ring, {k: v for k, v in self._terms.items() if sum(k) <= degree}, _trusted=True)

    def change_ring(self, ring: SeriesRing) -> "TruncatedSeries":
        """Re-home the series in a ring with the same variables and another K."""
        if ring.normal != self.ring.normal or ring.tangential != self.ring.tangential:
            raise ShapeMismatchError("change_ring only changes the truncation order")
        return TruncatedSeries(ring, {k: v for k, v in self._terms.items() if sum(k) <= ring.order}, _trusted=True)

    # arithmetic -----------------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.ring != self.ring:
                raise ShapeMismatchError(f"series over different rings: {self.ring} vs {other.ring}")
            return other
        return self.ring.constant(other)

    def __add__(self, other) -> "TruncatedSeries":
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k)
            if s is None:
                out[k] = v
            else:
                s = s + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return TruncatedSeries(self.ring, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, {k: -v for k, v in self._terms.items()}, _trusted=True)

    def __sub__(self, other) -> "TruncatedSeries":
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "TruncatedSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            try:
                c = to_coefficient(other, self.ring.field)
            except (TypeError, ValueError):
                return NotImplemented
            if not c:
                return self.ring.zero
            return TruncatedSeries(self.ring, {k: v * c for k, v in self._terms.items()}, _trusted=True)
        other = self._coerce(other)
        K = self.ring.order
        left = self.sorted_terms()
        right = other.sorted_terms()
        if not left or not right:
            return self.ring.zero
        rdeg = [sum(k) for k, _ in right]
        out: dict = {}
        for a_key, a in left:
            room = K - sum(a_key)
            if room < 0:
                break
            stop = bisect.bisect_right(rdeg, room)
            for b_key, b in right[:stop]:
                key = tuple(x + y for x, y in zip(a_key, b_key))
                prod = a * b
                s = out.get(key)
                out[key] = prod if s is None else s + prod
        return TruncatedSeries(self.ring, {k: v for k, v in out.items() if v}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "TruncatedSeries":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = self.ring.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def is_unit(self) -> bool:
        return bool(self.restrict_to_S())

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse via the truncated geometric series.

        Raises
        ------
        NotAUnitError
            If the restriction to S vanishes.
        """
        c0 = self.restrict_to_S()
        if not c0:
            raise NotAUnitError("series has zero restriction to S and is not invertible", series=str(self))
        inv0 = 1 / c0
        q = (self - self.ring.constant(c0)) * (-inv0)
        if not q:
            return self.ring.constant(inv0)
        acc = self.ring.one
        for _ in range(self.ring.order):
            acc = self.ring.one + q * acc
        return acc * inv0

    def __truediv__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return self * self._coerce(other).inverse()
        try:
            c = to_coefficient(other, self.ring.field)
        except (TypeError, ValueError):
            return NotImplemented
        if not c:
            raise ZeroDivisionError("division by zero coefficient")
        return self * (1 / c)

    def __rtruediv__(self, other) -> "TruncatedSeries":
        return self.ring.constant(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.ring == other.ring and self._terms == other._terms
        try:
            return self._terms == self.ring.constant(other)._terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self._terms.items())))

    # calculus -------------------------------------------------------------------
    def derive(self, var: Union[str, int]) -> "TruncatedSeries":
        """Partial derivative; a normal derivative is only trusted to degree K-1."""
        i = self.ring.index(var)
        m = self.ring.m
        out = {}
        if i < m:
            for k, v in self._terms.items():
                e = k[i]
                if e:
                    nk = k[:i] + (e - 1,) + k[i + 1:]
                    out[nk] = v * e
        else:
            for k, v in self._terms.items():
                d = partial(v, i - m)
                if d:
                    out[k] = d
        return TruncatedSeries(self.ring, out, _trusted=True)

    def compose(self, subst: Sequence["TruncatedSeries"], adaptedness: bool = True) -> "TruncatedSeries":
        return compose(self, subst, adaptedness)

    # printing --------------------------------------------------------------------
    def to_text(self) -> str:
        """Canonical, fully parenthesised text that re-parses to ``self``."""
        if not self._terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            factors = [
                name if e == 1 else f"{name}^{e}" for name, e in zip(self.ring.normal, key) if e
            ]
            parts.append("*".join([format_rational(c)] + factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.to_text()!r}, ring={self.ring!r})"


# -- functional interface ------------------------------------------------------------
def add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    if f.ring != g.ring:
        raise ShapeMismatchError("add: series over different rings")
    return f + g


def mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    if f.ring != g.ring:
        raise ShapeMismatchError("mul: series over different rings")
    return f * g


def derive(f: TruncatedSeries, var: Union[str, int]) -> TruncatedSeries:
    return f.derive(var)


def restrict_to_S(f: TruncatedSeries) -> FracElement:
    return f.restrict_to_S()


def normal_order(f: TruncatedSeries) -> NormalOrder:
    return f.normal_order()


def compose(f: TruncatedSeries, subst: Sequence[TruncatedSeries], adaptedness: bool = True) -> TruncatedSeries:
    """Substitute series for the variables of ``f``.

    Parameters
    ----------
    f : TruncatedSeries
        Series in the source ring (variables ``x_1..x_n``).
    subst : sequence of TruncatedSeries
        ``n`` series over one common target ring; entry ``j`` replaces
        ``x_j``.
    adaptedness : bool
        Demand that the first ``m`` entries have normal order >= 1.  When
        this is false a normal entry with nonzero restriction is accepted,
        and ``f`` is treated as the polynomial it represents.

    Notes
    -----
    Tangential entries are split as ``T0 + T1`` (restriction plus the rest)
    and every coefficient is expanded by Taylor's formula around ``T0``
    using repeated exact differentiation.
    """
    src = f.ring
    subst = list(subst)
    if len(subst) != src.n:
        raise ShapeMismatchError(f"compose needs {src.n} substitutions, got {len(subst)}")
    tgt = subst[0].ring
    if any(s.ring != tgt for s in subst):
        raise ShapeMismatchError("substitutions must share one ring")
    m = src.m
    K = tgt.order
    adapted = True
    for r in range(m):
        if subst[r].restrict_to_S():
            adapted = False
            if adaptedness:
                raise AdaptednessError(
                    f"normal substitution {r} ({src.normal[r]}) has nonzero restriction to S",
                    component=r,
                    value=str(subst[r]),
                )
    tangs = subst[m:]
    T0 = [t.restrict_to_S() for t in tangs]
    T1 = [t - tgt.constant(c) if c else t for t, c in zip(tangs, T0)]
    active = [j for j, t in enumerate(T1) if t]
    field = tgt.field

    # powers of normal substitutions, cached
    normal_powers: dict = {}

    def npow(r: int, e: int) -> TruncatedSeries:
        key = (r, e)
        p = normal_powers.get(key)
        if p is None:
            p = tgt.one if e == 0 else npow(r, e - 1) * subst[r]
            normal_powers[key] = p
        return p

    t1_products: dict = {(): tgt.one}

    def t1prod(J: tuple[int, ...]) -> TruncatedSeries:
        # J is a sorted tuple of positions in ``active``
        p = t1_products.get(J)
        if p is None:
            p = t1prod(J[:-1]) * T1[active[J[-1]]]
            t1_products[J] = p
        return p

    result = tgt.zero
    for key, c in f.sorted_terms():
        deg = sum(key)
        if adapted and deg > K:
            continue
        mono = tgt.one
        for r, e in enumerate(key):
            if e:
                mono = mono * npow(r, e)
        if not mono:
            continue
        budget = K - deg if adapted else K
        expansion = _taylor(c, T0, active, budget, field, tgt, t1prod)
        result = result + expansion * mono
    return result


def _taylor(c, T0, active, budget, field, tgt, t1prod) -> TruncatedSeries:
    """sum_J (1/J!) d^J c (T0) * T1^J over multi-indices J in ``active``."""
    out = tgt.constant(evaluate(c, T0, field))
    if not active or budget <= 0:
        return out
    derivs = {(): c}
    for order in range(1, budget + 1):
        for J in itertools.combinations_with_replacement(range(len(active)), order):
            parent = derivs.get(J[:-1])
            if parent is None or not parent:
                derivs[J] = parent
                continue
            d = partial(parent, active[J[-1]])
            derivs[J] = d
            if not d:
                continue
            weight = 1
            for _, grp in itertools.groupby(J):
                weight *= factorial(len(list(grp)))
            value = evaluate(d, T0, field)
            if value:
                out = out + t1prod(J) * (value / weight)
    return out
