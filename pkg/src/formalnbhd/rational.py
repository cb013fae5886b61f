"""Exact rational functions in the tangential variables.

Coefficients are elements of ``sympy``'s sparse fraction field over QQ.
Those elements are kept reduced (numerator and denominator coprime, with
the denominator normalised to a positive leading coefficient), so equality
is plain structural comparison.  This module adds the few operations the
rest of the package needs on top: cached field construction, evaluation at
other rational functions, small dense linear algebra and canonical
printing.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy import QQ
from sympy.polys.fields import FracElement, FracField

from .errors import InvertibilityError, NonInvertibleDenominatorError

RationalFunction = FracElement

__all__ = [
    "RationalFunction",
    "coefficient_field",
    "to_coefficient",
    "evaluate",
    "partial",
    "determinant",
    "inverse_matrix",
    "format_rational",
    "format_coefficient",
    "is_constant",
]


@lru_cache(maxsize=None)
def coefficient_field(names: tuple[str, ...]) -> FracField:
    """Return the (cached) field QQ(names)."""
    return FracField(tuple(names), QQ)


def to_coefficient(value, field: FracField) -> FracElement:
    """Coerce ``value`` into ``field``.

    Accepts integers, :class:`fractions.Fraction`, ground-domain rationals
    and fraction-field elements whose generators are a subset of the
    target's generators.
    """
    if isinstance(value, FracElement):
        if value.field == field:
            return value
        src = [str(s) for s in value.field.symbols]
        dst = [str(s) for s in field.symbols]
        if not set(src) <= set(dst):
            raise ValueError(f"cannot coerce coefficient in {src} into field over {dst}")
        gens = [field.gens[dst.index(name)] for name in src]
        return evaluate(value, gens, field)
    if isinstance(value, Fraction):
        return field(QQ(value.numerator, value.denominator))
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    return field(value)


def _eval_poly(poly, values: Sequence[FracElement], field: FracField, powers: dict):
    total = field.zero
    for monom, coeff in poly.terms():
        term = field.ground_new(coeff)
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                p = powers.get(key)
                if p is None:
                    p = values[i] ** e
                    powers[key] = p
                term = term * p
        total += term
    return total


def evaluate(rf: FracElement, values: Sequence[FracElement], field: FracField) -> FracElement:
    """Substitute ``values`` (elements of ``field``) for the generators of ``rf``.

    Raises
    ------
    NonInvertibleDenominatorError
        If the denominator evaluates to zero.
    """
    if rf.field == field and tuple(values) == tuple(field.gens):
        return rf
    if len(values) != len(rf.field.gens):
        raise ValueError("wrong number of values for substitution")
    powers: dict = {}
    num = _eval_poly(rf.numer, values, field, powers)
    den = _eval_poly(rf.denom, values, field, powers)
    if not den:
        raise NonInvertibleDenominatorError(
            "denominator vanishes identically after substitution",
            denominator=format_rational(rf.field(rf.denom)),
        )
    return num / den


def partial(rf: FracElement, index: int) -> FracElement:
    """Partial derivative with respect to generator ``index``."""
    return rf.diff(rf.field.gens[index])


def is_constant(rf: FracElement) -> bool:
    return rf.numer.is_ground and rf.denom.is_ground


# -- linear algebra over the field ------------------------------------------------
def _eliminate(rows: Sequence[Sequence[FracElement]], field: FracField, rhs=None):
    n = len(rows)
    a = [list(r) for r in rows]
    b = [list(r) for r in rhs] if rhs is not None else None
    det = field.one
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return field.zero, None
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            if b is not None:
                b[col], b[pivot] = b[pivot], b[col]
            det = -det
        piv = a[col][col]
        det *= piv
        inv = field.one / piv
        a[col] = [x * inv for x in a[col]]
        if b is not None:
            b[col] = [x * inv for x in b[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                if b is not None:
                    b[r] = [x - f * y for x, y in zip(b[r], b[col])]
    return det, b


def determinant(rows: Sequence[Sequence[FracElement]], field: FracField) -> FracElement:
    if not rows:
        return field.one
    det, _ = _eliminate(rows, field)
    return det


def inverse_matrix(rows: Sequence[Sequence[FracElement]], field: FracField) -> list[list[FracElement]]:
    """Inverse of a square matrix of rational functions (Gauss-Jordan)."""
    n = len(rows)
    if n == 0:
        return []
    ident = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    det, inv = _eliminate(rows, field, ident)
    if not det:
        raise InvertibilityError("matrix is singular as a matrix of rational functions")
    return inv


# -- printing ---------------------------------------------------------------------
def _format_number(q) -> str:
    q = QQ.convert(q)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def _format_poly(poly, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    parts = []
    for monom, coeff in poly.terms():
        factors = [
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, monom) if e
        ]
        c = _format_number(coeff)
        if not factors:
            parts.append(f"({c})")
        elif c == "1":
            parts.append("(" + "*".join(factors) + ")")
        else:
            parts.append(f"({c}*" + "*".join(factors) + ")")
    return " + ".join(parts)


def format_rational(rf: FracElement) -> str:
    """Canonical fully parenthesised text of a rational function.

    The output re-parses (in a chart declaring the same tangential names) to
    the same element, e.g. ``((3/4*w^2))`` or ``(((1))/((w) + (1)))``.
    """
    names = [str(s) for s in rf.field.symbols]
    if rf.denom.is_ground:
        scale = rf.field.domain.one / rf.denom.LC
        return f"({_format_poly(rf.numer.mul_ground(scale), names)})"
    num = _format_poly(rf.numer, names)
    return f"(({num})/({_format_poly(rf.denom, names)}))"


def format_coefficient(rf: FracElement) -> str:
    """Compact human-readable form (sympy's printer)."""
    return str(rf.as_expr())
