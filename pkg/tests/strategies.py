"""Hypothesis strategies for truncated series."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from formalnbhd.series import SeriesRing

NORMAL = ("x", "y")
TANGENTIAL = ("w", "v")


@st.composite
def rings(draw, K=None):
    n = draw(st.integers(2, 3))
    m = draw(st.integers(1, min(2, n - 1)))
    order = draw(st.integers(3, 5)) if K is None else K
    return SeriesRing(NORMAL[:m], TANGENTIAL[: n - m], order)


@st.composite
def coefficients(draw, ring):
    """Small rational function: polynomial of degree <= 2, maybe over (1 + w^2)."""
    gens = [ring.constant(1)] + [ring.gens[i] for i in range(ring.m, ring.n)]
    field = ring.field
    tg = field.gens
    value = field(Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 3))))
    for g in tg:
        value += draw(st.integers(-2, 2)) * g
        value += draw(st.integers(-1, 1)) * g**2
    if draw(st.booleans()):
        value = value / (1 + tg[0] ** 2)
    return value


@st.composite
def series(draw, ring, min_order=0, max_terms=4):
    """Random sparse series with terms of normal degree >= ``min_order``."""
    monos = [e for e in ring.monomials() if sum(e) >= min_order]
    chosen = draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True))
    terms = {e: draw(coefficients(ring)) for e in chosen}
    f = ring.zero
    for e, c in terms.items():
        f = f + ring.monomial(e, c)
    return f


@st.composite
def substitutions(draw, ring):
    """Adapted substitution: normal entries of order >= 1, tangential entries
    ``w + c + (higher terms)`` with ``c >= 0`` so that ``1 + w^2`` stays a unit."""
    subst = [draw(series(ring, min_order=1, max_terms=3)) for _ in range(ring.m)]
    for j in range(ring.m, ring.n):
        shift = draw(st.integers(0, 2))
        base = ring.gens[j] + ring.constant(shift)
        subst.append(base + draw(series(ring, min_order=1, max_terms=2)))
    return subst
