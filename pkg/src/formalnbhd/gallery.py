"""Built-in example atlases.

Items
-----
line-bundle-P1
    Total space of O(d) over P^1: charts ``U0`` (u; w) and ``U1`` (t; s)
    with ``t = w^(-d) u`` and ``s = 1/w``.  Curve metadata ``g = 0``,
    ``S.S = d``.
blowup-point-C2
    Exceptional curve of the blow-up of C^2 at the origin: charts ``A``
    (u; v) with ``(x, y) = (u, u v)`` and ``B`` (t; s) with
    ``(x, y) = (s t, t)``; ``t = u v``, ``s = 1/v``.  ``g = 0``, ``S.S = -1``.
conic-P2
    Smooth conic ``x z = y^2`` in P^2.  Chart ``Z`` (z = 1) has normal
    ``u = x - y^2`` and tangential ``w = y``; chart ``X`` (x = 1) has normal
    ``p = z/x - (y/x)^2`` and tangential ``q = y/x``.  The third affine chart
    is left out: two charts cover the conic minus two points, enough for
    a pairwise cocycle.  ``g = 0``, ``S.S = 4``.
product-slice
    ``S x C`` inside ``C x C`` with three (or more) affine charts
    ``V_i`` (u_i; w_i), ``w_i = (i+1) W + i``, ``u_i = (i+1) U``, and the
    triple ``(V0, V1, V2)`` declared.
perturbed
    A two-chart base item whose first transition gets an extra term:
    ``kind="g"`` adds ``coefficient * u^k`` to the tangential component,
    ``kind="h"`` adds ``coefficient * u^(k+1)`` to the normal component.
    The reverse transition is recomputed by inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

from .atlas import Atlas, Chart, ChartTransition, invert_transition
from .errors import InputError, SchemaError, UnknownGalleryItemError
from .exprparse import dump_atlas, parse_in_ring

__all__ = ["GalleryItem", "ITEMS", "list_items", "generate", "emit", "perturb_transition"]


def _int(params: Mapping, key: str, default=None) -> int:
    value = params.get(key)
    if value is None:
        value = default
    if value is None:
        raise InputError(f"missing parameter {key!r}")
    try:
        if isinstance(value, str):
            value = int(value.strip())
        if isinstance(value, bool) or int(value) != value:
            raise ValueError
    except (TypeError, ValueError):
        raise InputError(f"parameter {key!r} must be an integer, got {value!r}") from None
    return int(value)


def _order(params: Mapping, default: int) -> int:
    K = _int(params, "K", default)
    if K < 1:
        raise InputError(f"truncation order K must be >= 1, got {K}")
    return K


def line_bundle_p1(d: int = -1, K: int = 4) -> Atlas:
    U0 = Chart("U0", ("u",), ("w",))
    U1 = Chart("U1", ("t",), ("s",))
    u, w = U0.ring(K).gens
    t = ChartTransition(U0, U1, (u * w ** (-d) if d <= 0 else u / w ** d, 1 / w))
    return Atlas([U0, U1], [t], K, name=f"line-bundle-P1({d})", genus=0, self_intersection=d)


def blowup_point_c2(K: int = 4) -> Atlas:
    A = Chart("A", ("u",), ("v",))
    B = Chart("B", ("t",), ("s",))
    u, v = A.ring(K).gens
    t = ChartTransition(A, B, (u * v, 1 / v))
    return Atlas([A, B], [t], K, name="blowup-point-C2", genus=0, self_intersection=-1)


def conic_p2(K: int = 3) -> Atlas:
    Z = Chart("Z", ("u",), ("w",))
    X = Chart("X", ("p",), ("q",))
    u, w = Z.ring(K).gens
    base = u + w ** 2
    t = ChartTransition(Z, X, (u / base ** 2, w / base))
    return Atlas([Z, X], [t], K, name="conic-P2", genus=0, self_intersection=4)


def product_slice(K: int = 3, charts: int = 3) -> Atlas:
    if charts < 3:
        raise InputError("product-slice needs at least 3 charts")
    cs = [Chart(f"V{i}", (f"u{i}",), (f"w{i}",)) for i in range(charts)]
    transitions = []
    for i, ci in enumerate(cs):
        u, w = ci.ring(K).gens
        for j, cj in enumerate(cs):
            if i == j:
                continue
            ratio = Fraction(j + 1, i + 1)
            transitions.append(ChartTransition(ci, cj, (u * ratio, (w - i) * ratio + j)))
    triples = [(cs[0].id, cs[1].id, cs[2].id)]
    return Atlas(cs, transitions, K, triples, name=f"product-slice({charts})")


def perturb_transition(base: Atlas, kind: str, k: int, coefficient: str = "1") -> Atlas:
    """Add a term to the first transition of a two-chart atlas.

    Parameters
    ----------
    base : Atlas
        Atlas without declared triples (a single perturbed transition would
        break them).
    kind : {"g", "h"}
        ``"g"``: tangential component ``+= coefficient * u^k``;
        ``"h"``: first normal component ``+= coefficient * u^(k+1)``, where
        ``u`` is the first normal variable of the source chart.
    k : int
        Order of the targeted obstruction; needs ``K >= k + 2``.
    coefficient : str
        Expression in the tangential variables of the source chart.
    """
    if kind not in ("g", "h"):
        raise InputError(f"perturbation kind must be 'g' or 'h', got {kind!r}")
    if k < 1:
        raise InputError("perturbation order k must be >= 1")
    if base.K < k + 2:
        raise InputError(f"perturbation at order {k} needs K >= {k + 2}, got K={base.K}")
    if base.triples:
        raise InputError("perturbed needs a base item without declared triples")
    key = base.overlaps()[0]
    t = base.transition(*key)
    ring = t.source_ring
    c = parse_in_ring(coefficient, ring)
    if len(c.terms) > 1 or (c and c.normal_order() != 0):
        raise InputError("perturbation coefficient may only involve tangential variables")
    u = ring.gens[0]
    comps = list(t.components)
    if kind == "g":
        comps[t.m] = comps[t.m] + c * u ** k
    else:
        comps[0] = comps[0] + c * u ** (k + 1)
    forward = ChartTransition(t.source, t.target, tuple(comps))
    backward = invert_transition(forward)
    others = [x for kk, x in base.transitions.items() if kk not in (key, key[::-1])]
    name = f"perturbed({base.name},{kind},{k},{coefficient})"
    return base.replace(transitions=[forward, backward, *others], name=name)


@dataclass(frozen=True)
class GalleryItem:
    """A named generator with default parameters and expected facts."""

    name: str
    description: str
    defaults: Mapping[str, Any]
    expected: Mapping[str, Any]
    build: Callable[[Mapping[str, Any]], Atlas] = field(repr=False)

    def generate(self, **params) -> Atlas:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise InputError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        merged = {**self.defaults, **params}
        return self.build(merged)


def _build_perturbed(p: Mapping) -> Atlas:
    k = _int(p, "k")
    K = _order(p, k + 3)
    base_name = p["base"]
    if base_name == "perturbed":
        raise InputError("cannot perturb a perturbed item")
    base_params = {"K": K}
    if base_name == "line-bundle-P1":
        base_params["d"] = _int(p, "d", -1)
    if K < k + 2:
        raise InputError(f"perturbation at order {k} needs K >= {k + 2}, got K={K}")
    base = generate(base_name, **base_params)
    return perturb_transition(base, str(p["kind"]), k, str(p["coefficient"]))


ITEMS: dict[str, GalleryItem] = {
    item.name: item
    for item in [
        GalleryItem(
            "line-bundle-P1",
            "zero section of O(d) over P^1; linear transitions t = w^(-d) u, s = 1/w",
            {"d": -1, "K": 4},
            {"split": True, "ksplit_all": True, "comfortable_all": True, "genus": 0},
            lambda p: line_bundle_p1(_int(p, "d"), _order(p, 4)),
        ),
        GalleryItem(
            "blowup-point-C2",
            "exceptional curve of the blow-up of C^2 at a point; (s, t) = (1/v, u v)",
            {"K": 4},
            {"split": True, "ksplit_all": True, "comfortable_all": True, "genus": 0, "self_intersection": -1},
            lambda p: blowup_point_c2(_order(p, 4)),
        ),
        GalleryItem(
            "conic-P2",
            "smooth conic in P^2, two affine charts; not split",
            {"K": 3},
            {"split": False, "cocycle_s_zero": False, "genus": 0, "self_intersection": 4},
            lambda p: conic_p2(_order(p, 3)),
        ),
        GalleryItem(
            "product-slice",
            "S x C with affine charts and a declared triple",
            {"K": 3, "charts": 3},
            {"split": True, "ksplit_all": True, "comfortable_all": True, "triples_consistent": True},
            lambda p: product_slice(_order(p, 3), _int(p, "charts")),
        ),
        GalleryItem(
            "perturbed",
            "two-chart base item with an injected g- or h-type term on its first transition",
            {"base": "line-bundle-P1", "d": -1, "kind": "g", "k": 1, "coefficient": "1", "K": None},
            {"ksplit_at_k": "fails for kind g", "comfortable_at_k": "fails for kind h"},
            _build_perturbed,
        ),
    ]
}


def list_items() -> list[GalleryItem]:
    return list(ITEMS.values())


def generate(name: str, **params) -> Atlas:
    """Build gallery item ``name`` with keyword parameters (``K``, ``d``, ...)."""
    try:
        item = ITEMS[name]
    except KeyError:
        raise UnknownGalleryItemError(f"unknown gallery item {name!r}; known: {sorted(ITEMS)}") from None
    return item.generate(**params)


def emit(name: str, **params) -> str:
    """Atlas document (JSON text) for a gallery item."""
    return dump_atlas(generate(name, **params))
