"""Adapted charts, directed transitions and whole atlases.

Conventions
-----------
A chart declares ``m`` normal and ``n - m`` tangential variable names; the
submanifold S is the common zero set of the normal ones.  A transition
``alpha -> beta`` holds ``n`` series in the variables of ``alpha``, giving
``z_beta`` in terms of ``z_alpha``; the first ``m`` are the normal
components.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    AdaptednessError,
    InvertibilityError,
    MissingTransitionError,
    NeedsInverseError,
    SchemaError,
    ShapeMismatchError,
    TripleInconsistencyError,
)
from .rational import determinant, evaluate, inverse_matrix, partial
from .series import SeriesRing, TruncatedSeries, compose

__all__ = [
    "Chart",
    "ChartTransition",
    "Atlas",
    "TripleReport",
    "invert_transition",
    "check_triple_consistency",
    "induced_normal_bundle_atlas",
    "identity_atlas",
]


@dataclass(frozen=True)
class Chart:
    """An adapted chart: ``id`` plus normal and tangential variable names."""

    id: str
    normal: tuple[str, ...]
    tangential: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(self.normal))
        object.__setattr__(self, "tangential", tuple(self.tangential))
        names = self.normal + self.tangential
        if not self.normal:
            raise SchemaError(f"chart {self.id!r} declares no normal variables")
        if len(set(names)) != len(names):
            raise SchemaError(f"chart {self.id!r}: variable names must be distinct", chart=self.id)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.normal + self.tangential

    def ring(self, order: int) -> SeriesRing:
        return SeriesRing(self.normal, self.tangential, order)


@dataclass(frozen=True, eq=False)
class ChartTransition:
    """Directed transition ``source -> target``.

    ``components[i]`` is the ``i``-th coordinate of the target chart as a
    series in the source chart's variables.
    """

    source: Chart
    target: Chart
    components: tuple[TruncatedSeries, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        n = len(self.source.variables)
        if len(self.target.variables) != n or len(self.target.normal) != len(self.source.normal):
            raise ShapeMismatchError("charts of a transition must have the same (n, m)")
        if len(comps) != n:
            raise ShapeMismatchError(
                f"transition {self.source.id}->{self.target.id} needs {n} components, got {len(comps)}"
            )
        ring = comps[0].ring
        if ring.normal != self.source.normal or ring.tangential != self.source.tangential:
            raise ShapeMismatchError("transition components must be series in the source chart variables")
        if any(c.ring != ring for c in comps):
            raise ShapeMismatchError("transition components must share one ring")

    # shape ------------------------------------------------------------------
    @property
    def key(self) -> tuple[str, str]:
        return (self.source.id, self.target.id)

    @property
    def K(self) -> int:
        return self.components[0].ring.order

    @property
    def m(self) -> int:
        return len(self.source.normal)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def source_ring(self) -> SeriesRing:
        return self.components[0].ring

    @property
    def target_ring(self) -> SeriesRing:
        return self.target.ring(self.K)

    @property
    def normal_components(self) -> tuple[TruncatedSeries, ...]:
        return self.components[: self.m]

    @property
    def tangential_components(self) -> tuple[TruncatedSeries, ...]:
        return self.components[self.m:]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChartTransition)
            and self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )

    def __hash__(self) -> int:
        return hash((self.key, self.components))

    # data on S ------------------------------------------------------------------
    def tangential_map_on_S(self) -> tuple:
        """``w_target`` as rational functions of ``w_source`` along S."""
        return tuple(c.restrict_to_S() for c in self.tangential_components)

    def normal_jacobian_on_S(self) -> list[list]:
        """Matrix ``a[r][s] = d z_target^r / d z_source^s`` restricted to S."""
        m = self.m
        units = [tuple(1 if i == s else 0 for i in range(m)) for s in range(m)]
        return [[comp.coefficient(units[s]) for s in range(m)] for comp in self.normal_components]

    def tangential_jacobian_on_S(self) -> list[list]:
        """Matrix ``D[q][p] = d w_target^q / d w_source^p`` along S."""
        R = self.tangential_map_on_S()
        k = len(R)
        return [[partial(R[q], p) for p in range(k)] for q in range(k)]

    def jacobian_on_S(self) -> list[list]:
        """Full restricted Jacobian, rows = target coordinates."""
        return [[c.derive(j).restrict_to_S() for j in range(self.n)] for c in self.components]

    def pullback(self, rf):
        """Express a function of ``w_target`` in terms of ``w_source`` along S."""
        return evaluate(rf, self.tangential_map_on_S(), self.source_ring.field)

    # validation -------------------------------------------------------------------
    def validate(self) -> None:
        """Check adaptedness, the block-triangular identity and invertibility."""
        m = self.m
        for r, comp in enumerate(self.normal_components):
            if comp.restrict_to_S():
                raise AdaptednessError(
                    f"transition {self.source.id}->{self.target.id}: normal component {r} "
                    f"({self.target.normal[r]}) does not vanish on S",
                    overlap=list(self.key),
                    component=r,
                    value=str(comp),
                )
            for q in range(m, self.n):
                if comp.derive(q).restrict_to_S():
                    raise AdaptednessError(
                        "normal component has a tangential derivative not vanishing on S",
                        overlap=list(self.key),
                        component=r,
                    )
        field = self.source_ring.field
        if not determinant(self.normal_jacobian_on_S(), field):
            raise InvertibilityError(
                f"transition {self.source.id}->{self.target.id}: restricted normal Jacobian is singular",
                overlap=list(self.key),
            )
        if not determinant(self.tangential_jacobian_on_S(), field):
            raise InvertibilityError(
                f"transition {self.source.id}->{self.target.id}: restricted tangential Jacobian is singular",
                overlap=list(self.key),
            )

    def compose_with(self, later: "ChartTransition") -> "ChartTransition":
        """The transition ``later o self`` (source of self to target of later)."""
        if later.source != self.target:
            raise ShapeMismatchError("transitions are not composable")
        comps = [compose(c, self.components) for c in later.components]
        return ChartTransition(self.source, later.target, tuple(comps))

    def is_identity(self) -> bool:
        ring = self.source_ring
        return self.source.variables == self.target.variables and all(
            c == g for c, g in zip(self.components, ring.gens)
        )


def _closed_form_tangential_inverse(R: Sequence, src_field, dst_field) -> Optional[tuple]:
    """Invert ``w' = R(w)`` when it is fractional-linear in one variable or affine."""
    k = len(R)
    if k == 0:
        return ()
    if k == 1:
        num, den = R[0].numer, R[0].denom
        if num.degree() <= 1 and den.degree() <= 1:
            coeffs = {}
            for name, poly in (("num", num), ("den", den)):
                hi = lo = 0
                for (e,), c in poly.terms():
                    if e == 1:
                        hi = c
                    else:
                        lo = c
                coeffs[name] = (hi, lo)
            (a, b), (c, d) = coeffs["num"], coeffs["den"]
            if a * d - b * c == 0:
                return None
            W = dst_field.gens[0]
            return ((W * d - b) / (W * (-c) + a),)
        return None
    # multivariate affine maps
    rows, shifts = [], []
    for comp in R:
        if comp.denom.degree() > 0 or any(sum(mon) > 1 for mon, _ in comp.numer.terms()):
            return None
        c = comp.denom.LC
        row = [0] * k
        shift = 0
        for mon, coeff in comp.numer.terms():
            if sum(mon) == 0:
                shift = coeff / c
            else:
                row[mon.index(1)] = coeff / c
        rows.append([dst_field(x) for x in row])
        shifts.append(shift)
    try:
        inv = inverse_matrix(rows, dst_field)
    except InvertibilityError:
        return None
    W = dst_field.gens
    return tuple(
        sum((inv[p][q] * (W[q] - shifts[q]) for q in range(k)), dst_field.zero) for p in range(k)
    )


def invert_transition(t: ChartTransition, candidate: Optional[ChartTransition] = None) -> ChartTransition:
    """Formal inverse of a transition modulo normal degree K+1.

    The tangential map along S is inverted in closed form (fractional
    linear in one variable, or affine), or taken from ``candidate`` after
    verification.  The remaining terms are fixed by a Newton iteration in
    the normal filtration, each step gaining at least one normal order.

    Raises
    ------
    NeedsInverseError
        No closed form is available and no candidate was given.
    InvertibilityError
        A restricted Jacobian is singular or the candidate is wrong.
    """
    t.validate()
    K = t.K
    src_field = t.source_ring.field
    tgt_ring = t.target_ring
    tgt_field = tgt_ring.field
    R = t.tangential_map_on_S()
    if candidate is not None:
        if candidate.source != t.target or candidate.target != t.source:
            raise ShapeMismatchError("candidate inverse has the wrong direction")
        Rinv = candidate.tangential_map_on_S()
    else:
        Rinv = _closed_form_tangential_inverse(R, src_field, tgt_field)
        if Rinv is None:
            raise NeedsInverseError(
                f"no closed-form inverse for the tangential map of {t.source.id}->{t.target.id}; "
                "supply the reverse transition",
                overlap=list(t.key),
            )
    for q, comp in enumerate(R):
        if evaluate(comp, Rinv, tgt_field) != tgt_field.gens[q]:
            raise InvertibilityError(
                "tangential inverse does not invert the restricted tangential map", overlap=list(t.key)
            )
    jac = [[evaluate(x, Rinv, tgt_field) for x in row] for row in t.jacobian_on_S()]
    Minv = inverse_matrix(jac, tgt_field)
    gens = tgt_ring.gens
    m = t.m
    psi = [
        sum((gens[s] * Minv[r][s] for s in range(m)), tgt_ring.zero) for r in range(m)
    ] + [tgt_ring.constant(x) for x in Rinv]
    for _ in range(K + 2):
        err = [compose(c, psi) - g for c, g in zip(t.components, gens)]
        if not any(err):
            break
        psi = [
            p - sum((e * Minv[i][j] for j, e in enumerate(err) if e and Minv[i][j]), tgt_ring.zero)
            for i, p in enumerate(psi)
        ]
    else:
        raise InvertibilityError("Newton inversion did not converge", overlap=list(t.key))
    return ChartTransition(t.target, t.source, tuple(psi))


def _change_order(self: ChartTransition, order: int) -> ChartTransition:
    ring = self.source.ring(order)
    return ChartTransition(self.source, self.target, tuple(c.change_ring(ring) for c in self.components))


ChartTransition.change_order = _change_order


@dataclass(frozen=True)
class TripleReport:
    """Outcome of a triple-overlap consistency check."""

    triple: tuple[str, str, str]
    passed: bool
    component: Optional[int] = None
    difference: Optional[TruncatedSeries] = None

    def to_dict(self) -> dict:
        out = {"triple": list(self.triple), "passed": self.passed}
        if not self.passed:
            out["component"] = self.component
            out["difference"] = self.difference.to_text()
        return out


class Atlas:
    """A finite adapted atlas with all directed transitions.

    Parameters
    ----------
    charts : iterable of Chart
    transitions : iterable of ChartTransition
        Missing reverse directions are computed by :func:`invert_transition`
        when ``complete`` is true.
    order : int
        Truncation order K shared by every transition.
    triples : iterable of (str, str, str)
        Triples checked with :func:`check_triple_consistency` on
        construction.
    name, genus, self_intersection
        Descriptive metadata; the last two feed the curve criteria.
    complete, verify_inverses : bool
        Fill missing reverse transitions; check supplied pairs compose to
        the identity.
    """

    def __init__(
        self,
        charts: Iterable[Chart],
        transitions: Iterable[ChartTransition],
        order: int,
        triples: Iterable[Sequence[str]] = (),
        name: str = "atlas",
        genus: Optional[int] = None,
        self_intersection: Optional[int] = None,
        *,
        complete: bool = True,
        verify_inverses: bool = True,
    ):
        charts = tuple(charts)
        if not charts:
            raise SchemaError("an atlas needs at least one chart")
        ids = [c.id for c in charts]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"duplicate chart ids in {ids}")
        n = len(charts[0].variables)
        m = len(charts[0].normal)
        for c in charts:
            if len(c.variables) != n or len(c.normal) != m:
                raise SchemaError(f"chart {c.id!r} does not have n={n}, m={m}")
        if int(order) < 1:
            raise SchemaError(f"truncation order must be at least 1, got {order}")
        self.name = str(name)
        self.n, self.m, self.order = n, m, int(order)
        self.charts = charts
        self._chart_by_id = {c.id: c for c in charts}
        self.genus = genus
        self.self_intersection = self_intersection
        table: dict = {}
        for t in transitions:
            if t.source.id not in self._chart_by_id or t.target.id not in self._chart_by_id:
                raise SchemaError(f"transition {t.key} references an undeclared chart")
            if self._chart_by_id[t.source.id] != t.source or self._chart_by_id[t.target.id] != t.target:
                raise SchemaError(f"transition {t.key} uses charts that differ from the declared ones")
            if t.source.id == t.target.id:
                raise SchemaError(f"transition {t.key} maps a chart to itself")
            if t.key in table:
                raise SchemaError(f"duplicate transition {t.key}")
            if t.K != self.order:
                raise SchemaError(f"transition {t.key} has truncation order {t.K}, atlas has {self.order}")
            t.validate()
            table[t.key] = t
        for (a, b), t in sorted(table.items()):
            back = table.get((b, a))
            if back is None:
                if not complete:
                    raise MissingTransitionError(f"missing reverse transition {b}->{a}")
                table[(b, a)] = invert_transition(t)
            elif verify_inverses and a < b:
                _verify_pair(t, back)
        self._transitions = dict(sorted(table.items()))
        self.triples = tuple(tuple(tr) for tr in triples)
        for tr in self.triples:
            if len(tr) != 3 or len(set(tr)) != 3:
                raise SchemaError(f"triple {tr} must name three distinct charts")
            report = check_triple_consistency(self, tr)
            if not report.passed:
                raise TripleInconsistencyError(
                    f"declared triple {tr} is inconsistent", **report.to_dict()
                )

    # accessors ------------------------------------------------------------------
    @property
    def K(self) -> int:
        return self.order

    @property
    def chart_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.charts)

    def chart(self, chart_id: str) -> Chart:
        try:
            return self._chart_by_id[chart_id]
        except KeyError:
            raise SchemaError(f"unknown chart {chart_id!r}") from None

    def ring(self, chart_id: str) -> SeriesRing:
        return self.chart(chart_id).ring(self.order)

    @property
    def transitions(self) -> Mapping[tuple[str, str], ChartTransition]:
        return MappingProxyType(self._transitions)

    def transition(self, source: str, target: str) -> ChartTransition:
        try:
            return self._transitions[(source, target)]
        except KeyError:
            raise MissingTransitionError(f"no transition {source}->{target}") from None

    def overlaps(self) -> list[tuple[str, str]]:
        """Directed (source, target) pairs in sorted order."""
        return list(self._transitions)

    @property
    def metadata(self) -> dict:
        out = {}
        if self.genus is not None:
            out["genus"] = self.genus
        if self.self_intersection is not None:
            out["self_intersection"] = self.self_intersection
        return out

    def replace(self, *, transitions=None, name=None, order=None, triples=None, **kw) -> "Atlas":
        """New atlas with some fields swapped (validated again)."""
        return Atlas(
            self.charts,
            self._transitions.values() if transitions is None else transitions,
            self.order if order is None else order,
            self.triples if triples is None else triples,
            self.name if name is None else name,
            kw.get("genus", self.genus),
            kw.get("self_intersection", self.self_intersection),
            complete=kw.get("complete", True),
            verify_inverses=kw.get("verify_inverses", True),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Atlas) and (
            self.name, self.n, self.m, self.order, self.charts, self._transitions,
            self.triples, self.metadata,
        ) == (
            other.name, other.n, other.m, other.order, other.charts, other._transitions,
            other.triples, other.metadata,
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"Atlas(name={self.name!r}, n={self.n}, m={self.m}, K={self.order}, "
            f"charts={list(self.chart_ids)}, overlaps={len(self._transitions)})"
        )


def _verify_pair(t: ChartTransition, back: ChartTransition) -> None:
    for first, second in ((t, back), (back, t)):
        comp = first.compose_with(second)
        if not comp.is_identity():
            raise InvertibilityError(
                f"supplied transitions {t.key} and {back.key} are not mutually inverse",
                overlap=list(first.key),
            )


def check_triple_consistency(a: Atlas, triple: Sequence[str]) -> TripleReport:
    """Check ``phi_{gamma beta} o phi_{beta alpha} = phi_{gamma alpha}``."""
    al, be, ga = triple
    t_ba = a.transition(al, be)
    t_gb = a.transition(be, ga)
    t_ga = a.transition(al, ga)
    composite = t_ba.compose_with(t_gb)
    for i, (x, y) in enumerate(zip(composite.components, t_ga.components)):
        if x != y:
            return TripleReport(tuple(triple), False, i, x - y)
    return TripleReport(tuple(triple), True)


def induced_normal_bundle_atlas(a: Atlas) -> Atlas:
    """The atlas of the normal bundle induced by ``a``.

    Normal components keep only their degree-1 part and tangential
    components only their restriction to S.
    """
    new = []
    for t in a.transitions.values():
        comps = [c.homogeneous_part(1) for c in t.normal_components]
        comps += [c.homogeneous_part(0) for c in t.tangential_components]
        new.append(ChartTransition(t.source, t.target, tuple(comps)))
    name = a.name if a.name.endswith("-normal-bundle") else a.name + "-normal-bundle"
    return a.replace(transitions=new, name=name)


def identity_atlas(normal: Sequence[str] = ("u",), tangential: Sequence[str] = ("w",), order: int = 3) -> Atlas:
    """Two charts with identical variables and identity transitions."""
    c1 = Chart("A", tuple(normal), tuple(tangential))
    c2 = Chart("B", tuple(normal), tuple(tangential))
    ring = c1.ring(order)
    t = ChartTransition(c1, c2, ring.gens)
    return Atlas([c1, c2], [t], order, name="identity")
