"""Embedding conditions, obstruction cocycles and normalisation.

Everything here is computed from transition series alone.

Index conventions
-----------------
* A cocycle stores, for every directed transition ``alpha -> beta``, the
  key ``(beta, alpha)`` (target, source) and a map
  ``(target_index, multi_index) -> coefficient``.  Coefficients are rational
  functions of the tangential variables of ``alpha``.
* ``target_index`` is a 0-based tangential index (S and G kinds), a 0-based
  normal index (H kind) or a pair ``(a, d)`` of frame indices (CONN kind).
* ``multi_index`` is a sorted tuple of 0-based normal indices; the stored
  value is the coefficient of the corresponding monomial, so factorial
  factors are already included.
* Frames: ``"alpha"`` means the multi-index refers to normal variables of
  ``alpha``; ``"beta"`` (only for the G kind) means it refers to normal
  variables of ``beta`` while the coefficients are still pulled back to
  ``alpha``.

With these conventions the coboundary of a cochain ``X`` reads

    c_{beta alpha} = X_alpha - T_{beta alpha}(X_beta)

where ``T`` pulls coefficients back along S, substitutes the restricted
normal Jacobian ``z_beta = a z_alpha`` and maps the vector part with the
inverse restricted Jacobian (tangential for G, normal for H).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

from .atlas import Atlas, ChartTransition
from .errors import (
    KindMismatchError,
    NonInvertibleFrameError,
    NotNormalizableError,
    OrderError,
    SchemaError,
    TruncationInsufficientError,
    InputError,
)
from .rational import determinant, format_rational, inverse_matrix
from .series import (
    ABOVE_K,
    SeriesRing,
    TruncatedSeries,
    compose,
    exponents_to_indices,
    indices_to_exponents,
)

__all__ = [
    "CocycleKind",
    "CochainRole",
    "Witness",
    "CheckReport",
    "ObstructionCocycle",
    "Cochain",
    "CoboundaryReport",
    "check_splitting_atlas",
    "check_k_splitting_atlas",
    "check_k_comfortable_atlas",
    "check_k_linearizable",
    "check_condition",
    "cocycle_s",
    "cocycle_g",
    "cocycle_h",
    "cocycle_connection",
    "induced_normal_frames",
    "symmetrize_connection",
    "to_alpha_frame",
    "transport",
    "coboundary",
    "verify_coboundary",
    "check_cocycle_law",
    "normalize_splitting",
    "normalize_comfortable",
    "load_cochain",
    "dump_cochain",
]


class CocycleKind(str, Enum):
    S = "s"
    G = "g"
    H = "h"
    CONN = "conn"


class CochainRole(str, Enum):
    SPLIT = "split"
    COMFORT = "comfort"


# -- reports ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Witness:
    """An offending derivative on one overlap."""

    overlap: tuple[str, str]
    derivative: str
    normal_order: object
    required: int
    leading: str = ""

    def to_dict(self) -> dict:
        return {
            "overlap": {"from": self.overlap[0], "to": self.overlap[1]},
            "derivative": self.derivative,
            "normal_order": "AboveK" if self.normal_order is ABOVE_K else self.normal_order,
            "required": self.required,
            "leading_term": self.leading,
        }


@dataclass(frozen=True)
class CheckReport:
    condition: str
    order: int
    passed: bool
    witnesses: tuple[Witness, ...] = ()

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "k": self.order,
            "verdict": "pass" if self.passed else "fail",
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def _leading(series: TruncatedSeries) -> str:
    order = series.normal_order()
    return series.homogeneous_part(order).to_text() if order is not ABOVE_K else "0"


def _split_witnesses(a: Atlas, k: int) -> list[Witness]:
    out = []
    for key, t in a.transitions.items():
        for q, comp in enumerate(t.tangential_components):
            for r in range(t.m):
                d = comp.derive(r)
                o = d.normal_order()
                if o < k:
                    out.append(Witness(
                        key, f"d {t.target.tangential[q]} / d {t.source.normal[r]}", o, k, _leading(d)
                    ))
    return out


def _comfort_witnesses(a: Atlas, k: int) -> list[Witness]:
    out = []
    for key, t in a.transitions.items():
        for r, comp in enumerate(t.normal_components):
            for s1 in range(t.m):
                d1 = comp.derive(s1)
                for s2 in range(s1, t.m):
                    d = d1.derive(s2)
                    o = d.normal_order()
                    if o < k:
                        out.append(Witness(
                            key,
                            f"d^2 {t.target.normal[r]} / d {t.source.normal[s1]} d {t.source.normal[s2]}",
                            o, k, _leading(d),
                        ))
    return out


def _check_k(k, lo: int, hi: int, what: str, K: int) -> int:
    if isinstance(k, bool) or int(k) != k:
        raise InputError(f"order k must be an integer, got {k!r}")
    k = int(k)
    if k < lo:
        raise InputError(f"{what} needs k >= {lo}, got {k}")
    if k > hi:
        raise TruncationInsufficientError(
            f"{what} at k={k} needs a larger truncation order (K={K} allows k <= {hi})", k=k, K=K
        )
    return k


def check_splitting_atlas(a: Atlas) -> CheckReport:
    """Pass iff every tangential-by-normal derivative vanishes on S."""
    w = _split_witnesses(a, 1)
    return CheckReport("split", 1, not w, tuple(w))


def check_k_splitting_atlas(a: Atlas, k: int) -> CheckReport:
    """Pass iff ``d z_beta^p / d z_alpha^r`` has normal order >= k everywhere."""
    k = _check_k(k, 1, a.K - 1, "k-splitting check", a.K)
    w = _split_witnesses(a, k)
    return CheckReport("ksplit", k, not w, tuple(w))


def check_k_comfortable_atlas(a: Atlas, k: int) -> CheckReport:
    """k-splitting plus second normal derivatives of normal components in I^k."""
    k = _check_k(k, 1, a.K - 2, "k-comfortable check", a.K)
    w = _split_witnesses(a, k) + _comfort_witnesses(a, k)
    return CheckReport("comfortable", k, not w, tuple(w))


def check_k_linearizable(a: Atlas, k: int) -> CheckReport:
    """k-splitting and (k-1)-comfortable; ``k = 1`` is the splitting check."""
    if k == 1:
        rep = check_splitting_atlas(a)
        return CheckReport("linearizable", 1, rep.passed, rep.witnesses)
    k = _check_k(k, 1, a.K - 1, "k-linearizable check", a.K)
    w = _split_witnesses(a, k) + _comfort_witnesses(a, k - 1)
    return CheckReport("linearizable", k, not w, tuple(w))


def check_condition(a: Atlas, condition: str, k: int = 1) -> CheckReport:
    """Dispatch on ``condition`` in {split, ksplit, comfortable, linearizable}."""
    if condition == "split":
        return check_splitting_atlas(a)
    if condition == "ksplit":
        return check_k_splitting_atlas(a, k)
    if condition == "comfortable":
        return check_k_comfortable_atlas(a, k)
    if condition == "linearizable":
        return check_k_linearizable(a, k)
    raise InputError(f"unknown condition {condition!r}")


# -- cocycle and cochain values -------------------------------------------------------------
Coefficients = Mapping[tuple, object]


def _freeze(d: Mapping) -> Mapping:
    return MappingProxyType(dict(sorted(d.items(), key=lambda kv: repr(kv[0]))))


@dataclass(frozen=True, eq=False)
class ObstructionCocycle:
    """Per-overlap coefficient tensors of an obstruction cocycle."""

    kind: CocycleKind
    order: int
    values: Mapping[tuple[str, str], Coefficients]
    frame: str = "alpha"

    def __post_init__(self):
        object.__setattr__(self, "kind", CocycleKind(self.kind))
        vals = {
            key: _freeze({k: v for k, v in coeffs.items() if v})
            for key, coeffs in sorted(self.values.items())
        }
        object.__setattr__(self, "values", MappingProxyType(vals))

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def overlap(self, target: str, source: str) -> Coefficients:
        return self.values[(target, source)]

    def coefficient(self, target: str, source: str, index, multi_index) -> object:
        coeffs = self.values[(target, source)]
        return coeffs.get((index, tuple(sorted(multi_index))))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ObstructionCocycle)
            and (self.kind, self.order, self.frame) == (other.kind, other.order, other.frame)
            and {k: dict(v) for k, v in self.values.items()} == {k: dict(v) for k, v in other.values.items()}
        )

    __hash__ = None

    def to_dict(self, a: Atlas) -> dict:
        overlaps = []
        for (tgt, src), coeffs in self.values.items():
            alpha, beta = a.chart(src), a.chart(tgt)
            mono_names = beta.normal if self.frame == "beta" else alpha.normal
            rows = []
            for (index, multi), value in coeffs.items():
                if self.kind in (CocycleKind.S, CocycleKind.G):
                    target = alpha.tangential[index]
                elif self.kind == CocycleKind.H:
                    target = alpha.normal[index]
                else:
                    target = list(index)
                rows.append({
                    "target": target,
                    "monomial": [mono_names[i] for i in multi],
                    "value": format_rational(value),
                })
            rows.sort(key=lambda r: (json.dumps(r["target"]), r["monomial"]))
            overlaps.append({"from": src, "to": tgt, "coefficients": rows})
        return {
            "kind": self.kind.value,
            "order": self.order,
            "frame": self.frame,
            "zero": self.is_zero(),
            "overlaps": overlaps,
        }


@dataclass(frozen=True, eq=False)
class Cochain:
    """Per-chart primitive: ``(s_alpha)`` (SPLIT) or ``(c_alpha)`` (COMFORT).

    ``order`` is the length of the multi-indices: ``k`` for a splitting
    primitive at order ``k`` and ``k + 1`` for a comfortable primitive.
    """

    role: CochainRole
    order: int
    values: Mapping[str, Coefficients]

    def __post_init__(self):
        object.__setattr__(self, "role", CochainRole(self.role))
        vals = {cid: _freeze({k: v for k, v in c.items() if v}) for cid, c in sorted(self.values.items())}
        for cid, coeffs in vals.items():
            for (_, multi) in coeffs:
                if len(multi) != self.order or tuple(sorted(multi)) != tuple(multi):
                    raise SchemaError(f"cochain on {cid!r}: multi-index {multi} is not sorted of length {self.order}")
        object.__setattr__(self, "values", MappingProxyType(vals))

    @classmethod
    def zero(cls, a: Atlas, role, order: int) -> "Cochain":
        return cls(role, order, {cid: {} for cid in a.chart_ids})

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def chart_values(self, chart_id: str) -> Coefficients:
        return self.values.get(chart_id, {})

    def with_value(self, chart_id: str, index: int, multi_index, value) -> "Cochain":
        vals = {cid: dict(c) for cid, c in self.values.items()}
        vals.setdefault(chart_id, {})[(index, tuple(sorted(multi_index)))] = value
        return Cochain(self.role, self.order, vals)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cochain)
            and (self.role, self.order) == (other.role, other.order)
            and {k: dict(v) for k, v in self.values.items() if v}
            == {k: dict(v) for k, v in other.values.items() if v}
        )

    __hash__ = None

    def to_dict(self, a: Atlas) -> dict:
        charts = {}
        for cid, coeffs in self.values.items():
            ch = a.chart(cid)
            names = ch.tangential if self.role == CochainRole.SPLIT else ch.normal
            rows = [
                {"target": names[index], "monomial": [ch.normal[i] for i in multi], "value": format_rational(v)}
                for (index, multi), v in coeffs.items()
            ]
            rows.sort(key=lambda r: (r["target"], r["monomial"]))
            charts[cid] = rows
        return {"role": self.role.value, "order": self.order, "charts": charts}


def load_cochain(source, a: Atlas) -> Cochain:
    """Read a cochain document (path, bytes or mapping) against atlas ``a``."""
    from .exprparse import _read_source, parse_in_ring

    obj = _read_source(source)
    if not isinstance(obj, dict) or set(obj) != {"role", "order", "charts"}:
        raise SchemaError("cochain document needs exactly 'role', 'order' and 'charts'")
    try:
        role = CochainRole(obj["role"])
    except ValueError:
        raise SchemaError(f"unknown cochain role {obj['role']!r}") from None
    order = obj["order"]
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise SchemaError("cochain 'order' must be a positive integer")
    if not isinstance(obj["charts"], dict):
        raise SchemaError("cochain 'charts' must be an object keyed by chart id")
    values = {}
    for cid, rows in obj["charts"].items():
        ch = a.chart(cid)
        ring = a.ring(cid)
        names = ch.tangential if role == CochainRole.SPLIT else ch.normal
        if not isinstance(rows, list):
            raise SchemaError(f"cochain entries for {cid!r} must be a list")
        coeffs: dict = {}
        for j, row in enumerate(rows):
            if not isinstance(row, dict) or set(row) != {"target", "monomial", "value"}:
                raise SchemaError(f"cochain {cid!r} entry {j} needs 'target', 'monomial', 'value'")
            if row["target"] not in names:
                raise SchemaError(f"cochain {cid!r} entry {j}: target must be one of {list(names)}")
            mono = row["monomial"]
            if not isinstance(mono, list) or len(mono) != order or any(x not in ch.normal for x in mono):
                raise SchemaError(f"cochain {cid!r} entry {j}: monomial must list {order} normal names")
            if not isinstance(row["value"], str):
                raise SchemaError(f"cochain {cid!r} entry {j}: value must be an expression string")
            try:
                s = parse_in_ring(row["value"], ring)
            except InputError as exc:
                exc.message = f"cochain {cid!r} entry {j}: {exc.message}"
                exc.args = (exc.message,)
                raise
            if s.normal_order() != 0 and s:
                raise SchemaError(f"cochain {cid!r} entry {j}: value may only use tangential variables")
            if len(s.terms) > 1:
                raise SchemaError(f"cochain {cid!r} entry {j}: value may only use tangential variables")
            key = (names.index(row["target"]), tuple(sorted(ch.normal.index(x) for x in mono)))
            coeffs[key] = coeffs.get(key, ring.field.zero) + s.restrict_to_S()
        values[cid] = coeffs
    return Cochain(role, order, values)


def dump_cochain(p: Cochain, a: Atlas) -> str:
    return json.dumps(p.to_dict(a), indent=2, sort_keys=True) + "\n"


# -- polynomial views -----------------------------------------------------------------------
def _polys(coeffs: Coefficients, ring: SeriesRing) -> dict:
    out: dict = {}
    for (index, multi), value in coeffs.items():
        term = ring.monomial(indices_to_exponents(multi, ring.m), value)
        out[index] = out[index] + term if index in out else term
    return out


def _coeffs(polys: Mapping, degree: int) -> dict:
    out = {}
    for index, poly in polys.items():
        for key, value in poly.terms.items():
            if sum(key) == degree and value:
                out[(index, exponents_to_indices(key))] = value
    return out


def _linear_substitution(t: ChartTransition) -> list[TruncatedSeries]:
    """``z_beta = a z_alpha`` and ``w_beta = R(w_alpha)`` as series in alpha."""
    ring = t.source_ring
    a = t.normal_jacobian_on_S()
    gens = ring.gens
    normal = [sum((gens[s] * a[r][s] for s in range(t.m) if a[r][s]), ring.zero) for r in range(t.m)]
    return normal + [ring.constant(x) for x in t.tangential_map_on_S()]


def transport(values: Coefficients, t: ChartTransition, kind: CocycleKind) -> dict:
    """Move a beta-chart coefficient tensor to the alpha chart of ``t``."""
    kind = CocycleKind(kind)
    beta_ring = t.target_ring
    lin = _linear_substitution(t)
    moved = {i: compose(p, lin) for i, p in _polys(values, beta_ring).items()}
    if kind in (CocycleKind.G, CocycleKind.S):
        M = inverse_matrix(t.tangential_jacobian_on_S(), t.source_ring.field)
    elif kind == CocycleKind.H:
        M = inverse_matrix(t.normal_jacobian_on_S(), t.source_ring.field)
    else:
        raise KindMismatchError("transport is defined for S, G and H kinds")
    ring = t.source_ring
    out = {}
    for p in range(len(M)):
        acc = ring.zero
        for q, poly in moved.items():
            if M[p][q]:
                acc = acc + poly * M[p][q]
        if acc:
            out[p] = acc
    degree = len(next(iter(values))[1]) if values else 0
    return _coeffs(out, degree)


def _sub(x: Coefficients, y: Coefficients) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out[k] - v if k in out else -v
    return {k: v for k, v in out.items() if v}


def _add(x: Coefficients, y: Coefficients) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if v}


# -- cocycles ----------------------------------------------------------------------------------
def cocycle_s(a: Atlas) -> ObstructionCocycle:
    """The splitting cocycle, coefficient at ``(p; s)``::

        -sum_r  d z_beta^r/d z_alpha^s * (d z_alpha^p/d z_beta^r o phi)   on S
    """
    values = {}
    for (src, dst), t in a.transitions.items():
        inv = a.transition(dst, src)
        m = t.m
        coeffs = {}
        for p, comp in enumerate(inv.tangential_components):
            for s in range(m):
                total = t.source_ring.field.zero
                for r in range(m):
                    f1 = t.normal_components[r].derive(s).restrict_to_S()
                    if not f1:
                        continue
                    f2 = comp.derive(r).restrict_to_S()
                    if f2:
                        total += f1 * t.pullback(f2)
                coeffs[(p, (s,))] = -total
        values[(dst, src)] = coeffs
    return ObstructionCocycle(CocycleKind.S, 1, values)


def cocycle_g(a: Atlas, k: int, frame: str = "beta") -> ObstructionCocycle:
    """Obstruction to passing from (k-1)- to k-splitting.

    Coefficients are ``-(1/k!) d^k z_alpha^p / d z_beta^{r_1..r_k}`` on S,
    read off the degree-k part of the inverse transition and pulled back to
    the tangential variables of ``alpha``.  With ``frame="alpha"`` the
    monomials are rewritten in ``alpha`` normal variables through
    ``z_beta = a z_alpha``.

    Raises
    ------
    OrderError
        The atlas is not (k-1)-splitting.
    """
    k = _check_k(k, 1, a.K - 1, "cocycle_g", a.K)
    if frame not in ("alpha", "beta"):
        raise InputError(f"frame must be 'alpha' or 'beta', got {frame!r}")
    if k >= 2:
        rep = check_k_splitting_atlas(a, k - 1)
        if not rep.passed:
            raise OrderError(f"cocycle_g at k={k} needs a {k - 1}-splitting atlas", **rep.to_dict())
    values = {}
    for (src, dst), t in a.transitions.items():
        inv = a.transition(dst, src)
        parts = {p: c.homogeneous_part(k) for p, c in enumerate(inv.tangential_components)}
        if frame == "alpha":
            lin = _linear_substitution(t)
            values[(dst, src)] = {
                key: -v for key, v in _coeffs({p: compose(c, lin) for p, c in parts.items()}, k).items()
            }
        else:
            values[(dst, src)] = {
                (p, exponents_to_indices(key)): -t.pullback(v)
                for p, c in parts.items()
                for key, v in c.terms.items()
            }
    return ObstructionCocycle(CocycleKind.G, k, values, frame)


def cocycle_h(a: Atlas, k: int) -> ObstructionCocycle:
    """Obstruction to passing from (k-1)- to k-comfortable (on a k-splitting atlas).

    Coefficient at ``(t; r_1..r_{k+1})`` is the monomial coefficient of
    ``-C^t(a z_alpha)``, where ``C^t`` is the degree-(k+1) part of the
    inverse transition's normal component ``t`` with coefficients pulled
    back to ``alpha``.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InputError(f"cocycle_h needs an integer k >= 1, got {k!r}")
    if k + 1 > a.K - 1:
        raise TruncationInsufficientError(
            f"cocycle_h at k={k} needs K >= {k + 2}, atlas has K={a.K}", k=k, K=a.K
        )
    rep = check_k_splitting_atlas(a, k)
    if not rep.passed:
        raise OrderError(f"cocycle_h at k={k} needs a {k}-splitting atlas", **rep.to_dict())
    if k >= 2:
        rep = check_k_comfortable_atlas(a, k - 1)
        if not rep.passed:
            raise OrderError(f"cocycle_h at k={k} needs a {k - 1}-comfortable atlas", **rep.to_dict())
    values = {}
    for (src, dst), t in a.transitions.items():
        inv = a.transition(dst, src)
        lin = _linear_substitution(t)
        polys = {r: compose(c.homogeneous_part(k + 1), lin) for r, c in enumerate(inv.normal_components)}
        values[(dst, src)] = {key: -v for key, v in _coeffs(polys, k + 1).items()}
    return ObstructionCocycle(CocycleKind.H, k, values)


def induced_normal_frames(a: Atlas) -> dict:
    """Default frames ``Phi[(alpha, beta)][d][c] = [d z_beta^d / d z_alpha^c]_2``."""
    frames = {}
    for key, t in a.transitions.items():
        frames[key] = [[comp.derive(c).truncate(1) for c in range(t.m)] for comp in t.normal_components]
    return frames


def cocycle_connection(a: Atlas, frames: Optional[Mapping] = None) -> ObstructionCocycle:
    """Obstruction to an infinitesimal normal connection for the given frames.

    Parameters
    ----------
    frames : mapping, optional
        ``frames[(src, dst)]`` is a square matrix (list of rows) of series
        in the variables of ``src``, with ``e_{b,src} = sum_d
        frames[(src, dst)][d][b] e_{d,dst}``.  Defaults to
        :func:`induced_normal_frames`.

    Returns
    -------
    ObstructionCocycle
        Kind CONN; the coefficient at ``((a, d); (r,))`` on ``(beta, alpha)``
        is ``sum_c Phi_{beta alpha}[c][a] * d Phi_{alpha beta}[d][c] / d z_alpha^r``
        restricted to S.
    """
    if a.K < 2:
        raise TruncationInsufficientError("cocycle_connection needs K >= 2", K=a.K)
    if frames is None:
        frames = induced_normal_frames(a)
    size = None
    for key, t in a.transitions.items():
        if key not in frames:
            raise NonInvertibleFrameError(f"no frame matrix for overlap {key}")
        mat = frames[key]
        ring = t.source_ring
        if size is None:
            size = len(mat)
        if len(mat) != size or any(len(row) != size for row in mat):
            raise NonInvertibleFrameError(f"frame matrix on {key} is not {size}x{size}")
        if any(not isinstance(x, TruncatedSeries) or x.ring != ring for row in mat for x in row):
            raise NonInvertibleFrameError(f"frame entries on {key} must be series in chart {key[0]!r}")
        if not determinant([[x.restrict_to_S() for x in row] for row in mat], ring.field):
            raise NonInvertibleFrameError(f"frame matrix on {key} is not invertible on S", overlap=list(key))
    values = {}
    for (src, dst), t in a.transitions.items():
        fwd = frames[(src, dst)]
        back = [[t.pullback(x.restrict_to_S()) for x in row] for row in frames[(dst, src)]]
        coeffs = {}
        for r in range(t.m):
            dfwd = [[x.derive(r).restrict_to_S() for x in row] for row in fwd]
            for ai in range(size):
                for d in range(size):
                    total = t.source_ring.field.zero
                    for c in range(size):
                        if back[c][ai] and dfwd[d][c]:
                            total += back[c][ai] * dfwd[d][c]
                    coeffs[((ai, d), (r,))] = total
        values[(dst, src)] = coeffs
    return ObstructionCocycle(CocycleKind.CONN, 1, values)


def symmetrize_connection(delta: ObstructionCocycle, a: Atlas) -> ObstructionCocycle:
    """Symmetrised part of a CONN cocycle for the default normal frames.

    The frame indices are moved to the ``alpha`` chart with the restricted
    normal Jacobian, giving a tensor ``D^t_{ur}``; the result holds the
    monomial coefficients of ``(1/2) sum_{u,r} D^t_{ur} z^u z^r`` as an H
    cocycle of order 1.  The factor 1/2 matches the 1/(k+1)! normalisation
    of the H kind.
    """
    if delta.kind != CocycleKind.CONN:
        raise KindMismatchError("symmetrize_connection needs a CONN cocycle")
    values = {}
    for (dst, src), coeffs in delta.values.items():
        t = a.transition(src, dst)
        field_ = t.source_ring.field
        jac = t.normal_jacobian_on_S()
        jinv = inverse_matrix(jac, field_)
        m = t.m
        out: dict = {}
        for tt in range(m):
            for u in range(m):
                for r in range(m):
                    total = field_.zero
                    for (ai, d), multi in coeffs:
                        if multi != (r,):
                            continue
                        val = coeffs[((ai, d), multi)]
                        total += jinv[tt][d] * val * jac[ai][u]
                    if total:
                        key = (tt, tuple(sorted((u, r))))
                        out[key] = out.get(key, field_.zero) + total / 2
        values[(dst, src)] = out
    return ObstructionCocycle(CocycleKind.H, 1, values)


def to_alpha_frame(c: ObstructionCocycle, a: Atlas) -> ObstructionCocycle:
    """Rewrite a beta-frame G cocycle in alpha normal monomials."""
    if c.frame == "alpha":
        return c
    values = {}
    for (dst, src), coeffs in c.values.items():
        t = a.transition(src, dst)
        alpha_ring = t.source_ring
        helper = SeriesRing(
            tuple(f"_z{i}" for i in range(a.m)), alpha_ring.tangential, a.K
        )
        lin = _linear_substitution(t)
        subst = lin[: a.m] + list(alpha_ring.gens[a.m:])
        polys = {i: compose(p, subst) for i, p in _polys(coeffs, helper).items()}
        values[(dst, src)] = _coeffs(polys, c.order)
    return ObstructionCocycle(c.kind, c.order, values, "alpha")


# -- coboundaries ---------------------------------------------------------------------------------
@dataclass(frozen=True)
class CoboundaryReport:
    passed: bool
    overlap: Optional[tuple[str, str]] = None
    target: Optional[int] = None
    multi_index: Optional[tuple[int, ...]] = None
    expected: object = None
    actual: object = None

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self, a: Optional[Atlas] = None) -> dict:
        out: dict = {"verdict": "pass" if self.passed else "fail"}
        if not self.passed:
            src, dst = self.overlap
            out["witness"] = {
                "overlap": {"from": src, "to": dst},
                "target": self.target,
                "multi_index": list(self.multi_index),
                "cocycle_value": format_rational(self.actual),
                "coboundary_value": format_rational(self.expected),
            }
        return out


def _matching_kind(c: ObstructionCocycle, p: Cochain) -> CocycleKind:
    if c.kind in (CocycleKind.G, CocycleKind.S):
        if p.role != CochainRole.SPLIT or p.order != c.order:
            raise KindMismatchError(
                f"{c.kind.value}-cocycle of order {c.order} needs a split cochain of order {c.order}",
                cochain_role=p.role.value, cochain_order=p.order,
            )
        return CocycleKind.G
    if c.kind == CocycleKind.H:
        if p.role != CochainRole.COMFORT or p.order != c.order + 1:
            raise KindMismatchError(
                f"h-cocycle of order {c.order} needs a comfort cochain of order {c.order + 1}",
                cochain_role=p.role.value, cochain_order=p.order,
            )
        return CocycleKind.H
    raise KindMismatchError("coboundaries are only defined for s, g and h cocycles")


def coboundary(p: Cochain, a: Atlas) -> ObstructionCocycle:
    """The cocycle ``X_alpha - T(X_beta)`` generated by a cochain."""
    kind = CocycleKind.G if p.role == CochainRole.SPLIT else CocycleKind.H
    order = p.order if kind == CocycleKind.G else p.order - 1
    values = {}
    for (src, dst), t in a.transitions.items():
        values[(dst, src)] = _sub(p.chart_values(src), transport(p.chart_values(dst), t, kind))
    return ObstructionCocycle(kind, order, values)


def verify_coboundary(c: ObstructionCocycle, p: Cochain, a: Atlas) -> CoboundaryReport:
    """Check that ``p`` is a primitive of ``c`` on every overlap."""
    kind = _matching_kind(c, p)
    if kind == CocycleKind.G:
        c = to_alpha_frame(c, a)
    for (src, dst), t in a.transitions.items():
        expected = _sub(p.chart_values(src), transport(p.chart_values(dst), t, kind))
        actual = dict(c.values.get((dst, src), {}))
        for key in sorted(set(expected) | set(actual)):
            zero = t.source_ring.field.zero
            e, v = expected.get(key, zero), actual.get(key, zero)
            if e != v:
                return CoboundaryReport(False, (src, dst), key[0], key[1], e, v)
    return CoboundaryReport(True)


def check_cocycle_law(c: ObstructionCocycle, a: Atlas, triple: Sequence[str]) -> CoboundaryReport:
    """Check ``c_{gamma alpha} = c_{beta alpha} + T_{beta alpha}(c_{gamma beta})``."""
    if c.kind == CocycleKind.CONN:
        raise KindMismatchError("the transformation law is checked for s, g and h cocycles")
    if c.kind == CocycleKind.G:
        c = to_alpha_frame(c, a)
    al, be, ga = triple
    t_ab = a.transition(al, be)
    lhs = dict(c.values[(ga, al)])
    rhs = _add(c.values[(be, al)], transport(c.values[(ga, be)], t_ab, c.kind))
    zero = t_ab.source_ring.field.zero
    for key in sorted(set(lhs) | set(rhs)):
        if lhs.get(key, zero) != rhs.get(key, zero):
            return CoboundaryReport(False, (al, ga), key[0], key[1], rhs.get(key, zero), lhs.get(key, zero))
    return CoboundaryReport(True)


# -- normalisation ----------------------------------------------------------------------------------
def _chart_change(a: Atlas, chart_id: str, coeffs: Coefficients, role: CochainRole):
    """Coordinate change ``z -> z + N(z)`` and its inverse on one chart."""
    ring = a.ring(chart_id)
    gens = list(ring.gens)
    offset = ring.m if role == CochainRole.SPLIT else 0
    shift = {}
    for i, poly in _polys(coeffs, ring).items():
        shift[offset + i] = poly
    if not shift:
        return None
    psi = [g + shift[i] if i in shift else g for i, g in enumerate(gens)]
    inv = list(gens)
    for _ in range(ring.order + 1):
        inv = [g - compose(shift[i], inv) if i in shift else g for i, g in enumerate(gens)]
    assert all(compose(x, inv) == g for x, g in zip(psi, gens)), "chart change inversion failed"
    return psi, inv


def _conjugate(a: Atlas, p: Cochain) -> Atlas:
    changes = {cid: _chart_change(a, cid, p.chart_values(cid), p.role) for cid in a.chart_ids}
    if not any(changes.values()):
        return a
    new = []
    for (src, dst), t in a.transitions.items():
        comps = list(t.components)
        if changes[dst] is not None:
            comps = [compose(c, comps) for c in changes[dst][0]]
        if changes[src] is not None:
            comps = [compose(c, changes[src][1]) for c in comps]
        new.append(ChartTransition(t.source, t.target, tuple(comps)))
    return a.replace(transitions=new, verify_inverses=False)


def apply_chart_changes(a: Atlas, p: Cochain) -> Atlas:
    """Conjugate every transition by the chart changes ``z -> z + X_alpha z^I``.

    No precondition is checked; normalisation functions call this after
    verifying the cochain.
    """
    return _conjugate(a, p)


def normalize_splitting(a: Atlas, p: Cochain) -> Atlas:
    """Remove the order-k splitting obstruction with the primitive ``p``.

    Each chart gets ``w^p -> w^p + sum_I (s_alpha)^p_I(w) z^I``; transitions
    are conjugated accordingly.  The result is k-splitting.

    Raises
    ------
    KindMismatchError
        ``p`` is not a split cochain.
    NotNormalizableError
        ``p`` is not a primitive of ``cocycle_g(a, k)``.
    """
    if p.role != CochainRole.SPLIT:
        raise KindMismatchError("normalize_splitting needs a split cochain", cochain_role=p.role.value)
    k = p.order
    c = cocycle_g(a, k, frame="alpha")
    rep = verify_coboundary(c, p, a)
    if not rep.passed:
        raise NotNormalizableError(
            f"cochain does not bound the order-{k} splitting cocycle", **rep.to_dict(a)
        )
    return _conjugate(a, p)


def normalize_comfortable(a: Atlas, p: Cochain) -> Atlas:
    """Remove the order-k comfortable obstruction with a primitive of order k+1.

    Each chart gets ``z^r -> z^r + sum_I (c_alpha)^r_I(w) z^I``.  The result
    is k-comfortable and still k-splitting.
    """
    if p.role != CochainRole.COMFORT:
        raise KindMismatchError("normalize_comfortable needs a comfort cochain", cochain_role=p.role.value)
    k = p.order - 1
    if k < 1:
        raise KindMismatchError("a comfort cochain needs order >= 2", cochain_order=p.order)
    c = cocycle_h(a, k)
    rep = verify_coboundary(c, p, a)
    if not rep.passed:
        raise NotNormalizableError(
            f"cochain does not bound the order-{k} comfortable cocycle", **rep.to_dict(a)
        )
    return _conjugate(a, p)
