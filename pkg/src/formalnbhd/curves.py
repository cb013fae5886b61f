"""Guarantees for a compact curve S of genus g with self-intersection d.

All statements are degree inequalities for line bundles on S:

* the obstruction to the k-th splitting step vanishes when
  ``k*d < 4 - 4g``;
* the obstruction to the k-th comfortable step vanishes when
  ``k*d < 2 - 2g``.

They are sufficient conditions only.  A flag is therefore either
``guaranteed`` or ``inconclusive``; nothing here proves that an
obstruction survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InputError, NotApplicableError

__all__ = [
    "CurveData",
    "Flag",
    "OrderFlags",
    "Clause",
    "Thresholds",
    "TubeFlag",
    "CurveReport",
    "split_step_vanishes",
    "comfortable_step_vanishes",
    "vanishing_flags",
    "proposition_5_1",
    "proposition_5_2",
    "corollary_laufer",
    "curve_report",
]

DISCLAIMER = (
    "Applicability only: the existence of a biholomorphism between neighbourhoods "
    "is a convergence statement and is not computed here."
)


@dataclass(frozen=True)
class CurveData:
    """Genus ``g``, self-intersection ``d`` and highest reported order."""

    g: int
    d: int
    k_max: int = 6

    def __post_init__(self):
        for name in ("g", "d", "k_max"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"{name} must be an integer, got {v!r}")
        if self.g < 0:
            raise InputError(f"genus must be >= 0, got {self.g}")
        if self.k_max < 1:
            raise InputError(f"k_max must be >= 1, got {self.k_max}")


@dataclass(frozen=True)
class Flag:
    guaranteed: bool
    reason: str

    @property
    def status(self) -> str:
        return "guaranteed" if self.guaranteed else "inconclusive"

    def to_dict(self) -> dict:
        return {"status": self.status, "reason": self.reason}


@dataclass(frozen=True)
class OrderFlags:
    """Flags at one order ``k``.

    ``split_guaranteed`` and ``comfortable_guaranteed`` are cumulative
    (every step up to ``k`` vanishes); the ``*_step_*`` flags refer to the
    single step at ``k``.
    """

    k: int
    split_step_vanishes: Flag
    comfortable_step_guaranteed: Flag
    split_guaranteed: Flag
    comfortable_guaranteed: Flag
    linearizable_guaranteed: Flag

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "split_step_vanishes": self.split_step_vanishes.to_dict(),
            "comfortable_step_guaranteed": self.comfortable_step_guaranteed.to_dict(),
            "split_guaranteed": self.split_guaranteed.to_dict(),
            "comfortable_guaranteed": self.comfortable_guaranteed.to_dict(),
            "linearizable_guaranteed": self.linearizable_guaranteed.to_dict(),
        }


def split_step_vanishes(g: int, d: int, k: int) -> bool:
    return k * d < 4 - 4 * g


def comfortable_step_vanishes(g: int, d: int, k: int) -> bool:
    return k * d < 2 - 2 * g


def _ineq(k: int, d: int, bound: int) -> str:
    holds = k * d < bound
    return f"{k}*({d}) = {k * d} {'<' if holds else '>='} {bound}"


def vanishing_flags(c: CurveData, k: int) -> OrderFlags:
    """Flags at order ``k`` from the two degree inequalities."""
    if k < 1:
        raise InputError("k must be >= 1")
    g, d = c.g, c.d
    split_bound, comf_bound = 4 - 4 * g, 2 - 2 * g
    step_s = Flag(split_step_vanishes(g, d, k), _ineq(k, d, split_bound))
    step_c = Flag(comfortable_step_vanishes(g, d, k), _ineq(k, d, comf_bound))
    bad_s = [j for j in range(1, k + 1) if not split_step_vanishes(g, d, j)]
    bad_c = [j for j in range(1, k + 1) if not comfortable_step_vanishes(g, d, j)]
    split = Flag(
        not bad_s,
        f"j*d < {split_bound} for all j <= {k}" if not bad_s else f"splitting step {bad_s[0]} inconclusive",
    )
    comf = Flag(
        split.guaranteed and not bad_c,
        f"split to order {k} and j*d < {comf_bound} for all j <= {k}"
        if split.guaranteed and not bad_c
        else (split.reason if not split.guaranteed else f"comfortable step {bad_c[0]} inconclusive"),
    )
    bad_lin = [j for j in bad_c if j <= k - 1]
    lin = Flag(
        split.guaranteed and not bad_lin,
        f"{k}-split and {k - 1}-comfortable guaranteed"
        if split.guaranteed and not bad_lin
        else (split.reason if not split.guaranteed else f"comfortable step {bad_lin[0]} inconclusive"),
    )
    return OrderFlags(k, step_s, step_c, split, comf, lin)


@dataclass(frozen=True)
class Clause:
    label: str
    fired: bool
    hypothesis: str
    conclusion: str

    def to_dict(self) -> dict:
        return {"clause": self.label, "fired": self.fired, "hypothesis": self.hypothesis, "conclusion": self.conclusion}


def proposition_5_1(c: CurveData) -> list[Clause]:
    """Evaluate the five genus/self-intersection clauses literally."""
    g, d = c.g, c.d
    return [
        Clause("i", g >= 1 and d < 4 - 4 * g, "g >= 1 and d < 4-4g", "k-split for all k"),
        Clause(
            "ii",
            g >= 1 and d < 2 - 2 * g,
            "g >= 1 and d < 2-2g",
            "k-split implies k-comfortable for all k"
            + ("; with d < 4-4g: k-linearizable for all k" if d < 4 - 4 * g else ""),
        ),
        Clause("iii", g == 0 and d <= 0, "g = 0 and d <= 0", "k-linearizable for all k"),
        Clause("iv", g == 0 and d <= 1, "g = 0 and d <= 1", "3-split and 1-comfortable"),
        Clause("v", g == 0 and d <= 3, "g = 0 and d <= 3", "split"),
    ]


def fired_clauses(c: CurveData) -> list[str]:
    return [cl.label for cl in proposition_5_1(c) if cl.fired]


def linearizable_for_all_k(c: CurveData) -> bool:
    fired = set(fired_clauses(c))
    return "iii" in fired or {"i", "ii"} <= fired


@dataclass(frozen=True)
class Thresholds:
    """Orders beyond which the next obstructions vanish (negative d, g >= 1)."""

    k0_split: int
    k0_comfort: int
    k0_linearizable: int

    def to_dict(self) -> dict:
        return {
            "k0_split": self.k0_split,
            "k0_comfort": self.k0_comfort,
            "k0_linearizable": self.k0_linearizable,
            "meaning": {
                "k0_split": "k0-splitting for such k0 implies k-splitting for all k >= k0",
                "k0_comfort": "k0-comfortable for such k0 makes k-splitting imply k-comfortable for k >= k0",
                "k0_linearizable": "k0-linearizable for such k0 implies k-linearizable for all k >= k0",
            },
        }


def proposition_5_2(c: CurveData) -> Thresholds:
    """Smallest ``k0`` with ``k0 > (4g-4)/|d|`` and with ``k0 > (2g-2)/|d|``.

    Raises
    ------
    NotApplicableError
        If ``d >= 0`` or ``g = 0``.
    """
    if c.d >= 0:
        raise NotApplicableError(f"thresholds need negative self-intersection, got d={c.d}")
    if c.g < 1:
        raise NotApplicableError("thresholds are stated for genus g >= 1")
    ad = -c.d
    k_split = (4 * c.g - 4) // ad + 1
    k_comf = (2 * c.g - 2) // ad + 1
    return Thresholds(k_split, k_comf, k_split)


@dataclass(frozen=True)
class TubeFlag:
    applicable: bool
    clauses: tuple[str, ...]
    disclaimer: str = DISCLAIMER

    def to_dict(self) -> dict:
        return {"applicable": self.applicable, "clauses": list(self.clauses), "disclaimer": self.disclaimer}


def corollary_laufer(
    c: CurveData, split_order: Optional[int] = None, comfortable_order: Optional[int] = None
) -> TubeFlag:
    """Whether the neighbourhood-linearisation corollary applies.

    Parameters
    ----------
    split_order, comfortable_order : int, optional
        Orders to which the embedding is known (verified) to be split and
        comfortable; used by the clauses that need them.
    """
    g, d = c.g, c.d
    if d >= 0:
        return TubeFlag(False, ())
    ad = -d
    fired = []
    if g == 0:
        fired.append("a")
    if g >= 1 and split_order is not None and comfortable_order is not None:
        if split_order * ad > 4 * g - 4 and comfortable_order * ad > 2 * g - 2:
            fired.append("b")
    if g >= 1 and d < 4 - 4 * g:
        fired.append("c")
    if g >= 1 and d < 2 - 2 * g and split_order is not None and split_order * ad > 4 * g - 4:
        fired.append("d")
    return TubeFlag(bool(fired), tuple(fired))


@dataclass(frozen=True)
class CurveReport:
    data: CurveData
    orders: tuple[OrderFlags, ...]
    clauses: tuple[Clause, ...]
    thresholds: Optional[Thresholds]
    thresholds_note: str
    tube: TubeFlag
    summary: tuple[str, ...] = field(default=())

    @property
    def linearizable_all_k(self) -> bool:
        return linearizable_for_all_k(self.data)

    def to_dict(self) -> dict:
        return {
            "genus": self.data.g,
            "self_intersection": self.data.d,
            "k_max": self.data.k_max,
            "orders": [o.to_dict() for o in self.orders],
            "proposition_clauses": [cl.to_dict() for cl in self.clauses],
            "fired_clauses": [cl.label for cl in self.clauses if cl.fired],
            "thresholds": self.thresholds.to_dict() if self.thresholds else None,
            "thresholds_note": self.thresholds_note,
            "tube": self.tube.to_dict(),
            "summary": list(self.summary),
        }

    def to_text(self) -> str:
        lines = [f"curve: genus {self.data.g}, self-intersection {self.data.d}"]
        lines += [f"  {s}" for s in self.summary]
        for o in self.orders:
            lines.append(
                f"  k={o.k}: split {o.split_guaranteed.status}, "
                f"comfortable step {o.comfortable_step_guaranteed.status}, "
                f"linearizable {o.linearizable_guaranteed.status}"
            )
        fired = [cl.label for cl in self.clauses if cl.fired]
        lines.append(f"  clauses fired: {', '.join(fired) if fired else 'none'}")
        if self.thresholds:
            t = self.thresholds
            lines.append(f"  thresholds: k0_split={t.k0_split}, k0_comfort={t.k0_comfort}")
        else:
            lines.append(f"  thresholds: {self.thresholds_note}")
        tube = "applicable via " + ", ".join(self.tube.clauses) if self.tube.applicable else "not applicable"
        lines.append(f"  tube corollary: {tube}")
        lines.append(f"  note: {self.tube.disclaimer}")
        return "\n".join(lines)


def curve_report(
    c: CurveData, split_order: Optional[int] = None, comfortable_order: Optional[int] = None
) -> CurveReport:
    orders = tuple(vanishing_flags(c, k) for k in range(1, c.k_max + 1))
    clauses = tuple(proposition_5_1(c))
    try:
        thresholds, note = proposition_5_2(c), ""
    except NotApplicableError as exc:
        thresholds, note = None, f"not applicable ({exc.message})"
    summary = []
    split_upto = 0
    for o in orders:
        if not o.split_guaranteed.guaranteed:
            break
        split_upto = o.k
    if linearizable_for_all_k(c):
        summary.append("linearizable guaranteed for all k")
    elif split_upto == c.k_max:
        summary.append(f"split guaranteed for all k <= {c.k_max}")
    elif split_upto:
        summary.append(f"split guaranteed up to k = {split_upto}, inconclusive beyond")
    else:
        summary.append("splitting inconclusive")
    return CurveReport(c, orders, clauses, thresholds, note, corollary_laufer(c, split_order, comfortable_order), tuple(summary))
