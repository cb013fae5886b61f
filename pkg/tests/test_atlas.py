"""Charts, transitions, inversion and the induced normal bundle atlas."""

from __future__ import annotations

import pytest

from formalnbhd import gallery
from formalnbhd.atlas import (
    Atlas,
    Chart,
    ChartTransition,
    check_triple_consistency,
    identity_atlas,
    induced_normal_bundle_atlas,
    invert_transition,
)
from formalnbhd.errors import (
    AdaptednessError,
    InvertibilityError,
    MissingTransitionError,
    NeedsInverseError,
    SchemaError,
    TripleInconsistencyError,
)
from formalnbhd.obstructions import check_k_comfortable_atlas, check_k_splitting_atlas

A = Chart("A", ("u",), ("v",))
B = Chart("B", ("t",), ("s",))


def blowup_transition(K=4):
    u, v = A.ring(K).gens
    return ChartTransition(A, B, (u * v, 1 / v))


class TestInvert:
    def test_identity(self):
        a = identity_atlas()
        t = a.transition("A", "B")
        inv = invert_transition(t)
        assert inv.is_identity()

    def test_blowup(self):
        inv = invert_transition(blowup_transition())
        t, s = B.ring(4).gens
        assert inv.components == (s * t, 1 / s)

    def test_composition_is_identity(self):
        fwd = gallery.generate("conic-P2", K=4).transition("Z", "X")
        inv = invert_transition(fwd)
        assert fwd.compose_with(inv).is_identity()
        assert inv.compose_with(fwd).is_identity()

    def test_singular_normal_jacobian(self):
        u, v = A.ring(3).gens
        with pytest.raises(InvertibilityError):
            ChartTransition(A, B, (u**2, v)).validate()
        with pytest.raises(InvertibilityError):
            invert_transition(ChartTransition(A, B, (u**2, v)))

    def test_singular_tangential_jacobian(self):
        u, v = A.ring(3).gens
        with pytest.raises(InvertibilityError):
            invert_transition(ChartTransition(A, B, (u, A.ring(3).constant(2))))

    def test_non_adapted(self):
        u, v = A.ring(3).gens
        with pytest.raises(AdaptednessError):
            ChartTransition(A, B, (u + 1, v)).validate()

    @pytest.mark.parametrize("K", [1, 2, 4])
    def test_involution(self, K):
        u, v = A.ring(K).gens
        t = ChartTransition(A, B, (u * v + u**2 / (1 + v), (2 * v + 1) / (v + 3) + u * v))
        inv = invert_transition(t)
        assert invert_transition(inv).components == t.components

    def test_needs_inverse(self):
        u, v = A.ring(3).gens
        t = ChartTransition(A, B, (u, v**3 + v))
        with pytest.raises(NeedsInverseError):
            invert_transition(t)

    def test_candidate_inverse(self):
        # triangular tangential map (v1, v2) -> (v1, v2 + v1^2): rational
        # inverse, but not of a closed form the inverter knows
        C = Chart("C", ("u",), ("v1", "v2"))
        D = Chart("D", ("x",), ("y1", "y2"))
        u, v1, v2 = C.ring(3).gens
        fwd = ChartTransition(C, D, (u * (1 + v2) + u**2, v1 + u, v2 + v1**2))
        with pytest.raises(NeedsInverseError):
            invert_transition(fwd)
        x, y1, y2 = D.ring(3).gens
        cand = ChartTransition(D, C, (x, y1, y2 - y1**2))
        inv = invert_transition(fwd, candidate=cand)
        assert fwd.compose_with(inv).is_identity()
        assert inv.compose_with(fwd).is_identity()
        wrong = ChartTransition(D, C, (x, y1, y2 + y1**2))
        with pytest.raises(InvertibilityError):
            invert_transition(fwd, candidate=wrong)


class TestAtlas:
    def test_auto_inverse(self):
        a = Atlas([A, B], [blowup_transition()], 4)
        assert set(a.overlaps()) == {("A", "B"), ("B", "A")}

    def test_missing_reverse(self):
        with pytest.raises(MissingTransitionError):
            Atlas([A, B], [blowup_transition()], 4, complete=False)

    def test_mismatched_pair(self):
        t, s = B.ring(4).gens
        with pytest.raises(InvertibilityError):
            Atlas([A, B], [blowup_transition(), ChartTransition(B, A, (t, s))], 4)

    def test_duplicate_ids(self):
        with pytest.raises(SchemaError):
            Atlas([A, A], [], 3)

    def test_order_mismatch(self):
        with pytest.raises(SchemaError):
            Atlas([A, B], [blowup_transition(3)], 4)


class TestTriples:
    def test_two_charts_vacuous(self):
        a = gallery.generate("blowup-point-C2")
        assert a.triples == ()

    def test_product_slice_consistent(self):
        a = gallery.generate("product-slice")
        assert check_triple_consistency(a, ("V0", "V1", "V2")).passed
        assert check_triple_consistency(a, ("V2", "V0", "V1")).passed

    def test_injected_inconsistency(self):
        a = gallery.generate("product-slice")
        t = a.transition("V0", "V2")
        bad = ChartTransition(t.source, t.target, (t.components[0], t.source_ring.gens[1] + 1))
        back = invert_transition(bad)
        others = [x for k, x in a.transitions.items() if k not in (("V0", "V2"), ("V2", "V0"))]
        b = a.replace(transitions=[bad, back, *others], triples=())
        rep = check_triple_consistency(b, ("V0", "V1", "V2"))
        assert not rep.passed
        assert rep.component == 1
        assert rep.difference is not None and not rep.difference.is_zero()
        with pytest.raises(TripleInconsistencyError):
            a.replace(transitions=[bad, back, *others])

    def test_missing_transition(self):
        a = gallery.generate("blowup-point-C2")
        with pytest.raises(MissingTransitionError):
            check_triple_consistency(a, ("A", "B", "C"))


class TestNormalBundle:
    def test_blowup_unchanged(self):
        a = gallery.generate("blowup-point-C2")
        nb = induced_normal_bundle_atlas(a)
        assert nb.transitions == a.transitions

    def test_identity(self):
        a = identity_atlas()
        assert induced_normal_bundle_atlas(a).transitions == a.transitions

    def test_idempotent(self):
        a = gallery.generate("conic-P2", K=4)
        nb = induced_normal_bundle_atlas(a)
        assert induced_normal_bundle_atlas(nb) == nb

    def test_definition_on_conic(self):
        a = gallery.generate("conic-P2", K=4)
        nb = induced_normal_bundle_atlas(a)
        t = a.transition("Z", "X")
        n = nb.transition("Z", "X")
        u, w = t.source_ring.gens
        assert n.components[0] == u * t.normal_jacobian_on_S()[0][0]
        assert n.components[1] == t.source_ring.constant(t.tangential_map_on_S()[0])

    @pytest.mark.parametrize(
        "name,params",
        [("conic-P2", {"K": 5}), ("product-slice", {"K": 4}), ("perturbed", {"kind": "h", "k": 1})],
    )
    def test_linear_atlas_passes_checks(self, name, params):
        nb = induced_normal_bundle_atlas(gallery.generate(name, **params))
        for k in range(1, nb.K - 1):
            assert check_k_comfortable_atlas(nb, k).passed
            assert check_k_splitting_atlas(nb, k).passed

    def test_triples_preserved(self):
        nb = induced_normal_bundle_atlas(gallery.generate("product-slice"))
        assert check_triple_consistency(nb, ("V0", "V1", "V2")).passed
