"""
Injecting an obstruction and removing it again
==============================================

Perturb the zero section of O(-1) over P^1 by a tangential term of normal
degree k, read the term back from the cocycle, then remove it with a
primitive cochain and the normalising coordinate change.
"""

from formalnbhd import gallery
from formalnbhd.obstructions import (
    Cochain,
    check_k_splitting_atlas,
    cocycle_g,
    normalize_splitting,
    verify_coboundary,
)

k = 2
a = gallery.generate("perturbed", kind="g", k=k, coefficient="1/w^3 + w")
print(f"{a.name} is {k}-split:", check_k_splitting_atlas(a, k).passed)

c = cocycle_g(a, k, frame="alpha")
for row in c.to_dict(a)["overlaps"]:
    print("  g on", row["from"], "->", row["to"], ":", [r["value"] for r in row["coefficients"]])

# a primitive: -w^3 on the first chart, -s^(k+3) on the second
W = a.ring("U0").field.gens[0]
S = a.ring("U1").field.gens[0]
key = (0, (0,) * k)
p = Cochain("split", k, {"U0": {key: -W**3}, "U1": {key: -S ** (k + 3)}})
print("cochain bounds the cocycle:", verify_coboundary(c, p, a).passed)

b = normalize_splitting(a, p)
print(f"after normalisation, {k}-split:", check_k_splitting_atlas(b, k).passed)
print("new forward transition:")
for comp in b.transition("U0", "U1").components:
    print("  ", comp)
