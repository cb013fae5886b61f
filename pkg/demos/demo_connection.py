"""
Normal connections and the comfortable obstruction
==================================================

With the frames induced by the normal derivatives of the transitions, the
connection cocycle vanishes on a comfortable atlas; on a perturbed atlas
its symmetric part is the comfortable obstruction at order 1.
"""

from formalnbhd import gallery
from formalnbhd.obstructions import cocycle_connection, cocycle_h, symmetrize_connection

flat = gallery.generate("blowup-point-C2", K=4)
print("blow-up, connection cocycle zero:", cocycle_connection(flat).is_zero())

bent = gallery.generate("perturbed", kind="h", k=1, coefficient="w")
delta = cocycle_connection(bent)
h = cocycle_h(bent, 1)
print("perturbed, connection cocycle zero:", delta.is_zero())
print("symmetric part equals h:", symmetrize_connection(delta, bent) == h)
for row in h.to_dict(bent)["overlaps"]:
    print("  h on", row["from"], "->", row["to"], ":", row["coefficients"])
