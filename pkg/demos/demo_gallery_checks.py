"""
Embedding checks on the built-in atlases
========================================

Zero sections of line bundles and the exceptional curve of a blow-up pass
every check; the plane conic does not split, and the splitting cocycle
shows where.
"""

from formalnbhd import gallery
from formalnbhd.obstructions import (
    check_k_comfortable_atlas,
    check_k_splitting_atlas,
    check_splitting_atlas,
    cocycle_s,
)

for name in ("line-bundle-P1", "blowup-point-C2"):
    a = gallery.generate(name, K=5)
    split = [check_k_splitting_atlas(a, k).passed for k in range(1, 5)]
    comfortable = [check_k_comfortable_atlas(a, k).passed for k in range(1, 4)]
    print(f"{a.name}: k-split for k=1..4 {split}, k-comfortable for k=1..3 {comfortable}")

conic = gallery.generate("conic-P2", K=3)
report = check_splitting_atlas(conic)
print(f"\n{conic.name}: split? {report.passed}")
for wit in report.witnesses:
    print(f"  {wit.overlap[0]}->{wit.overlap[1]}: {wit.derivative} starts with {wit.leading}")

# the splitting cocycle, coefficients in the source chart's tangential variable
for row in cocycle_s(conic).to_dict(conic)["overlaps"]:
    print(" ", row["from"], "->", row["to"], row["coefficients"])
