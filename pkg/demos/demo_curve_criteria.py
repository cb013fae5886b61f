"""
Guarantees from genus and self-intersection
===========================================

The degree inequalities give sufficient conditions only; every negative
verdict is reported as inconclusive.
"""

from formalnbhd.curves import CurveData, curve_report

for g, d in [(0, -1), (0, 4), (2, -3), (2, -5)]:
    print(curve_report(CurveData(g, d, k_max=3)).to_text())
    print()
