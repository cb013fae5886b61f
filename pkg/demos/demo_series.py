"""
Truncated series in normal and tangential variables
====================================================

A series keeps normal degree up to K and exact rational coefficients in
the tangential variables.
"""

from formalnbhd import SeriesRing, compose, normal_order, restrict_to_S

# one normal variable u, one tangential variable w, truncated at degree 3
R = SeriesRing(["u"], ["w"], 3)
u, w = R.gens

f = u * w + u**2 / (1 + w)
print("f          =", f)
print("f * f      =", f * f)
print("d f / d w  =", f.derive("w"))

# division by a unit expands as a truncated geometric series
print("1/(w + u)  =", 1 / (w + u))

# substitution: w -> w + u, u -> u (an adapted change of coordinates)
g = compose(1 / w, [u, w + u])
print("1/w after w -> w + u:", g)
print("restriction to S:", restrict_to_S(g), " normal order of u^2 w:", normal_order(u**2 * w))
