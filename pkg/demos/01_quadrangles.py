"""
Generalized quadrangles from forms
==================================

Build a few classical quadrangles, read off their orders, and look at
perps and regular pairs.
"""

from imbrex import catalog
from imbrex.gq import classify_gq, concurrency, dual_geometry, is_regular_pair, perp

# W(2): points and totally isotropic lines of a symplectic form on GF(2)^4
w = catalog.build("W", q=2)
print(w, classify_gq(w))

# take two disjoint lines; the lines meeting both form their perp
conc = concurrency(w)
b = next(i for i in range(len(w.lines)) if not conc[0, i])
print("perp of lines 0 and", b, "->", perp(w, (0, b)))

# in W(q) with q even the pair is regular: its double perp has q + 1 lines
reg = is_regular_pair(w, 0, b)
print("regular:", reg.regular, "double perp:", reg.double_perp)

# the elliptic quadric Q-(5, 2) has order (2, 4); opposite points are not regular
q = catalog.build("Qminus5", q=2)
print(q, classify_gq(q))
y = next(i for i in range(1, q.point_count) if not q.adjacency[0, i])
print("points 0 and", y, "regular:", is_regular_pair(dual_geometry(q), 0, y).regular)

# Hermitian quadrangles over GF(4)
for name in ("H3", "H4"):
    g = catalog.build(name, q2=4)
    print(g, classify_gq(g))
