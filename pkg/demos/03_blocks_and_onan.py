"""
Blocks, induced spreads and O'Nan configurations
================================================

In the H(4, 4) imbrex geometry the maximal singular subspaces (blocks)
are unitals on 9 points.  Each one holds non-closing O'Nan
configurations, so none of them is a projective plane.
"""

import numpy as np

from imbrex import catalog
from imbrex.analysis import block_geometry, double_perp_geometry, induced_spread
from imbrex.gq import find_onan

g = catalog.build("imbrex_H4", q2=4)
bg, rep = block_geometry(g)
print("Delta:", rep.part("delta-gq").witness, "with", len(bg.blocks), "blocks")

block = bg.blocks[0]
configs = find_onan(g, block)
print(f"block 0 has {len(block)} points and {len(configs)} non-closing O'Nan configurations")
print("first one uses lines", [g.lines[l] for l in configs[0].lines])

# a block disjoint from a symp carves a spread on it
m = bg.membership.astype(int)
sm = bg.symps.membership.astype(int)
b, h = (int(v) for v in np.argwhere(m @ sm.T == 0)[0])
sp = induced_spread(g, bg, b, h)
dp = double_perp_geometry(g, bg, sp)
print(f"block {b} induces a spread of {len(sp.lines)} lines on symp {h}")
print("double perps stay in the spread and map into the block:", dp.report.verdict, dp.report.witness)
