"""
Checking the imbrex axioms
==========================

Run the parapolar and imbrex checks on a Segre geometry, a line
Grassmannian and the geometry built from the Hermitian quadrangle
H(4, 4), and show what a failure looks like.
"""

import json

from imbrex import catalog
from imbrex.axioms import check_strong_parapolar_diam2, is_imbrex, replay

for name, params in [("segre", dict(p=2, r=2, q=2)), ("grassmann", dict(n=4, q=2)), ("imbrex_H4", dict(q2=4))]:
    g = catalog.build(name, **params)
    rep, prof = is_imbrex(g)
    print(f"{g.name:16s} {rep.verdict}  symplectic rank {prof.symplectic_rank}, "
          f"{len(prof.ranks)} symps, thickness {set(prof.thickness)}  ({rep.ms} ms)")

# the same construction from Q(4, 2) gives symps that are dual grids, so PPS2 fails
g = catalog.build("imbrex_Q4", q=2)
rep = check_strong_parapolar_diam2(g)
pps2 = rep.part("PPS2")
print(g.name, "PPS2:", pps2.verdict, json.dumps(pps2.to_dict()["witness"]))

# witnesses are re-derived from scratch
print("replay confirms the violation:", replay(g, pps2))
