"""
Embedded point sets and residues
================================

The Pluecker embedding of the lines of PG(4, 2) together with its Klein
quadrics satisfies MM1, MM2 and the local tangent bound.  Its residue at
a point is the Segre embedding of PG(1, 2) x PG(2, 2).
"""

from imbrex import catalog
from imbrex.mm import check_lmm3, check_mm_axioms, residue, structurally_isomorphic

e = catalog.plucker_embedding(4, 2)
print(f"{len(e)} points in PG({e.ambient_dim}, 2), {len(e.xi)} quadrics, type (d, r) = ({e.d}, {e.r})")
print("MM:", check_mm_axioms(e).verdict)

lmm = check_lmm3(e)
print("tangent span dimensions:", lmm.witness["dimensions"], "bound", lmm.witness["bound"])

res = residue(e, 0)
print(f"residue at point 0: {len(res)} points in PG({res.ambient_dim}, 2), type ({res.d}, {res.r})")
print("isomorphic to the Segre embedding:", structurally_isomorphic(res, catalog.segre_embedding(1, 2, 2)))
