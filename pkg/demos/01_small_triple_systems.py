"""Exact chromatic indices of the smallest triple systems.

The Fano plane needs all 7 of its blocks as singleton classes, STS(13)
needs 8, and AG(2,3) splits into 4 parallel classes.
"""
from __future__ import annotations

from mcdsqs.resolver import ag23, chromatic_index, cyclic_sts, fano, min_coloring, resolve_all

for name, sts in (("Fano", fano()), ("STS(13)", cyclic_sts(13, [(0, 1, 4), (0, 2, 7)])), ("AG(2,3)", ag23())):
    r, col = chromatic_index(sts)
    below = min_coloring(sts, r - 1)
    print(f"{name}: {len(sts.blocks)} blocks, chromatic index {r}; {r - 1} classes possible: {below is not None}")
    print("  class sizes:", [len(c) for c in col])

pcs = resolve_all(ag23())
print(f"AG(2,3) has {len(pcs)} parallel classes; Fano has {len(resolve_all(fano()))}")
