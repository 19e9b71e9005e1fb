"""Optimal constant-weight codes read off the colorings.

Each block gives a weight-4 word; the symbol at x names the class of the
remaining triple at x. Distance 6 and anticode equality are checked.
"""
from __future__ import annotations

from mcdsqs.codes import anticode_bound_check, emit_code, verify_code
from mcdsqs.constructions import RECIPES

for name in ("mcdsqs20", "mcdsqs26", "mcdsqs32", "rdsqs34"):
    code = emit_code(RECIPES[name]())
    rep = verify_code(code)
    anti = anticode_bound_check(code.n, code.w, 3, code.q, len(code))
    print(f"{code.header:28s} d_min={rep.stats['min_distance']} via {rep.stats['method']}, "
          f"anticode {'equality' if anti.stats['perfect'] else anti.summary()}")
    print("   first word:", code.dense(rows=[0])[0].tolist())
