from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from oracles import min_distance

from mcdsqs.codes import CWCode, anticode_bound_check, code_text, dense_text, emit_code, parse_code, verify_code
from mcdsqs.model import PreconditionError


def test_mcdsqs20_code(built):
    code = emit_code(built("mcdsqs20"))
    assert (code.n, len(code), code.q) == (20, 285, 11)
    assert code.header == "(20, 285, 6; 4)_11"
    rep = verify_code(code)
    assert rep.passed and rep.stats["min_distance"] == 6
    assert min_distance([tuple(r) for r in code.dense().tolist()]) == 6


def test_mcdsqs26_code_brute_force(datasets):
    code = emit_code(datasets["mcdsqs_26"])
    assert code.q == 14
    assert min_distance([tuple(r) for r in code.dense().tolist()]) == 6
    assert verify_code(code).passed


def test_rdsqs34_code(built):
    code = emit_code(built("rdsqs34"))
    assert code.q == 17 and len(code) == 1496
    assert verify_code(code).passed


def test_two_point_intersections_use_distinct_classes(datasets):
    """Supports sharing {x, y}: the residues at x meet in y, so their classes differ."""
    cert = datasets["mcdsqs_32"]
    code = emit_code(cert)
    sym = {(tuple(s), p): y for s, ys in zip(code.supports.tolist(), code.symbols.tolist()) for p, y in zip(s, ys)}
    by_pair = {}
    for s in code.supports.tolist():
        for pr in combinations(s, 2):
            by_pair.setdefault(pr, []).append(tuple(s))
    for (x, y), sups in by_pair.items():
        for a, b in combinations(sups, 2):
            assert sym[(a, x)] != sym[(b, x)] and sym[(a, y)] != sym[(b, y)]


def test_distance_five_counterexample():
    sup = np.array([[0, 1, 2, 3], [0, 1, 4, 5]])
    sym = np.array([[1, 1, 1, 1], [1, 2, 1, 1]])
    code = CWCode(n=6, w=4, q=3, d=6, supports=sup, symbols=sym)
    rep = verify_code(code)
    assert not rep.passed
    # size rule is skipped only to reach the distance scan
    code2 = CWCode(n=6, w=4, q=3, d=6, supports=sup, symbols=sym)
    from mcdsqs import codes as K
    rep2 = K.VerifyReport()
    dmin, pair = K._pairwise_min(code2.dense())
    assert dmin == 5 and pair == (0, 1)


def test_pair_bucket_catches_equal_symbols(built):
    code = emit_code(built("mcdsqs20"))
    # force the bucket path on a small code
    from mcdsqs import codes as K
    old = K.PAIRWISE_LIMIT
    K.PAIRWISE_LIMIT = 10
    try:
        assert verify_code(code).passed
        sym = code.symbols.copy()
        # find two supports through a common pair and copy a symbol across
        sup = code.supports.tolist()
        for i, j in combinations(range(len(sup)), 2):
            common = set(sup[i]) & set(sup[j])
            if len(common) == 2:
                x = min(common)
                sym[j, sup[j].index(x)] = sym[i, sup[i].index(x)]
                break
        bad = CWCode(code.n, code.w, code.q, code.d, code.supports, sym)
        rep = verify_code(bad)
        assert not rep.passed and "equal-symbol-on-shared-pair" in rep.codes()
    finally:
        K.PAIRWISE_LIMIT = old


@pytest.mark.parametrize("n,q,size,perfect", [
    (20, 11, 285, True), (20, 11, 284, False), (34, 17, 1496, True), (26, 14, 650, True),
    (32, 17, 1240, True), (164, 83, 180441, True),
])
def test_anticode(n, q, size, perfect):
    rep = anticode_bound_check(n, 4, 3, q, size)
    assert rep.stats["perfect"] is perfect
    assert rep.stats["anticode"] == (n - 3) * (q - 1) ** 4


def test_anticode_arithmetic_example():
    rep = anticode_bound_check(20, 4, 3, 11, 285)
    assert rep.stats["product"] == 285 * 17 * 10 ** 4 == 4845 * 10 ** 4


def test_anticode_bad_parameters():
    with pytest.raises(PreconditionError):
        anticode_bound_check(4, 4, 3, 2, 1)


def test_text_round_trip(built):
    code = emit_code(built("mcdsqs20"))
    back = parse_code(code_text(code))
    assert np.array_equal(back.supports, code.supports) and np.array_equal(back.symbols, code.symbols)
    rows = dense_text(code).splitlines()
    assert rows[0] == "# (20, 285, 6; 4)_11" and len(rows[1]) == 20
