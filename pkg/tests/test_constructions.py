from __future__ import annotations

import json

import numpy as np
import pytest

from oracles import chi, is_partial_parallel, is_steiner, residues

from mcdsqs import constructions as C
from mcdsqs.algebra import trivial_rds
from mcdsqs.io import dumps
from mcdsqs.model import CertifiedDesign, Design, PreconditionError


def _colsets(cols):
    return {x: sorted(tuple(map(tuple, c.blocks.tolist())) for c in col) for x, col in cols.items()}


def _same_up_to_placement(out, ing, order, m):
    """out equals the canonical relabeled copy of ing (blocks and per-point class sets)."""
    cp = C._place_grouped(ing, order, m, list(out.design.stem))
    blocks = sorted(map(tuple, np.sort(cp.blocks(), axis=1).tolist()))
    moved = {int(cp.lab[x]): col.relabel(cp.lab, cp.gmap) for x, col in C.full_colorings(ing).items()}
    return blocks == sorted(out.design.blocks) and _colsets(moved) == _colsets(C.full_colorings(out))


def _trusted(cert):
    C._CERT_CACHE[cert] = True
    return cert


@pytest.mark.parametrize("name,v,blocks,classes", [
    ("rdsqs10", 10, 30, 4), ("mcdsqs20", 20, 285, 10), ("rdsqs34", 34, 1496, 16),
])
def test_small_recipes(built, name, v, blocks, classes):
    cert = built(name)
    d = cert.design
    assert cert.passed and d.v == v and len(d.blocks) == blocks
    assert {c.r for c in cert.derived_colorings.values()} == {classes}
    assert classes == chi(v - 1)
    assert is_steiner(d.blocks, range(v), 3)


def test_rdsqs34_classes_are_full_parallel(built):
    cert = built("rdsqs34")
    for x, col in cert.derived_colorings.items():
        assert all(c.scope.mode == "PC" and len(c) == 11 for c in col)


def test_mcdsqs20_oracle_per_point(built):
    cert = built("mcdsqs20")
    for x, col in cert.derived_colorings.items():
        rows = sorted(tuple(r) for c in col for r in c.blocks.tolist())
        assert rows == residues(cert.design.blocks, x)
        assert all(is_partial_parallel(c.blocks.tolist()) for c in col)


def test_c1dcqs162(built):
    cert = built("c1dcqs162")
    assert cert.passed and cert.claimed_kind == "c1DCQS"
    assert len(cert.design.blocks) == 180360
    assert cert.special_group == 0
    for a in cert.design.stem:
        col = cert.derived_colorings[a]
        assert col.r == 82 and sum(1 for c in col if c.scope.group == 0) == 2


def test_mcdsqs164(built):
    cert = built("mcdsqs164")
    assert cert.passed and len(cert.design.blocks) == 180441
    assert {c.r for c in cert.derived_colorings.values()} == {82}


def test_delta():
    assert C.rsqs2_delta(8, 2) == 4
    assert C.rsqs2_delta(2, 2) == 1
    assert C.rsqs2_delta(2, 0) == 1
    with pytest.raises(PreconditionError):
        C.rsqs2_delta(3, 0)


# ---------------------------------------------------------------- degenerate identities

def test_inflate_rds_single_block(datasets):
    rd = datasets["rdcqs_8_4_2"]
    out = C.inflate_rds(trivial_rds(4), rd, None)
    assert _same_up_to_placement(out, rd, (0, 1, 2, 3), 8)


def test_inflate_c1_single_block(datasets):
    c1 = datasets["c1dcqs_2_9_2"]
    out = C.inflate_c1(trivial_rds(9), c1, datasets["c2dcqs_2_9_2"], None)
    assert _same_up_to_placement(out, c1, tuple(range(9)), 2)


def test_inflate_fan_single_block(datasets):
    rd = datasets["rdcqs_8_4_2"]
    d = Design(v=4, blocks=((0, 1, 2, 3),), t=3, K=frozenset({4}), kind="Fan1", groups=((0,), (1,), (2,), (3,)))
    fg = CertifiedDesign(design=d, claimed_kind="FG1", components={"fan": [(0, 1, 2, 3)], "T": []})
    out = C.inflate_fan(fg, {4: rd}, {})
    assert _same_up_to_placement(out, rd, (0, 1, 2, 3), 8)


def rsqs2_fixture():
    d = Design(v=4, blocks=((0, 1, 2, 3),), t=3, K=frozenset({4}))
    return CertifiedDesign(design=d, claimed_kind="RSQS2star",
                           components={"systems": {(1, l): [(0, 1, 2, 3)] for l in (1, 2, 3)},
                                       "pcs": {1: [(0, 1, 2, 3)]}})


def test_quadruple_rsqs_fixture(datasets):
    rd = datasets["rdcqs_8_4_2"]
    out = C.quadruple_rsqs(rsqs2_fixture(), rd, None)
    assert _same_up_to_placement(out, rd, (0, 1, 2, 3), 8)


# ---------------------------------------------------------------- rejections

def test_missing_fdgdd_rejected(datasets):
    d = Design(v=4, blocks=((0, 2), (0, 3), (1, 2), (1, 3), (0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)),
               t=3, K=frozenset({2, 3}), kind="Fan1", groups=((0, 1), (2, 3)))
    fg = CertifiedDesign(design=d, claimed_kind="FG1",
                         components={"fan": [(0, 2), (0, 3), (1, 2), (1, 3)],
                                     "T": [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]})
    with pytest.raises(PreconditionError) as e:
        C.inflate_fan(fg, {2: datasets["rdcqs_8_4_2"]}, {})
    assert e.value.code == "missing-ingredient"
    with pytest.raises(PreconditionError) as e:
        C.inflate_fan(fg, {}, {})
    assert e.value.code == "missing-ingredient"


def test_quadruple_rejects_absent_and_invalid(datasets):
    with pytest.raises(PreconditionError) as e:
        C.quadruple_rsqs(None, datasets["rdcqs_8_4_2"], None)
    assert e.value.code == "missing-ingredient"
    fx = rsqs2_fixture()
    bad = fx.with_(components={"systems": fx.components["systems"], "pcs": {1: []}})
    with pytest.raises(PreconditionError) as e:
        C.quadruple_rsqs(bad, datasets["rdcqs_8_4_2"], None)
    assert e.value.code == "ingredient-invalid"


def test_wrong_kind_rejected(datasets):
    with pytest.raises(PreconditionError) as e:
        C.fill_c1dcqs(datasets["c2dcqs_2_9_2"], C._rdsqs4())
    assert e.value.code == "ingredient-kind"


def test_non_resolvable_rds_names_point(datasets):
    rds = trivial_rds(4)
    cols = dict(rds.derived_colorings)
    del cols[2]
    broken = rds.with_(derived_colorings=cols, report=None)
    with pytest.raises(PreconditionError) as e:
        C.inflate_rds(broken, datasets["rdcqs_8_4_2"], None)
    assert "uncovered-points: [2]" in str(e.value)


def test_fill_c1_rejects_n_not_divisible_by_three(datasets):
    c1 = datasets["c1dcqs_2_9_2"]
    # eight groups: only the divisibility gate can object
    d = c1.design.with_(groups=c1.design.groups[:8] + ((8, 17),))
    fake = _trusted(c1.with_(design=d.with_(groups=tuple(g for g in d.groups[:7]) + ((7, 16, 8, 17),)),
                             report=None))
    with pytest.raises(PreconditionError) as e:
        C.fill_c1dcqs(fake, C._rdsqs4())
    assert e.value.code in ("congruence", "group-type")
    c1_8 = _trusted(CertifiedDesign(
        design=Design(v=18, blocks=(), t=3, K=frozenset({4}), kind="CQS", stem=(16, 17),
                      groups=tuple((i, i + 8) for i in range(8))), claimed_kind="c1DCQS"))
    with pytest.raises(PreconditionError) as e:
        C.fill_c1dcqs(c1_8, C._rdsqs4())
    assert e.value.code == "congruence"


def test_fill_gcdcqs_rejects_bad_stem(datasets):
    fake = _trusted(CertifiedDesign(
        design=Design(v=27, blocks=(), t=3, K=frozenset({4}), kind="CQS", stem=(24, 25, 26),
                      groups=tuple(tuple(range(8 * i, 8 * i + 8)) for i in range(3))),
        claimed_kind="gcDCQS"))
    with pytest.raises(PreconditionError) as e:
        C.fill_gcdcqs(fake, C._rdsqs10(), C._rdsqs10(hole=(8, 9)))
    assert e.value.code == "stem-size"


def test_corrupt_rdgdd_fails(datasets, rds9):
    from mcdsqs.model import ColorClass, Coloring

    g = datasets["rdgdd_3_4_10_2"]
    cols = dict(C.full_colorings(g))
    classes = list(cols[0].classes)
    # move one row between two full parallel classes: neither stays a partition
    ra, rb = classes[0].blocks.tolist(), classes[1].blocks.tolist()
    rb.append(ra.pop())
    classes[0] = ColorClass(np.array(ra), classes[0].scope)
    classes[1] = ColorClass(np.array(rb), classes[1].scope)
    cols[0] = Coloring(tuple(classes))
    bad = g.with_(derived_colorings=cols, group=None, report=None)
    with pytest.raises(PreconditionError) as e:
        C.inflate_c1(rds9, datasets["c1dcqs_2_9_2"], datasets["c2dcqs_2_9_2"], bad)
    assert e.value.code == "ingredient-invalid" and "rdgdd" in str(e.value)


# ---------------------------------------------------------------- recipes and determinism

def test_deterministic_serialization():
    a = dumps(C.recipe_mcdsqs20())
    b = dumps(C.recipe_mcdsqs20())
    assert a == b


def test_recipe_file(tmp_path):
    spec = {"construction": "fill_c1dcqs",
            "ingredients": {"c1": "c1dcqs_2_9_2", "filler": {"ref": "trivial_rds:3", "as": "RDSQS"}}}
    p = tmp_path / "r.json"
    p.write_text(json.dumps(spec))
    cert = C.run_recipe_file(p)
    assert len(cert.design.blocks) == 285
    holed = {"construction": "fill_gcdcqs",
             "ingredients": {"cqs": "rdcqs_8_4_2", "filler_full": "rdsqs10",
                             "filler_holed": {"ref": "moebius_rds:3", "as": "gcDSQS_vh", "hole": [8, 9]}}}
    p.write_text(json.dumps(holed))
    assert len(C.run_recipe_file(p).design.blocks) == 1496


def test_unknown_recipe():
    with pytest.raises(KeyError):
        C.run_recipe("nope")
