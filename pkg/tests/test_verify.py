from __future__ import annotations

import numpy as np
import pytest

from oracles import chi, is_partial_parallel, is_partition, is_steiner, residues

from mcdsqs.model import CertifiedDesign, ClassScope, ColorClass, Coloring, Design
from mcdsqs.resolver import ag23, cyclic_sts, fano
from mcdsqs.verify import (
    chromatic_profile, gcsts_profile, verify_certificate, verify_coverage, verify_fan, verify_rsqs2star,
)


@pytest.mark.parametrize("v", [3, 7, 9, 13, 15, 19, 21, 25, 27, 31, 33, 163])
def test_chromatic_profile_matches_formula(v):
    assert chromatic_profile(v) == chi(v)


def test_gcsts_profile():
    assert gcsts_profile(33, 9) == (16, 4)
    assert gcsts_profile(19, 3) == (10, 2)
    with pytest.raises(ValueError):
        gcsts_profile(19, 2)


@pytest.mark.parametrize("d", [fano(), ag23(), cyclic_sts(13, [(0, 1, 4), (0, 2, 7)])])
def test_coverage_agrees_with_oracle(d):
    assert verify_coverage(d).passed == is_steiner(d.blocks, d.point_list, 2)
    broken = d.with_(blocks=d.blocks[:-1] + ((0, 1, 2) if d.blocks[-1] != (0, 1, 2) else (0, 1, 3),))
    assert verify_coverage(broken).passed == is_steiner(broken.blocks, broken.point_list, 2)
    assert not verify_coverage(broken).passed


def test_kts_coloring_of_ag23():
    d = ag23()
    from mcdsqs.resolver import parallelism_partition

    classes = parallelism_partition(d.blocks, range(9))
    col = Coloring(tuple(ColorClass(c, ClassScope("PC")) for c in classes))
    cert = CertifiedDesign(design=d, claimed_kind="KTS", coloring=col)
    assert verify_certificate(cert).passed
    assert all(is_partition(c.tolist(), range(9)) for c in classes)
    # merge two classes: no longer partial parallel
    merged = Coloring((ColorClass(np.concatenate([classes[0], classes[1]]), ClassScope("PC")),)
                      + col.classes[2:])
    assert not verify_certificate(cert.with_(coloring=merged)).passed


def test_dataset_colorings_against_oracle(datasets):
    for key in ("mcdsqs_26", "c1dcqs_2_9_2"):
        cert = datasets[key]
        d = cert.design
        for x in d.point_list:
            col = cert.derived_colorings[x]
            rows = sorted(tuple(r) for c in col for r in c.blocks.tolist())
            assert rows == residues(d.blocks, x)
            assert all(is_partial_parallel(c.blocks.tolist()) for c in col)
        assert is_steiner(d.blocks, d.point_list, 3) == (d.kind == "Steiner")


def test_rsqs2star_checker_rejects_triple_occurrence():
    sd = Design(v=4, blocks=((0, 1, 2, 3),), t=3, K=frozenset({4}))
    good = CertifiedDesign(design=sd, claimed_kind="RSQS2star",
                           components={"systems": {(1, l): [(0, 1, 2, 3)] for l in (1, 2, 3)},
                                       "pcs": {1: [(0, 1, 2, 3)]}})
    assert verify_rsqs2star(good).passed
    # not in the special system but present three times
    bad = good.with_(components={"systems": good.components["systems"], "pcs": {1: []}})
    rep = verify_rsqs2star(bad)
    assert not rep.passed


def test_fan_checker():
    d = Design(v=4, blocks=((0, 1, 2, 3),), t=3, K=frozenset({4}), kind="Fan1", groups=((0,), (1,), (2,), (3,)))
    ok = CertifiedDesign(design=d, claimed_kind="FG1", components={"fan": [(0, 1, 2, 3)], "T": []})
    assert verify_fan(ok).passed
    bad = ok.with_(components={"fan": [], "T": [(0, 1, 2, 3)]})
    assert not verify_fan(bad).passed
