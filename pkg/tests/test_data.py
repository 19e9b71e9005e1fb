from __future__ import annotations

import pytest

from oracles import chi, is_steiner

from mcdsqs.data import DATASETS, build_entry, dataset_ids, load_dataset, parse_listing, read_text
from mcdsqs.model import CertificationError


def test_ids():
    assert set(dataset_ids()) == set(DATASETS)


@pytest.mark.parametrize("key,blocks,kind", [
    ("rdcqs_8_4_2", 1376, "RDCQS"), ("c1dcqs_2_9_2", 276, "c1DCQS"), ("c2dcqs_2_9_2", 276, "c2DCQS"),
    ("rdgdd_3_4_10_2", 240, "RDGDD34"), ("mcdsqs_26", 650, "mcDSQS"), ("mcdsqs_32", 1240, "mcDSQS"),
])
def test_dataset_counts(datasets, key, blocks, kind):
    cert = datasets[key]
    assert cert.passed and cert.claimed_kind == kind
    assert len(cert.design.blocks) == blocks


@pytest.mark.parametrize("key", ["mcdsqs_26", "mcdsqs_32"])
def test_cyclic_sqs_oracle(datasets, key):
    d = datasets[key].design
    assert is_steiner(d.blocks, range(d.v), 3)
    assert {c.r for c in datasets[key].derived_colorings.values()} == {chi(d.v - 1)}


def test_rdcqs_profiles(datasets):
    cert = datasets["rdcqs_8_4_2"]
    for x in range(32):
        col = cert.derived_colorings[x]
        assert (col.r, col.s) == (16, 4)
        assert sum(len(c) for c in col) == 164
    for x in (32, 33):
        col = cert.derived_colorings[x]
        assert col.r == 16 and sum(len(c) for c in col) == 128


def test_c1_special_group(datasets):
    cert = datasets["c1dcqs_2_9_2"]
    for a in (18, 19):
        col = cert.derived_colorings[a]
        assert col.r == 10
        assert sum(1 for c in col if c.scope.group == 0) == 2
    assert cert.design.groups[0] == (0, 9)


def test_orbit_mark_mismatch_rejected():
    text = read_text("mcdsqs_26").replace("'", "", 1)
    with pytest.raises(CertificationError):
        build_entry(DATASETS["mcdsqs_26"], text)


def test_parse_listing_sections():
    secs = parse_listing("[base]\n{0,1,2,3} {0,1,4,6}'\n# {9,9,9}\n[derived 0]\n{1,2,3}\n")
    assert secs["base"][0][1] == (("0", "1", "4", "6"), "'")
    assert len(secs["derived 0"]) == 1


def test_sqs20_note_builds_pipeline():
    cert = load_dataset("sqs20_cyclic_note")
    assert len(cert.design.blocks) == 285 and "not listed" in cert.provenance
