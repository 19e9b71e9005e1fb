from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcdsqs.group import Perm, PermGroup, check_automorphism, complete_colorings, expand_orbits, transport_coloring
from mcdsqs.model import ModelError, PreconditionError
from mcdsqs.resolver import cyclic_sts

perms = st.integers(2, 12).flatmap(lambda v: st.permutations(list(range(v))).map(Perm))


@given(perms)
def test_inverse(p):
    assert p.compose(p.inverse()).is_identity()


@given(perms)
def test_cycle_string_round_trip(p):
    assert Perm.parse(p.to_cycle_string(), p.v) == p


def test_parse_with_labels():
    p = Perm.parse("(0,1,2)(a,b)", 5, {"a": 3, "b": 4})
    assert p.to_list() == [1, 2, 0, 4, 3]
    with pytest.raises(ModelError):
        Perm([0, 0, 1])


def test_group_order_and_orbits():
    z = PermGroup([Perm.parse("(" + ",".join(map(str, range(13))) + ")", 13)])
    assert z.order == 13
    blocks, lens = expand_orbits([(0, 1, 4), (0, 2, 7)], z)
    assert lens == [13, 13] and len(blocks) == 26
    assert z.orbit(3) == set(range(13))


def test_automorphism_and_transport(datasets):
    cert = datasets["mcdsqs_26"]
    shift = Perm(np.roll(np.arange(26), -1))
    assert check_automorphism(cert.design, shift)[0]
    col = cert.derived_colorings[0]
    moved = transport_coloring(col, shift, cert.design)
    assert moved.r == col.r
    assert {tuple(r) for c in moved for r in c.blocks.tolist()} == \
        {tuple(sorted((p + 1) % 26 for p in r)) for c in col for r in c.blocks.tolist()}
    bad = Perm([1, 0] + list(range(2, 26)))
    assert not check_automorphism(cert.design, bad)[0]
    with pytest.raises(PreconditionError):
        transport_coloring(col, bad, cert.design)


def test_complete_colorings_from_representatives(datasets):
    cert = datasets["mcdsqs_32"]
    reps = cert.with_(derived_colorings={0: cert.derived_colorings[0]})
    cols, missing = complete_colorings(reps)
    # one short orbit stays uncovered unless its representative is stored
    assert set(cols) | set(missing) == set(range(32))
    assert 0 in cols
