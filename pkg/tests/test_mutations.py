from __future__ import annotations

from collections import Counter

import pytest

from mutations import PIPELINES, run_mutations


@pytest.mark.parametrize("name", ["mcdsqs20", "rdsqs34"])
@pytest.mark.parametrize("seed", [1, 2])
def test_output_verifier_catches_trusted_corruptions(name, seed):
    """With the ingredient gate bypassed, every corruption is caught or never reaches the output."""
    res = run_mutations(name, n=60, seed=seed, trust=True)
    counts = Counter(o for *_, o in res)
    assert counts["SILENT-PASS"] == 0, [r for r in res if r[2] == "SILENT-PASS"][:5]
    assert counts["certification"] > 0


def test_every_ingredient_slot_gets_mutated():
    res = run_mutations("mcdsqs164", n=60, seed=3)
    assert {k for k, *_ in res} == set(PIPELINES["mcdsqs164"][0]())
    assert all(o == "precondition" for *_, o in res)
