from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def datasets():
    from mcdsqs.data import load_dataset

    ids = ["rdcqs_8_4_2", "c1dcqs_2_9_2", "c2dcqs_2_9_2", "rdgdd_3_4_10_2", "mcdsqs_26", "mcdsqs_32"]
    return {i: load_dataset(i) for i in ids}


@pytest.fixture(scope="session")
def rds9():
    from mcdsqs.algebra import moebius_rds

    return moebius_rds(9)


@pytest.fixture(scope="session")
def built():
    """Lazily built recipe outputs, shared across the session."""
    from mcdsqs.constructions import recipe_c1dcqs162, run_recipe

    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = recipe_c1dcqs162() if name == "c1dcqs162" else run_recipe(name)
        return cache[name]

    return get


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
