import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hpsig import io  # noqa: E402
from hpsig.simplicial import certify_manifold  # noqa: E402

CLOSED_ORIENTABLE = ["sphere_d1", "sphere_d2", "sphere_d3", "sphere_d4", "sphere_d5",
                     "circle_3", "torus_7", "cp2_9"]
EVEN_CLOSED = ["sphere_d2", "sphere_d4", "torus_7", "cp2_9"]


def load(name: str):
    return io.load_fixture(name)


def cycle_of(K):
    return certify_manifold(K).fundamental_cycle


def cover_fixture(base: str, group: str, cocycle: str | None = None):
    from hpsig.covers import build_cover

    K = load(base)
    G = io.load_group(io.fixture_path(f"group_{group}"))
    coc = io.load_cocycle(io.fixture_path(f"cocycle_{cocycle or base + '_' + group}"))
    return build_cover(K, G, coc)


@pytest.fixture(scope="session")
def cp2():
    K = load("cp2_9")
    return K, cycle_of(K)


@pytest.fixture(scope="session")
def torus():
    K = load("torus_7")
    return K, cycle_of(K)


# acceptance lines are collected here and echoed in the terminal summary
ACCEPTANCE: dict = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HPSIG_STRETCH", "1") == "0":
        skip = pytest.mark.skip(reason="HPSIG_STRETCH=0")
        for item in items:
            if "stretch" in item.keywords:
                item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
