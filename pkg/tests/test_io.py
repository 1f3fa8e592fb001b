import json

import numpy as np
import pytest

from hpsig import io
from hpsig.errors import MalformedInput

COMPLEXES = sorted(p.stem for p in io.FIXTURE_DIR.glob("*.json")
                   if not p.stem.startswith(("group_", "cocycle_")))
GROUPS = sorted(p.stem for p in io.FIXTURE_DIR.glob("group_*.json"))
COCYCLES = sorted(p.stem for p in io.FIXTURE_DIR.glob("cocycle_*.json"))


def same_complex(K, L):
    return (K.vertices == L.vertices and K.f_vector == L.f_vector
            and all(np.array_equal(K.simplices[p], L.simplices[p]) for p in range(K.dim + 1)))


def test_fixture_inventory():
    assert len(COMPLEXES) >= 15 and len(GROUPS) == 5 and len(COCYCLES) >= 8


@pytest.mark.parametrize("name", COMPLEXES)
def test_complex_round_trip(name, tmp_path):
    K = io.load_fixture(name)
    text = json.dumps(io.complex_to_json(K))
    L = io.complex_from_json(json.loads(text))
    assert same_complex(K, L) and L.name == K.name
    out = tmp_path / "k.json"
    io.write_json(out, io.complex_to_json(L))
    assert same_complex(K, io.load_complex(out))
    # writing is a fixed point after the first pass
    assert io.complex_to_json(io.load_complex(out)) == io.complex_to_json(L)


@pytest.mark.parametrize("name", GROUPS)
@pytest.mark.parametrize("with_irreps", [None, True])
def test_group_round_trip(name, with_irreps):
    G = io.load_group(io.fixture_path(name))
    H = io.group_from_json(json.loads(json.dumps(io.group_to_json(G, with_irreps))))
    assert H.elements == G.elements and np.array_equal(H.table, G.table)
    assert [r.label for r in H.irreps] == [r.label for r in G.irreps]
    for a, b in zip(G.irreps, H.irreps):
        assert np.allclose(a.matrices, b.matrices, atol=1e-12)


@pytest.mark.parametrize("name", COCYCLES)
def test_cocycle_round_trip(name):
    c = io.load_cocycle(io.fixture_path(name))
    assert io.cocycle_from_json(json.loads(json.dumps(io.cocycle_to_json(c)))) == c


def test_cocycle_dict_form():
    obj = {"cocycle": [[0, 1, 2], [1, 2, [1, 0]]]}
    assert io.cocycle_from_json(obj) == [((0, 1), 2), ((1, 2), (1, 0))]


@pytest.mark.parametrize("obj", [[], {"facets": []}, {"maximal_simplices": "x"}, {"maximal_simplices": [1, 2]}])
def test_malformed_complex(obj):
    with pytest.raises(MalformedInput):
        io.complex_from_json(obj)


@pytest.mark.parametrize("obj", [{}, {"elements": [0]}, None])
def test_malformed_group(obj):
    with pytest.raises(MalformedInput):
        io.group_from_json(obj)


@pytest.mark.parametrize("obj", ["x", [[0, 1]], {"cocycle": 3}])
def test_malformed_cocycle(obj):
    with pytest.raises(MalformedInput):
        io.cocycle_from_json(obj)


def test_sha256_is_stable():
    p = io.fixture_path("torus_7")
    assert io.sha256(p) == io.sha256(p) and len(io.sha256(p)) == 64


def test_nonabelian_group_needs_irreps():
    G = io.load_group(io.fixture_path("group_s3"))
    with pytest.raises(MalformedInput):
        io.group_from_json(io.group_to_json(G, include_irreps=False))
