import itertools

import numpy as np
import pytest

import oracles
from conftest import cover_fixture, load
from hpsig import io, linalg
from hpsig.chain import BasedChainComplex, homology_ranks
from hpsig.covers import (
    FiniteGroupData,
    Irrep,
    build_cover,
    cyclic_group,
    direct_product,
    gauge_transform,
    holonomy,
    materialize_total_space,
    trivial_cover,
    twisted_boundary,
)
from hpsig.errors import CocycleNotFlat, MalformedInput, MissingEdge, NotAPath, UnknownIrrep
from hpsig.simplicial import boundary_matrix, simplex_boundary_sphere

OMEGA = np.exp(2j * np.pi / 3)
COVER_FIXTURES = [("torus_7", "z2"), ("torus_7", "z3"), ("torus_7", "z4"), ("torus_7", "z2xz2"),
                  ("torus_7", "s3"), ("cp2_9", "z2"), ("cp2_9", "z3")]


def circle_z3():
    return build_cover(load("circle_3"), cyclic_group(3), {(0, 1): 1, (1, 2): 0, (0, 2): 0})


def twisted_complex(cover, rho):
    b = twisted_boundary(cover, rho)
    m = cover.group.irrep(rho).dim
    ranks = tuple(cover.base.n(p) * m for p in range(cover.base.dim + 1))
    return BasedChainComplex(tuple(b), ranks, linalg.kind(b[1]))


# --- groups -------------------------------------------------------------------------


@pytest.mark.parametrize("name,order", [("z2", 2), ("z3", 3), ("z4", 4), ("z2xz2", 4), ("s3", 6)])
def test_group_files(name, order):
    G = io.load_group(io.fixture_path(f"group_{name}"))
    assert G.order == order
    assert sum(r.dim ** 2 for r in G.irreps) == order
    for a, b, c in itertools.product(range(order), repeat=3):
        assert G.table[G.table[a, b], c] == G.table[a, G.table[b, c]]
    for r in G.irreps:
        m = r.matrices
        assert np.allclose(m[G.identity], np.eye(r.dim), atol=1e-12)
        for g, h in itertools.product(range(order), repeat=2):
            assert np.abs(m[g] @ m[h] - m[G.table[g, h]]).max() <= 1e-12


def test_abelian_characters_are_distinct():
    G = direct_product(cyclic_group(2), cyclic_group(3))
    vals = {tuple(np.round(r.matrices.ravel(), 9)) for r in G.irreps}
    assert len(vals) == 6


def test_bad_tables_rejected():
    with pytest.raises(MalformedInput):
        FiniteGroupData.from_table((0, 1), [[0, 1], [0, 1]])
    s3 = io.load_group(io.fixture_path("group_s3"))
    with pytest.raises(MalformedInput):
        FiniteGroupData.from_table(s3.elements, s3.table)  # nonabelian without irreps


def test_non_homomorphism_rejected():
    bad = Irrep("bad", 1, np.array([1, 1j], dtype=complex).reshape(2, 1, 1))
    triv = Irrep("triv", 1, np.ones((2, 1, 1), dtype=complex))
    with pytest.raises(MalformedInput):
        FiniteGroupData.from_table((0, 1), [[0, 1], [1, 0]], irreps=[triv, bad])


# --- cover construction -----------------------------------------------------------


def test_nonflat_cocycle_rejected():
    K = simplex_boundary_sphere(2)
    coc = {e: 0 for e in itertools.combinations(range(4), 2)}
    coc[(0, 1)] = 1
    with pytest.raises(CocycleNotFlat):
        build_cover(K, cyclic_group(2), coc)


def test_missing_edge_rejected():
    with pytest.raises(MissingEdge):
        build_cover(load("circle_3"), cyclic_group(3), {(0, 1): 1, (1, 2): 0})


@pytest.mark.parametrize("base,group", COVER_FIXTURES)
def test_cover_fixtures_are_flat_and_proper(base, group):
    cover = cover_fixture(base, group)
    G, E = cover.group, cover.edge_element
    for a, b in cover.base.simplices[1].tolist():
        assert E[b, a] == G.inv(int(E[a, b]))
    from hpsig.simplicial import bounded_geometry_constant

    assert cover.fiber_bound() <= bounded_geometry_constant(cover.base)


def test_holonomy():
    cover = circle_z3()
    assert holonomy(cover, [0]) == cover.group.identity
    assert holonomy(cover, [0, 1, 2, 0]) == 1
    torus = cover_fixture("torus_7", "z3")
    for tri in torus.base.labelled(2):
        assert holonomy(torus, list(tri) + [tri[0]]) == torus.group.identity
    with pytest.raises(NotAPath):
        holonomy(cover, [0, 7])


# --- twisted boundaries ---------------------------------------------------------


def test_trivial_irrep_gives_base_matrices(torus):
    K, _ = torus
    cover = cover_fixture("torus_7", "z3")
    b = twisted_boundary(cover, "chi0")
    for p in range(1, 3):
        assert linalg.max_abs(linalg.to_complex(b[p]) - boundary_matrix(K, p)) == 0


def test_circle_z3_twisted_matrix():
    cover = circle_z3()
    rho = next(r for r in cover.group.irreps if np.isclose(r.matrices[1, 0, 0], OMEGA))
    b1 = linalg.to_complex(twisted_boundary(cover, rho)[1]).toarray()
    assert b1.shape == (3, 3)
    off = np.abs(b1 - np.round(b1.real)) > 1e-12
    assert off.sum() == 1
    assert np.isclose(abs(np.linalg.det(b1)), abs(1 - OMEGA))
    assert linalg.exact_rank(twisted_boundary(cover, rho)[1]) == 3


def test_unknown_irrep():
    with pytest.raises(UnknownIrrep):
        twisted_boundary(circle_z3(), "nope")


def test_circle_cover_matches_nine_gon():
    cover = circle_z3()
    total = oracles.betti(oracles.nine_gon())
    twisted = np.zeros(2, dtype=int)
    for rho in cover.group.irreps:
        twisted += np.array(homology_ranks(twisted_complex(cover, rho))) * rho.dim
    assert twisted.tolist() == total == [1, 1]


@pytest.mark.parametrize("base,group", [c for c in COVER_FIXTURES if c[0] == "torus_7"])
def test_twisted_homology_matches_total_space(base, group):
    cover = cover_fixture(base, group)
    twisted = np.zeros(3, dtype=int)
    for rho in cover.group.irreps:
        E = twisted_complex(cover, rho)
        assert E.squares_to_zero() <= 1e-12
        twisted += np.array(homology_ranks(E)) * rho.dim
    total, _ = materialize_total_space(cover)
    facets = [tuple(f) for f in total.maximal_labelled()]
    assert twisted.tolist() == oracles.betti(facets)


def test_materialized_total_space_matches_independent_lift():
    cover = cover_fixture("torus_7", "z3")
    total, lifted = materialize_total_space(cover)
    ref = oracles.cyclic_lift([tuple(f) for f in cover.base.labelled(2)], 3, cover.cocycle())
    assert sorted(tuple(f) for f in total.maximal_labelled()) == sorted(ref)


def test_trivial_cover_is_disjoint_copies():
    K = load("torus_7")
    cover = trivial_cover(K, cyclic_group(2))
    total, _ = materialize_total_space(cover)
    assert total.f_vector == tuple(2 * n for n in K.f_vector)


@pytest.mark.parametrize("seed", range(5))
def test_gauge_invariance_of_twisted_ranks(seed):
    cover = cover_fixture("torus_7", "z4")
    rng = np.random.default_rng(seed)
    g = gauge_transform(cover, rng.integers(0, 4, cover.base.n_vertices))
    for rho in cover.group.irreps:
        assert homology_ranks(twisted_complex(cover, rho)) == homology_ranks(twisted_complex(g, rho))


def test_nonabelian_twisted_complex_squares_to_zero():
    cover = cover_fixture("torus_7", "s3")
    for rho in cover.group.irreps:
        E = twisted_complex(cover, rho)
        assert E.squares_to_zero() <= 1e-12
