"""One test per acceptance criterion.

Each test records a PASS/FAIL line (with its wall time against the budget) in
``conftest.ACCEPTANCE``; the lines are printed as they complete and again in
the terminal summary.
"""

import io
import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE, CLOSED_ORIENTABLE, cover_fixture, cycle_of, load
from hpsig import io as hio
from hpsig.cli import run
from hpsig.covers import gauge_transform
from hpsig.errors import NotClosedOriented
from hpsig.poincare import build_hp, validate_hp
from hpsig.signature import (
    bordism_check,
    multisignature,
    product_epsilon,
    signature_of,
    trace_value,
    verify_product_signature,
)
from hpsig.controlled import certify_controlled, property_suite
from hpsig.simplicial import (
    barycentric_subdivision,
    certify_manifold,
    simplex_boundary_sphere,
    subdivide_cycle,
)

ALL_COMPLEXES = sorted(p.stem for p in hio.FIXTURE_DIR.glob("*.json")
                       if not p.stem.startswith(("group_", "cocycle_")))
BOUNDARY_FIXTURES = ["interval", "triangle", "cylinder", "simplex_5", "torus_x_interval", "cp2_minus_star"]
SMALL_COVERS = [("torus_7", "z2"), ("torus_7", "z3"), ("torus_7", "z4"), ("torus_7", "z2xz2"),
                ("cp2_9", "z2"), ("cp2_9", "z3")]


@contextmanager
def criterion(key: str, title: str, budget: float):
    """Time the body, enforce the budget and record the outcome line."""
    start = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed >= budget:
            note = " (over budget)"
            raise AssertionError(f"criterion {key} took {elapsed:.1f}s, budget {budget:.0f}s")
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{status}] criterion {key}: {title} ({elapsed:.2f}s / budget {budget:.0f}s){note}"
        ACCEPTANCE[key] = line
        print(line)


def cli(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, json.loads(buf.getvalue())


def test_criterion_1_cp2_signature():
    path = str(hio.fixture_path("cp2_9"))
    with criterion("1", "CP2 signature +1, reversed -1, cup-product oracle agrees (exact)", 10):
        code, rep = cli("signature", path, "--mode", "exact")
        res = rep["results"]
        assert code == 0 and res["signature"] == 1 and res["method"] == "exact"
        assert res["axioms"] == "pass" and res["cup_oracle"] == 1
        code, rep = cli("signature", path, "--mode", "exact", "--reverse")
        assert code == 0 and rep["results"]["signature"] == -1 and rep["results"]["cup_oracle"] == -1
    # independent dense rational oracle, outside the timed section
    K = load("cp2_9")
    C = cycle_of(K)
    facets = [tuple(f) for f in K.labelled(4)]
    assert oracles.cup_signature(facets, C.as_vector()) == 1
    assert oracles.cup_signature(facets, -C.as_vector()) == -1


def test_criterion_2_sphere_and_torus_baselines():
    with criterion("2", "boundary of the simplex (d = 2, 4) and the 7-vertex torus have signature 0", 5):
        for d in (2, 4):
            S = simplex_boundary_sphere(d)
            for mode in ("exact", "float"):
                assert signature_of(S, mode=mode) == 0
        T = load("torus_7")
        for mode in ("exact", "float"):
            assert signature_of(T, mode=mode) == 0


def test_criterion_3_axiom_suite():
    with criterion("3", "duality axioms on every closed orientable fixture; RP2 rejected", 30):
        for name in CLOSED_ORIENTABLE:
            K = load(name)
            rep = validate_hp(build_hp(K, cycle_of(K)))  # (iii) is checked at 1e-8
            assert rep["i"]["residual"] == 0, name
            assert rep["ii"]["residual_raw"] == 0, name
            assert rep["iii"]["pass"], name
            assert rep["pass"], name
        K = load("rp2_6")
        with pytest.raises(NotClosedOriented):
            build_hp(K, None)
        code, rep = cli("validate", str(hio.fixture_path("rp2_6")))
        assert code == 1 and rep["error"]["type"] == "NotClosedOriented"


def test_criterion_4_subdivision_invariance():
    with criterion("4", "one barycentric subdivision preserves the signature exactly", 300):
        for name in CLOSED_ORIENTABLE:
            K = load(name)
            C = cycle_of(K)
            sub = barycentric_subdivision(K)
            sC = subdivide_cycle(sub, C)
            assert sC.is_cycle()
            assert signature_of(sub.complex, sC) == signature_of(K, C), name


def test_criterion_5_products():
    with criterion("5", "S2xS2 = 0, CP2xS2 = 0, epsilon table", 120):
        S = load("sphere_d2")
        rep = verify_product_signature(S, S)
        assert rep["signature_product"] == 0 and rep["pass"]
        rep = verify_product_signature(load("cp2_9"), S)
        assert rep["signature_factors"] == [1, 0] and rep["signature_product"] == 0 and rep["pass"]
        for p in range(9):
            for q in range(9):
                assert product_epsilon(p, q) == (1 if p % 2 and q % 2 else 0)


@pytest.mark.stretch
def test_criterion_5_stretch_cp2_times_cp2():
    a = str(hio.fixture_path("cp2_9"))
    with criterion("5s", "CP2xCP2 signature 1 = 1*1 (sparse float, --stretch)", 1800):
        code, rep = cli("product", a, a, "--stretch", "--mode", "float")
        res = rep["results"]
        assert code == 0, rep["error"]
        assert res["signature_factors"] == [1, 1]
        assert res["signature_product"] == 1 and res["pass"]


def test_criterion_6_multisignature_consistency():
    with criterion("6", "sum of dim * sig over irreps equals the total space; trace equals base", 60):
        for base, group in SMALL_COVERS:
            cover = cover_fixture(base, group)
            ms = multisignature(cover, materialize=True)
            assert ms.weighted_sum() == ms.total_signature and ms.consistent, (base, group)
            assert trace_value(ms) == signature_of(cover.base), (base, group)


def test_criterion_7_bordism_vanishing():
    with criterion("7", "boundaries of the boundary fixtures have signature 0", 60):
        for name in BOUNDARY_FIXTURES:
            rep = bordism_check(load(name))
            assert rep["signature"] == 0 and rep["zero"], name


def test_criterion_8_controlled_laws():
    with criterion("8", "controlled-operator laws on 1000 random pairs; simplicial operators certified", 60):
        rep = property_suite(seed=0, trials=1000)
        laws = rep["laws"]
        assert rep["pass"], {k: v for k, v in laws.items() if not v["pass"]}
        assert laws["propagation_subadditive"]["checked"] == 1000
        assert laws["adjoint_propagation"]["checked"] == 1000
        for law in ("idempotent_square", "idempotent_selfadjoint", "ideal_sum", "ideal_adjoint",
                    "ideal_composition", "compact_witness", "evtl_congruence", "evtl_transitive"):
            assert laws[law]["checked"] > 0 and laws[law]["pass"], law
        for name in ALL_COMPLEXES:
            K = load(name)
            cert = certify_controlled(K, certify_manifold(K).fundamental_cycle, max_propagation=2, max_coeff=1)
            assert cert["pass"], name


def test_criterion_9_gauge_invariance():
    with criterion("9", "50 random gauge transformations leave the Z/3 torus multi-signature unchanged", 120):
        cover = cover_fixture("torus_7", "z3")
        ref = multisignature(cover, materialize=False).entries
        rng = np.random.default_rng(2024)
        for _ in range(50):
            g = gauge_transform(cover, rng.integers(0, 3, cover.base.n_vertices))
            assert multisignature(g, materialize=False).entries == ref
