"""Regenerate the JSON fixtures under src/hpsig/fixtures and sanity-check them.

Run from the repository root:  python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import itertools
import sys
from pathlib import Path

import numpy as np

from hpsig import io
from hpsig.covers import build_cover, cyclic_group, direct_product, FiniteGroupData, Irrep
from hpsig.simplicial import build_complex, certify_manifold, product

OUT = Path(__file__).resolve().parents[1] / "src" / "hpsig" / "fixtures"

# 9-vertex complex projective plane; labels chosen so the lexicographically
# normalised orientation has signature +1
CP2_9 = [
    (0, 1, 2, 3, 4), (0, 1, 2, 3, 5), (0, 1, 2, 4, 5), (0, 1, 3, 4, 6), (0, 1, 3, 5, 7),
    (0, 1, 3, 6, 7), (0, 1, 4, 5, 6), (0, 1, 5, 6, 8), (0, 1, 5, 7, 8), (0, 1, 6, 7, 8),
    (0, 2, 3, 4, 8), (0, 2, 3, 5, 7), (0, 2, 3, 6, 7), (0, 2, 3, 6, 8), (0, 2, 4, 5, 7),
    (0, 2, 4, 7, 8), (0, 2, 6, 7, 8), (0, 3, 4, 6, 8), (0, 4, 5, 6, 8), (0, 4, 5, 7, 8),
    (1, 2, 3, 4, 8), (1, 2, 3, 5, 8), (1, 2, 4, 5, 6), (1, 2, 4, 6, 7), (1, 2, 4, 7, 8),
    (1, 2, 5, 6, 8), (1, 2, 6, 7, 8), (1, 3, 4, 6, 7), (1, 3, 4, 7, 8), (1, 3, 5, 7, 8),
    (2, 3, 5, 6, 7), (2, 3, 5, 6, 8), (2, 4, 5, 6, 7), (3, 4, 5, 6, 7), (3, 4, 5, 6, 8),
    (3, 4, 5, 7, 8),
]

RP2_6 = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (1, 3, 4), (1, 3, 5), (2, 3, 5), (2, 4, 5),
]


def torus_7():
    tris = set()
    for i in range(7):
        tris.add(tuple(sorted((i, (i + 1) % 7, (i + 3) % 7))))
        tris.add(tuple(sorted((i, (i + 2) % 7, (i + 3) % 7))))
    return sorted(tris)


def cylinder(layers: int = 3):
    tris = []
    for o in range(0, 3 * (layers - 1), 3):
        for i in range(3):
            j = (i + 1) % 3
            tris.append(tuple(sorted((o + i, o + j, o + 3 + i))))
            tris.append(tuple(sorted((o + j, o + 3 + i, o + 3 + j))))
    return sorted(tris)


# lattice step of each label difference on the 7-vertex torus:
# vertex label(a, b) = a + 3b mod 7
_STEP = {1: (1, 0), 2: (-1, 1), 3: (0, 1), 4: (0, -1), 5: (1, -1), 6: (-1, 0)}


def torus_lattice_cocycle():
    """Deck-group coordinates (m, n) of every edge for the universal cover of the torus."""
    out = {}
    for v, w in itertools.combinations(range(7), 2):
        step = _STEP[(w - v) % 7]
        lam = (v + step[0] - w, step[1])  # p(v) + step - p(w) with p(x) = (x, 0)
        n = lam[1]
        m, r = divmod(lam[0] + 3 * n, 7)
        assert r == 0
        out[(v, w)] = (m, n)
    return out


def s3_group() -> FiniteGroupData:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(a[b[k]] for k in range(3))] for b in perms] for a in perms]

    def sign(p):
        return -1 if sum(p[i] > p[j] for i in range(3) for j in range(i + 1, 3)) % 2 else 1

    basis = np.array([[1, -1, 0], [1, 1, -2]], dtype=float)
    basis /= np.linalg.norm(basis, axis=1)[:, None]
    std = []
    for p in perms:
        P = np.zeros((3, 3))
        for k in range(3):
            P[p[k], k] = 1.0
        std.append(basis @ P @ basis.T)
    n = len(perms)
    irreps = [
        Irrep("trivial", 1, np.ones((n, 1, 1), dtype=complex)),
        Irrep("sign", 1, np.array([sign(p) for p in perms], dtype=complex).reshape(n, 1, 1)),
        Irrep("standard", 2, np.array(std, dtype=complex)),
    ]
    elements = ["".join(map(str, p)) for p in perms]
    return FiniteGroupData.from_table(elements, table, irreps=irreps, name="S3")


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    complexes = {}
    for d in range(1, 6):
        complexes[f"sphere_d{d}"] = list(itertools.combinations(range(d + 2), d + 1))
    complexes["circle_3"] = [(0, 1), (1, 2), (0, 2)]
    complexes["torus_7"] = torus_7()
    complexes["rp2_6"] = RP2_6
    complexes["cp2_9"] = CP2_9
    complexes["cylinder"] = cylinder()
    complexes["interval"] = [(0, 1)]
    complexes["triangle"] = [(0, 1, 2)]
    complexes["simplex_5"] = [tuple(range(6))]
    complexes["cp2_minus_star"] = [f for f in CP2_9 if 0 not in f]
    T = build_complex(torus_7())
    TI = product(T, build_complex([(0, 1)]))
    complexes["torus_x_interval"] = [tuple(int(x) for x in s) for s in TI.maximal_labelled()]

    for name, facets in complexes.items():
        K = build_complex([tuple(f) for f in facets], name=name)
        io.write_json(OUT / f"{name}.json", io.complex_to_json(K))

    groups = {
        "z2": cyclic_group(2),
        "z3": cyclic_group(3),
        "z4": cyclic_group(4),
        "z2xz2": direct_product(cyclic_group(2), cyclic_group(2)),
        "s3": s3_group(),
    }
    for name, G in groups.items():
        obj = io.group_to_json(G)
        obj["name"] = name
        io.write_json(OUT / f"group_{name}.json", obj)

    lattice = torus_lattice_cocycle()
    cocycles = {
        "circle_3_z3": {(0, 1): 1, (1, 2): 0, (0, 2): 0},
        "circle_3_z": {(0, 1): (1,), (1, 2): (0,), (0, 2): (0,)},
        "torus_7_z2": {e: m % 2 for e, (m, n) in lattice.items()},
        "torus_7_z3": {e: m % 3 for e, (m, n) in lattice.items()},
        "torus_7_z4": {e: m % 4 for e, (m, n) in lattice.items()},
        "torus_7_z2xz2": {e: 2 * (m % 2) + (n % 2) for e, (m, n) in lattice.items()},
        "torus_7_zz": {e: (m, n) for e, (m, n) in lattice.items()},
        # image in the rotation subgroup {e, (120), (201)} of S3
        "torus_7_s3": {e: (0, 3, 4)[m % 3] for e, (m, n) in lattice.items()},
        "cp2_9_z2": {tuple(e): 0 for e in itertools.combinations(range(9), 2)},
        "cp2_9_z3": {tuple(e): 0 for e in itertools.combinations(range(9), 2)},
    }
    for name, coc in cocycles.items():
        io.write_json(OUT / f"cocycle_{name}.json", io.cocycle_to_json(coc))

    # sanity checks
    for name in ("torus_7", "cp2_9", "sphere_d2", "sphere_d4"):
        cert = certify_manifold(io.load_fixture(name))
        assert cert.fundamental_cycle is not None, name
    assert certify_manifold(io.load_fixture("rp2_6")).fundamental_cycle is None
    assert io.load_fixture("cp2_9").f_vector == (9, 36, 84, 90, 36)
    torus = io.load_fixture("torus_7")
    for name, gname in (("torus_7_z3", "z3"), ("torus_7_z2xz2", "z2xz2"), ("torus_7_s3", "s3")):
        build_cover(torus, io.load_group(OUT / f"group_{gname}.json"), io.load_cocycle(OUT / f"cocycle_{name}.json"))
    print(f"wrote {len(list(OUT.glob('*.json')))} fixtures to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
