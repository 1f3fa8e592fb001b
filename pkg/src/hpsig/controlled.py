"""Finite-matrix model of geometrically controlled operators.

Index sets are mapped into a metric control space; an operator's propagation
is the largest control distance across its nonzero entries.  Infinite spaces
are modelled by finite windows, and the existential "supported near a
cocompact set" is replaced by an explicit radius around the orbit of a core
point.

Distances are kept in a *raw* exact form (squared integer length for lattice
windows, hop counts for graphs) so that all comparisons are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .errors import NoGroupAction, NotASubset, ShapeMismatch

INF = math.inf


# --- control spaces -----------------------------------------------------------------


class ZWindow:
    """Lattice points of a box in Z^n with the Euclidean metric.

    ``translations`` generates a group of translations acting on the ambient
    lattice (``None``: no action declared, ``[]``: the trivial group).  With
    ``infinite=True`` the box stands in for all of Z^n: support on a face of
    the box counts as escaping to infinity unless some translation moves
    along that axis.
    """

    def __init__(self, lo, hi, translations=None, infinite: bool = False, core=None):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=np.int64))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=np.int64))
        if self.lo.shape != self.hi.shape or np.any(self.hi < self.lo):
            raise ValueError("bad window bounds")
        self.dim = self.lo.shape[0]
        axes = [np.arange(a, b + 1) for a, b in zip(self.lo, self.hi)]
        self.points = np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, self.dim)
        self.translations = (
            None if translations is None
            else np.asarray(translations, dtype=np.int64).reshape(-1, self.dim)
        )
        self.infinite = infinite
        if core is None:
            core = np.clip(np.zeros(self.dim, dtype=np.int64), self.lo, self.hi)
        self.core = np.asarray(core, dtype=np.int64)
        self._orbit_cache: dict = {}

    def __len__(self) -> int:
        return self.points.shape[0]

    def index(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64).reshape(-1, self.dim) - self.lo
        widths = self.hi - self.lo + 1
        idx = np.zeros(c.shape[0], dtype=np.int64)
        for j in range(self.dim):
            idx = idx * widths[j] + c[:, j]
        return idx

    def raw(self, i, j) -> np.ndarray:
        diff = self.points[np.asarray(i)] - self.points[np.asarray(j)]
        return np.sum(diff * diff, axis=-1)

    @staticmethod
    def metric(raw) -> float:
        return math.sqrt(raw)

    @staticmethod
    def le_sum(r, r1, r2) -> bool:
        """Exact ``sqrt(r) <= sqrt(r1) + sqrt(r2)`` for nonnegative integers."""
        x = r - r1 - r2
        return x <= 0 or x * x <= 4 * r1 * r2

    @staticmethod
    def le(r, radius: float) -> bool:
        return r <= radius * radius

    def translate(self, g: np.ndarray) -> np.ndarray:
        """Partial permutation of window points by translation ``g`` (-1 off the window)."""
        moved = self.points + g
        inside = np.all((moved >= self.lo) & (moved <= self.hi), axis=1)
        out = -np.ones(len(self), dtype=np.int64)
        out[inside] = self.index(moved[inside])
        return out

    def _orbit_points(self, radius: float) -> np.ndarray:
        if self.translations is None or self.translations.shape[0] == 0:
            return self.core[None, :]
        gens = self.translations
        span = float(np.max(self.hi - self.lo)) * math.sqrt(self.dim) + radius
        shortest = float(np.min(np.linalg.norm(gens, axis=1)))
        M = int(math.ceil(span / shortest)) + 1
        coeffs = np.array(list(itertools.product(range(-M, M + 1), repeat=gens.shape[0])))
        return self.core + coeffs @ gens

    def orbit_raw(self, idx: np.ndarray, radius: float) -> np.ndarray:
        """Raw distance from each point to the orbit of the core (within reach of ``radius``)."""
        key = round(radius, 9)
        if key not in self._orbit_cache:
            orb = self._orbit_points(radius)
            d = self.points[:, None, :] - orb[None, :, :]
            self._orbit_cache[key] = np.min(np.sum(d * d, axis=-1), axis=1)
        return self._orbit_cache[key][np.asarray(idx)]

    def escaping(self, idx: np.ndarray) -> np.ndarray:
        """Support points that leave an infinite window along an axis no translation covers."""
        idx = np.asarray(idx)
        if not self.infinite:
            return np.zeros(idx.shape, dtype=bool)
        covered = np.zeros(self.dim, dtype=bool)
        if self.translations is not None and self.translations.shape[0]:
            covered = np.any(self.translations != 0, axis=0)
        pts = self.points[idx]
        on_face = (pts == self.lo) | (pts == self.hi)
        return np.any(on_face & ~covered, axis=-1)

    @property
    def has_action(self) -> bool:
        return self.translations is not None

    def action_perms(self) -> list:
        if self.translations is None:
            return []
        return [self.translate(g) for g in self.translations]


class GraphSpace:
    """Vertex set of a graph with the hop metric, optionally with a group of
    automorphisms given as vertex permutations (all group elements)."""

    def __init__(self, dist: np.ndarray, group_perms=None, core: int = 0):
        self.dist = np.asarray(dist)
        self.group_perms = None if group_perms is None else [np.asarray(p) for p in group_perms]
        self.core = core
        self.infinite = False

    def __len__(self) -> int:
        return self.dist.shape[0]

    @classmethod
    def from_complex(cls, K, group_perms=None) -> "GraphSpace":
        n = K.n_vertices
        if K.dim >= 1:
            e = K.simplices[1]
            adj = sp.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
        else:
            adj = sp.csr_matrix((n, n))
        dist = shortest_path(adj, directed=False, unweighted=True)
        return cls(dist, group_perms)

    @classmethod
    def from_cover(cls, cover) -> "GraphSpace":
        """Total space of a finite cover with its deck action ``(v, h) -> (v, g h)``."""
        from .covers import materialize_total_space

        total, _ = materialize_total_space(cover)
        G = cover.group
        n = G.order
        labels = np.asarray(total.vertices)
        pos = {int(v): i for i, v in enumerate(labels)}
        perms = []
        for g in range(n):
            image = (labels // n) * n + G.table[g, labels % n]
            perms.append(np.array([pos[int(x)] for x in image], dtype=np.int64))
        return cls.from_complex(total, perms)

    def raw(self, i, j) -> np.ndarray:
        return self.dist[np.asarray(i), np.asarray(j)]

    @staticmethod
    def metric(raw) -> float:
        return float(raw)

    @staticmethod
    def le_sum(r, r1, r2) -> bool:
        return r <= r1 + r2

    @staticmethod
    def le(r, radius: float) -> bool:
        return r <= radius

    @property
    def has_action(self) -> bool:
        return self.group_perms is not None

    def orbit_raw(self, idx: np.ndarray, radius: float = 0.0) -> np.ndarray:
        if not self.group_perms:
            return self.dist[np.asarray(idx), self.core]
        orbit = np.unique([p[self.core] for p in self.group_perms])
        return np.min(self.dist[np.asarray(idx)][..., orbit], axis=-1)

    def escaping(self, idx: np.ndarray) -> np.ndarray:
        return np.zeros(np.asarray(idx).shape, dtype=bool)

    def action_perms(self) -> list:
        return [] if self.group_perms is None else list(self.group_perms)


# --- operators ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ControlledOperator:
    """Matrix ``A: C[S] -> C[T]`` with control maps ``c_dom: S -> P``, ``c_cod: T -> P``."""

    matrix: sp.csr_matrix
    c_dom: np.ndarray
    c_cod: np.ndarray
    space: object
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix)
        m.eliminate_zeros()
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.c_cod), len(self.c_dom)):
            raise ShapeMismatch(f"matrix {m.shape} vs control maps ({len(self.c_cod)}, {len(self.c_dom)})")

    @property
    def shape(self):
        return self.matrix.shape

    def support(self):
        coo = self.matrix.tocoo()
        return coo.row, coo.col

    @property
    def propagation_raw(self):
        if "prop" not in self._cache:
            r, c = self.support()
            raw = self.space.raw(self.c_cod[r], self.c_dom[c]) if r.size else np.zeros(0)
            self._cache["prop"] = raw.max().item() if raw.size else 0
        return self._cache["prop"]

    @property
    def propagation(self) -> float:
        """Least K with ``A[t, s] = 0`` whenever ``d(c(t), c(s)) > K``."""
        return self.space.metric(self.propagation_raw)

    @property
    def coeff_bound(self) -> float:
        data = self.matrix.data
        return float(np.abs(data).max()) if data.size else 0.0

    def compose(self, other: "ControlledOperator") -> "ControlledOperator":
        """``self @ other``; bounds are recomputed from the product."""
        return compose(self, other)

    def adjoint(self) -> "ControlledOperator":
        return adjoint(self)

    def __add__(self, other: "ControlledOperator") -> "ControlledOperator":
        _same_frame(self, other)
        return ControlledOperator(self.matrix + other.matrix, self.c_dom, self.c_cod, self.space)

    def __sub__(self, other: "ControlledOperator") -> "ControlledOperator":
        _same_frame(self, other)
        return ControlledOperator(self.matrix - other.matrix, self.c_dom, self.c_cod, self.space)

    def is_equivariant(self, dom_perms, cod_perms) -> bool:
        """``A`` commutes with the (partial) permutation actions on S and T."""
        A = self.matrix.tocoo()
        entries = {(int(r), int(c)): v for r, c, v in zip(A.row, A.col, A.data)}
        for ps, pt in zip(dom_perms, cod_perms):
            for (r, c), v in entries.items():
                r2, c2 = pt[r], ps[c]
                if r2 < 0 or c2 < 0:
                    continue
                if entries.get((int(r2), int(c2)), 0) != v:
                    return False
            # entries appearing only in the image
            inv_t = {int(x): i for i, x in enumerate(pt) if x >= 0}
            inv_s = {int(x): i for i, x in enumerate(ps) if x >= 0}
            for (r, c), v in entries.items():
                if r in inv_t and c in inv_s and entries.get((inv_t[r], inv_s[c]), 0) != v:
                    return False
        return True


def _same_frame(A: ControlledOperator, B: ControlledOperator) -> None:
    if A.shape != B.shape or not (
        np.array_equal(A.c_dom, B.c_dom) and np.array_equal(A.c_cod, B.c_cod) and A.space is B.space
    ):
        raise ShapeMismatch("operators live on different index sets or control spaces")


def compose(A: ControlledOperator, B: ControlledOperator) -> ControlledOperator:
    if A.shape[1] != B.shape[0] or not np.array_equal(A.c_dom, B.c_cod) or A.space is not B.space:
        raise ShapeMismatch("codomain of the right factor is not the domain of the left")
    return ControlledOperator(A.matrix @ B.matrix, B.c_dom, A.c_cod, A.space)


def adjoint(A: ControlledOperator) -> ControlledOperator:
    return ControlledOperator(A.matrix.conj().T.tocsr(), A.c_cod, A.c_dom, A.space)


def fiber_overlap(A: ControlledOperator, B: ControlledOperator) -> int:
    """Largest number of middle indices contributing to a single entry of ``A B``."""
    a = A.matrix.copy()
    a.data = np.ones_like(a.data, dtype=np.int64)
    b = B.matrix.copy()
    b.data = np.ones_like(b.data, dtype=np.int64)
    c = sp.csr_matrix(a.astype(np.int64) @ b.astype(np.int64))
    return int(c.data.max()) if c.nnz else 0


def identity(space, controls) -> ControlledOperator:
    n = len(controls)
    return ControlledOperator(sp.identity(n, dtype=np.int64, format="csr"), controls, controls, space)


# --- restriction idempotent ---------------------------------------------------------


def restriction_idempotent(space, c_S: np.ndarray, subset, c_T=None) -> ControlledOperator:
    """Diagonal 0/1 projection of ``C[S]`` onto ``C[T]``, ``T`` given by indices into S.

    ``c_T`` (if given) must agree with ``c_S`` on ``T``.
    """
    c_S = np.asarray(c_S)
    subset = np.asarray(list(subset), dtype=np.int64)
    n = len(c_S)
    if subset.size and (subset.min() < 0 or subset.max() >= n):
        raise NotASubset("index outside S")
    if np.unique(subset).size != subset.size:
        raise NotASubset("repeated index in T")
    if c_T is not None and not np.array_equal(np.asarray(c_T), c_S[subset]):
        raise NotASubset("control map of T does not factor through S")
    diag = np.zeros(n, dtype=np.int64)
    diag[subset] = 1
    return ControlledOperator(sp.diags(diag, format="csr", dtype=np.int64), c_S, c_S, space)


# --- pi-compact support and eventual equality ---------------------------------------


def witness_radius(A: ControlledOperator, radius_hint: float = 0.0) -> float:
    """Smallest radius r for which A is supported near the core orbit (``inf`` if escaping)."""
    space = A.space
    if not space.has_action:
        raise NoGroupAction("control space has no group action")
    r, c = A.support()
    if r.size == 0:
        return 0.0
    pts = np.concatenate([A.c_cod[r], A.c_dom[c]])
    if np.any(space.escaping(pts)):
        return INF
    raw = space.orbit_raw(pts, radius_hint)
    return space.metric(raw.max().item())


def is_pi_compactly_supported(A: ControlledOperator, radius: float) -> bool:
    """All nonzero entries have both control images within ``radius`` of the core orbit."""
    space = A.space
    if not space.has_action:
        raise NoGroupAction("control space has no group action")
    r, c = A.support()
    if r.size == 0:
        return True
    pts = np.concatenate([A.c_cod[r], A.c_dom[c]])
    if np.any(space.escaping(pts)):
        return False
    raw = space.orbit_raw(pts, radius)
    return bool(space.le(raw.max().item(), radius))


def eventually_equal(A: ControlledOperator, B: ControlledOperator, radius: float) -> bool:
    """``A - B`` is compactly supported modulo the group at the given radius."""
    _same_frame(A, B)
    return is_pi_compactly_supported(A - B, radius)


# --- simplicial certification -------------------------------------------------------


def simplicial_operators(K, C=None, include_subdivision: bool = True) -> dict:
    """Boundary, symmetrised duality and subdivision matrices as controlled operators.

    Simplices are controlled by their least vertex in the 1-skeleton metric of K;
    vertices of the subdivision go to the least vertex of the simplex they
    subdivide.
    """
    from . import linalg
    from .poincare import cap_duality, symmetrize
    from .simplicial import barycentric_subdivision, boundary_matrix

    space = GraphSpace.from_complex(K)
    ctrl = [K.simplices[p][:, 0] for p in range(K.dim + 1)]
    out = {}
    for p in range(1, K.dim + 1):
        out[f"b{p}"] = ControlledOperator(boundary_matrix(K, p), ctrl[p], ctrl[p - 1], space)
    if C is not None:
        Dt = symmetrize(cap_duality(K, C))
        for p, m in enumerate(Dt):
            half = linalg.to_complex(m) * 0.5
            out[f"Dtilde{p}"] = ControlledOperator(half, ctrl[p], ctrl[K.dim - p], space)
    if include_subdivision:
        sub = barycentric_subdivision(K)
        sd = sub.complex
        lead = np.array([K.simplices[q][i, 0] for q, i in sub.barycenter_of], dtype=np.int64)
        for p in range(K.dim + 1):
            c_sd = lead[sd.simplices[p][:, 0]]
            out[f"sd{p}"] = ControlledOperator(sub.chain_maps[p], ctrl[p], c_sd, space)
    return out


def certify_controlled(K, C=None, max_propagation: float = 2, max_coeff: float = 1) -> dict:
    ops = simplicial_operators(K, C)
    per = {
        name: {"propagation": op.propagation, "coeff_bound": op.coeff_bound}
        for name, op in ops.items()
    }
    ok = all(v["propagation"] <= max_propagation and v["coeff_bound"] <= max_coeff for v in per.values())
    return {"pass": ok, "operators": per}


# --- randomized property suite ------------------------------------------------------


def random_operator(rng, space, n_dom: int, n_cod: int, max_raw, density: float = 0.15,
                    c_dom=None, c_cod=None, values: int = 3) -> ControlledOperator:
    """Random integer operator with propagation (raw) at most ``max_raw``."""
    N = len(space)
    c_dom = rng.integers(0, N, n_dom) if c_dom is None else c_dom
    c_cod = rng.integers(0, N, n_cod) if c_cod is None else c_cod
    raw = space.raw(c_cod[:, None], c_dom[None, :])
    allowed = raw <= max_raw
    mask = allowed & (rng.random((n_cod, n_dom)) < density)
    vals = rng.integers(-values, values + 1, size=mask.sum())
    vals[vals == 0] = 1
    r, c = np.nonzero(mask)
    A = sp.csr_matrix((vals, (r, c)), shape=(n_cod, n_dom), dtype=np.int64)
    return ControlledOperator(A, np.asarray(c_dom), np.asarray(c_cod), space)


def _metric_axioms(space, rng, trials: int) -> bool:
    N = len(space)
    x, y, z = (rng.integers(0, N, trials) for _ in range(3))
    dxy, dyz, dxz = space.raw(x, y), space.raw(y, z), space.raw(x, z)
    ok = np.all(space.raw(x, x) == 0) and np.array_equal(dxy, space.raw(y, x))
    ok = ok and np.all((dxy > 0) | (x == y))
    ok = ok and all(space.le_sum(int(a), int(b), int(c)) for a, b, c in zip(dxz, dxy, dyz))
    return bool(ok)


def _action_isometric(space, rng, trials: int) -> bool:
    N = len(space)
    for perm in space.action_perms():
        x = rng.integers(0, N, trials)
        y = rng.integers(0, N, trials)
        keep = (perm[x] >= 0) & (perm[y] >= 0)
        if not np.array_equal(space.raw(x[keep], y[keep]), space.raw(perm[x[keep]], perm[y[keep]])):
            return False
    return True


def property_suite(seed: int = 0, trials: int = 1000, spaces: dict | None = None) -> dict:
    """Seeded randomized checks of the controlled-operator laws."""
    rng = np.random.default_rng(seed)
    if spaces is None:
        spaces = default_spaces()
    report: dict = {"seed": seed, "trials": trials, "laws": {}}
    laws = report["laws"]

    def record(name, ok, **extra):
        entry = laws.setdefault(name, {"pass": True, "checked": 0, "violations": 0})
        entry["checked"] += 1
        if not ok:
            entry["pass"] = False
            entry["violations"] += 1
        entry.update(extra)

    for label, space in spaces.items():
        record("metric_axioms", _metric_axioms(space, rng, trials), last_space=label)
        record("action_isometric", _action_isometric(space, rng, trials), last_space=label)

    names = list(spaces)
    for t in range(trials):
        space = spaces[names[t % len(names)]]
        N = len(space)
        nS, nT, nU = (int(x) for x in rng.integers(3, 12, 3))
        cS, cT, cU = rng.integers(0, N, nS), rng.integers(0, N, nT), rng.integers(0, N, nU)
        kA, kB = (int(x) for x in rng.integers(0, 5, 2))
        B = random_operator(rng, space, nS, nT, kB, 0.3, cS, cT)
        A = random_operator(rng, space, nT, nU, kA, 0.3, cT, cU)
        AB = compose(A, B)
        record("propagation_subadditive",
               space.le_sum(AB.propagation_raw, A.propagation_raw, B.propagation_raw))
        record("coeff_bound",
               AB.coeff_bound <= A.coeff_bound * B.coeff_bound * max(fiber_overlap(A, B), 1))
        Aadj = adjoint(A)
        record("adjoint_propagation", Aadj.propagation_raw == A.propagation_raw)
        record("adjoint_involution", (adjoint(Aadj).matrix != A.matrix).nnz == 0)
        record("compose_identity", (compose(A, identity(space, cT)).matrix != A.matrix).nnz == 0)

        # restriction idempotent
        sub = np.flatnonzero(rng.random(nT) < 0.5)
        P = restriction_idempotent(space, cT, sub, cT[sub])
        PP = compose(P, P).matrix
        record("idempotent_square", (PP != P.matrix).nnz == 0)
        record("idempotent_selfadjoint", (adjoint(P).matrix != P.matrix).nnz == 0)
        record("idempotent_propagation_zero", P.propagation_raw == 0)
        rows = compose(P, B).matrix.tocoo().row
        record("idempotent_image", bool(np.isin(rows, sub).all()))

        if space.has_action:
            _ideal_and_congruence(rng, space, record)
    report["pass"] = all(v["pass"] for v in laws.values())
    return report


def _compact_operator(rng, space, controls_dom, controls_cod, radius: float) -> ControlledOperator:
    """Random operator whose support lies within ``radius`` of the core orbit."""
    dom_ok = np.array([space.le(int(x), radius) for x in space.orbit_raw(controls_dom, radius)])
    cod_ok = np.array([space.le(int(x), radius) for x in space.orbit_raw(controls_cod, radius)])
    dom_ok &= ~space.escaping(controls_dom)
    cod_ok &= ~space.escaping(controls_cod)
    mask = cod_ok[:, None] & dom_ok[None, :] & (rng.random((len(controls_cod), len(controls_dom))) < 0.4)
    r, c = np.nonzero(mask)
    vals = rng.integers(1, 4, size=r.size) * rng.choice([-1, 1], size=r.size)
    A = sp.csr_matrix((vals, (r, c)), shape=mask.shape, dtype=np.int64)
    return ControlledOperator(A, controls_dom, controls_cod, space)


def _ideal_and_congruence(rng, space, record) -> None:
    N = len(space)
    n = int(rng.integers(4, 10))
    c = rng.integers(0, N, n)
    rA, rB = (float(x) for x in rng.integers(0, 3, 2))
    A = _compact_operator(rng, space, c, c, rA)
    B = _compact_operator(rng, space, c, c, rB)
    C = random_operator(rng, space, n, n, int(rng.integers(0, 3)), 0.3, c, c)
    wA, wB = witness_radius(A), witness_radius(B)
    record("compact_witness", wA <= rA + 1e-12 and wB <= rB + 1e-12)
    w_sum = witness_radius(A + B)
    record("ideal_sum", w_sum <= max(wA, wB) + 1e-12)
    record("ideal_adjoint", witness_radius(adjoint(A)) == wA)
    pC = C.propagation
    for prod in (compose(C, A), compose(A, C)):
        record("ideal_composition", witness_radius(prod, wA + pC) <= wA + pC + 1e-9)
    # eventual equality: reflexive, symmetric, transitive, congruence
    X = random_operator(rng, space, n, n, 2, 0.3, c, c)
    Y = X + A
    Z = Y + B
    record("evtl_reflexive", eventually_equal(X, X, 0.0))
    record("evtl_symmetric", eventually_equal(X, Y, wA) == eventually_equal(Y, X, wA))
    r_tr = max(wA, wB)
    record("evtl_transitive", (not (eventually_equal(X, Y, wA) and eventually_equal(Y, Z, wB)))
           or eventually_equal(X, Z, r_tr))
    congr = eventually_equal(compose(C, X), compose(C, Y), wA + pC) and eventually_equal(
        compose(X, C), compose(Y, C), wA + pC
    )
    record("evtl_congruence", congr)


def default_spaces() -> dict:
    from .io import load_fixture
    from .covers import build_cover, cyclic_group

    torus = load_fixture("torus_7")
    circle = load_fixture("circle_3")
    cover = build_cover(circle, cyclic_group(3), {(0, 1): 1, (1, 2): 0, (0, 2): 0})
    return {
        "Z[-20,20]": ZWindow([-20], [20], translations=[]),
        "Z^2[-6,6]^2": ZWindow([-6, -6], [6, 6], translations=[]),
        "Z[-20,20]/Z": ZWindow([-20], [20], translations=[[1]], infinite=True),
        "torus_7": GraphSpace.from_complex(torus, group_perms=[np.arange(7)]),
        "circle_3~Z/3": GraphSpace.from_cover(cover),
    }
