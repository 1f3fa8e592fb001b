"""Oriented simplicial complexes and the operations that build or certify them.

Simplices are stored per degree as ``(n_p, p + 1)`` integer arrays of vertex
*indices*, each row strictly increasing and the rows in lexicographic order.
Orientation is carried by the global vertex order; explicit signs only live
in cycles and matrices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import (
    DegreeOutOfRange,
    DuplicateMaximalSimplex,
    EmptyInput,
    MalformedInput,
    NoBoundary,
    NonManifoldBoundary,
)

_KEY_LIMIT = 2**62


def _encode(rows: np.ndarray, base: int) -> np.ndarray:
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        keys = keys * base + rows[:, j]
    return keys


def _decode(keys: np.ndarray, base: int, width: int) -> np.ndarray:
    rows = np.empty((keys.shape[0], width), dtype=np.int64)
    rest = keys.copy()
    for j in range(width - 1, -1, -1):
        rows[:, j] = rest % base
        rest //= base
    return rows


def _fits(base: int, width: int) -> bool:
    return base**width < _KEY_LIMIT


def _unique_rows(rows: np.ndarray, base: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    width = rows.shape[1]
    if _fits(base, width):
        return _decode(np.unique(_encode(rows, base)), base, width)
    return np.unique(rows, axis=0)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class OrientedSimplicialComplex:
    """Finite simplicial complex with the orientation induced by vertex order.

    ``vertices`` holds the original labels in sorted order; ``simplices[p]``
    indexes into it.
    """

    vertices: tuple
    simplices: tuple
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def f_vector(self) -> tuple:
        return tuple(int(s.shape[0]) for s in self.simplices)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** p * n for p, n in enumerate(self.f_vector))

    def n(self, p: int) -> int:
        if 0 <= p <= self.dim:
            return self.simplices[p].shape[0]
        return 0

    def index_of(self, p: int, rows: np.ndarray) -> np.ndarray:
        """Indices of the given p-simplices (rows of vertex indices).

        Raises ``KeyError`` when a row is not a simplex of the complex.
        """
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, p + 1)
        base = self.n_vertices
        if _fits(base, p + 1):
            table = self._cache.get(("keys", p))
            if table is None:
                table = _encode(self.simplices[p], base)
                self._cache[("keys", p)] = table
            keys = _encode(rows, base)
            idx = np.searchsorted(table, keys)
            idx = np.minimum(idx, max(len(table) - 1, 0))
            if len(table) == 0 or np.any(table[idx] != keys):
                raise KeyError(f"not a {p}-simplex of {self.name or 'complex'}")
            return idx
        lookup = self._cache.get(("dict", p))
        if lookup is None:
            lookup = {tuple(r): i for i, r in enumerate(self.simplices[p].tolist())}
            self._cache[("dict", p)] = lookup
        try:
            return np.array([lookup[tuple(r)] for r in rows.tolist()], dtype=np.int64)
        except KeyError as exc:
            raise KeyError(f"not a {p}-simplex: {exc}") from None

    def contains(self, simplex: Sequence[Hashable]) -> bool:
        pos = {v: i for i, v in enumerate(self.vertices)}
        try:
            row = sorted(pos[v] for v in simplex)
        except KeyError:
            return False
        p = len(row) - 1
        if not 0 <= p <= self.dim:
            return False
        try:
            self.index_of(p, np.array([row]))
        except KeyError:
            return False
        return True

    def labelled(self, p: int) -> list:
        labels = self.vertices
        return [tuple(labels[i] for i in row) for row in self.simplices[p].tolist()]

    def maximal_simplices(self) -> list:
        """Maximal simplices as index rows, grouped by degree: ``[(p, rows), ...]``."""
        out = []
        for p in range(self.dim + 1):
            rows = self.simplices[p]
            if p == self.dim:
                out.append((p, rows))
                continue
            inc = _boundary_incidence(self, p + 1)
            covered = np.zeros(rows.shape[0], dtype=bool)
            covered[inc.rows] = True
            if not covered.all():
                out.append((p, rows[~covered]))
        return out

    def maximal_labelled(self) -> list:
        labels = self.vertices
        return [
            [labels[i] for i in row]
            for _, rows in self.maximal_simplices()
            for row in rows.tolist()
        ]

    def same_as(self, other: "OrientedSimplicialComplex") -> bool:
        return (
            self.vertices == other.vertices
            and len(self.simplices) == len(other.simplices)
            and all(np.array_equal(a, b) for a, b in zip(self.simplices, other.simplices))
        )


def _from_index_rows(
    n_vertices: int, rows_list: Iterable[np.ndarray], labels=None, name: str = ""
) -> OrientedSimplicialComplex:
    """Downward closure of index rows (each row strictly increasing)."""
    by_width: dict[int, list] = {}
    for rows in rows_list:
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size:
            by_width.setdefault(rows.shape[1], []).append(rows)
    if not by_width:
        raise EmptyInput("no simplices")
    top = max(by_width)
    layers: list = [None] * top
    above = None
    for width in range(top, 0, -1):
        parts = list(by_width.get(width, []))
        if above is not None:
            for j in range(above.shape[1]):
                parts.append(np.delete(above, j, axis=1))
        layer = _unique_rows(np.concatenate(parts, axis=0), n_vertices)
        layers[width - 1] = layer
        above = layer
    if labels is None:
        labels = tuple(range(n_vertices))
    present = layers[0][:, 0]
    if present.shape[0] != n_vertices:
        # drop unused vertices and renumber
        remap = -np.ones(n_vertices, dtype=np.int64)
        remap[present] = np.arange(present.shape[0])
        layers = [remap[layer] for layer in layers]
        labels = tuple(labels[i] for i in present)
        n_vertices = present.shape[0]
    return OrientedSimplicialComplex(
        vertices=tuple(labels), simplices=tuple(_readonly(x) for x in layers), name=name
    )


def build_complex(maximal_simplices, name: str = "") -> OrientedSimplicialComplex:
    """Downward closure of a list of simplices given as vertex tuples.

    >>> build_complex([[0, 1, 2]]).f_vector
    (3, 3, 1)
    """
    simplices = [tuple(s) for s in maximal_simplices]
    if not simplices or any(len(s) == 0 for s in simplices):
        raise EmptyInput("complex needs at least one nonempty simplex")
    seen = set()
    for s in simplices:
        key = frozenset(s)
        if len(key) != len(s):
            raise MalformedInput(f"repeated vertex in simplex {s}")
        if key in seen:
            raise DuplicateMaximalSimplex(f"simplex {sorted(s)} listed twice")
        seen.add(key)
    try:
        labels = tuple(sorted({v for s in simplices for v in s}))
    except TypeError as exc:
        raise MalformedInput(f"vertex labels are not mutually orderable: {exc}") from None
    pos = {v: i for i, v in enumerate(labels)}
    by_width: dict[int, list] = {}
    for s in simplices:
        by_width.setdefault(len(s), []).append(sorted(pos[v] for v in s))
    arrays = [np.array(v, dtype=np.int64) for v in by_width.values()]
    return _from_index_rows(len(labels), arrays, labels=labels, name=name)


# --- boundary -----------------------------------------------------------------


class Incidence(NamedTuple):
    """Nonzero pattern of a boundary-type matrix.

    ``src``/``dst`` name the vertices whose connecting edge transports the
    coefficient (equal when no transport is needed).
    """

    rows: np.ndarray
    cols: np.ndarray
    signs: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    shape: tuple


def _boundary_incidence(K: OrientedSimplicialComplex, p: int) -> Incidence:
    if not 1 <= p <= K.dim:
        raise DegreeOutOfRange(f"boundary degree {p} outside 1..{K.dim}")
    key = ("binc", p)
    if key in K._cache:
        return K._cache[key]
    simp = K.simplices[p]
    n = simp.shape[0]
    rows, cols, signs, src, dst = [], [], [], [], []
    col_ids = np.arange(n, dtype=np.int64)
    for i in range(p + 1):
        faces = np.delete(simp, i, axis=1)
        rows.append(K.index_of(p - 1, faces))
        cols.append(col_ids)
        signs.append(np.full(n, -1 if i % 2 else 1, dtype=np.int64))
        # the face that drops v0 is anchored at v1: transport v1 -> v0
        src.append(simp[:, 1] if i == 0 else simp[:, 0])
        dst.append(simp[:, 0])
    inc = Incidence(
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(signs),
        np.concatenate(src),
        np.concatenate(dst),
        (K.n(p - 1), n),
    )
    K._cache[key] = inc
    return inc


def boundary_matrix(K: OrientedSimplicialComplex, p: int) -> sp.csr_matrix:
    """Integer boundary matrix ``C_p -> C_{p-1}`` (rows: faces, cols: simplices)."""
    key = ("bmat", p)
    if key not in K._cache:
        inc = _boundary_incidence(K, p)
        m = sp.csr_matrix((inc.signs, (inc.rows, inc.cols)), shape=inc.shape, dtype=np.int64)
        K._cache[key] = m
    return K._cache[key]


def boundary_matrices(K: OrientedSimplicialComplex) -> list:
    """``[None, b_1, ..., b_d]`` so that ``b[p]`` is the degree-p boundary."""
    return [None] + [boundary_matrix(K, p) for p in range(1, K.dim + 1)]


# --- fundamental cycles and certification ---------------------------------------


@dataclass(frozen=True, eq=False)
class FundamentalCycle:
    """Signed sum of top simplices; ``coefficients[i]`` belongs to ``simplices[d][i]``."""

    complex: OrientedSimplicialComplex
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def dim(self) -> int:
        return self.complex.dim

    def as_vector(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=np.int64)

    def is_cycle(self) -> bool:
        if self.dim == 0:
            return True
        return not np.any(boundary_matrix(self.complex, self.dim) @ self.as_vector())

    def as_dict(self) -> dict:
        return dict(zip(self.complex.labelled(self.dim), self.coefficients.tolist()))


def orientation_reverse(C: FundamentalCycle) -> FundamentalCycle:
    return FundamentalCycle(C.complex, -C.as_vector())


@dataclass(frozen=True)
class ManifoldCertificate:
    is_pseudomanifold: bool
    is_closed: bool
    is_orientable: bool
    link_checks_passed: bool
    fundamental_cycle: FundamentalCycle | None
    n_components: int = 1
    n_boundary_ridges: int = 0

    def summary(self) -> dict:
        return {
            "is_pseudomanifold": self.is_pseudomanifold,
            "is_closed": self.is_closed,
            "is_orientable": self.is_orientable,
            "link_checks_passed": self.link_checks_passed,
            "has_fundamental_cycle": self.fundamental_cycle is not None,
            "components": self.n_components,
            "boundary_ridges": self.n_boundary_ridges,
        }


def _ridge_degrees(K: OrientedSimplicialComplex) -> np.ndarray:
    inc = _boundary_incidence(K, K.dim)
    return np.bincount(inc.rows, minlength=K.n(K.dim - 1))


def _is_pure(K: OrientedSimplicialComplex) -> bool:
    top = K.simplices[K.dim]
    closure = _from_index_rows(K.n_vertices, [top])
    return closure.f_vector == K.f_vector


def orient_facets(K: OrientedSimplicialComplex) -> tuple:
    """Propagate facet signs across ridges shared by exactly two facets.

    Returns ``(signs, consistent, n_components)``; the lexicographically least
    facet of each strongly connected component gets sign +1.
    """
    d = K.dim
    nf = K.n(d)
    if d == 0:
        return np.ones(nf, dtype=np.int8), True, nf
    inc = _boundary_incidence(K, d)
    order = np.lexsort((inc.cols, inc.rows))
    r, c, s = inc.rows[order], inc.cols[order], inc.signs[order]
    deg = np.bincount(r, minlength=K.n(d - 1))
    interior = deg[r] == 2
    r, c, s = r[interior], c[interior], s[interior]
    f, g = c[0::2], c[1::2]
    rel = (-s[0::2] * s[1::2]).astype(np.int8)
    a = np.concatenate([f, g])
    b = np.concatenate([g, f])
    rr = np.concatenate([rel, rel])
    order = np.lexsort((b, a))
    a, b, rr = a[order], b[order], rr[order]
    ptr = np.zeros(nf + 1, dtype=np.int64)
    np.cumsum(np.bincount(a, minlength=nf), out=ptr[1:])
    signs, consistent, ncomp = kernels.propagate_orientation(
        nf, ptr, np.ascontiguousarray(b, dtype=np.int64), np.ascontiguousarray(rr, dtype=np.int8)
    )
    return np.asarray(signs, dtype=np.int8), bool(consistent), int(ncomp)


def _star_counts(K: OrientedSimplicialComplex) -> np.ndarray:
    """``counts[p, v]`` = number of p-simplices containing vertex v."""
    counts = np.zeros((K.dim + 1, K.n_vertices), dtype=np.int64)
    for p, rows in enumerate(K.simplices):
        counts[p] = np.bincount(rows.ravel(), minlength=K.n_vertices)
    return counts


def _link_checks(K: OrientedSimplicialComplex, boundary_vertices: np.ndarray) -> bool:
    """Vertex links: Euler characteristic of a sphere (ball on the boundary) and connected."""
    d = K.dim
    counts = _star_counts(K)
    chi = np.zeros(K.n_vertices, dtype=np.int64)
    for p in range(1, d + 1):
        chi += (-1) ** (p - 1) * counts[p]
    want = np.where(boundary_vertices, 1, 1 + (-1) ** (d - 1))
    if np.any(chi != want):
        return False
    if d < 2:
        return True
    # link 1-skeletons: node (center, neighbour) per oriented edge
    edges = K.simplices[1]
    ne = edges.shape[0]
    tri = K.simplices[2]
    e01 = K.index_of(1, tri[:, [0, 1]])
    e02 = K.index_of(1, tri[:, [0, 2]])
    e12 = K.index_of(1, tri[:, [1, 2]])
    # node id: 2*edge + side, side 0 -> center is the smaller endpoint
    a = np.concatenate([2 * e01, 2 * e01 + 1, 2 * e02 + 1])
    b = np.concatenate([2 * e02, 2 * e12, 2 * e12 + 1])
    graph = sp.coo_matrix((np.ones(a.shape[0]), (a, b)), shape=(2 * ne, 2 * ne))
    _, labels = connected_components(graph, directed=False)
    centers = np.concatenate([edges[:, 0], edges[:, 1]])
    comp = np.concatenate([labels[0::2], labels[1::2]])
    pairs = np.unique(np.stack([centers, comp], axis=1), axis=0)
    per_vertex = np.bincount(pairs[:, 0], minlength=K.n_vertices)
    return bool(np.all(per_vertex == 1))


def certify_manifold(K: OrientedSimplicialComplex, check_links: bool = True) -> ManifoldCertificate:
    """Pseudomanifold, closedness, orientability and link heuristics.

    The link test only compares Euler characteristics with those of spheres
    (balls at boundary vertices) and checks connectivity; it does not
    recognise PL spheres.
    """
    d = K.dim
    if d == 0:
        cycle = FundamentalCycle(K, np.ones(K.n(0), dtype=np.int64))
        return ManifoldCertificate(True, True, True, True, cycle, K.n(0), 0)
    deg = _ridge_degrees(K)
    pure = _is_pure(K)
    pseudo = pure and bool(np.all((deg == 1) | (deg == 2)))
    closed = pseudo and bool(np.all(deg == 2))
    n_boundary = int(np.sum(deg == 1))
    orientable = False
    ncomp = 0
    signs = None
    if pseudo:
        signs, orientable, ncomp = orient_facets(K)
    links = False
    if pseudo and check_links:
        bverts = np.zeros(K.n_vertices, dtype=bool)
        ridges = K.simplices[d - 1][deg == 1]
        bverts[ridges.ravel()] = True
        links = _link_checks(K, bverts)
    cycle = None
    if pseudo and closed and orientable:
        cycle = FundamentalCycle(K, signs.astype(np.int64))
    return ManifoldCertificate(pseudo, closed, orientable, links, cycle, ncomp, n_boundary)


def bounded_geometry_constant(K: OrientedSimplicialComplex) -> int:
    """Largest number of simplices (all degrees, the vertex included) at a vertex."""
    return int(_star_counts(K).sum(axis=0).max())


# --- barycentric subdivision ------------------------------------------------------


class Subdivision(NamedTuple):
    complex: OrientedSimplicialComplex
    chain_maps: list
    barycenter_of: list


def _removal_orders(p: int):
    """Yield ``(subsets, sign)`` for each order of peeling vertices off a p-simplex.

    ``subsets`` runs from the full position set down to a single position.
    The sign is that of the iterated cone ``b_s * sd(d s)`` with the
    barycenter placed first.
    """
    for perm in itertools.permutations(range(p + 1)):
        current = list(range(p + 1))
        subsets = [tuple(current)]
        sign = 1
        for v in perm[:-1]:
            pos = current.index(v)
            if pos % 2:
                sign = -sign
            current.pop(pos)
            subsets.append(tuple(current))
        yield subsets, sign


def barycentric_subdivision(K: OrientedSimplicialComplex) -> Subdivision:
    """First barycentric subdivision and the subdivision chain maps.

    New vertex ``j`` is the barycenter of ``barycenter_of[j] = (q, index)``;
    barycenters are ordered by decreasing dimension so that every flag
    ``s_p > ... > s_0`` is an increasing vertex tuple.
    """
    d = K.dim
    offsets = {}
    bary = []
    off = 0
    for q in range(d, -1, -1):
        offsets[q] = off
        bary.extend((q, i) for i in range(K.n(q)))
        off += K.n(q)
    n_new = off

    def flags_of(p: int, simp: np.ndarray):
        cache = {}
        out_rows, out_signs = [], []
        for subsets, sign in _removal_orders(p):
            cols = []
            for sub in subsets:
                if sub not in cache:
                    q = len(sub) - 1
                    cache[sub] = offsets[q] + K.index_of(q, simp[:, list(sub)])
                cols.append(cache[sub])
            out_rows.append(np.stack(cols, axis=1))
            out_signs.append(sign)
        return out_rows, out_signs

    tops = []
    for p, rows in K.maximal_simplices():
        frows, _ = flags_of(p, rows)
        tops.extend(frows)
    sd = _from_index_rows(n_new, tops, name=f"sd({K.name})" if K.name else "")
    chain_maps = []
    for p in range(d + 1):
        simp = K.simplices[p]
        frows, fsigns = flags_of(p, simp)
        rr, cc, vv = [], [], []
        cols = np.arange(simp.shape[0], dtype=np.int64)
        for rows, sign in zip(frows, fsigns):
            rr.append(sd.index_of(p, rows))
            cc.append(cols)
            vv.append(np.full(simp.shape[0], sign, dtype=np.int64))
        chain_maps.append(
            sp.csr_matrix(
                (np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
                shape=(sd.n(p), K.n(p)),
                dtype=np.int64,
            )
        )
    return Subdivision(sd, chain_maps, bary)


def subdivide_cycle(sub: Subdivision, C: FundamentalCycle) -> FundamentalCycle:
    d = C.dim
    return FundamentalCycle(sub.complex, sub.chain_maps[d] @ C.as_vector())


# --- products ---------------------------------------------------------------------


def _staircases(a: int, b: int):
    """Monotone lattice paths from (0, 0) to (a, b) with their shuffle signs.

    The sign counts pairs where a second-factor step precedes a first-factor
    step, so the path taking all first-factor steps first is positive.
    """
    for kpos in itertools.combinations(range(a + b), a):
        kset = set(kpos)
        i = j = 0
        xs, ys = [0], [0]
        inversions = 0
        l_steps = 0
        for t in range(a + b):
            if t in kset:
                i += 1
                inversions += l_steps
            else:
                j += 1
                l_steps += 1
            xs.append(i)
            ys.append(j)
        yield np.array(xs), np.array(ys), (-1) ** inversions


def _product_cells(Krows: np.ndarray, Lrows: np.ndarray, nL: int):
    """Staircase cells of all pairs ``(s, t)``; returns (rows, sign, s_index, t_index)."""
    a = Krows.shape[1] - 1
    b = Lrows.shape[1] - 1
    ns, nt = Krows.shape[0], Lrows.shape[0]
    si = np.repeat(np.arange(ns), nt)
    ti = np.tile(np.arange(nt), ns)
    out = []
    for xs, ys, sign in _staircases(a, b):
        rows = Krows[si][:, xs] * nL + Lrows[ti][:, ys]
        out.append((rows, sign, si, ti))
    return out


def product(K: OrientedSimplicialComplex, L: OrientedSimplicialComplex) -> OrientedSimplicialComplex:
    """Staircase triangulation of ``|K| x |L|``; vertex ``(x, y)`` becomes ``x * |V(L)| + y``."""
    nL = L.n_vertices
    cells = []
    for _, kr in K.maximal_simplices():
        for _, lr in L.maximal_simplices():
            cells.extend(rows for rows, _, _, _ in _product_cells(kr, lr, nL))
    name = f"{K.name}x{L.name}" if K.name and L.name else ""
    return _from_index_rows(K.n_vertices * nL, cells, name=name)


def product_cycle(
    K: OrientedSimplicialComplex,
    CK: FundamentalCycle,
    L: OrientedSimplicialComplex,
    CL: FundamentalCycle,
    P: OrientedSimplicialComplex | None = None,
) -> FundamentalCycle:
    """Shuffle product of two fundamental cycles on the staircase product."""
    if P is None:
        P = product(K, L)
    d = K.dim + L.dim
    coeffs = np.zeros(P.n(d), dtype=np.int64)
    ck, cl = CK.as_vector(), CL.as_vector()
    for rows, sign, si, ti in _product_cells(K.simplices[K.dim], L.simplices[L.dim], L.n_vertices):
        coeffs[P.index_of(d, rows)] += sign * ck[si] * cl[ti]
    return FundamentalCycle(P, coeffs)


# --- boundaries and doubling --------------------------------------------------------


def boundary_ridges(K: OrientedSimplicialComplex) -> np.ndarray:
    """Index mask of (d-1)-simplices lying in exactly one facet."""
    return _ridge_degrees(K) == 1


def relative_fundamental_chain(K: OrientedSimplicialComplex) -> np.ndarray:
    """Facet signs orienting a pseudomanifold with boundary, or raise."""
    deg = _ridge_degrees(K)
    if not (_is_pure(K) and np.all((deg == 1) | (deg == 2))):
        raise NonManifoldBoundary("not a pseudomanifold with boundary")
    signs, consistent, _ = orient_facets(K)
    if not consistent:
        raise NonManifoldBoundary("complex is not orientable")
    return signs.astype(np.int64)


def boundary_complex(K: OrientedSimplicialComplex) -> tuple:
    """The boundary subcomplex with the orientation induced from K.

    Returns ``(dK, cycle)``; ``cycle`` is ``None`` when the boundary is empty.
    Vertex labels of ``dK`` are those of K.
    """
    d = K.dim
    mask = boundary_ridges(K)
    if not mask.any():
        raise NoBoundary(f"{K.name or 'complex'} has no boundary")
    chain = relative_fundamental_chain(K)
    induced = boundary_matrix(K, d) @ chain
    ridges = K.simplices[d - 1][mask]
    dK = _from_index_rows(
        K.n_vertices, [ridges], labels=K.vertices, name=f"boundary({K.name})" if K.name else ""
    )
    # dK relabels vertices to its own index space; map back through labels
    pos = {v: i for i, v in enumerate(dK.vertices)}
    local = np.array([[pos[K.vertices[i]] for i in row] for row in ridges.tolist()], dtype=np.int64)
    coeffs = np.zeros(dK.n(d - 1), dtype=np.int64)
    coeffs[dK.index_of(d - 1, local.reshape(-1, d))] = induced[mask]
    cycle = FundamentalCycle(dK, coeffs)
    return dK, cycle


def _permutation_sign(rows: np.ndarray) -> np.ndarray:
    """Sign of the permutation sorting each row (entries distinct)."""
    n = rows.shape[1]
    inv = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += rows[:, i] > rows[:, j]
    return np.where(inv % 2, -1, 1)


def double_along_boundary(K: OrientedSimplicialComplex, return_cycle: bool = False):
    """Glue two copies of K along the boundary subcomplex.

    If some simplex of K has all its vertices on the boundary without lying in
    the boundary, the naive gluing would list that simplex twice; K is then
    barycentrically subdivided first.  The second copy carries the reversed
    orientation, so the double is oriented whenever K is.
    """
    d = K.dim
    if d == 0:
        raise NoBoundary("0-dimensional complexes have no boundary")
    deg = _ridge_degrees(K)
    if not np.any(deg == 1):
        raise NoBoundary(f"{K.name or 'complex'} is closed")
    if not (_is_pure(K) and np.all((deg == 1) | (deg == 2))):
        raise NonManifoldBoundary("input is not a pseudomanifold with boundary")
    ridges = K.simplices[d - 1][deg == 1]
    bdry = _from_index_rows(K.n_vertices, [ridges])
    bcert_deg = _ridge_degrees(bdry) if bdry.dim >= 1 else None
    if bcert_deg is not None and np.any(bcert_deg != 2):
        raise NonManifoldBoundary("boundary is not a closed pseudomanifold")
    on_boundary = np.zeros(K.n_vertices, dtype=bool)
    on_boundary[ridges.ravel()] = True
    # a simplex spanned by boundary vertices but not in the boundary collides
    for p in range(1, d + 1):
        simp = K.simplices[p]
        spanned = on_boundary[simp].all(axis=1)
        if not spanned.any():
            continue
        in_bdry = np.zeros(simp.shape[0], dtype=bool)
        if p <= bdry.dim:
            in_bdry[spanned] = _membership(bdry, p, simp[spanned])
        if np.any(spanned & ~in_bdry):
            sub = barycentric_subdivision(K)
            return double_along_boundary(sub.complex, return_cycle=return_cycle)
    n = K.n_vertices
    interior = np.flatnonzero(~on_boundary)
    twin = np.arange(n, dtype=np.int64)
    twin[interior] = n + np.arange(interior.shape[0])
    top = K.simplices[d]
    copy2 = twin[top]
    sign2 = _permutation_sign(copy2)
    copy2 = np.sort(copy2, axis=1)
    D = _from_index_rows(n + interior.shape[0], [top, copy2], name=f"double({K.name})" if K.name else "")
    if not return_cycle:
        return D
    signs, consistent, _ = orient_facets(K)
    cycle = None
    if consistent:
        coeffs = np.zeros(D.n(d), dtype=np.int64)
        coeffs[D.index_of(d, top)] = signs
        coeffs[D.index_of(d, copy2)] = -signs * sign2
        cycle = FundamentalCycle(D, coeffs)
    return D, cycle


def _relabel(L: OrientedSimplicialComplex, rows: np.ndarray) -> np.ndarray:
    pos = -np.ones(max(L.vertices) + 1 if L.vertices else 0, dtype=np.int64)
    pos[np.array(L.vertices, dtype=np.int64)] = np.arange(L.n_vertices)
    return pos[rows]


def _membership(L: OrientedSimplicialComplex, p: int, rows: np.ndarray) -> np.ndarray:
    local = _relabel(L, rows)
    out = np.zeros(rows.shape[0], dtype=bool)
    for i, r in enumerate(local):
        try:
            L.index_of(p, r[None, :])
            out[i] = True
        except KeyError:
            pass
    return out


def simplex_boundary_sphere(d: int) -> OrientedSimplicialComplex:
    """``∂Δ^{d+1}``, the boundary of the (d+1)-simplex on vertices 0..d+1."""
    return build_complex(
        list(itertools.combinations(range(d + 2), d + 1)), name=f"sphere_{d}"
    )


def binomial_product_count(K: OrientedSimplicialComplex, L: OrientedSimplicialComplex) -> int:
    return K.n(K.dim) * L.n(L.dim) * math.comb(K.dim + L.dim, K.dim)
