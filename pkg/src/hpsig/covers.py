"""Finite deck groups, flat edge cocycles and twisted boundary matrices.

A principal cover is never materialised for computation: it is encoded by a
group element on every oriented edge, and chain-level data are assembled
irrep by irrep.  The explicit total space is available separately
(:func:`materialize_total_space`) as a test oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import CocycleNotFlat, MalformedInput, MissingEdge, NotAPath, UnknownIrrep
from .linalg import EXACT_ORDERS, CycloMatrix, root_power_parts
from .simplicial import (
    FundamentalCycle,
    Incidence,
    OrientedSimplicialComplex,
    _boundary_incidence,
    _from_index_rows,
    bounded_geometry_constant,
)

HOM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Irrep:
    """Unitary irreducible representation.

    For a character of an abelian group ``exponents[g] = k`` means
    ``rho(g) = exp(2 pi i k / order)``; ``matrices`` is always populated.
    """

    label: str
    dim: int
    matrices: np.ndarray
    exponents: np.ndarray | None = None
    order: int | None = None

    @property
    def is_character(self) -> bool:
        return self.exponents is not None

    @property
    def exact(self) -> bool:
        return self.is_character and self.order in EXACT_ORDERS


@dataclass(frozen=True, eq=False)
class FiniteGroupData:
    elements: tuple
    table: np.ndarray
    inverses: np.ndarray
    identity: int
    irreps: tuple = ()
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    @property
    def exponent(self) -> int:
        return math.lcm(*(self.element_order(g) for g in range(self.order)))

    def index(self, g) -> int:
        """Element index from an index or a label."""
        if isinstance(g, (int, np.integer)) and 0 <= int(g) < self.order:
            return int(g)
        try:
            return self.elements.index(g)
        except ValueError:
            raise MalformedInput(f"unknown group element {g!r}") from None

    def irrep(self, which) -> Irrep:
        if isinstance(which, Irrep):
            if any(which is r for r in self.irreps):
                return which
            raise UnknownIrrep(f"irrep {which.label!r} does not belong to {self.name or 'group'}")
        for r in self.irreps:
            if r.label == which:
                return r
        if isinstance(which, (int, np.integer)) and 0 <= which < len(self.irreps):
            return self.irreps[int(which)]
        raise UnknownIrrep(f"no irrep {which!r}")

    @classmethod
    def from_table(cls, elements, table, irreps=None, name: str = "") -> "FiniteGroupData":
        table = np.asarray(table, dtype=np.int64)
        n = len(elements)
        if table.shape != (n, n) or table.min() < 0 or table.max() >= n:
            raise MalformedInput("multiplication table has the wrong shape or entries")
        for row in table:
            if len(set(row.tolist())) != n:
                raise MalformedInput("table is not a Latin square")
        ids = [e for e in range(n) if np.array_equal(table[e], np.arange(n))]
        if len(ids) != 1 or not np.array_equal(table[:, ids[0]], np.arange(n)):
            raise MalformedInput("no two-sided identity")
        e = ids[0]
        inverses = np.array([int(np.flatnonzero(table[a] == e)[0]) for a in range(n)])
        triples = itertools.product(range(n), repeat=3)
        if n > 24:
            rng = np.random.default_rng(0)
            triples = (tuple(t) for t in rng.integers(0, n, size=(5000, 3)))
        for a, b, c in triples:
            if table[table[a, b], c] != table[a, table[b, c]]:
                raise MalformedInput(f"table is not associative at {(a, b, c)}")
        group = cls(tuple(elements), table, inverses, e, (), name)
        if irreps is None:
            if not group.is_abelian:
                raise MalformedInput("nonabelian groups need their irreps in the group file")
            irreps = abelian_characters(group)
        group = cls(tuple(elements), table, inverses, e, tuple(irreps), name)
        validate_irreps(group)
        return group


def validate_irreps(group: FiniteGroupData) -> None:
    n = group.order
    total = 0
    for r in group.irreps:
        m = r.matrices
        if m.shape != (n, r.dim, r.dim):
            raise MalformedInput(f"irrep {r.label}: matrices have shape {m.shape}")
        eye = np.eye(r.dim)
        if np.abs(m[group.identity] - eye).max() > HOM_TOL:
            raise MalformedInput(f"irrep {r.label}: rho(e) is not the identity")
        for g in range(n):
            if np.abs(m[g].conj().T @ m[g] - eye).max() > HOM_TOL:
                raise MalformedInput(f"irrep {r.label}: rho({group.elements[g]}) is not unitary")
        prod = np.einsum("aij,bjk->abik", m, m)
        if np.abs(prod - m[group.table]).max() > HOM_TOL:
            raise MalformedInput(f"irrep {r.label} is not a homomorphism")
        total += r.dim**2
    if total != n:
        raise MalformedInput(f"sum of squared irrep dimensions is {total}, group order {n}")


def abelian_characters(group: FiniteGroupData) -> list:
    """All characters of an abelian group, as exponent tables over its exponent."""
    n = group.order
    N = group.exponent
    gens: list = []
    span = {group.identity}
    for g in range(n):
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        span = set(frontier)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = group.mul(x, s)
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
    # exponent vector of each element in the generators (first BFS hit)
    coords = {group.identity: (0,) * len(gens)}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for j, s in enumerate(gens):
                y = group.mul(x, s)
                if y not in coords:
                    c = list(coords[x])
                    c[j] += 1
                    coords[y] = tuple(c)
                    nxt.append(y)
        frontier = nxt
    choices = [range(0, N, N // group.element_order(s)) for s in gens]
    coord_arr = np.array([coords[g] for g in range(n)], dtype=np.int64).reshape(n, len(gens))
    chars = []
    for t in itertools.product(*choices):
        k = (coord_arr @ np.array(t, dtype=np.int64)) % N if gens else np.zeros(n, dtype=np.int64)
        if np.all((k[:, None] + k[None, :]) % N == k[group.table]):
            chars.append(k)
    if len(chars) != n:
        raise MalformedInput("failed to find all characters")
    out = []
    for idx, k in enumerate(chars):
        mats = np.exp(2j * np.pi * k / N).reshape(n, 1, 1)
        out.append(Irrep(f"chi{idx}", 1, mats, k.astype(np.int64), N))
    return out


def cyclic_group(n: int) -> FiniteGroupData:
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroupData.from_table(tuple(range(n)), table, name=f"Z/{n}")


def direct_product(G: FiniteGroupData, H: FiniteGroupData) -> FiniteGroupData:
    """``G x H`` with element ``(g, h)`` at index ``g * |H| + h``; abelian factors only
    get their characters regenerated, nonabelian irreps are tensored."""
    nG, nH = G.order, H.order
    elements = tuple((a, b) for a in G.elements for b in H.elements)
    gi = np.repeat(np.arange(nG), nH)
    hi = np.tile(np.arange(nH), nG)
    table = G.table[gi[:, None], gi[None, :]] * nH + H.table[hi[:, None], hi[None, :]]
    name = f"{G.name}x{H.name}" if G.name and H.name else ""
    if G.is_abelian and H.is_abelian:
        return FiniteGroupData.from_table(elements, table, name=name)
    irreps = []
    for r in G.irreps:
        for s in H.irreps:
            mats = np.einsum("aij,akl->aikjl", r.matrices[gi], s.matrices[hi])
            d = r.dim * s.dim
            irreps.append(Irrep(f"{r.label}*{s.label}", d, mats.reshape(nG * nH, d, d)))
    return FiniteGroupData.from_table(elements, table, irreps=irreps, name=name)


# --- covers -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoverComplex:
    """A principal cover of ``base`` given by a flat cocycle.

    ``edge_element[v, w]`` is the group element on the oriented edge ``(v, w)``
    (vertex indices), ``-1`` off edges and the identity on the diagonal.
    The control space is the vertex set of the base with its graph metric;
    the control map sends a simplex to its least vertex.
    """

    base: OrientedSimplicialComplex
    group: FiniteGroupData
    edge_element: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def cocycle(self) -> dict:
        """Cocycle on edges ``(v, w)`` with ``v < w`` (vertex labels)."""
        labels = self.base.vertices
        return {
            (labels[a], labels[b]): int(self.edge_element[a, b])
            for a, b in self.base.simplices[1].tolist()
        }

    @property
    def control_space(self):
        from .controlled import GraphSpace

        if "space" not in self._cache:
            self._cache["space"] = GraphSpace.from_complex(self.base)
        return self._cache["space"]

    def control_map(self, p: int) -> np.ndarray:
        return self.base.simplices[p][:, 0].copy()

    def fiber_bound(self) -> int:
        """Largest fibre of the control map over a point, all degrees together."""
        counts = np.zeros(self.base.n_vertices, dtype=np.int64)
        for p in range(self.base.dim + 1):
            counts += np.bincount(self.control_map(p), minlength=self.base.n_vertices)
        return int(counts.max())


def build_cover(base: OrientedSimplicialComplex, group: FiniteGroupData, cocycle) -> CoverComplex:
    """Validate a cocycle and package the cover.

    ``cocycle`` maps ``(v, w)`` label pairs to group elements (index or label);
    the opposite orientation is filled in with the inverse.
    """
    pos = {v: i for i, v in enumerate(base.vertices)}
    n = base.n_vertices
    E = -np.ones((n, n), dtype=np.int64)
    items = cocycle.items() if isinstance(cocycle, dict) else cocycle
    for (v, w), g in items:
        if v not in pos or w not in pos:
            raise MalformedInput(f"cocycle edge ({v}, {w}) has unknown vertices")
        a, b = pos[v], pos[w]
        gi = group.index(g)
        for x, y, val in ((a, b, gi), (b, a, group.inv(gi))):
            if E[x, y] not in (-1, val):
                raise MalformedInput(f"cocycle values on ({v}, {w}) are not mutually inverse")
            E[x, y] = val
    edges = base.simplices[1] if base.dim >= 1 else np.zeros((0, 2), dtype=np.int64)
    missing = E[edges[:, 0], edges[:, 1]] < 0
    if missing.any():
        a, b = edges[np.argmax(missing)]
        raise MissingEdge(f"no cocycle value on edge ({base.vertices[a]}, {base.vertices[b]})")
    for a, b in np.argwhere(E >= 0):
        if a != b and not base.contains((base.vertices[a], base.vertices[b])):
            raise MalformedInput("cocycle given on a non-edge")
    np.fill_diagonal(E, group.identity)
    if base.dim >= 2:
        t = base.simplices[2]
        hol = group.table[group.table[E[t[:, 0], t[:, 1]], E[t[:, 1], t[:, 2]]], E[t[:, 2], t[:, 0]]]
        bad = np.flatnonzero(hol != group.identity)
        if bad.size:
            tri = tuple(base.vertices[i] for i in t[bad[0]])
            raise CocycleNotFlat(f"nontrivial holonomy around triangle {tri}")
    cover = CoverComplex(base, group, E)
    assert cover.fiber_bound() <= bounded_geometry_constant(base)
    return cover


def trivial_cover(base: OrientedSimplicialComplex, group: FiniteGroupData) -> CoverComplex:
    cocycle = {tuple(base.vertices[i] for i in e): group.identity for e in base.simplices[1].tolist()}
    return build_cover(base, group, cocycle)


def holonomy(cover: CoverComplex, vertices) -> int:
    """Ordered product of cocycle values along a vertex path (labels)."""
    pos = {v: i for i, v in enumerate(cover.base.vertices)}
    try:
        idx = [pos[v] for v in vertices]
    except KeyError as exc:
        raise NotAPath(f"unknown vertex {exc}") from None
    g = cover.group.identity
    for a, b in zip(idx, idx[1:]):
        x = cover.edge_element[a, b]
        if x < 0:
            raise NotAPath(f"{cover.base.vertices[a]} and {cover.base.vertices[b]} are not adjacent")
        g = cover.group.mul(g, int(x))
    return g


def gauge_transform(cover: CoverComplex, h) -> CoverComplex:
    """Cocycle ``h(v) g(v, w) h(w)^-1`` for a vertex labelling ``h`` (element indices)."""
    G = cover.group
    h = np.asarray(h, dtype=np.int64)
    E = cover.edge_element
    out = -np.ones_like(E)
    mask = E >= 0
    a, b = np.nonzero(mask)
    out[a, b] = G.table[G.table[h[a], E[a, b]], G.inverses[h[b]]]
    return CoverComplex(cover.base, G, out)


# --- twisted assembly ---------------------------------------------------------------


def transport_elements(cover: CoverComplex, inc: Incidence) -> np.ndarray:
    return cover.edge_element[inc.src, inc.dst]


def assemble(inc: Incidence, elements, irrep: Irrep | None, mode: str = "auto"):
    """Matrix with entry ``sign * rho(element)`` at each incidence.

    ``irrep=None`` means trivial coefficients.  Characters of order 1 or 2
    give integer matrices, orders 3, 4 and 6 give :class:`CycloMatrix`, and
    everything else (or ``mode='float'``) gives complex block matrices.
    """
    rows, cols, signs, shape = inc.rows, inc.cols, inc.signs, inc.shape
    if irrep is None:
        M = sp.csr_matrix((signs, (rows, cols)), shape=shape, dtype=np.int64)
        return M.astype(np.complex128).tocsr() if mode == "float" else M
    elements = np.asarray(elements, dtype=np.int64)
    if irrep.exact and mode != "float":
        a, b, fld = root_power_parts(irrep.order, irrep.exponents[elements])
        re = sp.csr_matrix((signs * a, (rows, cols)), shape=shape, dtype=np.int64)
        if fld is None:
            return re
        ze = sp.csr_matrix((signs * b, (rows, cols)), shape=shape, dtype=np.int64)
        return CycloMatrix(re, ze, fld)
    m = irrep.dim
    blocks = irrep.matrices[elements] * signs[:, None, None]
    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    R = (rows[:, None, None] * m + ii[None]).ravel()
    C = (cols[:, None, None] * m + jj[None]).ravel()
    return sp.csr_matrix(
        (blocks.ravel(), (R, C)), shape=(shape[0] * m, shape[1] * m), dtype=np.complex128
    )


def twisted_boundary(cover: CoverComplex, irrep, mode: str = "auto") -> list:
    """``[None, b_1, ..., b_d]`` with coefficients in ``irrep``.

    The entry for face ``s'`` of ``s`` is the incidence sign times
    ``rho(g(a', a))``, ``a`` and ``a'`` the least vertices of ``s`` and ``s'``.
    """
    rho = cover.group.irrep(irrep)
    K = cover.base
    out = [None]
    for p in range(1, K.dim + 1):
        inc = _boundary_incidence(K, p)
        out.append(assemble(inc, transport_elements(cover, inc), rho, mode))
    return out


# --- explicit total space (oracle) --------------------------------------------------


def materialize_total_space(cover: CoverComplex, cycle: FundamentalCycle | None = None):
    """Lift every maximal simplex to every sheet.

    Vertex ``(v, h)`` of the total space gets index ``v * |G| + h``; the lift
    of ``[v_0 .. v_p]`` at sheet ``h`` has vertices ``(v_i, h g(v_0, v_i))``.
    Returns ``(total, lifted_cycle)``.
    """
    K, G, E = cover.base, cover.group, cover.edge_element
    n = G.order
    lifts = []
    for _, rows in K.maximal_simplices():
        for h in range(n):
            sheets = G.table[h, E[rows[:, [0]], rows]]
            lifts.append(rows * n + sheets)
    total = _from_index_rows(K.n_vertices * n, lifts, name=f"{K.name}~{G.name}" if K.name else "")
    lifted = None
    if cycle is not None:
        d = K.dim
        top = K.simplices[d]
        coeffs = np.zeros(total.n(d), dtype=np.int64)
        for h in range(n):
            sheets = G.table[h, E[top[:, [0]], top]]
            coeffs[total.index_of(d, top * n + sheets)] = cycle.as_vector()
        lifted = FundamentalCycle(total, coeffs)
    return total, lifted
