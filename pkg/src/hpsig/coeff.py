"""Coefficients for covers with deck group Z^n, evaluated on the character torus.

A Z^n-cover is given by an integer vector on every oriented edge.  Its
boundary and duality matrices have Laurent-polynomial entries in
``t_1 .. t_n``; a character ``theta`` evaluates them at ``t_j = exp(i theta_j)``.
"""

from __future__ import annotations

import csv
import io as _io
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import linalg
from .chain import BasedChainComplex, homology_ranks
from .errors import CocycleNotFlat, MalformedInput, MissingEdge, ShapeMismatch
from .poincare import HilbertPoincareComplex, _require_closed_oriented, cap_incidence, symmetrize
from .signature import signature_details
from .simplicial import FundamentalCycle, Incidence, OrientedSimplicialComplex, _boundary_incidence


class LaurentMatrix:
    """Finite sum ``sum_k M_k t^k`` over integer exponent vectors ``k``."""

    def __init__(self, terms: dict, shape: tuple, nvars: int):
        self.shape = tuple(shape)
        self.nvars = nvars
        self.terms = {}
        for k, m in terms.items():
            m = sp.csr_matrix(m)
            if m.shape != self.shape:
                raise ShapeMismatch(f"term {k} has shape {m.shape}")
            m.eliminate_zeros()
            if m.nnz:
                self.terms[tuple(int(x) for x in k)] = m

    @classmethod
    def from_incidence(cls, inc: Incidence, exponents: np.ndarray, nvars: int) -> "LaurentMatrix":
        exponents = np.asarray(exponents, dtype=np.int64).reshape(-1, nvars)
        terms = {}
        keys, inverse = np.unique(exponents, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        for j, k in enumerate(keys):
            sel = inverse == j
            terms[tuple(k)] = sp.csr_matrix(
                (inc.signs[sel], (inc.rows[sel], inc.cols[sel])), shape=inc.shape, dtype=np.int64
            )
        return cls(terms, inc.shape, nvars)

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        terms = dict(self.terms)
        for k, m in other.terms.items():
            terms[k] = terms[k] + m if k in terms else m
        return LaurentMatrix(terms, self.shape, self.nvars)

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "LaurentMatrix":
        return LaurentMatrix({k: m * c for k, m in self.terms.items()}, self.shape, self.nvars)

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.shape[1] != other.shape[0]:
            raise ShapeMismatch("inner dimensions differ")
        terms: dict = {}
        for k1, a in self.terms.items():
            for k2, b in other.terms.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                prod = a @ b
                terms[k] = terms[k] + prod if k in terms else prod
        return LaurentMatrix(terms, (self.shape[0], other.shape[1]), self.nvars)

    def involution(self) -> "LaurentMatrix":
        """Conjugate transpose with ``t -> t^-1``."""
        return LaurentMatrix(
            {tuple(-x for x in k): m.conj().T for k, m in self.terms.items()},
            (self.shape[1], self.shape[0]),
            self.nvars,
        )

    def evaluate(self, theta) -> sp.csr_matrix:
        theta = np.asarray(theta, dtype=float).reshape(self.nvars)
        out = sp.csr_matrix(self.shape, dtype=np.complex128)
        for k, m in self.terms.items():
            out = out + m.astype(np.complex128) * np.exp(1j * float(np.dot(theta, k)))
        return out.tocsr()

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class CharacterFamily:
    """Uniform grid on the n-torus of characters (``theta = 0`` always included)."""

    rank: int
    samples_per_circle: int = 64

    @property
    def points(self) -> list:
        axis = 2 * np.pi * np.arange(self.samples_per_circle) / self.samples_per_circle
        return [tuple(float(x) for x in p) for p in itertools.product(axis, repeat=self.rank)]

    def evaluate(self, L: LaurentMatrix, theta) -> sp.csr_matrix:
        return L.evaluate(theta)


@dataclass(frozen=True, eq=False)
class LatticeCover:
    """Cover with deck group Z^n: ``vectors[v, w]`` on every oriented edge."""

    base: OrientedSimplicialComplex
    rank: int
    vectors: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def laurent_boundary(self, p: int) -> LaurentMatrix:
        key = ("b", p)
        if key not in self._cache:
            inc = _boundary_incidence(self.base, p)
            self._cache[key] = LaurentMatrix.from_incidence(
                inc, self.vectors[inc.src, inc.dst], self.rank
            )
        return self._cache[key]

    def laurent_duality(self, C: FundamentalCycle, p: int) -> LaurentMatrix:
        inc = cap_incidence(self.base, C, p)
        return LaurentMatrix.from_incidence(inc, self.vectors[inc.src, inc.dst], self.rank)


def build_lattice_cover(base: OrientedSimplicialComplex, cocycle) -> LatticeCover:
    """``cocycle``: ``(v, w) -> integer vector`` (or integer for rank one)."""
    items = list(cocycle.items() if isinstance(cocycle, dict) else cocycle)
    if not items:
        raise MalformedInput("empty cocycle")
    first = np.atleast_1d(np.asarray(items[0][1], dtype=np.int64))
    rank = first.shape[0]
    pos = {v: i for i, v in enumerate(base.vertices)}
    n = base.n_vertices
    vec = np.zeros((n, n, rank), dtype=np.int64)
    seen = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(seen, True)
    for (v, w), g in items:
        if v not in pos or w not in pos:
            raise MalformedInput(f"cocycle edge ({v}, {w}) has unknown vertices")
        g = np.atleast_1d(np.asarray(g, dtype=np.int64))
        if g.shape != (rank,):
            raise MalformedInput("cocycle vectors have inconsistent length")
        a, b = pos[v], pos[w]
        if seen[a, b] and not np.array_equal(vec[a, b], g):
            raise MalformedInput(f"conflicting values on ({v}, {w})")
        vec[a, b], vec[b, a] = g, -g
        seen[a, b] = seen[b, a] = True
    edges = base.simplices[1]
    missing = ~seen[edges[:, 0], edges[:, 1]]
    if missing.any():
        a, b = edges[np.argmax(missing)]
        raise MissingEdge(f"no cocycle value on edge ({base.vertices[a]}, {base.vertices[b]})")
    if base.dim >= 2:
        t = base.simplices[2]
        hol = vec[t[:, 0], t[:, 1]] + vec[t[:, 1], t[:, 2]] + vec[t[:, 2], t[:, 0]]
        bad = np.flatnonzero(np.any(hol != 0, axis=1))
        if bad.size:
            tri = tuple(base.vertices[i] for i in t[bad[0]])
            raise CocycleNotFlat(f"nonzero holonomy {hol[bad[0]].tolist()} around {tri}")
    return LatticeCover(base, rank, vec)


# --- per-sample evaluation ------------------------------------------------------------


def sample_complex(cover: LatticeCover, theta) -> BasedChainComplex:
    K = cover.base
    b = [None] + [cover.laurent_boundary(p).evaluate(theta) for p in range(1, K.dim + 1)]
    return BasedChainComplex(tuple(b), K.f_vector, "float")


def sample_hp(cover: LatticeCover, C: FundamentalCycle, theta) -> HilbertPoincareComplex:
    K = cover.base
    E = sample_complex(cover, theta)
    D = [cover.laurent_duality(C, p).evaluate(theta) for p in range(K.dim + 1)]
    return HilbertPoincareComplex(E, D, symmetrize(D), C, f"{K.name}@{tuple(theta)}")


@dataclass
class FamilySample:
    theta: tuple
    ranks: list
    signature: int
    bb_residual: float


def evaluate_family(
    cover: LatticeCover,
    grid: CharacterFamily | list | None = None,
    cycle: FundamentalCycle | None = None,
    with_signature: bool = True,
) -> list:
    """Homology ranks (relative threshold 1e-8) and middle-form signature per sample."""
    if grid is None:
        grid = CharacterFamily(cover.rank)
    points = grid.points if isinstance(grid, CharacterFamily) else [tuple(p) for p in grid]
    if with_signature and cycle is not None:
        _require_closed_oriented(cover.base, cycle)
    out = []
    for theta in points:
        if with_signature and cycle is not None:
            hp = sample_hp(cover, cycle, theta)
            E = hp.E
            sig = int(signature_details(hp, "float")["signature"])
        else:
            E = sample_complex(cover, theta)
            sig = None
        out.append(FamilySample(tuple(theta), homology_ranks(E, "float"), sig, E.squares_to_zero()))
    return out


def family_csv(samples: list) -> str:
    if not samples:
        return ""
    n = len(samples[0].theta)
    d = len(samples[0].ranks) - 1
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"theta_{j + 1}" for j in range(n)] + [f"h_{p}" for p in range(d + 1)] + ["signature"])
    for s in samples:
        w.writerow([f"{x:.12g}" for x in s.theta] + list(s.ranks) + ["" if s.signature is None else s.signature])
    return buf.getvalue()


def untwisted_matches(cover: LatticeCover, tol: float = 0.0) -> bool:
    """``theta = 0`` reproduces the integer boundary matrices."""
    from .simplicial import boundary_matrix

    zero = (0.0,) * cover.rank
    return all(
        linalg.max_abs(cover.laurent_boundary(p).evaluate(zero) - boundary_matrix(cover.base, p)) <= tol
        for p in range(1, cover.base.dim + 1)
    )
