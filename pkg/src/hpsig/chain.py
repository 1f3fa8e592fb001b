"""Based chain complexes with involution: duals, homology ranks, harmonic bases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import linalg
from .errors import DegreeOutOfRange, ShapeMismatch

DENSE_LIMIT = 3000
HARMONIC_TOL = 1e-10
LSQ_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class BasedChainComplex:
    """``E_0 <- E_1 <- ... <- E_d`` with ``b[p]: E_p -> E_{p-1}`` (``b[0]`` is ``None``)."""

    b: tuple
    ranks: tuple
    mode: str = "exact"

    @property
    def d(self) -> int:
        return len(self.ranks) - 1

    def boundary(self, p: int):
        """``b[p]``, or an explicit zero matrix outside ``1..d``."""
        if 1 <= p <= self.d:
            return self.b[p]
        rows = self.ranks[p - 1] if 0 <= p - 1 <= self.d else 0
        cols = self.ranks[p] if 0 <= p <= self.d else 0
        template = next((m for m in self.b[1:] if m is not None), None)
        if template is None:
            return sp.csr_matrix((rows, cols), dtype=np.int64)
        return linalg.zero_like((rows, cols), template)

    def squares_to_zero(self) -> float:
        """Largest entry of ``b[p] b[p+1]`` over all degrees."""
        worst = 0.0
        for p in range(1, self.d):
            worst = max(worst, linalg.max_abs(self.b[p] @ self.b[p + 1]))
        return worst

    @classmethod
    def from_matrices(cls, b, mode: str | None = None) -> "BasedChainComplex":
        b = list(b)
        if b and b[0] is not None:
            b = [None] + b
        if len(b) == 1:
            raise ValueError("need at least one differential or use from_ranks")
        ranks = [b[1].shape[0]] + [m.shape[1] for m in b[1:]]
        for p in range(1, len(b) - 1):
            if b[p].shape[1] != b[p + 1].shape[0]:
                raise ShapeMismatch(f"b[{p}] and b[{p + 1}] do not compose")
        if mode is None:
            mode = linalg.kind(b[1])
        return cls(tuple(b), tuple(ranks), mode)


@dataclass(frozen=True, eq=False)
class DualComplex(BasedChainComplex):
    """Modules ``E_{d-p}`` with differentials the adjoints of the original ones."""

    original: BasedChainComplex | None = None


def dual(E: BasedChainComplex) -> DualComplex:
    d = E.d
    b = [None] + [linalg.adjoint(E.b[d - p + 1]) for p in range(1, d + 1)]
    ranks = tuple(E.ranks[d - p] for p in range(d + 1))
    return DualComplex(tuple(b), ranks, E.mode, original=E)


def _rank(M, mode: str) -> int:
    if min(M.shape) == 0:
        return 0
    return linalg.rank(M, "float" if mode == "float" else "exact")


def homology_rank(E: BasedChainComplex, p: int, mode: str | None = None) -> int:
    """``dim ker b[p] - rank b[p+1]``; exact unless the complex (or ``mode``) is float."""
    if not 0 <= p <= E.d:
        raise DegreeOutOfRange(f"degree {p} outside 0..{E.d}")
    mode = mode or E.mode
    r_in = _rank(E.b[p], mode) if p >= 1 else 0
    r_out = _rank(E.b[p + 1], mode) if p + 1 <= E.d else 0
    return E.ranks[p] - r_in - r_out


def homology_ranks(E: BasedChainComplex, mode: str | None = None) -> list:
    mode = mode or E.mode
    rk = [0] + [_rank(E.b[p], mode) for p in range(1, E.d + 1)] + [0]
    return [E.ranks[p] - rk[p] - rk[p + 1] for p in range(E.d + 1)]


def euler_characteristic(E: BasedChainComplex) -> int:
    return sum((-1) ** p * n for p, n in enumerate(E.ranks))


# --- harmonic representatives -----------------------------------------------------------


def harmonic_basis(E: BasedChainComplex, p: int, method: str = "auto", seed: int = 0) -> np.ndarray:
    """Orthonormal columns spanning ``ker b[p]`` intersected with ``ker b[p+1]^*``.

    Small degrees use a dense SVD with relative threshold 1e-8; large ones
    project random vectors off both images by sparse least squares.
    """
    if not 0 <= p <= E.d:
        raise DegreeOutOfRange(f"degree {p} outside 0..{E.d}")
    n = E.ranks[p]
    if n == 0:
        return np.zeros((0, 0))
    bp = _real_if_possible(linalg.to_complex(E.boundary(p)))
    bq = _real_if_possible(linalg.to_complex(E.boundary(p + 1)))
    if bp.dtype != bq.dtype:
        bp, bq = bp.astype(np.complex128), bq.astype(np.complex128)
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "sparse"
    if method == "dense":
        H = _harmonic_dense(bp, bq)
    else:
        H = _harmonic_sparse(bp, bq, seed)
    if H.shape[1] and not (np.iscomplexobj(H) and np.abs(H.imag).max() > 0):
        H = H.real
    return H


def _real_if_possible(M):
    if M.nnz and np.abs(M.data.imag).max() > 0:
        return M
    return M.real.tocsr()


def _harmonic_dense(bp, bq) -> np.ndarray:
    stacked = sp.vstack([bp, bq.conj().T]).toarray()
    if stacked.shape[0] == 0:
        return np.eye(stacked.shape[1], dtype=stacked.dtype)
    return sla.null_space(stacked, rcond=linalg.RANK_RTOL)


def _project_off_image(A, X: np.ndarray) -> np.ndarray:
    """``X`` minus its orthogonal projection onto ``im A`` (least squares per column)."""
    if A.shape[1] == 0 or A.nnz == 0:
        return X
    A = A.tocsr()
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        coeffs = spla.lsmr(A, X[:, j], atol=LSQ_TOL, btol=LSQ_TOL, maxiter=20 * A.shape[1])[0]
        out[:, j] = X[:, j] - A @ coeffs
    return out


def _harmonic_sparse(bp, bq, seed: int) -> np.ndarray:
    n = bp.shape[1]
    rng = np.random.default_rng(seed)
    dtype = bp.dtype
    k = 8
    while True:
        X = rng.standard_normal((n, k)).astype(dtype)
        X = _project_off_image(bp.conj().T.tocsr(), X)
        X = _project_off_image(bq, X)
        U, s, _ = np.linalg.svd(X, full_matrices=False)
        # standard normal columns keep O(1) mass on a nonzero harmonic space;
        # what survives otherwise is least-squares noise
        r = int(np.sum(s > 1e-6))
        if r == 0:
            return np.zeros((n, 0), dtype=dtype)
        if r < k or k >= n:
            H = U[:, :r]
            return H
        k *= 2


def harmonic_residual(E: BasedChainComplex, p: int, H: np.ndarray) -> float:
    if H.shape[1] == 0:
        return 0.0
    bp = linalg.to_complex(E.boundary(p))
    bq = linalg.to_complex(E.boundary(p + 1))
    r1 = np.abs(bp @ H).max() if bp.shape[0] else 0.0
    r2 = np.abs(bq.conj().T @ H).max() if bq.shape[1] else 0.0
    return float(max(r1, r2))


# --- chain maps ----------------------------------------------------------------------


class ChainMapReport(NamedTuple):
    deviations: list
    ok: bool


def verify_chain_map(f, E: BasedChainComplex, F: BasedChainComplex, tol: float = 0.0) -> ChainMapReport:
    """Max entry of ``F.b[p] f[p] - f[p-1] E.b[p]`` per degree ``p = 1..d``."""
    f = list(f)
    if len(f) != E.d + 1 or E.d != F.d:
        raise ShapeMismatch("chain map needs one matrix per degree of matching complexes")
    for p, m in enumerate(f):
        if m.shape != (F.ranks[p], E.ranks[p]):
            raise ShapeMismatch(f"f[{p}] has shape {m.shape}, expected {(F.ranks[p], E.ranks[p])}")
    devs = [0.0]
    for p in range(1, E.d + 1):
        diff = F.b[p] @ f[p] - f[p - 1] @ E.b[p]
        devs.append(linalg.max_abs(diff))
    return ChainMapReport(devs, all(x <= tol for x in devs))


def complex_of(K) -> BasedChainComplex:
    """Integer simplicial chain complex of an :class:`OrientedSimplicialComplex`."""
    from .simplicial import boundary_matrices

    if K.dim == 0:
        return BasedChainComplex((None,), (K.n(0),), "exact")
    return BasedChainComplex(tuple(boundary_matrices(K)), K.f_vector, "exact")
