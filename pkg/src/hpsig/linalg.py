"""Scalar modes and the linear algebra the chain-level code needs.

Three kinds of matrices flow through the package:

* ``scipy.sparse`` integer matrices (rational coefficients, exact),
* :class:`CycloMatrix` over ``Z[zeta]`` for zeta a primitive 3rd, 4th or 6th
  root of unity (exact),
* ``scipy.sparse`` complex matrices (floating point).

Exact ranks use elimination modulo two 31-bit primes ``p = 1 (mod 12)``, in
which both ``i`` and ``omega`` exist.  Reduction can only lower a rank, so the
larger of the two modular ranks is reported.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import kernels

SVD_LIMIT = 1000
PRIMES = (2147483629, 2147483497)
RANK_RTOL = 1e-8

# zeta**2 = c0 + c1 * zeta
_FIELDS = {
    "i": (-1, 0, 1j),
    "omega": (-1, -1, np.exp(2j * np.pi / 3)),
}

# zeta_N ** k written as a + b * zeta in the field basis
_POWERS = {
    3: ("omega", [(1, 0), (0, 1), (-1, -1)]),
    4: ("i", [(1, 0), (0, 1), (-1, 0), (0, -1)]),
    6: ("omega", [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]),
}

EXACT_ORDERS = (1, 2, 3, 4, 6)


def root_power_parts(order: int, k: np.ndarray):
    """Integer coordinates ``(a, b, field)`` of ``zeta_order ** k``."""
    k = np.asarray(k) % order
    if order == 1:
        return np.ones_like(k), np.zeros_like(k), None
    if order == 2:
        return np.where(k == 0, 1, -1), np.zeros_like(k), None
    field, table = _POWERS[order]
    table = np.array(table, dtype=np.int64)
    return table[k, 0], table[k, 1], field


class CycloMatrix:
    """Sparse matrix ``A + B * zeta`` with integer ``A``, ``B``."""

    __array_priority__ = 20

    def __init__(self, re, ze, field: str):
        self.re = sp.csr_matrix(re, dtype=np.int64)
        self.ze = sp.csr_matrix(ze, dtype=np.int64)
        self.field = field
        if self.re.shape != self.ze.shape:
            raise ValueError("part shapes differ")

    @property
    def shape(self):
        return self.re.shape

    def _coerce(self, other):
        if isinstance(other, CycloMatrix):
            if other.field != self.field:
                raise ValueError("matrices over different fields")
            return other
        other = sp.csr_matrix(other, dtype=np.int64)
        return CycloMatrix(other, sp.csr_matrix(other.shape, dtype=np.int64), self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return CycloMatrix(self.re + o.re, self.ze + o.ze, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return CycloMatrix(self.re - o.re, self.ze - o.ze, self.field)

    def __neg__(self):
        return CycloMatrix(-self.re, -self.ze, self.field)

    def __mul__(self, k):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        return CycloMatrix(self.re * int(k), self.ze * int(k), self.field)

    __rmul__ = __mul__

    def __matmul__(self, other):
        o = self._coerce(other)
        c0, c1, _ = _FIELDS[self.field]
        bd = self.ze @ o.ze
        re = self.re @ o.re + c0 * bd
        ze = self.re @ o.ze + self.ze @ o.re + c1 * bd
        return CycloMatrix(re, ze, self.field)

    def __rmatmul__(self, other):
        return self._coerce(other) @ self

    @property
    def H(self) -> "CycloMatrix":
        re, ze = self.re.T.tocsr(), self.ze.T.tocsr()
        if self.field == "i":
            return CycloMatrix(re, -ze, self.field)
        # conj(a + b w) = (a - b) - b w
        return CycloMatrix(re - ze, -ze, self.field)

    def to_complex(self) -> sp.csr_matrix:
        z = _FIELDS[self.field][2]
        return (self.re.astype(np.complex128) + z * self.ze.astype(np.complex128)).tocsr()

    def mod_p(self, p: int) -> sp.csr_matrix:
        r = field_root_mod_p(self.field, p)
        a = self.re.copy()
        a.data %= p
        b = self.ze.copy()
        b.data %= p
        # entries stay below p**2 + p < 2**63
        m = (a + b * r).tocsr()
        m.data %= p
        m.eliminate_zeros()
        return m

    def max_abs(self) -> float:
        return float(abs(self.to_complex()).max()) if self.re.nnz or self.ze.nnz else 0.0

    def is_zero(self) -> bool:
        return _nnz_true(self.re) == 0 and _nnz_true(self.ze) == 0


_ROOT_CACHE: dict = {}


def field_root_mod_p(field: str, p: int) -> int:
    key = (field, p)
    if key not in _ROOT_CACHE:
        order = 4 if field == "i" else 3
        for a in range(2, 1000):
            x = pow(a, (p - 1) // order, p)
            if x != 1 and (order == 3 or pow(x, 2, p) == p - 1):
                _ROOT_CACHE[key] = x
                break
    return _ROOT_CACHE[key]


def _nnz_true(m: sp.spmatrix) -> int:
    m = sp.csr_matrix(m)
    return int(np.count_nonzero(m.data))


def kind(M) -> str:
    if isinstance(M, CycloMatrix):
        return "cyclotomic"
    if np.issubdtype(M.dtype, np.integer):
        return "exact"
    return "float"


def adjoint(M):
    if isinstance(M, CycloMatrix):
        return M.H
    if np.iscomplexobj(M.data if sp.issparse(M) else M):
        return M.conj().T.tocsr() if sp.issparse(M) else M.conj().T
    return M.T.tocsr() if sp.issparse(M) else M.T


def to_complex(M):
    if isinstance(M, CycloMatrix):
        return M.to_complex()
    if sp.issparse(M):
        return M.astype(np.complex128).tocsr()
    return np.asarray(M, dtype=np.complex128)


def max_abs(M) -> float:
    """Largest entry modulus; exact zero test for integer and cyclotomic input."""
    if isinstance(M, CycloMatrix):
        return M.max_abs()
    if sp.issparse(M):
        M = sp.csr_matrix(M)
        return float(np.abs(M.data).max()) if M.nnz else 0.0
    return float(np.abs(M).max()) if M.size else 0.0


def is_zero(M, tol: float = 0.0) -> bool:
    if isinstance(M, CycloMatrix):
        return M.is_zero()
    return max_abs(M) <= tol


def scale(M, k: int):
    return M * k


def zero_like(shape, template):
    if isinstance(template, CycloMatrix):
        z = sp.csr_matrix(shape, dtype=np.int64)
        return CycloMatrix(z, z, template.field)
    return sp.csr_matrix(shape, dtype=template.dtype)


# --- ranks --------------------------------------------------------------------------


def rank_mod_p(M, p: int) -> int:
    """Rank over GF(p) (for cyclotomic input, after ``zeta -> root mod p``)."""
    if isinstance(M, CycloMatrix):
        A = M.mod_p(p)
    else:
        A = sp.csr_matrix(M, dtype=np.int64)
        A.data = A.data % p
    A.eliminate_zeros()
    if A.nnz == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T.tocsr()
    order = np.argsort(np.diff(A.indptr), kind="stable")
    A = A[order]
    A.sort_indices()
    return int(
        kernels.rank_mod_p(
            np.ascontiguousarray(A.indptr, dtype=np.int64),
            np.ascontiguousarray(A.indices, dtype=np.int64),
            np.ascontiguousarray(A.data, dtype=np.int64),
            A.shape[1],
            p,
        )
    )


def exact_rank(M) -> int:
    return max(rank_mod_p(M, p) for p in PRIMES)


def _integer_valued(A) -> bool:
    d = A.data
    return not np.any(d.imag) and np.array_equal(d.real, np.round(d.real))


def float_rank(M, rtol: float = RANK_RTOL) -> int:
    A = to_complex(M)
    if sp.issparse(A) and min(A.shape) > SVD_LIMIT and _integer_valued(A):
        # a dense SVD at this size is hopeless, and integer data has an exact answer
        return exact_rank(sp.csr_matrix(A.real.astype(np.int64)))
    A = A.toarray() if sp.issparse(A) else A
    if A.size == 0:
        return 0
    s = sla.svdvals(A)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def rank(M, mode: str = "auto") -> int:
    if mode == "auto":
        mode = "float" if kind(M) == "float" else "exact"
    if mode == "float":
        return float_rank(M)
    if kind(M) == "float":
        raise ValueError("exact rank requested for a floating-point matrix")
    return exact_rank(M)


# --- exact rational helpers ----------------------------------------------------------


def rational_nullspace(M) -> list:
    """Basis of the rational null space of an integer matrix, as integer vectors.

    Each basis vector is scaled to have integer entries (positive scaling
    does not change inertia of forms evaluated on it).
    """
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix
    from sympy.polys.matrices.sdm import SDM

    M = sp.dok_matrix(M, dtype=np.int64)
    rows: dict = {}
    for (i, j), v in M.items():
        if v:
            rows.setdefault(int(i), {})[int(j)] = QQ(int(v))
    dm = DomainMatrix.from_rep(SDM(rows, M.shape, QQ))
    null = dm.nullspace().to_Matrix()
    out = []
    for r in range(null.rows):
        vec = [Fraction(int(x.p), int(x.q)) for x in null.row(r)]
        den = math.lcm(*(x.denominator for x in vec))
        out.append([int(x * den) for x in vec])
    return out


def exact_inertia(Q) -> tuple:
    """``(n_plus, n_minus, n_zero)`` of a symmetric rational matrix.

    Symmetric Gaussian elimination: 1x1 pivots on nonzero diagonal entries,
    otherwise a 2x2 hyperbolic pivot, which contributes one of each sign.
    """
    A = [[Fraction(x) for x in row] for row in Q]
    n = len(A)
    for i in range(n):
        for j in range(n):
            if A[i][j] != A[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    plus = minus = 0
    while active:
        piv = next((i for i in active if A[i][i] != 0), None)
        if piv is not None:
            a = A[piv][piv]
            plus += a > 0
            minus += a < 0
            active.remove(piv)
            col = {i: A[i][piv] for i in active}
            for i in active:
                if col[i]:
                    f = col[i] / a
                    row_i = A[i]
                    row_p = A[piv]
                    for j in active:
                        row_i[j] -= f * row_p[j]
            continue
        pair = next(((i, j) for i in active for j in active if i < j and A[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        # x_i <- x_i + x_j makes the (i, i) entry 2 A[i][j] != 0
        for k in range(n):
            A[i][k] += A[j][k]
        for k in range(n):
            A[k][i] += A[k][j]
    zero = n - plus - minus
    return plus, minus, zero


def float_inertia(Q: np.ndarray, rtol: float = RANK_RTOL) -> tuple:
    """``(n_plus, n_minus, n_small, eigenvalues)`` of a hermitian matrix."""
    Q = np.asarray(Q)
    if Q.size == 0:
        return 0, 0, 0, np.zeros(0)
    Q = 0.5 * (Q + Q.conj().T)
    w = np.linalg.eigvalsh(Q)
    scale_ = np.abs(w).max()
    small = np.abs(w) <= rtol * scale_ if scale_ > 0 else np.ones_like(w, dtype=bool)
    return int(np.sum((w > 0) & ~small)), int(np.sum((w < 0) & ~small)), int(small.sum()), w
