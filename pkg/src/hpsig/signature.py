"""Signatures of middle-dimensional forms: integer, multi-signature, products, oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from . import linalg
from .covers import CoverComplex, build_cover, materialize_total_space
from .errors import DegenerateForm, NotClosedOriented
from .poincare import HilbertPoincareComplex, build_hp, validate_hp
from .simplicial import (
    FundamentalCycle,
    OrientedSimplicialComplex,
    boundary_complex,
    boundary_matrix,
    certify_manifold,
    product,
    product_cycle,
)

# middle degrees up to this many simplices get an exact rational computation
EXACT_LIMIT = 500
MATERIALIZE_LIMIT = 4


def _middle(hp: HilbertPoincareComplex) -> int:
    return hp.d // 2


def _exact_details(hp: HilbertPoincareComplex) -> dict:
    l = _middle(hp)
    E = hp.E
    n = E.ranks[l]
    parts = []
    if l >= 1:
        parts.append(sp.csr_matrix(E.b[l], dtype=np.int64))
    if l + 1 <= hp.d:
        parts.append(sp.csr_matrix(E.b[l + 1], dtype=np.int64).T)
    if parts:
        vecs = linalg.rational_nullspace(sp.vstack(parts).tocsr())
    else:
        vecs = [list(row) for row in np.eye(n, dtype=np.int64)]
    if not vecs:
        return {"signature": 0, "rank": 0, "method": "exact", "plus": 0, "minus": 0}
    H = np.array(vecs, dtype=object).T
    Dl = sp.csr_matrix(hp.Dtilde_num[l], dtype=np.int64)
    Q = H.T.dot(np.array(Dl.toarray(), dtype=object).dot(H))
    k = H.shape[1]
    if l % 2 == 1:
        # iQ has eigenvalues in +- pairs: only nondegeneracy needs checking
        r = linalg.exact_rank(sp.csr_matrix(np.array(Q, dtype=np.int64)))
        if r < k:
            raise DegenerateForm(f"middle form has rank {r} < {k}")
        return {"signature": 0, "rank": k, "method": "exact", "plus": k // 2, "minus": k // 2}
    plus, minus, zero = linalg.exact_inertia(Q.tolist())
    if zero:
        raise DegenerateForm(f"middle form has a {zero}-dimensional radical")
    return {"signature": plus - minus, "rank": k, "method": "exact", "plus": plus, "minus": minus}


def _float_details(hp: HilbertPoincareComplex) -> dict:
    l = _middle(hp)
    H = hp.harmonic(l)
    k = H.shape[1]
    if k == 0:
        return {"signature": 0, "rank": 0, "method": "float", "plus": 0, "minus": 0, "eigenvalues": []}
    Q = H.conj().T @ (hp.Dtilde(l) @ H)
    if l % 2 == 1:
        Q = 1j * Q
    plus, minus, small, w = linalg.float_inertia(Q)
    if small:
        raise DegenerateForm(f"{small} eigenvalues of the middle form are below tolerance")
    return {
        "signature": plus - minus,
        "rank": k,
        "method": "float",
        "plus": plus,
        "minus": minus,
        "eigenvalues": [float(x) for x in w],
    }


def signature_details(hp: HilbertPoincareComplex, mode: str = "auto") -> dict:
    """Signature with its bookkeeping (method, inertia, odd-dimension flag)."""
    if hp.d % 2:
        return {"signature": 0, "odd_dimension": True, "method": "convention"}
    l = _middle(hp)
    if mode == "auto":
        mode = "exact" if hp.mode == "exact" and hp.E.ranks[l] <= EXACT_LIMIT else "float"
    if mode == "exact" and hp.mode != "exact":
        raise ValueError("exact signatures need rational coefficients")
    out = _exact_details(hp) if mode == "exact" else _float_details(hp)
    out["odd_dimension"] = False
    return out


def signature_complex(hp: HilbertPoincareComplex, mode: str = "auto") -> int:
    """Signature of the form induced by the symmetrised duality on middle homology.

    Odd ``d`` gives 0 (see :func:`signature_details` for the flag).  For
    ``d = 2 (mod 4)`` the form is skew and the signature of ``i Q`` is taken.
    """
    return int(signature_details(hp, mode)["signature"])


def signature_of(K: OrientedSimplicialComplex, C: FundamentalCycle | None = None, mode: str = "auto") -> int:
    """Convenience: certify (if no cycle is given), build and take the signature."""
    if C is None:
        C = certify_manifold(K).fundamental_cycle
    return signature_complex(build_hp(K, C, mode="float" if mode == "float" else "auto"), mode)


# --- finite covers ------------------------------------------------------------------


@dataclass
class MultiSignature:
    entries: dict
    group_order: int
    dims: dict
    total_signature: int | None = None
    consistent: bool | None = None
    axioms: dict = field(default_factory=dict)

    def weighted_sum(self) -> int:
        return sum(self.dims[k] * v for k, v in self.entries.items())

    def as_dict(self) -> dict:
        return {
            "entries": dict(self.entries),
            "dims": dict(self.dims),
            "group_order": self.group_order,
            "weighted_sum": self.weighted_sum(),
            "trace": str(trace_value(self)),
            "total_signature": self.total_signature,
            "consistent": self.consistent,
        }


def multisignature(
    cover: CoverComplex,
    cycle: FundamentalCycle | None = None,
    mode: str = "auto",
    materialize: str | bool = "auto",
    validate: bool = True,
) -> MultiSignature:
    """Signature of the twisted middle form for every irrep of the deck group.

    With ``materialize`` (automatic for groups of order at most 4) the total
    space is built explicitly and its signature compared with the weighted
    sum of the entries.
    """
    base, G = cover.base, cover.group
    if cycle is None:
        cycle = certify_manifold(base).fundamental_cycle
    entries, dims, axioms = {}, {}, {}
    for rho in G.irreps:
        hp = build_hp(base, cycle, cover, rho, mode)
        if validate:
            rep = validate_hp(hp)
            axioms[rho.label] = rep["pass"]
        entries[rho.label] = signature_complex(hp)
        dims[rho.label] = rho.dim
    ms = MultiSignature(entries, G.order, dims, axioms=axioms)
    if materialize == "auto":
        materialize = G.order <= MATERIALIZE_LIMIT
    if materialize:
        total, lifted = materialize_total_space(cover, cycle)
        ms.total_signature = signature_complex(build_hp(total, lifted))
        ms.consistent = ms.weighted_sum() == ms.total_signature
    return ms


def trace_value(ms: MultiSignature) -> Fraction:
    """``(1/|G|) sum_rho dim(rho) * entries[rho]``."""
    return Fraction(ms.weighted_sum(), ms.group_order)


# --- products -----------------------------------------------------------------------


def product_epsilon(p: int, q: int) -> int:
    """1 when both dimensions are odd, else 0."""
    return int(p % 2 == 1 and q % 2 == 1)


def verify_product_signature(
    K: OrientedSimplicialComplex,
    L: OrientedSimplicialComplex,
    CK: FundamentalCycle | None = None,
    CL: FundamentalCycle | None = None,
    mode: str = "auto",
) -> dict:
    """Compare ``sig(K x L)`` with ``sig(K) sig(L)`` on the staircase product."""
    if CK is None:
        CK = certify_manifold(K).fundamental_cycle
    if CL is None:
        CL = certify_manifold(L).fundamental_cycle
    if CK is None or CL is None:
        raise NotClosedOriented("both factors must be closed and oriented")
    eps = product_epsilon(K.dim, L.dim)
    sk = signature_of(K, CK, mode)
    sl = signature_of(L, CL, mode)
    P = product(K, L)
    CP = product_cycle(K, CK, L, CL, P)
    hp = build_hp(P, CP, mode="float" if mode == "float" else "auto")
    sp_ = signature_complex(hp, mode)
    out = {
        "dims": [K.dim, L.dim],
        "epsilon": eps,
        "signature_product": sp_,
        "signature_factors": [sk, sl],
        "product_of_signatures": sk * sl,
        "top_cells": P.n(P.dim),
        "pass": sp_ == sk * sl,
    }
    if eps:
        out["note"] = "odd factors: both sides vanish with finite-dimensional coefficients"
    return out


# --- independent cup-product oracle -------------------------------------------------


def _cocycle_representatives(K: OrientedSimplicialComplex, l: int) -> list:
    """Integer cocycles in degree l whose classes form a basis of rational cohomology."""
    n = K.n(l)
    if l + 1 <= K.dim:
        cocycles = linalg.rational_nullspace(boundary_matrix(K, l + 1).T.tocsr())
    else:
        cocycles = [list(r) for r in np.eye(n, dtype=np.int64)]
    cobound = boundary_matrix(K, l).T.tocsr() if l >= 1 else sp.csr_matrix((n, 0), dtype=np.int64)
    chosen: list = []
    current = cobound
    r = linalg.exact_rank(current) if current.shape[1] else 0
    for z in cocycles:
        trial = sp.hstack([current, sp.csr_matrix(np.array(z, dtype=np.int64)).T]).tocsr()
        r2 = linalg.exact_rank(trial)
        if r2 > r:
            chosen.append(z)
            current, r = trial, r2
    return chosen


def cup_oracle_signature(K: OrientedSimplicialComplex, C: FundamentalCycle | None = None) -> int:
    """Signature of ``(a, b) -> (a cup b)(C)`` on middle rational cohomology.

    Uses the Alexander-Whitney cup product evaluated facet by facet, with
    cocycle representatives chosen independently of any harmonic projection.
    """
    if C is None:
        C = certify_manifold(K).fundamental_cycle
    if C is None:
        raise NotClosedOriented(f"{K.name or 'complex'} has no fundamental cycle")
    d = K.dim
    if d % 4:
        # skew or odd-degree pairing: no symmetric form to take the signature of
        return 0
    l = d // 2
    reps = _cocycle_representatives(K, l)
    if not reps:
        return 0
    Z = np.array(reps, dtype=np.int64)  # (k, n_l)
    top = K.simplices[d]
    front = K.index_of(l, top[:, : l + 1])
    back = K.index_of(l, top[:, l:])
    eps = C.as_vector()
    # Q[i, j] = sum_sigma eps * a_i(front) * a_j(back)
    Q = (Z[:, front] * eps) @ Z[:, back].T
    sym = Q + Q.T
    plus, minus, zero = linalg.exact_inertia(sym.tolist())
    if zero:
        raise DegenerateForm("cup-product form is degenerate")
    return plus - minus


# --- bordism ------------------------------------------------------------------------


def bordism_check(
    K: OrientedSimplicialComplex,
    cover: CoverComplex | None = None,
    mode: str = "auto",
) -> dict:
    """Signature (and multi-signature of the restricted cover) of the boundary of K."""
    dK, cycle = boundary_complex(K)
    hp = build_hp(dK, cycle, mode="float" if mode == "float" else "auto")
    details = signature_details(hp, mode)
    out = {
        "boundary_f_vector": list(dK.f_vector),
        "boundary_dim": dK.dim,
        "signature": int(details["signature"]),
        "odd_dimension": bool(details["odd_dimension"]),
    }
    zero = out["signature"] == 0
    if cover is not None:
        pos = {v: i for i, v in enumerate(cover.base.vertices)}
        cocycle = {}
        for a, b in dK.simplices[1].tolist():
            v, w = dK.vertices[a], dK.vertices[b]
            cocycle[(v, w)] = int(cover.edge_element[pos[v], pos[w]])
        restricted = build_cover(dK, cover.group, cocycle)
        ms = multisignature(restricted, cycle, mode, materialize=False)
        out["multisignature"] = ms.as_dict()
        zero = zero and all(v == 0 for v in ms.entries.values())
    out["zero"] = zero
    return out
