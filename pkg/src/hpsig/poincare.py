"""Cap-product duality, its symmetrisation, and the Hilbert-Poincare axioms.

The duality sends a p-cochain to a (d-p)-chain.  For a facet
``s = [v_0 .. v_d]`` with cycle coefficient ``e_s`` the contribution is
``e_s * xi([v_0 .. v_p]) * [v_p .. v_d]`` (front face on the cochain, back
face on the chain).  Twisted coefficients are transported from ``v_0`` to
``v_p`` with the same convention as the twisted boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .chain import BasedChainComplex, complex_of, harmonic_basis, harmonic_residual
from .covers import CoverComplex, assemble, transport_elements, twisted_boundary
from .errors import NotClosedOriented
from .simplicial import (
    FundamentalCycle,
    Incidence,
    OrientedSimplicialComplex,
    _ridge_degrees,
)

FLOAT_TOL = 1e-12
HOMOLOGY_TOL = 1e-8


def _sign(d: int, p: int) -> int:
    return -1 if ((d - p) * p) % 2 else 1


def _require_closed_oriented(K: OrientedSimplicialComplex, C: FundamentalCycle | None) -> None:
    if C is None:
        raise NotClosedOriented(f"{K.name or 'complex'} has no fundamental cycle")
    if C.complex is not K and not C.complex.same_as(K):
        raise NotClosedOriented("fundamental cycle belongs to a different complex")
    coeffs = C.as_vector()
    if coeffs.shape[0] != K.n(K.dim) or not np.all(np.abs(coeffs) == 1):
        raise NotClosedOriented("cycle must carry +-1 on every facet")
    if K.dim >= 1 and not np.all(_ridge_degrees(K) == 2):
        raise NotClosedOriented(f"{K.name or 'complex'} is not closed")
    if not C.is_cycle():
        raise NotClosedOriented("fundamental chain is not a cycle")


def cap_incidence(K: OrientedSimplicialComplex, C: FundamentalCycle, p: int) -> Incidence:
    d = K.dim
    top = K.simplices[d]
    cols = K.index_of(p, top[:, : p + 1])
    rows = K.index_of(d - p, top[:, p:])
    return Incidence(rows, cols, C.as_vector(), top[:, p], top[:, 0], (K.n(d - p), K.n(p)))


def cap_duality(
    K: OrientedSimplicialComplex,
    C: FundamentalCycle | None,
    cover: CoverComplex | None = None,
    irrep=None,
    mode: str = "auto",
) -> list:
    """``D[p]: C^p -> C_{d-p}``, ``xi -> xi cap C``, for ``p = 0..d``."""
    _require_closed_oriented(K, C)
    rho = None
    if cover is not None:
        rho = cover.group.irrep(irrep if irrep is not None else 0)
    out = []
    for p in range(K.dim + 1):
        inc = cap_incidence(K, C, p)
        elems = transport_elements(cover, inc) if cover is not None else None
        out.append(assemble(inc, elems, rho, mode))
    return out


def symmetrize(D: list) -> list:
    """Numerators of ``1/2 (D[p] + (-1)^{(d-p)p} D[d-p]^*)``.

    The halving is deferred (denominator 2) so exact modes stay integral.
    """
    d = len(D) - 1
    return [D[p] + linalg.adjoint(D[d - p]) * _sign(d, p) for p in range(d + 1)]


@dataclass(frozen=True, eq=False)
class HilbertPoincareComplex:
    """Chain complex plus symmetrised duality ``Dtilde[p] = Dtilde_num[p] / 2``."""

    E: BasedChainComplex
    D: list
    Dtilde_num: list
    cycle: FundamentalCycle | None = None
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def d(self) -> int:
        return self.E.d

    @property
    def mode(self) -> str:
        return self.E.mode

    def Dtilde(self, p: int):
        """Floating-point ``Dtilde[p]``."""
        return linalg.to_complex(self.Dtilde_num[p]) * 0.5

    def harmonic(self, p: int) -> np.ndarray:
        if p not in self._cache:
            self._cache[p] = harmonic_basis(self.E, p)
        return self._cache[p]


def build_hp(
    K: OrientedSimplicialComplex,
    C: FundamentalCycle | None,
    cover: CoverComplex | None = None,
    irrep=None,
    mode: str = "auto",
) -> HilbertPoincareComplex:
    """Simplicial HP complex, optionally twisted by an irrep of a cover's group."""
    D = cap_duality(K, C, cover, irrep, mode)
    if cover is None:
        E = complex_of(K)
        if mode == "float":
            E = BasedChainComplex(
                (None,) + tuple(linalg.to_complex(m) for m in E.b[1:]), E.ranks, "float"
            )
        label = K.name
    else:
        rho = cover.group.irrep(irrep if irrep is not None else 0)
        b = twisted_boundary(cover, rho, mode)
        m = rho.dim
        E = BasedChainComplex(
            tuple(b), tuple(K.n(p) * m for p in range(K.dim + 1)), linalg.kind(D[0])
        )
        label = f"{K.name}[{rho.label}]"
    return HilbertPoincareComplex(E, D, symmetrize(D), C, label)


def axiom_i_residual(hp: HilbertPoincareComplex, which: str = "symmetrized") -> float:
    """Max entry of ``Dt[d-p]^* - (-1)^{(d-p)p} Dt[p]`` over p."""
    D = hp.Dtilde_num if which == "symmetrized" else hp.D
    d = hp.d
    scale = 0.5 if which == "symmetrized" else 1.0
    worst = 0.0
    for p in range(d + 1):
        diff = linalg.adjoint(D[d - p]) - D[p] * _sign(d, p)
        worst = max(worst, linalg.max_abs(diff) * scale)
    return worst


def axiom_ii_residual(hp: HilbertPoincareComplex, which: str = "raw") -> float:
    """Max entry of ``D b^* + (-1)^p b D`` on ``E_p`` over p."""
    D = hp.D if which == "raw" else hp.Dtilde_num
    scale = 1.0 if which == "raw" else 0.5
    E, d = hp.E, hp.d
    worst = 0.0
    for p in range(d):
        term = D[p + 1] @ linalg.adjoint(E.b[p + 1])
        if d - p >= 1:
            other = E.b[d - p] @ D[p]
            term = term + other if p % 2 == 0 else term - other
        worst = max(worst, linalg.max_abs(term) * scale)
    return worst


def homology_isomorphism_report(hp: HilbertPoincareComplex, degrees=None, tol: float = HOMOLOGY_TOL) -> dict:
    """Induced maps ``H^p -> H_{d-p}`` on harmonic representatives."""
    d = hp.d
    degrees = range(d + 1) if degrees is None else degrees
    per = {}
    ok = True
    for p in degrees:
        Hp = hp.harmonic(p)
        Hq = hp.harmonic(d - p)
        entry = {"h_p": int(Hp.shape[1]), "h_dual": int(Hq.shape[1])}
        if Hp.shape[1] != Hq.shape[1]:
            entry["pass"] = False
        elif Hp.shape[1] == 0:
            entry["pass"] = True
            entry["sigma_min"] = None
        else:
            M = Hq.conj().T @ (hp.Dtilde(p) @ Hp)
            s = np.linalg.svd(M, compute_uv=False)
            entry["sigma_min"] = float(s.min())
            entry["pass"] = bool(s.min() > tol * max(1.0, s.max()))
            entry["harmonic_residual"] = max(
                harmonic_residual(hp.E, p, Hp), harmonic_residual(hp.E, d - p, Hq)
            )
        ok = ok and entry["pass"]
        per[p] = entry
    return {"pass": ok, "degrees": per}


def validate_hp(hp: HilbertPoincareComplex, check_homology: bool = True, degrees=None) -> dict:
    """Per-axiom pass/fail with residuals.

    (i) and (ii) are exact comparisons in integer and cyclotomic modes and use
    a 1e-12 tolerance for floating point; (iii) is a floating-point check on
    harmonic representatives at 1e-8.
    """
    exact = hp.mode in ("exact", "cyclotomic")
    tol = 0.0 if exact else FLOAT_TOL
    r_i = axiom_i_residual(hp)
    r_ii_raw = axiom_ii_residual(hp, "raw")
    r_ii_sym = axiom_ii_residual(hp, "symmetrized")
    bb = hp.E.squares_to_zero()
    report = {
        "mode": hp.mode,
        "chain_complex": {"pass": bb <= tol, "residual": bb},
        "i": {"pass": r_i <= tol, "residual": r_i},
        "ii": {
            "pass": r_ii_raw <= tol and r_ii_sym <= tol,
            "residual_raw": r_ii_raw,
            "residual_symmetrized": r_ii_sym,
        },
    }
    if check_homology:
        report["iii"] = homology_isomorphism_report(hp, degrees)
    report["pass"] = all(report[k]["pass"] for k in ("chain_complex", "i", "ii")) and (
        report["iii"]["pass"] if check_homology else True
    )
    return report
