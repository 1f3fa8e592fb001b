from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from hpsig import kernels, linalg
from hpsig.linalg import CycloMatrix

SMALL_PRIME = 101


def int_matrices(max_side=9):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(lambda s: arrays(np.int64, s, elements=st.integers(-3, 3)))


def kernel_args(M, p):
    A = sp.csr_matrix(M, dtype=np.int64)
    A.data %= p
    A.eliminate_zeros()
    A.sort_indices()
    return (np.ascontiguousarray(A.indptr, dtype=np.int64), np.ascontiguousarray(A.indices, dtype=np.int64),
            np.ascontiguousarray(A.data, dtype=np.int64), A.shape[1], p)


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_python_kernel_rank_mod_p(M):
    assert kernels.python.rank_mod_p(*kernel_args(M, SMALL_PRIME)) == oracles.rank_mod_p(M, SMALL_PRIME)


@pytest.mark.skipif(kernels.compiled is None, reason="compiled kernels not built")
@settings(max_examples=150, deadline=None)
@given(int_matrices(14))
def test_compiled_kernel_agrees_with_python(M):
    for p in (SMALL_PRIME, linalg.PRIMES[0]):
        args = kernel_args(M, p)
        assert kernels.compiled.rank_mod_p(*args) == kernels.python.rank_mod_p(*args)


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_exact_rank_matches_rational_rank(M):
    assert linalg.exact_rank(sp.csr_matrix(M)) == oracles.rank(M)


def test_large_prime_arithmetic_does_not_overflow():
    p = linalg.PRIMES[0]
    M = np.array([[p - 1, p - 2], [p - 3, p - 5]], dtype=np.int64)
    assert linalg.rank_mod_p(sp.csr_matrix(M), p) == oracles.rank_mod_p(M, p)


@pytest.mark.skipif(kernels.compiled is None, reason="compiled kernels not built")
def test_orientation_kernels_agree():
    from conftest import load
    from hpsig.simplicial import orient_facets

    for name in ("torus_7", "rp2_6", "cp2_9"):
        K = load(name)
        saved = kernels.propagate_orientation
        try:
            kernels.propagate_orientation = kernels.python.propagate_orientation
            py = orient_facets(K)
        finally:
            kernels.propagate_orientation = saved
        cy = orient_facets(K)
        assert np.array_equal(py[0], cy[0]) and py[1:] == cy[1:]


# --- cyclotomic matrices -----------------------------------------------------------


def test_cyclotomic_rank_matches_float():
    # [[1, w], [w^2, 1]] over Q(w), w a primitive cube root: det = 1 - w^3 = 0
    from hpsig.linalg import root_power_parts

    a, b, fld = root_power_parts(3, np.array([0, 1, 2, 0]))
    re = sp.csr_matrix(a.reshape(2, 2))
    ze = sp.csr_matrix(b.reshape(2, 2))
    M = CycloMatrix(re, ze, fld)
    assert linalg.exact_rank(M) == linalg.float_rank(M) == 1


def test_cyclotomic_adjoint_roundtrip():
    from hpsig.linalg import root_power_parts

    a, b, fld = root_power_parts(4, np.array([1, 3, 2, 0]))
    M = CycloMatrix(sp.csr_matrix(a.reshape(2, 2)), sp.csr_matrix(b.reshape(2, 2)), fld)
    A = linalg.adjoint(M)
    assert np.abs(linalg.to_complex(A).toarray() - linalg.to_complex(M).toarray().conj().T).max() < 1e-15


# --- rational helpers --------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(int_matrices(6))
def test_rational_nullspace(M):
    vecs = linalg.rational_nullspace(sp.csr_matrix(M))
    assert len(vecs) == M.shape[1] - oracles.rank(M)
    for v in vecs:
        assert not np.any(M.astype(object).dot(np.array(v, dtype=object)))


@settings(max_examples=60, deadline=None)
@given(arrays(np.int64, (4, 4), elements=st.integers(-4, 4)))
def test_exact_inertia_matches_eigenvalues(A):
    S = (A + A.T).tolist()
    assert linalg.exact_inertia(S) == oracles.inertia(S)


def test_exact_inertia_with_zero_diagonal():
    assert linalg.exact_inertia([[0, 1], [1, 0]]) == (1, 1, 0)
    assert linalg.exact_inertia([[Fraction(1, 2), 0], [0, 0]]) == (1, 0, 1)
