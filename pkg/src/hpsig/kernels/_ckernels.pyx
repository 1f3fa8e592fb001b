# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: sparse rank over GF(p) and facet orientation propagation."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from libc.stdint cimport int64_t, int8_t

cnp.import_array()


cdef inline int64_t _inv_mod(int64_t a, int64_t p):
    cdef int64_t t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rank_mod_p(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
               cnp.int64_t[::1] data, Py_ssize_t ncols, int64_t p):
    """Rank over GF(p) of a CSR matrix with reduced entries in [0, p).

    Rows are inserted one at a time into a row-echelon pool keyed by
    leading column; rows should be presorted by nonzero count.
    """
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef vector[vector[int64_t]] pcols
    cdef vector[vector[int64_t]] pvals
    cdef vector[int64_t] pivot_of = vector[int64_t](ncols, -1)
    cdef vector[int64_t] ccols, cvals, ncols_buf, nvals_buf
    cdef Py_ssize_t i, k, a, b, na, nb
    cdef int64_t lc, f, v, inv, rank = 0, piv
    for i in range(nrows):
        ccols.clear()
        cvals.clear()
        for k in range(indptr[i], indptr[i + 1]):
            if data[k] % p != 0:
                ccols.push_back(indices[k])
                cvals.push_back(data[k] % p)
        while ccols.size() > 0:
            lc = ccols[0]
            piv = pivot_of[lc]
            if piv < 0:
                inv = _inv_mod(cvals[0], p)
                for k in range(<Py_ssize_t>cvals.size()):
                    cvals[k] = (cvals[k] * inv) % p
                pivot_of[lc] = pcols.size()
                pcols.push_back(ccols)
                pvals.push_back(cvals)
                rank += 1
                break
            # cur <- cur - f * pivot  (pivot is monic)
            f = cvals[0]
            ncols_buf.clear()
            nvals_buf.clear()
            na = ccols.size()
            nb = pcols[piv].size()
            a = 1
            b = 1
            while a < na or b < nb:
                if b >= nb or (a < na and ccols[a] < pcols[piv][b]):
                    ncols_buf.push_back(ccols[a])
                    nvals_buf.push_back(cvals[a])
                    a += 1
                elif a >= na or pcols[piv][b] < ccols[a]:
                    v = (p - (f * pvals[piv][b]) % p) % p
                    if v != 0:
                        ncols_buf.push_back(pcols[piv][b])
                        nvals_buf.push_back(v)
                    b += 1
                else:
                    v = (cvals[a] - (f * pvals[piv][b]) % p) % p
                    if v < 0:
                        v += p
                    if v != 0:
                        ncols_buf.push_back(ccols[a])
                        nvals_buf.push_back(v)
                    a += 1
                    b += 1
            ccols.swap(ncols_buf)
            cvals.swap(nvals_buf)
    return rank


def propagate_orientation(Py_ssize_t n, cnp.int64_t[::1] adj_ptr,
                          cnp.int64_t[::1] adj_idx, cnp.int8_t[::1] adj_rel):
    """Breadth-first sign propagation; the least index of each component gets +1.

    Returns ``(signs, consistent, n_components)``.
    """
    signs_arr = np.zeros(n, dtype=np.int8)
    cdef cnp.int8_t[::1] signs = signs_arr
    cdef vector[int64_t] queue
    cdef Py_ssize_t root, head, k
    cdef int64_t f, g
    cdef int8_t want
    cdef bint consistent = True
    cdef Py_ssize_t ncomp = 0
    for root in range(n):
        if signs[root] != 0:
            continue
        ncomp += 1
        signs[root] = 1
        queue.clear()
        queue.push_back(root)
        head = 0
        while head < <Py_ssize_t>queue.size():
            f = queue[head]
            head += 1
            for k in range(adj_ptr[f], adj_ptr[f + 1]):
                g = adj_idx[k]
                want = signs[f] * adj_rel[k]
                if signs[g] == 0:
                    signs[g] = want
                    queue.push_back(g)
                elif signs[g] != want:
                    consistent = False
    return signs_arr, consistent, ncomp
