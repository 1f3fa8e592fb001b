"""Pure-Python versions of the compiled kernels (same signatures, same results)."""

from collections import deque

import numpy as np


def rank_mod_p(indptr, indices, data, ncols, p):
    pivots = {}
    rank = 0
    for i in range(len(indptr) - 1):
        row = {}
        for k in range(indptr[i], indptr[i + 1]):
            v = int(data[k]) % p
            if v:
                row[int(indices[k])] = v
        while row:
            lc = min(row)
            piv = pivots.get(lc)
            if piv is None:
                inv = pow(row[lc], -1, p)
                pivots[lc] = {c: (v * inv) % p for c, v in row.items()}
                rank += 1
                break
            f = row[lc]
            for c, v in piv.items():
                nv = (row.get(c, 0) - f * v) % p
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return rank


def propagate_orientation(n, adj_ptr, adj_idx, adj_rel):
    signs = np.zeros(n, dtype=np.int8)
    consistent = True
    ncomp = 0
    for root in range(n):
        if signs[root]:
            continue
        ncomp += 1
        signs[root] = 1
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for k in range(adj_ptr[f], adj_ptr[f + 1]):
                g = adj_idx[k]
                want = signs[f] * adj_rel[k]
                if signs[g] == 0:
                    signs[g] = want
                    queue.append(g)
                elif signs[g] != want:
                    consistent = False
    return signs, consistent, ncomp
