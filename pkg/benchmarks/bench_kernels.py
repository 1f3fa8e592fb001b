"""Time the compiled kernels against their pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--fixtures torus_7 sphere_d4 cp2_9]

Each case runs a public entry point twice, once per backend, and checks that
both backends return the same answer.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
import timeit

from hpsig import io, kernels
from hpsig.linalg import exact_rank
from hpsig.simplicial import barycentric_subdivision, boundary_matrix, orient_facets


@contextlib.contextmanager
def backend(impl):
    saved = kernels.rank_mod_p, kernels.propagate_orientation
    kernels.rank_mod_p, kernels.propagate_orientation = impl.rank_mod_p, impl.propagate_orientation
    try:
        yield
    finally:
        kernels.rank_mod_p, kernels.propagate_orientation = saved


def cases(names: list) -> list:
    out = []
    for name in names:
        K = barycentric_subdivision(io.load_fixture(name)).complex
        label = f"sd({name})"
        out.append((f"orient_facets {label} n={K.n(K.dim)}", lambda K=K: orient_facets(K)[1:]))
        q = (K.dim + 1) // 2
        B = boundary_matrix(K, q)
        out.append((f"exact_rank {label} d{q} {B.shape[0]}x{B.shape[1]}", lambda B=B: exact_rank(B)))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--fixtures", nargs="+", default=["torus_7", "sphere_d4", "cp2_9"])
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    print(f"{'case':<52} {'cython s':>9} {'python s':>9} {'speedup':>8}")
    for label, fn in cases(args.fixtures):
        timings, answers = [], []
        for impl in (kernels.compiled, kernels.python):
            with backend(impl):
                answers.append(fn())
                timings.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)))
        if answers[0] != answers[1]:
            print(f"{label}: backends disagree ({answers[0]} vs {answers[1]})", file=sys.stderr)
            return 1
        tc, tp = timings
        print(f"{label:<52} {tc:9.4f} {tp:9.4f} {tp / tc:8.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
