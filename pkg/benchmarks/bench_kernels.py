"""Compiled vs pure-Python kernel timings.

Usage::

    python benchmarks/bench_kernels.py [--bits 256] [--repeat 3]

Each kernel is run on the same inputs in both backends; the script
checks that the outputs are identical and prints the best-of-``repeat``
wall time and the speed-up.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import gmpy2

from kissingpoly import _backend
from kissingpoly.moments import as_omega, moment_values, series_terms
from kissingpoly.numerics import workprec
from kissingpoly.oracle import gauss_legendre
from kissingpoly.orthopoly import tilde_op
from kissingpoly.roots import _initial


def cases(bits: int) -> dict:
    om = as_omega("12.5", bits)
    omc = as_omega("8,0.75", bits)
    mu = list(moment_values(20, om, bits))
    muc = list(moment_values(20, omc, bits))
    mat = [[mu[j + k] for k in range(9)] for j in range(9)]
    rhs = [mu[9 + j] for j in range(9)]
    coeffs = list(tilde_op(9, omc).coeffs)
    rule = gauss_legendre(40, bits)
    init = _initial(coeffs, bits)
    with workprec(bits):
        z = as_omega("0.3,0.2", bits)
        eps = gmpy2.mpfr(2) ** -(bits - 8)
    nt = series_terms(om, bits + 64)
    return {
        "moment_series m=20": lambda k: k.moment_series(om, 20, nt, bits + 64, bits),
        "det 9x9": lambda k: k.det(mat, bits),
        "solve 9x9": lambda k: k.solve(mat, rhs, bits),
        "hankel_jet n=8 order=2": lambda k: k.hankel_jet(muc, 8, 2, bits),
        "tilde_coeffs n=9": lambda k: k.tilde_coeffs(muc, 9, bits),
        "horner deg 9": lambda k: k.horner(coeffs, z, bits),
        "aberth deg 9": lambda k: k.aberth(coeffs, init, bits, 500, eps),
        "heine_sum n=3 q=40": lambda k: k.heine_sum(list(rule.nodes), list(rule.weights), om, 3, None, bits, 0, 40),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if "compiled" not in _backend.available():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    py, cy = _backend.get("python"), _backend.get("compiled")
    print(f"{'kernel':28s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speed-up':>9s}  identical")
    for name, fn in cases(args.bits).items():
        same = repr(fn(py)) == repr(fn(cy))
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:28s} {tp * 1e3:12.3f} {tc * 1e3:14.3f} {tp / tc:9.1f}  {same}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
