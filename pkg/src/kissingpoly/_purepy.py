"""Reference kernels on gmpy2 numbers.

Every routine here has a twin in ``_ckernels.pyx`` that performs the
same sequence of correctly rounded MPFR operations, so both backends
return bit-identical results.  Inputs are rounded to the working
precision on entry.  Complex products are the correctly rounded MPC
products (equivalently ``fmms``/``fmma`` on the components); complex
quotients use :func:`cdiv`.
"""

import gmpy2
from gmpy2 import mpc, mpfr

from .numerics import workprec

NAME = "python"


def _round(z):
    return mpc(+z.real, +z.imag) if isinstance(z, mpc) else mpc(+mpfr(z), 0)


def cdiv(a, b):
    """Complex quotient ``a/b`` via fused multiply-add steps.

    ``den = |b|^2`` and the two numerators are each rounded once, so the
    result is within a few ulps of the exact quotient.
    """
    br, bi = b.real, b.imag
    den = gmpy2.fmma(br, br, bi, bi)
    re = gmpy2.fmma(a.real, br, a.imag, bi) / den
    im = gmpy2.fmms(a.imag, br, a.real, bi) / den
    return mpc(re, im)


def _l1(z):
    return abs(z.real) + abs(z.imag)


def moment_series(omega, m, nterms, wp, bits):
    """mu_0..mu_m of exp(i omega x) on [-1, 1] by the power series.

    The ``j``-th series term ``(i omega)^j / j!`` is accumulated into every
    ``mu_n`` with ``n + j`` even, weighted by ``2 / (n + j + 1)``.  All
    work is done at ``wp`` bits; the sums are rounded to ``bits``.
    """
    with workprec(wp):
        zr = -(+omega.imag)
        zi = +omega.real
        ar, ai = mpfr(1), mpfr(0)
        sr = [mpfr(0)] * (m + 1)
        si = [mpfr(0)] * (m + 1)
        for j in range(nterms + 1):
            tr = gmpy2.mul_2exp(ar, 1)
            ti = gmpy2.mul_2exp(ai, 1)
            for n in range(j & 1, m + 1, 2):
                k = n + j + 1
                sr[n] = sr[n] + tr / k
                si[n] = si[n] + ti / k
            pr = gmpy2.fmms(ar, zr, ai, zi)
            pi = gmpy2.fmma(ar, zi, ai, zr)
            ar = pr / (j + 1)
            ai = pi / (j + 1)
    with workprec(bits):
        return [mpc(+sr[n], +si[n]) for n in range(m + 1)]


def _det_inplace(a):
    n = len(a)
    d = mpc(1)
    for col in range(n):
        piv, best = col, _l1(a[col][col])
        for r in range(col + 1, n):
            v = _l1(a[r][col])
            if v > best:
                piv, best = r, v
        if best == 0:
            return mpc(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            d = -d
        pv = a[col][col]
        d = d * pv
        rowc = a[col]
        for r in range(col + 1, n):
            row = a[r]
            f = cdiv(row[col], pv)
            for c in range(col + 1, n):
                row[c] = row[c] - f * rowc[c]
    return d


def det(matrix, bits):
    """Determinant by Gaussian elimination with partial pivoting.

    Pivots are chosen by largest ``|re| + |im|`` (first one on ties).
    """
    with workprec(bits):
        a = [[_round(x) for x in row] for row in matrix]
        return _det_inplace(a)


def solve(matrix, rhs, bits):
    """Solve ``A x = b`` by partial-pivoting elimination.

    Returns ``(x, det)``; ``x`` is None when the matrix is exactly
    singular at working precision.
    """
    with workprec(bits):
        a = [[_round(x) for x in row] for row in matrix]
        b = [_round(x) for x in rhs]
        n = len(a)
        d = mpc(1)
        for col in range(n):
            piv, best = col, _l1(a[col][col])
            for r in range(col + 1, n):
                v = _l1(a[r][col])
                if v > best:
                    piv, best = r, v
            if best == 0:
                return None, mpc(0)
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                b[col], b[piv] = b[piv], b[col]
                d = -d
            pv = a[col][col]
            d = d * pv
            rowc = a[col]
            for r in range(col + 1, n):
                row = a[r]
                f = cdiv(row[col], pv)
                for c in range(col + 1, n):
                    row[c] = row[c] - f * rowc[c]
                b[r] = b[r] - f * b[col]
        x = [mpc(0)] * n
        for r in range(n - 1, -1, -1):
            s = b[r]
            row = a[r]
            for c in range(r + 1, n):
                s = s - row[c] * x[c]
            x[r] = cdiv(s, row[r])
        return x, d


def _row(mu, r, n, kind):
    # kind 0: mu_{r+k}; 1: i*mu_{r+k+1}; 2: -mu_{r+k+2}
    if kind == 0:
        return [mu[r + k] for k in range(n + 1)]
    if kind == 1:
        return [mpc(-mu[r + k + 1].imag, mu[r + k + 1].real) for k in range(n + 1)]
    return [-mu[r + k + 2] for k in range(n + 1)]


def hankel_jet(mu, n, order, bits):
    """``[h_n, h_n', h_n'']`` (up to ``order``) from the moments.

    Derivatives use ``d mu_k / d omega = i mu_{k+1}`` and the row
    replacement rule for derivatives of determinants.  Sums are taken
    in a fixed order: diagonal terms by row, then row pairs
    lexicographically.
    """
    with workprec(bits):
        mu = [_round(x) for x in mu[: 2 * n + 1 + order]]
        base = [_row(mu, r, n, 0) for r in range(n + 1)]
        out = [_det_inplace([list(row) for row in base])]
        if order >= 1:
            d1 = [_row(mu, r, n, 1) for r in range(n + 1)]
            s = mpc(0)
            for r in range(n + 1):
                a = [list(row) for row in base]
                a[r] = list(d1[r])
                s = s + _det_inplace(a)
            out.append(s)
        if order >= 2:
            sd = mpc(0)
            for r in range(n + 1):
                a = [list(row) for row in base]
                a[r] = _row(mu, r, n, 2)
                sd = sd + _det_inplace(a)
            sp = mpc(0)
            for r in range(n + 1):
                for t in range(r + 1, n + 1):
                    a = [list(row) for row in base]
                    a[r] = list(d1[r])
                    a[t] = list(d1[t])
                    sp = sp + _det_inplace(a)
            out.append(sd + mpc(gmpy2.mul_2exp(sp.real, 1), gmpy2.mul_2exp(sp.imag, 1)))
        return out


def tilde_coeffs(mu, n, bits):
    """Coefficients of the unnormalized orthogonal polynomial of degree n.

    ``c_k = (-1)^(k+n) det(M_k)`` where ``M_k`` is the n-by-n Hankel
    block with rows ``{0..n} \\ {k}`` and columns ``0..n-1``.
    """
    with workprec(bits):
        mu = [_round(x) for x in mu[: 2 * n]]
        out = []
        for k in range(n + 1):
            a = [[mu[j + c] for c in range(n)] for j in range(n + 1) if j != k]
            d = _det_inplace(a) if n else mpc(1)
            out.append(d if (k + n) % 2 == 0 else -d)
        return out


def horner(coeffs, z, bits):
    """Evaluate ``sum c_k z^k`` (coefficients lowest first)."""
    with workprec(bits):
        z = _round(z)
        p = _round(coeffs[-1])
        for c in reversed(coeffs[:-1]):
            p = p * z + _round(c)
        return p


def aberth(coeffs, init, bits, maxiter, eps):
    """Aberth-Ehrlich iteration in Gauss-Seidel form.

    Parameters
    ----------
    coeffs : list of mpc
        Coefficients, lowest degree first; leading one nonzero.
    init : list of mpc
        Starting approximations (one per root).
    eps : mpfr
        Absolute floor of the per-root stopping test
        ``|w| <= 2^-(bits-8) |z|`` (norms are ``|re| + |im|``).  A root
        also stops once ``|p(z)| <= 8 (d+1) 2^-bits sum_k |c_k| |z|^k``,
        i.e. when the value is at the rounding level of its evaluation,
        which is what limits clustered roots.

    Returns
    -------
    roots : list of mpc
    iterations : int
        Sweeps used, or -1 when ``maxiter`` was hit.
    """
    with workprec(bits):
        c = [_round(x) for x in coeffs]
        z = [_round(x) for x in init]
        d = len(c) - 1
        rel = gmpy2.mul_2exp(mpfr(1), -(bits - 8))
        tolp = gmpy2.mul_2exp(mpfr(8 * (d + 1)), -bits)
        eps = +mpfr(eps)
        done = [False] * d
        used = -1
        for it in range(1, maxiter + 1):
            for i in range(d):
                if done[i]:
                    continue
                zi = z[i]
                p = c[d]
                dp = mpc(0)
                az = _l1(zi)
                sa = _l1(p)
                for k in range(d - 1, -1, -1):
                    dp = dp * zi + p
                    p = p * zi + c[k]
                    sa = sa * az + _l1(c[k])
                if p == 0:
                    done[i] = True
                    continue
                s = mpc(0)
                for j in range(d):
                    if j != i:
                        s = s + cdiv(mpc(1), zi - z[j])
                den = dp - p * s
                if den == 0:
                    continue
                w = cdiv(p, den)
                z[i] = zi - w
                if _l1(w) <= max(rel * _l1(z[i]), eps) or _l1(p) <= tolp * sa:
                    done[i] = True
            if all(done):
                used = it
                break
        # one polishing sweep
        for i in range(d):
            zi = z[i]
            p = c[d]
            dp = mpc(0)
            for k in range(d - 1, -1, -1):
                dp = dp * zi + p
                p = p * zi + c[k]
            if p == 0:
                continue
            s = mpc(0)
            for j in range(d):
                if j != i:
                    s = s + cdiv(mpc(1), zi - z[j])
            den = dp - p * s
            if den != 0:
                z[i] = zi - cdiv(p, den)
        return z, used


def heine_sum(nodes, weights, omega, n, x, bits, lo, hi):
    """Partial sums of the n-fold Heine quadrature.

    Sums ``prod_l w_l e^{i omega x_l} [prod_l (x - x_l)] prod_{k<l} (x_l - x_k)^2``
    over strictly increasing index tuples.  One subtotal is returned for
    each leading index in ``range(lo, hi)``; their sum equals the
    tensor-product rule divided by ``n!``.
    """
    with workprec(bits):
        xs = [+mpfr(t) for t in nodes]
        ws = [+mpfr(t) for t in weights]
        om = _round(omega)
        a, b = om.real, om.imag
        q = len(xs)
        e = []
        for xi, wi in zip(xs, ws):
            t = a * xi
            amp = wi * gmpy2.exp(-(b * xi))
            ei = mpc(amp * gmpy2.cos(t), amp * gmpy2.sin(t))
            if x is not None:
                ei = ei * (_round(x) - xi)
            e.append(ei)
        subtotals = []
        idx = [0] * n
        pe = [mpc(1)] * (n + 1)
        pv = [mpfr(1)] * (n + 1)
        for first in range(lo, hi):
            acc = mpc(0)
            if q - first < n:
                subtotals.append(acc)
                continue
            idx[0] = first
            pe[1] = pe[0] * e[first]
            pv[1] = pv[0]
            if n == 1:
                acc = acc + mpc(pe[1].real * pv[1], pe[1].imag * pv[1])
                subtotals.append(acc)
                continue
            level = 1
            idx[1] = first
            while level >= 1:
                idx[level] += 1
                if idx[level] > q - (n - level):
                    level -= 1
                    continue
                j = idx[level]
                v = pv[level]
                xj = xs[j]
                for l in range(level):
                    dd = xj - xs[idx[l]]
                    v = v * (dd * dd)
                pv[level + 1] = v
                pe[level + 1] = pe[level] * e[j]
                if level == n - 1:
                    pp = pe[n]
                    acc = acc + mpc(pp.real * v, pp.imag * v)
                else:
                    level += 1
                    idx[level] = j
            subtotals.append(acc)
        return subtotals
