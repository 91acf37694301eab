"""Independent reference computations with mpmath (no library code)."""

import mpmath


def moment(n, w):
    w = mpmath.mpmathify(w)
    return mpmath.quad(lambda x: x ** n * mpmath.exp(1j * w * x), [-1, 0, 1])


def hankel(n, w):
    if n < 0:
        return mpmath.mpf(1)
    mu = [moment(k, w) for k in range(2 * n + 1)]
    return mpmath.det(mpmath.matrix([[mu[j + k] for k in range(n + 1)] for j in range(n + 1)]))


def monic(n, w):
    mu = [moment(k, w) for k in range(2 * n)]
    H = mpmath.matrix([[mu[r + s] for s in range(n)] for r in range(n)])
    rhs = mpmath.matrix([-mu[n + r] for r in range(n)])
    c = mpmath.lu_solve(H, rhs)
    return [c[k] for k in range(n)] + [mpmath.mpf(1)]


def to_mp(z):
    """gmpy2 mpc/mpfr -> mpmath through exact decimal strings."""
    import gmpy2

    if isinstance(z, gmpy2.mpc):
        return mpmath.mpc(_s(z.real), _s(z.imag))
    return mpmath.mpf(_s(gmpy2.mpfr(z)) if not isinstance(z, gmpy2.mpfr) else _s(z))


def _s(x):
    m, e, _ = x.digits(10)
    if m in ("0", "-0") or x == 0:
        return "0"
    neg = m.startswith("-")
    m = m.lstrip("-")
    return ("-" if neg else "") + "0." + m + "e" + str(e)
