"""Closed-form asymptotics for the Hankel determinants and their zeros.

Contents
--------
* superfactorials and Laguerre polynomials (explicit sum and recurrence);
* leading terms of ``h_{2N-1}`` and ``h_{2N}`` for large real omega;
* the size envelope of ``h_n`` used to scale tolerances near its zeros;
* the endpoint behaviour ``p_{2N}(1 - c/(i omega))`` and the predicted
  zeros ``+-1 + i c_k / omega``;
* layer coefficients ``c_{n,k}`` and Lambert-W predictions for the
  complex zeros of ``h_n`` ("onion peels");
* the binomial determinant identities behind the leading-order
  computations, checked with exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .numerics import (
    DEFAULT_POLICY,
    NoConvergence,
    PrecisionPolicy,
    cabs,
    to_mpc,
    workprec,
)

__all__ = [
    "superfactorial",
    "laguerre",
    "laguerre_recurrence",
    "laguerre_coeffs",
    "leading_even",
    "leading_odd",
    "legendre_hankel",
    "envelope",
    "endpoint_monic_limit",
    "laguerre_product",
    "laguerre_root_prediction",
    "peel_coefficient",
    "peel_ratio_raw",
    "peel_ratio_simplified",
    "peel_ratio_printed_even",
    "lambert_w",
    "PeelPrediction",
    "peel_prediction",
    "pascal_matrix",
    "c_matrix",
    "bareiss_det",
    "pascal_det_check",
    "c_matrix_det_check",
]


# ---------------------------------------------------------------- integers

def superfactorial(m: int) -> int:
    """``SF(m) = 1! 2! ... m!`` with ``SF(0) = SF(-1) = 1``.

    ``SF(m) = G(m + 2)`` for the Barnes G-function, whose values
    ``G(1) = G(2) = 1`` fix the two boundary cases.
    """
    if m < -1:
        raise ValueError(f"superfactorial needs m >= -1, got {m}")
    out = 1
    f = 1
    for i in range(1, m + 1):
        f *= i
        out *= f
    return out


@lru_cache(maxsize=None)
def laguerre_coeffs(N: int) -> tuple:
    """Exact coefficients of ``L_N(c) = sum_s binom(N, s) (-c)^s / s!`` (lowest first)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return tuple(Fraction((-1) ** s * math.comb(N, s), math.factorial(s)) for s in range(N + 1))


def _q(x: Fraction, bits: int) -> mpfr:
    with workprec(bits):
        return mpfr(x.numerator) / x.denominator


def laguerre(N: int, c, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """Laguerre polynomial ``L_N(c)`` from its explicit finite sum.

    Examples
    --------
    >>> from kissingpoly.asymptotics import laguerre
    >>> laguerre(1, 1) == 0, laguerre(0, 7) == 1
    (True, True)
    """
    bits = policy.bits
    z = to_mpc(c, bits)
    co = laguerre_coeffs(N)
    with workprec(bits):
        acc = mpc(0)
        for a in reversed(co):
            acc = acc * z + _q(a, bits)
        return acc


def laguerre_recurrence(N: int, c, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """``L_N(c)`` from ``(k+1) L_{k+1} = (2k+1-c) L_k - k L_{k-1}``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    bits = policy.bits
    z = to_mpc(c, bits)
    with workprec(bits):
        prev, cur = mpc(0), mpc(1)
        for k in range(N):
            prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
        return cur


# ---------------------------------------------------------------- leading orders

def leading_even(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Leading term ``4^{N^2} SF(N-1)^4 / omega^{2N^2}`` of ``h_{2N-1}``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    bits = policy.bits
    w = to_mpc(omega, bits)
    with workprec(bits):
        v = mpfr(4 ** (N * N) * superfactorial(N - 1) ** 4) / w ** (2 * N * N)
        return v.real if w.imag == 0 else v


def leading_odd(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Leading term of ``h_{2N}``:
    ``2 (-1)^N 4^{N(N+1)} SF(N-1)^2 SF(N)^2 sin(omega) / omega^{2N(N+1)+1}``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    bits = policy.bits
    w = to_mpc(omega, bits)
    const = 2 * (-1) ** N * 4 ** (N * (N + 1)) * superfactorial(N - 1) ** 2 * superfactorial(N) ** 2
    with workprec(bits):
        v = mpfr(const) * gmpy2.sin(w) / w ** (2 * N * (N + 1) + 1)
        return v.real if w.imag == 0 else v


@lru_cache(maxsize=None)
def legendre_hankel(n: int) -> Fraction:
    """``h_n(0) = prod_{j<=n} kappa_j`` with Legendre norms
    ``kappa_j = 2^{2j+1} (j!)^4 / ((2j)!^2 (2j+1))``."""
    out = Fraction(1)
    for j in range(n + 1):
        f = math.factorial(j)
        out *= Fraction(2 ** (2 * j + 1) * f ** 4, math.factorial(2 * j) ** 2 * (2 * j + 1))
    return out


def envelope(n: int, omega, bits: int = 64) -> mpfr:
    """Size scale of ``h_n(omega)``.

    The smaller of two magnitudes: ``h_n(0)`` inflated by
    ``exp((n+1) |Im omega|)``, and the largest exponential layer of the
    large-omega expansion,

        n = 2N-1:  |c_{2N,t}| * (2 cosh(2 t Im omega) or 1 at t = 0) / |omega|^{2N^2+2t^2}
        n = 2N:    2 |c_{2N+1,t}| cosh((2t+1) Im omega) / |omega|^{2N^2+2N+1+2t^2+2t}

    For real omega the layer term is the leading-order magnitude
    without the oscillating ``sin omega`` factor.  Used as an absolute
    floor for tolerances near zeros of ``h_n``.
    """
    if n < 0:
        return mpfr(1)
    w = to_mpc(omega, bits)
    with workprec(bits):
        r = cabs(w)
        b = abs(w.imag)
        small = _q(legendre_hankel(n), bits) * gmpy2.exp((n + 1) * b)
        if r == 0:
            return small
        best = mpfr(0)
        if n % 2 == 1:
            N = (n + 1) // 2
            for t in range(N + 1):
                c = abs(_peel_int("odd", N, t))
                amp = mpfr(c) if t == 0 else 2 * c * gmpy2.cosh(2 * t * b)
                best = max(best, amp / r ** (2 * N * N + 2 * t * t))
        else:
            N = n // 2
            for t in range(N + 1):
                c = abs(_peel_int("even", N, t))
                amp = 2 * c * gmpy2.cosh((2 * t + 1) * b)
                best = max(best, amp / r ** (2 * N * N + 2 * N + 1 + 2 * t * t + 2 * t))
        return min(small, best)


# ---------------------------------------------------------------- endpoints

def endpoint_monic_limit(N: int, c, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """Leading-order value of ``p_{2N}(1 - c/(i omega))``:
    ``(-2i)^N N! / omega^N * L_N(c)``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    bits = policy.bits
    w = to_mpc(omega, bits)
    lag = laguerre(N, c, policy)
    with workprec(bits):
        return mpc(0, -2) ** N * math.factorial(N) / w ** N * lag


def laguerre_product(N: int, x, omega, policy: PrecisionPolicy = DEFAULT_POLICY, *, monic: bool = False) -> mpc:
    """Product-of-Laguerre approximation of ``p_{2N}(x)`` for large omega.

    ``(i/omega)^{2N} L_N(-i omega (x+1)) L_N(-i omega (x-1))``.  This form
    has leading coefficient ``1/N!^2``; pass ``monic=True`` to multiply
    by ``N!^2`` so that it is directly comparable with the monic ``p_{2N}``.
    """
    bits = policy.bits
    z = to_mpc(x, bits)
    w = to_mpc(omega, bits)
    with workprec(bits):
        miw = mpc(0, -1) * w
        a = laguerre(N, miw * (z + 1), policy)
        b = laguerre(N, miw * (z - 1), policy)
        v = (mpc(0, 1) / w) ** (2 * N) * a * b
        if monic:
            v = v * math.factorial(N) ** 2
        return v


def laguerre_root_prediction(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> list:
    """Predicted zeros ``+-1 + i c_k / omega`` of ``p_{2N}``, ``L_N(c_k) = 0``.

    The Laguerre zeros come from the Aberth root finder on the exact
    coefficients.  Ordered as ``+1 + ..., -1 + ...`` for increasing ``c_k``.
    """
    from .roots import poly_roots

    bits = policy.bits
    co = [mpc(_q(a, bits)) for a in laguerre_coeffs(N)]
    cs = sorted((z.real for z in poly_roots(co, policy).roots))
    w = to_mpc(omega, bits)
    out = []
    with workprec(bits):
        for c in cs:
            shift = mpc(0, 1) * c / w
            out.append(1 + shift)
            out.append(-1 + shift)
    return out


# ---------------------------------------------------------------- onion peels

def _peel_int(parity: str, N: int, k: int) -> int:
    # integer part: c_{2N,k} (odd family) or c_{2N+1,k}/i (even family)
    if not 0 <= k <= N:
        raise ValueError(f"need 0 <= k <= N, got k={k}, N={N}")
    if parity == "odd":
        return 4 ** (N * N - k * k) * (superfactorial(N - k - 1) * superfactorial(N + k - 1)) ** 2
    if parity == "even":
        return (-1) ** (N + k) * 4 ** ((N - k) * (N + k + 1)) * (
            superfactorial(N + k) * superfactorial(N - k - 1)) ** 2
    raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")


def peel_coefficient(parity: str, N: int, k: int) -> complex | int:
    """Layer coefficient of the large-omega expansion.

    ``parity="odd"``: ``c_{2N,k} = 4^{N^2-k^2} [SF(N-k-1) SF(N+k-1)]^2``
    (zeros of ``h_{2N-1}``), an integer.

    ``parity="even"``: ``c_{2N+1,k} = i (-1)^{N+k} 4^{(N-k)(N+k+1)} [SF(N+k) SF(N-k-1)]^2``
    (zeros of ``h_{2N}``), returned as a Python complex with exact
    integer imaginary part when it fits, else as ``mpc``.
    """
    v = _peel_int(parity, N, k)
    if parity == "odd":
        return v
    if abs(v) < 2 ** 53:
        return complex(0, v)
    with workprec(max(64, abs(v).bit_length())):
        return mpc(0, v)


def _peel_q(parity: str, N: int, k: int) -> int:
    return 2 * k + 1 if parity == "odd" else 2 * k + 2


def peel_ratio_raw(parity: str, N: int, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """Principal ``(-c_{k+1}/c_k)^{1/(2q)}`` from the coefficients themselves."""
    if not 0 <= k < N:
        raise ValueError(f"need 0 <= k < N, got k={k}, N={N}")
    q = _peel_q(parity, N, k)
    # both coefficients carry the same factor (1 or i), so the ratio is real
    fr = -Fraction(_peel_int(parity, N, k + 1), _peel_int(parity, N, k))
    with workprec(policy.bits):
        ratio = mpc(mpfr(fr.numerator) / fr.denominator)
        return gmpy2.exp(gmpy2.log(ratio) / (2 * q))


def peel_ratio_simplified(parity: str, N: int, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """Closed form of :func:`peel_ratio_raw`.

    odd:  ``e^{i pi/(4k+2)} / 2 * [(N+k)! / (N-k-1)!]^{1/(2k+1)}``

    even: ``1/2 * [(N+k+1)! / (N-k-1)!]^{1/(2k+2)}``

    In the even family ``-c_{2N+1,k+1}/c_{2N+1,k} = 4^{-(2k+2)} [(N+k+1)!/(N-k-1)!]^2``
    is positive, so no phase factor appears.
    """
    if not 0 <= k < N:
        raise ValueError(f"need 0 <= k < N, got k={k}, N={N}")
    q = _peel_q(parity, N, k)
    with workprec(policy.bits):
        if parity == "odd":
            f = mpfr(math.factorial(N + k) // math.factorial(N - k - 1))
            phase = gmpy2.exp(mpc(0, gmpy2.const_pi() / (4 * k + 2)))
        else:
            f = mpfr(math.factorial(N + k + 1) // math.factorial(N - k - 1))
            phase = mpc(1)
        return phase * gmpy2.root(f, q) / 2


def peel_ratio_printed_even(N: int, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """Even-family closed form carrying an extra ``e^{i pi/(4k+4)}`` factor.

    Kept only to document that this variant is not the root of the
    coefficient ratio; see :func:`peel_ratio_simplified`.
    """
    with workprec(policy.bits):
        return gmpy2.exp(mpc(0, gmpy2.const_pi() / (4 * k + 4))) * peel_ratio_simplified("even", N, k, policy)


def lambert_w(z, branch: int = 0, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpc:
    """Branch ``branch`` of the Lambert W function, ``W e^W = z``.

    Halley iteration from a branch-aware start: the asymptotic
    ``L - log L`` with ``L = log z + 2 pi i k``, a series near ``-1/e`` and
    ``z`` itself for small ``|z|`` on the principal branch.  The branch
    of the converged value is verified through
    ``W + log W = log z + 2 pi i k``.

    Raises
    ------
    ValueError
        ``z = 0`` on a non-principal branch.
    NoConvergence
        Halley iteration failed or landed on a different branch.

    Examples
    --------
    >>> from kissingpoly.asymptotics import lambert_w
    >>> from kissingpoly.numerics import workprec
    >>> from gmpy2 import exp, mpfr
    >>> with workprec(256):
    ...     abs(lambert_w(exp(mpfr(1))) - 1) < 1e-70
    True
    """
    bits = policy.bits
    wz = to_mpc(z, bits)
    k = int(branch)
    if wz == 0:
        if k == 0:
            return mpc(0)
        raise ValueError("W_k(0) is undefined for k != 0")
    tol = mpfr(policy.rel_tol)
    for guess in _lambert_guesses(wz, k, bits):
        try:
            w = _halley(wz, guess, bits + 32, tol)
        except NoConvergence:
            continue
        if _lambert_branch(w, wz, bits) == k:
            with workprec(bits):
                w = mpc(+w.real, +w.imag)
                if cabs(w * gmpy2.exp(w) - wz) <= tol * cabs(wz):
                    return w
    raise NoConvergence(f"Lambert W_{k}({wz}) did not converge to the requested branch")


def _lambert_guesses(z, k, bits):
    with workprec(bits):
        twopik = mpc(0, 2 * gmpy2.const_pi() * k)
        out = []
        p2 = 2 * (gmpy2.exp(mpfr(1)) * z + 1)
        near = cabs(p2) < 0.6
        if k == 0 and cabs(z) < 0.5:
            out.append(z - z * z)
        if near:
            p = gmpy2.sqrt(p2)
            for s in ((1, -1) if k == 0 else (-1, 1)):
                pp = s * p
                out.append(-1 + pp - pp * pp / 3 + 11 * pp ** 3 / 72)
        L1 = gmpy2.log(z) + twopik
        if L1 != 0:
            out.append(L1 - gmpy2.log(L1))
        out.append(L1)
        if k == 0:
            out.append(mpc(0.5))
        return out


def _halley(z, w, wp, tol):
    with workprec(wp):
        z = mpc(+z.real, +z.imag)
        w = mpc(+w.real, +w.imag)
        for _ in range(200):
            ew = gmpy2.exp(w)
            f = w * ew - z
            wp1 = w + 1
            if wp1 == 0:
                raise NoConvergence("Halley step hit the branch point")
            den = ew * wp1 - (w + 2) * f / (2 * wp1)
            if den == 0:
                raise NoConvergence("zero Halley denominator")
            dw = f / den
            w = w - dw
            if cabs(dw) <= tol * 1e-8 * max(cabs(w), mpfr(1)):
                return w
        raise NoConvergence("Halley iteration cap reached")


def _lambert_branch(w, z, bits):
    with workprec(bits):
        if w == 0:
            return 0
        v = (w + gmpy2.log(w) - gmpy2.log(z)) / (2 * gmpy2.const_pi())
        return int(gmpy2.rint(v.imag))


@dataclass(frozen=True)
class PeelPrediction:
    """Asymptotic location of a complex zero of a Hankel determinant.

    Attributes
    ----------
    parity : str
        ``"odd"``: zeros of ``h_{2N-1}``; ``"even"``: zeros of ``h_{2N}``.
    N, k, ell : int
        Half-degree, peel index and phase index.
    branch : int
        Lambert-W branch used.
    omega_pred : mpc
    """

    parity: str
    N: int
    k: int
    ell: int
    branch: int
    omega_pred: mpc

    @property
    def n(self) -> int:
        """Index of the Hankel determinant the prediction refers to."""
        return 2 * self.N - 1 if self.parity == "odd" else 2 * self.N


def peel_prediction(parity: str, N: int, k: int, ell: int, policy: PrecisionPolicy = DEFAULT_POLICY,
                    branches=range(-2, 3)) -> list:
    """First-quadrant Lambert-W predictions for one peel and phase index.

    ``omega ~ -q i W_b( (i/q) R e^{pi i ell / q} )`` with ``q = 2k+1`` (odd
    family) or ``q = 2k+2`` (even family) and ``R`` from
    :func:`peel_ratio_simplified`.  Every branch ``b`` in ``branches`` is
    tried and predictions with ``Re omega > 0`` and ``Im omega > 0`` are
    kept, ordered by branch.

    Examples
    --------
    >>> from kissingpoly.asymptotics import peel_prediction
    >>> [p.branch for p in peel_prediction("even", 1, 0, 0)]
    [1, 2]
    """
    if parity not in ("odd", "even"):
        raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")
    if N < 1 or not 0 <= k <= N - 1:
        raise ValueError(f"need N >= 1 and 0 <= k <= N-1, got N={N}, k={k}")
    q = _peel_q(parity, N, k)
    if not 0 <= ell <= 2 * q - 1:
        raise ValueError(f"ell must lie in 0..{2 * q - 1}, got {ell}")
    bits = policy.bits
    R = peel_ratio_simplified(parity, N, k, policy)
    out = []
    with workprec(bits):
        pi = gmpy2.const_pi()
        arg = mpc(0, 1) / q * R * gmpy2.exp(mpc(0, pi * ell / q))
        tiny = gmpy2.mul_2exp(mpfr(1), -(bits // 2))
        for b in branches:
            try:
                w = lambert_w(arg, b, policy)
            except NoConvergence:
                continue
            om = mpc(0, -q) * w
            if om.real > tiny and om.imag > tiny:
                out.append(PeelPrediction(parity, N, k, ell, b, om))
    return out


# ---------------------------------------------------------------- binomial determinants

def pascal_matrix(s: int) -> list:
    """``A^[s]_{ij} = binom(i+j, j)``, ``i, j = 0..s-1``."""
    return [[math.comb(i + j, j) for j in range(s)] for i in range(s)]


def c_matrix(N: int, s: int) -> list:
    """``C^[N,s]``: rows ``i < N-s`` are ``binom(i+j, i)``, the last ``s`` rows
    are ``binom(i+j+1, i+1)``; ``i, j = 0..N-1``."""
    if not 0 <= s <= N:
        raise ValueError(f"need 0 <= s <= N, got s={s}, N={N}")
    return [[math.comb(i + j, i) if i < N - s else math.comb(i + j + 1, i + 1) for j in range(N)]
            for i in range(N)]


def bareiss_det(matrix) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def pascal_det_check(s: int) -> int:
    """Exact ``det A^[s]`` (equal to 1)."""
    return bareiss_det(pascal_matrix(s))


def c_matrix_det_check(N: int, s: int) -> int:
    """Exact ``det C^[N,s]`` (equal to ``binom(N, s)``)."""
    return bareiss_det(c_matrix(N, s))
