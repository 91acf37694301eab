"""Moments of the oscillatory weight exp(i omega x) on [-1, 1].

    mu_n(omega) = int_{-1}^{1} x^n exp(i omega x) dx

are evaluated from the everywhere-convergent series

    mu_n = sum_j (i omega)^j (1 + (-1)^(n+j)) / (j! (n + j + 1)),

carried at enough extra bits to absorb the cancellation between terms of
size ``e^|omega|``.  Where the upward recurrence obtained by integrating
by parts is forward stable (``|omega| > m``) it is run as an independent
check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from . import _backend
from .numerics import (
    DEFAULT_POLICY,
    CrossCheckFailed,
    IndexOutOfRange,
    PrecisionPolicy,
    cabs,
    to_mpc,
    workprec,
)

__all__ = ["MomentSequence", "moments", "moment_derivative", "moment_values", "series_terms",
           "recurrence_moments", "as_omega"]


def as_omega(omega, bits: int) -> mpc:
    """Parse a real or complex frequency at ``bits`` precision."""
    return to_mpc(omega, bits)


def series_terms(omega: mpc, bits: int) -> int:
    """Index of the last series term needed at ``bits`` precision.

    Terms grow until ``j ~ |omega|`` and then decay like ``|omega|^j/j!``;
    we stop past the peak once a term drops below ``2^-(bits+24)`` times
    a conservative size ``1/(2+|omega|)^2`` of the result.
    """
    r = float(cabs(omega))
    if r == 0:
        return 2
    target = -(bits + 24) * math.log(2) - 2 * math.log(2 + r)
    j = max(2, int(2 * r) + 2)
    lr = math.log(r)
    while j * lr - math.lgamma(j + 1) >= target:
        j += 1
    return j


def guard_bits(omega: mpc) -> int:
    """Extra working bits covering the series' internal cancellation."""
    r = float(cabs(omega))
    return math.ceil(r * 1.4426950408889634) + math.ceil(math.log2(2 + r)) + 24


@lru_cache(maxsize=512)
def _series_cached(re: mpfr, im: mpfr, m: int, bits: int, backend: str):
    wp = bits + guard_bits(mpc(re, im))
    with workprec(wp):
        om = mpc(+re, +im)
    k = _backend.get(backend)
    return tuple(k.moment_series(om, m, series_terms(om, bits), wp, bits))


def moment_values(m: int, omega: mpc, bits: int) -> tuple:
    """Raw tuple ``(mu_0, ..., mu_m)`` at ``bits`` precision (no checks)."""
    mm = max(8, -(-(m + 1) // 8) * 8)
    vals = _series_cached(omega.real, omega.imag, mm, bits, _backend.kernels().NAME)
    return vals[: m + 1]


def recurrence_moments(m: int, omega: mpc, bits: int) -> list:
    """``mu_0..mu_m`` by the upward recurrence (stable only for ``m < |omega|``).

    ``mu_n = (e^{i omega} - (-1)^n e^{-i omega}) / (i omega) - n mu_{n-1} / (i omega)``
    """
    with workprec(bits + 16):
        om = mpc(+omega.real, +omega.imag)
        iw = mpc(-om.imag, om.real)
        ep = gmpy2.exp(iw)
        em = gmpy2.exp(-iw)
        out = [(ep - em) / iw]
        for n in range(1, m + 1):
            b = ep - em if n % 2 == 0 else ep + em
            out.append((b - n * out[-1]) / iw)
    with workprec(bits):
        return [mpc(+z.real, +z.imag) for z in out]


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``mu_0..mu_m`` at a fixed frequency.

    Attributes
    ----------
    omega : mpc
        The frequency (real frequencies have zero imaginary part).
    values : tuple of mpc
    policy : PrecisionPolicy
    bits : int
        Precision actually used (``policy.bits`` unless escalated).
    """

    omega: mpc
    values: tuple
    policy: PrecisionPolicy
    bits: int

    @property
    def m(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return self.values[n]
        if not 0 <= n < len(self.values):
            raise IndexOutOfRange(f"moment index {n} outside 0..{self.m}")
        return self.values[n]

    def is_real_frequency(self) -> bool:
        return self.omega.imag == 0

    def parity_defect(self) -> mpfr:
        """Largest relative size of the part forbidden by parity.

        For real omega, ``mu_n`` is real for even n and imaginary for odd n.
        """
        worst = mpfr(0)
        for n, z in enumerate(self.values):
            a = cabs(z)
            if a == 0:
                continue
            bad = abs(z.imag) if n % 2 == 0 else abs(z.real)
            worst = max(worst, bad / a)
        return worst


def moments(m: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY, *, check: bool = True) -> MomentSequence:
    """Moments ``mu_0..mu_m`` of ``exp(i omega x)`` on [-1, 1].

    Parameters
    ----------
    m : int
        Highest moment index, ``m >= 0``.
    omega : real or complex
        Frequency; strings such as ``"1.5"`` or ``"3,0.2"`` are accepted.
    policy : PrecisionPolicy
    check : bool
        Run the recurrence cross-check when ``|omega| > m``.

    Returns
    -------
    MomentSequence

    Raises
    ------
    CrossCheckFailed
        If series and recurrence disagree by more than the tolerance
        ``max(rel_tol, 2^(16-bits))`` relative to the typical moment size.

    Examples
    --------
    >>> from kissingpoly.moments import moments
    >>> [str(v.real)[:6] for v in moments(2, 0).values]
    ['2.0', '0.0', '0.6666']
    """
    if m < 0:
        raise IndexOutOfRange(f"m must be >= 0, got {m}")
    bits = policy.bits
    om = as_omega(omega, bits)
    vals = moment_values(m, om, bits)
    if check and m >= 1 and cabs(om) > m:
        _cross_check(vals, om, bits, policy)
    return MomentSequence(om, vals, policy, bits)


def _cross_check(vals, om, bits, policy):
    rec = recurrence_moments(len(vals) - 1, om, bits)
    tol = max(mpfr(policy.rel_tol), gmpy2.mul_2exp(mpfr(1), 16 - bits))
    with workprec(bits):
        size = gmpy2.exp(abs(om.imag)) / (1 + cabs(om))
        for n, (a, b) in enumerate(zip(vals, rec)):
            scale = max(cabs(a), cabs(b), size)
            if cabs(a - b) > tol * scale:
                raise CrossCheckFailed(
                    f"series and recurrence disagree for mu_{n}({om}): "
                    f"{gmpy2.mpfr(cabs(a - b) / scale, 53)}"
                )


def moment_derivative(seq: MomentSequence, n: int, k: int) -> mpc:
    """k-th omega-derivative of ``mu_n``: ``i^k mu_{n+k}``.

    Raises
    ------
    IndexOutOfRange
        If ``n + k`` exceeds the computed range.
    """
    if n < 0 or k < 0 or n + k > seq.m:
        raise IndexOutOfRange(f"need mu_{n + k}, sequence stops at mu_{seq.m}")
    z = seq.values[n + k]
    r = k % 4
    with workprec(max(z.precision)):
        if r == 0:
            return z
        if r == 1:
            return mpc(-z.imag, z.real)
        if r == 2:
            return -z
        return mpc(z.imag, -z.real)
