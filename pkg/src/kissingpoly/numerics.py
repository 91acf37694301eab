"""Precision policy, error types and the adaptive-precision driver.

All arithmetic in the package is carried out with ``gmpy2`` (MPFR/MPC),
so every elementary operation is correctly rounded at the working
precision.  Complex division is the one exception: the kernels use the
textbook formula with fused ``fmma``/``fmms`` steps, which is faithful
to within a couple of ulps (see :func:`kissingpoly._purepy.cdiv`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import gmpy2
from gmpy2 import mpc, mpfr

__all__ = [
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "KissingError",
    "PrecisionExhausted",
    "RealityCheckFailed",
    "CrossCheckFailed",
    "IndexOutOfRange",
    "NearSingular",
    "SingularChain",
    "NoConvergence",
    "CostCapExceeded",
    "adaptive_eval",
    "workprec",
    "to_mpc",
    "to_mpfr",
    "rel_diff",
    "cabs",
    "digits_for",
    "fmt_real",
    "fmt_complex",
]


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision and acceptance tolerance.

    Parameters
    ----------
    bits : int
        Mantissa precision for all arithmetic.  At least 64.
    rel_tol : float
        Relative tolerance used by adaptive evaluation, reality checks
        and cross-checks.  Must lie in (0, 1).
    max_bits : int
        Cap for precision escalation.  At least ``bits``.
    """

    bits: int = 256
    rel_tol: float = 1e-30
    max_bits: int = 4096

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise ValueError(f"bits must be an integer >= 64, got {self.bits!r}")
        if int(self.max_bits) != self.max_bits or self.max_bits < self.bits:
            raise ValueError(f"max_bits must be an integer >= bits, got {self.max_bits!r}")
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")

    def with_bits(self, bits: int) -> "PrecisionPolicy":
        """Same tolerance, different working precision (cap raised if needed)."""
        return PrecisionPolicy(bits, self.rel_tol, max(self.max_bits, bits))

    @property
    def tol(self) -> mpfr:
        return mpfr(self.rel_tol)


DEFAULT_POLICY = PrecisionPolicy()


class KissingError(Exception):
    """Base class for all errors raised by the package."""


class PrecisionExhausted(KissingError):
    """Escalation reached ``max_bits`` without agreement."""


class RealityCheckFailed(PrecisionExhausted):
    """A quantity proven real kept a significant imaginary part."""


class CrossCheckFailed(KissingError):
    """Two independent evaluation paths disagree."""


class IndexOutOfRange(KissingError, IndexError):
    """Requested index lies outside the computed range."""


class NearSingular(KissingError):
    """A Hankel determinant vanishes within tolerance.

    Attributes
    ----------
    index : int
        The index ``j`` of the offending determinant ``h_j``.
    value : mpfr or None
        The determinant value, when available.
    """

    def __init__(self, index, value=None, msg=None):
        self.index = index
        self.value = value
        super().__init__(msg or f"h_{index} vanishes within tolerance (value {value})")


class SingularChain(NearSingular):
    """An intermediate determinant of a product chain vanishes."""


class NoConvergence(KissingError):
    """An iteration hit its cap."""


class CostCapExceeded(KissingError):
    """A brute-force computation exceeds its node budget."""


class workprec:
    """Context manager setting the gmpy2 working precision.

    gmpy2 contexts are thread-local, so this is safe to use from
    worker threads.
    """

    def __init__(self, bits: int):
        self.bits = int(bits)

    def __enter__(self):
        self._ctx = gmpy2.context(gmpy2.get_context(), precision=self.bits)
        return self._ctx.__enter__()

    def __exit__(self, *exc):
        return self._ctx.__exit__(*exc)


def to_mpfr(x, bits: int) -> mpfr:
    """Round ``x`` (int, float, str, Fraction-like or mpfr) to ``bits``."""
    if isinstance(x, str):
        return mpfr(x, bits)
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, int):
        with workprec(bits):
            return mpfr(x.numerator) / x.denominator
    return mpfr(x, bits)


def to_mpc(x, bits: int) -> mpc:
    """Round a real or complex value to an ``mpc`` of precision ``bits``.

    Accepts Python numbers, strings (``"1.5"`` or ``"1.5,-2"``), pairs
    ``(re, im)``, mpfr, mpc and mpmath numbers.
    """
    with workprec(bits):
        return _to_mpc(x, bits)


def _to_mpc(x, bits):
    if isinstance(x, mpc):
        return +x
    if isinstance(x, str):
        parts = x.split(",")
        if len(parts) == 2:
            return mpc(to_mpfr(parts[0].strip(), bits), to_mpfr(parts[1].strip(), bits))
        return mpc(to_mpfr(x.strip(), bits), 0)
    if isinstance(x, (tuple, list)):
        re, im = x
        return mpc(to_mpfr(re, bits), to_mpfr(im, bits))
    if isinstance(x, complex):
        return mpc(mpfr(x.real, bits), mpfr(x.imag, bits))
    if hasattr(x, "imag") and hasattr(x, "real") and not isinstance(x, (int, float, mpfr)):
        # mpmath mpc / numpy complex
        re, im = x.real, x.imag
        if hasattr(re, "_mpf_"):
            re, im = str(re), str(im)
        return mpc(to_mpfr(re, bits), to_mpfr(im, bits))
    if hasattr(x, "_mpf_"):
        x = str(x)
    return mpc(to_mpfr(x, bits), 0)


def cabs(z) -> mpfr:
    """Modulus of a complex (or real) gmpy2 number."""
    if isinstance(z, mpc):
        return gmpy2.hypot(z.real, z.imag)
    return abs(z)


def rel_diff(a, b, floor=0):
    """``|a - b| / max(|a|, |b|, floor)``; zero when both vanish."""
    d = cabs(a - b)
    s = max(cabs(a), cabs(b), mpfr(floor))
    if s == 0:
        return mpfr(0) if d == 0 else mpfr("inf")
    return d / s


def _as_value(v):
    return v if isinstance(v, (mpc, mpfr)) else to_mpc(v, 64)


def adaptive_eval(computation: Callable[[int], object], policy: PrecisionPolicy = DEFAULT_POLICY,
                  *, scale: Callable[[int], object] | None = None):
    """Evaluate ``computation(bits)`` at rising precision until it settles.

    The computation is run at ``policy.bits`` and ``2*policy.bits``; the
    higher-precision value is returned once two consecutive results
    agree to ``policy.rel_tol`` relatively.  Otherwise the precision
    keeps doubling up to ``policy.max_bits``.

    Parameters
    ----------
    computation : callable
        Deterministic function of the bit count returning an mpc, mpfr
        or a sequence of them (compared elementwise, by max norm).
    policy : PrecisionPolicy
    scale : callable, optional
        Absolute floor for the relative comparison, as a function of
        the bit count.  Used near zeros of a determinant where a purely
        relative test cannot succeed.  For sequence results it may return
        a sequence of floors, one per component; each component is then
        compared on its own.

    Returns
    -------
    The result at the last precision tried.

    Raises
    ------
    PrecisionExhausted
        When ``max_bits`` is reached without agreement.
    """
    bits = policy.bits
    prev = computation(bits)
    tol = mpfr(policy.rel_tol)
    while bits * 2 <= policy.max_bits:
        bits *= 2
        cur = computation(bits)
        floor = scale(bits) if scale is not None else 0
        if _agree(prev, cur, floor) <= tol:
            return cur
        prev = cur
    raise PrecisionExhausted(
        f"no agreement to rel_tol={policy.rel_tol:g} up to {bits} bits"
    )


def _agree(a, b, floor):
    if isinstance(a, (list, tuple)) and isinstance(floor, (list, tuple)):
        return max((rel_diff(_as_value(x), _as_value(y), f) for x, y, f in zip(a, b, floor)),
                   default=mpfr(0))
    if isinstance(a, (list, tuple)):
        num = max((cabs(_as_value(x) - _as_value(y)) for x, y in zip(a, b)), default=mpfr(0))
        den = max(max((cabs(_as_value(x)) for x in a), default=mpfr(0)),
                  max((cabs(_as_value(y)) for y in b), default=mpfr(0)), mpfr(floor))
        if den == 0:
            return mpfr(0) if num == 0 else mpfr("inf")
        return num / den
    return rel_diff(_as_value(a), _as_value(b), floor)


def digits_for(bits: int) -> int:
    """Significant decimal digits carried by ``bits`` binary digits."""
    return math.ceil(bits * 0.30103)


def fmt_real(x, bits: int) -> str:
    """Decimal string with :func:`digits_for` significant digits."""
    x = mpfr(x) if not isinstance(x, mpfr) else x
    if x == 0:
        return "0"
    return _fmt(x, digits_for(bits))


def _fmt(x: mpfr, d: int) -> str:
    s = x.digits(10, d)  # (mantissa, exponent, precision)
    man, exp = s[0], s[1]
    neg = man.startswith("-")
    man = man.lstrip("-")
    e = exp - 1
    if -5 <= e < d:
        # positional notation for moderate exponents
        if e >= 0:
            out = man[: e + 1] + "." + man[e + 1:]
        else:
            out = "0." + "0" * (-e - 1) + man
        out = out.rstrip(".")
    else:
        out = f"{man[0]}.{man[1:]}e{e:+d}"
    return "-" + out if neg else out


def fmt_complex(z, bits: int) -> list:
    """Serialize a complex value as ``[re, im]`` decimal strings."""
    if isinstance(z, mpc):
        return [fmt_real(z.real, bits), fmt_real(z.imag, bits)]
    return [fmt_real(z, bits), "0"]
