"""Hankel determinants ``h_n = det[mu_{j+k}]_{j,k=0..n}`` and their omega-derivatives.

Determinants come from partial-pivoting elimination on the moment matrix.
Derivatives use ``d mu_k / d omega = i mu_{k+1}`` with the row replacement
rule, so they are exact up to rounding.  Every value is produced by
:func:`~kissingpoly.numerics.adaptive_eval` with the size envelope of
``h_n`` as an absolute floor, which keeps the acceptance test meaningful
near zeros of ``h_n``.  The convention ``h_{-1} = 1`` is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from . import _backend
from .asymptotics import envelope
from .moments import as_omega, moment_values
from .numerics import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    RealityCheckFailed,
    SingularChain,
    adaptive_eval,
    cabs,
    workprec,
)

__all__ = [
    "HankelView",
    "hankel_det",
    "hankel_value",
    "hankel_jet",
    "hankel_det_derivative",
    "toda_residual",
    "kappas",
    "product_formula_det",
    "DEGENERACY",
]

#: Relative size (against the envelope) below which ``h_n`` counts as zero.
DEGENERACY = 1e-15


@lru_cache(maxsize=4096)
def _jet_raw(n: int, re: mpfr, im: mpfr, order: int, bits: int, backend: str) -> tuple:
    with workprec(max(re.precision, im.precision)):
        om = mpc(re, im)
    mu = moment_values(2 * n + order, om, bits)
    return tuple(_backend.get(backend).hankel_jet(list(mu), n, order, bits))


def _floors(n: int, om: mpc, order: int) -> list:
    env = envelope(n, om)
    return [env * (n + 1) ** k for k in range(order + 1)]


def _project(z: mpc, real: bool):
    return z.real if real else z


def _jet(n: int, om: mpc, order: int, policy: PrecisionPolicy) -> list:
    if n < 0:
        return [mpc(1)] + [mpc(0)] * order
    name = _backend.kernels().NAME
    floors = _floors(n, om, order)
    real = om.imag == 0
    p = policy
    while True:
        vals = adaptive_eval(lambda b: list(_jet_raw(n, om.real, om.imag, order, b, name)), p,
                             scale=lambda b: floors)
        if not real:
            return vals
        # h_n and its omega-derivatives are real for real omega
        bad = max(abs(v.imag) / max(cabs(v), f) for v, f in zip(vals, floors))
        if bad <= p.rel_tol:
            return vals
        if p.bits * 4 > p.max_bits:
            raise RealityCheckFailed(
                f"h_{n}({om}) keeps a relative imaginary part {mpfr(bad, 53)} up to {p.max_bits} bits")
        p = p.with_bits(p.bits * 2)


@dataclass(frozen=True)
class HankelView:
    """``H_n(omega)`` with its determinant.

    Attributes
    ----------
    n : int
        Order; the matrix is ``(n+1) x (n+1)``.
    omega : mpc
    det : mpc
        Raw complex determinant (diagnostic imaginary part kept).
    value : mpfr or mpc
        ``h_n``: the real part for real omega, else the complex value.
    policy : PrecisionPolicy
    """

    n: int
    omega: mpc
    det: mpc
    value: object
    policy: PrecisionPolicy

    @property
    def entries(self) -> tuple:
        """``entries[j][k] = mu_{j+k}`` at the policy precision."""
        if self.n < 0:
            return ()
        mu = moment_values(2 * self.n, self.omega, self.policy.bits)
        return tuple(tuple(mu[j + k] for k in range(self.n + 1)) for j in range(self.n + 1))

    @property
    def is_real(self) -> bool:
        return self.omega.imag == 0

    def __float__(self):
        return float(self.value if not isinstance(self.value, mpc) else self.value.real)


def hankel_det(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> HankelView:
    """Hankel determinant ``h_n(omega)``.

    Parameters
    ----------
    n : int
        ``n >= -1`` (``h_{-1} = 1``).
    omega : real or complex
    policy : PrecisionPolicy

    Returns
    -------
    HankelView
        ``.value`` is real for real omega.

    Raises
    ------
    RealityCheckFailed
        The imaginary part does not vanish for real omega up to ``max_bits``.
    PrecisionExhausted

    Examples
    --------
    >>> from kissingpoly.hankel import hankel_det
    >>> abs(hankel_det(3, 0).value * 23625 - 256) < 1e-70
    True
    """
    if n < -1:
        raise ValueError(f"n must be >= -1, got {n}")
    om = as_omega(omega, policy.bits)
    raw = _jet(n, om, 0, policy)[0]
    return HankelView(n, om, raw, _project(raw, om.imag == 0), policy)


def hankel_value(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY):
    """``hankel_det(n, omega, policy).value``."""
    return hankel_det(n, omega, policy).value


def hankel_jet(n: int, omega, order: int = 2, policy: PrecisionPolicy = DEFAULT_POLICY) -> list:
    """``[h_n, h_n', h_n'']`` up to ``order`` (real for real omega)."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    om = as_omega(omega, policy.bits)
    real = om.imag == 0
    return [_project(v, real) for v in _jet(n, om, order, policy)]


def hankel_det_derivative(n: int, omega, order: int = 1, policy: PrecisionPolicy = DEFAULT_POLICY):
    """``d^order h_n / d omega^order`` for ``order`` in {1, 2}.

    Examples
    --------
    >>> from kissingpoly.hankel import hankel_det_derivative
    >>> from kissingpoly.numerics import workprec
    >>> import gmpy2
    >>> with workprec(256):
    ...     pi = gmpy2.const_pi()
    ...     d = hankel_det_derivative(0, pi / 2, 1)
    ...     abs(d + 8 / pi ** 2) < 1e-70
    True
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    return hankel_jet(n, omega, order, policy)[order]


def toda_residual(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """Relative residual of ``h_n'' h_n - (h_n')^2 + h_{n-1} h_{n+1} = 0``.

    Normalized by ``max(|h_n'' h_n|, |h_n'|^2, |h_{n-1} h_{n+1}|)``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    h, d1, d2 = hankel_jet(n, omega, 2, policy)
    lo = hankel_value(n - 1, omega, policy)
    hi = hankel_value(n + 1, omega, policy)
    with workprec(policy.bits * 2):
        a, b, c = d2 * h, d1 * d1, lo * hi
        den = max(cabs(a), cabs(b), cabs(c))
        if den == 0:
            return mpfr(0)
        return +(cabs(a - b + c) / den)


def _check_chain(n: int, om: mpc, policy: PrecisionPolicy):
    # p_j for j < n needs h_0..h_{n-2} away from zero
    for j in range(n - 1):
        v = hankel_det(j, om, policy).value
        if cabs(v) <= DEGENERACY * envelope(j, om):
            raise SingularChain(j, v, f"h_{j}({om}) vanishes; p_{j + 1} does not exist")


def _kappas_moment(n: int, om: mpc, bits: int) -> list:
    # kappa_j = int p_j^2 e^{i omega x} dx = sum_{a,b} c_a c_b mu_{a+b}
    k = _backend.kernels()
    mu = moment_values(2 * n, om, bits)
    out = []
    with workprec(bits):
        for j in range(n):
            if j == 0:
                c = [mpc(1)]
            else:
                H = [[mu[r + s] for s in range(j)] for r in range(j)]
                x, _ = k.solve(H, [-mu[j + r] for r in range(j)], bits)
                if x is None:
                    raise SingularChain(j - 1, mpfr(0))
                c = list(x) + [mpc(1)]
            s = mpc(0)
            for a in range(j + 1):
                for b in range(j + 1):
                    s = s + c[a] * c[b] * mu[a + b]
            out.append(s)
    return out


def kappas(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> tuple:
    """``kappa_0..kappa_{n-1}`` computed two ways.

    Returns
    -------
    (from_moments, from_ratios)
        ``int p_j^2 e^{i omega x} dx`` expanded in moments, and
        ``h_j / h_{j-1}``.

    Raises
    ------
    SingularChain
        Some ``h_j`` with ``j <= n-2`` vanishes within tolerance.
    """
    om = as_omega(omega, policy.bits)
    _check_chain(n, om, policy)
    real = om.imag == 0
    floors = [envelope(j, om) / envelope(j - 1, om) for j in range(n)]
    mom = adaptive_eval(lambda b: _kappas_moment(n, om, b), policy, scale=lambda b: floors)
    hs = [hankel_det(j, om, policy).value for j in range(-1, n)]
    with workprec(policy.bits):
        rat = [hs[j + 1] / hs[j] for j in range(n)]
    return [_project(z, real) for z in mom], rat


def product_formula_det(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY):
    """``h_{n-1} = prod_{j<n} kappa_j`` with ``kappa_j = int p_j^2 e^{i omega x} dx``.

    Each ``p_j`` is solved from its Hankel system and squared against the
    moments, so the result does not pass through ``det H_{n-1}``.

    Raises
    ------
    SingularChain
        Some intermediate ``h_j`` (``j <= n-2``) vanishes within tolerance.

    Examples
    --------
    >>> from kissingpoly.hankel import product_formula_det
    >>> abs(product_formula_det(2, 0) * 3 - 4) < 1e-70
    True
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return mpfr(1)
    om = as_omega(omega, policy.bits)
    _check_chain(n, om, policy)
    real = om.imag == 0

    def comp(b):
        with workprec(b):
            out = mpc(1)
            for z in _kappas_moment(n, om, b):
                out = out * z
            return out

    v = adaptive_eval(comp, policy, scale=lambda b: envelope(n - 1, om))
    return _project(v, real)
