"""Brute-force Heine integrals: an oracle that shares no code path with the determinants.

``h_{n-1} = (1/n!) int_{[-1,1]^n} prod_{k<l} (x_l - x_k)^2 e^{i omega sum x} dx``

and ``p_n(x)`` is the same integral with an extra ``prod_m (x - x_m)``,
divided by ``n! h_{n-1}``.  Both are evaluated with a tensor Gauss-Legendre
rule.  The integrand is symmetric and vanishes when two coordinates
coincide, so the sum runs over strictly increasing index tuples only
(``binom(q, n)`` terms instead of ``q^n``), which equals the tensor sum
divided by ``n!`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from . import _backend
from .asymptotics import envelope
from .moments import as_omega
from .numerics import (
    DEFAULT_POLICY,
    CostCapExceeded,
    NearSingular,
    NoConvergence,
    PrecisionPolicy,
    cabs,
    to_mpc,
    workprec,
)
from .roots import pmap

__all__ = ["QuadratureRule", "gauss_legendre", "default_order", "heine_hankel", "heine_poly", "NODE_BUDGET"]

#: Default cap on ``order ** n`` for the tensor rule.
NODE_BUDGET = 10 ** 7


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1] (nodes increasing)."""

    nodes: tuple
    weights: tuple

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, f, bits: int = 256):
        """``sum_k w_k f(x_k)`` at ``bits`` precision."""
        with workprec(bits):
            s = mpfr(0)
            for x, w in zip(self.nodes, self.weights):
                s = s + w * f(x)
            return s


def _legendre(n, x):
    # P_n(x) and P_n'(x) by the three-term recurrence
    p0, p1 = mpfr(1), x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if n == 0:
        return mpfr(1), mpfr(0)
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


@lru_cache(maxsize=64)
def gauss_legendre(order: int, bits: int = 256) -> QuadratureRule:
    """Nodes (roots of ``P_order``) by Newton from Chebyshev-type guesses.

    Weights ``2 / ((1 - x^2) P'(x)^2)``.  Computed with 32 guard bits
    and rounded to ``bits``.

    Raises
    ------
    NoConvergence

    Examples
    --------
    >>> from kissingpoly.oracle import gauss_legendre
    >>> r = gauss_legendre(1)
    >>> [float(x) for x in r.nodes], [float(w) for w in r.weights]
    ([0.0], [2.0])
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    wp = bits + 32
    nodes, weights = [], []
    with workprec(wp):
        pi = gmpy2.const_pi()
        tol = gmpy2.mul_2exp(mpfr(1), -(wp - 8))
        half = (order + 1) // 2
        for k in range(1, half + 1):
            x = gmpy2.cos(pi * (k - mpfr("0.25")) / (order + mpfr("0.5")))
            if order % 2 == 1 and k == half:
                x = mpfr(0)
            for _ in range(100):
                p, dp = _legendre(order, x)
                dx = p / dp
                x = x - dx
                if abs(dx) <= tol:
                    break
            else:
                raise NoConvergence(f"Legendre node {k} of order {order} did not converge")
            p, dp = _legendre(order, x)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    # nodes[k] > 0 decrease with k (the last one is 0 for odd order)
    with workprec(bits):
        pos = [(+x, +w) for x, w in zip(nodes, weights)]
        mirror = [(-x, w) for x, w in pos if x != 0]
        pairs = sorted(mirror + pos, key=lambda t: t[0])
        return QuadratureRule(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


def default_order(n: int, omega) -> int:
    """``max(30, ceil(3 |omega| + n^2))``."""
    w = as_omega(omega, 64)
    return max(30, int(math.ceil(3 * float(cabs(w)) + n * n)))


def _heine(n, om, x, order, bits, threads):
    rule = gauss_legendre(order, bits)
    k = _backend.kernels()
    q = rule.order
    chunks = [(a, min(a + 4, q)) for a in range(0, q, 4)]
    parts = pmap(lambda ab: k.heine_sum(list(rule.nodes), list(rule.weights), om, n, x, bits, ab[0], ab[1]),
                 chunks, threads)
    with workprec(bits):
        s = mpc(0)
        for part in parts:
            for v in part:
                s = s + v
        return s


def _budget(n, order, budget):
    if order ** n > budget:
        raise CostCapExceeded(f"order^n = {order}^{n} exceeds the node budget {budget}")


def heine_hankel(n: int, omega, order: int | None = None, policy: PrecisionPolicy = DEFAULT_POLICY, *,
                 budget: int = NODE_BUDGET, threads: int = 1) -> mpc:
    """``h_{n-1}(omega)`` from the n-fold Heine integral.

    Parameters
    ----------
    n : int
        Number of integration variables (``n >= 1``).
    order : int, optional
        Gauss-Legendre points per dimension; :func:`default_order` if None.

    Raises
    ------
    CostCapExceeded
        ``order ** n > budget``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    order = order or default_order(n, omega)
    _budget(n, order, budget)
    om = as_omega(omega, policy.bits)
    return _heine(n, om, None, order, policy.bits, threads)


def heine_poly(n: int, omega, x, order: int | None = None, policy: PrecisionPolicy = DEFAULT_POLICY, *,
               budget: int = NODE_BUDGET, threads: int = 1) -> mpc:
    """``p_n(x)`` from Heine's integral, normalized by the quadrature ``n! h_{n-1}``.

    Raises
    ------
    CostCapExceeded
    NearSingular
        The quadrature value of ``h_{n-1}`` is below ``1e-15`` times its envelope.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    order = order or default_order(n, omega)
    _budget(n, order, budget)
    bits = policy.bits
    om = as_omega(omega, bits)
    z = to_mpc(x, bits)
    h = _heine(n, om, None, order, bits, threads)
    if cabs(h) <= 1e-15 * envelope(n - 1, om):
        raise NearSingular(n - 1, h)
    num = _heine(n, om, z, order, bits, threads)
    with workprec(bits):
        return num / h
