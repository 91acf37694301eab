"""Orthogonal polynomials for ``exp(i omega x)`` on [-1, 1] and their recurrence.

Orthogonality is bilinear, ``<f, g> = int f g e^{i omega x} dx`` (no
conjugation).  The monic ``p_n`` exists iff ``h_{n-1} != 0``; the
unnormalized ``p~_n = h_{n-1} p_n`` (cofactor expansion, no division)
exists for every omega and degenerates to a scalar multiple of
``p~_{n-1}`` at zeros of ``h_{n-1}`` for odd ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpc, mpfr

from . import _backend
from .asymptotics import envelope
from .hankel import DEGENERACY, hankel_jet, hankel_value
from .moments import as_omega, moment_values
from .numerics import (
    DEFAULT_POLICY,
    CrossCheckFailed,
    NearSingular,
    PrecisionPolicy,
    adaptive_eval,
    cabs,
    to_mpc,
    to_mpfr,
    workprec,
)

__all__ = [
    "MonicPolynomial",
    "TildePolynomial",
    "RecurrenceCoefficients",
    "monic_op",
    "tilde_op",
    "recurrence_coeffs",
    "stieltjes_coeffs",
    "dd_residual",
    "evaluate",
    "inner",
    "orthogonality_residuals",
    "reflection_defect",
    "tilde_recurrence_residual",
    "kissing_constant",
    "kissing_residual",
    "coeff_norm",
    "exists",
]


def coeff_norm(coeffs) -> mpfr:
    """Max-norm ``max_k |c_k|`` of a coefficient sequence."""
    return max((cabs(c) for c in coeffs), default=mpfr(0))


@dataclass(frozen=True)
class MonicPolynomial:
    """Monic ``p_n``; ``coeffs`` are ``c_0..c_n`` (lowest first) with ``c_n = 1``."""

    n: int
    coeffs: tuple
    omega: mpc
    policy: PrecisionPolicy

    @property
    def degree(self) -> int:
        return self.n

    def __call__(self, z):
        return evaluate(self, z)


@dataclass(frozen=True)
class TildePolynomial:
    """``p~_n`` with nominal degree ``n``; the leading coefficient is ``h_{n-1}``."""

    n: int
    coeffs: tuple
    omega: mpc
    policy: PrecisionPolicy

    @property
    def leading(self):
        return self.coeffs[-1]

    def numerical_degree(self, rel: float = DEGENERACY) -> int:
        """Largest ``k`` with ``|c_k| > rel * max|c|``."""
        top = coeff_norm(self.coeffs)
        for k in range(self.n, -1, -1):
            if cabs(self.coeffs[k]) > rel * top:
                return k
        return 0

    def __call__(self, z):
        return evaluate(self, z)


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """``p_{n+1} = (x - alpha_n) p_n - beta_n p_{n-1}``.

    Attributes
    ----------
    alphas : tuple
        ``alpha_0..alpha_{m-1}``.
    betas : tuple
        ``beta_1..beta_{m-1}`` (``betas[0]`` is ``beta_1``).
    omega : mpc
    """

    alphas: tuple
    betas: tuple
    omega: mpc

    def beta(self, n: int):
        """``beta_n`` for ``n >= 1``."""
        if n < 1:
            raise IndexError("beta_n is defined for n >= 1")
        return self.betas[n - 1]


def _mu(m: int, om: mpc, bits: int) -> list:
    return list(moment_values(m, om, bits))


def exists(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> bool:
    """Whether ``p_n`` exists: ``|h_{n-1}| > 1e-15 * envelope``."""
    om = as_omega(omega, policy.bits)
    return cabs(hankel_value(n - 1, om, policy)) > DEGENERACY * envelope(n - 1, om)


def _monic_raw(n: int, om: mpc, bits: int) -> list:
    if n == 0:
        return [mpc(1)]
    mu = _mu(2 * n, om, bits)
    with workprec(bits):
        H = [[mu[r + s] for s in range(n)] for r in range(n)]
        x, _ = _backend.kernels().solve(H, [-mu[n + r] for r in range(n)], bits)
        if x is None:
            raise NearSingular(n - 1, mpfr(0))
        return list(x) + [mpc(1)]


def monic_op(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> MonicPolynomial:
    """Monic orthogonal polynomial ``p_n`` from ``H_{n-1} c = -(mu_n..mu_{2n-1})``.

    Raises
    ------
    NearSingular
        ``|h_{n-1}(omega)| <= 1e-15 * envelope``: ``p_n`` does not exist.

    Examples
    --------
    >>> from kissingpoly.orthopoly import monic_op
    >>> p = monic_op(2, 0)
    >>> abs(3 * p.coeffs[0] + 1) < 1e-70, p.coeffs[1] == 0, p.coeffs[2] == 1
    (True, True, True)
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    om = as_omega(omega, policy.bits)
    if n >= 1:
        h = hankel_value(n - 1, om, policy)
        if cabs(h) <= DEGENERACY * envelope(n - 1, om):
            raise NearSingular(n - 1, h, f"h_{n - 1}({om}) vanishes; p_{n} does not exist")
    c = adaptive_eval(lambda b: _monic_raw(n, om, b), policy)
    return MonicPolynomial(n, tuple(c), om, policy)


def tilde_op(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> TildePolynomial:
    """Unnormalized ``p~_n``: cofactor expansion along the last column.

    Total: defined for every omega; the leading coefficient is ``h_{n-1}``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    om = as_omega(omega, policy.bits)
    env = envelope(n - 1, om)

    def comp(b):
        mu = _mu(max(2 * n - 1, 0), om, b)
        return _backend.kernels().tilde_coeffs(mu, n, b)

    c = adaptive_eval(comp, policy, scale=lambda b: env)
    return TildePolynomial(n, tuple(c), om, policy)


def evaluate(poly, z, policy: PrecisionPolicy | None = None):
    """Horner evaluation of a Monic/Tilde polynomial (or coefficient list) at ``z``."""
    coeffs = poly.coeffs if hasattr(poly, "coeffs") else list(poly)
    pol = policy or getattr(poly, "policy", DEFAULT_POLICY)
    bits = max(pol.bits, max((c.precision[0] for c in coeffs if isinstance(c, mpc)), default=pol.bits))
    return _backend.kernels().horner(list(coeffs), to_mpc(z, bits), bits)


def inner(f, g, mu, shift: int = 0, bits: int = 256):
    """Bilinear ``<x^shift f, g> = sum_{a,b} f_a g_b mu_{a+b+shift}``."""
    with workprec(bits):
        s = mpc(0)
        for a, fa in enumerate(f):
            for b, gb in enumerate(g):
                s = s + fa * gb * mu[a + b + shift]
        return s


def orthogonality_residuals(poly: MonicPolynomial) -> list:
    """``|<p_n, x^k>| / (max|c| * max_j |mu_j|)`` for ``k < n``.

    Moments are taken at twice the policy precision.  The scale uses the
    largest moment involved rather than ``|mu_0|``, which vanishes at
    multiples of pi.
    """
    n = poly.n
    bits = 2 * poly.policy.bits
    mu = _mu(2 * n, poly.omega, bits)
    with workprec(bits):
        scale = coeff_norm(poly.coeffs) * coeff_norm(mu[: 2 * n])
        out = []
        for k in range(n):
            s = mpc(0)
            for a, c in enumerate(poly.coeffs):
                s = s + c * mu[a + k]
            out.append(cabs(s) / scale)
        return out


def reflection_defect(poly) -> mpfr:
    """``max_k |(-1)^{n-k} c_k - conj(c_k)| / max|c|`` (zero for real omega)."""
    n = len(poly.coeffs) - 1
    bits = max(c.precision[0] for c in poly.coeffs)
    with workprec(bits):
        top = coeff_norm(poly.coeffs)
        worst = mpfr(0)
        for k, c in enumerate(poly.coeffs):
            s = c if (n - k) % 2 == 0 else -c
            worst = max(worst, cabs(s - c.conjugate()))
        return worst / top if top else worst


def _hankel_data(m: int, om: mpc, policy: PrecisionPolicy):
    # h_{-1..m} and h'_{-1..m}, with a degeneracy check on h_0..h_{m-1}
    hs, ds = [mpc(1)], [mpc(0)]
    for j in range(m + 1):
        h, d = hankel_jet(j, om, 1, policy)
        if j < m and cabs(h) <= DEGENERACY * envelope(j, om):
            raise NearSingular(j, h, f"h_{j}({om}) vanishes; recurrence stops at {j}")
        hs.append(h)
        ds.append(d)
    return hs, ds


def _hankel_recurrence(m: int, om: mpc, policy: PrecisionPolicy):
    hs, ds = _hankel_data(m - 1, om, policy)
    with workprec(policy.bits):
        # index shift: hs[j + 1] = h_j
        alphas = [mpc(0, -1) * (ds[n + 1] / hs[n + 1] - ds[n] / hs[n]) for n in range(m)]
        betas = [hs[n + 1] * hs[n - 1] / (hs[n] * hs[n]) for n in range(1, m)]
    return alphas, betas, hs


def _stieltjes_raw(m: int, om: mpc, bits: int) -> list:
    mu = _mu(2 * m, om, bits)
    kap, xk = [], []
    for n in range(m):
        c = _monic_raw(n, om, bits)
        kap.append(inner(c, c, mu, 0, bits))
        xk.append(inner(c, c, mu, 1, bits))
    with workprec(bits):
        return [xk[n] / kap[n] for n in range(m)] + [kap[n] / kap[n - 1] for n in range(1, m)]


def stieltjes_coeffs(m: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> RecurrenceCoefficients:
    """``alpha_n = <x p_n, p_n>/<p_n, p_n>`` and ``beta_n = <p_n, p_n>/<p_{n-1}, p_{n-1}>``."""
    om = as_omega(omega, policy.bits)
    if m >= 1:
        _hankel_data(m - 1, om, policy)
    one = mpfr(1)
    vals = adaptive_eval(lambda b: _stieltjes_raw(m, om, b), policy, scale=lambda b: [one] * (2 * m - 1))
    return RecurrenceCoefficients(tuple(vals[:m]), tuple(vals[m:]), om)


def recurrence_coeffs(m: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY, *,
                      check: bool = True) -> RecurrenceCoefficients:
    """``alpha_0..alpha_{m-1}`` and ``beta_1..beta_{m-1}`` from Hankel determinants.

    ``alpha_n = -i (h_n'/h_n - h_{n-1}'/h_{n-1})``, ``beta_n = h_n h_{n-2} / h_{n-1}^2``.

    Parameters
    ----------
    check : bool
        Compare with :func:`stieltjes_coeffs`.  The tolerance is
        ``10 * rel_tol * sum_j envelope_j / |h_j|`` over the determinants
        involved (absolute floor 1), which accounts for the relative
        accuracy lost by ``h_j`` close to its zeros.

    Raises
    ------
    NearSingular
        Carries the index ``j`` of the first vanishing ``h_j``.
    CrossCheckFailed

    Examples
    --------
    >>> from kissingpoly.orthopoly import recurrence_coeffs
    >>> rc = recurrence_coeffs(3, 0)
    >>> [float(abs(a)) for a in rc.alphas], [abs(b * (4 * n * n - 1) - n * n) < 1e-60 for n, b in enumerate(rc.betas, 1)]
    ([0.0, 0.0, 0.0], [True, True])
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    om = as_omega(omega, policy.bits)
    alphas, betas, hs = _hankel_recurrence(m, om, policy)
    if check and m >= 1:
        st = stieltjes_coeffs(m, om, policy)
        with workprec(64):
            cond = sum(envelope(j, om) / cabs(hs[j + 1]) for j in range(m))
        tol = 10 * policy.rel_tol * cond
        for name, a, b in (("alpha", alphas, st.alphas), ("beta", betas, st.betas)):
            for n, (x, y) in enumerate(zip(a, b)):
                d = cabs(x - y) / max(cabs(x), cabs(y), mpfr(1))
                if d > tol:
                    idx = n if name == "alpha" else n + 1
                    raise CrossCheckFailed(
                        f"{name}_{idx}({om}): Hankel and Stieltjes paths differ by {mpfr(d, 53)}")
    real = om.imag == 0
    if real:
        with workprec(policy.bits):
            alphas = [mpc(0, a.imag) for a in alphas]
            betas = [mpc(b.real) for b in betas]
    return RecurrenceCoefficients(tuple(alphas), tuple(betas), om)


def dd_residual(m: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY, step="1e-10") -> mpfr:
    """Residual of the Toda flow ``alpha_n' = i(beta_{n+1} - beta_n)``, ``beta_n' = i beta_n (alpha_n - alpha_{n-1})``.

    Derivatives are central differences with step ``step``.  Returns the
    largest relative residual over ``n < m``; each comparison uses
    ``max(|lhs|, |rhs|, |beta_n|)`` as scale (``beta_0 = 0`` is excluded
    and ``|beta_1|`` is used for ``alpha_0``).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    bits = policy.bits
    om = as_omega(omega, bits)
    d = to_mpfr(str(step) if isinstance(step, float) else step, bits)
    with workprec(bits):
        lo, hi = om - d, om + d
    rc = recurrence_coeffs(m + 1, om, policy, check=False)
    rl = recurrence_coeffs(m + 1, lo, policy, check=False)
    rh = recurrence_coeffs(m + 1, hi, policy, check=False)

    def beta(rc_, n):
        return mpc(0) if n == 0 else rc_.beta(n)

    worst = mpfr(0)
    with workprec(bits):
        i = mpc(0, 1)
        for n in range(m):
            scale = cabs(beta(rc, max(n, 1)))
            fd = (rh.alphas[n] - rl.alphas[n]) / (2 * d)
            rhs = i * (beta(rc, n + 1) - beta(rc, n))
            worst = max(worst, cabs(fd - rhs) / max(cabs(fd), cabs(rhs), scale))
            if n >= 1:
                fd = (beta(rh, n) - beta(rl, n)) / (2 * d)
                rhs = i * beta(rc, n) * (rc.alphas[n] - rc.alphas[n - 1])
                worst = max(worst, cabs(fd - rhs) / max(cabs(fd), cabs(rhs), scale))
    return worst


def tilde_recurrence_residual(n: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """Residual of the three-term recurrence written for ``p~``:

    ``h_{n-1}^2 p~_{n+1} - (h_n h_{n-1} x + i(h_n' h_{n-1} - h_{n-1}' h_n)) p~_n + h_n^2 p~_{n-1}``

    measured in the coefficient max-norm relative to the largest of the
    three terms.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    om = as_omega(omega, policy.bits)
    a, da = hankel_jet(n, om, 1, policy)
    b, db = hankel_jet(n - 1, om, 1, policy)
    t_hi = tilde_op(n + 1, om, policy).coeffs
    t_mid = tilde_op(n, om, policy).coeffs
    t_lo = tilde_op(n - 1, om, policy).coeffs
    with workprec(2 * policy.bits):
        shift = mpc(0, 1) * (da * b - db * a)
        t1 = [b * b * c for c in t_hi]
        t2 = [mpc(0)] * (n + 2)
        for k, c in enumerate(t_mid):
            t2[k + 1] = t2[k + 1] + a * b * c
            t2[k] = t2[k] + shift * c
        t3 = [a * a * c for c in t_lo] + [mpc(0)] * 2
        res = [t1[k] - t2[k] + t3[k] for k in range(n + 2)]
        scale = max(coeff_norm(t1), coeff_norm(t2), coeff_norm(t3))
        return coeff_norm(res) / scale if scale else coeff_norm(res)


def kissing_constant(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY):
    """``i h_{2N}'(omega) / h_{2N-1}(omega)``."""
    om = as_omega(omega, policy.bits)
    d = hankel_jet(2 * N, om, 1, policy)[1]
    h = hankel_value(2 * N - 1, om, policy)
    with workprec(policy.bits):
        return mpc(0, 1) * d / h


def kissing_residual(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> tuple:
    """``(const, ||p~_{2N+1} - const * p~_{2N}|| / ||p~_{2N}||)`` with the max-norm."""
    om = as_omega(omega, policy.bits)
    c = kissing_constant(N, om, policy)
    hi = tilde_op(2 * N + 1, om, policy).coeffs
    lo = tilde_op(2 * N, om, policy).coeffs
    with workprec(policy.bits):
        diff = [hi[k] - (c * lo[k] if k < len(lo) else 0) for k in range(len(hi))]
        return c, coeff_norm(diff) / coeff_norm(lo)
