"""Polynomial roots, root trajectories in omega, and zeros of ``h_n``.

* :func:`poly_roots` -- Aberth-Ehrlich simultaneous iteration.
* :func:`trajectory` -- roots of ``p_n`` tracked along a real omega grid.
* :func:`real_zero_scan` / :func:`complex_zero_refine` -- zeros of the
  determinants on the real line (sign changes, bisection, Newton) and in
  the complex plane (damped Newton).
* :func:`kissing_detect` and :func:`interlacing_check` -- the real-line
  structure of the zeros.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

from . import _backend
from .asymptotics import envelope
from .hankel import DEGENERACY, hankel_jet, hankel_value
from .moments import as_omega
from .numerics import (
    DEFAULT_POLICY,
    NearSingular,
    NoConvergence,
    PrecisionPolicy,
    cabs,
    to_mpc,
    to_mpfr,
    workprec,
)
from .orthopoly import coeff_norm, kissing_residual, monic_op, tilde_op

__all__ = [
    "RootSet",
    "TrajectorySample",
    "HankelZero",
    "KissingEvent",
    "InterlacingReport",
    "poly_roots",
    "match_roots",
    "trajectory",
    "real_zero_scan",
    "complex_zero_refine",
    "kissing_detect",
    "interlacing_check",
    "grid",
    "pmap",
]


def pmap(fn, items, threads: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order preserved."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def grid(lo, hi, points: int, bits: int) -> list:
    """``points`` equally spaced mpfr values from ``lo`` to ``hi`` inclusive."""
    a, b = to_mpfr(_s(lo), bits), to_mpfr(_s(hi), bits)
    if points < 2:
        return [a]
    with workprec(bits):
        return [a + (b - a) * i / (points - 1) for i in range(points)]


def _s(x):
    return repr(x) if isinstance(x, float) else x


# ---------------------------------------------------------------- polynomial roots

@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial.

    Attributes
    ----------
    roots : tuple of mpc
    residual : mpfr
        ``max_j |p(z_j)| / sum_k |c_k| |z_j|^k`` (backward error of each root).
    iterations : int
    """

    roots: tuple
    residual: mpfr
    iterations: int

    def __len__(self):
        return len(self.roots)


def _coeffs(poly) -> list:
    return list(poly.coeffs if hasattr(poly, "coeffs") else poly)


def _trim(c: list) -> list:
    top = coeff_norm(c)
    while len(c) > 1 and cabs(c[-1]) <= DEGENERACY * top:
        c = c[:-1]
    return c


def _initial(c: list, bits: int) -> list:
    d = len(c) - 1
    with workprec(bits):
        lead = c[-1]
        center = -c[-2] / (d * lead)
        # Fujiwara-type bound on the roots of p(z + center) is replaced by the
        # simpler bound on the roots of p itself; enough for a starting circle.
        r = mpfr(0)
        for k in range(d):
            v = cabs(c[k] / lead)
            if v:
                r = max(r, 2 * gmpy2.root(v, d - k))
        r = max(r, mpfr(2) ** -20)
        out = []
        for j in range(d):
            t = 2 * gmpy2.const_pi() * j / d + mpfr("0.4")
            out.append(center + r * mpc(gmpy2.cos(t), gmpy2.sin(t)))
        return out


def _residual(c: list, roots, bits: int) -> mpfr:
    worst = mpfr(0)
    with workprec(bits):
        for z in roots:
            p = mpc(0)
            s = mpfr(0)
            az = cabs(z)
            for k in range(len(c) - 1, -1, -1):
                p = p * z + c[k]
                s = s * az + cabs(c[k])
            if s:
                worst = max(worst, cabs(p) / s)
    return worst


def poly_roots(poly, policy: PrecisionPolicy = DEFAULT_POLICY, *, init=None, maxiter: int = 500) -> RootSet:
    """All complex roots by Aberth-Ehrlich iteration.

    Leading coefficients below ``1e-15`` times the coefficient max-norm
    are dropped first, so the root count equals the numerical degree.

    Parameters
    ----------
    poly : MonicPolynomial, TildePolynomial or coefficient list (lowest first)
    init : list, optional
        Starting values (used for continuation); by default a perturbed
        circle sized by the coefficient bound ``2 max |c_k/c_d|^{1/(d-k)}``.

    Raises
    ------
    NoConvergence
        Iteration cap reached at every precision up to ``max_bits``.

    Examples
    --------
    >>> from kissingpoly.roots import poly_roots
    >>> from gmpy2 import mpc
    >>> sorted(round(float(z.real), 12) for z in poly_roots([mpc(-1), 0, mpc(3)]).roots)
    [-0.57735026919, 0.57735026919]
    """
    bits = policy.bits
    with workprec(bits):
        c = _trim([to_mpc(x, bits) for x in _coeffs(poly)])
    d = len(c) - 1
    if d < 1:
        raise ValueError("polynomial has numerical degree 0")
    k = _backend.kernels()
    start = list(init)[:d] if init is not None and len(list(init)) >= d else None
    while True:
        z0 = start if start is not None else _initial(c, bits)
        eps = mpfr(2) ** -(bits - 8)
        roots, used = k.aberth(c, z0, bits, maxiter, eps)
        if used >= 0:
            return RootSet(tuple(roots), _residual(c, roots, bits), used)
        if start is not None:
            start = None
            continue
        if bits * 2 > policy.max_bits:
            raise NoConvergence(f"Aberth iteration did not converge in {maxiter} sweeps up to {bits} bits")
        bits *= 2
        with workprec(bits):
            c = [to_mpc(x, bits) for x in c]


def match_roots(prev, cur) -> list:
    """Reorder ``cur`` to follow ``prev`` by greedy matching on sorted distances.

    Ties are broken by index order, which keeps the matching deterministic.
    """
    pairs = sorted((float(cabs(a - b)), i, j) for i, a in enumerate(prev) for j, b in enumerate(cur))
    used_i, used_j, out = set(), set(), [None] * len(prev)
    for _, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        out[i] = cur[j]
    rest = [cur[j] for j in range(len(cur)) if j not in used_j]
    return [z for z in out if z is not None] + rest


# ---------------------------------------------------------------- trajectories

@dataclass(frozen=True)
class TrajectorySample:
    """Roots of ``p_n`` at one omega.

    ``roots`` is empty and ``exists`` False where ``p_n`` does not exist.
    """

    omega: mpfr
    roots: tuple
    exists: bool
    residual: mpfr
    substeps: int = 0


def _roots_at(n, om, policy, init):
    p = monic_op(n, om, policy)
    rs = poly_roots(p, policy, init=init)
    return rs


def trajectory(n: int, omega_start, omega_end, steps: int, policy: PrecisionPolicy = DEFAULT_POLICY,
               *, max_move: float = 0.1, max_halvings: int = 6) -> list:
    """Roots of ``p_n`` along ``steps`` equal omega steps (``steps + 1`` samples).

    Between samples the roots are continued with intermediate omegas
    (step halving, at most ``max_halvings`` levels) whenever a root moves
    more than ``max_move``; they are matched greedily to the previous
    sample.  Near zeros of ``h_{n-1}`` one root escapes to infinity and
    the smallest substep is accepted.  Samples where ``p_n`` does
    not exist carry ``exists=False`` and no roots.

    Examples
    --------
    >>> from kissingpoly.roots import trajectory
    >>> [s.exists for s in trajectory(2, 0, 1, 2)]
    [True, True, True]
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    bits = policy.bits
    pts = grid(omega_start, omega_end, steps + 1, bits)
    if pts[0] == pts[-1]:
        pts = pts[:1]
    out = []
    prev = None
    prev_om = None
    for om in pts:
        try:
            if prev is None:
                rs = _roots_at(n, om, policy, None)
                roots = sorted(rs.roots, key=lambda z: (z.real, z.imag))
                subs = 0
            else:
                roots, rs, subs = _continue(n, prev_om, om, prev, policy, max_move, max_halvings)
        except NearSingular:
            out.append(TrajectorySample(om, (), False, mpfr(0)))
            continue
        out.append(TrajectorySample(om, tuple(roots), True, rs.residual, subs))
        prev, prev_om = roots, om
    return out


def _continue(n, a, b, roots, policy, max_move, max_halvings):
    # advance from omega a (roots known) to omega b, halving the step as needed
    bits = policy.bits
    with workprec(bits):
        full = b - a
        h = full
        h_min = full / 2 ** max_halvings
    cur_om, cur, subs, rs = a, roots, 0, None
    while cur_om != b:
        with workprec(bits):
            nxt = b if abs(b - cur_om) <= abs(h) else cur_om + h
        try:
            rs = _roots_at(n, nxt, policy, cur)
            new = match_roots(cur, list(rs.roots))
            move = max(float(cabs(x - y)) for x, y in zip(cur, new))
        except NearSingular:
            if nxt == b:
                raise
            rs, new, move = None, cur, math.inf
        if move > max_move and abs(h) > abs(h_min):
            with workprec(bits):
                h = h / 2
            subs += 1
            continue
        cur_om = nxt
        if rs is not None:
            cur = new
        with workprec(bits):
            h = h * 2 if abs(h * 2) <= abs(full) else full
    return cur, rs, subs


# ---------------------------------------------------------------- zeros of h_n

@dataclass(frozen=True)
class HankelZero:
    """A zero of ``h_n``.

    Attributes
    ----------
    n : int
    omega : mpc
    kind : str
        ``"real-line"`` or ``"complex-plane"``.
    refine_residual : mpfr
        ``|h_n(omega)| / envelope``.
    suspected_double : bool
        A dip of ``|h_n|`` without sign change.
    iterations : int
    """

    n: int
    omega: mpc
    kind: str
    refine_residual: mpfr
    suspected_double: bool = False
    iterations: int = 0


def _hv(n, om, policy):
    v = hankel_value(n, om, policy)
    return v


def real_zero_scan(n: int, omega_lo, omega_hi, grid_points: int, policy: PrecisionPolicy = DEFAULT_POLICY,
                   *, tol="1e-25", touch: float = 1e-8, threads: int = 1, values=None) -> list:
    """Real zeros of ``h_n`` on ``[omega_lo, omega_hi]``.

    ``h_n`` is sampled on ``grid_points`` equally spaced points; every sign
    change is refined by bisection followed by safeguarded Newton steps
    (``h_n'`` from :func:`~kissingpoly.hankel.hankel_jet`) until the
    bracket or step is below ``tol`` in omega.  Interior local minima of
    ``|h_n|/envelope`` below ``touch`` without a sign change are reported
    with ``suspected_double=True``.

    Parameters
    ----------
    values : list, optional
        Precomputed ``h_n`` on the grid (lets callers share one scan).

    Examples
    --------
    >>> from kissingpoly.roots import real_zero_scan
    >>> [round(float(z.omega.real), 12) for z in real_zero_scan(0, 1, 10, 200)]
    [3.14159265359, 6.28318530718, 9.424777960769]
    """
    if not 0 < float(omega_lo) < float(omega_hi):
        raise ValueError("need 0 < omega_lo < omega_hi")
    bits = policy.bits
    pts = grid(omega_lo, omega_hi, grid_points, bits)
    vals = values if values is not None else pmap(lambda w: _hv(n, w, policy), pts, threads)
    tol = to_mpfr(_s(tol), bits)
    out = []
    for i in range(len(pts)):
        v = vals[i]
        if v == 0:
            out.append(_make_zero(n, pts[i], policy, 0))
            continue
        if i + 1 < len(pts) and vals[i + 1] != 0 and (v > 0) != (vals[i + 1] > 0):
            w, it = _bracket_refine(n, pts[i], pts[i + 1], v, vals[i + 1], policy, tol)
            out.append(_make_zero(n, w, policy, it))
    # tangential touches: |h|/env dips without sign change
    rel = [abs(v) / envelope(n, w) for v, w in zip(vals, pts)]
    for i in range(1, len(pts) - 1):
        if rel[i] < touch and rel[i] <= rel[i - 1] and rel[i] <= rel[i + 1] \
                and (vals[i - 1] > 0) == (vals[i + 1] > 0) and vals[i] != 0 \
                and (vals[i] > 0) == (vals[i - 1] > 0):
            z = _make_zero(n, pts[i], policy, 0)
            out.append(HankelZero(n, z.omega, z.kind, z.refine_residual, True, 0))
    out.sort(key=lambda z: z.omega.real)
    return out


def _make_zero(n, w, policy, it):
    with workprec(policy.bits):
        om = mpc(w)
    res = cabs(hankel_value(n, om, policy)) / envelope(n, om)
    return HankelZero(n, om, "real-line", res, False, it)


def _bracket_refine(n, a, b, fa, fb, policy, tol):
    bits = policy.bits
    it = 0
    with workprec(bits):
        # a few bisections to land inside Newton's basin
        while b - a > (b + a) * mpfr("1e-6") and it < 60:
            m = (a + b) / 2
            fm = _hv(n, m, policy)
            it += 1
            if fm == 0:
                return m, it
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b, fb = m, fm
        x = (a + b) / 2
        for _ in range(100):
            it += 1
            h, d = hankel_jet(n, x, 1, policy)
            if h == 0:
                return x, it
            if (h > 0) == (fa > 0):
                a = x
            else:
                b = x
            step = h / d if d != 0 else mpfr(0)
            nx = x - step
            if not a < nx < b:
                nx = (a + b) / 2
            if abs(nx - x) <= tol or b - a <= tol:
                return nx, it
            x = nx
    raise NoConvergence(f"refinement of a zero of h_{n} in [{a}, {b}] stalled")


def complex_zero_refine(n: int, omega_guess, policy: PrecisionPolicy = DEFAULT_POLICY, *, tol="1e-20",
                        maxiter: int = 100, max_distance=None) -> HankelZero:
    """Damped Newton iteration for ``h_n(omega) = 0`` in the complex plane.

    Each Newton step is halved until ``|h_n|`` decreases (at most 40
    times); convergence when ``|step| <= tol``.

    Parameters
    ----------
    max_distance : real, optional
        Abort with :class:`NoConvergence` once the iterate leaves this
        distance from the guess.

    Raises
    ------
    NoConvergence

    Examples
    --------
    >>> from kissingpoly.roots import complex_zero_refine
    >>> z = complex_zero_refine(0, "3.0,0.1")
    >>> round(float(z.omega.real), 15), abs(z.omega.imag) < 1e-40
    (3.141592653589793, True)
    """
    bits = policy.bits
    g = to_mpc(omega_guess, bits)
    tol = to_mpfr(_s(tol), bits)
    x = g
    hx, dx = hankel_jet(n, x, 1, policy)
    fx = cabs(hx)
    for it in range(1, maxiter + 1):
        if hx == 0:
            break
        if dx == 0:
            raise NoConvergence(f"h_{n}' vanishes at {x}")
        with workprec(bits):
            step = hx / dx
        t = mpfr(1)
        for _ in range(40):
            with workprec(bits):
                nx = x - t * step
            hn, dn = hankel_jet(n, nx, 1, policy)
            if cabs(hn) < fx or cabs(t * step) <= tol:
                break
            t = t / 2
        else:
            raise NoConvergence(f"damped Newton for h_{n} stalled at {x}")
        with workprec(bits):
            move = cabs(t * step)
        x, hx, dx, fx = nx, hn, dn, cabs(hn)
        if max_distance is not None and cabs(x - g) > max_distance:
            raise NoConvergence(f"Newton for h_{n} left the disc of radius {max_distance} around {g}")
        if move <= tol:
            break
    else:
        raise NoConvergence(f"Newton for h_{n} from {g} did not converge in {maxiter} steps")
    env = envelope(n, x)
    kind = "real-line" if abs(x.imag) <= tol * max(1, cabs(x)) else "complex-plane"
    return HankelZero(n, x, kind, fx / env, False, it)


# ---------------------------------------------------------------- kissing and interlacing

@dataclass(frozen=True)
class KissingEvent:
    """A real zero of ``h_{2N}`` and the degeneracy of ``p~_{2N+1}`` there.

    Attributes
    ----------
    omega : mpfr
    constant : mpc
        ``i h_{2N}'(omega) / h_{2N-1}(omega)``.
    residual : mpfr
        ``||p~_{2N+1} - constant * p~_{2N}|| / ||p~_{2N}||`` (max-norm).
    root_distance : mpfr
        Largest distance between matched roots of ``p_{2N}`` and of the
        degree-``2N`` part of ``p~_{2N+1}``.
    """

    omega: mpfr
    constant: mpc
    residual: mpfr
    root_distance: mpfr


def kissing_detect(N: int, omega_lo, omega_hi, policy: PrecisionPolicy = DEFAULT_POLICY, *,
                   grid_points: int | None = None, threads: int = 1) -> list:
    """Kissing events: real zeros of ``h_{2N}`` in the range and the degeneracy there.

    The scan uses 100 grid points per unit of omega unless ``grid_points``
    is given.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if grid_points is None:
        grid_points = max(2, int(math.ceil(100 * (float(omega_hi) - float(omega_lo)))) + 1)
    zeros = real_zero_scan(2 * N, omega_lo, omega_hi, grid_points, policy, threads=threads)
    out = []
    for z in zeros:
        if z.suspected_double:
            continue
        w = z.omega.real
        c, res = kissing_residual(N, w, policy)
        p = monic_op(2 * N, w, policy)
        hi = tilde_op(2 * N + 1, w, policy).coeffs[: 2 * N + 1]
        r1 = poly_roots(p, policy).roots
        r2 = poly_roots(list(hi), policy).roots
        m = match_roots(list(r1), list(r2))
        with workprec(policy.bits):
            dist = max(cabs(a - b) for a, b in zip(r1, m))
        out.append(KissingEvent(w, c, res, dist))
    return out


@dataclass
class InterlacingReport:
    """Real-line structure of the zeros of ``h_n`` on a grid.

    Attributes
    ----------
    zeros : dict
        ``n -> list of HankelZero``.
    odd_zero_findings : list
        Zeros of odd-index determinants (the conjecture says there are none).
    interlacing_findings : list
        ``(n, n+2, message)`` where the zeros of ``h_n`` and ``h_{n+2}``
        (n even) fail to alternate.
    prop_min_adjacent : dict
        ``n -> min over the grid of max(|h_n|/env_n, |h_{n+1}|/env_{n+1})``.
    prop_min_skip : dict
        ``n -> min over the grid of max(|h_n|/env_n, |h_{n+2}|/env_{n+2})``.
    prop_threshold : float
    """

    zeros: dict = field(default_factory=dict)
    odd_zero_findings: list = field(default_factory=list)
    interlacing_findings: list = field(default_factory=list)
    prop_min_adjacent: dict = field(default_factory=dict)
    prop_min_skip: dict = field(default_factory=dict)
    prop_threshold: float = 1e-6

    @property
    def prop_violations(self) -> list:
        bad = [("adjacent", n, v) for n, v in self.prop_min_adjacent.items() if v <= self.prop_threshold]
        bad += [("skip", n, v) for n, v in self.prop_min_skip.items() if v <= self.prop_threshold]
        return bad

    @property
    def ok(self) -> bool:
        """True unless the common-zero properties are violated."""
        return not self.prop_violations


def _alternates(a: list, b: list) -> str | None:
    if not a or not b:
        return None
    lo = max(a[0], b[0])
    hi = min(a[-1], b[-1])
    merged = sorted([(x, 0) for x in a if lo <= x <= hi] + [(x, 1) for x in b if lo <= x <= hi])
    for (x, s), (y, t) in zip(merged, merged[1:]):
        if s == t:
            return f"two consecutive zeros of the same determinant at {float(x):.6f}, {float(y):.6f}"
        if x == y:
            return f"common zero at {float(x):.6f}"
    return None


def interlacing_check(N_max: int, omega_lo, omega_hi, policy: PrecisionPolicy = DEFAULT_POLICY, *,
                      grid_points: int = 4000, prop_n_max: int | None = None, threads: int = 1,
                      prop_threshold: float = 1e-6) -> InterlacingReport:
    """Scan ``h_0..h_{2 N_max}`` and the property range on one grid.

    * odd ``h_{2n+1}`` (``2n+1 <= 2 N_max``): zeros are findings;
    * ``h_{2n}`` and ``h_{2n+2}`` for ``n < N_max``: zeros must alternate on
      their common range;
    * for ``n <= prop_n_max`` (default ``2 N_max - 1``): the minima over the
      grid of ``max(|h_n|/env_n, |h_{n+1}|/env_{n+1})`` and
      ``max(|h_n|/env_n, |h_{n+2}|/env_{n+2})`` must exceed ``prop_threshold``.

    Each determinant is normalized by its own envelope.
    """
    bits = policy.bits
    if prop_n_max is None:
        prop_n_max = 2 * N_max - 1
    top = max(2 * N_max, prop_n_max + 2)
    pts = grid(omega_lo, omega_hi, grid_points, bits)
    vals = {}
    rel = {}
    for n in range(top + 1):
        vals[n] = pmap(lambda w: _hv(n, w, policy), pts, threads)
        rel[n] = [abs(v) / envelope(n, w) for v, w in zip(vals[n], pts)]
    rep = InterlacingReport(prop_threshold=prop_threshold)
    for n in range(2 * N_max + 1):
        rep.zeros[n] = real_zero_scan(n, omega_lo, omega_hi, grid_points, policy, values=vals[n])
        if n % 2 == 1:
            rep.odd_zero_findings += rep.zeros[n]
    for n in range(0, 2 * N_max - 1, 2):
        a = [z.omega.real for z in rep.zeros[n]]
        b = [z.omega.real for z in rep.zeros[n + 2]]
        msg = _alternates(a, b)
        if msg:
            rep.interlacing_findings.append((n, n + 2, msg))
    for n in range(prop_n_max + 1):
        rep.prop_min_adjacent[n] = float(min(max(x, y) for x, y in zip(rel[n], rel[n + 1])))
        rep.prop_min_skip[n] = float(min(max(x, y) for x, y in zip(rel[n], rel[n + 2])))
    return rep
