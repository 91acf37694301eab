"""Verification suites: each acceptance criterion as a reusable check.

A suite returns a list of :class:`CriterionResult`; the CLI ``verify``
subcommand and the acceptance tests both run these.  Reference values
that are not produced by the library itself (the terminating closed
forms of ``h_0..h_3`` and the small-omega Taylor constants) are written
out here explicitly.

=============  ============================================
suite          criteria
=============  ============================================
closedforms    1  closed forms and small-omega limits
toda           2  Toda identity
heine          3  Heine quadrature oracle
leading        4, 5, 10  leading orders and binomial determinants
laguerre       6  Laguerre endpoint zeros
kissing        7  degeneracy at real zeros of ``h_2``
peel           8  onion-peel predictions and ratio identities
scanprops      9  real-line zero structure
=============  ============================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .asymptotics import (
    _peel_q,
    c_matrix_det_check,
    laguerre_root_prediction,
    leading_even,
    leading_odd,
    pascal_det_check,
    peel_prediction,
    peel_ratio_raw,
    peel_ratio_simplified,
)
from .hankel import hankel_value, toda_residual
from .numerics import DEFAULT_POLICY, KissingError, NoConvergence, PrecisionPolicy, cabs, workprec
from .oracle import heine_hankel, heine_poly
from .orthopoly import evaluate, monic_op
from .roots import complex_zero_refine, interlacing_check, kissing_detect, match_roots, pmap, poly_roots

__all__ = ["CriterionResult", "SUITES", "run_suite", "closed_form"]


@dataclass
class CriterionResult:
    """Outcome of one acceptance criterion.

    Attributes
    ----------
    criterion : int
    name : str
    passed : bool
    detail : str
        One-line summary of the measured quantities.
    findings : list of str
        Observations that do not decide the verdict (conjecture checks,
        spurious seeds, per-case numbers).
    """

    criterion: int
    name: str
    passed: bool
    detail: str
    findings: list = field(default_factory=list)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.criterion} ({self.name}): {self.detail}"

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "passed": self.passed,
                "detail": self.detail, "findings": list(self.findings)}


def _f(x) -> str:
    return f"{float(x):.3e}"


def _linspace(lo, hi, n, bits):
    with workprec(bits):
        a, b = mpfr(lo), mpfr(hi)
        return [a + (b - a) * k / (n - 1) for k in range(n)]


# ---------------------------------------------------------------- 1. closed forms

def closed_form(n: int, omega, bits: int = 512) -> mpfr:
    """Terminating expansions of ``h_0..h_3`` at real omega.

    Evaluated at ``bits`` precision; the alternating terms of ``h_3``
    cancel heavily for small omega, so use generous precision there.
    """
    with workprec(bits):
        w = mpfr(omega)
        s, c = gmpy2.sin(w), gmpy2.cos(w)
        s2, c2 = gmpy2.sin(2 * w), gmpy2.cos(2 * w)
        if n == 0:
            return 2 * s / w
        if n == 1:
            return 4 / w ** 2 + 2 * (c2 - 1) / w ** 4
        if n == 2:
            return -32 * s / w ** 5 - 64 * c / w ** 6 + 96 * s / w ** 7 - 32 * s ** 3 / w ** 9
        if n == 3:
            return (256 / w ** 8 + 512 * (c2 - 4) / w ** 10 - 3072 * s2 / w ** 11
                    - 768 * (11 * c2 - 2) / w ** 12 + 9216 * s2 / w ** 13
                    + 6912 * (c2 - 1) / w ** 14 + 576 * (c2 - 1) ** 2 / w ** 16)
    raise ValueError("closed forms are known for n = 0..3 only")


#: ``h_n(omega) = a_n + b_n omega^2 + O(omega^4)``.
TAYLOR = {
    0: (Fraction(2), Fraction(-1, 3)),
    1: (Fraction(4, 3), Fraction(-8, 45)),
    2: (Fraction(32, 135), Fraction(-16, 525)),
    3: (Fraction(256, 23625), Fraction(-2048, 1488375)),
}


def suite_closedforms(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    tol = 1e-25 if tol is None else tol
    bits = policy.bits
    pts = _linspace("0.5", "50", 20, bits)
    worst = mpfr(0)
    for n in range(4):
        vals = pmap(lambda w: hankel_value(n, w, policy), pts, threads)
        for w, v in zip(pts, vals):
            ref = closed_form(n, w, 2 * bits)
            with workprec(bits):
                worst = max(worst, abs(v - ref) / abs(ref))
    small = []
    with workprec(bits):
        w0 = mpfr("1e-3")
    for n, (a, b) in TAYLOR.items():
        v = hankel_value(n, w0, policy)
        with workprec(bits):
            ref = mpfr(a.numerator) / a.denominator + mpfr(b.numerator) / b.denominator * w0 ** 2
            small.append(abs(v - ref) / abs(ref))
    ok = worst <= tol and max(small) <= 1e-9
    return [CriterionResult(1, "closed forms", ok,
                            f"max rel err h_0..h_3 on 20 points = {_f(worst)} (tol {_f(tol)}); "
                            f"small-omega max rel err = {_f(max(small))} (tol 1e-9)",
                            [f"h_{n}(1e-3) two-term rel err {_f(e)}" for n, e in enumerate(small)])]


# ---------------------------------------------------------------- 2. Toda

def suite_toda(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    tol = 1e-20 if tol is None else tol
    pts = _linspace("0.5", "50", 100, policy.bits)
    worst, where = mpfr(0), None
    for n in range(1, 7):
        res = pmap(lambda w: toda_residual(n, w, policy), pts, threads)
        for w, r in zip(pts, res):
            if r > worst:
                worst, where = r, (n, w)
    detail = f"max residual n=1..6 on 100 points = {_f(worst)} (tol {_f(tol)})"
    if where:
        detail += f" at n={where[0]}, omega={float(where[1]):.4f}"
    return [CriterionResult(2, "Toda identity", worst <= tol, detail)]


# ---------------------------------------------------------------- 3. Heine

#: ``(n, omega, x)`` sample points for the polynomial path.
HEINE_POLY_POINTS = ((2, "3", "0.5,0.1"), (1, "0", "1"), (3, "2", "0.3,-0.2"))


def suite_heine(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    tol = 1e-10 if tol is None else tol
    cases = [(n, w) for n in (1, 2, 3) for w in ("0.5", "1", "2", "5")]
    errs = []
    for n, w in cases:
        q = heine_hankel(n, w, policy=policy, threads=threads)
        h = hankel_value(n - 1, w, policy)
        with workprec(policy.bits):
            errs.append(cabs(q - h) / cabs(h))
    perrs = []
    for n, w, x in HEINE_POLY_POINTS:
        q = heine_poly(n, w, x, policy=policy, threads=threads)
        p = evaluate(monic_op(n, w, policy), x)
        with workprec(policy.bits):
            perrs.append(cabs(q - p) / max(cabs(p), mpfr(1)))
    ok = max(errs) <= tol and max(perrs) <= tol
    return [CriterionResult(3, "Heine oracle", ok,
                            f"determinant path max rel err = {_f(max(errs))}; "
                            f"polynomial path max err = {_f(max(perrs))} (tol {_f(tol)})",
                            [f"h_{n - 1}({w}): {_f(e)}" for (n, w), e in zip(cases, errs)])]


# ---------------------------------------------------------------- 4, 5, 10. leading orders

def even_leading_error(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """``|h_{2N-1} / leading - 1|`` at real omega."""
    h = hankel_value(2 * N - 1, omega, policy)
    lead = leading_even(N, omega, policy)
    with workprec(policy.bits):
        return abs(h / lead - 1)


def odd_leading_error(N: int, omega, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """``|h_{2N} / (leading / sin omega) - sin omega|`` at real omega."""
    h = hankel_value(2 * N, omega, policy)
    lead = leading_odd(N, omega, policy)
    with workprec(policy.bits):
        s = gmpy2.sin(mpfr(omega))
        return abs(h * s / lead - s)


def suite_leading(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    bits = policy.bits
    # 4: even case, error ratio between omega = 50 and 100
    ratios, finds = [], []
    for N in (1, 2, 3):
        e50 = even_leading_error(N, 50, policy)
        e100 = even_leading_error(N, 100, policy)
        r = e50 / e100
        ratios.append(r)
        finds.append(f"N={N}: err(50)={_f(e50)}, err(100)={_f(e100)}, ratio={float(r):.4f}")
    ok4 = all(1.5 <= r <= 2.5 for r in ratios)
    out = [CriterionResult(4, "leading order even", ok4,
                           "error ratios err(50)/err(100) = " + ", ".join(f"{float(r):.3f}" for r in ratios)
                           + " (required in [1.5, 2.5])", finds)]
    # 5: odd case at omega = (m + 1/2) pi
    with workprec(bits):
        pi = gmpy2.const_pi()
        w1, w2 = (16 + mpfr("0.5")) * pi, (32 + mpfr("0.5")) * pi
    ok5, finds, consts = True, [], []
    for N in (1, 2):
        e1 = odd_leading_error(N, w1, policy)
        e2 = odd_leading_error(N, w2, policy)
        with workprec(bits):
            halving = e1 / e2 >= w2 / w1
            consts.append(max(e1 * w1, e2 * w2))
        ok5 = ok5 and halving
        finds.append(f"N={N}: err(16.5 pi)={_f(e1)}, err(32.5 pi)={_f(e2)}, ratio={float(e1 / e2):.4f}")
    out.append(CriterionResult(5, "leading order odd", ok5,
                               f"err * omega <= C with C = {_f(max(consts))}; error shrinks at least "
                               f"like 1/omega under doubling: {ok5}", finds))
    # 10: binomial determinants
    bad = [s for s in range(9) if pascal_det_check(s) != 1]
    bad += [(N, s) for N in range(9) for s in range(N + 1) if c_matrix_det_check(N, s) != math.comb(N, s)]
    out.append(CriterionResult(10, "combinatorial oracles", not bad,
                               "det A[s] = 1 for s <= 8 and det C[N,s] = binom(N,s) for N <= 8"
                               + ("" if not bad else f"; failures {bad}")))
    return out


# ---------------------------------------------------------------- 6. Laguerre endpoints

def endpoint_distances(N: int, omega, odd: bool, policy: PrecisionPolicy = DEFAULT_POLICY) -> tuple:
    """Largest distance between the zeros of ``p_{2N}`` (or ``p_{2N+1}``) and
    ``+-1 + i c_k / omega``.

    Returns
    -------
    (distance, axis_roots)
        For ``odd`` the roots with ``|Re| <= 1e-12`` are removed before
        matching and counted in ``axis_roots``.
    """
    n = 2 * N + (1 if odd else 0)
    roots = list(poly_roots(monic_op(n, omega, policy), policy).roots)
    axis = [z for z in roots if abs(z.real) <= 1e-12]
    rest = [z for z in roots if abs(z.real) > 1e-12] if odd else roots
    pred = laguerre_root_prediction(N, omega, policy)
    m = match_roots(pred, rest)
    with workprec(policy.bits):
        d = max(cabs(a - b) for a, b in zip(pred, m))
    if len(rest) != len(pred):
        d = mpfr("inf")
    return d, len(axis)


def suite_laguerre(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    omegas = (100, 200, 400)
    ok, finds = True, []
    for N in (1, 2, 3):
        de = [endpoint_distances(N, w, False, policy)[0] for w in omegas]
        do = [endpoint_distances(N, w, True, policy) for w in omegas]
        bound = all(d <= 8 / w ** 2 for d, w in zip(de, omegas))
        rat = [de[0] / de[1], de[1] / de[2]]
        decay = all(3 <= r <= 7 for r in rat)
        axis = all(a == 1 for _, a in do)
        obound = all(d <= 8 / w ** 2 for (d, _), w in zip(do, omegas))
        ok = ok and bound and decay and axis and obound
        finds.append(f"N={N} even: d*omega^2 = " + ", ".join(f"{float(d * w * w):.3f}" for d, w in zip(de, omegas))
                     + f" (<= 8: {bound}); doubling ratios " + ", ".join(f"{float(r):.3f}" for r in rat)
                     + f" (in [3, 7]: {decay})")
        finds.append(f"N={N} odd: axis roots {[a for _, a in do]}; d*omega^2 = "
                     + ", ".join(f"{float(d * w * w):.3f}" for (d, _), w in zip(do, omegas))
                     + f" (<= 8: {obound})")
    return [CriterionResult(6, "Laguerre endpoints", ok,
                            "zeros of p_2N, p_2N+1 vs +-1 + i c_k/omega at omega = 100, 200, 400 for N = 1..3",
                            finds)]


# ---------------------------------------------------------------- 7. kissing

def suite_kissing(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    tol = 1e-15 if tol is None else tol
    ev = kissing_detect(1, 5, 20, policy, threads=threads)[:3]
    ok = len(ev) == 3 and all(e.residual <= tol and e.root_distance <= 1e-12 for e in ev)
    finds = [f"omega={float(e.omega):.12f}: residual {_f(e.residual)}, root distance {_f(e.root_distance)}"
             for e in ev]
    res = max((e.residual for e in ev), default=mpfr("inf"))
    dist = max((e.root_distance for e in ev), default=mpfr("inf"))
    return [CriterionResult(7, "kissing", ok,
                            f"{len(ev)} zeros of h_2 in [5, 20] checked; max residual {_f(res)} (tol {_f(tol)}), "
                            f"max root distance {_f(dist)} (tol 1e-12)", finds)]


# ---------------------------------------------------------------- 8. onion peels

PEEL_FAMILIES = (("odd", 1), ("odd", 2), ("even", 1), ("even", 2))


def peel_family(parity: str, N: int, k: int = 0, policy: PrecisionPolicy = DEFAULT_POLICY,
                threads: int = 1) -> list:
    """All first-quadrant predictions of one peel, refined by damped Newton.

    Returns
    -------
    list of (PeelPrediction, HankelZero or None, distance or None)
        Ordered by ``|omega_pred|``.  ``None`` marks a seed whose Newton
        iteration leaves the unit disc around the prediction.
    """
    q = _peel_q(parity, N, k)
    preds = [p for ell in range(2 * q) for p in peel_prediction(parity, N, k, ell, policy)]
    preds.sort(key=lambda p: cabs(p.omega_pred))

    def refine(p):
        try:
            z = complex_zero_refine(p.n, p.omega_pred, policy, max_distance=1)
        except NoConvergence:
            return p, None, None
        with workprec(policy.bits):
            return p, z, cabs(z.omega - p.omega_pred)

    return pmap(refine, preds, threads)


def suite_peel(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    tol = 0.5 if tol is None else tol
    ok, finds = True, []
    for parity, N in PEEL_FAMILIES:
        rows = peel_family(parity, N, 0, policy, threads)
        for p, z, d in rows:
            if z is None:
                finds.append(f"{parity} N={N} ell={p.ell} branch={p.branch}: seed {complex(p.omega_pred):.6f} "
                             "has no zero of h_n within distance 1")
        dists = [d if d is not None else mpfr("inf") for _, _, d in rows]
        close = all(d <= tol for d in dists)
        first = dists[:4]
        mono = all(b <= a for a, b in zip(first, first[1:]))
        ok = ok and close and mono
        finds.append(f"{parity} N={N}: discrepancies by |omega| = "
                     + ", ".join("none" if d == mpfr("inf") else f"{float(d):.4f}" for d in dists)
                     + f"; all <= {tol}: {close}; first 4 non-increasing: {mono}")
    worst = mpfr(0)
    for parity in ("odd", "even"):
        for N in range(1, 5):
            for k in range(N):
                a = peel_ratio_raw(parity, N, k, policy)
                b = peel_ratio_simplified(parity, N, k, policy)
                with workprec(policy.bits):
                    worst = max(worst, cabs(a - b) / cabs(a))
    ratio_ok = worst <= 1e-30
    ok = ok and ratio_ok
    return [CriterionResult(8, "onion peels", ok,
                            f"Newton from every first-quadrant prediction (k=0, N=1,2, both families); "
                            f"ratio simplifications max rel err {_f(worst)} (tol 1e-30)", finds)]


# ---------------------------------------------------------------- 9. real-line structure

def suite_scanprops(policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    thr = 1e-6 if tol is None else tol
    rep = interlacing_check(2, "0.1", "40", policy, grid_points=4000, prop_n_max=5, threads=threads,
                            prop_threshold=thr)
    finds = []
    for z in rep.odd_zero_findings:
        finds.append(f"conjecture: h_{z.n} has a real zero near {float(z.omega.real):.8f}")
    for a, b, msg in rep.interlacing_findings:
        finds.append(f"conjecture: zeros of h_{a} and h_{b} do not interlace ({msg})")
    for kind, n, v in rep.prop_violations:
        finds.append(f"property ({kind}) violated at n={n}: min {v:.3e}")
    adj = min(rep.prop_min_adjacent.values())
    skip = min(rep.prop_min_skip.values())
    counts = ", ".join(f"h_{n}: {len(z)}" for n, z in sorted(rep.zeros.items()))
    finds.append(f"real zeros on [0.1, 40]: {counts}")
    return [CriterionResult(9, "real-line structure", rep.ok,
                            f"min adjacent {adj:.3e}, min skip {skip:.3e} (threshold {thr:.0e}); "
                            f"{len(rep.odd_zero_findings)} odd-index zeros, "
                            f"{len(rep.interlacing_findings)} interlacing findings", finds)]


SUITES = {
    "closedforms": suite_closedforms,
    "toda": suite_toda,
    "heine": suite_heine,
    "leading": suite_leading,
    "laguerre": suite_laguerre,
    "kissing": suite_kissing,
    "peel": suite_peel,
    "scanprops": suite_scanprops,
}


def run_suite(name: str, policy: PrecisionPolicy = DEFAULT_POLICY, tol=None, threads: int = 1) -> list:
    """Run one suite (or ``"all"``) and return the criterion results in order.

    ``tol`` replaces the main tolerance of the suite (the criterion
    default when None).

    Raises
    ------
    KeyError
        Unknown suite name.
    """
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        try:
            out += SUITES[n](policy, tol, threads)
        except KissingError as e:
            out.append(CriterionResult(0, n, False, f"{type(e).__name__}: {e}"))
    return sorted(out, key=lambda r: r.criterion)
