import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr

from kissingpoly.hankel import hankel_value
from kissingpoly.numerics import CostCapExceeded, NearSingular, cabs, workprec
from kissingpoly.oracle import default_order, gauss_legendre, heine_hankel, heine_poly
from kissingpoly.orthopoly import evaluate, monic_op

from oracles import to_mp


def test_gauss_legendre_small_rules():
    r1 = gauss_legendre(1)
    assert r1.nodes == (0,) and r1.weights == (2,)
    r2 = gauss_legendre(2)
    with workprec(256):
        s = 1 / gmpy2.sqrt(mpfr(3))
        assert abs(r2.nodes[1] - s) < mpfr("1e-70") and abs(r2.nodes[0] + s) < mpfr("1e-70")
        assert all(abs(w - 1) < mpfr("1e-70") for w in r2.weights)


def test_gauss_legendre_exactness_and_weights():
    r = gauss_legendre(3)
    with workprec(256):
        assert abs(r.integrate(lambda x: x ** 4) - mpfr(2) / 5) < mpfr("1e-70")
    r = gauss_legendre(31)
    with workprec(256):
        assert abs(sum(r.weights) - 2) < mpfr("1e-70")
        assert abs(r.integrate(lambda x: x ** 60) - mpfr(2) / 61) < mpfr("1e-70")
    assert r.order == 31


def test_gauss_legendre_nodes_against_mpmath():
    r = gauss_legendre(7)
    ref = sorted(mpmath.polyroots(mpmath.taylor(lambda x: mpmath.legendre(7, x), 0, 7)[::-1], maxsteps=200,
                                  extraprec=200))
    for a, b in zip(r.nodes, ref):
        assert abs(to_mp(a) - mpmath.re(b)) < mpmath.mpf("1e-50")


def test_default_order():
    assert default_order(1, 0) == 30
    assert default_order(3, 20) == 69
    assert default_order(2, "3,4") == 30


def test_heine_examples():
    with workprec(256):
        w = mpfr(1)
        mu0 = 2 * gmpy2.sin(w) / w
        assert cabs(heine_hankel(1, 1) - mu0) < mpfr("1e-60")
    ref = 4 + 2 * (mpmath.cos(2) - 1)
    assert abs(to_mp(heine_hankel(2, 1, 50)) - ref) < 1e-10
    h = hankel_value(2, 5)
    with workprec(256):
        assert cabs(heine_hankel(3, 5, 60) - h) / abs(h) < mpfr("1e-10")


def test_heine_poly_examples():
    assert cabs(heine_poly(1, 0, 1) - 1) < mpfr("1e-60")
    with workprec(256):
        x = 1 / gmpy2.sqrt(mpfr(3))
    assert cabs(heine_poly(2, 0, x)) < mpfr("1e-60")
    q = heine_poly(2, 3, "0.5,0.1")
    p = evaluate(monic_op(2, 3), "0.5,0.1")
    with workprec(256):
        assert cabs(q - p) < mpfr("1e-10")


def test_quadrature_convergence_in_order():
    h = hankel_value(2, 12)
    errs = []
    for q in (12, 20, 40):
        with workprec(256):
            errs.append(cabs(heine_hankel(3, 12, q) - h) / abs(h))
    assert errs[0] > errs[1] > errs[2]


def test_budget_and_singularity():
    with pytest.raises(CostCapExceeded):
        heine_hankel(5, 1, 40)
    with workprec(256):
        pi = gmpy2.const_pi()
    with pytest.raises(NearSingular):
        heine_poly(1, pi, 0.5)
    with pytest.raises(ValueError):
        heine_hankel(0, 1)


def test_threads_do_not_change_result():
    a = heine_hankel(3, "2,0.5", 30, threads=1)
    b = heine_hankel(3, "2,0.5", 30, threads=3)
    assert a == b
