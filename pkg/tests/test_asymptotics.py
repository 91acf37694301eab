import math

import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr

from kissingpoly.asymptotics import (
    bareiss_det,
    c_matrix,
    c_matrix_det_check,
    endpoint_monic_limit,
    envelope,
    lambert_w,
    laguerre,
    laguerre_coeffs,
    laguerre_product,
    laguerre_recurrence,
    laguerre_root_prediction,
    leading_even,
    leading_odd,
    legendre_hankel,
    pascal_det_check,
    pascal_matrix,
    peel_coefficient,
    peel_prediction,
    peel_ratio_printed_even,
    peel_ratio_raw,
    peel_ratio_simplified,
    superfactorial,
)
from kissingpoly.hankel import hankel_value
from kissingpoly.numerics import PrecisionPolicy, cabs, workprec
from kissingpoly.orthopoly import evaluate, monic_op

from oracles import to_mp


def test_superfactorial_and_barnes_g():
    assert [superfactorial(m) for m in (-1, 0, 1, 2, 3, 4)] == [1, 1, 1, 2, 12, 288]
    for m in range(6):
        assert superfactorial(m) == int(mpmath.barnesg(m + 2))
    with pytest.raises(ValueError):
        superfactorial(-2)


@pytest.mark.parametrize("N", [0, 1, 2, 5, 9])
@pytest.mark.parametrize("c", ["0.5", "3.2", "1,2"])
def test_laguerre_against_mpmath(N, c):
    re, _, im = c.partition(",")
    ref = mpmath.laguerre(N, 0, mpmath.mpc(re, im or 0))
    assert abs(to_mp(laguerre(N, c)) - ref) < mpmath.mpf("1e-60") * max(1, abs(ref))
    assert abs(to_mp(laguerre_recurrence(N, c)) - ref) < mpmath.mpf("1e-60") * max(1, abs(ref))


def test_laguerre_coefficients():
    from fractions import Fraction

    assert laguerre_coeffs(2) == (Fraction(1), Fraction(-2), Fraction(1, 2))


def test_leading_terms():
    assert cabs(leading_even(1, 10) - mpfr("0.04", 256)) < mpfr("1e-70")
    with workprec(256):
        w = mpfr(7)
        ref = -32 * gmpy2.sin(w) / w ** 5
        assert abs(leading_odd(1, 7) - ref) < mpfr("1e-70")
    assert legendre_hankel(2) * 135 == 32


def test_leading_order_relative_errors_shrink():
    for N in (1, 2):
        e1 = abs(hankel_value(2 * N - 1, 200) / leading_even(N, 200) - 1)
        e2 = abs(hankel_value(2 * N - 1, 400) / leading_even(N, 400) - 1)
        assert e2 < e1 or e1 < 1e-4


def test_envelope_limits():
    assert envelope(-1, 3) == 1
    assert abs(envelope(1, 0) - mpfr(4) / 3) < mpfr("1e-15")
    assert abs(envelope(1, 100) - mpfr("4e-4")) < mpfr("1e-18")


def test_endpoint_limit_example():
    v = endpoint_monic_limit(1, 0, 100)
    with workprec(256):
        assert cabs(v - mpc(0, mpfr("-0.02"))) < mpfr("1e-70")


@pytest.mark.parametrize("c", ["0.5", "2"])
def test_endpoint_limit_against_exact_polynomial(c):
    w = 200
    with workprec(256):
        x = 1 - mpfr(c) / mpc(0, w)
    exact = evaluate(monic_op(2, w), x)
    approx = endpoint_monic_limit(1, c, w)
    with workprec(256):
        assert cabs(exact - approx) / cabs(approx) < mpfr("0.05")


def test_laguerre_product_is_monic_when_asked():
    v = laguerre_product(2, mpc(5), 300, monic=True)
    p = evaluate(monic_op(4, 300), mpc(5))
    with workprec(256):
        assert cabs(v - p) / cabs(p) < mpfr("1e-3")


def test_laguerre_root_prediction_examples():
    r = laguerre_root_prediction(1, 100)
    with workprec(256):
        assert cabs(r[0] - mpc(1, mpfr("0.01"))) < mpfr("1e-60")
        assert cabs(r[1] - mpc(-1, mpfr("0.01"))) < mpfr("1e-60")
        r2 = laguerre_root_prediction(2, 100)
        s2 = gmpy2.sqrt(mpfr(2))
        assert cabs(r2[0] - mpc(1, (2 - s2) / 100)) < mpfr("1e-60")
        assert cabs(r2[3] - mpc(-1, (2 + s2) / 100)) < mpfr("1e-60")


def test_peel_coefficients_examples():
    assert peel_coefficient("odd", 1, 0) == 4
    assert peel_coefficient("odd", 1, 1) == 1
    assert peel_coefficient("even", 1, 0) == complex(0, -16)


def test_peel_coefficients_match_h1_closed_form():
    # h_1 = 4/w^2 + (e^{2iw} + e^{-2iw} - 2)/w^4; layer coefficients 4 (t=0) and 1 (t=1)
    assert peel_coefficient("odd", 1, 0) == 4 and peel_coefficient("odd", 1, 1) == 1


@pytest.mark.parametrize("parity", ["odd", "even"])
def test_ratio_simplification(parity):
    for N in range(1, 5):
        for k in range(N):
            a = peel_ratio_raw(parity, N, k)
            b = peel_ratio_simplified(parity, N, k)
            with workprec(256):
                assert cabs(a - b) / cabs(a) < mpfr("1e-60")


def test_printed_even_phase_does_not_match_raw_ratio():
    # the even-family formula with an extra phase factor e^{i pi/(4k+4)}
    # disagrees with the raw coefficient ratio; the phase-free form agrees
    for N in range(1, 4):
        for k in range(N):
            a = peel_ratio_raw("even", N, k)
            b = peel_ratio_printed_even(N, k)
            with workprec(256):
                assert cabs(a - b) / cabs(a) > mpfr("0.1")
                ph = gmpy2.exp(mpc(0, gmpy2.const_pi() / (4 * k + 4)))
                assert cabs(b - a * ph) / cabs(a) < mpfr("1e-60")


@pytest.mark.parametrize("z", ["2.5", "-0.2", "1,3", "-3,-0.5", "1e-5,1e-5"])
@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
def test_lambert_w_against_mpmath(z, k):
    re, _, im = z.partition(",")
    zz = mpmath.mpc(re, im or 0)
    ref = mpmath.lambertw(zz, k)
    got = lambert_w(z, k)
    assert abs(to_mp(got) - ref) < mpmath.mpf("1e-60") * max(1, abs(ref))


def test_lambert_w_examples_and_errors():
    with workprec(256):
        e = gmpy2.exp(mpfr(1))
        pi = gmpy2.const_pi()
        assert cabs(lambert_w(e) - 1) < mpfr("1e-70")
        assert cabs(lambert_w(-pi / 2) - mpc(0, pi / 2)) < mpfr("1e-70")
    assert lambert_w(0) == 0
    with pytest.raises(ValueError):
        lambert_w(0, 1)


def test_peel_prediction_branches():
    preds = peel_prediction("even", 1, 0, 0)
    assert [p.branch for p in preds] == [1, 2]
    assert all(p.omega_pred.real > 0 and p.omega_pred.imag > 0 and p.n == 2 for p in preds)
    with pytest.raises(ValueError):
        peel_prediction("odd", 1, 1, 0)
    with pytest.raises(ValueError):
        peel_prediction("odd", 2, 0, 7)


def test_binomial_determinants():
    assert [pascal_det_check(s) for s in range(9)] == [1] * 9
    for N in range(9):
        for s in range(N + 1):
            assert c_matrix_det_check(N, s) == math.comb(N, s)
    assert bareiss_det([[2, 1], [1, 3]]) == 5
    assert pascal_matrix(3) == [[1, 1, 1], [1, 2, 3], [1, 3, 6]]
    assert len(c_matrix(5, 2)) == 5
