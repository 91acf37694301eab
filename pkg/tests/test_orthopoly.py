import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr

from kissingpoly.hankel import hankel_value
from kissingpoly.numerics import NearSingular, cabs, workprec
from kissingpoly.orthopoly import (
    dd_residual,
    evaluate,
    exists,
    inner,
    kissing_constant,
    kissing_residual,
    monic_op,
    orthogonality_residuals,
    recurrence_coeffs,
    reflection_defect,
    stieltjes_coeffs,
    tilde_op,
    tilde_recurrence_residual,
)
from kissingpoly.roots import real_zero_scan

from oracles import monic as ref_monic
from oracles import to_mp


def test_monic_legendre():
    p = monic_op(2, 0)
    with workprec(256):
        assert abs(p.coeffs[0] + mpfr(1) / 3) < mpfr("1e-70")
    assert p.coeffs[1] == 0 and p.coeffs[2] == 1 and p.degree == 2


def test_monic_degree_one_at_half_pi():
    with workprec(256):
        w = gmpy2.const_pi() / 2
        p = monic_op(1, w)
        assert cabs(p.coeffs[0] + mpc(0, 2) / gmpy2.const_pi()) < mpfr("1e-70")


@pytest.mark.parametrize("n,w", [(3, "4.4"), (4, "2,0.3"), (5, "10")])
def test_monic_against_independent_solve(n, w):
    re, _, im = w.partition(",")
    ref = ref_monic(n, mpmath.mpc(re, im or 0))
    got = monic_op(n, w).coeffs
    for a, b in zip(got, ref):
        assert abs(to_mp(a) - b) < mpmath.mpf("1e-50") * max(1, abs(b))


def test_orthogonality_and_reflection():
    p = monic_op(5, "7.25")
    assert max(orthogonality_residuals(p)) < mpfr("1e-60")
    assert reflection_defect(p) < mpfr("1e-60")
    q = monic_op(4, "3,0.5")
    assert max(orthogonality_residuals(q)) < mpfr("1e-60")


def test_nonexistence_at_zero_of_h2():
    z = real_zero_scan(2, 5, 7, 200)[0].omega.real
    assert not exists(3, z)
    with pytest.raises(NearSingular) as e:
        monic_op(3, z)
    assert e.value.args  # carries the failing index
    assert exists(2, z)


def test_tilde_leading_coefficient_and_scaling():
    t = tilde_op(2, 5)
    h1 = hankel_value(1, 5)
    p = monic_op(2, 5)
    with workprec(256):
        assert cabs(t.leading - h1) < mpfr("1e-60")
        for a, b in zip(t.coeffs, p.coeffs):
            assert cabs(a - h1 * b) < mpfr("1e-25")
    t1 = tilde_op(1, 0)
    assert cabs(t1.coeffs[1] - 2) < mpfr("1e-70") and t1.numerical_degree() == 1


def test_tilde_degree_drop_and_kissing_relation():
    z = real_zero_scan(2, 5, 7, 200)[0].omega.real
    t3 = tilde_op(3, z)
    assert t3.numerical_degree() == 2
    c, res = kissing_residual(1, z)
    assert res < mpfr("1e-60")
    assert cabs(c - kissing_constant(1, z)) == 0


def test_evaluate_and_inner():
    p = monic_op(2, 0)
    with workprec(256):
        x = 1 / gmpy2.sqrt(mpfr(3))
    assert cabs(evaluate(p, x)) < mpfr("1e-70")
    assert cabs(p(mpc(1))) - mpfr(2) / 3 < mpfr("1e-70")
    from kissingpoly.moments import moments

    mu = moments(4, 0).values
    assert cabs(inner([mpc(1)], [mpc(1)], mu) - 2) < mpfr("1e-70")


def test_recurrence_legendre_limit():
    rc = recurrence_coeffs(3, 0)
    assert all(cabs(a) < mpfr("1e-70") for a in rc.alphas)
    for n in (1, 2):
        with workprec(256):
            exact = mpfr(n * n) / (4 * n * n - 1)
            assert cabs(rc.beta(n) - exact) < mpfr("1e-70")
    with pytest.raises(IndexError):
        rc.beta(0)


def test_beta1_at_one_is_cot_squared():
    rc = recurrence_coeffs(2, 1)
    with mpmath.workdps(80):
        ref = mpmath.cot(1) ** 2
        assert abs(to_mp(rc.beta(1)) - ref) < mpmath.mpf("1e-70")
        assert abs(to_mp(rc.beta(1)) - mpmath.mpf("0.412107")) > 1e-4


def test_alpha0_at_half_pi():
    with workprec(256):
        w = gmpy2.const_pi() / 2
        rc = recurrence_coeffs(1, w)
        assert cabs(rc.alphas[0] - mpc(0, 2) / gmpy2.const_pi()) < mpfr("1e-70")


def test_stieltjes_matches_hankel_formulas():
    a = recurrence_coeffs(5, "6.1", check=False)
    b = stieltjes_coeffs(5, "6.1")
    with workprec(256):
        for x, y in zip(a.alphas + a.betas, b.alphas + b.betas):
            assert cabs(x - y) <= mpfr("1e-40") * max(cabs(y), 1)


@pytest.mark.parametrize("m,w", [(3, "2"), (2, "0.5"), (3, "0"), (4, "8.5")])
def test_toda_system_finite_difference(m, w):
    assert dd_residual(m, w) < mpfr("1e-15")


@pytest.mark.parametrize("n,w", [(2, "3"), (4, "9.9"), (3, "1,0.2")])
def test_tilde_three_term_recurrence(n, w):
    assert tilde_recurrence_residual(n, w) < mpfr("1e-60")


def test_recurrence_near_singular_index():
    z = real_zero_scan(0, 3, 3.3, 50)[0].omega.real
    with pytest.raises(NearSingular):
        recurrence_coeffs(2, z)
