import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr

from kissingpoly.moments import moment_derivative, moments, recurrence_moments
from kissingpoly.numerics import IndexOutOfRange, PrecisionPolicy, cabs, workprec


def quad_moment(n, w):
    w = mpmath.mpmathify(w)
    return mpmath.quad(lambda x: x ** n * mpmath.exp(1j * w * x), [-1, 0, 1])


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol * max(1, abs(complex(b)))


def test_zero_frequency_moments():
    seq = moments(6, 0)
    with workprec(256):
        for k, v in enumerate(seq.values):
            expected = mpfr(2) / (k + 1) if k % 2 == 0 else 0
            assert v.imag == 0 and abs(v.real - expected) < mpfr("1e-70")


@pytest.mark.parametrize("w", ["1", "0.001", "7.5", "40"])
def test_closed_form_low_moments(w):
    seq = moments(1, w)
    with workprec(256):
        om = mpfr(w)
        mu0 = 2 * gmpy2.sin(om) / om
        mu1 = 2 * (gmpy2.sin(om) - om * gmpy2.cos(om)) / om ** 2
        assert abs(seq[0] - mu0) < mpfr("1e-70")
        assert abs(seq[1] - mpc(0, mu1)) < mpfr("1e-70")


@pytest.mark.parametrize("n,w", [(5, "3,0.5"), (8, "12"), (3, "0.2,-1.5"), (10, "25")])
def test_against_independent_quadrature(n, w):
    re, _, im = w.partition(",")
    wq = mpmath.mpc(re, im or 0)
    ref = quad_moment(n, wq)
    v = moments(n, w)[n]
    assert abs(mpmath.mpc(str(v.real), str(v.imag)) - ref) < mpmath.mpf("1e-60") * max(1, abs(ref))


def test_parity_structure_for_real_frequency():
    seq = moments(12, "3.7")
    assert seq.is_real_frequency()
    assert seq.parity_defect() == 0 or seq.parity_defect() < mpfr("1e-70")


def test_recurrence_cross_check_agrees_for_large_frequency():
    seq = moments(10, 50)
    rec = recurrence_moments(10, seq.omega, 256)
    for a, b in zip(seq.values, rec):
        assert cabs(a - b) < mpfr("1e-60")


def test_index_errors():
    seq = moments(3, 1)
    with pytest.raises(IndexOutOfRange):
        seq[4]
    with pytest.raises(IndexOutOfRange):
        moments(-1, 1)
    with pytest.raises(IndexOutOfRange):
        moment_derivative(seq, 3, 1)


def test_derivative_matches_finite_difference():
    seq = moments(6, "2.5")
    d = moment_derivative(seq, 2, 1)
    ref = mpmath.diff(lambda w: quad_moment(2, w), mpmath.mpf("2.5"))
    assert abs(complex(d) - complex(ref)) < 1e-40
    with workprec(256):
        assert moment_derivative(seq, 2, 2) == -seq[4]


def test_precision_follows_policy():
    seq = moments(4, "1.1", PrecisionPolicy(512))
    assert all(v.precision == (512, 512) for v in seq.values)
