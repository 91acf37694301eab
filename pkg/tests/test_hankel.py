from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr

from kissingpoly.asymptotics import envelope
from kissingpoly.hankel import (
    hankel_det,
    hankel_det_derivative,
    hankel_jet,
    hankel_value,
    kappas,
    product_formula_det,
    toda_residual,
)
from kissingpoly.numerics import SingularChain, cabs, workprec
from kissingpoly.roots import real_zero_scan

from oracles import hankel as ref_hankel
from oracles import to_mp

LEGENDRE = {0: Fraction(2), 1: Fraction(4, 3), 2: Fraction(32, 135), 3: Fraction(256, 23625)}


def rel(a, b):
    a, b = to_mp(a), mpmath.mpmathify(b)
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_zero_frequency_values(n):
    v = hankel_value(n, 0)
    q = LEGENDRE[n]
    assert rel(v, mpmath.mpf(q.numerator) / q.denominator) < 1e-70


def test_minus_one_convention():
    assert hankel_value(-1, 5) == 1
    assert hankel_jet(-1, 5) == [1, 0, 0]
    with pytest.raises(ValueError):
        hankel_det(-2, 1)


@pytest.mark.parametrize("n,w", [(1, "1"), (2, "5"), (3, "2.5"), (4, "7"), (2, "3,0.4"), (3, "1,-0.7")])
def test_against_independent_determinant(n, w):
    re, _, im = w.partition(",")
    ref = ref_hankel(n, mpmath.mpc(re, im or 0))
    v = hankel_det(n, w).value
    assert abs(to_mp(v) - ref) / abs(ref) < mpmath.mpf("1e-50")


def test_real_for_real_frequency_and_view():
    view = hankel_det(3, "11.5")
    assert view.is_real and isinstance(view.value, gmpy2.mpfr)
    assert abs(view.det.imag) <= mpfr("1e-40") * envelope(3, "11.5")
    assert len(view.entries) == 4 and view.entries[1][2] == view.entries[0][3]
    assert float(view) == float(view.value)


def test_h1_at_one_closed_form():
    # 4 + 2 (cos 2 - 1) = 4 cos^2 1
    with mpmath.workdps(80):
        assert rel(hankel_value(1, 1), 4 * mpmath.cos(1) ** 2) < 1e-70


@pytest.mark.parametrize("n,w", [(0, "1.3"), (2, "4"), (3, "0.5,0.3")])
def test_derivatives_against_mpmath_diff(n, w):
    re, _, im = w.partition(",")
    w0 = mpmath.mpc(re, im or 0)
    d1 = mpmath.diff(lambda t: ref_hankel(n, t), w0)
    d2 = mpmath.diff(lambda t: ref_hankel(n, t), w0, 2)
    assert abs(to_mp(hankel_det_derivative(n, w, 1)) - d1) < mpmath.mpf("1e-30") * max(1, abs(d1))
    assert abs(to_mp(hankel_det_derivative(n, w, 2)) - d2) < mpmath.mpf("1e-25") * max(1, abs(d2))
    with pytest.raises(ValueError):
        hankel_det_derivative(n, w, 3)


def test_h0_derivative_doc_example():
    with workprec(256):
        pi = gmpy2.const_pi()
        assert abs(hankel_det_derivative(0, pi / 2) + 8 / pi ** 2) < mpfr("1e-70")


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("w", ["0.5", "9.2", "33", "4,0.5"])
def test_toda_identity(n, w):
    assert toda_residual(n, w) < mpfr("1e-60")


def test_toda_at_zero_of_h2():
    z = real_zero_scan(2, 5, 7, 200)[0].omega.real
    assert toda_residual(2, z) < mpfr("1e-60")


@pytest.mark.parametrize("n,w", [(1, "0"), (3, "2"), (4, "6.5"), (3, "1,0.5")])
def test_product_formula(n, w):
    a = product_formula_det(n, w)
    b = hankel_value(n - 1, w)
    with workprec(256):
        assert cabs(a - b) <= mpfr("1e-50") * envelope(n - 1, w)


def test_kappas_two_paths_agree():
    mom, rat = kappas(4, "3.3")
    with workprec(256):
        for a, b in zip(mom, rat):
            assert cabs(a - b) <= mpfr("1e-50") * cabs(b)


def test_singular_chain_detected():
    z = real_zero_scan(0, 3, 3.3, 50)[0].omega.real  # pi, where h_0 vanishes
    with pytest.raises(SingularChain):
        product_formula_det(3, z)


def test_heine_bound_and_envelope_scale():
    from kissingpoly.asymptotics import legendre_hankel

    for n in range(5):
        q = legendre_hankel(n)
        for w in ("0.3", "4", "17", "2,1.5"):
            v = cabs(hankel_value(n, w))
            im = mpmath.mpf(w.split(",")[1]) if "," in w else 0
            bound = mpmath.mpf(q.numerator) / q.denominator * mpmath.exp((n + 1) * im)
            assert to_mp(v) <= bound * (1 + mpmath.mpf("1e-20"))
            assert to_mp(envelope(n, w)) <= bound * (1 + mpmath.mpf("1e-15"))
