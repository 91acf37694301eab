"""Property-based checks of symmetries and identities."""

import gmpy2
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from kissingpoly.hankel import hankel_value, toda_residual
from kissingpoly.numerics import cabs, digits_for, fmt_complex, fmt_real, to_mpc, workprec
from kissingpoly.orthopoly import monic_op, orthogonality_residuals, reflection_defect

real_w = st.floats(min_value=0.05, max_value=60, allow_nan=False)
cplx_w = st.tuples(st.floats(min_value=-20, max_value=20), st.floats(min_value=-3, max_value=3))
small_n = st.integers(min_value=0, max_value=5)


def _w(t):
    return f"{t[0]!r},{t[1]!r}"


@settings(max_examples=25, deadline=None)
@given(small_n, cplx_w)
def test_hankel_even_in_omega(n, t):
    a = hankel_value(n, _w(t))
    b = hankel_value(n, _w((-t[0], -t[1])))
    with workprec(256):
        assert cabs(a - b) <= mpfr("1e-50") * max(cabs(a), mpfr("1e-200"))


@settings(max_examples=25, deadline=None)
@given(small_n, cplx_w)
def test_hankel_conjugation(n, t):
    a = hankel_value(n, _w(t))
    b = hankel_value(n, _w((t[0], -t[1])))
    with workprec(256):
        assert cabs(a.conjugate() - b) <= mpfr("1e-50") * max(cabs(a), mpfr("1e-200"))


@settings(max_examples=25, deadline=None)
@given(small_n, real_w)
def test_hankel_real_for_real_omega(n, w):
    assert isinstance(hankel_value(n, repr(w)), gmpy2.mpfr)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=5), cplx_w)
def test_toda_identity_random(n, t):
    assert toda_residual(n, _w(t)) < mpfr("1e-50")


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=1, max_value=5), real_w)
def test_monic_orthogonality_and_reflection(n, w):
    try:
        p = monic_op(n, repr(w))
    except Exception as e:  # nonexistence at a zero of h_{n-1}
        assert type(e).__name__ == "NearSingular"
        return
    assert max(orthogonality_residuals(p)) < mpfr("1e-40")
    assert reflection_defect(p) < mpfr("1e-40")


@settings(max_examples=50, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False, allow_infinity=False))
def test_serialization_round_trip(re, im):
    z = to_mpc((re, im), 256)
    s = fmt_complex(z, 256)
    with workprec(256):
        back = mpc(mpfr(s[0]), mpfr(s[1]))
    # d = ceil(bits * log10 2) significant digits: relative error at most
    # half a unit in the d-th digit
    with workprec(512):
        for bits in (53, 256):
            d = digits_for(bits)
            x = mpfr(fmt_real(z.real, bits))
            assert abs(x - z.real) <= mpfr(10) ** (1 - d) / 2 * abs(z.real)
        assert cabs(back - z) <= mpfr(10) ** (1 - digits_for(256)) / 2 * cabs(z)
