import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from kissingpoly.numerics import (
    PrecisionExhausted,
    PrecisionPolicy,
    adaptive_eval,
    cabs,
    digits_for,
    fmt_complex,
    fmt_real,
    rel_diff,
    to_mpc,
    to_mpfr,
    workprec,
)


def test_policy_defaults_and_validation():
    p = PrecisionPolicy()
    assert (p.bits, p.rel_tol, p.max_bits) == (256, 1e-30, 4096)
    with pytest.raises(ValueError):
        PrecisionPolicy(bits=32)
    with pytest.raises(ValueError):
        PrecisionPolicy(rel_tol=0)
    with pytest.raises(ValueError):
        PrecisionPolicy(bits=512, max_bits=256)
    assert p.with_bits(8192).max_bits == 8192


def test_to_mpc_keeps_requested_precision():
    # regression: construction outside a matching context rounded to 53 bits
    for x in ("0.1", "0.1,0.2", 0.5, 3, (1, "0.3"), complex(1, 2)):
        z = to_mpc(x, 300)
        assert z.precision == (300, 300)
    z = to_mpc("0.1", 300)
    assert abs(z.real - mpfr("0.1", 300)) == 0
    assert abs(z.real - mpfr("0.1", 53)) > 0


def test_to_mpfr_fraction_and_string():
    from fractions import Fraction

    with workprec(200):
        assert to_mpfr(Fraction(1, 3), 200) * 3 == 1 or abs(to_mpfr(Fraction(1, 3), 200) * 3 - 1) < mpfr(2) ** -195
    assert to_mpfr("2.5", 100) == mpfr("2.5")


def test_workprec_restores_context():
    before = gmpy2.get_context().precision
    with workprec(500):
        assert gmpy2.get_context().precision == 500
    assert gmpy2.get_context().precision == before


def test_rel_diff_and_cabs():
    assert cabs(mpc(3, 4)) == 5
    assert rel_diff(mpfr(1), mpfr(1)) == 0
    assert rel_diff(mpfr(0), mpfr(0)) == 0
    assert rel_diff(mpfr(1), mpfr(2)) == mpfr("0.5")
    assert rel_diff(mpfr(0), mpfr("1e-20"), floor=1) == mpfr("1e-20")


def test_adaptive_eval_converges_and_escalates():
    calls = []

    def comp(bits):
        calls.append(bits)
        with workprec(bits):
            return gmpy2.const_pi()

    v = adaptive_eval(comp, PrecisionPolicy(128, 1e-30, 1024))
    assert calls == [128, 256]
    assert abs(v - gmpy2.const_pi(256)) < mpfr("1e-70")


def test_adaptive_eval_exhausts():
    def noisy(bits):
        return mpfr(bits)  # never settles

    with pytest.raises(PrecisionExhausted):
        adaptive_eval(noisy, PrecisionPolicy(64, 1e-10, 256))


def test_adaptive_eval_per_component_floor():
    # second component is noise below its own floor
    def comp(bits):
        return [mpfr(1), mpfr(bits) * mpfr("1e-40")]

    v = adaptive_eval(comp, PrecisionPolicy(64, 1e-30, 256), scale=lambda b: [0, mpfr("1e10")])
    assert v[0] == 1


def test_digits_and_formatting():
    assert digits_for(256) == 78
    assert digits_for(64) == 20
    s = fmt_real(mpfr(4, 256) / 3, 256)
    assert s.startswith("1.3333333333") and len(s.replace(".", "")) == 78
    assert fmt_real(mpfr(0), 256) == "0"
    assert fmt_real(mpfr("1e-60", 256), 64).endswith("e-60")
    assert fmt_complex(mpc(mpfr("1.5"), mpfr("-2")), 64) == ["1.5000000000000000000", "-2.0000000000000000000"]
    assert fmt_complex(mpfr("0.25"), 64)[1] == "0"


def test_format_round_trip_is_lossless():
    with workprec(256):
        x = gmpy2.const_pi() / 7
    s = fmt_real(x, 256)
    assert mpfr(s, 256) == x
