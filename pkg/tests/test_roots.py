import gmpy2
import mpmath
import pytest
import sympy
from gmpy2 import mpc, mpfr

from kissingpoly.numerics import NoConvergence, cabs, workprec
from kissingpoly.orthopoly import monic_op
from kissingpoly.roots import (
    complex_zero_refine,
    grid,
    interlacing_check,
    kissing_detect,
    match_roots,
    pmap,
    poly_roots,
    real_zero_scan,
    trajectory,
)

from oracles import to_mp


def test_roots_of_legendre_cubic():
    rs = poly_roots(monic_op(3, 0))
    got = sorted(float(z.real) for z in rs.roots)
    assert got == pytest.approx([-(0.6 ** 0.5), 0.0, 0.6 ** 0.5], abs=1e-15)
    assert rs.residual < mpfr("1e-60")


def test_roots_against_sympy():
    x = sympy.symbols("x")
    poly = sympy.Poly((x - 1) * (x + 2) * (x - sympy.I) * (x ** 2 + 3), x)
    coeffs = [mpc(complex(c)) for c in reversed(poly.all_coeffs())]
    ref = [complex(z) for z in sympy.Poly(poly).nroots(n=40)]
    got = [complex(z) for z in poly_roots(coeffs).roots]
    assert len(got) == len(ref) == 5
    for b in ref:
        assert min(abs(a - b) for a in got) < 1e-15


def test_roots_clustered_and_double():
    # (x - 1)^2 (x + 1): the double root is found to about half precision
    coeffs = [mpc(1), mpc(-1), mpc(-1), mpc(1)]
    rs = poly_roots(coeffs)
    ones = sorted(rs.roots, key=lambda z: float(z.real))
    assert cabs(ones[0] + 1) < mpfr("1e-60")
    assert cabs(ones[1] - 1) < mpfr("1e-30") and cabs(ones[2] - 1) < mpfr("1e-30")


def test_match_roots_is_a_permutation():
    prev = [mpc(0), mpc(1), mpc(2)]
    cur = [mpc("2.01"), mpc("-0.02"), mpc("0.99")]
    m = match_roots(prev, cur)
    assert [float(z.real) for z in m] == pytest.approx([-0.02, 0.99, 2.01])


def test_grid_and_pmap():
    g = grid(0, 1, 5, 128)
    assert [float(x) for x in g] == [0, 0.25, 0.5, 0.75, 1]
    assert pmap(lambda v: v * 2, [1, 2, 3], threads=3) == [2, 4, 6]


def test_trajectory_shape_and_symmetry():
    samples = trajectory(4, 0, 4, 8)
    assert len(samples) == 9
    assert all(s.exists and len(s.roots) == 4 for s in samples)
    start = sorted(float(z.real) for z in samples[0].roots)
    assert start == pytest.approx([-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526], abs=1e-14)
    # roots of p_n at real omega are symmetric under z -> -conj(z)
    for s in samples:
        with workprec(256):
            for z in s.roots:
                assert min(cabs(-z.conjugate() - w) for w in s.roots) < mpfr("1e-40")
        assert all(z.imag >= -mpfr("1e-40") for z in s.roots)


def test_trajectory_odd_degree_has_axis_root():
    for s in trajectory(3, 1, 2.5, 3):
        assert sum(1 for z in s.roots if abs(z.real) < 1e-30) == 1


def test_trajectory_flags_nonexistence():
    with workprec(256):
        pi = gmpy2.const_pi()
    s = trajectory(1, pi, pi, 1)
    assert len(s) == 1 and not s[0].exists


def test_scan_h0_multiples_of_pi():
    zs = real_zero_scan(0, 1, 10, 1000)
    with workprec(256):
        pi = gmpy2.const_pi()
        assert [int(gmpy2.rint(z.omega.real / pi)) for z in zs] == [1, 2, 3]
        assert all(abs(z.omega.real - k * pi) < mpfr("1e-25") for k, z in zip((1, 2, 3), zs))


def test_scan_h2_first_zero_against_mpmath():
    z = real_zero_scan(2, 8, 11, 300)
    assert len(z) == 1

    def h2(w):
        s, c = mpmath.sin(w), mpmath.cos(w)
        return -32 * s / w ** 5 - 64 * c / w ** 6 + 96 * s / w ** 7 - 32 * s ** 3 / w ** 9

    ref = mpmath.findroot(h2, mpmath.mpf("9.2"))
    assert abs(to_mp(z[0].omega.real) - ref) < mpmath.mpf("1e-40")


def test_scan_h1_has_no_real_zeros():
    assert real_zero_scan(1, "0.1", 20, 800) == []


def test_complex_refine():
    z = complex_zero_refine(0, "3.0,0.1")
    with workprec(256):
        assert abs(z.omega.real - gmpy2.const_pi()) < mpfr("1e-20")
    assert z.kind == "real-line"
    w = complex_zero_refine(1, "4.2,2.25")
    assert w.kind == "complex-plane" and abs(complex(w.omega) - (4.2124 + 2.2507j)) < 1e-3
    with pytest.raises(NoConvergence):
        complex_zero_refine(1, "0.77,0.79", max_distance=1)


def test_kissing_events():
    ev = kissing_detect(1, 5, 13)
    assert [round(float(e.omega), 5) for e in ev] == [5.92996, 9.20318, 12.40338]
    assert all(e.residual < mpfr("1e-40") and e.root_distance < mpfr("1e-40") for e in ev)


def test_interlacing_small():
    rep = interlacing_check(1, "0.1", 15, grid_points=600)
    assert rep.ok and not rep.odd_zero_findings and not rep.interlacing_findings
    assert len(rep.zeros[0]) == 4 and len(rep.zeros[2]) == 3
