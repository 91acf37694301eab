import doctest
import importlib

import gmpy2
import pytest

from kissingpoly import _backend
from kissingpoly.moments import as_omega, moment_values, series_terms
from kissingpoly.numerics import workprec
from kissingpoly.oracle import gauss_legendre
from kissingpoly.roots import _initial, trajectory

compiled = pytest.mark.skipif("compiled" not in _backend.available(), reason="compiled kernels not built")


@pytest.fixture
def restore_backend():
    yield
    _backend.use_backend("auto")


def _inputs(bits=256):
    om = as_omega("9.5,0.25", bits)
    mu = list(moment_values(16, om, bits))
    mat = [[mu[j + k] for k in range(6)] for j in range(6)]
    rhs = [mu[6 + j] for j in range(6)]
    coeffs = mu[:7]
    rule = gauss_legendre(20, bits)
    with workprec(bits):
        eps = gmpy2.mpfr(2) ** -(bits - 8)
        z = as_omega("0.4,-0.1", bits)
    return {
        "moment_series": lambda k: k.moment_series(om, 12, series_terms(om, bits + 64), bits + 64, bits),
        "det": lambda k: k.det(mat, bits),
        "solve": lambda k: k.solve(mat, rhs, bits),
        "hankel_jet": lambda k: k.hankel_jet(mu, 6, 2, bits),
        "tilde_coeffs": lambda k: k.tilde_coeffs(mu, 6, bits),
        "horner": lambda k: k.horner(coeffs, z, bits),
        "aberth": lambda k: k.aberth(coeffs, _initial(coeffs, bits), bits, 500, eps),
        "heine_sum": lambda k: k.heine_sum(list(rule.nodes), list(rule.weights), om, 3, z, bits, 0, 20),
    }


@compiled
@pytest.mark.parametrize("name", sorted(_inputs()))
def test_kernels_bit_identical(name):
    fn = _inputs()[name]
    assert repr(fn(_backend.get("python"))) == repr(fn(_backend.get("compiled")))


@compiled
def test_trajectory_identical_across_backends(restore_backend):
    _backend.use_backend("python")
    a = trajectory(5, 0, 6, 6)
    _backend.use_backend("compiled")
    b = trajectory(5, 0, 6, 6)
    assert [s.roots for s in a] == [s.roots for s in b]


def test_backend_selection(restore_backend):
    assert "python" in _backend.available()
    assert _backend.use_backend("python") == "python"
    assert _backend.kernels().NAME == "python"
    with pytest.raises(ValueError):
        _backend.use_backend("fortran")


@pytest.mark.parametrize("mod", ["numerics", "moments", "hankel", "orthopoly", "roots", "asymptotics",
                                 "oracle"])
def test_doctests(mod):
    m = importlib.import_module(f"kissingpoly.{mod}")
    res = doctest.testmod(m, optionflags=doctest.ELLIPSIS)
    assert res.failed == 0
