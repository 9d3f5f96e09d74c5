"""Backend equivalence: the numba kernels must match the vectorised numpy
reference element-wise."""

import numpy as np
import pytest

import equiflow.kernels_numpy as knp

knb = pytest.importorskip("equiflow.kernels_numba")


@pytest.fixture
def data(rng):
    n = 257
    s = np.linspace(0.0, 1.0, n)
    v = 0.3 * np.cos(np.pi * s / 2) ** 2 + 0.05
    vp = rng.normal(size=n) * 0.2
    vpp = rng.normal(size=n) * 2.0
    return s, v, vp, vpp


def test_ghost_derivatives_match(data, rng):
    _, v, _, _ = data
    up_a, upp_a = knp.ghost_derivatives(v, 0.01, 1.3, -0.2)
    up_b, upp_b = knb.ghost_derivatives(v, 0.01, 1.3, -0.2)
    np.testing.assert_allclose(up_a, up_b, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(upp_a, upp_b, rtol=1e-13, atol=1e-10)


def test_lawlor_rhs_match(data):
    s, v, vp, vpp = data
    a = knp.lawlor_rhs(s[1:], v[1:], vp[1:], vpp[1:])
    b = knb.lawlor_rhs(s[1:], v[1:], vp[1:], vpp[1:])
    np.testing.assert_allclose(a, b, rtol=1e-12)
    assert np.isclose(knp.lawlor_min_gprime2(s[1:], v[1:], vp[1:]),
                      knb.lawlor_min_gprime2(s[1:], v[1:], vp[1:]), rtol=1e-13)


def test_lawlor_terms_match(data):
    s, v, vp, vpp = data
    fa, aa, ga, ma = knp.lawlor_terms(s, v, vp, vpp)
    fb, ab, gb, mb = knb.lawlor_terms(s, v, vp, vpp)
    np.testing.assert_allclose(fa[1:], fb[1:], rtol=1e-12)
    np.testing.assert_allclose(aa[1:], ab[1:], rtol=1e-12)
    assert np.isclose(ga, gb, rtol=1e-13)
    assert np.isclose(ma, mb, rtol=1e-12)


def test_clifford_terms_match(data):
    s, v, vp, vpp = data
    r = 2.0 * s
    fa, aa, ma = knp.clifford_terms(r, v, vp, vpp)
    fb, ab, mb = knb.clifford_terms(r, v, vp, vpp)
    np.testing.assert_allclose(fa[1:], fb[1:], rtol=1e-12)
    np.testing.assert_allclose(aa[1:], ab[1:], rtol=1e-12)
    assert np.isclose(ma, mb, rtol=1e-12)
    ra = knp.clifford_rhs(r[1:], v[1:], vp[1:], vpp[1:])
    rb = knb.clifford_rhs(r[1:], v[1:], vp[1:], vpp[1:])
    np.testing.assert_allclose(ra, rb, rtol=1e-12)


def test_thomas_match(rng):
    n = 123
    lower = rng.normal(size=n - 1)
    upper = rng.normal(size=n - 1)
    diag = 4.0 + rng.random(size=n)
    rhs = rng.normal(size=n)
    xa = knp.thomas(lower, diag, upper, rhs)
    xb = knb.thomas(lower, diag, upper, rhs)
    np.testing.assert_allclose(xa, xb, rtol=1e-10, atol=1e-12)
    # residual check against the dense system
    A = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    np.testing.assert_allclose(A @ xa, rhs, rtol=1e-9, atol=1e-11)


def test_semi_implicit_solve_match(data):
    s, v, vp, vpp = data
    f, a, _, _ = knp.lawlor_terms(s, v, vp, vpp)
    for codes in ((1, 0.0, 2, 0.7), (0, 0.3, 1, 0.0), (2, -0.2, 0, 1.1)):
        ua, oka = knp.semi_implicit_solve(v, f, a, vpp, 1e-4, s[1] - s[0], *codes)
        ub, okb = knb.semi_implicit_solve(v, f, a, vpp, 1e-4, s[1] - s[0], *codes)
        assert oka and okb
        np.testing.assert_allclose(ua, ub, rtol=1e-11, atol=1e-13)
