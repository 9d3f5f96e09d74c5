"""Profile-curve geometry: angles, curvature, normal speed, integrals."""

import math

import numpy as np
import pytest

from equiflow import (DegenerateTangent, OriginUndefined, ProfileCurve,
                      ShapeError, clifford_profile, curvature,
                      equivariant_integral, equivariant_normal_speed,
                      lagrangian_angle, lawlor_profile, write_curve_csv)
from equiflow.geometry import CURVE_CSV_HEADER, derivative_arrays

from oracles import ambient_A2


def line_curve(phi0=0.35, n=401, through_origin=True):
    s = np.linspace(-1.0, 1.0, n)
    if through_origin:
        return ProfileCurve(params=s, z=s * np.exp(1j * phi0), origin_index=n // 2)
    return ProfileCurve(params=s + 2.0, z=(s + 2.0) * np.exp(1j * phi0))


class TestLagrangianAngle:
    def test_lawlor_angle_is_quarter_turn(self):
        curve = lawlor_profile(np.linspace(-2, 2, 1500))
        th = lagrangian_angle(curve, n=2)
        assert th.branch_continuous
        np.testing.assert_allclose(th.values, math.pi / 2, atol=2e-5)

    def test_straight_line_doubled_angle(self):
        th = lagrangian_angle(line_curve(0.35), n=2)
        np.testing.assert_allclose(th.values, 0.7, atol=1e-10)

    def test_cubic_curve_closed_form(self):
        # gamma = (s, s^3): theta = arctan(s^2) + arctan(3 s^2)
        s = np.linspace(0.1, 1.0, 1001)
        curve = ProfileCurve(params=s, z=s + 1j * s**3)
        th = lagrangian_angle(curve, n=2).values
        exact = np.arctan(s**2) + np.arctan(3 * s**2)
        np.testing.assert_allclose(th, exact, atol=1e-4)

    def test_origin_value_uses_tangent_limit(self):
        curve = line_curve(0.35)
        th = lagrangian_angle(curve, n=2)
        i0 = curve.origin_index
        assert th.values[i0] == pytest.approx(2 * 0.35, abs=1e-12)

    def test_higher_n_weights_position_angle(self):
        curve = line_curve(0.2, through_origin=False)
        th = lagrangian_angle(curve, n=4).values
        np.testing.assert_allclose(th, 4 * 0.2, atol=1e-10)

    def test_unwrap_stays_continuous_on_circle(self):
        curve = clifford_profile(np.linspace(0, 2 * np.pi, 800))
        th = lagrangian_angle(curve, n=2)
        assert th.branch_continuous
        # theta = pi/2 + 2 arg gamma grows by 4 pi around the circle
        assert th.values[-1] - th.values[0] == pytest.approx(4 * np.pi, abs=1e-6)

    def test_degenerate_tangent_raises(self):
        s = np.linspace(-1, 1, 101)
        curve = ProfileCurve(params=s, z=s**3 + 0.5 + 0j)  # gamma' = 0 at s=0
        with pytest.raises(DegenerateTangent):
            lagrangian_angle(curve, n=2)


class TestCurvature:
    def test_circle_radius_two(self):
        # counterclockwise circle, nu = i gamma'/|gamma'| points inward:
        # kappa = +1/2 under this orientation convention
        curve = clifford_profile(np.linspace(0, 2 * np.pi, 2001))
        np.testing.assert_allclose(curvature(curve), 0.5, atol=1e-5)

    def test_straight_line(self):
        np.testing.assert_allclose(curvature(line_curve()), 0.0, atol=1e-10)

    def test_hyperbola_apex(self):
        curve = lawlor_profile(np.linspace(-1, 1, 2001))
        kappa = curvature(curve)
        assert kappa[1000] == pytest.approx(-1.0, abs=1e-3)
        # independent closed form: |kappa| = cosh(2s)^(-3/2)
        s = curve.params
        np.testing.assert_allclose(kappa, -np.cosh(2 * s) ** -1.5, atol=1e-3)

    def test_orientation_reversal_flips_sign(self):
        s = np.linspace(0.3, 1.7, 400)
        z = np.exp(1j * s) + 0.1 * s
        fwd = ProfileCurve(params=s, z=z)
        rev = ProfileCurve(params=-s[::-1], z=z[::-1])
        np.testing.assert_allclose(curvature(rev), -curvature(fwd)[::-1],
                                   rtol=1e-8, atol=1e-10)


class TestNormalSpeed:
    def test_clifford_circle_shrinks_at_unit_rate(self):
        # speed +1 along inward nu: the circle of radius 2 contracts at rate
        # matching d/dt sqrt(-4t) = -1 at t = -1
        curve = clifford_profile(np.linspace(0, 2 * np.pi, 2001))
        np.testing.assert_allclose(equivariant_normal_speed(curve), 1.0, atol=1e-5)

    def test_line_is_static(self):
        s = np.linspace(-1, 1, 400)  # even count: no sample at the origin
        curve = ProfileCurve(params=s, z=s * np.exp(0.4j))
        np.testing.assert_allclose(equivariant_normal_speed(curve), 0.0, atol=1e-9)

    def test_lawlor_neck_is_static(self):
        curve = lawlor_profile(np.linspace(-1, 1, 2001))
        assert np.max(np.abs(equivariant_normal_speed(curve))) < 1e-3

    def test_origin_sample_refused(self):
        with pytest.raises(OriginUndefined):
            equivariant_normal_speed(line_curve())


class TestNamedProfiles:
    def test_lawlor_at_zero(self):
        curve = lawlor_profile(np.linspace(-1, 1, 21))
        assert curve.z[10] == pytest.approx(1.0 + 0.0j)

    def test_clifford_at_zero_and_radius(self):
        curve = clifford_profile(np.linspace(0, 2 * np.pi, 21))
        assert curve.z[0] == pytest.approx(2.0 + 0.0j)
        np.testing.assert_allclose(np.abs(curve.z), 2.0, atol=1e-14)


class TestEquivariantIntegral:
    def test_clifford_torus_area(self):
        curve = clifford_profile(np.linspace(0, 2 * np.pi, 4001))
        area = equivariant_integral(curve, np.ones(len(curve)))
        assert area == pytest.approx(16 * math.pi**2, rel=1e-6)

    def test_unit_disc_area(self):
        s = np.linspace(0, 1, 2001)
        curve = ProfileCurve(params=s, z=s + 0j, origin_index=0)
        assert equivariant_integral(curve, np.ones(len(curve))) == pytest.approx(
            math.pi, rel=1e-9)

    def test_zero_weight(self):
        curve = clifford_profile(np.linspace(0, 1, 50))
        assert equivariant_integral(curve, np.zeros(len(curve))) == 0.0

    def test_shape_mismatch(self):
        curve = clifford_profile(np.linspace(0, 1, 50))
        with pytest.raises(ShapeError):
            equivariant_integral(curve, np.ones(49))


class TestRefinementOrders:
    @staticmethod
    def _orders(values):
        e = np.asarray(values)
        return np.log2(e[:-1] / e[1:])

    def test_angle_curvature_speed_second_order(self):
        errs_th, errs_k, errs_sp = [], [], []
        for n in (200, 400, 800):
            s = np.linspace(0.2, 1.2, n + 1)
            curve = ProfileCurve(params=s, z=np.exp(1j * s) * (1 + 0.3 * s))
            th = lagrangian_angle(curve, n=2).values
            dz = (1j + 0.3 + 0.3j * s) * np.exp(1j * s)
            d2z = (2 * 0.3j - (1 + 0.3 * s)) * np.exp(1j * s)
            th_exact = np.unwrap(np.angle(curve.z)) + np.unwrap(np.angle(dz))
            th_exact += round((th[0] - th_exact[0]) / (2 * np.pi)) * 2 * np.pi
            k_exact = np.imag(np.conj(dz) * d2z) / np.abs(dz) ** 3
            sp_exact = k_exact - np.imag(curve.z * np.conj(dz)) / (
                np.abs(dz) * np.abs(curve.z) ** 2)
            errs_th.append(np.max(np.abs(th - th_exact)))
            errs_k.append(np.max(np.abs(curvature(curve) - k_exact)))
            errs_sp.append(np.max(np.abs(equivariant_normal_speed(curve) - sp_exact)))
        assert np.all(self._orders(errs_th) > 1.9)
        assert np.all(self._orders(errs_k) > 1.9)
        assert np.all(self._orders(errs_sp) > 1.9)

    def test_lawlor_staticity_refines(self):
        sups = []
        for n in (500, 1000, 2000):
            curve = lawlor_profile(np.linspace(-1, 1, n + 1))
            sups.append(np.max(np.abs(equivariant_normal_speed(curve))))
        orders = self._orders(sups)
        assert np.all(orders > 1.9)
        assert sups[-1] < 1e-3


class TestNonuniformStencils:
    def test_derivatives_on_stretched_grid(self):
        x = np.cumsum(np.linspace(1.0, 2.0, 60))
        x = (x - x[0]) / (x[-1] - x[0])
        y = np.sin(3 * x)
        yp, ypp = derivative_arrays(x, y)
        np.testing.assert_allclose(yp, 3 * np.cos(3 * x), atol=2e-3)
        np.testing.assert_allclose(ypp, -9 * np.sin(3 * x), atol=0.3)


class TestAmbientOracleAgreement:
    def test_A2_on_generic_curve(self):
        # kappa^2 + 3 lambda^2 against the ambient second-fundamental-form
        # computation on the parametrised surface
        def gamma(s):
            return (s + 0.05 * s**3) * np.exp(0.2j * s**2)

        s = np.linspace(0.4, 1.6, 1201)
        curve = ProfileCurve(params=s, z=gamma(s))
        kappa = curvature(curve)
        lam = np.imag(curve.z * np.conj(curve.dz)) / (
            np.abs(curve.dz) * np.abs(curve.z) ** 2)
        ours = kappa**2 + 3 * lam**2
        for idx in (100, 600, 1100):
            oracle = ambient_A2(gamma, s[idx])
            assert ours[idx] == pytest.approx(oracle, rel=1e-4)


def test_curve_csv_roundtrip(tmp_path):
    curve = lawlor_profile(np.linspace(-0.5, 0.5, 33))
    path = tmp_path / "snap.csv"
    write_curve_csv(path, curve)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == CURVE_CSV_HEADER
    assert len(lines) == 34
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    np.testing.assert_allclose(data[:, 0], curve.params, atol=1e-12)
    np.testing.assert_allclose(data[:, 1] + 1j * data[:, 2], curve.z, atol=1e-12)
    np.testing.assert_allclose(data[:, 3], math.pi / 2, atol=1e-3)
