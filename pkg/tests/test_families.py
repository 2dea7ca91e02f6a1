import numpy as np
import pytest
from numpy.testing import assert_allclose

from lagrangian_humbilical_library.quat_core import quat_norm
from lagrangian_humbilical_library.immersion import jet
from lagrangian_humbilical_library.families import (
    build_extensor, circle_curve, curve_coefficients, custom_curve,
    extensor_profile_match, isometric_tests, line_curve, line_immersion,
    pseudo_sphere_curve, sphere_immersion, totally_geodesic_test,
    totally_real_test, twisted_curve, unit_sphere_immersion)

# Off the origin, so a curve with a fixed real direction still spans a plane.
PLANAR_LINE = line_immersion((0.0, 1.0), (1.0, 0.0), interval=(0.5, 1.5))


class TestCurves:

    @pytest.mark.parametrize("b", [0.25, 0.5, 1.0])
    def test_pseudo_sphere_curve(self, b):
        F = pseudo_sphere_curve(b)
        s = F.samples(9)
        assert_allclose(F(0.0)[0], [0.0, -1.0 / b, 0.0, 0.0], atol=1e-14)
        assert F.speed_residual(s) <= 1e-12
        assert_allclose(quat_norm(F(s)), np.cos(b * s) / b, atol=1e-12)
        assert F.interval == pytest.approx((-np.pi / (4 * b), np.pi / (4 * b)))

    @pytest.mark.parametrize("b", [0.0, -1.0])
    def test_pseudo_sphere_needs_positive_b(self, b):
        with pytest.raises(ValueError):
            pseudo_sphere_curve(b)

    @pytest.mark.parametrize("F", [pseudo_sphere_curve(0.5), circle_curve("k"), twisted_curve(0.5),
                                   twisted_curve(-0.3), line_curve(0.5)])
    def test_closed_forms_match_differences(self, F):
        s = F.samples(7)
        h = 1e-5
        assert_allclose(F.derivative(s), (F(s + h) - F(s - h)) / (2 * h), atol=1e-8)
        assert_allclose(F.second_derivative(s), (F.derivative(s + h) - F.derivative(s - h)) / (2 * h), atol=1e-7)

    @pytest.mark.parametrize("F", [pseudo_sphere_curve(0.5), circle_curve("j"), twisted_curve(0.5)])
    def test_unit_speed_acceleration_is_normal(self, F):
        s = F.samples(9)
        assert F.speed_residual(s) <= 1e-12
        assert np.max(np.abs(np.sum(F.second_derivative(s) * F.derivative(s), axis=-1))) <= 1e-12

    def test_twisted_rejects_unit_rate(self):
        with pytest.raises(ValueError):
            twisted_curve(1.0)

    def test_line_through_origin_is_rejected(self):
        with pytest.raises(ValueError):
            line_curve(a=-0.5)

    def test_circle_plane(self):
        with pytest.raises(ValueError):
            circle_curve("x")

    def test_custom_curve_differences(self):
        F = custom_curve(np.cos, np.sin, lambda s: 0.0, lambda s: 0.0, interval=(-1.0, 1.0))
        s = np.array([-0.5, 0.0, 0.5])
        assert_allclose(F.derivative(s), circle_curve("i").derivative(s), atol=1e-8)
        assert_allclose(F.second_derivative(s), -F(s), atol=1e-5)


class TestCurveCoefficients:

    @pytest.mark.parametrize("b", [0.25, 0.5, 1.0])
    def test_pseudo_sphere(self, b):
        F = pseudo_sphere_curve(b)
        coefficients = curve_coefficients(F, F.samples(9))
        assert coefficients.shape == (9, 6)
        assert_allclose(coefficients, np.tile([2 * b, 0, 0, b, 0, 0], (9, 1)), atol=1e-10)

    def test_scalar_argument(self):
        assert curve_coefficients(circle_curve("i"), 0.3).shape == (6,)

    def test_circle(self):
        assert_allclose(curve_coefficients(circle_curve("i"), 0.3), [1, 0, 0, 1, 0, 0], atol=1e-12)
        assert_allclose(curve_coefficients(circle_curve("k"), 0.3), [0, 0, 1, 0, 0, 1], atol=1e-12)

    def test_line(self):
        assert_allclose(curve_coefficients(line_curve(0.5), [0.1, 0.6]), np.zeros((2, 6)), atol=1e-12)

    def test_curve_through_origin(self):
        F = custom_curve(lambda s: s, lambda s: 0.0, lambda s: 0.0, lambda s: 0.0, interval=(-1.0, 1.0))
        with pytest.raises(ValueError):
            curve_coefficients(F, 0.0)


class TestBaseImmersions:

    def test_unit_sphere(self):
        G = unit_sphere_immersion(3)
        assert_allclose(np.linalg.norm(G(G.chart.grid(5)), axis=-1), 1.0, atol=1e-14)
        assert_allclose(G([0.0, 0.0])[0], [1.0, 0.0, 0.0])
        assert G.chart.labels == ("u2", "u3")

    def test_tangents_are_orthogonal_to_position(self):
        G = unit_sphere_immersion(4)
        j = jet(G.as_immersion(), [0.2, -0.3, 0.4])
        assert np.max(np.abs(np.einsum('anq,nq->a', j.d1, j.position))) <= 1e-8

    def test_sphere_needs_dimension(self):
        with pytest.raises(ValueError):
            sphere_immersion(1)

    def test_radius(self):
        G = sphere_immersion(2, radius=2.0)
        assert_allclose(np.linalg.norm(G([[0.4]]), axis=-1), 2.0)


class TestExtensor:

    def test_real_curve_gives_the_base(self):
        one = custom_curve(lambda s: 1.0, lambda s: 0.0, lambda s: 0.0, lambda s: 0.0, interval=(-1.0, 1.0))
        G = unit_sphere_immersion(3)
        L = build_extensor(one, G)
        points = L.chart.grid(3)
        assert_allclose(L(points)[..., 0], G(points[:, 1:]))
        assert np.max(np.abs(L(points)[..., 1:])) == 0.0

    def test_chart(self, pseudo_sphere):
        assert pseudo_sphere.chart.labels == ("s", "u2", "u3")
        assert pseudo_sphere.dim == 3
        assert pseudo_sphere.n == 3
        assert pseudo_sphere.name == "pseudo_spherexsphere"

    @pytest.mark.parametrize("b", [0.25, 0.5, 1.0])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_pseudo_sphere_profile_matches(self, b, n):
        assert extensor_profile_match(pseudo_sphere_curve(b), n).discrepancy <= 1e-4

    @pytest.mark.parametrize("F", [
        circle_curve("i"), circle_curve("j"), twisted_curve(0.5),
        custom_curve(np.cos, lambda s: 0.0, np.sin, lambda s: 0.0, interval=(-1.0, 1.0)),
    ])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_profile_matches(self, F, n):
        assert extensor_profile_match(F, n).discrepancy <= 1e-4


class TestTotallyReal:

    @pytest.mark.parametrize("F", [pseudo_sphere_curve(0.5), twisted_curve(0.5), circle_curve("k")])
    def test_spherical_base(self, F):
        verdict = totally_real_test(F, unit_sphere_immersion(3))
        assert verdict.spherical
        assert verdict.verdict
        assert verdict.direct_residual <= 1e-6

    def test_real_direction_curve_on_a_line(self):
        F = line_curve(a=0.5, c=(1.0, 1.0, 0.0, 0.0))
        verdict = totally_real_test(F, PLANAR_LINE)
        assert not verdict.spherical
        assert verdict.real_part_residual <= 1e-8
        assert np.max(verdict.ode_residuals) <= 1e-8
        assert verdict.verdict
        assert verdict.direct_residual <= 1e-6

    def test_complex_curve_on_a_line(self):
        verdict = totally_real_test(circle_curve("j"), PLANAR_LINE)
        assert not verdict.spherical
        assert verdict.real_part_residual >= 0.5
        assert np.max(verdict.ode_residuals) >= 0.5
        assert not verdict.verdict
        assert verdict.direct_residual > 0.01


class TestIsometric:

    def test_pseudo_sphere(self):
        verdict = isometric_tests(pseudo_sphere_curve(0.5), unit_sphere_immersion(3))
        assert verdict.f_isometric
        assert not verdict.g_isometric

    def test_circle(self):
        verdict = isometric_tests(circle_curve("i"), unit_sphere_immersion(3))
        assert verdict.f_isometric
        assert verdict.g_isometric


class TestTotallyGeodesic:

    def test_line_extensor(self, line_extensor):
        verdict = totally_geodesic_test(line_extensor, line_extensor.chart.grid(3))
        assert verdict.verdict
        assert verdict.curvature_position == pytest.approx(0.0, abs=1e-12)
        assert verdict.curvature_shape == pytest.approx(0.0, abs=1e-12)

    def test_planar_cone(self):
        cone = build_extensor(pseudo_sphere_curve(0.5), line_immersion((0.0, 0.0), (0.6, 0.8), interval=(0.5, 1.5)))
        verdict = totally_geodesic_test(cone, cone.chart.grid(3))
        assert verdict.max_h <= 1e-6
        assert verdict.verdict

    def test_pseudo_sphere(self, pseudo_sphere):
        verdict = totally_geodesic_test(pseudo_sphere, pseudo_sphere.chart.grid(2))
        assert not verdict.verdict
        # |h(e1, e1)| = λ = 2b
        assert verdict.max_h >= 1.0 - 1e-3
