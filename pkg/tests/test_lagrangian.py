import numpy as np
import pytest
from numpy.testing import assert_allclose

from lagrangian_humbilical_library.quat_core import (
    DimensionMismatchError, StructureTag, apply_structure, inner, norm)
from lagrangian_humbilical_library.immersion import (
    Chart, Frame, ImmersionMap, SffTensor, jet, local_geometry, second_fundamental_form)
from lagrangian_humbilical_library.lagrangian import (
    HUmbilicalProfile, MinimalPointError, NotHUmbilicalError,
    ReconstructionNotApplicable, analyse_point, codazzi_scalar_check,
    cubic_symmetry_check, curvature_branch, distinguished_direction,
    eigencheck_AH, extract_profile, is_lagrangian, reconstruct_h, reconstruction_residual,
    totally_real_residual)
from lagrangian_humbilical_library.families import (
    build_extensor, circle_curve, line_immersion, unit_sphere_immersion)


def real_frame(n):
    '''
    The standard real basis of H^n as an orthonormal frame.
    '''
    vectors = np.zeros((n, n, 4))
    for a in range(n):
        vectors[a, a, 0] = 1.0
    return Frame(vectors=vectors, coefficients=np.eye(n))


def analysis_at(immersion, point):
    j, metric = local_geometry(immersion, [point])[0]
    return analyse_point(j, metric)


class TestLagrangianCondition:

    def test_pseudo_sphere_is_lagrangian(self, pseudo_sphere):
        for point in pseudo_sphere.chart.grid(3):
            verdict, residual = is_lagrangian(jet(pseudo_sphere, point))
            assert verdict
            assert residual <= 1e-6

    def test_real_plane_is_lagrangian(self):
        def rule(points):
            values = np.zeros((points.shape[0], 2, 4))
            values[:, :, 0] = points
            return values
        plane = ImmersionMap(rule=rule, chart=Chart(((-1, 1), (-1, 1))), n=2)
        assert is_lagrangian(jet(plane, [0.1, 0.2])) == (True, 0.0)

    def test_needs_matching_dimensions(self):
        sphere = unit_sphere_immersion(3).as_immersion()
        with pytest.raises(DimensionMismatchError):
            is_lagrangian(jet(sphere, [0.0, 0.0]))

    def test_non_spherical_base_with_complex_curve(self):
        L = build_extensor(circle_curve("j"), line_immersion((0.0, 0.0), (1.0, 0.0), interval=(0.5, 1.5)))
        verdict, residual = is_lagrangian(jet(L, [0.0, 1.0]))
        assert not verdict
        assert residual > 0.01


class TestDistinguishedDirection:

    def test_single_structure(self):
        frame = real_frame(2)
        H = 2.0 * apply_structure(StructureTag.I, frame[0])
        assert_allclose(distinguished_direction(H, frame), frame[0])

    def test_negative_slot_is_reoriented(self):
        frame = real_frame(2)
        H = -0.5 * apply_structure(StructureTag.J, frame[1])
        assert_allclose(distinguished_direction(H, frame), -frame[1])

    def test_parallel_parts_in_two_slots(self):
        frame = real_frame(3)
        H = apply_structure(StructureTag.I, frame[0]) + 0.5 * apply_structure(StructureTag.K, frame[0])
        assert_allclose(distinguished_direction(H, frame), frame[0])

    def test_non_parallel_parts(self):
        frame = real_frame(2)
        H = apply_structure(StructureTag.I, frame[0]) + apply_structure(StructureTag.J, frame[1])
        with pytest.raises(NotHUmbilicalError):
            distinguished_direction(H, frame)

    def test_minimal_point(self):
        with pytest.raises(MinimalPointError):
            distinguished_direction(np.zeros((2, 4)), real_frame(2))

    def test_pseudo_sphere_direction_is_the_curve_direction(self, pseudo_sphere):
        j, metric = local_geometry(pseudo_sphere, [[0.3, -0.2, 0.4]])[0]
        analysis = analyse_point(j, metric)
        e1 = analysis.profile.e1
        assert abs(inner(e1, j.d1[0])) / norm(j.d1[0]) == pytest.approx(1.0, abs=1e-6)

    def test_precomputed_form_gives_the_same_analysis(self, pseudo_sphere):
        j, metric = local_geometry(pseudo_sphere, [[0.3, -0.2, 0.4]])[0]
        reused = analyse_point(j, metric, sff=second_fundamental_form(j, metric))
        fresh = analyse_point(j, metric)
        assert_allclose(reused.H, fresh.H)
        assert_allclose(reused.sff.h, fresh.sff.h)
        assert_allclose(reused.profile.lambdas, fresh.profile.lambdas)


class TestProfile:

    @pytest.mark.parametrize("point", [[0.0, 0.0, 0.0], [0.8, -0.4, 0.6], [-1.1, 0.7, -0.3]])
    def test_pseudo_sphere_profile(self, pseudo_sphere, point):
        profile = analysis_at(pseudo_sphere, point).profile
        assert_allclose(profile.lambdas, [1.0, 0.0, 0.0], atol=1e-5)
        assert_allclose(profile.mus, [0.5, 0.0, 0.0], atol=1e-5)
        assert profile.pattern_residual <= 1e-5
        assert profile.gamma_consistency() <= 1e-10
        assert profile.is_valid()

    def test_circle_extensor_profile(self, circle_extensor):
        profile = analysis_at(circle_extensor, [0.2, 0.3, -0.1]).profile
        assert_allclose(profile.lambdas, [1.0, 0.0, 0.0], atol=1e-5)
        assert_allclose(profile.mus, [1.0, 0.0, 0.0], atol=1e-5)

    def test_line_extensor_is_minimal(self, line_extensor):
        analysis = analysis_at(line_extensor, [0.5, 0.1, 0.2])
        assert analysis.minimal
        assert np.max(np.abs(analysis.profile.lambdas)) <= 1e-6
        assert np.max(np.abs(analysis.profile.mus)) <= 1e-6

    def test_shape_eigenvalues_ratio(self):
        profile = HUmbilicalProfile.from_scalars([2.0, 0.4, 0.0], [1.0, 0.2, 0.0], 3)
        lam, mu = profile.shape_eigenvalues()
        assert lam / mu == pytest.approx(2.0)

    def test_alpha_beta(self):
        profile = HUmbilicalProfile.from_scalars([1.0, 0.0, 0.0], [0.5, 0.0, 0.0], 3)
        # γ = (1 + 2·0.5)/3 = 2/3
        assert profile.gammas[0] == pytest.approx(2.0 / 3.0)
        assert profile.alphas()[0] == pytest.approx(-0.5 / (2.0 / 3.0) ** 3)
        assert profile.betas()[0] == pytest.approx(0.75)
        assert np.isnan(profile.alphas()[1])
        assert profile.mu_bar() == pytest.approx(0.5)

    def test_dimension_one_is_rejected(self):
        sff = SffTensor(h=np.zeros((1, 1, 1, 4)), basis="frame")
        with pytest.raises(ValueError):
            extract_profile(sff, real_frame(1))


class TestReconstruction:

    def test_pseudo_sphere_entries(self, pseudo_sphere):
        analysis = analysis_at(pseudo_sphere, [0.3, -0.2, 0.4])
        frame, profile, H = analysis.frame, analysis.profile, analysis.H
        assert_allclose(reconstruct_h(profile, H, frame[0], frame[0]),
                        apply_structure(StructureTag.I, frame[0]), atol=1e-5)
        assert_allclose(reconstruct_h(profile, H, frame[0], frame[1]),
                        0.5 * apply_structure(StructureTag.I, frame[1]), atol=1e-5)
        assert_allclose(reconstruct_h(profile, H, frame[1], frame[2]), np.zeros((3, 4)), atol=1e-5)
        assert reconstruction_residual(profile, analysis.sff, frame, H) <= 1e-5

    def test_vanishing_gamma(self):
        profile = HUmbilicalProfile.from_scalars([1.0, 0.0, 0.0], [-0.5, 0.0, 0.0], 3,
                                                 e1=real_frame(3)[0])
        frame = real_frame(3)
        with pytest.raises(ReconstructionNotApplicable):
            reconstruct_h(profile, np.zeros((3, 4)), frame[0], frame[0])

    def test_inactive_slots_are_skipped(self):
        frame = real_frame(2)
        profile = HUmbilicalProfile.from_scalars([0.0, 0.0, 0.0], [0.0, 0.0, 0.0], 2, e1=frame[0])
        assert_allclose(reconstruct_h(profile, np.zeros((2, 4)), frame[0], frame[1]), np.zeros((2, 4)))


class TestEigenstructure:

    def test_pseudo_sphere_clusters(self, pseudo_sphere):
        analysis = analysis_at(pseudo_sphere, [0.3, -0.2, 0.4])
        report = eigencheck_AH(analysis.sff, analysis.frame, analysis.H, analysis.profile)
        assert sorted(report.multiplicities) == [1, 2]
        assert report.residual <= 1e-5
        assert_allclose(report.eigenvalues, [1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0], atol=1e-5)

    def test_circle_has_a_single_cluster(self, circle_extensor):
        analysis = analysis_at(circle_extensor, [0.2, 0.3, -0.1])
        report = eigencheck_AH(analysis.sff, analysis.frame, analysis.H, analysis.profile)
        assert report.multiplicities == (3,)
        assert report.residual <= 1e-5

    def test_three_clusters_fail(self):
        frame = real_frame(3)
        H = apply_structure(StructureTag.I, frame[0])
        h = np.zeros((3, 3, 3, 4))
        for a, value in enumerate((1.0, 2.0, 3.0)):
            h[a, a] = value * H
        profile = HUmbilicalProfile.from_scalars([1.0, 0.0, 0.0], [2.0, 0.0, 0.0], 3, e1=frame[0])
        report = eigencheck_AH(SffTensor(h=h, basis="frame"), frame, H, profile)
        assert report.residual > 1e-5

    def test_minimal_report(self, line_extensor):
        analysis = analysis_at(line_extensor, [0.5, 0.1, 0.2])
        report = eigencheck_AH(analysis.sff, analysis.frame, analysis.H, analysis.profile)
        assert report.minimal


class TestCubicSymmetry:

    @pytest.mark.parametrize("fixture", ["pseudo_sphere", "circle_extensor", "twisted_extensor", "line_extensor"])
    def test_lagrangian_families(self, fixture, request):
        L = request.getfixturevalue(fixture)
        point = L.chart.center + 0.1
        analysis = analysis_at(L, point)
        assert cubic_symmetry_check(analysis.sff, analysis.frame) <= 1e-5

    def test_residual_of_a_totally_real_breaking_form(self):
        frame = real_frame(2)
        h = np.zeros((2, 2, 2, 4))
        h[0, 1] = h[1, 0] = apply_structure(StructureTag.J, frame[0])
        assert cubic_symmetry_check(SffTensor(h=h, basis="frame"), frame) == pytest.approx(1.0)


class TestCurvatureBranch:

    @pytest.mark.parametrize("lambdas, mus, branch", [
        ([1.0, 0.0, 0.0], [0.5, 0.0, 0.0], "constant_curvature"),
        ([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], "non_constant_curvature"),
        ([0.0, 0.0, 0.0], [0.0, 0.0, 0.0], "minimal"),
        ([1.0, 0.0, 0.0], [0.0, 0.0, 0.0], "flat"),
        ([0.0, 2.0, 0.0], [0.0, 1.0, 0.0], "constant_curvature"),
    ])
    def test_branches(self, lambdas, mus, branch):
        assert curvature_branch(HUmbilicalProfile.from_scalars(lambdas, mus, 3)) == branch


class TestCodazziScalars:

    def test_pseudo_sphere(self, pseudo_sphere):
        scalars = codazzi_scalar_check(pseudo_sphere, [-0.5, 0.0, 0.5])
        assert len(scalars) == 3
        for item in scalars:
            assert item.max_residual() <= 1e-4
            # f = <F, F'>/|F|² = -b·tan(bs)
            assert item.f == pytest.approx(-0.5 * np.tan(0.5 * item.s), abs=1e-4)
            # λ_J - 2μ_J and Σμ(λ - 2μ) vanish, so neither alternative estimate exists.
            assert item.f_slot is None
            assert item.f_bar is None

    def test_twisted_extensor(self, twisted_extensor):
        for item in codazzi_scalar_check(twisted_extensor, [-0.4, 0.0, 0.4]):
            assert item.max_residual() <= 1e-3

    def test_needs_spherical_extensor(self):
        L = build_extensor(circle_curve("j"), line_immersion((0.0, 0.0), (1.0, 0.0), interval=(0.5, 1.5)))
        with pytest.raises(ValueError):
            codazzi_scalar_check(L, [0.0])

    def test_totally_real_residual_of_direct_jet(self, circle_extensor):
        assert totally_real_residual(jet(circle_extensor, [0.1, 0.2, 0.3])) <= 1e-6
