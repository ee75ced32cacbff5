"""Tests for the Randers metric evaluators."""

import numpy as np
import pytest

from randersiso.metric import (
    MetricDataError,
    MetricDomainError,
    OneForm,
    RandersPlane,
    TangentSample,
    from_exact_one_form,
    fundamental_tensor,
    indicatrix_radius,
    randers_norm,
    tensor_determinant,
)


def det_oracle(plane, x, y):
    # closed form det(g) = (F / |y|)**(n+1) for Randers with Euclidean alpha
    y = np.asarray(y, dtype=float)
    alpha = np.hypot(y[..., 0], y[..., 1])
    return (randers_norm(plane, x, y) / alpha) ** 3


def random_samples(rng, count, plane=None):
    x = rng.uniform(-3.0, 3.0, size=(count, 2))
    if plane is not None and plane.one_form.kind == "polar":
        x += 5.0  # stay away from the origin
    phi = rng.uniform(0.0, 2.0 * np.pi, size=count)
    mag = rng.uniform(0.1, 10.0, size=count)
    y = mag[:, None] * np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    return x, y


class TestNorm:
    def test_euclidean_oracle(self):
        plane = RandersPlane.euclidean_oracle()
        assert randers_norm(plane, [0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)

    def test_constant_angle_forward_backward(self):
        plane = RandersPlane(OneForm.constant(0.5, 0.0))
        assert randers_norm(plane, [1.0, 2.0], [1.0, 0.0]) == pytest.approx(1.5)
        assert randers_norm(plane, [1.0, 2.0], [-1.0, 0.0]) == pytest.approx(0.5)

    def test_positive_homogeneity(self):
        rng = np.random.default_rng(11)
        plane = RandersPlane(OneForm.polar(0.6, 0.3))
        x, y = random_samples(rng, 200, plane)
        for k in (0.125, 3.0, 17.5):
            np.testing.assert_allclose(
                randers_norm(plane, x, k * y),
                k * randers_norm(plane, x, y),
                rtol=1e-12)

    def test_positivity(self):
        rng = np.random.default_rng(12)
        for b in (0.2, 0.5, 0.9):
            plane = RandersPlane(OneForm.constant(b, 1.1))
            x, y = random_samples(rng, 500)
            assert np.all(randers_norm(plane, x, y) > 0.0)

    def test_zero_vector_rejected(self):
        plane = RandersPlane(OneForm.constant(0.5))
        with pytest.raises(MetricDomainError):
            randers_norm(plane, [0.0, 0.0], [0.0, 0.0])

    def test_polar_origin_rejected(self):
        plane = RandersPlane(OneForm.polar(0.5))
        with pytest.raises(MetricDomainError):
            randers_norm(plane, [0.0, 0.0], [1.0, 0.0])

    def test_expression_form(self):
        plane = RandersPlane(OneForm.expression(0.5, "atan2(x2,x1)"))
        polar = RandersPlane(OneForm.polar(0.5, 0.0))
        rng = np.random.default_rng(13)
        x, y = random_samples(rng, 50, polar)
        np.testing.assert_allclose(
            randers_norm(plane, x, y), randers_norm(polar, x, y), rtol=1e-14)


class TestFundamentalTensor:
    def test_euclidean_limit_identity(self):
        plane = RandersPlane.euclidean_oracle()
        g = fundamental_tensor(plane, [0.0, 0.0], [1.0, 0.0])
        np.testing.assert_allclose(g, np.eye(2), atol=1e-9)

    def test_determinant_example(self):
        plane = RandersPlane(OneForm.constant(0.5, 0.0))
        det = tensor_determinant(plane, [0.0, 0.0], [1.0, 0.0])
        assert det == pytest.approx(1.5**3, rel=1e-6)

    def test_determinant_matches_closed_form(self):
        rng = np.random.default_rng(21)
        for one_form in (OneForm.constant(0.3, 0.7), OneForm.polar(0.8, 0.0)):
            plane = RandersPlane(one_form)
            x, y = random_samples(rng, 100, plane)
            np.testing.assert_allclose(
                tensor_determinant(plane, x, y), det_oracle(plane, x, y), rtol=1e-6)

    def test_euler_identity(self):
        # homogeneity implies y^T g(x, y) y = F(x, y)**2
        rng = np.random.default_rng(22)
        plane = RandersPlane(OneForm.constant(0.6, 0.4))
        x, y = random_samples(rng, 100)
        g = fundamental_tensor(plane, x, y)
        quad = np.einsum("...i,...ij,...j->...", y, g, y)
        np.testing.assert_allclose(quad, randers_norm(plane, x, y) ** 2, rtol=1e-8)

    def test_symmetric_positive_definite(self):
        rng = np.random.default_rng(23)
        plane = RandersPlane(OneForm.polar(0.9, 1.0))
        x, y = random_samples(rng, 50, plane)
        g = fundamental_tensor(plane, x, y)
        np.testing.assert_allclose(g[..., 0, 1], g[..., 1, 0], atol=1e-12)
        eigs = np.linalg.eigvalsh(g)
        assert np.all(eigs > 0.0)

    def test_gy_nonzero(self):
        plane = RandersPlane(OneForm.constant(0.5, 0.2))
        g = fundamental_tensor(plane, [1.0, 1.0], [0.0, 2.0])
        assert np.linalg.norm(g @ [0.0, 2.0]) > 0.0


class TestIndicatrix:
    def test_along_and_against_the_form(self):
        plane = RandersPlane(OneForm.constant(0.5, 0.0))
        x = [2.0, -1.0]
        assert indicatrix_radius(plane, x, 0.0) == pytest.approx(1.0 / 1.5)
        assert indicatrix_radius(plane, x, np.pi) == pytest.approx(2.0)

    def test_euclidean_unit_circle(self):
        plane = RandersPlane.euclidean_oracle()
        psi = np.linspace(0.0, 2.0 * np.pi, 32)
        np.testing.assert_allclose(indicatrix_radius(plane, [0.0, 0.0], psi), 1.0)

    def test_radius_satisfies_unit_norm(self):
        rng = np.random.default_rng(31)
        plane = RandersPlane(OneForm.polar(0.7, 0.5))
        x = rng.uniform(1.0, 3.0, size=(40, 2))
        psi = rng.uniform(0.0, 2.0 * np.pi, size=40)
        rho = indicatrix_radius(plane, x, psi)
        y = rho[:, None] * np.stack([np.cos(psi), np.sin(psi)], axis=-1)
        np.testing.assert_allclose(randers_norm(plane, x, y), 1.0, atol=1e-10)


class TestOneFormConstruction:
    def test_amplitude_bounds(self):
        for bad in (0.0, 1.0, 1.5, -0.2):
            with pytest.raises(MetricDataError):
                OneForm.constant(bad)

    def test_euclidean_oracle_is_flat(self):
        form = OneForm.euclidean_oracle()
        assert form.b == 0.0

    def test_from_exact_one_form(self):
        form = from_exact_one_form(0.3, 0.4)
        assert form.b == pytest.approx(0.5)
        assert form.angle == pytest.approx(0.9272952180016122)

    def test_from_exact_one_form_axis(self):
        form = from_exact_one_form(0.5, 0.0)
        assert form.b == pytest.approx(0.5)
        assert form.angle == pytest.approx(0.0)

    def test_from_exact_one_form_recovers_covector(self):
        form = from_exact_one_form(0.3, 0.4)
        cov = form.covector(np.zeros(2))
        np.testing.assert_allclose(cov, [0.3, 0.4], atol=1e-15)

    def test_from_exact_one_form_rejects_large(self):
        with pytest.raises(MetricDataError):
            from_exact_one_form(1.0, 1.0)
        with pytest.raises(MetricDataError):
            from_exact_one_form(0.0, 0.0)

    def test_tangent_sample_validation(self):
        TangentSample(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        with pytest.raises(MetricDomainError):
            TangentSample(np.array([1.0, 0.0]), np.array([0.0, 0.0]))
