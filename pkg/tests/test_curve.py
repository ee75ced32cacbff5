"""Tests for Fourier closed curves, Randers length, weighted area."""

import io

import numpy as np
import pytest

from randersiso.curve import (
    ClosedCurve,
    CurveError,
    circle,
    dumps_curve,
    ellipse,
    enclosed_area,
    euclidean_length,
    fourier_fit,
    is_simple,
    loads_curve,
    randers_length,
    signed_area,
)
from randersiso.measure import VolumeKind, sigma_closed
from randersiso.metric import MetricDomainError, OneForm, RandersPlane


def figure_eight():
    return ClosedCurve(np.zeros(2), [[0.0, 0.0], [0.0, 0.0]], [[0.0, 1.0], [1.0, 0.0]])


def shoelace(points):
    x, y = points[:, 0], points[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


class TestConstruction:
    def test_circle_samples_on_radius(self):
        s = circle(1.0).samples(256)
        np.testing.assert_allclose(np.hypot(s.x[:, 0], s.x[:, 1]), 1.0, atol=1e-14)

    def test_circle_rejects_nonpositive_radius(self):
        with pytest.raises(CurveError):
            circle(0.0)

    def test_orientation_normalized(self):
        # clockwise circle: sin coefficients get flipped at construction
        clockwise = ClosedCurve(np.zeros(2), [[1.0], [0.0]], [[0.0], [-1.0]])
        assert signed_area(clockwise) > 0.0

    def test_irregular_curve_rejected(self):
        # x(t) = (cos t + cos 2t /2, sin t + sin 2t / 2) has a cusp
        with pytest.raises(CurveError):
            ClosedCurve(np.zeros(2), [[1.0, 0.5], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.5]])

    def test_velocity_is_termwise_derivative(self):
        c = ellipse(2.0, 1.0)
        t = np.linspace(0.0, 2.0 * np.pi, 17)
        h = 1e-7
        fd = (c.point(t + h) - c.point(t - h)) / (2.0 * h)
        np.testing.assert_allclose(c.velocity(t), fd, atol=1e-6)

    def test_coefficient_roundtrip(self):
        c = ClosedCurve([0.3, -0.1], [[1.0, 0.1], [0.05, 0.0]], [[0.0, -0.2], [1.1, 0.0]])
        again = ClosedCurve.from_coefficients(c.to_coefficients())
        np.testing.assert_allclose(again.to_coefficients(), c.to_coefficients())


class TestEuclideanMeasures:
    def test_circle_length(self):
        plane = RandersPlane.euclidean_oracle()
        assert randers_length(plane, circle(2.0)) == pytest.approx(4.0 * np.pi, rel=1e-12)

    def test_circle_area(self):
        for a in (0.5, 1.0, 2.0):
            assert signed_area(circle(a)) == pytest.approx(np.pi * a * a, rel=1e-12)

    def test_green_matches_shoelace(self):
        # Green quadrature at n=4096 vs the shoelace area of a dense sample
        # polygon (the polygon is inscribed, so it needs far more vertices
        # to resolve the area to 1e-8)
        c = ClosedCurve([0.0, 0.0], [[2.0, 0.3], [0.0, -0.2]], [[0.0, 0.1], [1.0, 0.25]])
        poly = shoelace(c.samples(400000).x)
        assert signed_area(c, 4096) == pytest.approx(poly, rel=1e-8)

    def test_ellipse_length_oracle(self):
        # scipy-free oracle: dense polygon arc length
        c = ellipse(2.0, 1.0)
        pts = c.samples(200000).x
        poly_len = np.sum(np.hypot(*np.diff(np.vstack([pts, pts[:1]]), axis=0).T))
        assert euclidean_length(c) == pytest.approx(poly_len, rel=1e-8)


class TestRandersLength:
    def test_constant_angle_is_euclidean(self):
        # exact one-forms integrate to zero over closed curves
        plane = RandersPlane(OneForm.constant(0.7, 1.234))
        for a in (0.5, 1.0, 2.0):
            assert randers_length(plane, circle(a)) == pytest.approx(
                2.0 * np.pi * a, abs=1e-10)

    def test_polar_form_quarter_turn(self):
        plane = RandersPlane(OneForm.polar(0.5, np.pi / 2.0))
        assert randers_length(plane, circle(1.0)) == pytest.approx(3.0 * np.pi, abs=1e-10)

    def test_polar_form_aligned(self):
        plane = RandersPlane(OneForm.polar(0.5, 0.0))
        assert randers_length(plane, circle(1.0)) == pytest.approx(2.0 * np.pi, abs=1e-10)

    def test_parametrization_invariance(self):
        plane = RandersPlane(OneForm.polar(0.4, 0.8))
        c = ClosedCurve([2.5, 0.0], [[0.8, 0.05], [0.0, 0.02]], [[0.0, 0.0], [0.7, -0.03]])
        base = randers_length(plane, c)
        for s in (0.3, 1.0, 4.5):
            assert randers_length(plane, c.phase_shifted(s)) == pytest.approx(
                base, abs=1e-10)

    def test_length_bounds(self):
        plane = RandersPlane(OneForm.polar(0.6, 0.9))
        c = ellipse(3.0, 2.0).translated([7.0, 0.0])
        euc = euclidean_length(c)
        val = randers_length(plane, c)
        assert (1.0 - 0.6) * euc <= val <= (1.0 + 0.6) * euc

    def test_origin_clearance_enforced(self):
        plane = RandersPlane(OneForm.polar(0.5, 0.0))
        through_origin = circle(1.0).translated([1.0, 0.0])
        with pytest.raises(MetricDomainError):
            randers_length(plane, through_origin)


class TestEnclosedArea:
    def test_ht_is_euclidean(self):
        assert enclosed_area(circle(1.0), VolumeKind.HT, 0.9) == pytest.approx(
            np.pi, abs=1e-10)

    def test_bh_scaling(self):
        assert enclosed_area(circle(1.0), VolumeKind.BH, 0.5) == pytest.approx(
            0.75**1.5 * np.pi, abs=1e-10)

    def test_max_scaling(self):
        assert enclosed_area(circle(1.0), VolumeKind.MAX, 0.5) == pytest.approx(
            3.375 * np.pi, abs=1e-10)

    def test_kind_ratio_is_exact(self):
        c = ClosedCurve([0.0, 1.0], [[1.5, 0.2], [0.0, 0.0]], [[0.0, 0.0], [1.2, 0.1]])
        b = 0.35
        ht = enclosed_area(c, VolumeKind.HT, b)
        for kind in VolumeKind:
            assert enclosed_area(c, kind, b) / ht == sigma_closed(kind, b)

    def test_non_simple_rejected(self):
        with pytest.raises(CurveError):
            enclosed_area(figure_eight(), VolumeKind.HT, 0.5)

    def test_non_simple_still_measurable_in_length(self):
        plane = RandersPlane(OneForm.constant(0.5, 0.0))
        assert randers_length(plane, figure_eight()) > 0.0


class TestIsSimple:
    def test_circle(self):
        assert is_simple(circle(1.0))

    def test_ellipse(self):
        assert is_simple(ellipse(2.0, 1.0))

    def test_figure_eight(self):
        assert not is_simple(figure_eight())

    def test_limacon_with_loop(self):
        # r = 1 + 2 cos t has an inner loop: not simple
        def fn(t):
            r = 1.0 + 2.0 * np.cos(t)
            return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

        assert not is_simple(fourier_fit(fn, degree=3))

    def test_wobbly_but_simple(self):
        def fn(t):
            r = 1.0 + 0.2 * np.cos(5.0 * t)
            return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

        assert is_simple(fourier_fit(fn, degree=6))


class TestInterchangeFormat:
    def test_roundtrip_exact(self):
        c = ClosedCurve([0.125, -3.0], [[1.0, 1e-13], [0.2, 0.0]],
                        [[0.0, 0.4], [1.3, -0.7]])
        again = loads_curve(dumps_curve(c))
        np.testing.assert_array_equal(again.to_coefficients(), c.to_coefficients())

    def test_header_and_layout(self):
        text = dumps_curve(circle(1.0))
        lines = text.strip().splitlines()
        assert lines[0] == "1"
        assert len(lines) == 1 + 6

    def test_malformed_record(self):
        with pytest.raises(CurveError):
            loads_curve("2\n1.0\n")
        with pytest.raises(CurveError):
            loads_curve("")

    def test_fourier_fit_recovers_trig_polynomial(self):
        c = ClosedCurve([0.1, 0.2], [[1.0, 0.0, 0.1], [0.0, 0.0, 0.0]],
                        [[0.0, 0.05, 0.0], [1.0, 0.0, 0.02]])
        fitted = fourier_fit(lambda t: c.point(t), degree=3, n=64)
        np.testing.assert_allclose(fitted.to_coefficients(), c.to_coefficients(),
                                   atol=1e-14)
