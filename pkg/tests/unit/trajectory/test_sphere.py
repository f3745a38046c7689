"""
Tests for the SRVF sphere geometry

LOCATION: tests/unit/trajectory/test_sphere.py
"""
import numpy as np
import pytest

from morph4d.errors import AntipodalPointError, ConvergenceError, ShapeMismatchError, ValidationError
from morph4d.trajectory import (
    SphereConfig,
    Srvf,
    TangentVector,
    exp_map,
    geodesic_distance,
    geodesic_interpolate,
    inner_product,
    karcher_mean,
    log_map,
    srvf_norm,
)

M, DIM, DT = 9, 12, 1.0 / 9


def random_point(rng, scale: float = 1.0) -> Srvf:
    samples = rng.normal(size=(M, DIM))
    return Srvf(samples / np.sqrt(np.sum(samples ** 2) * DT), DT, scale=scale)


def random_tangent(rng, p: Srvf, length: float) -> TangentVector:
    w = rng.normal(size=p.samples.shape)
    w = w - np.sum(w * p.samples) * DT * p.samples
    return TangentVector(w * length / np.sqrt(np.sum(w ** 2) * DT), p)


class TestInnerProduct:
    def test_weighted_by_spacing(self):
        a = Srvf(np.ones((2, 3)), 0.5)
        assert inner_product(a, a) == pytest.approx(3.0)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            inner_product(random_point(rng), Srvf(np.ones((2, 3)), DT))


class TestDistance:
    def test_self_distance_zero(self, rng):
        q = random_point(rng)
        assert geodesic_distance(q, q) == pytest.approx(0.0, abs=1e-7)

    def test_antipodal_distance_pi(self, rng):
        q = random_point(rng)
        assert geodesic_distance(q, Srvf(-q.samples, DT)) == pytest.approx(np.pi, abs=1e-7)

    def test_symmetric(self, rng):
        a, b = random_point(rng), random_point(rng)
        assert geodesic_distance(a, b) == pytest.approx(geodesic_distance(b, a), abs=1e-12)


class TestExpLog:
    def test_log_then_exp_recovers_point(self, rng):
        for _ in range(1000):
            p, q = random_point(rng), random_point(rng)
            back = exp_map(p, log_map(p, q))
            assert np.max(np.abs(back.samples - q.samples)) < 1e-9

    def test_exp_then_log_recovers_tangent(self, rng):
        for _ in range(200):
            p = random_point(rng)
            v = random_tangent(rng, p, rng.uniform(0.05, 3.0))
            back = log_map(p, exp_map(p, v))
            assert np.max(np.abs(back.samples - v.samples)) < 1e-9

    def test_exp_stays_on_sphere(self, rng):
        p = random_point(rng)
        for length in (1e-6, 0.3, 2.5, 6.0):
            assert srvf_norm(exp_map(p, random_tangent(rng, p, length))) == pytest.approx(1.0, abs=1e-9)

    def test_log_length_is_distance(self, rng):
        p, q = random_point(rng), random_point(rng)
        assert log_map(p, q).norm() == pytest.approx(geodesic_distance(p, q), abs=1e-12)

    def test_zero_tangent_returns_base(self, rng):
        p = random_point(rng)
        assert exp_map(p, TangentVector(np.zeros_like(p.samples), p)) is p

    def test_log_of_base_is_zero(self, rng):
        p = random_point(rng)
        assert not log_map(p, p).samples.any()

    def test_log_antipodal_raises(self, rng):
        p = random_point(rng)
        with pytest.raises(AntipodalPointError, match="antipodal point"):
            log_map(p, Srvf(-p.samples, DT))


class TestGeodesicInterpolate:
    def test_endpoints_exact(self, rng):
        a, b = random_point(rng), random_point(rng)
        np.testing.assert_array_equal(geodesic_interpolate(a, b, 0.0).samples, a.samples)
        np.testing.assert_array_equal(geodesic_interpolate(a, b, 1.0).samples, b.samples)

    def test_isometry_and_unit_norm(self, rng):
        for _ in range(1000):
            a, b = random_point(rng), random_point(rng)
            t1, t2 = rng.uniform(size=2)
            theta = geodesic_distance(a, b)
            p1, p2 = geodesic_interpolate(a, b, t1), geodesic_interpolate(a, b, t2)
            assert abs(geodesic_distance(p1, p2) - abs(t1 - t2) * theta) < 1e-9
            assert abs(srvf_norm(p1) - 1.0) < 1e-9

    def test_scale_interpolated_linearly(self, rng):
        a, b = random_point(rng, scale=1.0), random_point(rng, scale=3.0)
        assert geodesic_interpolate(a, b, 0.5).scale == pytest.approx(2.0)

    def test_coincident_points(self, rng):
        a = random_point(rng)
        np.testing.assert_array_equal(geodesic_interpolate(a, a, 0.4).samples, a.samples)

    def test_tau_out_of_range(self, rng):
        a, b = random_point(rng), random_point(rng)
        with pytest.raises(ValidationError):
            geodesic_interpolate(a, b, 1.5)

    def test_antipodal_raises(self, rng):
        a = random_point(rng)
        with pytest.raises(AntipodalPointError):
            geodesic_interpolate(a, Srvf(-a.samples, DT), 0.5)


class TestKarcherMean:
    def test_single_point(self, rng):
        q = random_point(rng)
        assert karcher_mean([q]) is q

    def test_identical_points(self, rng):
        q = random_point(rng)
        np.testing.assert_allclose(karcher_mean([q, q, q]).samples, q.samples, atol=1e-12)

    def test_two_points_give_geodesic_midpoint(self, rng):
        a, b = random_point(rng), random_point(rng)
        mid = geodesic_interpolate(a, b, 0.5)
        assert geodesic_distance(karcher_mean([a, b]), mid) < 1e-8

    def test_symmetric_cloud_around_center(self, rng):
        p = random_point(rng)
        vs = [random_tangent(rng, p, 0.4) for _ in range(4)]
        qs = [exp_map(p, v) for v in vs] + [exp_map(p, -1.0 * v) for v in vs]
        assert geodesic_distance(karcher_mean(qs), p) < 1e-7

    def test_result_on_sphere_with_mean_scale(self, rng):
        qs = [random_point(rng, scale=s) for s in (1.0, 2.0, 3.0)]
        mean = karcher_mean(qs)
        assert srvf_norm(mean) == pytest.approx(1.0, abs=1e-9)
        assert mean.scale == pytest.approx(2.0)

    def test_iteration_limit_reports_last_iterate(self, rng):
        qs = [random_point(rng) for _ in range(3)]
        with pytest.raises(ConvergenceError) as info:
            karcher_mean(qs, tol=1e-14, max_iter=1)
        assert isinstance(info.value.last_iterate, Srvf)
        assert info.value.residual > 1e-14

    def test_empty_raises(self):
        with pytest.raises(ValidationError):
            karcher_mean([])


class TestSphereConfig:
    def test_rejects_non_unit_reference(self):
        with pytest.raises(ValidationError):
            SphereConfig(Srvf(np.ones((M, DIM)), DT))

    def test_log_exp_at_reference(self, rng):
        config = SphereConfig.from_motions([random_point(rng) for _ in range(4)])
        q = random_point(rng)
        np.testing.assert_allclose(config.exp(config.log(q)).samples, q.samples, atol=1e-9)
