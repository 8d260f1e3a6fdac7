import numpy as np
import pytest

from rigidity_lab.symspace import (
    SpdCurve,
    SpdPoint,
    arclength_reparam,
    circle_mean,
    curve_length,
    spd_inner,
)
from conftest import random_well_conditioned


def rotation(a):
    return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])


def rotation_orbit(samples=181, diag=(2.0, 1.0)):
    thetas = np.linspace(0.0, np.pi, samples)
    mats = [rotation(a) @ np.diag(diag) @ rotation(a).T for a in thetas]
    return SpdCurve.from_matrices(thetas, mats, closed=True)


def random_spd(rng, n, shift=3.0):
    a = rng.standard_normal((n, n))
    return a @ a.T + shift * np.eye(n)


def random_spd_curve(rng, n, samples=200):
    base = random_spd(rng, n)
    d1 = rng.standard_normal((n, n))
    d1 = (d1 + d1.T) / 2.0
    d2 = rng.standard_normal((n, n))
    d2 = (d2 + d2.T) / 2.0
    ts = np.linspace(0.0, 1.0, samples)
    mats = [base + np.sin(t) * d1 + 0.3 * t * t * d2 for t in ts]
    return SpdCurve.from_matrices(ts, mats)


class TestSpdInner:
    def test_one_dimensional_metric(self):
        # at the point x the squared speed of a tangent h is h^2 / x^2
        assert spd_inner(np.array([[2.0]]), np.array([[3.0]]), np.array([[3.0]])) == 2.25

    def test_trace_at_identity(self):
        assert spd_inner(np.eye(3), np.eye(3), np.eye(3)) == pytest.approx(3.0)

    def test_congruence_invariance(self, rng):
        for _ in range(10):
            b = random_spd(rng, 3)
            x = rng.standard_normal((3, 3))
            x = (x + x.T) / 2.0
            y = rng.standard_normal((3, 3))
            y = (y + y.T) / 2.0
            m = random_well_conditioned(rng, 3)
            lhs = spd_inner(m.T @ b @ m, m.T @ x @ m, m.T @ y @ m)
            rhs = spd_inner(b, x, y)
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_positive_definite(self, rng):
        b = random_spd(rng, 3)
        for _ in range(100):
            x = rng.standard_normal((3, 3))
            x = (x + x.T) / 2.0
            if np.max(np.abs(x)) == 0.0:
                continue
            assert spd_inner(b, x, x) > 0.0

    def test_rejects_asymmetric_tangent(self):
        with pytest.raises(ValueError, match="symmetric"):
            spd_inner(np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))

    def test_rejects_non_spd_point(self):
        with pytest.raises(ValueError):
            SpdPoint(np.diag([1.0, -1.0]))


class TestCurveLength:
    def test_constant_curve(self):
        ts = np.linspace(0.0, 1.0, 20)
        c = SpdCurve.from_matrices(ts, [np.eye(2)] * 20)
        assert curve_length(c) == 0.0

    def test_exponential_has_unit_speed(self):
        ts = np.linspace(0.0, 1.0, 201)
        c = SpdCurve.from_matrices(ts, [np.array([[np.exp(t)]]) for t in ts])
        assert curve_length(c) == pytest.approx(1.0, abs=1e-4)

    def test_pushforward_invariance(self, rng):
        c = random_spd_curve(rng, 2)
        m = random_well_conditioned(rng, 2)
        assert curve_length(c.pushforward(m)) == pytest.approx(curve_length(c), abs=1e-6)

    def test_grid_refinement_stability(self):
        def curve(samples):
            ts = np.linspace(0.0, 1.0, samples)
            return SpdCurve.from_matrices(
                ts, [np.diag([np.exp(t), 1.0 + t * t]) for t in ts]
            )

        coarse = curve_length(curve(100))
        fine = curve_length(curve(200))
        assert abs(fine - coarse) < 0.01 * abs(fine)

    def test_too_few_samples(self):
        c = SpdCurve.from_matrices([0.0], [np.eye(2)])
        with pytest.raises(ValueError):
            curve_length(c)


class TestArclengthReparam:
    def test_already_arclength_fixed_point(self):
        ts = np.linspace(0.0, 1.0, 201)
        c = SpdCurve.from_matrices(ts, [np.array([[np.exp(t)]]) for t in ts])
        r = arclength_reparam(c, 201)
        for j in range(0, 201, 25):
            assert r.points[j].matrix[0, 0] == pytest.approx(
                c.points[j].matrix[0, 0], rel=1e-3
            )

    def test_quadratic_exponent_closed_form(self):
        # the curve e^{t^2} has arc length s(t) = t^2 under dx^2/x^2
        ts = np.linspace(0.0, 1.0, 401)
        c = SpdCurve.from_matrices(ts, [np.array([[np.exp(t * t)]]) for t in ts])
        r = arclength_reparam(c, 101)
        for j in range(101):
            assert r.points[j].matrix[0, 0] == pytest.approx(
                np.exp(r.params[j]), abs=5e-3
            )

    def test_speed_constant_after_reparam(self, rng):
        c = random_spd_curve(rng, 2)
        r = arclength_reparam(c, 200)
        from rigidity_lab.symspace import _speeds

        speeds = _speeds(r)[1:-1]  # endpoints use one-sided differences
        assert np.max(speeds) - np.min(speeds) < 0.02 * np.mean(speeds)

    def test_total_length_preserved(self, rng):
        c = random_spd_curve(rng, 2)
        r = arclength_reparam(c, 300)
        assert curve_length(r) == pytest.approx(curve_length(c), rel=1e-3)

    def test_zero_length_rejected(self):
        ts = np.linspace(0.0, 1.0, 5)
        c = SpdCurve.from_matrices(ts, [np.eye(2)] * 5)
        with pytest.raises(ValueError, match="zero length"):
            arclength_reparam(c, 10)


class TestCircleMean:
    def test_constant_closed_curve(self):
        ts = np.linspace(0.0, 1.0, 10)
        b = np.diag([2.0, 5.0])
        c = SpdCurve.from_matrices(ts, [b] * 10, closed=True)
        assert np.allclose(circle_mean(c).matrix, b, atol=1e-14)

    def test_rotation_orbit_mean_is_isotropic(self):
        m = circle_mean(rotation_orbit()).matrix
        assert np.allclose(m, 1.5 * np.eye(2), atol=1e-6)

    def test_pushforward_equivariance(self, rng):
        orbit = rotation_orbit()
        m = random_well_conditioned(rng, 2)
        lhs = circle_mean(orbit.pushforward(m)).matrix
        rhs = m.T @ circle_mean(orbit).matrix @ m
        assert np.max(np.abs(lhs - rhs)) < 1e-6

    def test_start_point_independence(self):
        orbit = rotation_orbit()
        mats = [p.matrix for p in orbit.points]
        k = 97
        rotated = mats[k:-1] + mats[:k] + [mats[k]]
        orbit2 = SpdCurve.from_matrices(orbit.params, rotated, closed=True)
        assert np.max(np.abs(circle_mean(orbit2).matrix - circle_mean(orbit).matrix)) < 1e-8

    def test_open_curve_rejected(self):
        ts = np.linspace(0.0, 1.0, 10)
        c = SpdCurve.from_matrices(ts, [np.eye(2)] * 10, closed=False)
        with pytest.raises(ValueError, match="closed"):
            circle_mean(c)


class TestSpdCurveValidation:
    def test_requires_increasing_params(self):
        with pytest.raises(ValueError, match="increasing"):
            SpdCurve.from_matrices([0.0, 0.0], [np.eye(2), np.eye(2)])

    def test_closed_requires_matching_endpoints(self):
        with pytest.raises(ValueError, match="closed"):
            SpdCurve.from_matrices(
                [0.0, 1.0], [np.eye(2), 2.0 * np.eye(2)], closed=True
            )
