import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crlab.quadric import (Infeasible, NoWitnessBelowThreshold, QuadricPoint, chart_jacobians,
                           degenerate_witness, ellipse_distance, g_min, jacobian_criterion, level,
                           lift_from_v, quadric_residual, read_points_csv, sample_level,
                           sample_level_array, w_to_z, write_points_csv, x_interval, z_to_w)


@pytest.mark.parametrize("t", [1.0, 1.0000001, 1.05, 1.5, 3.0])
def test_samples_lie_on_level_set(t):
    W = sample_level_array(t, 2000, seed=3)
    assert quadric_residual(W).max() <= 1e-12
    assert np.abs(level(W) - t).max() <= 1e-12 * t


def test_sphere_samples_are_real_points():
    W = sample_level_array(1.0, 500, seed=1)
    np.testing.assert_allclose(W[:, 1], np.conj(W[:, 0]), atol=1e-15)
    np.testing.assert_allclose(W[:, 3], np.conj(W[:, 2]), atol=1e-15)


def test_boundary_strata_sampled():
    W = sample_level_array(1.2, 4000, seed=5, boundary_prob=0.1)
    assert np.sum(W[:, 0] == 0) > 100 and np.sum(W[:, 2] == 0) > 100
    assert quadric_residual(W).max() <= 1e-12


def test_sampling_is_seeded():
    a = sample_level_array(1.3, 100, seed=9, y_root="random")
    b = sample_level_array(1.3, 100, seed=9, y_root="random")
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_level_array(1.3, 100, seed=10))


def test_below_one_is_infeasible():
    with pytest.raises(Infeasible):
        sample_level_array(0.99, 10, seed=0)


def test_level_of_quadric_points_is_at_least_one(rng):
    w1, w3, w4 = rng.normal(size=(3, 500)) + 1j * rng.normal(size=(3, 500))
    W = np.stack([w1, (1 - w3 * w4) / w1, w3, w4], axis=-1)
    assert level(W).min() >= 1 - 1e-12


def test_coordinate_change_round_trip(rng):
    z = rng.normal(size=(20, 4)) + 1j * rng.normal(size=(20, 4))
    np.testing.assert_allclose(w_to_z(z_to_w(z)), z, atol=1e-14)
    # sum z_j^2 = w1 w2 + w3 w4
    w = z_to_w(z)
    np.testing.assert_allclose(np.sum(z * z, axis=1), w[:, 0] * w[:, 1] + w[:, 2] * w[:, 3],
                               atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100))
def test_g_min(p):
    val, arg = g_min(p)
    xs = np.linspace(arg / 3, arg * 3, 2001)
    assert val <= np.min(xs + p / xs) + 1e-12
    assert abs(arg + p / arg - val) <= 1e-12 * val


def test_g_min_rejects_nonpositive():
    with pytest.raises(ValueError):
        g_min(0.0)


def test_lift_from_v():
    v, t = 0.3 + 0.2j, 1.4
    lo, hi = x_interval(v, t)
    for x in np.linspace(lo, hi, 7)[1:-1]:
        for root in ("larger", "smaller"):
            p = lift_from_v(v, t, x, 0.4, -1.1, root=root)
            assert p.on_quadric()
            assert abs(p.level - t) <= 1e-12
            assert abs(p.v - v) <= 1e-14
            assert abs(abs(p.w1) ** 2 - x) <= 1e-12


def test_lift_outside_ellipse():
    with pytest.raises(Infeasible):
        lift_from_v(2.0 + 0j, 1.2, 1.0)


def test_quadric_point_helpers():
    p = QuadricPoint(1 + 0j, 0.5 + 0j, 1 + 0j, 0.5 + 0j)
    assert p.quadric_residual == 0 and p.on_quadric()
    assert p.level == pytest.approx((1 + 0.25 + 1 + 0.25) / 2)
    assert QuadricPoint.from_array(p.w) == p


def brute_distance(c, t, n=1201):
    A, B = t / 2, math.sqrt(t * t - 1) / 2
    xs = np.linspace(0.5 - A, 0.5 + A, n)
    ys = np.linspace(-B, B, n)
    X, Y = np.meshgrid(xs, ys)
    V = X + 1j * Y
    inside = np.abs(V) + np.abs(1 - V) <= t
    return np.abs(V[inside] - c).min(), max(xs[1] - xs[0], ys[1] - ys[0])


@pytest.mark.parametrize("c,t", [(0.5 + 0.2887j, 1.05), (0.5 + 1.0j, 1.5), (2 + 1j, 1.3),
                                 (-1 - 0.5j, 2.0), (0.5 + 0.1j, 1.5)])
def test_ellipse_distance_against_grid(c, t):
    d = ellipse_distance(c, t)
    ref, h = brute_distance(c, t)
    assert d <= ref + 1e-12
    assert ref - d <= h


def test_ellipse_distance_zero_inside():
    assert ellipse_distance(0.5 + 0j, 1.1) == 0.0


def test_criterion_chart_relation(maps):
    m = maps[2]
    for p in sample_level(1.3, 50, seed=2, boundary_prob=0.0):
        crit = complex(jacobian_criterion(m.P, p))
        j1, j2 = chart_jacobians(m.P, p)
        assert abs(p.w1 * j1 + crit) <= 1e-10 * max(1, abs(crit))
        assert abs(p.w3 * j2 + crit) <= 1e-10 * max(1, abs(crit))


def test_chart_missing_on_stratum(maps):
    p = QuadricPoint(0j, 2 + 0j, 1 + 0j, 1 + 0j)
    j1, j2 = chart_jacobians(maps[1].P, p)
    assert j1 is None and j2 is not None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_degenerate_witness(maps, n):
    m = maps[n]
    for t in (m.t_threshold, m.t_threshold + 0.4):
        p = degenerate_witness(m, t)
        assert p.on_quadric() and abs(p.level - t) <= 1e-12
        assert abs(p.v - m.center) <= 1e-15
        assert abs(complex(jacobian_criterion(m.P, p))) <= 1e-9
    with pytest.raises(NoWitnessBelowThreshold):
        degenerate_witness(m, (1 + m.t_threshold) / 2)


def test_points_csv_round_trip():
    W = sample_level_array(1.2, 20, seed=4)
    buf = io.StringIO()
    write_points_csv(W, buf)
    buf.seek(0)
    assert buf.getvalue().splitlines()[0].startswith("w1_re,w1_im")
    assert np.array_equal(read_points_csv(buf), W)
