import numpy as np
import pytest
from scipy import stats

from lagrad.geometry import (CompactChartPoint, FlatChartPoint, TorusChartPoint, compact_points,
                             compact_residual, compact_to_flat, euclid_measure_factor_compact,
                             euclid_measure_factor_flat, euclid_measure_factor_flat_alt,
                             flat_to_compact, lagrangians_through_point, torus_residual,
                             torus_to_flat)
from lagrad.symplectic import SingularChartError, affine_action, cayley, make_unitary


def _random_flat(rng, n):
    T = rng.uniform(-1, 1, (n, n))
    return FlatChartPoint(0.5 * (T + T.T), rng.normal(size=n))


def test_flat_to_compact_origin():
    q = flat_to_compact(FlatChartPoint(np.zeros((1, 1)), [0.0]))
    assert np.allclose(q.S, [[1j]]) and np.allclose(q.sigma, 0)


def test_sigma_constraint():
    q = flat_to_compact(FlatChartPoint(np.zeros((2, 2)), [1.0, 0.0]))
    assert np.allclose(q.S, 1j * np.eye(2))
    assert np.allclose(q.sigma, -q.S @ q.sigma.conj())


def test_roundtrip_100():
    rng = np.random.default_rng(0)
    for k in range(100):
        p = _random_flat(rng, 1 + k % 3)
        back = compact_to_flat(flat_to_compact(p))
        assert np.allclose(back.T, p.T, atol=1e-10) and np.allclose(back.tau, p.tau, atol=1e-10)


def test_compact_points_lie_on_same_subspace():
    rng = np.random.default_rng(1)
    p = _random_flat(rng, 2)
    q = flat_to_compact(p)
    w = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
    pts = compact_points(q, w)
    assert compact_residual(q, pts) < 1e-12
    x, y = pts[:, :2], pts[:, 2:]
    assert np.allclose(x, y @ p.T.T + p.tau, atol=1e-10)


def test_invalid_compact_point():
    with pytest.raises(ValueError):
        CompactChartPoint(np.array([[2.0]]), [0.0])


def test_measure_factor_flat():
    assert euclid_measure_factor_flat(np.zeros((2, 2))) == pytest.approx(1.0)
    assert euclid_measure_factor_flat(np.ones((1, 1))) == pytest.approx(0.70710678, abs=1e-8)
    rng = np.random.default_rng(2)
    for _ in range(20):
        T = _random_flat(rng, 3).T
        assert euclid_measure_factor_flat(T) == pytest.approx(euclid_measure_factor_flat_alt(T))


def test_measure_factor_compact():
    assert euclid_measure_factor_compact(np.ones((1, 1))) == pytest.approx(np.sqrt(2) / 2)
    # boundary of the chart (eigenvalue -i) is flagged
    with pytest.raises(SingularChartError):
        euclid_measure_factor_compact(-1j * np.eye(2), floor=1e-12)
    rng = np.random.default_rng(3)
    for _ in range(50):
        T = _random_flat(rng, 2).T
        assert euclid_measure_factor_compact(cayley(T)) == pytest.approx(
            euclid_measure_factor_flat(T), rel=1e-12)


def test_torus_to_flat():
    p = torus_to_flat(TorusChartPoint([0.0], [0.0]))
    assert np.allclose(p.T, 0) and np.allclose(p.tau, 0)
    p = torus_to_flat(TorusChartPoint([np.pi / 4], [1.0]))
    assert np.allclose(p.T, [[-1]]) and np.allclose(p.tau, [np.sqrt(2)])
    rng = np.random.default_rng(4)
    for _ in range(20):
        q = TorusChartPoint(rng.uniform(-1.4, 1.4, 2), rng.normal(size=2))
        f = torus_to_flat(q)
        assert torus_residual(q, f.points(rng.normal(size=(8, 2)))) < 1e-12


def test_lagrangians_through_origin_are_linear():
    for p in lagrangians_through_point(np.zeros(4), 20, 0):
        assert np.allclose(p.tau, 0, atol=1e-12)


def test_lagrangians_contain_point():
    x = np.array([0.3, -0.2, 1.0, 0.5])
    for p in lagrangians_through_point(x, 20, 1):
        assert np.allclose(p.points(x[2:]), x, atol=1e-10)


def test_tangent_angle_uniform_n1():
    ps = lagrangians_through_point(np.zeros(2), 10_000, 5)
    # direction (T, 1) of the line; its angle mod pi is uniform
    ang = np.mod(np.arctan2(1.0, np.array([p.T[0, 0] for p in ps])), np.pi)
    assert stats.kstest(ang / np.pi, "uniform").pvalue > 0.01


def test_unitary_invariance_of_law():
    rng = np.random.default_rng(6)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    u0, _ = np.linalg.qr(z)
    g = make_unitary(u0)
    ps = lagrangians_through_point(np.zeros(4), 4000, 7)
    f0, f1 = [], []
    for p in ps:
        try:
            T1, _ = affine_action(g, p.T, p.tau)
        except SingularChartError:
            continue
        f0.append(euclid_measure_factor_flat(p.T))
        f1.append(euclid_measure_factor_flat(T1))
    f0, f1 = np.array(f0), np.array(f1)
    se = np.sqrt(f0.var() / f0.size + f1.var() / f1.size)
    assert abs(f0.mean() - f1.mean()) < 4 * se
