import numpy as np
import pytest

from lagrad.gaussian import GaussianFunction, gauss_fourier, radon_flat_gaussian, random_gaussian
from lagrad.grid import GridField
from lagrad.inversion import (AliasingError, CalibrationError, TauRule, angle_grid, calibrate,
                              fiberwise_fourier, half_step_grid, interior_mask, invert_fourier,
                              invert_riesz, invert_torus, literal_torus_integral,
                              min_norm_symmetric, neg_laplacian, null_perturbations, oracle_set,
                              point_average, relative_l2, riesz_field, riesz_gaussian,
                              sphere_area, torus_gaussian_exact, well_definedness_residual)
from lagrad.radon import RadonSamples, torus_radon

STD2 = GaussianFunction.standard(2)


def _torus_data(G, angles=180, offsets=128, half_width=8.0):
    phi, p = angle_grid(angles), half_step_grid(offsets, half_width)
    return RadonSamples("torus", 1, [phi, p], torus_gaussian_exact(G, phi[:, None], p[None, :]))


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * np.pi)
    assert sphere_area(3) == pytest.approx(4 * np.pi)
    assert sphere_area(4) == pytest.approx(2 * np.pi ** 2)


def test_min_norm_symmetric_solves():
    rng = np.random.default_rng(0)
    v, w = rng.normal(size=(10, 3)), rng.normal(size=(10, 3))
    T = min_norm_symmetric(v, w)
    assert np.allclose(T, np.swapaxes(T, 1, 2))
    assert np.allclose(np.einsum("bij,bj->bi", T, v), w)


def test_null_perturbations_kill_v():
    v = np.array([0.3, -1.2, 0.7])
    for S in null_perturbations(v):
        assert np.allclose(S, S.T) and np.allclose(S @ v, 0)


@pytest.mark.parametrize("n", [1, 2])
def test_fiberwise_matches_fourier_transform(n):
    # g(T, v) = f^(v, -T v) with f^(xi) = int f e^{i xi x}
    rng = np.random.default_rng(n)
    G = random_gaussian(2 * n, rng, complex_part=0.0)
    Fh = gauss_fourier(G, +1)
    T = rng.uniform(-0.5, 0.5, (6, n, n))
    T = 0.5 * (T + np.swapaxes(T, 1, 2))
    v = rng.normal(size=(6, n))
    g = fiberwise_fourier(G, T, v, TauRule(96, 9.0))
    xi = np.concatenate([v, -np.einsum("bij,bj->bi", T, v)], axis=1)
    assert np.allclose(g, Fh(xi), atol=1e-9)


def test_fiberwise_callable_matches_closed_form():
    G = random_gaussian(2, np.random.default_rng(3), complex_part=0.0)

    def F(T, tau):
        return radon_flat_gaussian(G, np.broadcast_to(T, tau.shape[:-1] + T.shape[-2:]), tau)
    T, v = np.array([[[0.3]]]), np.array([[0.8]])
    rule = TauRule(96, 9.0)
    assert fiberwise_fourier(F, T, v, rule) == pytest.approx(fiberwise_fourier(G, T, v, rule))


def test_fiberwise_v_zero_is_mass():
    G = GaussianFunction.from_mean_cov([0.4, -0.2], [[1.0, 0.3], [0.3, 0.7]])
    g = fiberwise_fourier(G, np.array([[[0.5]], [[-1.0]]]), np.zeros((2, 1)), TauRule(96, 9.0))
    mass = 2 * np.pi * np.sqrt(np.linalg.det([[1.0, 0.3], [0.3, 0.7]]))
    assert np.allclose(g, mass, rtol=1e-10)


def test_fiberwise_zero_input():
    g = fiberwise_fourier(lambda T, tau: np.zeros(tau.shape[:-1]), np.zeros((3, 1, 1)),
                          np.ones((3, 1)))
    assert np.all(g == 0)


def test_aliasing_detected():
    wide = GaussianFunction.from_mean_cov([0.0, 0.0], 25 * np.eye(2))
    with pytest.raises(AliasingError):
        fiberwise_fourier(wide, np.zeros((1, 1, 1)), np.ones((1, 1)), TauRule(32, 3.0))


def test_well_definedness():
    rng = np.random.default_rng(4)
    G = random_gaussian(4, rng, complex_part=0.0)
    v, T = np.array([0.7, -0.4]), np.array([[0.2, 0.1], [0.1, -0.3]])
    base = abs(fiberwise_fourier(G, T[None], v[None], TauRule(64, 9.0))[0])
    for S in null_perturbations(v):
        assert well_definedness_residual(G, T, 0.4 * S, v, TauRule(64, 9.0)) < 1e-10 * max(1, base)
    assert well_definedness_residual(G, T, np.zeros((2, 2)), v) == 0.0
    with pytest.raises(ValueError):
        well_definedness_residual(G, T, np.eye(2), v)


def test_invert_fourier_n1_and_refinement():
    e64 = relative_l2(invert_fourier(STD2, GridField.centered((64, 64), 10.0)), STD2)
    e128 = relative_l2(invert_fourier(STD2, GridField.centered((128, 128), 10.0 * np.sqrt(2))), STD2)
    assert e64 < 5e-2 and e128 < e64


def test_invert_fourier_zero():
    rec = invert_fourier(lambda T, tau: np.zeros(tau.shape[:-1]), GridField.centered((16, 16), 5.0))
    assert np.all(rec.values == 0)


def test_invert_fourier_shifted_peak():
    G = GaussianFunction.from_mean_cov([1.25, -0.625], 0.5 * np.eye(2))
    rec = invert_fourier(G, GridField.centered((64, 64), 10.0))
    k = np.unravel_index(np.argmax(np.abs(rec.values)), rec.shape)
    assert np.allclose(rec.points()[k], [1.25, -0.625])
    assert relative_l2(rec, G) < 5e-2


def test_invert_fourier_n2_small_grid():
    G = GaussianFunction.standard(4)
    e = relative_l2(invert_fourier(G, GridField.centered((16,) * 4, 6.0)), G)
    assert e < 1e-1


def test_invert_fourier_workers_do_not_change_result():
    sp = GridField.centered((32, 32), 8.0)
    a = invert_fourier(STD2, sp, workers=1)
    b = invert_fourier(STD2, sp, workers=2)
    assert np.array_equal(a.values, b.values)


def test_torus_exact_matches_numeric():
    G = random_gaussian(2, np.random.default_rng(5), complex_part=0.0)
    phi, p = np.linspace(0, 3, 4), np.linspace(-1, 1, 5)
    assert np.allclose(torus_gaussian_exact(G, phi[:, None], p[None, :]),
                       torus_radon(G, phi, p).values, atol=1e-10)


def test_half_step_grid():
    p = half_step_grid(8, 2.0)
    assert np.allclose(p, -p[::-1]) and not np.any(p == 0)
    assert np.allclose(np.diff(p), 0.5)


def test_torus_fbp_and_refinement():
    G = GaussianFunction.from_mean_cov([0.2, -0.1], [[1.0, 0.2], [0.2, 0.8]])
    e1 = relative_l2(invert_torus(_torus_data(G), GridField.centered((64, 64), 4.0)), G)
    e2 = relative_l2(invert_torus(_torus_data(G, 360, 256), GridField.centered((128, 128), 4.0)), G)
    assert e1 < 5e-2 and e2 < e1


def test_torus_fbp_rejects_unshifted_offsets():
    phi, p = angle_grid(8), np.linspace(-2, 2, 9)
    data = RadonSamples("torus", 1, [phi, p], torus_gaussian_exact(STD2, phi[:, None], p[None, :]))
    with pytest.raises(ValueError):
        invert_torus(data, GridField.centered((8, 8), 2.0))
    with pytest.raises(ValueError):
        invert_torus(_torus_data(STD2), GridField.centered((8, 8), 2.0), engine="nope")


def test_torus_literal_ratio_is_minus_one_over_pi():
    data = _torus_data(STD2)
    pts = np.array([[0.0, 0.0], [0.5, 0.0], [0.3, -0.6]])
    ratio = STD2(pts) / literal_torus_integral(data, pts)
    assert np.allclose(ratio.real, -1 / np.pi, rtol=5e-2)
    rec = invert_torus(data, GridField.centered((16, 16), 2.0), engine="literal")
    assert relative_l2(rec, STD2) < 5e-2


def test_torus_reconstruction_radially_symmetric():
    rec = invert_torus(_torus_data(STD2), GridField.centered((32, 32), 4.0)).values
    # rotation by 90 degrees about the grid node at the origin
    core = rec[1:, 1:]
    assert np.max(np.abs(core - np.rot90(core))) < 1e-3 * np.max(np.abs(rec))


def test_riesz_matches_point_average():
    for m in (2, 4):
        G = oracle_set(m, 1, 1)[0]
        v = np.full(m, 0.2)
        est, se = point_average(G, v, 20000, 3)
        assert abs(est - riesz_gaussian(G, v[None])[0]) < 4 * se


def test_neg_laplacian_on_quadratic():
    gf = GridField.sample(lambda x: np.sum(x ** 2, axis=-1), (8, 8), 2.0)
    lap = neg_laplacian(gf).values
    mask = interior_mask(gf.shape)
    assert np.allclose(lap[mask], -4) and np.all(np.isnan(lap[~mask]))


def test_invert_riesz_rejects_odd_n():
    with pytest.raises(ValueError):
        invert_riesz(GridField.centered((4, 4), 1.0), n=1)


def test_invert_riesz_small_grid():
    G = oracle_set(4, 1, 3)[0]
    sp = GridField.centered((16,) * 4, 5.0)
    rec = invert_riesz(riesz_field(G, sp))
    mask = interior_mask(sp.shape)
    assert relative_l2(rec.with_values(np.nan_to_num(rec.values)), G, mask) < 1e-1


def test_calibration_deterministic_and_near_minus_one_over_pi():
    a = calibrate("torus-literal", seed=2)
    b = calibrate("torus-literal", seed=2)
    assert a.to_dict() == b.to_dict()
    assert abs(a.value + 1 / np.pi) < 5e-2 / np.pi


def test_calibration_errors():
    with pytest.raises(ValueError):
        calibrate("nope")
    with pytest.raises(CalibrationError):
        calibrate("torus-literal", oracles=oracle_set(2, 2, 0))
    with pytest.raises(CalibrationError):
        calibrate("fourier", seed=0, spread_tol=1e-12, resolution={"shape": 16})
