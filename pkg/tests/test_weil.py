import numpy as np
import pytest

from lagrad.gaussian import GaussianFunction, random_gaussian
from lagrad.symplectic import symplectic_form
from lagrad.weil import (KINDS, ProportionalityError, SiegelPoint, WeilOperator,
                         canonical_word, cauchy_riemann_residual, cocycle_check,
                         commuting_square_residual, grid_unitarity, intertwiner_J,
                         intertwining_residual, is_complex_symplectic, kernel_eval,
                         phi_kernel_function, random_siegel_points, random_word, sample_gaussian,
                         siegel_action, siegel_transform, stretch_block, stretch_equivariance_residual,
                         stretch_kernel_quadratic, symmetric_grid, system_Z_minors,
                         system_Z_residual, tensor_intertwiner_H, weil_apply, weil_apply_word,
                         word_element)

STD1 = GaussianFunction.standard(1)


def _op(kind, n=1, rng=None):
    rng = rng or np.random.default_rng(0)
    return random_word(n, rng, 1, kinds=(kind,))[0]


def _identity_op(kind, n=1):
    if kind == "J":
        return None
    if kind in ("gl", "nplus"):
        return WeilOperator(kind, np.eye(n) if kind == "gl" else np.zeros((n, n)), n)
    return WeilOperator(kind, np.zeros(n), n)


# ------------------------------------------------------------------ generators

def test_invalid_parameters():
    with pytest.raises(ValueError):
        WeilOperator("rotate", None)
    with pytest.raises(ValueError):
        WeilOperator("gl", [[0.0]])
    with pytest.raises(ValueError):
        WeilOperator("nplus", [[0.0, 1.0], [0.0, 0.0]], 2)
    with pytest.raises(ValueError):
        WeilOperator("shift", [1.0, 2.0], 1)
    with pytest.raises(TypeError):
        weil_apply(WeilOperator("J"), np.zeros(4))


def test_J_on_standard_gaussian_grid():
    grid = symmetric_grid(256, 10.0)
    f = sample_gaussian(STD1, grid)
    out = weil_apply(WeilOperator("J"), f)
    assert np.max(np.abs(out.values - np.sqrt(1j) * f.values)) < 1e-6


@pytest.mark.parametrize("kind", [k for k in KINDS if k != "J"])
def test_identity_parameters_are_identity(kind):
    W = _identity_op(kind)
    f = sample_gaussian(random_gaussian(1, np.random.default_rng(1)), symmetric_grid(128, 8.0))
    assert np.allclose(weil_apply(W, f).values, f.values, atol=1e-12)
    G = random_gaussian(1, np.random.default_rng(2))
    H = weil_apply(W, G)
    x = np.linspace(-2, 2, 7)[:, None]
    assert np.allclose(H(x), G(x))


@pytest.mark.parametrize("kind", KINDS)
def test_grid_matches_closed_form(kind):
    rng = np.random.default_rng(3)
    W = _op(kind, rng=rng)
    G = GaussianFunction.from_mean_cov([0.2], [[0.8]])
    grid = symmetric_grid(256, 10.0)
    out = weil_apply(W, sample_gaussian(G, grid))
    ref = sample_gaussian(weil_apply(W, G), grid)
    assert np.max(np.abs(out.values - ref.values)) < 1e-6 * np.max(np.abs(ref.values))


@pytest.mark.parametrize("kind", KINDS)
def test_grid_unitarity(kind):
    rng = np.random.default_rng(4)
    f = sample_gaussian(random_gaussian(1, rng, shift=0.3), symmetric_grid(256, 10.0))
    for _ in range(3):
        assert grid_unitarity(_op(kind, rng=rng), f) < 1e-5


def test_heisenberg_commutation_phase():
    r, s = np.array([0.7]), np.array([-0.4])
    G = random_gaussian(1, np.random.default_rng(5))
    sm = weil_apply_word([WeilOperator("shift", r), WeilOperator("modulate", s)], G)
    ms = weil_apply_word([WeilOperator("modulate", s), WeilOperator("shift", r)], G)
    x = np.linspace(-1.5, 1.5, 9)[:, None]
    ratio = sm(x) / ms(x)
    assert np.allclose(ratio, ratio[0], atol=1e-12)
    assert abs(abs(ratio[0]) - 1) < 1e-6
    assert abs(ratio[0] - np.exp(1j * s[0] * r[0])) < 1e-6


def test_word_element_of_empty_word():
    assert np.allclose(word_element([], 2).matrix(), np.eye(5))
    with pytest.raises(ValueError):
        word_element([])


@pytest.mark.parametrize("n", [1, 2])
def test_canonical_word_realizes_element(n):
    rng = np.random.default_rng(6)
    for _ in range(10):
        g = word_element(random_word(n, rng, 4), n)
        assert np.allclose(word_element(canonical_word(g), n).matrix(), g.matrix(), atol=1e-10)


# ------------------------------------------------------------------ cocycle

def test_cocycle_with_identity_is_one():
    rng = np.random.default_rng(7)
    w = canonical_word(word_element(random_word(1, rng, 3), 1))
    sigma, res = cocycle_check(w, [], STD1)
    assert abs(sigma - 1) < 1e-10 and res < 1e-6


def test_cocycle_J_J():
    f = sample_gaussian(GaussianFunction.from_mean_cov([0.3], [[0.7]]), symmetric_grid(256, 10.0))
    J = WeilOperator("J")
    sigma, res = cocycle_check([J], [J], f)
    assert abs(abs(sigma) - 1) < 1e-6 and res < 1e-5
    sigma, _ = cocycle_check([J], [J], STD1)
    assert abs(abs(sigma) - 1) < 1e-6


@pytest.mark.parametrize("n", [1, 2])
def test_cocycle_modulus_sweep(n):
    rng = np.random.default_rng(8 + n)
    for _ in range(25):
        w1, w2 = random_word(n, rng, 3), random_word(n, rng, 3)
        sigma, _ = cocycle_check(w1, w2, random_gaussian(n, rng), tol=np.inf)
        assert abs(abs(sigma) - 1) < 1e-6


def test_cocycle_detects_non_proportional(monkeypatch):
    import lagrad.weil as weil
    f = GaussianFunction.standard(1)
    monkeypatch.setattr(weil, "canonical_word", lambda g, rng=None: [WeilOperator("shift", [0.8])])
    with pytest.raises(ProportionalityError):
        cocycle_check([WeilOperator("nplus", [[0.4]])], [], f)
    with pytest.raises(ValueError):
        cocycle_check([WeilOperator("J")], [], None)


# ------------------------------------------------------------------ H and intertwining

@pytest.mark.parametrize("n", [1, 2])
def test_H_unitary_closed_form(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(20):
        f = random_gaussian(2 * n, rng)
        assert abs(tensor_intertwiner_H(f).norm() / f.norm() - 1) < 1e-10


def test_H_grid_matches_closed_form_and_is_unitary():
    grid = symmetric_grid((128, 128), 8.0)
    rng = np.random.default_rng(12)
    for k in range(20):
        G = GaussianFunction.standard(2) if k == 0 else random_gaussian(2, rng, shift=0.3)
        f = sample_gaussian(G, grid)
        Hf = tensor_intertwiner_H(f)
        assert abs(Hf.norm() / f.norm() - 1) < 1e-6
        ref = sample_gaussian(tensor_intertwiner_H(G), grid)
        assert np.max(np.abs(Hf.values - ref.values)) < 1e-6 * np.max(np.abs(ref.values))


def test_H_zero_and_grid_checks():
    grid = symmetric_grid((16, 16), 4.0)
    assert np.all(tensor_intertwiner_H(grid).values == 0)
    from lagrad.grid import GridField
    with pytest.raises(ValueError):
        tensor_intertwiner_H(GridField.centered((16, 16), 4.0))
    with pytest.raises(ValueError):
        tensor_intertwiner_H(symmetric_grid((16, 8), 4.0))


def test_intertwining_identity_word():
    assert intertwining_residual([], [GaussianFunction.standard(2)]) == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_intertwining_closed_form(kind):
    # residual is the sqrt of an L2 cancellation, so its floor is near 1e-8
    rng = np.random.default_rng(13)
    for n in (1, 2):
        probes = [random_gaussian(2 * n, rng) for _ in range(3)]
        assert intertwining_residual([_op(kind, n, rng)], probes) < 1e-6


@pytest.mark.parametrize("kind", KINDS)
def test_intertwining_on_grid(kind):
    rng = np.random.default_rng(14)
    grid = symmetric_grid((128, 128), 8.0)
    probes = [GaussianFunction.from_mean_cov([0.2, -0.1], [[1.0, 0.2], [0.2, 0.8]])]
    assert intertwining_residual([_op(kind, 1, rng)], probes, grid) < 1e-3


def test_intertwining_random_words():
    rng = np.random.default_rng(15)
    probes = [random_gaussian(4, rng)]
    for _ in range(5):
        assert intertwining_residual(random_word(2, rng, 4), probes) < 1e-6


# ------------------------------------------------------------------ Siegel layer

def test_siegel_point_validation():
    with pytest.raises(ValueError):
        SiegelPoint([[1.0 - 1j]], [0.0])
    with pytest.raises(ValueError):
        SiegelPoint([[1j, 0.1], [0.2, 1j]], [0.0, 0.0])
    SiegelPoint([[-1j]], [0.0], sign=-1)


def test_siegel_grid_matches_closed_form():
    G = random_gaussian(1, np.random.default_rng(16))
    grid = symmetric_grid(512, 12.0)
    f = sample_gaussian(G, grid)
    for P, pi in random_siegel_points(1, 5, np.random.default_rng(17)):
        assert abs(siegel_transform(f, P, pi) - siegel_transform(G, P, pi)) < 1e-8


def test_siegel_transform_linear():
    rng = np.random.default_rng(18)
    grid = symmetric_grid((48, 48), 6.0)
    f1 = sample_gaussian(random_gaussian(2, rng), grid)
    f2 = sample_gaussian(random_gaussian(2, rng), grid)
    a, b = 0.3 - 1.1j, 2.0
    P, pi = random_siegel_points(2, 1, rng)[0]
    lhs = siegel_transform(f1.with_values(a * f1.values + b * f2.values), P, pi)
    rhs = a * siegel_transform(f1, P, pi) + b * siegel_transform(f2, P, pi)
    assert abs(lhs - rhs) < 1e-12 * max(1, abs(lhs))


def test_siegel_holomorphy():
    G = random_gaussian(2, np.random.default_rng(19))
    for P, pi in random_siegel_points(2, 3, np.random.default_rng(20)):
        assert cauchy_riemann_residual(lambda P_, pi_: siegel_transform(G, P_, pi_), P, pi) < 1e-5


def test_kernel_examples():
    assert kernel_eval([[1j]], [0.0], [[1j]], [0.0]) == pytest.approx(2 ** -0.5, abs=1e-8)
    assert kernel_eval(0.5j * np.eye(2), [0, 0], 0.5j * np.eye(2), [0, 0]) == 1.0
    assert kernel_eval([[0.3 + 0.5j]], [0.0], [[0.3 + 0.5j]], [0.0]) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 2])
def test_kernel_identity(n):
    rng = np.random.default_rng(21 + n)
    pts = random_siegel_points(n, 40, rng)
    for k in range(20):
        (P, pi), (R, rho) = pts[2 * k], pts[2 * k + 1]
        direct = siegel_transform(phi_kernel_function(R, rho), P, pi)
        assert abs(direct - kernel_eval(P, pi, R, rho)) < 1e-8 * max(1, abs(direct))


def test_reproducing_pairing():
    # K f(R, rho) = <f, Phi_{R,rho}> on a grid
    grid = symmetric_grid(512, 12.0)
    G = random_gaussian(1, np.random.default_rng(24))
    f = sample_gaussian(G, grid)
    for R, rho in random_siegel_points(1, 3, np.random.default_rng(25)):
        Phi = sample_gaussian(phi_kernel_function(R, rho), grid)
        pairing = np.sum(f.values * np.conj(Phi.values)) * f.cell_volume
        assert abs(pairing - siegel_transform(G, R, rho)) < 1e-8


def test_siegel_action_simple_cases():
    F = lambda P, pi: P[0, 0] + 2 * pi[0]
    b = np.array([[0.4]])
    P, pi = np.array([[0.1 + 1j]]), np.array([0.3])
    assert siegel_action(WeilOperator("nplus", b), F)(P, pi) == pytest.approx(F(P + b, pi))
    s = np.array([0.25])
    assert siegel_action(WeilOperator("modulate", s), F)(P, pi) == pytest.approx(
        F(P, pi + np.sqrt(2) * s))


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("conjugate", [False, True])
def test_commuting_square(kind, conjugate):
    rng = np.random.default_rng(26)
    for n in (1, 2):
        W = _op(kind, n, rng)
        if conjugate:
            W = W.conj()
        f = random_gaussian(n, rng)
        pts = random_siegel_points(n, 5, rng, sign=-1 if conjugate else 1)
        assert commuting_square_residual([W], f, pts) < 1e-6


def test_commuting_square_words():
    rng = np.random.default_rng(27)
    f = random_gaussian(2, rng)
    for _ in range(5):
        assert commuting_square_residual(random_word(2, rng, 3), f,
                                         random_siegel_points(2, 4, rng)) < 1e-6


@pytest.mark.parametrize("n", [1, 2])
def test_system_Z_minors_vanish(n):
    assert len(system_Z_minors(n)) == ((n + 1) * n // 2) ** 2
    rng = np.random.default_rng(28 + n)
    G = random_gaussian(n, rng, shift=0.2)
    F = lambda P, pi: siegel_transform(G, P, pi)
    for P, pi in random_siegel_points(n, 3, rng):
        for minor in system_Z_minors(n):
            val, scale = system_Z_residual(F, P, pi, minor)
            assert abs(val) < 1e-4 * max(scale, 1e-300)


def test_system_Z_negative_control():
    F = lambda P, pi: pi[0] ** 2 * P[0, 0]
    val, scale = system_Z_residual(F, np.array([[0.2 + 1j]]), np.array([0.5]), ((0, 1), (0, 1)))
    assert abs(val) > 1e-2 * scale


# ------------------------------------------------------------------ stretch

def _stretch_points(rng, count):
    plus = random_siegel_points(1, count, rng, 1)
    minus = random_siegel_points(1, count, rng, -1)
    return [(P, pi, Q, k) for (P, pi), (Q, k) in zip(plus, minus)]


def test_stretch_block_matches_measured_kernel():
    P, Q = np.array([[0.3 + 0.9j]]), np.array([[-0.2 - 1.1j]])
    M = stretch_kernel_quadratic(P, Q)
    assert np.max(np.abs(M - stretch_block(P, Q))) < 1e-6 * np.max(np.abs(M))


def test_stretch_block_corrected_is_symplectic():
    rng = np.random.default_rng(30)
    J0 = symplectic_form(1)
    for P, _, Q, _ in _stretch_points(rng, 10):
        B = stretch_block(P, Q)
        assert is_complex_symplectic(1j * B)
        ev = np.linalg.eigvals(J0 @ B)
        assert np.allclose(np.sort(ev.real), [-1, 1], atol=1e-8) and np.allclose(ev.imag, 0, atol=1e-8)


@pytest.mark.xfail(strict=True, reason="the printed lower-right entry lacks an inverse; "
                   "with it i*block is not complex symplectic")
def test_stretch_block_printed_is_symplectic():
    P, Q = np.array([[0.3 + 0.9j]]), np.array([[-0.2 - 1.1j]])
    assert is_complex_symplectic(1j * stretch_block(P, Q, printed=True))


@pytest.mark.parametrize("kind", KINDS)
def test_stretch_equivariance(kind):
    rng = np.random.default_rng(31)
    f = random_gaussian(2, rng)
    assert stretch_equivariance_residual([_op(kind, 1, rng)], f, _stretch_points(rng, 3)) < 1e-5


def test_stretch_value_is_finite():
    rng = np.random.default_rng(32)
    P, pi, Q, k = _stretch_points(rng, 1)[0]
    assert np.isfinite(intertwiner_J(GaussianFunction.standard(2), P, pi, Q, k))
