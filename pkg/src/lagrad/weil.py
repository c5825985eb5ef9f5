"""Weil representation on L2(R^n), the tensor intertwiner H, and the Siegel layer.

Generators (the conjugate realization replaces i by -i everywhere):

    gl(a)        f(u) -> det(a)^{1/2} f(a u)                 group element make_gl(a^T)
    nplus(b)     f(u) -> exp(i/2 u^T b u) f(u)               make_n_plus(b)
    J            f(u) -> (i/2pi)^{n/2} int exp(i xi^T u) f(xi) dxi    make_J(n)
    shift(r)     f(u) -> f(u + r)                            translation (0, r)
    modulate(s)  f(u) -> exp(i s^T u) f(u)                   translation (-s, 0)

A word [W1, ..., Wk] is the product W1 ... Wk, so Wk acts first.

H f(u, v) = (2pi)^{-n/2} int f(x, (u - v)/sqrt2) exp(i/sqrt2 x^T (u + v)) dx
intertwines the geometric action f -> exp(i sqrt2 z^T J t) f(L^{-1} z) of
g = (L, t) with We(g) (x) conj-We(g).

The Siegel transform is
    K f(P, pi) = (2pi)^{-n/4} int f(u) exp(i/2 u^T P u + i/sqrt2 u^T pi) du,
with reproducing kernel K Phi_{R,rho}(P, pi) for
    Phi_{R,rho}(x) = (2pi)^{-n/4} exp(-i/2 x^T conj(R) x - i/sqrt2 x^T conj(rho)).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.ndimage import map_coordinates

from .gaussian import (LOG2PI, GaussianFunction, gauss_affine_pullback, gauss_fourier,
                       logdet_branch, siegel_transform_gaussian, weil_generator_on_gaussian)
from .grid import GridField
from .symplectic import (AffineSymplectic, compose, make_gl, make_J, make_n_plus,
                         symplectic_form)

KINDS = ("gl", "nplus", "J", "shift", "modulate")


class ProportionalityError(RuntimeError):
    """We(g1) We(g2) f and We(g1 g2) f are not proportional."""


# ===================================================================== operators

@dataclass(frozen=True)
class WeilOperator:
    kind: str
    params: object = None
    n: int = 1
    conjugate: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        p = self.params
        if self.kind == "J":
            object.__setattr__(self, "params", None)
            return
        if self.kind in ("gl", "nplus"):
            p = np.atleast_2d(np.asarray(p, dtype=float))
            if p.shape != (self.n, self.n):
                raise ValueError("matrix parameter has the wrong size")
            if self.kind == "gl" and abs(np.linalg.det(p)) < 1e-12:
                raise ValueError("gl parameter must be invertible")
            if self.kind == "nplus" and np.max(np.abs(p - p.T)) > 1e-12:
                raise ValueError("nplus parameter must be symmetric")
        else:
            p = np.atleast_1d(np.asarray(p, dtype=float))
            if p.shape != (self.n,):
                raise ValueError("vector parameter has the wrong size")
        p.setflags(write=False)
        object.__setattr__(self, "params", p)

    @property
    def branch(self) -> complex | None:
        """Recorded det(a)^{1/2} (principal branch) for gl."""
        if self.kind != "gl":
            return None
        r = np.sqrt(complex(np.linalg.det(self.params)))
        return np.conj(r) if self.conjugate else r

    def group_element(self) -> AffineSymplectic:
        n, p = self.n, self.params
        if self.kind == "gl":
            return make_gl(p.T)
        if self.kind == "nplus":
            return make_n_plus(p)
        if self.kind == "J":
            return make_J(n)
        if self.kind == "shift":
            return AffineSymplectic.translation(np.zeros(n), p)
        return AffineSymplectic.translation(-p, np.zeros(n))

    def conj(self) -> "WeilOperator":
        return WeilOperator(self.kind, self.params, self.n, not self.conjugate)


def word_element(word, n: int | None = None) -> AffineSymplectic:
    if not word:
        if n is None:
            raise ValueError("empty word needs n")
        return AffineSymplectic.identity(n)
    g = word[0].group_element()
    for W in word[1:]:
        g = compose(g, W.group_element())
    return g


def canonical_word(g: AffineSymplectic, rng=None) -> list[WeilOperator]:
    """A generator word realizing g.

    Linear part: nplus(B D^-1) . gl-element(D^-T) . nminus(D^-1 C) with
    nminus(Y) = J nplus(-Y) J^-1 and J^-1 = J^3; if D is singular g is first
    multiplied on the right by nplus(X) (also used to keep parameters moderate).  Translation (p, q) = modulate(-p) shift(q).
    """
    n = g.n
    L = g.linear
    tail: list[WeilOperator] = []
    def cost(M):
        D = M[n:, n:]
        if abs(np.linalg.det(D)) < 1e-8:
            return np.inf
        Di = np.linalg.inv(D)
        return max(np.abs(M[:n, n:] @ Di).max(), np.abs(Di).max(), np.abs(Di @ M[n:, :n]).max(),
                   np.abs(D).max())
    if cost(L) > 4.0:
        # regularize / tame the D block with a right factor nplus(X)
        rng = rng or np.random.default_rng(0)
        cands = [c * np.eye(n) for c in (1.0, -1.0, 0.5, -0.5, 2.0, -2.0)]
        for _ in range(32):
            X = rng.normal(size=(n, n))
            cands.append(0.5 * (X + X.T))
        best = min(cands, key=lambda X: cost(L @ make_n_plus(X).linear))
        if cost(L @ make_n_plus(best).linear) < cost(L):
            L = L @ make_n_plus(best).linear
            tail = [WeilOperator("nplus", -best, n)]
        if not np.isfinite(cost(L)):  # pragma: no cover - measure-zero failure
            raise ValueError("could not regularize the D block")
    B, C, D = L[:n, n:], L[n:, :n], L[n:, n:]
    Di = np.linalg.inv(D)
    sym = lambda M: 0.5 * (M + M.T)
    Jw = WeilOperator("J", None, n)
    word = []
    p, q = g.shift[:n], g.shift[n:]
    if np.any(p):
        word.append(WeilOperator("modulate", -p, n))
    if np.any(q):
        word.append(WeilOperator("shift", q, n))
    word += [WeilOperator("nplus", sym(B @ Di), n),
             WeilOperator("gl", Di, n),  # group element make_gl(D^-T)
             Jw, WeilOperator("nplus", -sym(Di @ C), n), Jw, Jw, Jw]
    return word + tail


def random_word(n: int, rng, length: int = 3, kinds=KINDS, scale: float = 0.5) -> list[WeilOperator]:
    out = []
    for _ in range(length):
        k = kinds[rng.integers(len(kinds))]
        if k == "gl":
            a = np.eye(n) + scale * rng.uniform(-0.5, 0.5, (n, n))
            out.append(WeilOperator(k, a, n))
        elif k == "nplus":
            b = rng.uniform(-scale, scale, (n, n))
            out.append(WeilOperator(k, 0.5 * (b + b.T), n))
        elif k == "J":
            out.append(WeilOperator(k, None, n))
        else:
            out.append(WeilOperator(k, rng.uniform(-scale, scale, n), n))
    return out


# ===================================================================== application

def weil_apply(W: WeilOperator, f, axes=None):
    """Apply one generator to a GaussianFunction (exact) or a GridField.

    ``axes`` selects the n variables acted on (default: all); other variables
    are spectators, which is how We (x) conj-We acts on R^n x R^n.
    """
    if isinstance(f, GaussianFunction):
        return weil_generator_on_gaussian(W.kind, W.params, f, conjugate=W.conjugate, axes=axes)
    if isinstance(f, GridField):
        return _weil_grid(W, f, axes)
    raise TypeError("weil_apply expects a GaussianFunction or a GridField")


def weil_apply_word(word, f, axes=None):
    for W in reversed(word):
        f = weil_apply(W, f, axes)
    return f


def _axes(f: GridField, axes, n: int) -> np.ndarray:
    B = np.arange(f.m) if axes is None else np.atleast_1d(np.asarray(axes, dtype=int))
    if B.size != n:
        raise ValueError("operator size does not match the selected axes")
    return B


def _axis_coords(f: GridField, j: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[j] = -1
    return f.axes()[j].reshape(shape)


def dft_matrix(x: np.ndarray, sign: int = 1) -> np.ndarray:
    """Trapezoid matrix of int exp(i sign xi x) dx from nodes x to the same nodes."""
    h = x[1] - x[0]
    return np.exp(1j * sign * np.outer(x, x)) * h


def _apply_along(values, M, axis):
    return np.moveaxis(np.tensordot(M, values, axes=([1], [axis])), 0, axis)


def fourier_shift(values, axis: int, h: float, shift):
    """v(x + shift) by trigonometric interpolation along one axis.

    ``shift`` is a scalar or an array broadcasting against ``values`` with the
    shifted axis collapsed to length 1 (for shears).
    """
    N = values.shape[axis]
    w = 2 * np.pi * np.fft.fftfreq(N, h)
    shape = [1] * values.ndim
    shape[axis] = N
    phase = np.exp(1j * w.reshape(shape) * shift)
    return np.fft.ifft(np.fft.fft(values, axis=axis) * phase, axis=axis)


def _weil_grid(W: WeilOperator, f: GridField, axes) -> GridField:
    n = W.n
    B = _axes(f, axes, n)
    eps = -1.0 if W.conjugate else 1.0
    v = f.values
    if W.kind == "nplus":
        b = W.params
        q = sum(b[i, j] * _axis_coords(f, B[i], f.m) * _axis_coords(f, B[j], f.m)
                for i in range(n) for j in range(n))
        return f.with_values(v * np.exp(0.5j * eps * q))
    if W.kind == "modulate":
        s = W.params
        q = sum(s[i] * _axis_coords(f, B[i], f.m) for i in range(n))
        return f.with_values(v * np.exp(1j * eps * q))
    if W.kind == "shift":
        out = v
        for i, j in enumerate(B):
            out = fourier_shift(out, j, f.spacing[j], W.params[i])
        return f.with_values(out)
    if W.kind == "J":
        out = v
        for j in B:
            out = _apply_along(out, dft_matrix(f.axes()[j], int(eps)), j)
        pref = np.exp(0.5 * n * (np.log(1j * eps) - LOG2PI))
        return f.with_values(pref * out)
    # gl: spline resampling f(a u)
    a = W.params
    pts = f.points()
    new = pts.copy()
    new[..., B] = pts[..., B] @ a.T
    idx = (new - f.origin) / f.spacing
    coords = np.moveaxis(idx, -1, 0)
    kw = dict(order=5, mode="constant", cval=0.0)
    res = map_coordinates(v.real, coords, **kw) + 1j * map_coordinates(v.imag, coords, **kw)
    return f.with_values(W.branch * res)


def symmetric_grid(shape, half_width) -> GridField:
    """Nodes (k - (N-1)/2) h with h = 2L/N: symmetric under u -> -u."""
    shape = tuple(np.atleast_1d(shape).astype(int))
    L = np.broadcast_to(np.asarray(half_width, dtype=float), (len(shape),))
    h = 2 * L / np.array(shape)
    return GridField(-(np.array(shape) - 1) / 2 * h, h, np.zeros(shape, dtype=complex))


def sample_gaussian(G: GaussianFunction, grid: GridField) -> GridField:
    return grid.with_values(G(grid.points()))


def grid_unitarity(W: WeilOperator, f: GridField, axes=None) -> float:
    """| ||W f|| / ||f|| - 1 | on a grid probe."""
    return abs(weil_apply(W, f, axes).norm() / f.norm() - 1.0)


def _proportionality(x: np.ndarray, y: np.ndarray):
    """Least-squares sigma with x ~ sigma y, and the relative residual."""
    sigma = np.vdot(y, x) / np.vdot(y, y)
    res = np.linalg.norm(x - sigma * y) / np.linalg.norm(x)
    return complex(sigma), float(res)


def cocycle_check(g1_word, g2_word, f_probe, tol: float = 1e-5):
    """sigma with We(g1) We(g2) f = sigma We(g1 g2) f, We(g1 g2) from canonical_word.

    Returns (sigma, proportionality residual).  Gaussian probes are handled in
    closed form and compared by L2 inner products.
    """
    n = (g1_word or g2_word)[0].n if (g1_word or g2_word) else None
    if f_probe is None:
        raise ValueError("probe function required")
    if isinstance(f_probe, GaussianFunction):
        n = n or f_probe.m
        lhs = weil_apply_word(list(g1_word) + list(g2_word), f_probe)
        g = word_element(list(g1_word) + list(g2_word), n)
        rhs = weil_apply_word(canonical_word(g), f_probe)
        rr, lr, ll = rhs.inner(rhs), lhs.inner(rhs), lhs.inner(lhs)
        sigma = complex(lr / rr)
        res2 = max(0.0, float((ll - abs(lr) ** 2 / rr).real))
        res = float(np.sqrt(res2 / ll.real))
    else:
        n = n or f_probe.m
        lhs = weil_apply_word(list(g1_word) + list(g2_word), f_probe)
        g = word_element(list(g1_word) + list(g2_word), n)
        rhs = weil_apply_word(canonical_word(g), f_probe)
        sigma, res = _proportionality(lhs.values.ravel(), rhs.values.ravel())
    if res > tol:
        raise ProportionalityError(f"proportionality residual {res:.2e} exceeds {tol:.0e}")
    return sigma, res


# ===================================================================== tensor intertwiner

def geometric_action(g: AffineSymplectic, f):
    """f -> exp(i sqrt2 z^T J t) f(L^{-1} z) on R^{2n} (Gaussian or callable)."""
    J = symplectic_form(g.n)
    Linv = np.linalg.inv(g.linear)
    q = np.sqrt(2) * (J @ g.shift)
    if isinstance(f, GaussianFunction):
        return gauss_affine_pullback(f, Linv).times_exp_quadratic(q=1j * q)
    return lambda z: np.exp(1j * np.asarray(z) @ q) * f(np.asarray(z) @ Linv.T)


def tensor_intertwiner_H_gaussian(f: GaussianFunction) -> GaussianFunction:
    n = f.m // 2
    F = gauss_fourier(f, +1, axes=np.arange(n))
    I = np.eye(n)
    M = np.block([[I, I], [I, -I]]) / np.sqrt(2)  # (u, v) -> ((u+v)/sqrt2, (u-v)/sqrt2)
    G = gauss_affine_pullback(F, M)
    return GaussianFunction(G.A, G.b, G.c - 0.5 * n * LOG2PI)


def _shear(values, axis_shift, axis_along, coords_along, h_shift, factor):
    shape = [1] * values.ndim
    shape[axis_along] = -1
    return fourier_shift(values, axis_shift, h_shift, factor * coords_along.reshape(shape))


def _rotate_pair(values, grid: GridField, i: int, j: int):
    """out(u, v) = F(R45 (u, -v)) in the (i, j) plane: (u+v)/sqrt2, (u-v)/sqrt2."""
    xi, xj = grid.axes()[i], grid.axes()[j]
    t = np.tan(np.pi / 8)
    s = np.sin(np.pi / 4)
    # w(p) = F(R p) with R = Sx(-t) Sy(s) Sx(-t) the +45 degree rotation
    v = _shear(values, i, j, xj, grid.spacing[i], -t)
    v = _shear(v, j, i, xi, grid.spacing[j], s)
    v = _shear(v, i, j, xj, grid.spacing[i], -t)
    return np.flip(v, axis=j)  # out(u, v) = w(u, -v); an index flip on a symmetric grid


def tensor_intertwiner_H(f):
    """H on a GaussianFunction (closed form) or on a symmetric square GridField.

    The grid path is a partial DFT in x followed by a 45 degree rotation in each
    (x_j, y_j) plane, done with three Fourier shears.
    """
    if isinstance(f, GaussianFunction):
        return tensor_intertwiner_H_gaussian(f)
    n = f.m // 2
    if f.m % 2:
        raise ValueError("H acts on R^{2n}")
    for j in range(f.m):
        ax = f.axes()[j]
        if abs(ax[0] + ax[-1]) > 1e-9 * abs(ax[0]):
            raise ValueError("H needs a grid symmetric about 0 (see symmetric_grid)")
    for j in range(n):
        if f.shape[j] != f.shape[n + j] or abs(f.spacing[j] - f.spacing[n + j]) > 1e-12:
            raise ValueError("paired axes must share the same nodes")
    v = f.values
    for j in range(n):
        v = _apply_along(v, dft_matrix(f.axes()[j], +1) / np.sqrt(2 * np.pi), j)
    for j in range(n):
        v = _rotate_pair(v, f, j, n + j)
    return f.with_values(v)


def tensor_weil_apply(W: WeilOperator, F, n: int):
    """(We (x) conj-We)(W) on functions of (u, v) in R^n x R^n."""
    F = weil_apply(W, F, axes=np.arange(n))
    return weil_apply(W.conj(), F, axes=np.arange(n, 2 * n))


def intertwining_residual(g_word, probes, grid: GridField | None = None) -> float:
    """max over probes of ||H(geo(g) f) - (We(g) (x) conj-We(g)) H f|| / ||f||.

    With ``grid`` the probes (Gaussians) are sampled and every operator runs on
    the grid; otherwise the closed-form Gaussian path is used.
    """
    if not g_word:
        return 0.0
    n = g_word[0].n
    g = word_element(g_word, n)
    worst = 0.0
    for f in probes:
        lhs_f = geometric_action(g, f)
        if grid is None:
            lhs = tensor_intertwiner_H(lhs_f)
            rhs = tensor_intertwiner_H(f)
            for W in reversed(g_word):
                rhs = tensor_weil_apply(W, rhs, n)
            d2 = lhs.inner(lhs) + rhs.inner(rhs) - 2 * lhs.inner(rhs).real
            r = np.sqrt(max(float(np.real(d2)), 0.0)) / f.norm()
        else:
            fg = sample_gaussian(f, grid)
            lhs = tensor_intertwiner_H(sample_gaussian(lhs_f, grid))
            rhs = tensor_intertwiner_H(fg)
            for W in reversed(g_word):
                rhs = tensor_weil_apply(W, rhs, n)
            r = lhs.with_values(lhs.values - rhs.values).norm() / fg.norm()
        worst = max(worst, float(r))
    return worst


# ===================================================================== Siegel layer

@dataclass(frozen=True)
class SiegelPoint:
    P: np.ndarray
    pi: np.ndarray
    sign: int = 1  # +1: Im P > 0, -1: Im P < 0

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=complex))
        pi = np.atleast_1d(np.asarray(self.pi, dtype=complex))
        if np.max(np.abs(P - P.T)) > 1e-10:
            raise ValueError("P must be symmetric")
        ev = np.linalg.eigvalsh(self.sign * P.imag)
        if ev.min() <= 1e-10:
            raise ValueError("Im P is not definite with margin 1e-10")
        if pi.shape != (P.shape[0],):
            raise ValueError("pi has the wrong length")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)


def siegel_transform(f, P, pi, conjugate: bool = False) -> complex:
    """K f(P, pi); GaussianFunction in closed form, GridField by the trapezoid rule.

    ``conjugate`` gives the transform to the lower half plane (i -> -i)."""
    pt = SiegelPoint(P, pi, -1 if conjugate else 1)
    if isinstance(f, GaussianFunction):
        if conjugate:
            return np.conj(siegel_transform_gaussian(f.conj(), np.conj(pt.P), np.conj(pt.pi)))
        return siegel_transform_gaussian(f, pt.P, pt.pi)
    eps = -1 if conjugate else 1
    u = f.points()
    n = f.m
    ph = (0.5j * eps * np.einsum("...i,ij,...j->...", u, pt.P, u)
          + 1j * eps / np.sqrt(2) * (u @ pt.pi))
    return complex(np.sum(f.values * np.exp(ph)) * f.cell_volume * (2 * np.pi) ** (-n / 4))


def phi_kernel_function(R, rho) -> GaussianFunction:
    """Phi_{R,rho} with K f(R, rho) = <f, Phi_{R,rho}>."""
    pt = SiegelPoint(R, rho)
    n = pt.P.shape[0]
    return GaussianFunction(1j * np.conj(pt.P), -1j / np.sqrt(2) * np.conj(pt.pi),
                            -0.25 * n * LOG2PI)


def kernel_eval(P, pi, R, rho) -> complex:
    """K Phi_{R,rho}(P, pi) = det(-i(P - conj R))^{-1/2}
    exp(-i/4 (pi - conj rho)^T (P - conj R)^{-1} (pi - conj rho)),
    principal branch through the eigenvalues of -i(P - conj R) (Re > 0)."""
    a, b = SiegelPoint(P, pi), SiegelPoint(R, rho)
    D = a.P - np.conj(b.P)
    w = a.pi - np.conj(b.pi)
    return complex(np.exp(-0.5 * logdet_branch(-1j * D)
                          - 0.25j * w @ np.linalg.solve(D, w)))


def siegel_action(W: WeilOperator, F):
    """Transformed function S(W) F with S(W) K = K We(W) (conjugate: lower half plane)."""
    if W.conjugate:
        inner = siegel_action(W.conj(), lambda P, pi: np.conj(F(np.conj(P), np.conj(pi))))
        return lambda P, pi: np.conj(inner(np.conj(P), np.conj(pi)))
    n = W.n
    k, p = W.kind, W.params
    if k == "nplus":
        return lambda P, pi: F(P + p, pi)
    if k == "modulate":
        return lambda P, pi: F(P, pi + np.sqrt(2) * p)
    if k == "shift":
        r = p
        return lambda P, pi: (np.exp(0.5j * r @ P @ r - 1j / np.sqrt(2) * r @ pi)
                              * F(P, pi - np.sqrt(2) * P @ r))
    if k == "gl":
        ai = np.linalg.inv(p)
        c = W.branch / abs(np.linalg.det(p))
        return lambda P, pi: c * F(ai.T @ P @ ai, ai.T @ pi)
    # J
    def out(P, pi):
        P = np.asarray(P, dtype=complex)
        Pi = np.linalg.inv(P)
        pref = np.exp(0.25j * np.pi * n - 0.5 * logdet_branch(-1j * P) - 0.25j * pi @ Pi @ pi)
        return pref * F(-Pi, -Pi @ pi)
    return out


def siegel_word_action(word, F):
    for W in reversed(word):
        F = siegel_action(W, F)
    return F


def commuting_square_residual(word, f: GaussianFunction, points) -> float:
    """max |K(We(word) f) - S(word) K f| / max |K We f| over Siegel points."""
    lhs_f = weil_apply_word(word, f)
    conj = bool(word) and word[0].conjugate
    Kf = lambda P, pi: siegel_transform(f, P, pi, conjugate=conj)
    rhs = siegel_word_action(word, Kf)
    diffs, scale = [], []
    for P, pi in points:
        a = siegel_transform(lhs_f, P, pi, conjugate=conj)
        diffs.append(abs(a - rhs(P, pi)))
        scale.append(abs(a))
    return float(max(diffs) / max(scale))


def random_siegel_points(n: int, count: int, rng, sign: int = 1):
    out = []
    for _ in range(count):
        X = rng.normal(0, 0.5, (n, n))
        Y = rng.normal(0, 0.3, (n, n))
        P = 0.5 * (X + X.T) + 1j * sign * (Y @ Y.T + 0.6 * np.eye(n))
        out.append((P, rng.normal(0, 0.5, n) + 1j * rng.normal(0, 0.3, n)))
    return out


# --------------------------------------------------------------------- system Z

def system_Z_minors(n: int):
    """All 2x2 minors (rows, cols) of the (n+1) x (n+1) matrix
    [[2 d/dp_kk or d/dp_kl, d/dpi_k], [d/dpi_l, i/2]]."""
    idx = range(n + 1)
    return [(r, c) for r in combinations(idx, 2) for c in combinations(idx, 2)]


def _Z_entry(n, r, c):
    """('c', value) for the constant corner or ('d', coef, var) with var a label."""
    if r == n and c == n:
        return ("c", 0.5j)
    if r == n or c == n:
        k = c if r == n else r
        return ("d", 1.0, ("pi", k))
    return ("d", 2.0 if r == c else 1.0, ("p", min(r, c), max(r, c)))


def _perturb(P, pi, var, delta):
    P = P.copy()
    pi = pi.copy()
    if var[0] == "pi":
        pi[var[1]] += delta
    else:
        k, l = var[1], var[2]
        P[k, l] += delta
        if k != l:
            P[l, k] += delta
    return P, pi


_D1 = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}


def _fd(F, P, pi, vars_, h):
    """4th-order central differences for up to two holomorphic derivatives."""
    if len(vars_) == 0:
        return F(P, pi)
    if len(vars_) == 1:
        return sum(w * F(*_perturb(P, pi, vars_[0], o * h)) for o, w in _D1.items()) / h
    if vars_[0] == vars_[1]:
        st = {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}
        return sum(w * F(*_perturb(P, pi, vars_[0], o * h)) for o, w in st.items()) / h ** 2
    tot = 0.0
    for o1, w1 in _D1.items():
        P1, pi1 = _perturb(P, pi, vars_[0], o1 * h)
        for o2, w2 in _D1.items():
            tot += w1 * w2 * F(*_perturb(P1, pi1, vars_[1], o2 * h))
    return tot / h ** 2


def system_Z_residual(F, P, pi, minor, h: float = 0.02) -> tuple[complex, float]:
    """Finite-difference value of one 2x2 minor applied to F, and its term scale.
    Richardson over (h, h/2)."""
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    pi = np.atleast_1d(np.asarray(pi, dtype=complex))
    n = P.shape[0]
    (r1, r2), (c1, c2) = minor
    terms = []
    for sgn, (a, b) in ((1, ((r1, c1), (r2, c2))), (-1, ((r1, c2), (r2, c1)))):
        ea, eb = _Z_entry(n, *a), _Z_entry(n, *b)
        coef, vars_ = float(sgn) + 0j, []
        for e in (ea, eb):
            if e[0] == "c":
                coef *= e[1]
            else:
                coef *= e[1]
                vars_.append(e[2])
        terms.append((coef, vars_))
    val, scale = 0j, 0.0
    for coef, vars_ in terms:
        d = (16 * _fd(F, P, pi, vars_, h / 2) - _fd(F, P, pi, vars_, h)) / 15
        val += coef * d
        scale += abs(coef * d)
    return val, scale


# --------------------------------------------------------------------- stretch

def stretch_block(P, Q, printed: bool = False) -> np.ndarray:
    """Quadratic-form block of the stretch kernel,
    [[2 (P-Q)^-1, (P-Q)^-1 (P+Q)], [(P+Q)(P-Q)^-1, -2 (P^-1 - Q^-1)^-1]].

    ``printed=True`` uses -2 (P^-1 - Q^-1) in the corner instead."""
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    D = np.linalg.inv(P - Q)
    S = P + Q
    corner = np.linalg.inv(P) - np.linalg.inv(Q)
    corner = -2 * (corner if printed else np.linalg.inv(corner))
    return np.block([[2 * D, D @ S], [S @ D, corner]])


def is_complex_symplectic(M, tol: float = 1e-8) -> bool:
    n = M.shape[0] // 2
    J = symplectic_form(n)
    return bool(np.max(np.abs(M.T @ J @ M - J)) < tol * max(1.0, np.max(np.abs(M)) ** 2))


def intertwiner_J(f: GaussianFunction, P, pi, Q, kappa) -> complex:
    """Stretch intertwiner (K (x) conj-K) H f at (P, pi; Q, kappa), P in Z+, Q in Z-."""
    a = SiegelPoint(P, pi, 1)
    b = SiegelPoint(Q, kappa, -1)
    n = f.m // 2
    if abs(np.linalg.det(a.P - b.P)) < 1e-14:  # pragma: no cover - impossible on Z+ x Z-
        raise ValueError("P - Q is singular")
    Hf = tensor_intertwiner_H_gaussian(f)
    Qm = np.zeros((2 * n, 2 * n), dtype=complex)
    Qm[:n, :n] = -1j * a.P
    Qm[n:, n:] = 1j * b.P
    q = np.concatenate([1j * a.pi, -1j * b.pi]) / np.sqrt(2)
    return complex(Hf.times_exp_quadratic(Q=Qm, q=q, q0=-0.5 * n * LOG2PI).integral())


def stretch_kernel_quadratic(P, Q, pi=None, kappa=None, h: float = 0.05) -> np.ndarray:
    """Quadratic block M of the stretch kernel, measured from intertwiner_J.

    For probes f_b(z) = exp(-|z|^2/2 + b^T z) the transform is
    const exp(1/2 (b + l)^T (I + i M)^{-1} (b + l)); the b-Hessian of its log
    (4th-order differences) gives M.
    """
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    n = P.shape[0]
    pi = np.zeros(n) if pi is None else pi
    kappa = np.zeros(n) if kappa is None else kappa
    m = 2 * n
    I = np.eye(m)
    logJ = lambda b: np.log(intertwiner_J(GaussianFunction(I, b, 0.0), P, pi, Q, kappa))
    Hs = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            tot = 0j
            for o1, w1 in _D1.items():
                for o2, w2 in _D1.items():
                    b = np.zeros(m)
                    b[i] += o1 * h
                    b[j] += o2 * h
                    tot += w1 * w2 * logJ(b)
            Hs[i, j] = tot / h ** 2
    return (np.linalg.inv(Hs) - I) / 1j


def cauchy_riemann_residual(F, P, pi, h: float = 1e-3) -> float:
    """max over complex coordinates of |dF/dx - (1/i) dF/dy| / max |dF/dx|
    (central differences along the real and imaginary directions)."""
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    pi = np.atleast_1d(np.asarray(pi, dtype=complex))
    n = P.shape[0]
    labels = [("pi", k) for k in range(n)] + [("p", k, l) for k in range(n) for l in range(k, n)]
    worst, scale = 0.0, 0.0
    for var in labels:
        dx = sum(w * F(*_perturb(P, pi, var, o * h)) for o, w in _D1.items()) / h
        dy = sum(w * F(*_perturb(P, pi, var, 1j * o * h)) for o, w in _D1.items()) / (1j * h)
        worst = max(worst, abs(dx - dy))
        scale = max(scale, abs(dx))
    return float(worst / scale) if scale else float(worst)


def stretch_action(W: WeilOperator, F):
    """(S (x) conj-S)(W) on functions F(P, pi, Q, kappa)."""
    Wc = W.conj()

    def out(P, pi, Q, kappa):
        def first(P_, pi_):
            return siegel_action(Wc, lambda Q_, k_: F(P_, pi_, Q_, k_))(Q, kappa)
        return siegel_action(W, first)(P, pi)
    return out


def stretch_equivariance_residual(word, f: GaussianFunction, points) -> float:
    """max |J(geo(g) f) - (S (x) conj-S)(g) J f| / max |J(geo(g) f)| over
    points (P, pi, Q, kappa)."""
    n = word[0].n
    g = word_element(word, n)
    fg = geometric_action(g, f)
    F = lambda P, pi, Q, k: intertwiner_J(f, P, pi, Q, k)
    for W in reversed(word):
        F = stretch_action(W, F)
    diffs, scale = [], []
    for P, pi, Q, k in points:
        a = intertwiner_J(fg, P, pi, Q, k)
        diffs.append(abs(a - F(P, pi, Q, k)))
        scale.append(abs(a))
    return float(max(diffs) / max(scale))
