"""Closed-form calculus of complex Gaussians exp(-1/2 x^T A x + b^T x + c).

Every transform in the package maps this family to itself, which makes it the
reference oracle for the numerical code.  Square roots of determinants use the
branch obtained by continuation from A = I: since Re A is positive definite all
eigenvalues of A lie in the open right half plane, and the principal logarithm
of each eigenvalue is continuous along the segment (1 - t) I + t A.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG2PI = np.log(2 * np.pi)


class GaussianClassError(ValueError):
    """Real part of the quadratic form is not positive definite."""


def logdet_branch(A) -> complex:
    """log det A with the branch continued from the identity (requires Re A > 0)."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    ev = np.linalg.eigvals(A)
    if np.any(ev.real <= 0):
        raise GaussianClassError("eigenvalue off the right half plane; branch undefined")
    return complex(np.sum(np.log(ev)))


def _min_re_eig(A) -> float:
    A = np.atleast_2d(A)
    if A.size == 0:
        return np.inf
    return float(np.min(np.linalg.eigvalsh(0.5 * (A.real + A.real.T))))


@dataclass(frozen=True)
class GaussianFunction:
    A: np.ndarray
    b: np.ndarray
    c: complex = 0.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        A = 0.5 * (A + A.T)
        b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        if b.shape != (A.shape[0],):
            raise ValueError("b has wrong length")
        if _min_re_eig(A) <= 0:
            raise GaussianClassError("Re A is not positive definite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", complex(self.c))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @classmethod
    def standard(cls, m: int, normalized: bool = True) -> "GaussianFunction":
        c = -0.5 * m * LOG2PI if normalized else 0.0
        return cls(np.eye(m), np.zeros(m), c)

    @classmethod
    def from_mean_cov(cls, mean, cov, amplitude: complex = 1.0) -> "GaussianFunction":
        """amplitude * exp(-1/2 (x-mean)^T cov^{-1} (x-mean))."""
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        A = np.linalg.inv(np.atleast_2d(cov))
        return cls(A, A @ mean, np.log(complex(amplitude)) - 0.5 * mean @ A @ mean)

    def __call__(self, x) -> np.ndarray:
        return gauss_eval(self, x)

    # algebra ---------------------------------------------------------------
    def times_exp_quadratic(self, Q=None, q=None, q0: complex = 0.0) -> "GaussianFunction":
        """Multiply by exp(-1/2 x^T Q x + q^T x + q0)."""
        A = self.A if Q is None else self.A + np.asarray(Q)
        b = self.b if q is None else self.b + np.asarray(q)
        return GaussianFunction(A, b, self.c + q0)

    def __mul__(self, other):
        if isinstance(other, GaussianFunction):
            return GaussianFunction(self.A + other.A, self.b + other.b, self.c + other.c)
        if other == 0:
            raise ValueError("zero multiple leaves the Gaussian family")
        return GaussianFunction(self.A, self.b, self.c + np.log(complex(other)))

    __rmul__ = __mul__

    def conj(self) -> "GaussianFunction":
        return GaussianFunction(self.A.conj(), self.b.conj(), np.conj(self.c))

    def integral(self) -> complex:
        return complex(np.exp(gauss_integrate_out(self, self.m).c))

    def inner(self, other: "GaussianFunction") -> complex:
        """<self, other> = int self * conj(other)."""
        return (self * other.conj()).integral()

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self).real))


def gauss_eval(G: GaussianFunction, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != G.m:
        raise ValueError("dimension mismatch")
    quad = np.einsum("...i,ij,...j->...", x, G.A, x)
    return np.exp(-0.5 * quad + x @ G.b + G.c)


def _quad_pullback(A, b, c, M, v):
    Av = A @ v
    return M.T @ A @ M, M.T @ (b - Av), c - 0.5 * v @ Av + b @ v


def gauss_affine_pullback(G: GaussianFunction, M, v=None) -> GaussianFunction:
    """x -> G(M x + v)."""
    M = np.atleast_2d(np.asarray(M))
    v = np.zeros(G.m) if v is None else np.atleast_1d(np.asarray(v))
    if M.shape[0] != G.m:
        raise ValueError("M has wrong number of rows")
    return GaussianFunction(*_quad_pullback(G.A, G.b, G.c, M, v))


def _schur(A, b, c, k):
    """Integrate exp(-1/2 z^T A z + b^T z + c) over the last k variables."""
    m = A.shape[0] - k
    A11, A12, A22 = A[:m, :m], A[:m, m:], A[m:, m:]
    b1, b2 = b[:m], b[m:]
    if _min_re_eig(A22) <= 0:
        raise GaussianClassError("integrated block is not integrable")
    X = np.linalg.solve(A22, np.column_stack([A12.T, b2]))
    W, w = X[:, :m], X[:, m]
    A_new = A11 - A12 @ W
    b_new = b1 - A12 @ w
    c_new = c + 0.5 * k * LOG2PI - 0.5 * logdet_branch(A22) + 0.5 * b2 @ w
    return 0.5 * (A_new + A_new.T), b_new, c_new


def gauss_integrate_out(G: GaussianFunction, k: int) -> GaussianFunction:
    """Marginal over the last k coordinates (k = m gives the 0-dim total integral in c)."""
    if not 0 <= k <= G.m:
        raise ValueError("k out of range")
    A, b, c = _schur(G.A, G.b, G.c, k)
    if A.size == 0:
        return _Scalar(c)
    return GaussianFunction(A, b, c)


class _Scalar(GaussianFunction):
    """0-dimensional Gaussian, i.e. the constant exp(c)."""

    def __init__(self, c):
        object.__setattr__(self, "A", np.zeros((0, 0), dtype=complex))
        object.__setattr__(self, "b", np.zeros(0, dtype=complex))
        object.__setattr__(self, "c", complex(c))

    def __post_init__(self):  # pragma: no cover - construction bypasses checks
        pass


def gauss_fourier(G: GaussianFunction, sign: int = 1, scale: complex = 1.0,
                  axes=None) -> GaussianFunction:
    """scale * int G(x) exp(i sign xi_B^T x_B) dx_B over the axes B (default: all).

    The frequency variables take the positions of the transformed axes.
    """
    m = G.m
    B = np.arange(m) if axes is None else np.atleast_1d(np.asarray(axes, dtype=int))
    R = np.setdiff1d(np.arange(m), B)
    k = B.size
    # joint variables (x_R, xi, x_B); the cross term i s xi^T x_B enters A as -i s
    order = np.concatenate([R, B])
    A0 = G.A[np.ix_(order, order)]
    r = R.size
    J = np.zeros((m + k, m + k), dtype=complex)
    J[:r, :r] = A0[:r, :r]
    J[:r, r + k:] = A0[:r, r:]
    J[r + k:, :r] = A0[r:, :r]
    J[r + k:, r + k:] = A0[r:, r:]
    J[r:r + k, r + k:] = -1j * sign * np.eye(k)
    J[r + k:, r:r + k] = -1j * sign * np.eye(k)
    bj = np.concatenate([G.b[R], np.zeros(k), G.b[B]])
    A1, b1, c1 = _schur(J, bj, G.c + np.log(complex(scale)), k)
    # back to original ordering: position B gets xi
    inv = np.empty(m, dtype=int)
    inv[order] = np.arange(m)
    return GaussianFunction(A1[np.ix_(inv, inv)], b1[inv], c1)


def radon_flat_gaussian(G: GaussianFunction, T, tau) -> np.ndarray:
    """Exact R_flat G(T, tau) = int G(T y + tau, y) dy.

    Vectorized: T of shape (..., n, n) and tau of shape (..., n) broadcast.
    """
    n = G.m // 2
    T = np.asarray(T, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if T.ndim == 0:
        T = T.reshape(1, 1)
    if tau.ndim == 0:
        tau = tau.reshape(1)
    A, b = G.A, G.b
    Axx, Axy, Ayy = A[:n, :n], A[:n, n:], A[n:, n:]
    # G(Ty + tau, y): quadratic in y with
    # Q = T Axx T + T Axy + Ayx T + Ayy, linear l = T bx + by - (T Axx + Ayx) tau
    TA = np.swapaxes(T, -1, -2) @ Axx
    Q = TA @ T + np.swapaxes(T, -1, -2) @ Axy + Axy.T @ T + Ayy
    l = (np.swapaxes(T, -1, -2) @ b[:n] + b[n:]
         - np.einsum("...ij,...j->...i", TA + Axy.T, tau))
    c = G.c - 0.5 * np.einsum("...i,ij,...j->...", tau, Axx, tau) + tau @ b[:n]
    ev = np.linalg.eigvals(Q)
    logdet = np.sum(np.log(ev), axis=-1)
    w = np.linalg.solve(Q, l[..., None])[..., 0]
    expo = c + 0.5 * n * LOG2PI - 0.5 * logdet + 0.5 * np.einsum("...i,...i->...", l, w)
    return np.exp(expo)


def radon_flat_gaussian_tau(G: GaussianFunction, T) -> GaussianFunction:
    """For fixed T, tau -> R_flat G(T, tau) as a Gaussian in tau."""
    n = G.m // 2
    T = np.atleast_2d(np.asarray(T, dtype=float))
    I = np.eye(n)
    M = np.block([[I, T], [np.zeros((n, n)), I]])  # (tau, y) -> (T y + tau, y)
    return gauss_integrate_out(gauss_affine_pullback(G, M), n)


def fourier_slice_gaussian(G: GaussianFunction, T, v) -> complex:
    """int R_flat G(T, tau) exp(i v^T tau) dtau, in closed form."""
    F = radon_flat_gaussian_tau(G, T)
    return complex(gauss_eval(gauss_fourier(F, +1), np.atleast_1d(v)))


# ------------------------------------------------------ Weil generators

def weil_generator_on_gaussian(kind: str, params, G: GaussianFunction,
                               conjugate: bool = False, axes=None) -> GaussianFunction:
    """Apply one Weil generator to a Gaussian, acting on the variables ``axes``
    (default: all) with the other variables as spectators.

    Formulas on R^n (``conjugate`` replaces i by -i throughout):
      gl:       f -> det(a)^{1/2} f(a u)            (principal branch)
      nplus:    f -> f(u) exp(i/2 u^T b u)
      J:        f -> (i/2pi)^{n/2} int exp(i xi^T u) f(xi) dxi
      shift:    f -> f(u + r)
      modulate: f -> f(u) exp(i s^T u)
    """
    m = G.m
    B = np.arange(m) if axes is None else np.atleast_1d(np.asarray(axes, dtype=int))
    n = B.size
    eps = -1.0 if conjugate else 1.0
    if kind == "gl":
        a = np.atleast_2d(np.asarray(params, dtype=float))
        M = np.eye(m)
        M[np.ix_(B, B)] = a
        H = gauss_affine_pullback(G, M)
        half = 0.5 * np.log(complex(np.linalg.det(a)))
        if conjugate:
            half = np.conj(half)
        return GaussianFunction(H.A, H.b, H.c + half)
    if kind == "nplus":
        Q = np.zeros((m, m), dtype=complex)
        Q[np.ix_(B, B)] = -1j * eps * np.atleast_2d(np.asarray(params, dtype=float))
        return G.times_exp_quadratic(Q=Q)
    if kind == "J":
        pref = 0.5 * n * (np.log(1j * eps) - LOG2PI)
        H = gauss_fourier(G, sign=int(eps), axes=B)
        return GaussianFunction(H.A, H.b, H.c + pref)
    if kind == "shift":
        v = np.zeros(m)
        v[B] = np.atleast_1d(params)
        return gauss_affine_pullback(G, np.eye(m), v)
    if kind == "modulate":
        q = np.zeros(m, dtype=complex)
        q[B] = 1j * eps * np.atleast_1d(np.asarray(params, dtype=float))
        return G.times_exp_quadratic(q=q)
    raise ValueError(f"unknown generator kind {kind!r}")


def siegel_transform_gaussian(G: GaussianFunction, P, pi) -> complex:
    """(2pi)^{-n/4} int G(u) exp(i/2 u^T P u + i/sqrt2 u^T pi) du."""
    n = G.m
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    pi = np.atleast_1d(np.asarray(pi, dtype=complex))
    if np.min(np.linalg.eigvalsh(0.5 * (P.imag + P.imag.T))) <= 0:
        raise ValueError("P is outside the Siegel upper half plane")
    H = G.times_exp_quadratic(Q=-1j * P, q=1j * pi / np.sqrt(2), q0=-0.25 * n * LOG2PI)
    return H.integral()


def random_gaussian(m: int, rng, complex_part: float = 0.2, shift: float = 0.5,
                    eig_range=(0.5, 2.0)) -> GaussianFunction:
    """Random test Gaussian: covariance eigenvalues in ``eig_range`` under a random
    rotation, a symmetric imaginary part of size ``complex_part`` in A, and a
    mean offset of size ``shift``."""
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    cov = Q @ np.diag(rng.uniform(*eig_range, m)) @ Q.T
    A = np.linalg.inv(cov).astype(complex)
    if complex_part:
        B = rng.standard_normal((m, m)) * complex_part
        A = A + 0.5j * (B + B.T)
    mean = rng.normal(0, shift, m)
    b = A @ mean + 1j * complex_part * rng.standard_normal(m)
    return GaussianFunction(A, b, 0.0)
