"""Affine symplectic group ASp(2n, R), its complex model and chart actions.

An element acts on R^{2n} = {(x, y)} by

    (x, y) -> (a x + b y + r, c x + d y + s).

The complex model is obtained by conjugation with the matrix ``KT`` below,
which sends a real vector (x, y) to (u, conj(u)) with
u = exp(-i pi/4) (x + i y) / sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_N = 8
_OMEGA = np.exp(-0.25j * np.pi)


class SingularChartError(ValueError):
    """Raised when a chart map hits its singular set."""

    def __init__(self, message: str, det: float = 0.0):
        super().__init__(message)
        self.det = det


def symplectic_form(n: int) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def is_symplectic(M, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError("symplectic test needs a square matrix of even size")
    J = symplectic_form(M.shape[0] // 2)
    return bool(np.max(np.abs(M @ J @ M.T - J)) <= tol)


def symmetrize(T, tol: float | None = 1e-10) -> np.ndarray:
    """Return (T + T^t)/2, optionally checking the asymmetry first."""
    T = np.asarray(T)
    if tol is not None:
        scale = max(1.0, float(np.max(np.abs(T)))) if T.size else 1.0
        resid = float(np.max(np.abs(T - T.T))) if T.size else 0.0
        if resid > tol * scale:
            raise ValueError(f"matrix is not symmetric (residual {resid:.3e})")
    return 0.5 * (T + T.T)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in [1, {MAX_N}], got {n}")


@dataclass(frozen=True)
class AffineSymplectic:
    """Element of ASp(2n, R) stored as a (2n x 2n) linear part plus a shift."""

    linear: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        L = np.array(self.linear, dtype=float)
        t = np.array(self.shift, dtype=float).reshape(-1)
        if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] % 2:
            raise ValueError("linear part must be square of even size")
        n = L.shape[0] // 2
        _check_n(n)
        if t.shape != (2 * n,):
            raise ValueError("shift has wrong length")
        tol = 1e-10 * max(1.0, float(np.max(np.abs(L))) ** 2)
        if not is_symplectic(L, tol):
            raise ValueError("linear part is not symplectic")
        L.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "linear", L)
        object.__setattr__(self, "shift", t)

    @classmethod
    def from_blocks(cls, a, b, c, d, r=None, s=None) -> "AffineSymplectic":
        a = np.atleast_2d(np.asarray(a, dtype=float))
        n = a.shape[0]
        r = np.zeros(n) if r is None else np.atleast_1d(np.asarray(r, dtype=float))
        s = np.zeros(n) if s is None else np.atleast_1d(np.asarray(s, dtype=float))
        L = np.block([[a, np.atleast_2d(b)], [np.atleast_2d(c), np.atleast_2d(d)]])
        return cls(L, np.concatenate([r, s]))

    @classmethod
    def identity(cls, n: int) -> "AffineSymplectic":
        return cls(np.eye(2 * n), np.zeros(2 * n))

    @classmethod
    def translation(cls, r, s) -> "AffineSymplectic":
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return cls(np.eye(2 * r.size), np.concatenate([r, np.atleast_1d(s).astype(float)]))

    @property
    def n(self) -> int:
        return self.linear.shape[0] // 2

    a = property(lambda self: self.linear[: self.n, : self.n])
    b = property(lambda self: self.linear[: self.n, self.n:])
    c = property(lambda self: self.linear[self.n:, : self.n])
    d = property(lambda self: self.linear[self.n:, self.n:])
    r = property(lambda self: self.shift[: self.n])
    s = property(lambda self: self.shift[self.n:])

    def matrix(self) -> np.ndarray:
        """(2n+1) x (2n+1) homogeneous realization."""
        m = 2 * self.n
        H = np.eye(m + 1)
        H[:m, :m] = self.linear
        H[:m, m] = self.shift
        return H

    def inverse(self) -> "AffineSymplectic":
        J = symplectic_form(self.n)
        Linv = -J @ self.linear.T @ J
        return AffineSymplectic(Linv, -Linv @ self.shift)

    def apply(self, v) -> np.ndarray:
        """Act on points of R^{2n} (last axis)."""
        return np.asarray(v) @ self.linear.T + self.shift

    def __matmul__(self, other: "AffineSymplectic") -> "AffineSymplectic":
        return compose(self, other)


def compose(g1: AffineSymplectic, g2: AffineSymplectic) -> AffineSymplectic:
    """Return g1 g2 (apply g2 first)."""
    if g1.n != g2.n:
        raise ValueError("dimension mismatch in compose")
    return AffineSymplectic(g1.linear @ g2.linear, g1.linear @ g2.shift + g1.shift)


# ---------------------------------------------------------------- generators

def make_gl(a) -> AffineSymplectic:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if abs(np.linalg.det(a)) < 1e-14:
        raise ValueError("make_gl needs an invertible matrix")
    n = a.shape[0]
    Z = np.zeros((n, n))
    return AffineSymplectic.from_blocks(a, Z, Z, np.linalg.inv(a).T)


def _sym_param(b, name):
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if b.shape[0] != b.shape[1] or np.max(np.abs(b - b.T), initial=0.0) > 1e-12:
        raise ValueError(f"{name} must be a symmetric matrix")
    return 0.5 * (b + b.T)


def make_n_plus(b) -> AffineSymplectic:
    b = _sym_param(b, "make_n_plus")
    n = b.shape[0]
    I = np.eye(n)
    return AffineSymplectic.from_blocks(I, b, np.zeros((n, n)), I)


def make_n_minus(c) -> AffineSymplectic:
    c = _sym_param(c, "make_n_minus")
    n = c.shape[0]
    I = np.eye(n)
    return AffineSymplectic.from_blocks(I, np.zeros((n, n)), c, I)


def make_J(n: int = 1) -> AffineSymplectic:
    return AffineSymplectic(symplectic_form(n), np.zeros(2 * n))


def make_unitary(u) -> AffineSymplectic:
    """Embed a unitary u = a + i b as the real block matrix [[a, b], [-b, a]]."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    a, b = u.real, u.imag
    return AffineSymplectic.from_blocks(a, b, -b, a)


def random_symplectic(n: int, seed, word_length: int = 4, translations: bool = False,
                      scale: float = 1.0) -> AffineSymplectic:
    """Random word in the generators gl, n_plus, n_minus, J.

    Entries are uniform in [-scale, scale]; gl factors use I + (uniform) / 2 so
    they stay comfortably invertible.  Not Haar distributed.
    """
    if word_length < 1:
        raise ValueError("word_length must be at least 1")
    _check_n(n)
    rng = np.random.default_rng(seed)
    g = AffineSymplectic.identity(n)
    for _ in range(word_length):
        kind = rng.integers(4)
        if kind == 0:
            a = np.eye(n) + 0.5 * scale * rng.uniform(-1, 1, (n, n))
            while abs(np.linalg.det(a)) < 0.1:
                a = np.eye(n) + 0.5 * scale * rng.uniform(-1, 1, (n, n))
            h = make_gl(a)
        elif kind in (1, 2):
            m = scale * rng.uniform(-1, 1, (n, n))
            m = 0.5 * (m + m.T)
            h = make_n_plus(m) if kind == 1 else make_n_minus(m)
        else:
            h = make_J(n)
        g = compose(g, h)
    if translations:
        g = compose(AffineSymplectic.translation(*scale * rng.uniform(-1, 1, (2, n))), g)
    return g


# ------------------------------------------------------------ chart actions

def _regular_inverse(M: np.ndarray, what: str) -> np.ndarray:
    det = np.linalg.det(M)
    if abs(det) <= 1e-12:
        raise SingularChartError(f"{what} is singular (|det| = {abs(det):.3e})", abs(det))
    return np.linalg.inv(M)


def mobius_action(g: AffineSymplectic, T) -> np.ndarray:
    """T -> (aT + b)(cT + d)^{-1}."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    W = _regular_inverse(g.c @ T + g.d, "cT + d")
    return symmetrize((g.a @ T + g.b) @ W, tol=1e-10)


def affine_action(g: AffineSymplectic, T, tau) -> tuple[np.ndarray, np.ndarray]:
    """Image of the subspace x = T y + tau under g, as a flat chart pair."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    Tn = mobius_action(g, T)
    tau_n = g.a @ tau + g.r - Tn @ (g.c @ tau + g.s)
    return Tn, tau_n


def cayley(T) -> np.ndarray:
    """S = (T + i)(iT + 1)^{-1}."""
    T = np.atleast_2d(np.asarray(T))
    I = np.eye(T.shape[0])
    W = _regular_inverse(1j * T + I, "iT + 1")
    return symmetrize((T + 1j * I) @ W, tol=1e-10)


def inverse_cayley(S) -> np.ndarray:
    """T = (1 - iS)^{-1}(S - i), the inverse of :func:`cayley`."""
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    I = np.eye(S.shape[0])
    W = _regular_inverse(I - 1j * S, "1 - iS")
    T = symmetrize(W @ (S - 1j * I), tol=1e-8)
    return T.real if np.max(np.abs(T.imag)) < 1e-8 * max(1.0, np.max(np.abs(T))) else T


# ------------------------------------------------------------ complex model

def chart_matrix(n: int) -> np.ndarray:
    """KT = exp(-i pi/4) K with K = (1/sqrt2)[[I, iI], [iI, I]]."""
    I = np.eye(n)
    return _OMEGA / np.sqrt(2) * np.block([[I, 1j * I], [1j * I, I]])


@dataclass(frozen=True)
class ComplexAffineSymplectic:
    """Element in the complex model: linear block [[Phi, Psi], [conj Psi, conj Phi]],
    translation column (h, conj h)."""

    Phi: np.ndarray
    Psi: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        Phi = np.atleast_2d(np.array(self.Phi, dtype=complex))
        Psi = np.atleast_2d(np.array(self.Psi, dtype=complex))
        h = np.atleast_1d(np.array(self.h, dtype=complex))
        n = Phi.shape[0]
        I = np.eye(n)
        scale = max(1.0, float(np.max(np.abs(Phi))) ** 2)
        r1 = Phi @ Phi.conj().T - Psi @ Psi.conj().T - I
        r2 = Phi @ Psi.T - Psi @ Phi.T
        if max(np.max(np.abs(r1)), np.max(np.abs(r2))) > 1e-10 * scale:
            raise ValueError("(Phi, Psi) violates the complex symplectic relations")
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "Psi", Psi)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.Phi.shape[0]

    def block(self) -> np.ndarray:
        return np.block([[self.Phi, self.Psi], [self.Psi.conj(), self.Phi.conj()]])


def real_to_complex_model(g: AffineSymplectic) -> ComplexAffineSymplectic:
    n = g.n
    K = chart_matrix(n)
    M = K @ g.linear @ np.linalg.inv(K)
    t = K @ g.shift
    return ComplexAffineSymplectic(M[:n, :n], M[:n, n:], t[:n])


def complex_to_real_model(gc: ComplexAffineSymplectic) -> AffineSymplectic:
    n = gc.n
    K = chart_matrix(n)
    Kinv = np.linalg.inv(K)
    L = Kinv @ gc.block() @ K
    t = Kinv @ np.concatenate([gc.h, gc.h.conj()])
    return AffineSymplectic(L.real, t.real)


def compact_action(gc: ComplexAffineSymplectic, S, sigma):
    """Action on compact chart coordinates (S, sigma)."""
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=complex))
    Phi, Psi = gc.Phi, gc.Psi
    W = _regular_inverse(Psi.conj() @ S + Phi.conj(), "conj(Psi) S + conj(Phi)")
    Sn = symmetrize((Phi @ S + Psi) @ W, tol=1e-9)
    sig_n = Phi @ sigma + gc.h - Sn @ (Psi.conj() @ sigma + gc.h.conj())
    return Sn, sig_n


def compact_cocycle(gc: ComplexAffineSymplectic, S) -> float:
    """c(g, S) = |det(conj(Psi) S + conj(Phi))|."""
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    return float(abs(np.linalg.det(gc.Psi.conj() @ S + gc.Phi.conj())))
