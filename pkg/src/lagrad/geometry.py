"""Charts on the affine Lagrangian Grassmannian.

* flat chart (T, tau): the subspace {(T y + tau, y)};
* compact chart (S, sigma): the graph u = S conj(u) + sigma in the coordinates
  u = exp(-i pi/4)(x + i y)/sqrt2, so that sigma = -S conj(sigma);
* torus family L[phi, p]: x_j cos(phi_j) + y_j sin(phi_j) = p_j.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symplectic import (SingularChartError, _OMEGA, cayley, inverse_cayley,
                         make_unitary, symmetrize)

MAX_RETRIES = 64


@dataclass(frozen=True)
class FlatChartPoint:
    T: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        T = symmetrize(np.atleast_2d(np.asarray(self.T, dtype=float)), tol=1e-10)
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float))
        if tau.shape != (T.shape[0],):
            raise ValueError("tau has wrong length")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "tau", tau)

    @property
    def n(self) -> int:
        return self.T.shape[0]

    def points(self, y) -> np.ndarray:
        """Points (T y + tau, y) for y of shape (..., n)."""
        y = np.asarray(y, dtype=float)
        return np.concatenate([y @ self.T.T + self.tau, y], axis=-1)


@dataclass(frozen=True)
class CompactChartPoint:
    S: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S, dtype=complex))
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=complex))
        n = S.shape[0]
        if np.max(np.abs(S @ S.conj().T - np.eye(n))) > 1e-10:
            raise ValueError("S is not unitary")
        if np.max(np.abs(S - S.T)) > 1e-10:
            raise ValueError("S is not symmetric")
        if np.max(np.abs(sigma + S @ sigma.conj())) > 1e-10 * max(1.0, np.max(np.abs(sigma))):
            raise ValueError("sigma violates sigma = -S conj(sigma)")
        object.__setattr__(self, "S", 0.5 * (S + S.T))
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return self.S.shape[0]


@dataclass(frozen=True)
class TorusChartPoint:
    phi: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        phi = np.mod(np.atleast_1d(np.asarray(self.phi, dtype=float)), 2 * np.pi)
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if phi.shape != p.shape:
            raise ValueError("phi and p must have equal length")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "p", p)


def flat_to_compact(q: FlatChartPoint) -> CompactChartPoint:
    S = cayley(q.T)
    n = q.n
    sigma = _OMEGA * (np.eye(n) - 1j * S) @ q.tau / np.sqrt(2)
    return CompactChartPoint(S, sigma)


def compact_to_flat(q: CompactChartPoint) -> FlatChartPoint:
    T = inverse_cayley(q.S)
    if np.iscomplexobj(T):
        raise SingularChartError("compact point does not map to a real flat point")
    n = q.n
    W = np.linalg.inv(np.eye(n) - 1j * q.S)
    tau = np.sqrt(2) * np.conj(_OMEGA) * W @ q.sigma
    return FlatChartPoint(T, tau.real)


def compact_points(q: CompactChartPoint, w) -> np.ndarray:
    """Real points of the subspace described by (S, sigma).

    Uses u = w + S conj(w) + sigma/2, which solves u = S conj(u) + sigma for
    every w in C^n because S conj(S) = I.
    """
    w = np.asarray(w, dtype=complex)
    u = w + np.conj(w) @ q.S.T + 0.5 * q.sigma
    v = u * np.conj(_OMEGA) * np.sqrt(2)  # x + i y
    return np.concatenate([v.real, v.imag], axis=-1)


def compact_residual(q: CompactChartPoint, pts) -> float:
    """max |u - S conj(u) - sigma| over real points (x, y)."""
    pts = np.asarray(pts, dtype=float)
    n = q.n
    u = _OMEGA * (pts[..., :n] + 1j * pts[..., n:]) / np.sqrt(2)
    return float(np.max(np.abs(u - np.conj(u) @ q.S.T - q.sigma)))


def euclid_measure_factor_flat(T) -> float:
    """det(I + T^2)^{-1/2}: density of the pushforward of dy relative to surface measure."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    return float(np.linalg.det(np.eye(T.shape[0]) + T @ T) ** -0.5)


def euclid_measure_factor_flat_alt(T) -> float:
    T = np.atleast_2d(np.asarray(T, dtype=float))
    return float(1.0 / abs(np.linalg.det(np.eye(T.shape[0]) + 1j * T)))


def euclid_measure_factor_compact(S, floor: float = 0.0) -> float:
    """|det(1 - iS)| / 2^n, equal to euclid_measure_factor_flat(T) when S = cayley(T).

    Vanishes on the chart boundary S with eigenvalue -i; values at or below
    ``floor`` raise :class:`SingularChartError`.
    """
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    n = S.shape[0]
    val = float(abs(np.linalg.det(np.eye(n) - 1j * S)) / 2 ** n)
    if val <= floor:
        raise SingularChartError("compact point on the chart boundary", val)
    return val


def torus_to_flat(q: TorusChartPoint) -> FlatChartPoint:
    cos = np.cos(q.phi)
    if np.any(np.abs(cos) < 1e-12):
        raise SingularChartError("torus subspace leaves the flat chart", float(np.min(np.abs(cos))))
    return FlatChartPoint(np.diag(-np.tan(q.phi)), q.p / cos)


def torus_residual(q: TorusChartPoint, pts) -> float:
    pts = np.asarray(pts, dtype=float)
    n = q.phi.size
    x, y = pts[..., :n], pts[..., n:]
    return float(np.max(np.abs(x * np.cos(q.phi) + y * np.sin(q.phi) - q.p)))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def unitary_subspace(u: np.ndarray, x) -> FlatChartPoint:
    """Flat coordinates of x + u.L0 where L0 = {(0, y)} and u acts as [[a, b], [-b, a]]."""
    g = make_unitary(u)
    x = np.asarray(x, dtype=float)
    n = g.n
    # u.L0 = {(b y, a y)}, so T = b a^{-1}
    det = np.linalg.det(g.d)
    if abs(det) < 1e-8:
        raise SingularChartError("subspace leaves the flat chart", abs(det))
    T = symmetrize(g.b @ np.linalg.inv(g.d), tol=1e-8)
    tau = x[:n] - T @ x[n:]
    return FlatChartPoint(T, tau)


def lagrangians_through_point(x, count: int, seed) -> list[FlatChartPoint]:
    """Sample affine Lagrangian subspaces through x from the U(n)-invariant law."""
    if count < 1:
        raise ValueError("count must be positive")
    x = np.asarray(x, dtype=float)
    n = x.size // 2
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        for _attempt in range(MAX_RETRIES):
            try:
                out.append(unitary_subspace(haar_unitary(n, rng), x))
                break
            except SingularChartError:
                continue
        else:
            raise SingularChartError("too many chart-singular samples")
    return out
