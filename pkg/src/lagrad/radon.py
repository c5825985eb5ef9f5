"""Forward Lagrangian Radon transforms and the group actions on their images.

R_flat f(T, tau) = int f(T y + tau, y) dy              (pushforward of dy)
R_comp f(L)      = int_L f d(surface measure)
                 = R_flat f(T, tau) / euclid_measure_factor_flat(T)
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .gaussian import GaussianFunction, gauss_affine_pullback, radon_flat_gaussian
from .geometry import (CompactChartPoint, FlatChartPoint, TorusChartPoint,
                       compact_to_flat, euclid_measure_factor_flat)
from .grid import GridField, interpolate
from .symplectic import (AffineSymplectic, ComplexAffineSymplectic, affine_action,
                         compact_action, compact_cocycle)


class QuadratureError(RuntimeError):
    """The integrand does not decay inside the quadrature box."""


@dataclass(frozen=True)
class Quadrature:
    """Tensor Gauss-Hermite rule after re-centring on the subspace.

    ``width`` is the assumed standard deviation of the input around the origin;
    ``tail_tol`` bounds the relative size of the integrand at the outermost nodes.
    """

    order: int = 64
    width: float = 1.0
    tail_tol: float = 1e-10
    check_tail: bool = True


@lru_cache(maxsize=16)
def _hermite(order: int):
    return np.polynomial.hermite.hermgauss(order)


def _tensor_nodes(order: int, n: int):
    x, w = _hermite(order)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    wgrids = np.meshgrid(*([w] * n), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
    return nodes, np.prod([g.reshape(-1) for g in wgrids], axis=0)


def _as_callable(f):
    if isinstance(f, GridField):
        return lambda z: interpolate(f, z, order=1)
    if isinstance(f, GaussianFunction):
        return f
    return f


def radon_flat_numeric(f, p: FlatChartPoint, quad: Quadrature | None = None) -> complex:
    """Quadrature value of int f(T y + tau, y) dy.

    Callables receive arrays of shape (k, 2n).  GridFields are integrated by the
    trapezoid rule along the subspace with multilinear interpolation.
    """
    if isinstance(f, GridField):
        return _radon_flat_grid_input(f, p)
    quad = quad or Quadrature()
    fn = _as_callable(f)
    n = p.n
    T, tau = p.T, p.tau
    Mt = np.eye(n) + T @ T
    y0 = -np.linalg.solve(Mt, T @ tau)
    ev, V = np.linalg.eigh(Mt)
    B = V @ np.diag(ev ** -0.5) @ V.T * (np.sqrt(2) * quad.width)
    nodes, wts = _tensor_nodes(quad.order, n)
    ys = y0 + nodes @ B.T
    vals = np.asarray(fn(p.points(ys)), dtype=complex)
    integrand = vals * np.exp(np.sum(nodes ** 2, axis=1))
    if quad.check_tail:
        peak = np.max(np.abs(vals))
        if peak > 0:
            rim = np.max(np.abs(nodes), axis=1) >= np.max(np.abs(nodes)) - 1e-12
            if np.max(np.abs(vals[rim])) > quad.tail_tol * peak:
                raise QuadratureError("integrand has not decayed at the quadrature rim")
    return complex(np.sum(wts * integrand) * abs(np.linalg.det(B)))


def _radon_flat_grid_input(f: GridField, p: FlatChartPoint, nodes_per_axis: int | None = None) -> complex:
    n = p.n
    if f.m != 2 * n:
        raise ValueError("grid dimension does not match the chart")
    lo = f.origin[n:]
    hi = f.origin[n:] + f.spacing[n:] * (np.array(f.shape[n:]) - 1)
    k = nodes_per_axis or 2 * max(f.shape[n:])
    axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    Y = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    vals = interpolate(f, p.points(Y), order=1)
    w = np.ones(k)
    w[[0, -1]] = 0.5
    W = w
    for _ in range(n - 1):
        W = np.multiply.outer(W, w)
    dy = np.prod([(b - a) / (k - 1) for a, b in zip(lo, hi)])
    return complex(np.sum(W.reshape(-1) * vals) * dy)


def radon_comp_numeric(f, q: CompactChartPoint, quad: Quadrature | None = None,
                       boundary_tol: float = 1e-6) -> complex:
    """R_comp via the flat chart: R_flat / euclid_measure_factor_flat."""
    n = q.n
    if abs(np.linalg.det(np.eye(n) - 1j * q.S)) <= boundary_tol:
        raise ValueError("compact point too close to the chart boundary")
    p = compact_to_flat(q)
    return radon_flat_numeric(f, p, quad) / euclid_measure_factor_flat(p.T)


def radon_surface_numeric(f, base_point, basis, order: int = 48, width: float = 1.0) -> complex:
    """Integral over {base_point + basis w} against surface measure.

    ``basis`` is orthonormalized first; independent of any chart.
    """
    Q, _ = np.linalg.qr(np.asarray(basis, dtype=float))
    n = Q.shape[1]
    nodes, wts = _tensor_nodes(order, n)
    w = nodes * np.sqrt(2) * width
    z = np.asarray(base_point) + w @ Q.T
    vals = np.asarray(_as_callable(f)(z), dtype=complex)
    return complex(np.sum(wts * vals * np.exp(np.sum(nodes ** 2, axis=1))) * (np.sqrt(2) * width) ** n)


def radon_comp_gaussian(G: GaussianFunction, q: CompactChartPoint) -> complex:
    p = compact_to_flat(q)
    return complex(radon_flat_gaussian(G, p.T, p.tau)) / euclid_measure_factor_flat(p.T)


# ------------------------------------------------------------ group actions

def pullback(G: GaussianFunction, g: AffineSymplectic) -> GaussianFunction:
    """G o g."""
    return gauss_affine_pullback(G, g.linear, g.shift)


def rho_flat(g: AffineSymplectic, F):
    """(rho_flat(g) F)(T, tau) = F(g.(T, tau)) |det(cT + d)|^{-1}.

    With this convention R_flat(f o g) = rho_flat(g) R_flat f.
    """
    def out(T, tau):
        T = np.atleast_2d(np.asarray(T, dtype=float))
        Tn, taun = affine_action(g, T, tau)
        return F(Tn, taun) / abs(np.linalg.det(g.c @ T + g.d))
    return out


def rho_comp(gc: ComplexAffineSymplectic, F):
    """(rho_comp(g) F)(S, sigma) = F(g.(S, sigma)) |det(conj(Psi) S + conj(Phi))|^{-1}."""
    def out(S, sigma):
        Sn, sn = compact_action(gc, S, sigma)
        return F(Sn, sn) / compact_cocycle(gc, S)
    return out


def random_chart_points(n: int, count: int, rng, spread: float = 0.6):
    pts = []
    for _ in range(count):
        T = rng.uniform(-spread, spread, (n, n))
        pts.append(FlatChartPoint(0.5 * (T + T.T), rng.normal(0, 0.7, n)))
    return pts


def equivariance_residual(g: AffineSymplectic, G: GaussianFunction, points=None,
                          seed=0) -> float:
    """max |R_flat(G o g) - rho_flat(g) R_flat G| / max |R_flat(G o g)| over chart points."""
    n = g.n
    if points is None:
        points = random_chart_points(n, 25, np.random.default_rng(seed))
    if np.array_equal(g.linear, np.eye(2 * n)) and not np.any(g.shift):
        return 0.0
    Gg = pullback(G, g)
    F = lambda T, tau: complex(radon_flat_gaussian(G, T, tau))
    rhs = rho_flat(g, F)
    lhs_vals, diffs = [], []
    for p in points:
        if abs(np.linalg.det(g.c @ p.T + g.d)) < 1e-3:
            continue
        lhs = complex(radon_flat_gaussian(Gg, p.T, p.tau))
        lhs_vals.append(abs(lhs))
        diffs.append(abs(lhs - rhs(p.T, p.tau)))
    if not diffs:
        raise ValueError("no chart-regular sample points")
    return float(max(diffs) / max(lhs_vals))


# ------------------------------------------------------------ torus family

def torus_line_points(phi, p, t):
    """Points of L[phi, p] parametrized by arc length t (arrays broadcast; last axis n)."""
    c, s = np.cos(phi), np.sin(phi)
    x = p * c - t * s
    y = p * s + t * c
    return np.concatenate([x, y], axis=-1)


def torus_radon_point(f, q: TorusChartPoint, order: int = 64, width: float = 1.0) -> complex:
    n = q.phi.size
    nodes, wts = _tensor_nodes(order, n)
    t = nodes * np.sqrt(2) * width
    z = torus_line_points(q.phi, q.p, t)
    vals = np.asarray(_as_callable(f)(z), dtype=complex)
    return complex(np.sum(wts * vals * np.exp(np.sum(nodes ** 2, axis=1))) * (np.sqrt(2) * width) ** n)


@dataclass
class RadonSamples:
    """Gridded Radon data.  ``axes`` are the 1-D coordinate arrays of the chart grid."""

    chart: str
    n: int
    axes: list
    values: np.ndarray
    meta: dict | None = None

    def to_grid(self) -> GridField:
        origin = [a[0] for a in self.axes]
        spacing = [(a[1] - a[0]) if a.size > 1 else 1.0 for a in self.axes]
        meta = dict(self.meta or {})
        meta.update(chart=self.chart, n=self.n)
        return GridField(origin, spacing, self.values, f"radon-{self.chart}", meta)

    @classmethod
    def from_grid(cls, gf: GridField) -> "RadonSamples":
        meta = dict(gf.meta)
        return cls(meta.pop("chart"), int(meta.pop("n")), gf.axes(), gf.values, meta)


def torus_radon(f, phi_grid, p_grid, order: int = 64, width: float = 1.0) -> RadonSamples:
    """Samples of int f dmu over L[phi, p] for n = 1 on the product grid (phi, p).

    For n > 1 use :func:`torus_radon_point`; the tensor grids get large fast.
    Callables must accept arrays (..., 2).
    """
    phi_grid = np.asarray(phi_grid, dtype=float)
    p_grid = np.asarray(p_grid, dtype=float)
    x, w = _hermite(order)
    t = x * np.sqrt(2) * width
    PH, P, Tt = np.meshgrid(phi_grid, p_grid, t, indexing="ij")
    z = torus_line_points(PH[..., None], P[..., None], Tt[..., None])
    vals = np.asarray(_as_callable(f)(z), dtype=complex)
    out = np.sum(vals * (w * np.exp(x ** 2)), axis=-1) * np.sqrt(2) * width
    return RadonSamples("torus", 1, [phi_grid, p_grid], out)


# ------------------------------------------------------------ counterexample

def _bump(t):
    """Smooth non-increasing cutoff: 1 on [0, 1], 0 on [2, inf)."""
    t = np.asarray(t, dtype=float)
    psi = lambda s: np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    a, b = psi(2.0 - t), psi(t - 1.0)
    return a / (a + b)


def gamma_profile(r, n: int = 2):
    return 1.0 / ((1.0 + r) ** n * np.log(2.0 + r))


def divergence_demo(N_list=(4, 8, 16, 32, 64), l2_log10_radii=None) -> dict:
    """R_comp gamma_N on L = {x = 0} (n = 2) and the L2 norm of gamma over balls.

    On L the surface measure is dy, so the transform reduces to the radial integral
    2 pi int_0^{2N} h(r/N) gamma(r) r dr.
    """
    n = 2
    rows = []
    for N in N_list:
        f = lambda r: 2 * np.pi * _bump(r / N) * gamma_profile(r, n) * r
        val = integrate.quad(f, 0, N, limit=400, epsabs=0, epsrel=1e-12)[0] \
            + integrate.quad(f, N, 2 * N, limit=400, epsabs=0, epsrel=1e-12)[0]
        rows.append((int(N), val))
    vals = np.array([v for _, v in rows])
    slope = float(np.polyfit(np.log(np.log([N for N, _ in rows])), vals, 1)[0])

    # ||gamma||^2 over balls of radius R in R^4; substitute r = e^s
    sigma4 = 2 * np.pi ** 2
    def dens(s):
        lead = 1.0 / (1.0 + np.exp(-s))  # r / (1 + r)
        return sigma4 * lead ** 4 / (s + np.log1p(2 * np.exp(-s))) ** 2 if s > 0 else \
            sigma4 * np.exp(4 * s) / ((1 + np.exp(s)) ** 4 * np.log(2 + np.exp(s)) ** 2)
    if l2_log10_radii is None:
        l2_log10_radii = [2.0 ** k for k in range(0, 11)]
    l2 = []
    acc = integrate.quad(dens, -60, 0, limit=200)[0]
    prev = 0.0
    for lg in l2_log10_radii:
        S = lg * np.log(10)
        acc += integrate.quad(dens, prev, S, limit=400, epsabs=0, epsrel=1e-12)[0]
        prev = S
        l2.append((lg, acc))
    incr = [abs(l2[k][1] - l2[k - 1][1]) / l2[k][1] for k in range(1, len(l2))]
    return {"radon": rows, "growth_slope_vs_loglogN": slope,
            "l2_sq": l2, "l2_rel_increment": incr}
