"""Three reconstruction routes from Lagrangian Radon data.

1. Fourier assembly.  g(T, v) = int R_flat f(T, tau) exp(i v^T tau) dtau equals
   f^(v, -T v) with f^(xi) = int f exp(i xi^T x).  Each frequency
   (xi_x, xi_y) with xi_x != 0 is read off with v = xi_x and T the minimal-norm
   symmetric solution of T v = -xi_y.
2. Torus family (n = 1 per factor): filtered back-projection, or the
   literal averaged formula  f(0) = C int_0^inf (1/p) dF/dp dp  with C
   calibrated (classically -1/pi).
3. Point averages G(v) = (sigma_n / sigma_2n) int f(w) |v - w|^{-n} dw, inverted
   for n = 2 by f = C (-Laplacian) G with C = 1/(4 pi).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma as _gamma

import numpy as np

from .gaussian import LOG2PI, GaussianFunction
from .geometry import euclid_measure_factor_flat, lagrangians_through_point
from .grid import GridField
from .radon import RadonSamples
from scipy.ndimage import map_coordinates
from scipy.signal import fftconvolve


class AliasingError(RuntimeError):
    """Radon data do not decay inside the tau quadrature box."""


class CalibrationError(RuntimeError):
    """A calibration constant is not stable across the oracle set."""


@dataclass
class CalibrationConstant:
    method: str
    value: float
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"method": self.method, "value": self.value, "provenance": self.provenance}


def sphere_area(k: int) -> float:
    """Area of the unit sphere S^{k-1} in R^k: 2 pi^{k/2} / Gamma(k/2)."""
    return 2 * np.pi ** (k / 2) / _gamma(k / 2)


# ===================================================================== route 1

def tau_gaussian_coeffs(G: GaussianFunction, T):
    """Batched tau -> R_flat G(T, tau) = exp(-1/2 tau^T A tau + b^T tau + c).

    T has shape (B, n, n); returns (A (B, n, n), b (B, n), c (B,)).
    """
    n = G.m // 2
    T = np.asarray(T, dtype=float).reshape(-1, n, n)
    A, b = G.A, G.b
    Axx, Axy, Ayy = A[:n, :n], A[:n, n:], A[n:, n:]
    Q = T @ Axx @ T + T @ Axy + Axy.T @ T + Ayy
    M = T @ Axx + Axy.T
    l0 = T @ b[:n] + b[n:]
    Qinv = np.linalg.inv(Q)
    QiM = Qinv @ M
    Qil = np.einsum("bij,bj->bi", Qinv, l0)
    At = Axx - np.swapaxes(M, -1, -2) @ QiM
    bt = b[:n] - np.einsum("bji,bj->bi", M, Qil)
    logdet = np.sum(np.log(np.linalg.eigvals(Q)), axis=-1)
    ct = G.c + 0.5 * n * LOG2PI - 0.5 * logdet + 0.5 * np.einsum("bi,bi->b", l0, Qil)
    return At, bt, ct


def _sqrt_spd(M):
    w, V = np.linalg.eigh(M)
    return (V * np.sqrt(w)[..., None, :]) @ np.swapaxes(V, -1, -2)


@dataclass(frozen=True)
class TauRule:
    """Trapezoid rule on tau = (I + T^2)^{1/2} u, u in [-L, L]^n.

    In u the oscillation exp(i v^T tau) has frequency |(v, T v)|, which stays
    bounded by the target frequency norm.
    """

    nodes: int = 32
    half_width: float = 6.0
    tail_tol: float = 1e-8

    @classmethod
    def for_bandwidth(cls, xi_max: float, half_width: float = 6.0, margin: float = 6.0,
                      tail_tol: float = 1e-8) -> "TauRule":
        h = 2 * np.pi / (xi_max + margin)
        return cls(int(np.ceil(2 * half_width / h)) + 1, half_width, tail_tol)

    def grid(self, n: int):
        u1 = np.linspace(-self.half_width, self.half_width, self.nodes)
        U = np.stack(np.meshgrid(*([u1] * n), indexing="ij"), axis=-1).reshape(-1, n)
        rim = np.any(np.abs(U) >= self.half_width - 1e-12, axis=-1)
        return U, (u1[1] - u1[0]) ** n, rim


def _tail_check(mod, rim, tol):
    tot = np.sum(mod ** 2, axis=1)
    edge = np.sum(mod[:, rim] ** 2, axis=1)
    bad = (edge > tol * tot) & (tot > 0)
    if np.any(bad):
        raise AliasingError(f"tail energy {np.max(edge[bad] / tot[bad]):.2e} exceeds {tol:.0e}")


def fiberwise_fourier(F, T, v, rule: TauRule | None = None, check_tail: bool = True,
                      chunk: int = 2048) -> np.ndarray:
    """g(T, v) = int F(T, tau) exp(i v^T tau) dtau, batched over (T, v).

    ``F`` is either a GaussianFunction (its Radon image is generated in closed
    form on the tau nodes) or a callable F(T, tau) accepting T (B, 1, n, n) and
    tau (B, K, n).
    """
    T = np.asarray(T, dtype=float)
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    T = T.reshape(-1, n, n)
    v = v.reshape(-1, n)
    rule = rule or TauRule()
    U, du, rim = rule.grid(n)
    out = np.empty(T.shape[0], dtype=complex)
    for s in range(0, T.shape[0], chunk):
        Tb, vb = T[s:s + chunk], v[s:s + chunk]
        S = _sqrt_spd(np.eye(n) + Tb @ Tb)
        jac = np.prod(np.sqrt(np.linalg.eigvalsh(np.eye(n) + Tb @ Tb)), axis=-1)
        tau = np.einsum("bij,kj->bki", S, U)
        lin = 1j * vb
        if isinstance(F, GaussianFunction):
            # closed-form data times the Fourier phase, in a single exponential
            At, bt, ct = tau_gaussian_coeffs(F, Tb)
            expo = (-0.5 * np.sum((tau @ At) * tau, axis=-1)
                    + (tau @ (bt + lin)[..., None])[..., 0] + ct[:, None])
            if check_tail:
                _tail_check(np.exp(expo.real), rim, rule.tail_tol)
            out[s:s + chunk] = np.sum(np.exp(expo), axis=1) * du * jac
            continue
        vals = np.asarray(F(Tb[:, None], tau), dtype=complex)
        if check_tail:
            _tail_check(np.abs(vals), rim, rule.tail_tol)
        phase = np.exp((tau @ lin[..., None])[..., 0])
        out[s:s + chunk] = np.sum(vals * phase, axis=1) * du * jac
    return out


def min_norm_symmetric(v, w) -> np.ndarray:
    """Minimal Frobenius-norm symmetric T with T v = w (batched over leading axes)."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    vv = np.sum(v * v, axis=-1)[..., None, None]
    vw = np.sum(v * w, axis=-1)[..., None, None]
    outer = w[..., :, None] * v[..., None, :]
    return (outer + np.swapaxes(outer, -1, -2)) / vv \
        - vw * v[..., :, None] * v[..., None, :] / vv ** 2


def null_perturbations(v) -> list[np.ndarray]:
    """Symmetric S with S v = 0: entries s_kk = v_l^2, s_kl = s_lk = -v_k v_l, s_ll = v_k^2."""
    v = np.asarray(v, dtype=float)
    n = v.size
    out = []
    for k in range(n):
        for l in range(k + 1, n):
            S = np.zeros((n, n))
            S[k, k], S[l, l] = v[l] ** 2, v[k] ** 2
            S[k, l] = S[l, k] = -v[k] * v[l]
            out.append(S)
    return out


def well_definedness_residual(F, T, S_perturb, v, rule: TauRule | None = None) -> float:
    """|g(T + S, v) - g(T, v)| for a symmetric S with S v = 0."""
    S = np.asarray(S_perturb, dtype=float)
    if np.max(np.abs(S - S.T)) > 1e-12 or np.max(np.abs(S @ v)) > 1e-10 * max(1, np.max(np.abs(S))):
        raise ValueError("S_perturb must be symmetric with S v = 0")
    if not np.any(S):
        return 0.0
    g = fiberwise_fourier(F, np.stack([T, T + S]), np.stack([v, v]), rule)
    return float(abs(g[1] - g[0]))


_FILL_STEPS = (-3, -2, -1, 1, 2, 3)
_FILL_WEIGHTS = tuple(
    np.prod([(0 - o) / (s - o) for o in _FILL_STEPS if o != s]) for s in _FILL_STEPS)


def frequency_axes(spatial: GridField) -> list[np.ndarray]:
    """DFT frequencies (2 pi k / (N h)), unshifted FFT order, for each axis."""
    return [2 * np.pi * np.fft.fftfreq(N, h) for N, h in zip(spatial.shape, spatial.spacing)]


def _fiberwise_job(args):
    F, T, v, rule = args
    return fiberwise_fourier(F, T, v, rule)


def fiberwise_parallel(F, T, v, rule, workers: int = 1, block: int = 32768) -> np.ndarray:
    """fiberwise_fourier split into fixed blocks; results do not depend on ``workers``."""
    jobs = [(F, T[s:s + block], v[s:s + block], rule) for s in range(0, len(v), block)]
    if workers <= 1 or len(jobs) <= 1:
        parts = [_fiberwise_job(j) for j in jobs]
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_fiberwise_job, jobs))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def assemble_fourier(F, spatial: GridField, rule: TauRule | None = None,
                     band_limit: bool = True, alt_T=None, workers: int = 1) -> GridField:
    """f^ on the DFT frequency grid of ``spatial`` (axes in FFT order).

    Frequencies with xi_x = 0 are not reached by any chart point; they are
    filled by polynomial continuation from the neighbouring xi_x nodes.  With ``band_limit`` frequencies outside the ball of
    radius min(pi/h) are set to zero.  ``alt_T(v, w)`` may supply another
    symmetric solution of T v = w (for the well-definedness check).
    """
    m = spatial.m
    n = m // 2
    axes = frequency_axes(spatial)
    XI = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    xi_max = float(np.min(np.pi / spatial.spacing))
    if rule is None:
        rule = TauRule.for_bandwidth(xi_max if band_limit else xi_max * np.sqrt(m))
    v, w = XI[:, :n], -XI[:, n:]
    vnorm = np.linalg.norm(v, axis=1)
    floor = 1e-9 * np.min(spatial.spacing)
    use = vnorm > floor
    if band_limit:
        use &= np.linalg.norm(XI, axis=1) <= xi_max * (1 + 1e-12)
    vals = np.zeros(XI.shape[0], dtype=complex)
    Ts = (alt_T or min_norm_symmetric)(v[use], w[use])
    vals[use] = fiberwise_parallel(F, Ts, v[use], rule, workers)
    vals = vals.reshape(spatial.shape)
    # continue across xi_x = 0: 1-D Lagrange extrapolation from +-1..+-3 along each xi_x axis
    zero_idx = tuple([0] * n)
    sl = zero_idx + (slice(None),) * n
    acc = np.zeros(vals[sl].shape, dtype=complex)
    for j in range(n):
        for step, wt in zip(_FILL_STEPS, _FILL_WEIGHTS):
            idx = list(zero_idx)
            idx[j] = step % spatial.shape[j]
            acc += wt * vals[tuple(idx) + (slice(None),) * n]
    filled = acc / n
    if band_limit:
        filled[np.linalg.norm(XI.reshape(*spatial.shape, m)[sl][..., n:], axis=-1) > xi_max] = 0
    vals[sl] = filled
    meta = {"frequency_order": "fft", "forward_sign": "+i", "band_limit": bool(band_limit),
            "tau_nodes": rule.nodes, "tau_half_width": rule.half_width,
            "xi_x_zero_fill": "6-point Lagrange continuation"}
    d = np.array([a[1] if a.size > 1 else 1.0 for a in axes])
    return GridField(np.zeros(m), d, vals, "fourier", meta)


def fourier_to_spatial(fhat: GridField, spatial: GridField) -> GridField:
    """f(x_k) = (2 pi)^{-m} sum_j f^(xi_j) exp(-i xi_j x_k) dxi^m."""
    m = spatial.m
    axes = frequency_axes(spatial)
    phase = np.ones(spatial.shape, dtype=complex)
    for j, a in enumerate(axes):
        shape = [1] * m
        shape[j] = -1
        phase = phase * np.exp(-1j * a * spatial.origin[j]).reshape(shape)
    dxi = np.prod([2 * np.pi / (N * h) for N, h in zip(spatial.shape, spatial.spacing)])
    vals = np.fft.fftn(fhat.values * phase) * dxi / (2 * np.pi) ** m
    return spatial.with_values(vals, "function")


def invert_fourier(F, spatial: GridField, rule: TauRule | None = None,
                   band_limit: bool = True, workers: int = 1) -> GridField:
    """Reconstruct f on the nodes of ``spatial`` from flat-chart Radon data."""
    fhat = assemble_fourier(F, spatial, rule, band_limit, workers=workers)
    return fourier_to_spatial(fhat, spatial)


def relative_l2(rec: GridField, truth, mask=None) -> float:
    t = np.asarray(truth(rec.points()) if callable(truth) else truth, dtype=complex)
    d = rec.values - t
    if mask is not None:
        d, t = d[mask], t[mask]
    return float(np.linalg.norm(d) / np.linalg.norm(t))


# ===================================================================== route 2

def torus_gaussian_exact(G: GaussianFunction, phi, p) -> np.ndarray:
    """Closed-form line integrals of a Gaussian on R^2 over x cos phi + y sin phi = p."""
    phi, p = np.broadcast_arrays(np.asarray(phi, float), np.asarray(p, float))
    th = np.stack([np.cos(phi), np.sin(phi)], -1)
    e = np.stack([-np.sin(phi), np.cos(phi)], -1)
    A, b = G.A, G.b
    a = np.einsum("...i,ij,...j->...", e, A, e)
    z0 = p[..., None] * th
    lin = np.einsum("...i,i->...", e, b) - np.einsum("...i,ij,...j->...", e, A, z0)
    c = G.c - 0.5 * np.einsum("...i,ij,...j->...", z0, A, z0) + z0 @ b
    return np.exp(c + 0.5 * LOG2PI - 0.5 * np.log(a) + 0.5 * lin ** 2 / a)


def half_step_grid(count: int, half_width: float) -> np.ndarray:
    """Offsets symmetric about 0 that avoid p = 0 by half a step."""
    dp = 2 * half_width / count
    return (np.arange(count) - count / 2 + 0.5) * dp


def angle_grid(count: int) -> np.ndarray:
    return 2 * np.pi * np.arange(count) / count


def _ramp_kernel(count: int, dp: float) -> np.ndarray:
    """Ram-Lak kernel: int |nu| e^{2 pi i nu s} dnu over |nu| < 1/(2 dp), sampled at s = k dp."""
    k = np.arange(-(count - 1), count)
    h = np.zeros(k.size)
    h[k == 0] = 1 / (4 * dp ** 2)
    odd = k % 2 == 1
    h[odd] = -1 / (np.pi ** 2 * k[odd] ** 2 * dp ** 2)
    return h


def _backproject_axis(q, phi, p, pts):
    """(1/2) int_0^{2pi} q(phi, x cos phi + y sin phi) dphi at pts (..., 2)."""
    dphi = 2 * np.pi / phi.size
    dp = p[1] - p[0]
    out = np.zeros(pts.shape[:-1], dtype=complex)
    for j, ph in enumerate(phi):
        s = pts[..., 0] * np.cos(ph) + pts[..., 1] * np.sin(ph)
        idx = (s - p[0]) / dp
        out += np.interp(idx, np.arange(p.size), q[j].real, left=0, right=0) \
            + 1j * np.interp(idx, np.arange(p.size), q[j].imag, left=0, right=0)
    return out * dphi / 2


def invert_torus_fbp(F: RadonSamples, spatial: GridField) -> GridField:
    """Engine (b): ramp-filtered back-projection, n = 1."""
    if F.chart != "torus" or F.n != 1:
        raise ValueError("expected n = 1 torus Radon samples")
    phi, p = F.axes
    dp = p[1] - p[0]
    if abs(p[0] / dp + 0.5 - round(p[0] / dp + 0.5)) > 1e-9:
        raise ValueError("p grid must be offset from 0 by half a step")
    h = _ramp_kernel(p.size, dp)
    q = fftconvolve(F.values, h[None, :], mode="same", axes=1) * dp
    vals = _backproject_axis(q, phi, p, spatial.points())
    return spatial.with_values(vals)


def literal_torus_integral(F: RadonSamples, points) -> np.ndarray:
    """int_0^inf (1/p) d/dp Fbar_x(p) dp at each point x, where Fbar_x is the
    angular average of the data over lines at signed distance p from x."""
    phi, p = F.axes
    dp = p[1] - p[0]
    if abs(p[0] / dp + 0.5 - round(p[0] / dp + 0.5)) > 1e-9:
        raise ValueError("p grid must be offset from 0 by half a step")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    prad = p[p > 0]
    fbar = np.zeros((pts.shape[0], prad.size), dtype=complex)
    for j, ph in enumerate(phi):
        shift = pts[:, 0] * np.cos(ph) + pts[:, 1] * np.sin(ph)
        idx = (prad[None, :] + shift[:, None] - p[0]) / dp
        for part, unit in ((F.values[j].real, 1), (F.values[j].imag, 1j)):
            fbar += unit * map_coordinates(part, idx.reshape(1, -1), order=3,
                                           mode="constant", cval=0.0).reshape(idx.shape)
    fbar /= phi.size
    # Fbar is even in p, so extend by reflection and take a centred derivative
    ext = np.concatenate([fbar[:, :2][:, ::-1], fbar, fbar[:, -1:]], axis=1)
    d = np.gradient(ext, dp, axis=1, edge_order=2)[:, 2:-1]
    return np.sum(d / prad, axis=1) * dp


def invert_torus_literal(F: RadonSamples, spatial: GridField, constant: float) -> GridField:
    """Engine (a): f(x) = C int_0^inf (1/p) dFbar_x/dp dp, translated to every node."""
    vals = literal_torus_integral(F, spatial.points().reshape(-1, 2)).reshape(spatial.shape)
    return spatial.with_values(constant * vals)


def invert_torus(F: RadonSamples, spatial: GridField, engine: str = "fbp",
                 constant: float | None = None) -> GridField:
    if engine == "fbp":
        return invert_torus_fbp(F, spatial)
    if engine == "literal":
        return invert_torus_literal(F, spatial, -1 / np.pi if constant is None else constant)
    raise ValueError(f"unknown torus engine {engine!r}")


# ===================================================================== route 3

def riesz_gaussian(G: GaussianFunction, v, nodes: int = 241, t_range=(-36.0, 36.0)) -> np.ndarray:
    """(sigma_n / sigma_2n) int G(w) |v - w|^{-n} dw in closed form up to a 1-D integral.

    Uses |w|^{-n} = Gamma(n/2)^{-1} int_0^inf s^{n/2-1} exp(-s |w|^2) ds with
    s = e^t and the trapezoid rule in t (the integrand decays like e^{-|t|}).
    """
    m = G.m
    n = m // 2
    v = np.asarray(v, dtype=float)
    lam, V = np.linalg.eig(G.A)
    Vi = np.linalg.inv(V)
    # A + 2sI = V diag(lam + 2s) V^{-1}, so every quadratic form is diagonal
    pv, qv = v @ V, v @ Vi.T
    pb, qb = G.b @ V, Vi @ G.b
    t = np.linspace(*t_range, nodes)
    dt = t[1] - t[0]
    out = np.zeros(v.shape[:-1], dtype=complex)
    for tk in t:
        s = np.exp(tk)
        d = 1.0 / (lam + 2 * s)
        bAb = np.sum(pb * d * qb)
        bAv = (qv * d) @ pb
        # -s|v|^2 + 2 s^2 v^T (A + 2s)^{-1} v, written without cancellation
        vAv = -s * np.sum(pv * (d * lam) * qv, axis=-1)
        expo = (G.c + 0.5 * m * LOG2PI - 0.5 * np.sum(np.log(lam + 2 * s))
                + 0.5 * bAb + 2 * s * bAv + vAv)
        out += np.exp(expo) * s ** (n / 2) * dt
    return out * sphere_area(n) / sphere_area(m) / _gamma(n / 2)


def point_average(F, v, samples: int, seed) -> tuple[float, float]:
    """Monte-Carlo average of R_comp f over Lagrangian subspaces through v.

    ``F`` is a GaussianFunction (closed-form line data) or a callable
    F(T, tau) returning the surface-measure Radon transform.  Returns
    (estimate, standard error).
    """
    from .gaussian import radon_flat_gaussian

    pts = lagrangians_through_point(v, samples, seed)
    T = np.stack([p.T for p in pts])
    tau = np.stack([p.tau for p in pts])
    if isinstance(F, GaussianFunction):
        fac = np.array([euclid_measure_factor_flat(t) for t in T])
        vals = radon_flat_gaussian(F, T, tau) / fac
    else:
        vals = np.array([F(t, s) for t, s in zip(T, tau)])
    vals = np.asarray(vals, dtype=complex)
    return complex(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(samples))


def neg_laplacian(gf: GridField) -> GridField:
    """Second-difference -Laplacian; boundary layer (one cell) set to NaN."""
    v = gf.values
    out = np.zeros_like(v)
    for j, h in enumerate(gf.spacing):
        out -= (np.roll(v, 1, axis=j) - 2 * v + np.roll(v, -1, axis=j)) / h ** 2
    interior = np.ones(v.shape, dtype=bool)
    for j in range(v.ndim):
        idx = [slice(None)] * v.ndim
        idx[j] = 0
        interior[tuple(idx)] = False
        idx[j] = -1
        interior[tuple(idx)] = False
    out[~interior] = np.nan
    return gf.with_values(out)


def interior_mask(shape, width: int = 1) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    for j in range(len(shape)):
        idx = [slice(None)] * len(shape)
        idx[j] = slice(0, width)
        mask[tuple(idx)] = False
        idx[j] = slice(shape[j] - width, None)
        mask[tuple(idx)] = False
    return mask


RIESZ_CONSTANT_N2 = 1 / (4 * np.pi)


def invert_riesz(G: GridField, n: int = 2, constant: float = RIESZ_CONSTANT_N2) -> GridField:
    """f = C (-Laplacian)^{n/2} G on the interior; n must be even."""
    if n % 2 or G.m != 2 * n:
        raise ValueError("the Laplacian route needs even n and a field on R^{2n}")
    out = G
    for _ in range(n // 2):
        out = neg_laplacian(out)
    return out.with_values(constant * out.values)


def riesz_field(G: GaussianFunction, spatial: GridField, **kw) -> GridField:
    return spatial.with_values(riesz_gaussian(G, spatial.points(), **kw), "point-average")


# ===================================================================== calibration

def oracle_set(m: int, count: int, seed) -> list[GaussianFunction]:
    """Distinct real, well-localized Gaussians on R^m for calibration."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        Q, _r = np.linalg.qr(rng.standard_normal((m, m)))
        cov = Q @ np.diag(rng.uniform(0.7, 1.3, m)) @ Q.T
        out.append(GaussianFunction.from_mean_cov(rng.normal(0, 0.3, m), cov))
    return out


def _lsq_scalar(rec, truth) -> float:
    rec, truth = np.ravel(rec), np.ravel(truth)
    return float(np.real(np.vdot(rec, truth) / np.vdot(rec, rec)))


def calibrate(method: str, oracles=None, seed=0, spread_tol: float = 2e-2,
              resolution: dict | None = None) -> CalibrationConstant:
    """Least-squares scalar matching an uncalibrated reconstruction to the oracle.

    method "torus-literal": per-axis constant of the averaged formula, n = 1.
    method "riesz": constant in f = C (-Laplacian) G, n = 2.
    method "fourier": overall normalization of route 1 (ideally 1), n = 1.
    """
    res = dict(resolution or {})
    if method == "torus-literal":
        oracles = oracles or oracle_set(2, 3, seed)
        phi = angle_grid(res.get("angles", 180))
        p = half_step_grid(res.get("offsets", 128), res.get("p_half_width", 8.0))
        pts = np.array([[0.0, 0.0], [0.4, -0.3], [-0.5, 0.2]])
        vals = []
        for G in oracles:
            data = RadonSamples("torus", 1, [phi, p],
                                torus_gaussian_exact(G, phi[:, None], p[None, :]))
            lit = literal_torus_integral(data, pts)
            vals.append(_lsq_scalar(lit, G(pts)))
    elif method == "riesz":
        oracles = oracles or oracle_set(4, 3, seed)
        N = res.get("shape", 20)
        L = res.get("half_width", 5.0)
        vals = []
        for G in oracles:
            sp = GridField.centered((N,) * 4, L)
            lap = neg_laplacian(riesz_field(G, sp))
            mask = interior_mask(sp.shape)
            vals.append(_lsq_scalar(lap.values[mask], G(sp.points())[mask]))
    elif method == "fourier":
        oracles = oracles or oracle_set(2, 3, seed)
        N = res.get("shape", 32)
        vals = []
        for G in oracles:
            sp = GridField.centered((N, N), res.get("half_width", 6.0))
            rec = invert_fourier(G, sp)
            vals.append(_lsq_scalar(rec.values, G(sp.points())))
    else:
        raise ValueError(f"unknown calibration method {method!r}")
    vals = np.array(vals)
    spread = float((vals.max() - vals.min()) / abs(vals.mean()))
    prov = {"seed": seed, "per_oracle": vals.tolist(), "spread": spread,
            "oracles": len(vals), "resolution": res}
    if len(vals) < 3:
        raise CalibrationError("need at least three oracle functions")
    if spread > spread_tol:
        raise CalibrationError(f"{method}: constant unstable across oracles "
                               f"(spread {spread:.3e} > {spread_tol:.0e})")
    return CalibrationConstant(method, float(vals.mean()), prov)
