"""Residual suites shared by the CLI ``check`` command and the acceptance tests.

Each suite returns a list of :class:`Row`; a row passes when ``value <= budget``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .determinantal import (apply_minor_fd, apply_minor_exact, build_minors, oracle_image,
                            symm_polys, transform_solution)
from .gaussian import GaussianFunction, random_gaussian
from .geometry import FlatChartPoint
from .radon import equivariance_residual, random_chart_points
from .symplectic import (cayley, compact_action, compact_cocycle, compose, make_n_minus,
                         random_symplectic, real_to_complex_model)

BUDGETS = {
    "determinantal_fd": 1e-4,
    "equivariance": 1e-6,
    "compact_cocycle": 1e-8,
    "weil_unitarity": 1e-5,
    "weil_cocycle_modulus": 1e-6,
    "h_unitarity": 1e-6,
    "intertwining": 1e-3,
    "kernel_identity": 1e-8,
    "system_z_fd": 1e-4,
    "commuting_square": 1e-6,
}


@dataclass
class Row:
    suite: str
    case: str
    value: float
    budget: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.budget)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _budget(budgets, key):
    return float((budgets or {}).get(key, BUDGETS[key]))


# ------------------------------------------------------------ determinantal

def corrupt_half(F, factor: float = 1.01):
    """Scale the data by ``factor`` on the half space tau_1 > 0 (negative control)."""
    def out(T, tau):
        return F(T, tau) * (factor if np.asarray(tau, dtype=float).reshape(-1)[0] > 0 else 1.0)
    return out


def determinantal_points(n: int, count: int, rng) -> list[FlatChartPoint]:
    pts = random_chart_points(n, count, rng, spread=0.4)
    # one point on the corruption interface so the negative control is always seen
    tau = pts[0].tau.copy()
    tau[0] = 0.0
    pts[0] = FlatChartPoint(pts[0].T, tau)
    return pts


def fd_minor_rows(F, n: int, points, budget: float, label: str, h: float = 0.05) -> list[Row]:
    """Worst relative FD residual of every 3x3 minor, one row per point."""
    minors = build_minors(n, 3, True)
    rows = []
    for k, p in enumerate(points):
        worst = 0.0
        for D in minors:
            val, scale = apply_minor_fd(D, F, p, h=h, return_scale=True)
            worst = max(worst, abs(val) / scale if scale > 0 else abs(val))
        rows.append(Row("determinantal", f"{label} n={n} point={k}", float(worst), budget))
    return rows


def exact_polynomial_rows() -> list[Row]:
    """The n = 2 witness polynomials under the single 3x3 minor, exactly."""
    (D,) = build_minors(2, 3, True)
    t, tau = symm_polys(2)
    wit = apply_minor_exact(D, t[(1, 1)] * tau[2] ** 2 - t[(2, 2)] * tau[1] ** 2)
    single = apply_minor_exact(D, t[(1, 1)] * tau[2] ** 2)
    single_val = float(single.constant_value()) if single.is_constant() else np.inf
    return [
        Row("determinantal", "exact witness t11 tau2^2 - t22 tau1^2 annihilated",
            0.0 if wit.is_zero() else 1.0, 0.0),
        Row("determinantal", "exact t11 tau2^2 gives -4", abs(single_val + 4), 0.0),
    ]


def invariance_elements(n: int, count: int, seed) -> list:
    """Seeded group elements; every other one is a pure N- element."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        if k % 2 == 0:
            c = rng.uniform(-0.4, 0.4, (n, n))
            out.append(make_n_minus(0.5 * (c + c.T)))
        else:
            out.append(random_symplectic(n, int(rng.integers(2 ** 31)), word_length=3, scale=0.4))
    return out


def _regular(g, p, floor: float = 0.2) -> bool:
    """Away from the chart singularity det(cT + d) = 0 of g."""
    return abs(np.linalg.det(g.c @ p.T + g.d)) > floor


def _regular_point(g, n: int, rng, candidates: int = 200) -> FlatChartPoint:
    """The seeded candidate farthest from the singular set of g."""
    pts = random_chart_points(n, candidates, rng, spread=0.4)
    return max(pts, key=lambda p: abs(np.linalg.det(g.c @ p.T + g.d)))


def determinantal_suite(G: GaussianFunction, n_values=(2, 3), points: int = 3,
                        invariance: int = 2, seed=0, corrupt: float | None = None,
                        budgets=None) -> list[Row]:
    budget = _budget(budgets, "determinantal_fd")
    rows = exact_polynomial_rows()
    for n in n_values:
        rng = np.random.default_rng([int(seed), n])
        Gn = G if G.m == 2 * n else random_gaussian(2 * n, rng, complex_part=0.0, shift=0.3)
        F = oracle_image(Gn)
        if corrupt is not None:
            F = corrupt_half(F, corrupt)
        pts = determinantal_points(n, points, rng)
        rows += fd_minor_rows(F, n, pts, budget, "oracle image")
        for j, g in enumerate(invariance_elements(n, invariance, [int(seed), n, 1])):
            Fg = transform_solution(g, F)
            ok = [p for p in pts if _regular(g, p)]
            if not ok:
                ok = [_regular_point(g, n, np.random.default_rng([int(seed), n, 2, j]))]
            rows += fd_minor_rows(Fg, n, ok[:1], budget, f"transformed g{j}")
    return rows


# ------------------------------------------------------------ equivariance

def compact_cocycle_residual(g1, g2, S) -> float:
    """|c(g1 g2, S) - c(g1, g2.S) c(g2, S)| / c(g1 g2, S)."""
    c1, c2 = real_to_complex_model(g1), real_to_complex_model(g2)
    c12 = real_to_complex_model(compose(g1, g2))
    n = g1.n
    S2, _ = compact_action(c2, S, np.zeros(n, dtype=complex))
    lhs = compact_cocycle(c12, S)
    return abs(lhs - compact_cocycle(c1, S2) * compact_cocycle(c2, S)) / lhs


def equivariance_suite(count: int = 100, n_values=(1, 2, 3), seed=0, budgets=None) -> list[Row]:
    eq_b = _budget(budgets, "equivariance")
    co_b = _budget(budgets, "compact_cocycle")
    rows = []
    worst_eq, worst_co = {}, {}
    for k in range(count):
        n = n_values[k % len(n_values)]
        rng = np.random.default_rng([int(seed), k])
        g = random_symplectic(n, int(rng.integers(2 ** 31)), word_length=3,
                              translations=True, scale=0.6)
        G = random_gaussian(2 * n, rng)
        worst_eq[n] = max(worst_eq.get(n, 0.0), equivariance_residual(g, G, seed=k))
        g2 = random_symplectic(n, int(rng.integers(2 ** 31)), word_length=3, scale=0.6)
        T = rng.uniform(-0.6, 0.6, (n, n))
        S = cayley(0.5 * (T + T.T))
        worst_co[n] = max(worst_co.get(n, 0.0), compact_cocycle_residual(g, g2, S))
    for n in n_values:
        if n in worst_eq:
            rows.append(Row("equivariance", f"flat equivariance n={n} (worst)", worst_eq[n], eq_b))
            rows.append(Row("equivariance", f"compact cocycle law n={n} (worst)", worst_co[n], co_b))
    return rows


# ------------------------------------------------------------ Weil layer

def weil_suite(seed=0, pairs: int = 50, budgets=None, grid_points: int = 256) -> list[Row]:
    from .weil import (KINDS, cocycle_check, grid_unitarity, intertwining_residual,
                       random_word, sample_gaussian, symmetric_grid, tensor_intertwiner_H)
    rng = np.random.default_rng(seed)
    rows = []
    g1 = symmetric_grid((grid_points,), 10.0)
    f = sample_gaussian(random_gaussian(1, rng, shift=0.3), g1)
    for k in KINDS:
        W = random_word(1, rng, 1, kinds=(k,))[0]
        rows.append(Row("weil", f"grid unitarity {k}", grid_unitarity(W, f),
                        _budget(budgets, "weil_unitarity")))
    worst_mod = worst_res = 0.0
    for _ in range(pairs):
        w1, w2 = random_word(2, rng, 3), random_word(2, rng, 3)
        sig, res = cocycle_check(w1, w2, random_gaussian(2, rng), tol=np.inf)
        worst_mod = max(worst_mod, abs(abs(sig) - 1))
        worst_res = max(worst_res, res)
    rows.append(Row("weil", f"cocycle | |sigma| - 1 | over {pairs} pairs",
                    worst_mod, _budget(budgets, "weil_cocycle_modulus")))
    rows.append(Row("weil", f"cocycle proportionality over {pairs} pairs",
                    worst_res, _budget(budgets, "weil_cocycle_modulus")))
    for n in (1, 2):
        F = random_gaussian(2 * n, rng, shift=0.3)
        gr = symmetric_grid((128,) * 2 if n == 1 else (20,) * 4, 8.0 if n == 1 else 6.0)
        fg = sample_gaussian(F, gr)
        rows.append(Row("weil", f"H unitarity grid n={n}",
                        abs(tensor_intertwiner_H(fg).norm() / fg.norm() - 1),
                        _budget(budgets, "h_unitarity")))
        for k in KINDS:
            W = random_word(n, rng, 1, kinds=(k,))
            rows.append(Row("weil", f"intertwining {k} n={n}",
                            intertwining_residual(W, [F]), _budget(budgets, "intertwining")))
            if n == 1:
                rows.append(Row("weil", f"intertwining {k} n=1 on grid",
                                intertwining_residual(W, [F], gr),
                                _budget(budgets, "intertwining")))
    return rows


# ------------------------------------------------------------ Siegel layer

def kernel_suite(seed=0, count: int = 20, budgets=None) -> list[Row]:
    from .weil import (KINDS, commuting_square_residual, kernel_eval, phi_kernel_function,
                       random_siegel_points, random_word, siegel_transform, system_Z_minors,
                       system_Z_residual)
    rng = np.random.default_rng(seed)
    rows = []
    for n in (1, 2):
        worst = 0.0
        for _ in range(count):
            (P, pi), (R, rho) = random_siegel_points(n, 2, rng)
            a = siegel_transform(phi_kernel_function(R, rho), P, pi)
            b = kernel_eval(P, pi, R, rho)
            worst = max(worst, abs(a - b) / abs(b))
        rows.append(Row("kernel", f"kernel identity n={n} ({count} points)", worst,
                        _budget(budgets, "kernel_identity")))
        half = 0.5j * np.eye(n)
        z = np.zeros(n)
        rows.append(Row("kernel", f"normalization point n={n}",
                        abs(kernel_eval(half, z, half, z) - 1), 1e-15))
        f = random_gaussian(n, rng, shift=0.3)
        Kf = lambda P, pi, f=f: siegel_transform(f, P, pi)
        worst = 0.0
        for P, pi in random_siegel_points(n, 3, rng):
            for minor in system_Z_minors(n):
                val, scale = system_Z_residual(Kf, P, pi, minor)
                worst = max(worst, abs(val) / scale if scale > 0 else abs(val))
        rows.append(Row("kernel", f"system Z 2x2 minors n={n}", worst,
                        _budget(budgets, "system_z_fd")))
        pts = random_siegel_points(n, 5, rng)
        for k in KINDS:
            W = random_word(n, rng, 1, kinds=(k,))
            rows.append(Row("kernel", f"commuting square {k} n={n}",
                            commuting_square_residual(W, f, pts),
                            _budget(budgets, "commuting_square")))
    return rows


SUITES = ("determinantal", "equivariance", "weil", "kernel")
