"""Determinantal differential systems on the flat chart.

The derivative matrix on functions F(T, tau), T symmetric, is

    [ 2 d/dt11   d/dt12  ...  d/dtau1 ]
    [ d/dt12   2 d/dt22  ...  d/dtau2 ]
    [   ...                     ...   ]
    [ d/dtau1   d/dtau2  ...     0    ]

with t_kl (k < l) the independent off-diagonal entries.  Radon images are
annihilated by all its 3x3 minors; the pure-T block (drop the last row and
column) gives the systems used for the extraneous families.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .gaussian import GaussianFunction, gauss_fourier, radon_flat_gaussian
from .polynomial import Polynomial
from .symplectic import AffineSymplectic, affine_action


def chart_variables(n: int, with_tau: bool = True, t_name: str = "t", tau_name: str = "tau"):
    names = [f"{t_name}{k}{l}" for k in range(1, n + 1) for l in range(k, n + 1)]
    if with_tau:
        names += [f"{tau_name}{j}" for j in range(1, n + 1)]
    return tuple(names)


def _t_index(n: int, k: int, l: int) -> int:
    k, l = min(k, l), max(k, l)
    return sum(n - i for i in range(k)) + (l - k)


def derivative_matrix(n: int, with_tau: bool = True):
    """Entries are (coefficient, variable index) or None for zero."""
    nv = n * (n + 1) // 2
    size = n + 1 if with_tau else n
    M = [[None] * size for _ in range(size)]
    for k in range(n):
        for l in range(n):
            M[k][l] = (2 if k == l else 1, _t_index(n, k, l))
    if with_tau:
        for k in range(n):
            M[k][n] = M[n][k] = (1, nv + k)
    return M


def _perm_sign(p) -> int:
    sign, p = 1, list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class MinorOperator:
    order: int
    rows: tuple
    cols: tuple
    variables: tuple
    expansion: tuple  # ((multi-index, integer coefficient), ...)

    def __call__(self, P: Polynomial) -> Polynomial:
        return apply_minor_exact(self, P)

    def label(self) -> str:
        return f"rows{self.rows}cols{self.cols}"


def build_minors(n: int, k: int, with_tau: bool = True) -> list[MinorOperator]:
    """All k x k minors (row and column choices independent, no deduplication)."""
    size = n + 1 if with_tau else n
    if not 1 <= k <= size:
        raise ValueError(f"minor order {k} exceeds matrix size {size}")
    M = derivative_matrix(n, with_tau)
    variables = chart_variables(n, with_tau)
    nvar = len(variables)
    out = []
    for rows in combinations(range(size), k):
        for cols in combinations(range(size), k):
            terms: dict[tuple, int] = {}
            for perm in permutations(range(k)):
                coef = _perm_sign(perm)
                alpha = [0] * nvar
                for i, j in enumerate(perm):
                    entry = M[rows[i]][cols[j]]
                    if entry is None:
                        coef = 0
                        break
                    coef *= entry[0]
                    alpha[entry[1]] += 1
                if coef:
                    a = tuple(alpha)
                    terms[a] = terms.get(a, 0) + coef
            expansion = tuple(sorted((a, c) for a, c in terms.items() if c))
            out.append(MinorOperator(k, rows, cols, variables, expansion))
    return out


def apply_minor_exact(D: MinorOperator, P: Polynomial) -> Polynomial:
    if P.variables != D.variables:
        raise ValueError("polynomial variables do not match the operator")
    out = Polynomial(P.variables)
    for alpha, c in D.expansion:
        out = out + c * P.diff(alpha)
    return out


def minor_symbol(D: MinorOperator, X, xi=None):
    """Value of the operator's symbol: the same minor of [[X, xi], [xi^T, 0]]."""
    X = np.asarray(X)
    n = X.shape[0]
    if xi is not None:
        big = np.zeros((n + 1, n + 1), dtype=X.dtype)
        big[:n, :n] = X
        big[:n, n] = big[n, :n] = xi
        X = big
    sub = [[X[r][c] for c in D.cols] for r in D.rows]
    return _exact_det(sub)


def _exact_det(M):
    k = len(M)
    total = 0
    for perm in permutations(range(k)):
        term = _perm_sign(perm)
        for i, j in enumerate(perm):
            term = term * M[i][j]
        total = total + term
    return total


# --------------------------------------------------------- polynomial families

def symm_polys(n: int, with_tau: bool = True):
    """Return (t, tau) dictionaries of coordinate polynomials; t[(k, l)] 1-based."""
    v = chart_variables(n, with_tau)
    t = {}
    for k in range(1, n + 1):
        for l in range(k, n + 1):
            t[(k, l)] = t[(l, k)] = Polynomial.var(v, f"t{k}{l}")
    tau = {j: Polynomial.var(v, f"tau{j}") for j in range(1, n + 1)} if with_tau else {}
    return t, tau


def leading_minor_poly(n: int, m: int, with_tau: bool = False) -> Polynomial:
    """det of the upper-left m x m block of T."""
    t, _ = symm_polys(n, with_tau)
    sub = [[t[(i, j)] for j in range(1, m + 1)] for i in range(1, m + 1)]
    return _exact_det(sub) if m else Polynomial.constant(chart_variables(n, with_tau), 1)


def annihilated_by(P: Polynomial, minors) -> bool:
    return all(apply_minor_exact(D, P).is_zero() for D in minors)


def check_extraneous_family(n: int, signature_params: dict) -> bool:
    """Exact test of the generating polynomials of the extraneous families.

    signature_params:
      {"family": "det2", "alpha": a, "beta": b}  t11^(a-b) det(T_2)^b under all 3x3 minors
      {"family": "t11", "alpha": a}               t11^a under 2x2 minors of the T-block
      {"family": "t11t22"}                        negative control under 2x2 minors
    Minors of the T-block are used when they exist; otherwise the full system
    with the tau row (which acts on tau-free polynomials through the T-block).
    """
    fam = signature_params.get("family", "det2")
    a = int(signature_params.get("alpha", 1))
    b = int(signature_params.get("beta", 0))
    if fam == "det2":
        if n < 2 or not 0 <= b <= a:
            raise ValueError("need n >= 2 and 0 <= beta <= alpha")
        k, poly = 3, None
    elif fam in ("t11", "t11t22"):
        k = 2
    else:
        raise ValueError(f"unknown family {fam!r}")
    with_tau = n < k
    t, _ = symm_polys(n, with_tau)
    if fam == "det2":
        poly = t[(1, 1)] ** (a - b) * leading_minor_poly(n, 2, with_tau) ** b
    elif fam == "t11":
        poly = t[(1, 1)] ** a
    else:
        if n < 2:
            raise ValueError("t11 t22 needs n >= 2")
        poly = t[(1, 1)] * t[(2, 2)]
    return annihilated_by(poly, build_minors(n, k, with_tau))


# --------------------------------------------------------- finite differences

_STENCILS = {
    0: ({0: 1.0}, 0),
    1: ({-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}, 1),
    2: ({-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}, 2),
    3: ({-3: 1 / 8, -2: -1.0, -1: 13 / 8, 1: -13 / 8, 2: 1.0, 3: -1 / 8}, 3),
}


def _unpack(n: int, x: np.ndarray):
    nv = n * (n + 1) // 2
    T = np.zeros((n, n))
    iu = np.triu_indices(n)
    T[iu] = x[:nv]
    T = T + np.triu(T, 1).T
    return T, x[nv:]


def _pack(T, tau) -> np.ndarray:
    return np.concatenate([np.asarray(T)[np.triu_indices(len(tau))], tau])


def fd_partial(F, n: int, x0: np.ndarray, alpha, h: float) -> complex:
    """4th-order central difference of d^alpha F at the packed point x0."""
    active = [(i, a) for i, a in enumerate(alpha) if a]
    if any(a > 3 for _, a in active):
        raise ValueError("derivative order above 3 per variable is not supported")
    total = 0.0 + 0.0j
    grids = [list(_STENCILS[a][0].items()) for _, a in active]
    for combo in np.ndindex(*[len(g) for g in grids]):
        w = 1.0
        x = x0.copy()
        for (i, a), g, idx in zip(active, grids, combo):
            off, coef = g[idx]
            w *= coef
            x[i] += off * h
        total += w * F(*_unpack(n, x))
    return total / h ** sum(a for _, a in active)


def apply_minor_fd(D: MinorOperator, F, x, h: float = 0.05, return_scale: bool = False):
    """Finite-difference value of D F at the flat chart point x = (T, tau).

    F is a callable F(T, tau).  Richardson extrapolation over (h, h/2) removes
    the leading h^4 term.  With ``return_scale`` also returns
    sum |coef * d^alpha F|, the magnitude scale the residual is judged against.
    """
    if not 1e-3 <= h <= 1e-1:
        raise ValueError("step h must lie in [1e-3, 1e-1]")
    n = int(round((np.sqrt(8 * len(D.variables) + 9) - 3) / 2)) if "tau1" in D.variables \
        else int(round((np.sqrt(8 * len(D.variables) + 1) - 1) / 2))
    T, tau = (x.T, x.tau) if hasattr(x, "T") else x
    tau = np.asarray(tau, dtype=float) if "tau1" in D.variables else np.zeros(0)
    x0 = _pack(T, tau) if tau.size else np.asarray(T)[np.triu_indices(n)].astype(float)
    G = F if tau.size else (lambda T_, _tau: F(T_))
    value, scale = 0.0 + 0.0j, 0.0
    for alpha, c in D.expansion:
        d1 = fd_partial(G, n, x0, alpha, h)
        d2 = fd_partial(G, n, x0, alpha, h / 2)
        d = (16 * d2 - d1) / 15
        value += c * d
        scale += abs(c * d)
    return (value, scale) if return_scale else value


def transform_solution(g: AffineSymplectic, F):
    """(T, tau) -> F(g.(T, tau)) det(cT + d)^{-1}."""
    def out(T, tau):
        T = np.atleast_2d(np.asarray(T, dtype=float))
        Tn, taun = affine_action(g, T, tau)
        return F(Tn, taun) / np.linalg.det(g.c @ T + g.d)
    return out


def oracle_image(G: GaussianFunction):
    """Closed-form R_flat G as a callable F(T, tau)."""
    return lambda T, tau: complex(radon_flat_gaussian(G, T, tau))


# --------------------------------------------------------- rank-2 witness

def rank2_matrix(y, z) -> np.ndarray:
    """[[y z^T + z y^T, z], [z^T, 0]]."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    n = y.size
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = np.outer(y, z) + np.outer(z, y)
    M[:n, n] = M[n, :n] = z
    return M


def witness_G(chi: GaussianFunction, T, tau) -> complex:
    """int int chi(x, z) exp(i (z^T T x + z^T tau)) dx dz in closed form."""
    n = chi.m // 2
    T = np.atleast_2d(np.asarray(T, dtype=float))
    Q = np.zeros((2 * n, 2 * n), dtype=complex)
    Q[:n, n:] = Q[n:, :n] = -1j * T
    q = np.concatenate([np.zeros(n), 1j * np.asarray(tau, dtype=float)])
    return chi.times_exp_quadratic(Q=Q, q=q).integral()


def witness_psi(chi: GaussianFunction, fourier_block: str = "z") -> GaussianFunction:
    """psi(xi, x) = int chi(x, z) exp(i xi^T z) dz, variables ordered (xi, x).

    ``fourier_block="x"`` gives the alternative psi(xi, z) = int chi(x, z)
    exp(i xi^T x) dx, kept for comparison.
    """
    n = chi.m // 2
    if fourier_block == "x":
        return gauss_fourier(chi, +1, axes=np.arange(n))
    F = gauss_fourier(chi, +1, axes=np.arange(n, 2 * n))  # variables (x, xi)
    perm = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
    return GaussianFunction(F.A[np.ix_(perm, perm)], F.b[perm], F.c)


def rank2_witness_check(chi: GaussianFunction, points=None, seed=0,
                        fourier_block: str = "z") -> float:
    """max |G(T, tau) - R_flat psi(T, tau)| / max |G| over chart points."""
    from .radon import random_chart_points

    n = chi.m // 2
    if points is None:
        points = random_chart_points(n, 50, np.random.default_rng(seed))
    psi = witness_psi(chi, fourier_block)
    diffs, scale = [], []
    for p in points:
        a = witness_G(chi, p.T, p.tau)
        b = complex(radon_flat_gaussian(psi, p.T, p.tau))
        diffs.append(abs(a - b))
        scale.append(abs(a))
    return float(max(diffs) / max(scale))
