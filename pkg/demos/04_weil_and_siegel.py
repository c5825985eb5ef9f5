"""Weil representation, its tensor square, and the Siegel-domain model."""
import numpy as np

from lagrad.gaussian import GaussianFunction, random_gaussian
from lagrad.symplectic import symplectic_form
from lagrad.weil import (KINDS, WeilOperator, cocycle_check, commuting_square_residual,
                         grid_unitarity, intertwining_residual, is_complex_symplectic,
                         kernel_eval, random_siegel_points, random_word, sample_gaussian,
                         stretch_block, symmetric_grid, weil_apply)

rng = np.random.default_rng(0)
grid = symmetric_grid(256, 10.0)
f = sample_gaussian(GaussianFunction.standard(1), grid)
Jf = weil_apply(WeilOperator("J"), f)
print(f"Fourier generator fixes the standard Gaussian up to sqrt(i): "
      f"{np.max(np.abs(Jf.values - np.sqrt(1j) * f.values)):.1e}")
for k in KINDS:
    W = random_word(1, rng, 1, kinds=(k,))[0]
    print(f"  {k:9s} grid unitarity defect {grid_unitarity(W, f):.1e}")

print("\nProjectivity: We(g1) We(g2) = sigma We(g1 g2) with |sigma| = 1.")
for _ in range(3):
    s, r = cocycle_check(random_word(2, rng, 3), random_word(2, rng, 3), random_gaussian(2, rng),
                         tol=np.inf)
    print(f"  sigma = {s:.6f}  (|sigma| - 1 = {abs(s) - 1:+.1e}, residual {r:.1e})")

print("\nH intertwines the geometric action on L2(R^2n) with We (x) conj-We:")
probes = [random_gaussian(4, rng)]
for k in KINDS:
    print(f"  {k:9s} residual {intertwining_residual(random_word(2, rng, 1, kinds=(k,)), probes):.1e}")

print("\nSiegel model: K f(P, pi) = int f(u) exp(i/2 u^T P u + i/sqrt2 u^T pi) du")
print(f"  kernel at P = R = i: {kernel_eval([[1j]], [0], [[1j]], [0]):.8f} (2^-1/2)")
f2 = random_gaussian(1, rng)
for k in KINDS:
    W = random_word(1, rng, 1, kinds=(k,))[0]
    r = commuting_square_residual([W], f2, random_siegel_points(1, 4, rng))
    print(f"  K We({k}) = S({k}) K: {r:.1e}")

P, Q = np.array([[0.3 + 0.9j]]), np.array([[-0.2 - 1.1j]])
print("\nStretch kernel block:")
print("  corrected corner, i*block complex symplectic:", is_complex_symplectic(1j * stretch_block(P, Q)))
print("  printed corner,   i*block complex symplectic:",
      is_complex_symplectic(1j * stretch_block(P, Q, printed=True)))
print("  eigenvalues of J0*block:", np.round(np.linalg.eigvals(symplectic_form(1) @ stretch_block(P, Q)), 10))
