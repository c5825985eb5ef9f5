"""Integrating a function over affine Lagrangian planes.

Walks through the flat chart, the closed form for Gaussians, the compact
chart and the symplectic equivariance of the transform.
"""
import numpy as np

from lagrad.gaussian import GaussianFunction, radon_flat_gaussian, random_gaussian
from lagrad.geometry import FlatChartPoint, flat_to_compact
from lagrad.radon import (equivariance_residual, radon_comp_numeric, radon_flat_numeric,
                          random_chart_points)
from lagrad.symplectic import random_symplectic

rng = np.random.default_rng(0)

print("A Lagrangian plane in R^2n is {(T y + tau, y)}: T symmetric, tau a shift.")
G = GaussianFunction.standard(2)
p = FlatChartPoint(np.zeros((1, 1)), [0.0])
print(f"standard Gaussian over the line x = 0: numeric {radon_flat_numeric(G, p):.8f}, "
      f"closed form {complex(radon_flat_gaussian(G, p.T, p.tau)).real:.8f}")

print("\nTensor-product Gauss-Hermite quadrature against the closed form:")
for n in (1, 2, 3):
    worst = 0.0
    for q in random_chart_points(n, 10, rng):
        H = random_gaussian(2 * n, rng)
        exact = complex(radon_flat_gaussian(H, q.T, q.tau))
        worst = max(worst, abs(radon_flat_numeric(H, q) - exact) / abs(exact))
    print(f"  n={n}: worst relative error over 10 planes {worst:.1e}")

print("\nThe compact chart (S unitary symmetric) covers every Lagrangian plane.")
q = flat_to_compact(FlatChartPoint([[0.5]], [0.2]))
print(f"  T=0.5 maps to S={q.S[0, 0]:.4f}; surface-measure transform there "
      f"{radon_comp_numeric(G, q):.6f}")

print("\nEquivariance: transforming f by g equals acting on the transform by g.")
for k in range(3):
    g = random_symplectic(2, k, word_length=3, translations=True, scale=0.5)
    r = equivariance_residual(g, random_gaussian(4, rng), seed=k)
    print(f"  random affine symplectic g_{k}: residual {r:.1e}")
