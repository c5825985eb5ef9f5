"""Three ways back from plane integrals to the function.

Fourier slice route (n = 1, 2), filtered back-projection on the line
parametrization (n = 1) and the point-average / Laplacian route (n = 2).
"""
import numpy as np

from lagrad.gaussian import GaussianFunction
from lagrad.grid import GridField
from lagrad.inversion import (angle_grid, calibrate, half_step_grid, interior_mask,
                              invert_fourier, invert_riesz, invert_torus, oracle_set,
                              relative_l2, riesz_field, torus_gaussian_exact)
from lagrad.radon import RadonSamples

G2 = GaussianFunction.from_mean_cov([0.2, -0.1], [[1.0, 0.2], [0.2, 0.8]])

print("Fourier route: the tau-Fourier transform of the data at frequency v is the")
print("Fourier transform of f at (v, -T v), so every T with T v = w gives the same value.")
for N, L in ((32, 10 / np.sqrt(2)), (64, 10.0), (128, 10 * np.sqrt(2))):
    e = relative_l2(invert_fourier(G2, GridField.centered((N, N), L)), G2)
    print(f"  n=1 grid {N}^2, half width {L:.2f}: relative L2 error {e:.1e}")

print("\nLine parametrization: ramp-filtered back-projection.")
for na, no, N in ((90, 64, 32), (180, 128, 64), (360, 256, 128)):
    phi, p = angle_grid(na), half_step_grid(no, 8.0)
    data = RadonSamples("torus", 1, [phi, p], torus_gaussian_exact(G2, phi[:, None], p[None, :]))
    e = relative_l2(invert_torus(data, GridField.centered((N, N), 4.0)), G2)
    print(f"  {na} angles x {no} offsets -> {N}^2: error {e:.1e}")

cal = calibrate("torus-literal", seed=0)
print(f"\nThe averaged derivative formula needs a constant; calibrated on three Gaussians "
      f"it is {cal.value:.5f} (-1/pi = {-1 / np.pi:.5f}).")

print("\nPoint averages over all planes through x give a Riesz potential; applying")
print("-Laplacian once (n = 2) undoes it up to a constant.")
G4 = oracle_set(4, 1, 3)[0]
for N in (12, 16, 20):
    sp = GridField.centered((N,) * 4, 5.0)
    rec = invert_riesz(riesz_field(G4, sp))
    e = relative_l2(rec.with_values(np.nan_to_num(rec.values)), G4, interior_mask(sp.shape))
    print(f"  {N}^4 grid: interior error {e:.1e}")
