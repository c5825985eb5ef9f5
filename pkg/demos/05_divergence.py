"""An L2 function whose plane integrals diverge.

gamma(x) ~ |x|^-2 / log|x| on R^4 is square integrable, but its integrals over
a fixed plane through 0, truncated at radius N, grow like log log N.
"""
from lagrad.radon import divergence_demo

res = divergence_demo((4, 8, 16, 32, 64, 128, 256))
print("truncated plane integral:")
for N, v in res["radon"]:
    print(f"  N = {N:4d}: {v:.5f}")
print(f"slope against log log N: {res['growth_slope_vs_loglogN']:.3f}")
print("\n||gamma||^2 over balls of radius 10^k:")
for (lg, v), inc in zip(res["l2_sq"], [float("nan")] + list(res["l2_rel_increment"])):
    print(f"  k = {lg:6.0f}: {v:.6f}   relative increment {inc:.1e}")
