"""Shape of the certified tail bound and its ingredients.

Prints a small table of the optimized Chernoff bound
inf_t exp(-t x + gamma_n(t)) for a sum of n bounded random matrices with
variance proxy v^2, range M and geometric mixing rate c, and shows how the
log-Laplace majorant behaves across its validity window.
"""

import numpy as np

from depbernstein import bounds

inp = bounds.BernsteinInputs(n=256, d=4, M=1.0, v=0.5, c=2.0)
gamma = bounds.gamma_cn(inp.c, inp.n)
print(f"n = {inp.n}, d = {inp.d}, M = {inp.M}, v = {inp.v}, c = {inp.c}")
print(f"range-inflation factor gamma(c, n) = {gamma:.2f}")
print(f"log-Laplace window: t < 1/(M gamma) = {1.0 / (inp.M * gamma):.3e}\n")

print("log-Laplace majorant across the window:")
for frac in (0.1, 0.5, 0.9):
    t = frac * (1.0 - 1e-9) / (inp.M * gamma)
    print(f"  t = {t:.3e}  gamma_n(t) = {bounds.master_log_laplace(t, inp):.4f}")

print("\ncertified tail bound (capped at d):")
print(f"{'x':>10} {'bound':>12} {'t_star':>12}")
for x in np.linspace(10, 600, 10):
    b, t_star = bounds.tail_bound_certified(float(x), inp)
    print(f"{x:10.1f} {b:12.4e} {t_star:12.4e}")

print(f"\nexpectation ceiling on E lambda_max: "
      f"{bounds.expectation_bound(inp):.2f}")
