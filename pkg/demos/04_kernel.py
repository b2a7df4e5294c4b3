"""The sech kernel: exact polynomials against numerical integration."""
from fractions import Fraction

from superwp.kernel import (calibrate_c_D, h_polynomial, kernel_exact, quadrature_oracle,
                            recurse_kappa1, sw_verify)

for k in range(4):
    print(f"h_{k}(t) =", h_polynomial(k))

# Exact values against scipy quadrature.
for kind, params, t in [("sech_moment", 3, 0.0), ("h", 2, 1.5), ("dd_moment", (1, 1), 0.5)]:
    exact = float(kernel_exact(kind, params, Fraction(t)))
    approx = quadrature_oracle(kind, params, t)
    print(f"{kind}{params} at t={t}: exact {exact:.12g}, quadrature {approx:.12g}")

# The boundary constant is fixed by one small case and then checked on others.
print("c_D =", calibrate_c_D())
for g, n in [(1, 2), (2, 1), (2, 2), (3, 1)]:
    print(f"kernel recursion ({g},{n}) holds:", sw_verify(g, n).is_zero())

# A recursion for kappa_1 powers that runs on the kernel coefficients alone.
print("<kappa_1^2 tau_0>_3 via the kernel route:", recurse_kappa1(3, 2, (0,)))
