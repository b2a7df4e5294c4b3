"""Volume polynomials built from the correlators, and two recursions they obey."""
from superwp.combinatorics import MultiIndex
from superwp.volumes import (kappa_only_residual, normalized_volume, point_recursion_residual,
                             rescale_to_normalized, super_volume, volume_polynomial)

for g, n in [(1, 1), (2, 0), (2, 1), (2, 2), (3, 1)]:
    print(f"V_{g},{n}(L) =", volume_polynomial(g, n).render())

# The normalized polynomials are a rescaling of the plain ones.
V = volume_polynomial(2, 1)
print("normalized V_2,1 =", normalized_volume(2, 1).render())
assert rescale_to_normalized(V, 2) == normalized_volume(2, 1)
print("super V_2,1      =", super_volume(2, 1).render())

# Volumes with extra kappa classes: a recursion in the number of points ...
worst = max(abs(point_recursion_residual(g, n, MultiIndex((1,))))
            for g in range(1, 5) for n in range(0 if g > 1 else 1, 3))
print("largest point-recursion residual:", worst)

# ... and a kappa-only recursion, which needs a binomial weight on the
# splitting term.  Without it the residual first shows up in genus four.
for variant in ("with_binomial", "as_stated"):
    r = kappa_only_residual(4, MultiIndex((3,)), variant)
    print(f"kappa-only recursion, g=4, b=(3), {variant}: residual {r}")
