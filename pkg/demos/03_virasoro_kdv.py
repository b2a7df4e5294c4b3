"""Truncated generating functions, Virasoro constraints and the KdV equation."""
from superwp.tau import SeriesCutoff, build_free_energy, exponentiate
from superwp.tau.identities import (annihilation_residual, commutator_residual, kdv_pde_residual,
                                    shift_compare)
from superwp.tau.operators import virasoro_V

cut = SeriesCutoff(3, 4, 2)
F = build_free_energy(cut)
Z = exponentiate(F)
print("first lines of the free energy:")
print("\n".join(F.dump().splitlines()[:8]))

# V_k kills the partition function inside the reliable window.
for k in range(0, 3):
    left = annihilation_residual(virasoro_V(k, cut), Z)
    print(f"V_{k} Z: {len(left)} nonzero coefficients in window")

# Brackets of the V family close on themselves.  The hatted family needs
# hatted operators on the right as well; plain ones leave a residual.
small = SeriesCutoff(3, 2, 2, max_t_index=4, max_weight=4)
for variant in ("hat", "as_stated"):
    r = commutator_residual(1, 0, small, family="hat", variant=variant)
    print(f"[Vhat_1, Vhat_0] with {variant} right side: {len(r)} nonzero coefficients")

# The KdV equation holds for log Z, not for Z itself.
for form in ("log", "as_stated"):
    r = kdv_pde_residual(SeriesCutoff(4, 6, 0), form=form, with_kappa=False)
    print(f"KdV in {form} form: {len(r)} nonzero coefficients")

# Turning on kappa_1 is a shift of the times.  Weighting by the s-degree is
# what makes the shift exact.
for mode in ("weighted", "counted"):
    print(f"shift ({mode}): {len(shift_compare(SeriesCutoff(3, 3, 2), mode))} mismatches")
