"""A tour of the kappa-psi correlators.

Run with ``python3 demos/01_correlators.py`` after installing the package.
"""
from fractions import Fraction

from superwp import corr
from superwp.correlator import Strategy, clear_caches, kmz_expand

# The two genus-one seeds and a few small numbers.
print("<tau_0>_1            =", corr(1, psi=[0]))
print("<kappa_1>_2          =", corr(2, kappa=(1,)))
print("<tau_1>_2            =", corr(2, psi=[1]))
print("<kappa_1^2 tau_0>_3  =", corr(3, kappa=(2,), psi=[0]))

# Anything off the degree g - 1 vanishes.
print("<tau_2>_2            =", corr(2, psi=[2]))

# A kappa monomial is given by its exponents: (2,) is kappa_1^2 and (1, 1)
# is kappa_1 kappa_2.  It unfolds into extra psi insertions with signs.
for coeff, extra in kmz_expand((1, 1)):
    print(f"  kappa_1 kappa_2 -> {coeff} * tau{extra}")

# Each route keeps its own memo, so agreement between them is a real check.
key = dict(g=4, kappa=(1, 1), psi=[0])
values = {}
for s in (Strategy.KMZ, Strategy.ALTERNATING, Strategy.ALPHA):
    clear_caches()
    values[s] = corr(key["g"], key["kappa"], key["psi"], strategy=s)
print("<kappa_1 kappa_2 tau_0>_4 by route:", values)
assert len(set(values.values())) == 1

# Values are exact rationals all the way up.
big = corr(8, psi=[7])
print("<tau_7>_8 =", big, "~", float(big))
assert isinstance(big, Fraction)
