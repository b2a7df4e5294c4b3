"""Residuals of the operator identities on the truncated generating functions.

Every function returns only the nonzero coefficients that fall inside the
reliable window, so an empty result means the identity holds there.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from ..combinatorics import MultiIndex, beta_multi, multi_indices_up_to_weight, p_polynomial
from .operators import DifferentialOperator, virasoro_hat, virasoro_V
from .series import (Monomial, SeriesCutoff, TruncatedSeries, _trim, build_free_energy,
                     exponentiate)

__all__ = [
    "annihilation_residual",
    "commutator_residual",
    "commutator_residual_on_monomials",
    "commutator_claim",
    "kdv_pde_residual",
    "shift_compare",
    "COMMUTATOR_VARIANTS",
    "KDV_FORMS",
    "SHIFT_MODES",
]

COMMUTATOR_VARIANTS = ("hat", "as_stated")
KDV_FORMS = ("log", "as_stated")
SHIFT_MODES = ("weighted", "counted")


def annihilation_residual(op: DifferentialOperator, series: TruncatedSeries) -> dict[Monomial, Fraction]:
    """Nonzero in-window coefficients of ``op(series)``."""
    return op.apply(series).nonzero_in_window()


def _family(kind: str):
    if kind == "hat":
        return virasoro_hat
    if kind == "V":
        return virasoro_V
    raise ValueError(f"unknown operator family {kind!r}")


def commutator_claim(n: int, m: int, cutoff: SeriesCutoff, family: str = "hat",
                     variant: str = "hat") -> DifferentialOperator:
    """The right-hand side the bracket ``[X_n, X_m]`` is compared with.

    For ``family="V"`` this is ``(n-m) V_{n+m}``.  For ``family="hat"``,
    ``variant="hat"`` gives ``(n-m) sum_L beta_L s^L Vhat_{n+m+|L|}`` and
    ``variant="as_stated"`` puts ``V`` in place of ``Vhat`` there.
    """
    if family == "V":
        return virasoro_V(n + m, cutoff).scale(n - m)
    if variant not in COMMUTATOR_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    inner = virasoro_hat if variant == "hat" else virasoro_V
    rhs = DifferentialOperator()
    for L in multi_indices_up_to_weight(cutoff.max_s_weight):
        rhs = rhs + inner(n + m + L.weight, cutoff).times_monomial((0, (), L), beta_multi(L))
    return rhs.scale(n - m).restrict(cutoff.max_t_index, cutoff.max_s_weight)


def commutator_residual(n: int, m: int, cutoff: SeriesCutoff, family: str = "hat",
                        variant: str = "hat") -> DifferentialOperator:
    """``[X_n, X_m]`` minus its claimed value, restricted to the cutoff's operator range.

    Truncating at t-index ``T`` and s-weight ``S`` is exact for every
    resulting term whose indices stay within ``T`` and whose s-weight stays
    within ``S``: a dropped term always leaves an index or s-weight beyond the
    bound in each product it takes part in.
    """
    if n < 0 or m < 0:
        raise ValueError("n, m must be >= 0")
    op = _family(family)
    A, B = op(n, cutoff), op(m, cutoff)
    bracket = A.commutator(B).restrict(cutoff.max_t_index, cutoff.max_s_weight)
    return bracket - commutator_claim(n, m, cutoff, family, variant)


def commutator_residual_on_monomials(n: int, m: int, cutoff: SeriesCutoff, family: str = "hat",
                                     variant: str = "hat") -> dict[tuple, Fraction]:
    """Same check by applying both sides to every monomial of the cutoff.

    Uses repeated application only, no symbolic composition.  Returns the
    nonzero ``(input, output) -> coefficient`` entries with output s-weight
    inside the cutoff.
    """
    op = _family(family)
    A, B = op(n, cutoff), op(m, cutoff)
    rhs = commutator_claim(n, m, cutoff, family, variant)
    bad = {}
    for x in cutoff.universe():
        total: dict[Monomial, Fraction] = {}
        for first, second, sign in ((B, A, 1), (A, B, -1)):
            for y, c in first.apply_monomial(x).items():
                for z, d in second.apply_monomial(y).items():
                    total[z] = total.get(z, Fraction(0)) + sign * c * d
        for z, c in rhs.apply_monomial(x).items():
            total[z] = total.get(z, Fraction(0)) - c
        for z, c in total.items():
            if c and z[2].weight <= cutoff.max_s_weight:
                bad[(x, z)] = c
    return bad


def kdv_pde_residual(cutoff: SeriesCutoff, form: str = "log", with_kappa: bool = True,
                     series: Optional[TruncatedSeries] = None) -> dict[Monomial, Fraction]:
    """Residual of the first KdV equation on the free energy.

    ``form="log"``: ``F_01 - hbar/12 F_0000 - hbar/2 F_00^2`` for ``F = log G``.
    ``form="as_stated"``: ``G_01 - hbar/12 G_0000 - 1/2 G_00^2`` on ``G`` itself.
    ``series`` overrides the free energy ``F`` (used by mutation tests).
    """
    if form not in KDV_FORMS:
        raise ValueError(f"unknown form {form!r}")
    if cutoff.max_points < 4 or cutoff.max_weight < 1:
        raise ValueError("cutoff too small for the KdV check")
    F = series if series is not None else build_free_energy(cutoff, with_kappa=with_kappa)
    X = F if form == "log" else exponentiate(F)
    d0 = X.derivative(0)
    d00 = d0.derivative(0)
    d01 = d0.derivative(1)
    d0000 = d00.derivative(0).derivative(0)
    square = d00 * d00
    half = Fraction(1, 2)
    if form == "log":
        square = square.times_hbar()
    window = cutoff.replace(max_points=cutoff.max_points - 4, max_weight=cutoff.max_weight - 1)
    res = (d01.truncate(window) - d0000.times_hbar().scale(Fraction(1, 12)).truncate(window)
           - square.scale(half).truncate(window))
    return res.nonzero_in_window()


def _poly_mul(p: dict, q: dict, smax: int) -> dict:
    out: dict[MultiIndex, Fraction] = {}
    for a, x in p.items():
        for b, y in q.items():
            c = a + b
            if c.weight <= smax:
                out[c] = out.get(c, Fraction(0)) + x * y
    return {k: v for k, v in out.items() if v}


def _powers(p: dict, top: int, smax: int) -> list[dict]:
    out = [{MultiIndex(): Fraction(1)}]
    for _ in range(top):
        out.append(_poly_mul(out[-1], p, smax))
    return out


def shift_compare(cutoff: SeriesCutoff, mode: str = "weighted") -> dict[Monomial, Fraction]:
    """``log G`` minus ``log Z`` with ``t_k -> t_k + p_k(s)`` for ``k >= 1``.

    ``log Z`` is taken with room for as many extra points as the s-weight
    bound allows, since each substituted ``p_k`` carries s-weight at least 1.
    """
    if mode not in SHIFT_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    S = cutoff.max_s_weight
    FG = build_free_energy(cutoff, with_kappa=True)
    FZ = build_free_energy(cutoff.replace(max_points=cutoff.max_points + S, max_s_weight=0),
                           with_kappa=False)
    shifts = {}
    for k in range(1, cutoff.max_t_index + 1):
        p = {L: c for L, c in p_polynomial(k, mode, max_weight=S).items() if L.weight <= S}
        if p:
            shifts[k] = p
    shifted: dict[Monomial, Fraction] = {}
    for (a, t, _), c in FZ.terms.items():
        # expand prod_k (t_k + p_k)^e_k one index at a time
        partial = [((), MultiIndex(), Fraction(c))]
        for k, e in enumerate(t):
            nxt = []
            pw = _powers(shifts[k], e, S) if k in shifts and e else None
            for counts, s, coef in partial:
                for r in range(e + 1):
                    if r and pw is None:
                        break
                    base = counts + (e - r,)
                    poly = pw[r] if r else {MultiIndex(): Fraction(1)}
                    for L, v in poly.items():
                        s2 = s + L
                        if s2.weight <= S:
                            nxt.append((base, s2, coef * math.comb(e, r) * v))
            partial = nxt
        for counts, s, coef in partial:
            m = (a, _trim(counts), s)
            if cutoff.contains(m):
                shifted[m] = shifted.get(m, Fraction(0)) + coef
    diff = dict(FG.terms)
    for m, c in shifted.items():
        diff[m] = diff.get(m, Fraction(0)) - c
    return {m: c for m, c in diff.items() if c}
