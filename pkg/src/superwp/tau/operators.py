"""Normal-ordered differential operators in the t-variables.

An operator is a finite sum of terms ``c * m * d/dt_{p1} ... d/dt_{pr}``
with a rational ``c``, a coefficient monomial ``m`` in hbar, t and s (always
to the left) and a multiset of partials.  Application is literal
term-by-term differentiation; composition uses the multiset Leibniz rule.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional

from ..combinatorics import (MultiIndex, beta_multi, double_factorial, gamma_coefficient,
                             multi_indices_up_to_weight)
from .series import (Monomial, SeriesCutoff, TruncatedSeries, _sub_counts, _trim, mono_div,
                     mono_mul, t_counts)

__all__ = [
    "DifferentialOperator",
    "virasoro_hat",
    "virasoro_V",
    "virasoro_V_direct",
    "virasoro_E",
]

ONE: Monomial = (0, (), MultiIndex())

Term = tuple  # (Monomial, partial counts tuple)


def _falling(n: int, k: int) -> int:
    return math.perm(n, k) if k <= n else 0


def _apply_partials(counts: tuple[int, ...], partials: tuple[int, ...]):
    """``prod d/dt`` applied to ``t^counts``: (factor, new counts) or None."""
    rest = _sub_counts(counts, partials)
    if rest is None:
        return None
    factor = 1
    for i, p in enumerate(partials):
        if p:
            factor *= _falling(counts[i], p)
    return factor, rest


class DifferentialOperator:
    """Immutable formal sum of normal-ordered terms.

    ``terms`` maps ``(monomial, partial_counts)`` to a rational coefficient,
    where ``partial_counts`` is a count tuple like the t-part of a monomial.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Term, Fraction]] = None):
        clean = {}
        for (m, p), c in (terms or {}).items():
            if c:
                key = (m, _trim(p))
                clean[key] = clean.get(key, Fraction(0)) + Fraction(c)
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def scalar(cls, c) -> "DifferentialOperator":
        return cls({(ONE, ()): Fraction(c)})

    @classmethod
    def partial(cls, *indices: int, coefficient=1, mono: Monomial = ONE) -> "DifferentialOperator":
        return cls({(mono, t_counts(indices)): Fraction(coefficient)})

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return DifferentialOperator(out)

    def __neg__(self):
        return DifferentialOperator({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "DifferentialOperator":
        factor = Fraction(factor)
        return DifferentialOperator({k: c * factor for k, c in self.terms.items()})

    def times_monomial(self, mono: Monomial, factor=1) -> "DifferentialOperator":
        """Left multiplication by ``factor * mono``."""
        factor = Fraction(factor)
        return DifferentialOperator({(mono_mul(mono, m), p): c * factor
                                     for (m, p), c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, DifferentialOperator) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def restrict(self, max_t_index: int, max_s_weight: int) -> "DifferentialOperator":
        """Drop terms touching a t-index or s-weight beyond the bounds."""
        out = {}
        for (m, p), c in self.terms.items():
            if len(m[1]) > max_t_index + 1 or len(p) > max_t_index + 1:
                continue
            if m[2].weight > max_s_weight:
                continue
            out[(m, p)] = c
        return DifferentialOperator(out)

    def compose(self, other: "DifferentialOperator") -> "DifferentialOperator":
        """``self o other`` in normal order."""
        out: dict[Term, Fraction] = {}
        for (m1, p1), c1 in self.terms.items():
            for (m2, p2), c2 in other.terms.items():
                # d^p1 (m2 * d^p2) = sum_{q <= p1} binom(p1, q) (d^q m2) d^(p1-q) d^p2
                ranges = [range(min(p1[i], m2[1][i] if i < len(m2[1]) else 0) + 1)
                          for i in range(len(p1))]
                for q in product(*ranges):
                    hit = _apply_partials(m2[1], q)
                    if hit is None:
                        continue
                    fac, rest = hit
                    binom = math.prod(math.comb(p1[i], q[i]) for i in range(len(p1)))
                    mono = mono_mul(m1, (m2[0], rest, m2[2]))
                    parts = tuple(p1[i] - q[i] for i in range(len(p1)))
                    parts = _add(parts, p2)
                    key = (mono, _trim(parts))
                    out[key] = out.get(key, Fraction(0)) + c1 * c2 * binom * fac
        return DifferentialOperator(out)

    def commutator(self, other: "DifferentialOperator") -> "DifferentialOperator":
        return self.compose(other) - other.compose(self)

    def apply_monomial(self, mono: Monomial) -> dict[Monomial, Fraction]:
        out: dict[Monomial, Fraction] = {}
        for (m, p), c in self.terms.items():
            hit = _apply_partials(mono[1], p)
            if hit is None:
                continue
            fac, rest = hit
            key = mono_mul(m, (mono[0], rest, mono[2]))
            out[key] = out.get(key, Fraction(0)) + c * fac
        return {k: v for k, v in out.items() if v}

    def apply(self, series: TruncatedSeries) -> TruncatedSeries:
        """Apply to a series; the result carries its reliable window.

        An output monomial is reliable when, for every term whose coefficient
        divides it, the input monomial that would feed it lies inside the
        input's reliable window.
        """
        cutoff = series.cutoff
        out: dict[Monomial, Fraction] = {}
        for mono, v in series.terms.items():
            for k, c in self.apply_monomial(mono).items():
                if cutoff.contains(k):
                    out[k] = out.get(k, Fraction(0)) + c * v
        reliable = frozenset(m for m in cutoff.universe() if self._feeds_ok(m, series))
        return TruncatedSeries(out, cutoff, reliable)

    def _feeds_ok(self, out: Monomial, series: TruncatedSeries) -> bool:
        for (m, p), _ in self.terms.items():
            base = mono_div(out, m)
            if base is None:
                continue
            source = (base[0], _add(base[1], p), base[2])
            if not series.in_window(source):
                return False
        return True

    def __repr__(self):
        return f"DifferentialOperator({len(self.terms)} terms)"


def _add(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    n = max(len(x), len(y))
    return tuple((x[i] if i < len(x) else 0) + (y[i] if i < len(y) else 0) for i in range(n))


def _s(L: MultiIndex) -> Monomial:
    return (0, (), L)


def virasoro_E(k: int, cutoff: SeriesCutoff) -> DifferentialOperator:
    """The s-free part: the t d/dt sum, the hbar second-order sum and the constant."""
    T = cutoff.max_t_index
    terms: dict[Term, Fraction] = {}
    for j in range(0, T + 1):
        if j + k > T:
            break
        coef = Fraction(double_factorial(2 * j + 2 * k + 1), 2 * double_factorial(2 * j - 1))
        terms[((0, t_counts([j]), MultiIndex()), t_counts([j + k]))] = coef
    for i in range(0, k):
        j = k - 1 - i
        c = Fraction(double_factorial(2 * i + 1) * double_factorial(2 * j + 1), 4)
        key = ((1, (), MultiIndex()), t_counts([i, j]))
        terms[key] = terms.get(key, Fraction(0)) + c
    if k == 0:
        terms[(ONE, ())] = Fraction(1, 16)
    return DifferentialOperator(terms)


def virasoro_hat(k: int, cutoff: SeriesCutoff) -> DifferentialOperator:
    """``-(2k+1)!!/2 d/dt_k + sum_L beta_L s^L E_{k+|L|}`` with its constant at ``k = 0``.

    Spelled out, the ``L`` summand is
    ``1/2 sum_j (2|L|+2j+2k+1)!!/(2j-1)!! t_j d/dt_{|L|+j+k}``
    plus ``hbar/4 sum_{i+j=|L|+k-1} (2i+1)!!(2j+1)!! d/dt_i d/dt_j``.
    Terms leaving the cutoff's t-index or s-weight range are dropped.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    op = DifferentialOperator()
    if k <= cutoff.max_t_index:
        op = DifferentialOperator.partial(k, coefficient=Fraction(-double_factorial(2 * k + 1), 2))
    for L in multi_indices_up_to_weight(cutoff.max_s_weight):
        op = op + virasoro_E(k + L.weight, cutoff).times_monomial(_s(L), beta_multi(L))
    return op.restrict(cutoff.max_t_index, cutoff.max_s_weight)


def virasoro_V_direct(k: int, cutoff: SeriesCutoff) -> DifferentialOperator:
    """``-1/2 sum_L (2|L|+2k+1)!! gamma_L s^L d/dt_{|L|+k} + E_k``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    op = virasoro_E(k, cutoff)
    for L in multi_indices_up_to_weight(cutoff.max_s_weight):
        idx = L.weight + k
        if idx > cutoff.max_t_index:
            continue
        c = -Fraction(double_factorial(2 * idx + 1)) * gamma_coefficient(L) / 2
        op = op + DifferentialOperator.partial(idx, coefficient=c, mono=_s(L))
    return op.restrict(cutoff.max_t_index, cutoff.max_s_weight)


def virasoro_V(k: int, cutoff: SeriesCutoff) -> DifferentialOperator:
    """``sum_L gamma_L s^L Vhat_{k+|L|}`` truncated to the cutoff."""
    if k < 0:
        raise ValueError("k must be >= 0")
    op = DifferentialOperator()
    for L in multi_indices_up_to_weight(cutoff.max_s_weight):
        op = op + virasoro_hat(k + L.weight, cutoff).times_monomial(_s(L), gamma_coefficient(L))
    return op.restrict(cutoff.max_t_index, cutoff.max_s_weight)
