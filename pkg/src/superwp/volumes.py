"""Volume polynomials assembled from the correlator engine.

``V_{g,n}(L)``  = sum (2 pi^2)^d0/d0! <kappa_1^d0 prod tau_di>_g prod L_i^(2di)/(2^di di!)
``v_{g,n}(L)``  = V_{g,n}(2 pi L) / (2 pi^2)^(g-1), which is free of pi
``Vhat_{g,n}``  = 2^(1-g-n) V_{g,n}, the super volume

pi is never evaluated numerically: every term carries an even power of pi
next to its rational coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .combinatorics import MultiIndex, mi_binomial, mi_multinomial, splits
from .correlator import CorrelatorKey, UndefinedCorrelator, correlator
from .render import format_rational

__all__ = [
    "VolumePolynomial",
    "volume_polynomial",
    "normalized_volume",
    "super_volume",
    "higher_volume",
    "point_recursion_residual",
    "kappa_only_residual",
    "thm16_residual",
    "thm17_residual",
    "evaluate",
    "rescale_to_normalized",
]

Monomial = tuple  # (pi_power, (e_1, ..., e_n))


@dataclass(frozen=True)
class VolumePolynomial:
    """Exact polynomial in ``pi^2`` and ``L_1 .. L_n``.

    ``terms`` maps ``(pi_power, (e_1, ..., e_n))`` to the rational coefficient
    of ``pi^pi_power * prod L_i^e_i``.  Zero coefficients are never stored.
    """

    n: int
    terms: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (p, exps), c in self.terms.items():
            exps = tuple(exps)
            if len(exps) != self.n:
                raise ValueError(f"exponent vector {exps} does not have arity {self.n}")
            if c:
                clean[(p, exps)] = Fraction(c)
        object.__setattr__(self, "terms", clean)

    def __add__(self, other: "VolumePolynomial") -> "VolumePolynomial":
        if self.n != other.n:
            raise ValueError("arity mismatch")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return VolumePolynomial(self.n, out)

    def __neg__(self):
        return VolumePolynomial(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "VolumePolynomial":
        factor = Fraction(factor)
        return VolumePolynomial(self.n, {m: c * factor for m, c in self.terms.items()})

    def times_variable(self, i: int, power: int = 1) -> "VolumePolynomial":
        """Multiply by ``L_i^power`` (1-based ``i``)."""
        out = {}
        for (p, e), c in self.terms.items():
            e = list(e)
            e[i - 1] += power
            out[(p, tuple(e))] = c
        return VolumePolynomial(self.n, out)

    def is_zero(self) -> bool:
        return not self.terms

    def pi_free(self) -> bool:
        return all(p == 0 for p, _ in self.terms)

    def is_symmetric(self) -> bool:
        for perm in permutations(range(self.n)):
            for (p, e), c in self.terms.items():
                if self.terms.get((p, tuple(e[i] for i in perm))) != c:
                    return False
        return True

    def coefficient(self, exps: Sequence[int], pi_power: int = 0) -> Fraction:
        return self.terms.get((pi_power, tuple(exps)), Fraction(0))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        # by L-exponents, then by pi power
        return sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0]))

    def render(self) -> str:
        """Canonical text, e.g. ``9/64*pi^2 + 3/256*L1^2``; ``0`` when empty."""
        if not self.terms:
            return "0"
        pieces = []
        for (p, e), c in self.sorted_terms():
            factors = []
            if p:
                factors.append(f"pi^{p}")
            for i, k in enumerate(e, start=1):
                if k == 1:
                    factors.append(f"L{i}")
                elif k:
                    factors.append(f"L{i}^{k}")
            body = format_rational(abs(c))
            if factors:
                body += "*" + "*".join(factors)
            pieces.append(("-" if c < 0 else "+", body))
        first_sign, first = pieces[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.render()


def _check_gn(g: int, n: int) -> None:
    if g < 1 or n < 0:
        raise ValueError(f"need g >= 1 and n >= 0, got ({g}, {n})")
    if (g, n) == (1, 0):
        raise UndefinedCorrelator("V_{1,0} is not defined")


def _exponent_vectors(g: int, n: int):
    # (d0, (d1..dn)) with d0 + sum d = g - 1, all orderings of d
    for d0 in range(g):
        rest = g - 1 - d0
        for total_parts in _compositions(rest, n):
            yield d0, total_parts


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for tail in _compositions(total - first, parts - 1):
            yield (first,) + tail


def _kappa1(d0: int) -> MultiIndex:
    return MultiIndex.delta(1, d0) if d0 else MultiIndex()


def volume_polynomial(g: int, n: int) -> VolumePolynomial:
    """``V^Theta_{g,n}(L_1..L_n)`` with symbolic pi."""
    _check_gn(g, n)
    terms = {}
    for d0, d in _exponent_vectors(g, n):
        value = correlator(CorrelatorKey(g, _kappa1(d0), d))
        if not value:
            continue
        coef = Fraction(2 ** d0, math.factorial(d0)) * value
        for di in d:
            coef /= 2 ** di * math.factorial(di)
        terms[(2 * d0, tuple(2 * di for di in d))] = coef
    return VolumePolynomial(n, terms)


def normalized_volume(g: int, n: int) -> VolumePolynomial:
    """``v^Theta_{g,n}``: sum <kappa_1^d0 prod tau_di> prod L_i^(2di) / prod_{i>=0} di!."""
    _check_gn(g, n)
    terms = {}
    for d0, d in _exponent_vectors(g, n):
        value = correlator(CorrelatorKey(g, _kappa1(d0), d))
        if not value:
            continue
        denom = math.factorial(d0) * math.prod(math.factorial(di) for di in d)
        key = (0, tuple(2 * di for di in d))
        terms[key] = terms.get(key, Fraction(0)) + value / denom
    return VolumePolynomial(n, terms)


def super_volume(g: int, n: int) -> VolumePolynomial:
    """Super Weil-Petersson volume ``2^(1-g-n) V^Theta_{g,n}``."""
    return volume_polynomial(g, n).scale(Fraction(2) ** (1 - g - n))


def rescale_to_normalized(V: VolumePolynomial, g: int) -> VolumePolynomial:
    """Substitute ``L_i -> 2 pi L_i`` and divide by ``(2 pi^2)^(g-1)``.

    Powers of pi are tracked exactly; a correct ``V_{g,n}`` comes out pi-free.
    """
    out = {}
    for (p, e), c in V.terms.items():
        total = sum(e)
        key = (p + total - 2 * (g - 1), e)
        out[key] = out.get(key, Fraction(0)) + c * Fraction(2) ** (total - (g - 1))
    return VolumePolynomial(V.n, out)


def evaluate(p: VolumePolynomial, lengths: Sequence) -> list[tuple[int, Fraction]]:
    """Substitute exact lengths; return ``[(pi_power, value), ...]`` by pi power."""
    if len(lengths) != p.n:
        raise ValueError(f"expected {p.n} lengths, got {len(lengths)}")
    vals = [Fraction(x) for x in lengths]
    acc: dict[int, Fraction] = {}
    for (pp, e), c in p.terms.items():
        term = c
        for x, k in zip(vals, e):
            term *= x ** k
        acc[pp] = acc.get(pp, Fraction(0)) + term
    return sorted((pp, v) for pp, v in acc.items() if v)


def higher_volume(g: int, n: int, b) -> Fraction:
    """``V_{g,n}(kappa(b)) = <tau_0^n kappa(b)>_g``."""
    if not isinstance(b, MultiIndex):
        b = MultiIndex.from_counts(b) if isinstance(b, Mapping) else MultiIndex(b)
    _check_gn(g, n)
    return correlator(CorrelatorKey(g, b, (0,) * n))


def point_recursion_residual(g: int, n: int, b) -> Fraction:
    """``V_{g,n+1}(kappa(b))`` minus the expansion through ``V_{g,n}``.

    The subtracted side is ``(2g-2+n+size(b)) V_{g,n}(kappa(b))`` plus
    ``sum_{L+L'=b, size(L')>=2} binom(b,L) V_{g,n}(kappa(L) kappa_weight(L'))``.
    """
    b = b if isinstance(b, MultiIndex) else MultiIndex(b)
    lhs = higher_volume(g, n + 1, b)
    rhs = (2 * g - 2 + n + b.size) * higher_volume(g, n, b)
    for L, Lp in splits(b, 2):
        if Lp.size >= 2:
            rhs += mi_binomial(b, L) * higher_volume(g, n, L + MultiIndex.delta(Lp.weight))
    return lhs - rhs


def kappa_only_residual(g: int, b, variant: str = "with_binomial") -> Fraction:
    """``size(b) V_g(kappa(b))`` minus the kappa-only right-hand side.

    ``variant="as_stated"`` omits the binomial weight in the second sum,
    ``"with_binomial"`` includes ``binom(b, L)`` there.
    """
    if variant not in ("as_stated", "with_binomial"):
        raise ValueError(f"unknown variant {variant!r}")
    b = b if isinstance(b, MultiIndex) else MultiIndex(b)
    if g < 2 or not b:
        raise ValueError("needs g >= 2 and b != 0")
    lhs = b.size * higher_volume(g, 0, b)
    rhs = Fraction(0)
    for L, L1, L2 in splits(b, 3):
        if L.size < 1:
            continue
        sign = 1 if L.size % 2 else -1
        rhs += sign * mi_multinomial(b, (L, L1, L2)) * higher_volume(
            g, 0, L1 + MultiIndex.delta(L.weight + L2.weight))
    for L, Lp in splits(b, 2):
        if Lp.size >= 2:
            weight = mi_binomial(b, L) if variant == "with_binomial" else 1
            rhs -= weight * higher_volume(g, 0, L + MultiIndex.delta(Lp.weight))
    return lhs - rhs


# Short names used by the public operation list.
thm16_residual = point_recursion_residual
thm17_residual = kappa_only_residual
