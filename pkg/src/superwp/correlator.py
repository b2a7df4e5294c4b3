"""Intersection numbers <kappa(b) tau_d1 ... tau_dn>_g against the Theta class.

Every correlator is an exact :class:`~fractions.Fraction`.  It vanishes unless
``weight(b) + sum(d) == g - 1`` and ``g >= 1``.

Four independent evaluation routes are provided and kept apart on purpose,
each with its own memo table, so that agreement between them is a real check:

``kmz``
    Reduce kappa classes to extra psi insertions (``kmz_expand``), then run
    the DVV-type recursion on pure psi correlators (``pure_psi_dvv``).
``thm14``
    The alternating kappa-psi recursion: isolate the ``L = 0`` term of the
    left-hand sum and move the rest across.
``thm15``
    The direct kappa-psi recursion with the ``alpha`` coefficients.
``closed``
    Closed formulas for genus one, one-point and two-point numbers.

:func:`correlator` dispatches to a route and maintains a write-once table
shared by all routes; a value that disagrees with the table raises
:class:`StrategyDisagreement`.
"""
from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping

from .combinatorics import (
    MultiIndex,
    alpha_coefficient,
    double_factorial as df,
    mi_binomial,
    mi_multinomial,
    splits,
)

__all__ = [
    "CorrelatorKey",
    "Strategy",
    "STRATEGIES",
    "UndefinedCorrelator",
    "StrategyDisagreement",
    "StrategyNotApplicable",
    "correlator",
    "corr",
    "pure_psi_dvv",
    "kmz_expand",
    "recurse_thm14",
    "recurse_thm15",
    "closed_genus1",
    "closed_one_point",
    "closed_two_point",
    "n0_reduce",
    "identity_residual",
    "degree_valid_keys",
    "table_snapshot",
    "table_load",
    "clear_caches",
    "STATS",
]


class UndefinedCorrelator(ValueError):
    """Raised for inputs the theory leaves undefined (genus one, no insertions)."""


class StrategyDisagreement(RuntimeError):
    """Two evaluation routes produced different values for the same key."""


class StrategyNotApplicable(ValueError):
    """The requested route does not cover this key (only ``closed`` raises it)."""


class Strategy:
    KMZ = "kmz"
    ALTERNATING = "thm14"
    ALPHA = "thm15"
    CLOSED = "closed"
    AUTO = "auto"


STRATEGIES = (Strategy.KMZ, Strategy.ALTERNATING, Strategy.ALPHA, Strategy.CLOSED)


def _as_multiindex(kappa) -> MultiIndex:
    if isinstance(kappa, MultiIndex):
        return kappa
    if isinstance(kappa, Mapping):
        return MultiIndex.from_counts(kappa)
    return MultiIndex(kappa)


def _canon(psi: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(psi, reverse=True))


@dataclass(frozen=True)
class CorrelatorKey:
    """Canonical ``(genus, kappa, psi)``; psi is stored sorted descending."""

    genus: int
    kappa: MultiIndex = MultiIndex()
    psi: tuple[int, ...] = ()

    def __post_init__(self):
        if self.genus < 0 or any(d < 0 for d in self.psi):
            raise ValueError(f"negative genus or psi exponent in {self}")
        object.__setattr__(self, "kappa", _as_multiindex(self.kappa))
        object.__setattr__(self, "psi", _canon(self.psi))

    @property
    def n(self) -> int:
        return len(self.psi)

    @property
    def degree_valid(self) -> bool:
        return self.genus >= 1 and self.kappa.weight + sum(self.psi) == self.genus - 1

    def sort_key(self) -> tuple:
        return (self.genus, self.kappa.sort_key(), self.psi)


# ----------------------------------------------------------------------------
# small helpers shared by the recursions


def _drop(psi: tuple[int, ...], pos: int) -> tuple[int, ...]:
    return psi[:pos] + psi[pos + 1:]


def _sub_multisets(rest: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Yield ``(I, J, multiplicity)`` over labelled splittings ``I + J = rest``.

    Identical entries are grouped; ``multiplicity`` counts the labelled
    subsets that collapse to the same pair of multisets.
    """
    counts = Counter(rest)
    values = sorted(counts, reverse=True)
    for choice in product(*(range(counts[v] + 1) for v in values)):
        mult = 1
        left: list[int] = []
        right: list[int] = []
        for v, c in zip(values, choice):
            mult *= math.comb(counts[v], c)
            left += [v] * c
            right += [v] * (counts[v] - c)
        yield tuple(left), tuple(right), mult


def _distinct_positions(psi: tuple[int, ...]) -> Iterator[tuple[int, int]]:
    """``(position, multiplicity)`` for the first occurrence of each value."""
    counts = Counter(psi)
    seen = set()
    for pos, v in enumerate(psi):
        if v not in seen:
            seen.add(v)
            yield pos, counts[v]


# ----------------------------------------------------------------------------
# closed formulas


def closed_genus1(n: int) -> Fraction:
    """``<tau_0^n>_1 = (n-1)!/8``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(math.factorial(n - 1), 8)


def closed_one_point(g: int) -> Fraction:
    """``<tau_{g-1}>_g = (2g-1)!!^2 / (8^g g! (2g-1))``."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return Fraction(df(2 * g - 1) ** 2, 8 ** g * math.factorial(g) * (2 * g - 1))


def closed_two_point(g: int, k: int) -> Fraction:
    """``<tau_k tau_{g-1-k}>_g`` for ``0 <= 2k <= g-1``."""
    if k < 0 or 2 * k > g - 1:
        raise ValueError(f"two-point formula needs 0 <= 2k <= g-1, got g={g}, k={k}")
    prefactor = Fraction(df(2 * g - 1) ** 2, 8 ** g * math.factorial(g))
    prefactor *= Fraction(df(2 * g - 1), df(2 * k + 1) * df(2 * g - 1 - 2 * k))
    total = sum(Fraction((g - 2 * i) * math.comb(g, i) ** 4, g * math.comb(2 * g, 2 * i) ** 3)
                for i in range(k + 1))
    return prefactor * total


# ----------------------------------------------------------------------------
# pure psi: DVV-type recursion


_TAU0_GENUS1 = Fraction(1, 8)


@lru_cache(maxsize=None)
def _dvv(g: int, psi: tuple[int, ...]) -> Fraction:
    if g < 1 or sum(psi) != g - 1:
        return Fraction(0)
    if not psi:
        raise UndefinedCorrelator("<>_1 is not defined")
    if psi == (0,):
        return _TAU0_GENUS1
    # psi is sorted descending: peel the largest exponent
    k, rest = psi[0], psi[1:]
    total = Fraction(0)
    for pos, mult in _distinct_positions(rest):
        d = rest[pos]
        total += mult * Fraction(df(2 * k + 2 * d + 1), df(2 * d - 1)) * _dvv(
            g, _canon(_drop(rest, pos) + (k + d,)))
    half = Fraction(0)
    for r in range(k):
        s = k - 1 - r
        w = df(2 * r + 1) * df(2 * s + 1)
        half += w * _dvv(g - 1, _canon(rest + (r, s)))
        for I, J, mult in _sub_multisets(rest):
            g1 = r + sum(I) + 1
            g2 = s + sum(J) + 1
            if g1 + g2 != g:
                continue
            half += w * mult * _dvv(g1, _canon(I + (r,))) * _dvv(g2, _canon(J + (s,)))
    total += half / 2
    return total / df(2 * k + 1)


def pure_psi_dvv(g: int, d: Iterable[int]) -> Fraction:
    """``<tau_d1 ... tau_dn>_g`` by the DVV-type recursion (largest exponent first)."""
    return _dvv(g, _canon(d))


# ----------------------------------------------------------------------------
# kappa -> psi reduction


@lru_cache(maxsize=None)
def _kmz_terms(b: MultiIndex) -> tuple[tuple[Fraction, tuple[int, ...]], ...]:
    acc: dict[tuple[int, ...], Fraction] = {}
    top = b.size
    for k in range(1, top + 1):
        sign = -1 if (top - k) % 2 else 1
        for parts in splits(b, k, nonzero=True):
            ins = _canon(p.weight for p in parts)
            acc[ins] = acc.get(ins, Fraction(0)) + Fraction(
                sign * mi_multinomial(b, parts), math.factorial(k))
    return tuple((c, ins) for ins, c in sorted(acc.items()) if c)


def kmz_expand(b) -> list[tuple[Fraction, list[int]]]:
    """Expand ``kappa(b)`` as a signed sum of extra psi insertions.

    Returns ``[(coefficient, insertions), ...]`` so that
    ``<kappa(b) prod tau_d>_g = sum c * <prod tau_d prod tau_ins>_g``.

    >>> kmz_expand({1: 2})
    [(Fraction(1, 1), [1, 1]), (Fraction(-1, 1), [2])]
    """
    b = _as_multiindex(b)
    if not b:
        raise ValueError("kmz_expand needs a nonzero multi-index")
    return [(c, list(ins)) for c, ins in _kmz_terms(b)]


@lru_cache(maxsize=None)
def _kmz(g: int, b: MultiIndex, psi: tuple[int, ...]) -> Fraction:
    if g < 1 or b.weight + sum(psi) != g - 1:
        return Fraction(0)
    if not b:
        return _dvv(g, psi)
    return sum((c * _dvv(g, _canon(psi + ins)) for c, ins in _kmz_terms(b)), Fraction(0))


# ----------------------------------------------------------------------------
# n = 0 reduction


def _n0(g: int, b: MultiIndex, f: Callable[[int, MultiIndex, tuple[int, ...]], Fraction]) -> Fraction:
    if g <= 1:
        raise UndefinedCorrelator(f"<kappa{tuple(b)}>_{g} with no insertions is not defined")
    total = Fraction(0)
    for L, Lp in splits(b, 2):
        sign = -1 if L.size % 2 else 1
        total += sign * mi_binomial(b, L) * f(g, Lp, (L.weight,))
    return total / (2 * g - 2)


def n0_reduce(g: int, b, strategy: str = Strategy.KMZ) -> Fraction:
    """``<kappa(b)>_g`` from one-point correlators; needs ``g >= 2``."""
    b = _as_multiindex(b)
    if g <= 1:
        raise UndefinedCorrelator("n = 0 reduction divides by 2g - 2")
    if b.weight != g - 1:
        return Fraction(0)
    return _n0(g, b, _ROUTES[strategy])


# ----------------------------------------------------------------------------
# the alternating kappa-psi recursion


@lru_cache(maxsize=None)
def _alternating(g: int, b: MultiIndex, psi: tuple[int, ...]) -> Fraction:
    if g < 1 or b.weight + sum(psi) != g - 1:
        return Fraction(0)
    if not psi:
        return _n0(g, b, _alternating)
    return _alternating_peel(g, b, psi, 0)


def _alternating_peel(g: int, b: MultiIndex, psi: tuple[int, ...], pos: int) -> Fraction:
    if g == 1 and psi == (0,):
        return _TAU0_GENUS1
    d1 = psi[pos]
    rest = _drop(psi, pos)
    rhs = Fraction(0)
    for j, mult in _distinct_positions(rest):
        dj = rest[j]
        rhs += mult * Fraction(df(2 * d1 + 2 * dj + 1), df(2 * dj - 1)) * _alternating(
            g, b, _canon(_drop(rest, j) + (d1 + dj,)))
    half = Fraction(0)
    for r in range(d1):
        s = d1 - 1 - r
        w = df(2 * r + 1) * df(2 * s + 1)
        half += w * _alternating(g - 1, b, _canon(rest + (r, s)))
        for e, f in splits(b, 2):
            be = mi_binomial(b, e)
            for I, J, mult in _sub_multisets(rest):
                g1 = e.weight + r + sum(I) + 1
                g2 = f.weight + s + sum(J) + 1
                if g1 + g2 != g:
                    continue
                half += w * be * mult * _alternating(g1, e, _canon(I + (r,))) * _alternating(
                    g2, f, _canon(J + (s,)))
    rhs += half / 2
    moved = Fraction(0)
    for L, Lp in splits(b, 2):
        if not L:
            continue
        sign = -1 if L.size % 2 else 1
        moved += sign * mi_binomial(b, L) * Fraction(
            df(2 * d1 + 2 * L.weight + 1), df(2 * L.weight - 1)) * _alternating(
            g, Lp, _canon(rest + (d1 + L.weight,)))
    return (rhs - moved) / df(2 * d1 + 1)


def recurse_thm14(key: "CorrelatorKey", peel: int = 0) -> Fraction:
    """Evaluate through the alternating recursion, peeling ``key.psi[peel]``.

    Keys without psi insertions go through :func:`n0_reduce` first.
    """
    g, b, psi = key.genus, key.kappa, key.psi
    if g < 1 or b.weight + sum(psi) != g - 1:
        return Fraction(0)
    if not psi:
        return _n0(g, b, _alternating)
    if not 0 <= peel < len(psi):
        raise ValueError(f"peel position {peel} out of range for {len(psi)} insertions")
    return _alternating_peel(g, b, psi, peel)


# ----------------------------------------------------------------------------
# the direct kappa-psi recursion with alpha coefficients


@lru_cache(maxsize=None)
def _alpha(g: int, b: MultiIndex, psi: tuple[int, ...]) -> Fraction:
    if g < 1 or b.weight + sum(psi) != g - 1:
        return Fraction(0)
    if not psi:
        return _n0(g, b, _alpha)
    return _alpha_peel(g, b, psi, 0)


def _alpha_peel(g: int, b: MultiIndex, psi: tuple[int, ...], pos: int) -> Fraction:
    if g == 1 and psi == (0,):
        return _TAU0_GENUS1
    d1 = psi[pos]
    rest = _drop(psi, pos)
    total = Fraction(0)
    for L, Lp in splits(b, 2):
        coef = alpha_coefficient(L) * mi_binomial(b, L)
        lw = L.weight
        for j, mult in _distinct_positions(rest):
            dj = rest[j]
            total += mult * coef * Fraction(df(2 * lw + 2 * d1 + 2 * dj + 1), df(2 * dj - 1)) * _alpha(
                g, Lp, _canon(_drop(rest, j) + (lw + d1 + dj,)))
    half = Fraction(0)
    for L, e, f in splits(b, 3):
        lw = L.weight
        coef = alpha_coefficient(L) * mi_multinomial(b, (L, e, f))
        for r in range(lw + d1):
            s = lw + d1 - 1 - r
            w = coef * df(2 * r + 1) * df(2 * s + 1)
            for I, J, mult in _sub_multisets(rest):
                g1 = e.weight + r + sum(I) + 1
                g2 = f.weight + s + sum(J) + 1
                if g1 + g2 != g:
                    continue
                half += w * mult * _alpha(g1, e, _canon(I + (r,))) * _alpha(g2, f, _canon(J + (s,)))
    for L, Lp in splits(b, 2):
        lw = L.weight
        coef = alpha_coefficient(L) * mi_binomial(b, L)
        for r in range(lw + d1):
            s = lw + d1 - 1 - r
            half += coef * df(2 * r + 1) * df(2 * s + 1) * _alpha(g - 1, Lp, _canon(rest + (r, s)))
    total += half / 2
    return total / df(2 * d1 + 1)


def recurse_thm15(key: "CorrelatorKey", peel: int = 0) -> Fraction:
    """Evaluate through the alpha-coefficient recursion, peeling ``key.psi[peel]``."""
    g, b, psi = key.genus, key.kappa, key.psi
    if g < 1 or b.weight + sum(psi) != g - 1:
        return Fraction(0)
    if not psi:
        return _n0(g, b, _alpha)
    if not 0 <= peel < len(psi):
        raise ValueError(f"peel position {peel} out of range for {len(psi)} insertions")
    return _alpha_peel(g, b, psi, peel)


# ----------------------------------------------------------------------------
# closed-formula route


def _closed(g: int, b: MultiIndex, psi: tuple[int, ...]) -> Fraction:
    if g < 1 or b.weight + sum(psi) != g - 1:
        return Fraction(0)
    if not b:
        if g == 1 and psi:
            return closed_genus1(len(psi))
        if len(psi) == 1:
            return closed_one_point(g)
        if len(psi) == 2:
            return closed_two_point(g, psi[1])
    raise StrategyNotApplicable(f"no closed formula for g={g}, kappa={tuple(b)}, psi={psi}")


_ROUTES: dict[str, Callable[[int, MultiIndex, tuple[int, ...]], Fraction]] = {
    Strategy.KMZ: _kmz,
    Strategy.ALTERNATING: _alternating,
    Strategy.ALPHA: _alpha,
    Strategy.CLOSED: _closed,
}


# ----------------------------------------------------------------------------
# dispatcher with a shared write-once table

_TABLE: dict[CorrelatorKey, Fraction] = {}
_TABLE_LOCK = threading.Lock()
STATS: Counter = Counter()


def _publish(key: CorrelatorKey, value: Fraction, source: str) -> Fraction:
    with _TABLE_LOCK:
        old = _TABLE.setdefault(key, value)
    if old != value:
        raise StrategyDisagreement(
            f"{source} gives {value} for {key} but the table holds {old}")
    return old


def correlator(key: CorrelatorKey, strategy: str = Strategy.AUTO) -> Fraction:
    """Exact value of ``<kappa(b) prod tau_d>_g`` for ``key``.

    ``strategy="auto"`` returns a table hit when available and otherwise
    evaluates with ``kmz``.  Any explicit strategy is always evaluated and
    compared against the table.

    >>> correlator(CorrelatorKey(2, MultiIndex.delta(1)))
    Fraction(3, 128)
    """
    g, b, psi = key.genus, key.kappa, key.psi
    if g == 1 and not psi:
        raise UndefinedCorrelator("genus one correlators need at least one insertion")
    if not key.degree_valid:
        return Fraction(0)
    if strategy == Strategy.AUTO:
        hit = _TABLE.get(key)
        if hit is not None:
            STATS["hits"] += 1
            return hit
        strategy = Strategy.KMZ
    try:
        route = _ROUTES[strategy]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}") from None
    STATS["evaluations"] += 1
    return _publish(key, route(g, b, psi), strategy)


def corr(g: int, kappa=(), psi=(), strategy: str = Strategy.AUTO) -> Fraction:
    """Shorthand for ``correlator(CorrelatorKey(g, kappa, psi), strategy)``."""
    return correlator(CorrelatorKey(g, _as_multiindex(kappa), tuple(psi)), strategy)


def table_snapshot() -> dict[CorrelatorKey, Fraction]:
    with _TABLE_LOCK:
        return dict(_TABLE)


def table_load(records: Mapping[CorrelatorKey, Fraction]) -> int:
    """Merge ``records`` into the shared table; conflicting values raise."""
    added = 0
    for key, value in records.items():
        with _TABLE_LOCK:
            old = _TABLE.get(key)
            if old is None:
                _TABLE[key] = value
                added += 1
        if old is not None and old != value:
            raise StrategyDisagreement(f"cache holds {value} for {key}, table has {old}")
    return added


def clear_caches() -> None:
    """Forget the shared table and every per-route memo (used by tests)."""
    with _TABLE_LOCK:
        _TABLE.clear()
    STATS.clear()
    for fn in (_dvv, _kmz, _alternating, _alpha, _kmz_terms):
        fn.cache_clear()


# ----------------------------------------------------------------------------
# key enumeration


def _partitions_bounded(total: int, parts: int, max_part: int) -> Iterator[tuple[int, ...]]:
    # nonincreasing tuples of exactly `parts` entries in [0, max_part] summing to total
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, max_part), -1, -1):
        if first * parts < total:
            break
        for rest in _partitions_bounded(total - first, parts - 1, first):
            yield (first,) + rest


def degree_valid_keys(max_genus: int, max_points: int, max_kappa_size: int,
                      min_genus: int = 1, min_points: int = 0) -> list[CorrelatorKey]:
    """All degree-valid keys in the box, sorted by ``(g, kappa, psi)``.

    The undefined genus-one keys without insertions are left out.
    """
    from .combinatorics import multi_indices_up_to_weight

    keys = []
    for g in range(max(min_genus, 1), max_genus + 1):
        for b in multi_indices_up_to_weight(g - 1):
            if b.size > max_kappa_size:
                continue
            for n in range(min_points, max_points + 1):
                if n == 0 and g == 1:
                    continue
                for psi in _partitions_bounded(g - 1 - b.weight, n, g - 1):
                    keys.append(CorrelatorKey(g, b, psi))
    return sorted(keys, key=CorrelatorKey.sort_key)


# ----------------------------------------------------------------------------
# identity residuals


def _c(g, b, psi, strategy):
    return correlator(CorrelatorKey(g, b, tuple(psi)), strategy)


def _split_sum(g: int, b: MultiIndex, rest: tuple[int, ...], extra: tuple[int, ...],
               strategy: str) -> Fraction:
    # sum over g1+g2=g, e+f=b (weighted by binom(b,e)), labelled I+J=rest of
    # <extra tau_I kappa(e)>_g1 <extra tau_J kappa(f)>_g2
    total = Fraction(0)
    for e, f in splits(b, 2):
        be = mi_binomial(b, e)
        for I, J, mult in _sub_multisets(rest):
            for g1 in range(1, g):
                total += be * mult * _c(g1, e, I + extra, strategy) * _c(g - g1, f, J + extra, strategy)
    return total


def identity_residual(kind: str, key: CorrelatorKey, strategy: str = Strategy.AUTO) -> Fraction:
    """LHS minus RHS of a named identity around ``key``; always 0 if it holds.

    ``key`` describes the common insertions ``kappa(b) prod tau_d``:

    ``dilaton``        <tau_0 prod tau_d>_g - (2g-2+n) <prod tau_d>_g        (b = 0)
    ``kdv``            <tau_0 tau_1 prod tau_d>_g against the quadratic KdV terms (b = 0)
    ``kdv_kappa``      the same with kappa(b) distributed binomially
    ``dilaton_kappa``  sum_L (-1)^|L| binom(b,L) <tau_|L| prod tau_d kappa(L')>_g
                       - (2g-2+n) <prod tau_d kappa(b)>_g
    """
    g, b, psi = key.genus, key.kappa, key.psi
    n = len(psi)
    if kind in ("dilaton", "kdv") and b:
        raise ValueError(f"{kind} identity is stated for pure psi keys")
    if kind in ("dilaton", "dilaton_kappa"):
        if kind == "dilaton":
            lhs = _c(g, b, psi + (0,), strategy)
        else:
            lhs = Fraction(0)
            for L, Lp in splits(b, 2):
                sign = -1 if L.size % 2 else 1
                lhs += sign * mi_binomial(b, L) * _c(g, Lp, psi + (L.weight,), strategy)
        return lhs - (2 * g - 2 + n) * _c(g, b, psi, strategy)
    if kind in ("kdv", "kdv_kappa"):
        lhs = _c(g, b, psi + (0, 1), strategy)
        rhs = _split_sum(g, b, psi, (0, 0), strategy) / 2
        if g >= 2:
            rhs += _c(g - 1, b, psi + (0, 0, 0, 0), strategy) / 12
        return lhs - rhs
    raise ValueError(f"unknown identity {kind!r}")
