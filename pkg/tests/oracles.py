"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package; the point is to get the same numbers by
a different route.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations


def dfact(n: int) -> int:
    return 1 if n <= 0 else n * dfact(n - 2)


def _labelled_splits(items):
    idx = range(len(items))
    for r in range(len(items) + 1):
        for I in combinations(idx, r):
            yield [items[i] for i in I], [items[i] for i in idx if i not in I]


_pure_memo: dict = {}


def pure(g: int, ds) -> Fraction:
    """``<prod tau_d>_g`` by the peel-the-first-point recursion, no shortcuts."""
    ds = tuple(sorted(ds, reverse=True))
    if g < 1 or any(d < 0 for d in ds) or sum(ds) != g - 1 or not ds:
        return Fraction(0)
    key = (g, ds)
    if key in _pure_memo:
        return _pure_memo[key]
    if key == (1, (0,)):
        return Fraction(1, 8)
    d1, rest = ds[0], list(ds[1:])
    total = Fraction(0)
    for j, dj in enumerate(rest):
        others = rest[:j] + rest[j + 1:]
        total += Fraction(dfact(2 * d1 + 2 * dj + 1), dfact(2 * dj - 1)) * pure(g, [d1 + dj] + others)
    for i in range(d1):
        j = d1 - 1 - i
        w = Fraction(dfact(2 * i + 1) * dfact(2 * j + 1), 2)
        total += w * pure(g - 1, [i, j] + rest)
        for I, J in _labelled_splits(rest):
            for g1 in range(1, g):
                total += w * pure(g1, [i] + I) * pure(g - g1, [j] + J)
    value = total / dfact(2 * d1 + 1)
    _pure_memo[key] = value
    return value


def _cycle_sums(perm, a):
    seen, sums = set(), []
    for start in range(len(perm)):
        if start in seen:
            continue
        s, x = 0, start
        while x not in seen:
            seen.add(x)
            s += a[x]
            x = perm[x]
        sums.append(s)
    return sums


def kappa(g: int, kappas, ds) -> Fraction:
    """``<prod_i kappa_{a_i} prod tau_d>_g`` with ``kappas`` a list of indices ``a_i >= 1``.

    Inverts the pushforward formula: forgetting points carrying ``tau_{a_i}``
    gives the sum over permutations of products of ``kappa`` of cycle sums.
    """
    a = list(kappas)
    if not a:
        return pure(g, ds)
    total = pure(g, list(ds) + a)
    ident = tuple(range(len(a)))
    for perm in permutations(range(len(a))):
        if perm != ident:
            total -= kappa(g, _cycle_sums(perm, a), ds)
    return total


def normalized_volume(g: int, n: int) -> dict:
    """``v_{g,n}`` as ``{(d_1..d_n): coefficient of prod L_i^(2 d_i)}``."""
    out = {}

    def comps(total, parts):
        if parts == 0:
            if total == 0:
                yield ()
            return
        for first in range(total + 1):
            for rest in comps(total - first, parts - 1):
                yield (first,) + rest

    for dsum in range(g):
        k = g - 1 - dsum
        for d in comps(dsum, n):
            c = kappa(g, [1] * k, d) / math.factorial(k)
            for x in d:
                c /= math.factorial(x)
            if c:
                out[d] = c
    return out


def secant(n: int) -> list[Fraction]:
    """Taylor coefficients of sec(x) at even orders times (2k)!, via sec*cos = 1."""
    e = [Fraction(1)]
    for k in range(1, n + 1):
        e.append(sum(math.comb(2 * k, 2 * j) * e[j] * (-1) ** (k - j + 1)
                     for j in range(k)))
    return e
