"""Multi-indices, factorial-type functions and the coefficient systems.

A multi-index ``m = (m(1), m(2), ...)`` is a finitely supported sequence of
nonnegative integers.  It indexes kappa monomials ``kappa(m) = prod kappa_i^m(i)``
and the formal variables ``s^m = prod s_i^m(i)``.  Two gradings are used
everywhere:

* ``weight(m) = sum_i i*m(i)``  (the cohomological degree of ``kappa(m)``)
* ``size(m)   = sum_i m(i)``    (the number of kappa factors)

The coefficient systems are

* ``a_n``     -- secant numbers, ``1/cos x = sum a_n x^(2n)/(2n)!``
* ``beta_n``  -- ``1/cos(sqrt(2) x) = sum beta_n x^(2n)``
* ``alpha_b`` -- defined by the recursion used in the kappa-psi recursion
* ``gamma_L`` -- ``(-1)^size(L) / (L! (2 weight(L) - 1)!!)``, the convolution
  inverse of ``beta_L = alpha_L / L!``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "MultiIndex",
    "weight",
    "size",
    "mi_binomial",
    "mi_multinomial",
    "splits",
    "double_factorial",
    "secant_numbers",
    "beta_coefficients",
    "beta_coefficients_by_inversion",
    "alpha_coefficient",
    "beta_multi",
    "gamma_coefficient",
    "multi_indices_of_weight",
    "multi_indices_up_to_weight",
    "p_polynomial",
]


class MultiIndex(tuple):
    """Finitely supported sequence ``(m(1), m(2), ...)`` in canonical form.

    Stored as a tuple of counts for indices ``1..K`` with trailing zeros
    stripped, so equality and hashing are structural.

    >>> b = MultiIndex.from_counts({1: 2, 3: 1})
    >>> b, b.weight, b.size
    (MultiIndex(2, 0, 1), 5, 3)
    >>> b[1], b[3], b[7]
    (2, 1, 0)
    """

    __slots__ = ()

    def __new__(cls, counts: Iterable[int] = ()):
        counts = list(counts)
        if any((not isinstance(c, int)) or c < 0 for c in counts):
            raise ValueError(f"multi-index counts must be nonnegative ints: {counts}")
        while counts and counts[-1] == 0:
            counts.pop()
        return super().__new__(cls, counts)

    @classmethod
    def from_counts(cls, mapping: Mapping[int, int]) -> "MultiIndex":
        if not mapping:
            return cls()
        if min(mapping) < 1:
            raise ValueError("multi-index positions start at 1")
        top = max(mapping)
        return cls(mapping.get(i, 0) for i in range(1, top + 1))

    @classmethod
    def delta(cls, a: int, count: int = 1) -> "MultiIndex":
        """``count`` times the unit sequence with a 1 in position ``a``."""
        if a < 1:
            raise ValueError("delta index must be >= 1")
        return cls([0] * (a - 1) + [count])

    def __getitem__(self, i):
        # 1-based positional access; absent positions are 0
        if isinstance(i, slice):
            raise TypeError("MultiIndex does not support slicing")
        if i < 1:
            raise IndexError("multi-index positions start at 1")
        return tuple.__getitem__(self, i - 1) if i <= len(self) else 0

    def __iter__(self):
        return tuple.__iter__(self)

    def items(self) -> Iterator[tuple[int, int]]:
        """Nonzero ``(position, count)`` pairs in increasing position."""
        for i, c in enumerate(tuple.__iter__(self), start=1):
            if c:
                yield i, c

    @property
    def weight(self) -> int:
        return sum(i * c for i, c in self.items())

    @property
    def size(self) -> int:
        return sum(tuple.__iter__(self))

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(c) for c in tuple.__iter__(self))

    def __add__(self, other):
        if not isinstance(other, MultiIndex):
            return NotImplemented
        n = max(len(self), len(other))
        return MultiIndex(self[i] + other[i] for i in range(1, n + 1))

    def __sub__(self, other):
        if not isinstance(other, MultiIndex):
            return NotImplemented
        n = max(len(self), len(other))
        return MultiIndex(self[i] - other[i] for i in range(1, n + 1))

    def __bool__(self):
        return len(self) > 0

    def within(self, other: "MultiIndex") -> bool:
        """Componentwise ``self <= other``."""
        return all(c <= other[i] for i, c in self.items())

    def sort_key(self) -> tuple:
        """Total order used for deterministic output (by nonzero pairs)."""
        return tuple(self.items())

    def __repr__(self):
        return f"MultiIndex({', '.join(map(str, tuple.__iter__(self)))})"


ZERO = MultiIndex()


def weight(m: MultiIndex) -> int:
    return m.weight


def size(m: MultiIndex) -> int:
    return m.size


def mi_binomial(b: MultiIndex, t: MultiIndex) -> int:
    """Componentwise product of binomials, 0 unless ``t <= b``."""
    return math.prod(math.comb(b[i], c) for i, c in t.items()) if t.within(b) else 0


def mi_multinomial(b: MultiIndex, parts: Sequence[MultiIndex]) -> int:
    """``prod_i multinomial(b(i); a_1(i), ..., a_k(i))``; 0 if parts do not sum to b."""
    total = ZERO
    for p in parts:
        total = total + p
    if total != b:
        return 0
    result = 1
    for i, c in b.items():
        result *= math.factorial(c)
        for p in parts:
            result //= math.factorial(p[i])
    return result


def _sub_indices(b: MultiIndex) -> Iterator[MultiIndex]:
    # lexicographic in (t(1), t(2), ...)
    for counts in product(*(range(c + 1) for c in b)):
        yield MultiIndex(counts)


def splits(b: MultiIndex, k: int, nonzero: bool = False) -> list[tuple[MultiIndex, ...]]:
    """All ordered ``k``-tuples of multi-indices summing to ``b``.

    With ``nonzero=True`` every part must be nonzero.  The order is
    lexicographic in the first part, then the second, and so on.

    >>> splits(MultiIndex.delta(1), 2)
    [(MultiIndex(), MultiIndex(1)), (MultiIndex(1), MultiIndex())]
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return list(_splits(b, k, nonzero))


def _splits(b, k, nonzero):
    if k == 1:
        if not (nonzero and not b):
            yield (b,)
        return
    for first in _sub_indices(b):
        if nonzero and not first:
            continue
        for rest in _splits(b - first, k - 1, nonzero):
            yield (first,) + rest


def double_factorial(n: int) -> int:
    """``n!!`` with ``(-1)!! = 0!! = 1``."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    return _dfact(n)


@lru_cache(maxsize=None)
def _dfact(n):
    return 1 if n <= 0 else n * _dfact(n - 2)


def secant_numbers(N: int) -> list[Fraction]:
    """``a_0 .. a_N`` with ``1/cos x = sum a_n x^(2n)/(2n)!``.

    Inverts the cosine series: ``sum_k (-1)^k binom(2n, 2k) a_(n-k) = 0``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    a = [Fraction(1)]
    for n in range(1, N + 1):
        a.append(-sum((-1) ** k * math.comb(2 * n, 2 * k) * a[n - k]
                      for k in range(1, n + 1)))
    return a


def beta_coefficients(N: int) -> list[Fraction]:
    """``beta_0 .. beta_N`` from the secant numbers: ``2^b a_b / (2b)!``."""
    a = secant_numbers(N)
    return [Fraction(2 ** b) * a[b] / math.factorial(2 * b) for b in range(N + 1)]


def beta_coefficients_by_inversion(N: int) -> list[Fraction]:
    """Same values by long division of ``1`` by ``cos(sqrt(2) x)`` in ``x^2``."""
    cos = [Fraction((-2) ** k, math.factorial(2 * k)) for k in range(N + 1)]
    inv = [Fraction(1)]
    for n in range(1, N + 1):
        inv.append(-sum(cos[k] * inv[n - k] for k in range(1, n + 1)))
    return inv


@lru_cache(maxsize=None)
def alpha_coefficient(b: MultiIndex) -> Fraction:
    """``alpha_b`` from the recursion with ``alpha_0 = 1``.

    ``alpha_b = b! sum_{L+L'=b, L' != 0} (-1)^(|L'|_size - 1) alpha_L
    / (L! L'! (2 weight(L') - 1)!!)``.
    """
    if not b:
        return Fraction(1)
    total = Fraction(0)
    for L, Lp in splits(b, 2):
        if not Lp:
            continue
        sign = -1 if Lp.size % 2 == 0 else 1
        total += sign * alpha_coefficient(L) / (
            L.factorial * Lp.factorial * double_factorial(2 * Lp.weight - 1))
    return b.factorial * total


def beta_multi(L: MultiIndex) -> Fraction:
    """``beta_L = alpha_L / L!``, the multi-index generalisation of beta_n."""
    return alpha_coefficient(L) / L.factorial


def gamma_coefficient(L: MultiIndex) -> Fraction:
    sign = -1 if L.size % 2 else 1
    return Fraction(sign, L.factorial * double_factorial(2 * L.weight - 1))


@lru_cache(maxsize=None)
def _partitions_weight(w: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if w == 0:
        return ((),)
    out = []
    for p in range(min(w, max_part), 0, -1):
        for rest in _partitions_weight(w - p, p):
            out.append((p,) + rest)
    return tuple(out)


def multi_indices_of_weight(w: int) -> list[MultiIndex]:
    """All ``L`` with ``weight(L) == w`` (partitions of w), sorted canonically."""
    out = []
    for parts in _partitions_weight(w, w):
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        out.append(MultiIndex.from_counts(counts))
    return sorted(out, key=MultiIndex.sort_key)


def multi_indices_up_to_weight(w: int) -> list[MultiIndex]:
    return [L for k in range(w + 1) for L in multi_indices_of_weight(k)]


def p_polynomial(k: int, mode: str = "weighted",
                 max_weight: int | None = None) -> dict[MultiIndex, Fraction]:
    """Coefficients ``(-1)^(size(L)-1)/L!`` of ``s^L`` in the shift ``p_k(s)``.

    ``mode="weighted"`` sums over ``weight(L) == k``; ``mode="counted"`` over
    ``size(L) == k``, which is an infinite family and therefore needs
    ``max_weight`` to bound ``weight(L)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode == "weighted":
        family = multi_indices_of_weight(k)
        if max_weight is not None:
            family = [L for L in family if L.weight <= max_weight]
    elif mode == "counted":
        if max_weight is None:
            raise ValueError("counted mode needs max_weight")
        family = [L for L in multi_indices_up_to_weight(max_weight) if L.size == k]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {L: Fraction((-1) ** (L.size - 1), L.factorial) for L in family}
