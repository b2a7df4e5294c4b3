"""Truncated formal series in hbar, t_0, t_1, ... and s_1, s_2, ...

A monomial is a triple ``(a, t, s)``: the hbar exponent ``a``, the
t-exponents as a count tuple ``(e_0, e_1, ...)`` with trailing zeros
stripped, and the s-exponents as a :class:`MultiIndex`.

Truncation keeps monomials with ``a <= max_genus - 1``, t-count
``sum(e) <= max_points``, every t-index ``<= max_t_index`` and
``weight(s) <= max_s_weight``.  All four gradings add under multiplication
and are nonnegative, so products, ``exp`` and ``log`` computed inside the
cutoff are exact there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional

from ..combinatorics import MultiIndex, multi_indices_up_to_weight
from ..correlator import CorrelatorKey, correlator, degree_valid_keys
from ..render import format_rational

__all__ = [
    "Monomial",
    "SeriesCutoff",
    "TruncatedSeries",
    "build_free_energy",
    "exponentiate",
    "logarithm",
    "t_counts",
    "t_indices",
    "monomial",
    "render_monomial",
    "mono_weight",
]

Monomial = tuple  # (int, tuple[int, ...], MultiIndex)


def t_counts(indices: Iterable[int]) -> tuple[int, ...]:
    """Count tuple for a multiset of t-indices, e.g. ``[0, 0, 2] -> (2, 0, 1)``."""
    indices = list(indices)
    if not indices:
        return ()
    counts = [0] * (max(indices) + 1)
    for i in indices:
        counts[i] += 1
    return tuple(counts)


def t_indices(counts: tuple[int, ...]) -> list[int]:
    return [i for i, c in enumerate(counts) for _ in range(c)]


def _trim(counts) -> tuple[int, ...]:
    counts = list(counts)
    while counts and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


def _add_counts(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    if len(x) < len(y):
        x, y = y, x
    return tuple(c + (y[i] if i < len(y) else 0) for i, c in enumerate(x))


def _sub_counts(x: tuple[int, ...], y: tuple[int, ...]) -> Optional[tuple[int, ...]]:
    # None when y does not divide x
    n = max(len(x), len(y))
    out = []
    for i in range(n):
        c = (x[i] if i < len(x) else 0) - (y[i] if i < len(y) else 0)
        if c < 0:
            return None
        out.append(c)
    return _trim(out)


def monomial(a: int = 0, t: Iterable[int] = (), s=MultiIndex()) -> Monomial:
    """Build a monomial from an hbar power, a list of t-indices and an s multi-index."""
    return (a, t_counts(t), s if isinstance(s, MultiIndex) else MultiIndex(s))


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return (m1[0] + m2[0], _add_counts(m1[1], m2[1]), m1[2] + m2[2])


def mono_div(m: Monomial, d: Monomial) -> Optional[Monomial]:
    """``m / d`` or None if ``d`` does not divide ``m``."""
    if d[0] > m[0] or not d[2].within(m[2]):
        return None
    t = _sub_counts(m[1], d[1])
    if t is None:
        return None
    return (m[0] - d[0], t, m[2] - d[2])


def render_monomial(m: Monomial) -> str:
    a, t, s = m
    idx = ",".join(str(i) for i in t_indices(t))
    sp = ",".join(f"({j},{c})" for j, c in s.items())
    return f"hbar^{a} t[{idx}] s[{sp}]"


def monomial_sort_key(m: Monomial) -> tuple:
    return (m[0], tuple(t_indices(m[1])), tuple(m[2].items()))


def mono_weight(m: Monomial) -> int:
    """``sum_i i*e_i + weight(s)``; on the free energy this equals the hbar power."""
    return sum(i * c for i, c in enumerate(m[1])) + m[2].weight


@dataclass(frozen=True)
class SeriesCutoff:
    """The finite monomial universe.

    ``max_t_index`` and ``max_weight`` default to ``max_genus - 1``, which is
    what the free energy needs: there the hbar power equals the weight.
    """

    max_genus: int
    max_points: int
    max_s_weight: int = 0
    max_t_index: Optional[int] = None
    max_weight: Optional[int] = None

    def __post_init__(self):
        for name in ("max_t_index", "max_weight"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, max(self.max_genus - 1, 0))
        for name in ("max_genus", "max_points", "max_s_weight", "max_t_index", "max_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def max_hbar(self) -> int:
        return self.max_genus - 1

    def contains(self, m: Monomial) -> bool:
        a, t, s = m
        return (0 <= a <= self.max_hbar and sum(t) <= self.max_points
                and len(t) <= self.max_t_index + 1 and s.weight <= self.max_s_weight
                and mono_weight(m) <= self.max_weight)

    def replace(self, **changes) -> "SeriesCutoff":
        fields = dict(max_genus=self.max_genus, max_points=self.max_points,
                      max_s_weight=self.max_s_weight, max_t_index=self.max_t_index,
                      max_weight=self.max_weight)
        fields.update(changes)
        return SeriesCutoff(**fields)

    def enlarged(self, by: int = 1) -> "SeriesCutoff":
        return SeriesCutoff(self.max_genus + by, self.max_points + by, self.max_s_weight + by,
                            self.max_t_index + by, self.max_weight + by)

    def within(self, other: "SeriesCutoff") -> bool:
        return all(getattr(self, f) <= getattr(other, f) for f in
                   ("max_genus", "max_points", "max_s_weight", "max_t_index", "max_weight"))

    def universe(self) -> Iterator[Monomial]:
        """Every monomial inside the cutoff (used as a test basis)."""
        T = min(self.max_t_index, self.max_weight)
        for n in range(self.max_points + 1):
            for combo in _multisets(T, n):
                tw = sum(combo)
                if tw > self.max_weight:
                    continue
                t = t_counts(combo)
                for s in multi_indices_up_to_weight(min(self.max_s_weight, self.max_weight - tw)):
                    for a in range(self.max_hbar + 1):
                        yield (a, t, s)


def _multisets(top: int, n: int, start: int = 0) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for i in range(start, top + 1):
        for rest in _multisets(top, n - 1, i):
            yield (i,) + rest


@dataclass(frozen=True)
class TruncatedSeries:
    """Exact coefficients on the monomials of a cutoff.

    ``reliable`` is ``None`` when every coefficient inside the cutoff is
    exact, otherwise the set of monomials that are; operations that can
    lose information at the cutoff edge set it.
    """

    terms: Mapping[Monomial, Fraction]
    cutoff: SeriesCutoff
    reliable: Optional[frozenset] = field(default=None, compare=False)

    def __post_init__(self):
        clean = {m: Fraction(c) for m, c in self.terms.items() if c and self.cutoff.contains(m)}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def one(cls, cutoff: SeriesCutoff) -> "TruncatedSeries":
        return cls({(0, (), MultiIndex()): Fraction(1)}, cutoff)

    def in_window(self, m: Monomial) -> bool:
        return self.cutoff.contains(m) and (self.reliable is None or m in self.reliable)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def constant(self) -> Fraction:
        return self.coefficient((0, (), MultiIndex()))

    def _same(self, other: "TruncatedSeries") -> None:
        if self.cutoff != other.cutoff:
            raise ValueError("series have different cutoffs")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return TruncatedSeries(out, self.cutoff, _meet(self.reliable, other.reliable))

    def __neg__(self):
        return TruncatedSeries({m: -c for m, c in self.terms.items()}, self.cutoff, self.reliable)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "TruncatedSeries":
        factor = Fraction(factor)
        return TruncatedSeries({m: c * factor for m, c in self.terms.items()},
                               self.cutoff, self.reliable)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._same(other)
        if self.reliable is not None or other.reliable is not None:
            raise ValueError("products are only taken of fully reliable series")
        out: dict[Monomial, Fraction] = {}
        contains = self.cutoff.contains
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                if contains(m):
                    out[m] = out.get(m, Fraction(0)) + c1 * c2
        return TruncatedSeries(out, self.cutoff)

    def derivative(self, i: int) -> "TruncatedSeries":
        """``d/dt_i``, exact on the cutoff with one fewer point and weight lowered by ``i``."""
        cut = self.cutoff
        if cut.max_points < 1 or cut.max_weight < i:
            raise ValueError("nothing left to differentiate inside the cutoff")
        smaller = cut.replace(max_points=cut.max_points - 1, max_weight=cut.max_weight - i)
        out = {}
        for (a, t, s), c in self.terms.items():
            if i < len(t) and t[i]:
                e = list(t)
                e[i] -= 1
                out[(a, _trim(e), s)] = c * t[i]
        return TruncatedSeries(out, smaller, self.reliable)

    def truncate(self, cutoff: SeriesCutoff) -> "TruncatedSeries":
        """Restrict to a smaller cutoff."""
        if not cutoff.within(self.cutoff):
            raise ValueError("truncate cannot enlarge the cutoff")
        return TruncatedSeries(self.terms, cutoff, self.reliable)

    def times_hbar(self) -> "TruncatedSeries":
        return TruncatedSeries({(a + 1, t, s): c for (a, t, s), c in self.terms.items()},
                               self.cutoff)

    def restrict(self, pred: Callable[[Monomial], bool]) -> "TruncatedSeries":
        return TruncatedSeries({m: c for m, c in self.terms.items() if pred(m)}, self.cutoff)

    def nonzero_in_window(self) -> dict[Monomial, Fraction]:
        return {m: c for m, c in self.terms.items() if self.in_window(m)}

    def dump(self) -> str:
        """One line per monomial, ``hbar^a t[...] s[...] = p/q``, in canonical order."""
        lines = [f"{render_monomial(m)} = {format_rational(c, explicit_denominator=True)}"
                 for m, c in sorted(self.terms.items(), key=lambda kv: monomial_sort_key(kv[0]))]
        return "\n".join(lines) + ("\n" if lines else "")


def _meet(r1, r2):
    if r1 is None:
        return r2
    if r2 is None:
        return r1
    return r1 & r2


def _power_series(f: TruncatedSeries, coefficients: Callable[[int], Fraction]) -> TruncatedSeries:
    # sum_k c_k f^k; f has no constant term so f^k vanishes once k exceeds
    # the largest possible total of t-count plus s-weight plus hbar
    if f.constant():
        raise ValueError("series must have zero constant term")
    cut = f.cutoff
    bound = cut.max_points + cut.max_s_weight + cut.max_hbar + 1
    total = TruncatedSeries.one(cut).scale(coefficients(0))
    power = TruncatedSeries.one(cut)
    for k in range(1, bound + 1):
        power = power * f
        if not power.terms:
            break
        total = total + power.scale(coefficients(k))
    return total


def exponentiate(f: TruncatedSeries) -> TruncatedSeries:
    """``exp(f)`` inside the cutoff; a constant term is split off exactly when it is 0."""
    return _power_series(f, lambda k: Fraction(1, math.factorial(k)))


def logarithm(g: TruncatedSeries) -> TruncatedSeries:
    """``log(g)`` for ``g`` with constant term 1."""
    if g.constant() != 1:
        raise ValueError("log needs constant term 1")
    u = g - TruncatedSeries.one(g.cutoff)
    return _power_series(u, lambda k: Fraction(0) if k == 0 else Fraction((-1) ** (k + 1), k))


def build_free_energy(cutoff: SeriesCutoff, with_kappa: bool = True) -> TruncatedSeries:
    """``log G`` (or ``log Z`` when ``with_kappa`` is false) inside the cutoff.

    The coefficient of ``hbar^(g-1) prod t_di s^L`` is the correlator divided by
    the multiplicities of repeated t-indices and by ``L!``.
    """
    smax = cutoff.max_s_weight if with_kappa else 0
    terms = {}
    for key in degree_valid_keys(cutoff.max_genus, cutoff.max_points, max_kappa_size=smax):
        if key.kappa.weight > smax:
            continue
        m = (key.genus - 1, t_counts(key.psi), key.kappa)
        if not cutoff.contains(m):
            continue
        value = correlator(key)
        if value:
            denom = math.prod(math.factorial(c) for c in m[1]) * key.kappa.factorial
            terms[m] = value / denom
    return TruncatedSeries(terms, cutoff)


def free_energy_coefficient(key: CorrelatorKey) -> Fraction:
    """The free-energy coefficient stored for one correlator key."""
    return correlator(key) / (math.prod(math.factorial(c) for c in t_counts(key.psi))
                              * key.kappa.factorial)
