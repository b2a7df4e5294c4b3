"""Kernel calculus for the super volume recursion, kept at coefficient level.

The kernel is ``H(x, y) = (sech(pi (x-y)/2) - sech(pi (x+y)/2)) / 2`` with
``D(x, y, z) = H(x, y + z)`` and ``R(x, y, z) = (H(x+y, z) + H(x-y, z)) / 2``.
All kernel integrals that the recursion needs reduce to the moments

    M_{2m+1}(t) = int_0^oo z^(2m+1) H(t, z) dz = (2m+1)! h_{2m+1}(t)

where ``h_{2k+1}`` is an odd polynomial with secant-number coefficients.
The D-term carries one global constant ``c_D`` that is calibrated once on
``(g, n) = (2, 1)`` and then reused everywhere.

Floating-point quadrature lives in :func:`quadrature_oracle` and is used
only as an independent check in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Optional

from .combinatorics import beta_coefficients, double_factorial, secant_numbers
from .correlator import UndefinedCorrelator
from .volumes import VolumePolynomial, normalized_volume

__all__ = [
    "HPolynomial",
    "h_polynomial",
    "moment_polynomial",
    "beta_moment_constant",
    "r_moment",
    "sw_rhs",
    "sw_terms",
    "calibrate_c_D",
    "sw_verify",
    "recurse_kappa1",
    "quadrature_oracle",
    "QuadratureError",
    "kernel_exact",
]


@dataclass(frozen=True)
class HPolynomial:
    """``h_{2k+1}(t)``: maps odd exponents ``2i+1`` to exact coefficients."""

    order: int
    coefficients: Mapping[int, Fraction]

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        return sum((c * t ** e for e, c in self.coefficients.items()), Fraction(0))

    def evaluate_float(self, t: float) -> float:
        return sum(float(c) * t ** e for e, c in self.coefficients.items())

    def __str__(self):
        parts = []
        for e, c in sorted(self.coefficients.items()):
            parts.append(f"{c}*t^{e}" if e != 1 else f"{c}*t")
        return " + ".join(parts)


@lru_cache(maxsize=None)
def h_polynomial(k: int) -> HPolynomial:
    """``h_{2k+1}(t) = sum_i a_{k-i}/(2k-2i)! * t^(2i+1)/(2i+1)!``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    a = secant_numbers(k)
    coeffs = {2 * i + 1: a[k - i] / (math.factorial(2 * k - 2 * i) * math.factorial(2 * i + 1))
              for i in range(k + 1)}
    return HPolynomial(k, coeffs)


def moment_polynomial(m: int) -> dict[int, Fraction]:
    """``M_{2m+1}(t) = int z^(2m+1) H(t, z) dz`` as ``{exponent: coefficient}``."""
    scale = math.factorial(2 * m + 1)
    return {e: c * scale for e, c in h_polynomial(m).coefficients.items()}


def beta_moment_constant(a: int, b: int) -> tuple[Fraction, int]:
    """``(c, m)`` with ``int int x^(2a+1) y^(2b+1) H(t, x+y) = c * M_{2m+1}(t)``.

    Substituting ``z = x + y`` leaves a Beta integral over ``x in [0, z]``.
    """
    if a < 0 or b < 0:
        raise ValueError("a, b must be >= 0")
    c = Fraction(math.factorial(2 * a + 1) * math.factorial(2 * b + 1),
                 math.factorial(2 * a + 2 * b + 3))
    return c, a + b + 1


def r_moment(a: int) -> dict[tuple[int, int], Fraction]:
    """``int x^(2a+1) R(L1, Lj, x) dx`` as ``{(e1, ej): coefficient}``.

    ``(M(L1+Lj) + M(L1-Lj))/2`` keeps only odd powers of ``L1`` and even
    powers of ``Lj``.
    """
    if a < 0:
        raise ValueError("a must be >= 0")
    out: dict[tuple[int, int], Fraction] = {}
    for e, c in moment_polynomial(a).items():
        k = (e - 1) // 2
        for m in range(k + 1):
            key = (2 * m + 1, 2 * (k - m))
            out[key] = out.get(key, Fraction(0)) + c * math.comb(2 * k + 1, 2 * m + 1)
    return out


def _v(g: int, n: int) -> dict[tuple[int, ...], Fraction]:
    if g < 1:
        return {}
    try:
        v = normalized_volume(g, n)
    except UndefinedCorrelator:
        return {}
    return {e: c for (_, e), c in v.terms.items()}


def _add_to(acc, key, value):
    acc[key] = acc.get(key, Fraction(0)) + value


def sw_terms(g: int, n: int) -> tuple[dict, dict]:
    """The D-term (without ``c_D``) and the R-term of ``L1 v_{g,n}`` as exponent dicts."""
    if g < 1 or n < 1 or (g, n) == (1, 1):
        raise ValueError("the recursion needs g >= 1, n >= 1 and (g, n) != (1, 1)")
    K = list(range(1, n))  # 0-based positions of L_2 .. L_n
    d_term: dict[tuple[int, ...], Fraction] = {}

    def add_d(p: int, q: int, coef: Fraction, rest: dict[int, int]):
        c, m = beta_moment_constant(p, q)
        for e1, mc in moment_polynomial(m).items():
            exps = [0] * n
            exps[0] = e1
            for pos, e in rest.items():
                exps[pos] = e
            _add_to(d_term, tuple(exps), coef * c * mc)

    # nonseparating part of P: v_{g-1,n+1}(x, y, L_K)
    for e, coef in _v(g - 1, n + 1).items():
        add_d(e[0] // 2, e[1] // 2, coef, dict(zip(K, e[2:])))
    # separating part: v_{g1,|I|+1}(x, L_I) v_{g2,|J|+1}(y, L_J)
    for g1 in range(1, g):
        for r in range(len(K) + 1):
            for I in combinations(K, r):
                J = [k for k in K if k not in I]
                left, right = _v(g1, len(I) + 1), _v(g - g1, len(J) + 1)
                for e1, c1 in left.items():
                    for e2, c2 in right.items():
                        rest = dict(zip(I, e1[1:]))
                        rest.update(zip(J, e2[1:]))
                        add_d(e1[0] // 2, e2[0] // 2, c1 * c2, rest)

    r_term: dict[tuple[int, ...], Fraction] = {}
    for j in K:
        others = [k for k in K if k != j]
        for e, coef in _v(g, n - 1).items():
            for (e1, ej), rc in r_moment(e[0] // 2).items():
                exps = [0] * n
                exps[0], exps[j] = e1, ej
                for pos, x in zip(others, e[1:]):
                    exps[pos] = x
                _add_to(r_term, tuple(exps), coef * rc)
    return d_term, r_term


def _as_poly(n: int, terms: Mapping) -> VolumePolynomial:
    return VolumePolynomial(n, {(0, e): c for e, c in terms.items()})


def sw_rhs(g: int, n: int, c_D) -> VolumePolynomial:
    """Right-hand side of the kernel recursion for ``L1 v_{g,n}(L1, L_K)``."""
    d_term, r_term = sw_terms(g, n)
    return _as_poly(n, d_term).scale(c_D) + _as_poly(n, r_term)


def _lhs(g: int, n: int) -> VolumePolynomial:
    return normalized_volume(g, n).times_variable(1)


@lru_cache(maxsize=None)
def calibrate_c_D(g: int = 2, n: int = 1) -> Fraction:
    """The single constant making the recursion hold at ``(g, n)``.

    Every coefficient must give the same ratio; otherwise no constant works
    and ``ValueError`` is raised.
    """
    d_term, r_term = sw_terms(g, n)
    target = _lhs(g, n) - _as_poly(n, r_term)
    ratio: Optional[Fraction] = None
    keys = set(d_term) | {e for (_, e) in target.terms}
    for e in sorted(keys):
        d = d_term.get(e, Fraction(0))
        t = target.coefficient(e)
        if d == 0:
            if t != 0:
                raise ValueError(f"no D-term to match coefficient at {e}")
            continue
        r = t / d
        if ratio is None:
            ratio = r
        elif r != ratio:
            raise ValueError(f"inconsistent calibration: {ratio} vs {r} at {e}")
    if ratio is None:
        raise ValueError("the D-term vanishes; nothing to calibrate")
    return ratio


def sw_verify(g: int, n: int, c_D=None) -> VolumePolynomial:
    """``L1 v_{g,n} - sw_rhs(g, n, c_D)``; ``c_D`` defaults to the calibrated constant."""
    if c_D is None:
        c_D = calibrate_c_D()
    return _lhs(g, n) - sw_rhs(g, n, c_D)


# ----------------------------------------------------------------------------
# the kappa_1 recursion, implemented on its own


def _sub_multisets(rest: tuple[int, ...]):
    # labelled splits of a multiset of exponents, with multiplicities
    out: dict[tuple, int] = {}
    for r in range(len(rest) + 1):
        for I in combinations(range(len(rest)), r):
            a = tuple(sorted((rest[i] for i in I), reverse=True))
            b = tuple(sorted((rest[i] for i in range(len(rest)) if i not in I), reverse=True))
            out[(a, b)] = out.get((a, b), 0) + 1
    return out.items()


@lru_cache(maxsize=None)
def _beta(b: int) -> Fraction:
    return beta_coefficients(b)[b]


@lru_cache(maxsize=None)
def recurse_kappa1(g: int, a: int, psi: tuple[int, ...]) -> Fraction:
    """``<kappa_1^a prod tau_d>_g`` from the kappa_1 recursion with ``beta_b`` weights.

    Peels the largest exponent.  Without psi insertions the dilaton-type
    reduction to one insertion is used first.
    """
    psi = tuple(sorted(psi, reverse=True))
    if g < 1 or a < 0:
        return Fraction(0)
    if a + sum(psi) != g - 1:
        return Fraction(0)
    if not psi:
        if g == 1:
            raise UndefinedCorrelator("genus one needs at least one insertion")
        total = Fraction(0)
        for l in range(a + 1):
            total += (-1) ** l * math.comb(a, l) * recurse_kappa1(g, a - l, (l,))
        return total / (2 * g - 2)
    if (g, a, psi) == (1, 0, (0,)):
        return Fraction(1, 8)
    d1, rest = psi[0], psi[1:]
    fa = math.factorial(a)
    total = Fraction(0)
    for b in range(a + 1):
        beta = _beta(b)
        w = Fraction(fa, math.factorial(a - b)) * beta
        for j, dj in enumerate(rest):
            others = rest[:j] + rest[j + 1:]
            total += (w * double_factorial(2 * b + 2 * d1 + 2 * dj + 1)
                      / double_factorial(2 * dj - 1)
                      * recurse_kappa1(g, a - b, (b + d1 + dj,) + others))
        for r in range(b + d1):
            s = b + d1 - 1 - r
            df = double_factorial(2 * r + 1) * double_factorial(2 * s + 1)
            if g >= 2:
                total += w * df * recurse_kappa1(g - 1, a - b, (r, s) + rest) / 2
            for c in range(a - b + 1):
                cc = a - b - c
                wc = Fraction(fa, math.factorial(c) * math.factorial(cc)) * beta
                for (I, J), mult in _sub_multisets(rest):
                    for g1 in range(1, g):
                        left = recurse_kappa1(g1, c, (r,) + I)
                        if left:
                            total += wc * df * mult * left * recurse_kappa1(g - g1, cc, (s,) + J) / 2
    return total / double_factorial(2 * d1 + 1)


# ----------------------------------------------------------------------------
# floating-point oracles


class QuadratureError(RuntimeError):
    pass


def _sech(u: float) -> float:
    # 2 e^-|u| / (1 + e^-2|u|) never overflows
    e = math.exp(-abs(u))
    return 2 * e / (1 + e * e)


def _H(x: float, y: float) -> float:
    return 0.5 * (_sech(math.pi * (x - y) / 2) - _sech(math.pi * (x + y) / 2))


def quadrature_oracle(kind: str, params, t: float = 0.0, tol: float = 1e-12) -> float:
    """Adaptive numerical integration of a kernel integral.

    ``kind="sech_moment"``, ``params=n``: ``int_0^oo x^(2n) / cosh(pi x/2) dx``.
    ``kind="h"``, ``params=k``: ``int_0^oo x^(2k+1)/(2k+1)! H(t, x) dx``.
    ``kind="dd_moment"``, ``params=(a, b)``:
    ``int int x^(2a+1) y^(2b+1) H(t, x+y) dx dy`` over the positive quadrant.
    Safe ranges: ``n, k <= 8``, ``a, b <= 3`` and ``|t| <= 4``.
    """
    from scipy import integrate

    if kind == "sech_moment":
        n = int(params)
        val, err = integrate.quad(lambda x: x ** (2 * n) * _sech(math.pi * x / 2), 0, math.inf,
                                  epsabs=0, epsrel=tol, limit=500)
    elif kind == "h":
        k = int(params)
        f = math.factorial(2 * k + 1)
        val, err = integrate.quad(lambda x: x ** (2 * k + 1) / f * _H(t, x), 0, math.inf,
                                  epsabs=0, epsrel=tol, limit=500)
    elif kind == "dd_moment":
        a, b = params
        # the integrand decays like exp(-pi (x+y)/2); beyond this cut it is
        # far below double precision relative to the total
        top = 80.0 + abs(t)
        errors = []

        def inner(x):
            v, e = integrate.quad(lambda y: y ** (2 * b + 1) * _H(t, x + y), 0, top - x,
                                  epsabs=0, epsrel=tol, limit=500)
            if v:
                errors.append(e / abs(v))
            return x ** (2 * a + 1) * v

        val, err = integrate.quad(inner, 0, top, epsabs=0, epsrel=tol, limit=500)
        err = abs(err) + max(errors, default=0.0) * abs(val)
    else:
        raise ValueError(f"unknown quadrature kind {kind!r}")
    if not math.isfinite(val) or abs(err) > max(1e-7 * abs(val), 1e-12):
        raise QuadratureError(f"{kind} {params} at t={t}: estimate {val} with error {err}")
    return val


def kernel_exact(kind: str, params, t=Fraction(0)) -> Fraction:
    """Exact counterpart of :func:`quadrature_oracle` for the same arguments."""
    if kind == "sech_moment":
        return secant_numbers(int(params))[int(params)]
    if kind == "h":
        return h_polynomial(int(params))(t)
    if kind == "dd_moment":
        c, m = beta_moment_constant(*params)
        t = Fraction(t)
        return c * sum((v * t ** e for e, v in moment_polynomial(m).items()), Fraction(0))
    raise ValueError(f"unknown kind {kind!r}")
