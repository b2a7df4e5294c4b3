"""Text forms of exact rationals and kappa/psi specifications."""
from __future__ import annotations

from fractions import Fraction

from .combinatorics import MultiIndex


def format_rational(x: Fraction, explicit_denominator: bool = False) -> str:
    """``p/q`` in lowest terms; integers drop ``/1`` unless asked not to."""
    x = Fraction(x)
    if x.denominator == 1 and not explicit_denominator:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    if not num.lstrip("-").isdigit() or (sep and not den.isdigit()):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(int(num), int(den) if sep else 1)


def format_kappa(b: MultiIndex) -> str:
    """``1:2,3:1`` for kappa_1^2 kappa_3; empty string for no kappa."""
    return ",".join(f"{i}:{c}" for i, c in b.items())


def parse_kappa(text: str) -> MultiIndex:
    text = text.strip()
    if not text:
        return MultiIndex()
    counts: dict[int, int] = {}
    for item in text.split(","):
        idx, sep, cnt = item.strip().partition(":")
        if not sep or not idx.strip().isdigit() or not cnt.strip().isdigit():
            raise ValueError(f"bad kappa item {item!r}; expected index:count")
        i, c = int(idx), int(cnt)
        if i < 1:
            raise ValueError("kappa indices start at 1")
        counts[i] = counts.get(i, 0) + c
    return MultiIndex.from_counts({i: c for i, c in counts.items() if c})


def format_psi(psi) -> str:
    return ",".join(str(d) for d in psi)


def parse_psi(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item.isdigit():
            raise ValueError(f"bad psi exponent {item!r}")
        out.append(int(item))
    return tuple(sorted(out, reverse=True))
