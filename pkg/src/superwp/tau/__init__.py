"""Generating functions, Virasoro operators and the identities they satisfy."""
from .series import (SeriesCutoff, TruncatedSeries, build_free_energy, exponentiate, logarithm,
                     monomial, render_monomial)
from .operators import DifferentialOperator, virasoro_E, virasoro_hat, virasoro_V, virasoro_V_direct

__all__ = [
    "SeriesCutoff",
    "TruncatedSeries",
    "build_free_energy",
    "exponentiate",
    "logarithm",
    "monomial",
    "render_monomial",
    "DifferentialOperator",
    "virasoro_E",
    "virasoro_hat",
    "virasoro_V",
    "virasoro_V_direct",
]
