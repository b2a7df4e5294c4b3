"""Orchestrated cross-checks, grouped into named suites.

Each check records a pass/fail status, how many cases it covered and a
short detail string.  Where a formula admits two readings, the check passes
when exactly one reading holds, and that reading goes into ``findings``.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .combinatorics import (MultiIndex, alpha_coefficient, beta_coefficients, beta_multi,
                            beta_coefficients_by_inversion, double_factorial, gamma_coefficient,
                            multi_indices_up_to_weight, splits)
from .correlator import (CorrelatorKey, Strategy, StrategyDisagreement, StrategyNotApplicable,
                         closed_genus1, closed_one_point, closed_two_point, corr, correlator,
                         degree_valid_keys, identity_residual, recurse_thm14, recurse_thm15,
                         table_load)
from .kernel import calibrate_c_D, recurse_kappa1, sw_verify
from .render import format_rational
from .tau import SeriesCutoff, build_free_energy, exponentiate, virasoro_hat, virasoro_V, \
    virasoro_V_direct
from .tau.identities import (annihilation_residual, commutator_residual, kdv_pde_residual,
                             shift_compare)
from .volumes import normalized_volume, rescale_to_normalized, point_recursion_residual, kappa_only_residual, \
    volume_polynomial

__all__ = ["SUITES", "VerifyBounds", "CheckResult", "run_suite", "evaluate_keys"]

SUITES = ("all", "closed", "cross", "coefficients", "identities", "virasoro", "kdv", "shift",
          "appendix", "volumes")


@dataclass(frozen=True)
class VerifyBounds:
    """Cutoffs for every suite; the defaults are the acceptance ranges."""

    genus1_points: int = 10
    one_point_genus: int = 10
    two_point_genus: int = 9
    cross_genus: int = 6
    cross_points: int = 4
    cross_kappa: int = 3
    identity_genus: int = 5
    coefficient_weight: int = 12
    alpha_length: int = 10
    beta_length: int = 10
    volume_genus: int = 4
    volume_points: int = 3
    point_recursion_genus: int = 5
    kappa_only_genus: int = 4
    operator_genus: int = 4
    operator_points: int = 5
    operator_s_weight: int = 3
    operator_k: int = 3
    kdv_genus: int = 4
    kdv_points: int = 6
    shift_genus: int = 3
    shift_points: int = 3
    shift_s_weight: int = 3
    kernel_cases: tuple = ((1, 2), (2, 1), (2, 2), (3, 1))

    def capped(self, max_genus: int) -> "VerifyBounds":
        """Every genus bound lowered to at most ``max_genus``."""
        changes = {name: min(getattr(self, name), max_genus) for name in (
            "one_point_genus", "two_point_genus", "cross_genus", "identity_genus",
            "volume_genus", "point_recursion_genus", "kappa_only_genus", "operator_genus", "kdv_genus",
            "shift_genus")}
        changes["kernel_cases"] = tuple(c for c in self.kernel_cases if c[0] <= max_genus)
        return replace(self, **changes)


@dataclass
class CheckResult:
    name: str
    passed: bool
    count: int
    detail: str = ""
    seconds: float = 0.0


@dataclass
class _Run:
    bounds: VerifyBounds
    jobs: int = 1
    checks: list = field(default_factory=list)
    findings: dict = field(default_factory=dict)

    def check(self, name: str, fn: Callable[[], tuple]) -> None:
        start = time.perf_counter()
        try:
            passed, count, detail = fn()
        except Exception as exc:  # a crash is a failed check, never a silent pass
            passed, count, detail = False, 0, f"{type(exc).__name__}: {exc}"
        self.checks.append(CheckResult(name, bool(passed), count, detail,
                                       time.perf_counter() - start))


def _mismatches(pairs: Iterable[tuple[str, Fraction, Fraction]]) -> tuple[bool, int, str]:
    count, bad = 0, []
    for label, got, want in pairs:
        count += 1
        if got != want:
            bad.append(f"{label}: {got} != {want}")
    return not bad, count, "; ".join(bad[:5])


def _zeros(items: Iterable[tuple[str, object]]) -> tuple[bool, int, str]:
    count, bad = 0, []
    for label, residual in items:
        count += 1
        if residual:
            bad.append(label)
    return not bad, count, ("nonzero at " + ", ".join(bad[:5])) if bad else ""


# ----------------------------------------------------------------------------
# parallel evaluation


def _eval_chunk(args):
    keys, strategy = args
    out = []
    for key in keys:
        try:
            out.append((key, correlator(key, strategy), None))
        except StrategyDisagreement as exc:
            out.append((key, None, str(exc)))
    return out


def evaluate_keys(keys: list[CorrelatorKey], strategy: str = Strategy.AUTO,
                  jobs: int = 1) -> dict[CorrelatorKey, Fraction]:
    """Values for ``keys``; with ``jobs > 1`` the work fans out to processes.

    Worker results are published into the shared table here, so a worker
    disagreeing with a value already known raises ``StrategyDisagreement``.
    """
    if jobs <= 1 or len(keys) < 2:
        return {k: correlator(k, strategy) for k in keys}
    # keys are sorted by genus; dealing them round-robin balances the chunks
    chunks = [(keys[i::jobs], strategy) for i in range(jobs)]
    values = {}
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for chunk in pool.map(_eval_chunk, chunks):
            for key, value, err in chunk:
                if err is not None:
                    raise StrategyDisagreement(err)
                values[key] = value
    table_load(values)
    return {k: values[k] for k in keys}


# ----------------------------------------------------------------------------
# suites


def _suite_closed(run: _Run) -> None:
    b = run.bounds
    run.check("published_constants", lambda: _mismatches([
        ("<tau_0>_1", corr(1, (), (0,)), Fraction(1, 8)),
        ("<kappa_1>_2", corr(2, (1,), ()), Fraction(3, 128)),
        ("<tau_1 tau_1>_3", corr(3, (), (1, 1)), Fraction(63, 512)),
        ("<tau_2 tau_3>_6", corr(6, (), (2, 3)), Fraction(7949025, 2097152)),
        ("<tau_4 tau_4>_9", corr(9, (), (4, 4)), Fraction(8093029715505, 8589934592)),
    ]))
    run.check("genus_one", lambda: _mismatches(
        (f"n={n}", corr(1, (), (0,) * n, Strategy.KMZ), closed_genus1(n))
        for n in range(1, b.genus1_points + 1)))
    run.check("one_point", lambda: _mismatches(
        (f"g={g}", corr(g, (), (g - 1,), Strategy.KMZ), closed_one_point(g))
        for g in range(1, b.one_point_genus + 1)))
    run.check("two_point", lambda: _mismatches(
        (f"g={g},k={k}", corr(g, (), (k, g - 1 - k), Strategy.KMZ), closed_two_point(g, k))
        for g in range(1, b.two_point_genus + 1) for k in range(0, (g - 1) // 2 + 1)))


def _cross_keys(b: VerifyBounds, max_genus: Optional[int] = None) -> list[CorrelatorKey]:
    return degree_valid_keys(max_genus or b.cross_genus, b.cross_points, b.cross_kappa)


def _suite_cross(run: _Run) -> None:
    keys = _cross_keys(run.bounds)

    def agree():
        ref = evaluate_keys(keys, Strategy.KMZ, run.jobs)
        bad = []
        for strategy in (Strategy.ALTERNATING, Strategy.ALPHA):
            try:
                got = evaluate_keys(keys, strategy, run.jobs)
            except StrategyDisagreement as exc:
                return False, len(keys), str(exc)
            bad += [f"{strategy} {k}" for k in keys if got[k] != ref[k]]
        return not bad, len(keys), "; ".join(bad[:5])

    def peel_positions():
        pairs = []
        for key in keys:
            if key.genus > 5 or key.n < 2:
                continue
            ref = correlator(key)
            for pos in sorted({key.psi.index(d) for d in key.psi}):
                pairs.append((f"alternating peel {pos} {key}", recurse_thm14(key, pos), ref))
                pairs.append((f"alpha peel {pos} {key}", recurse_thm15(key, pos), ref))
        return _mismatches(pairs)

    def kappa1_route():
        pairs = []
        for key in keys:
            b = key.kappa
            if key.genus > 5 or any(i != 1 for i, _ in b.items()) or b.size == 0:
                continue
            pairs.append((str(key), recurse_kappa1(key.genus, b.size, key.psi), correlator(key)))
        return _mismatches(pairs)

    def closed_strategy():
        pairs = []
        for key in keys:
            try:
                v = correlator(key, Strategy.CLOSED)
            except StrategyNotApplicable:
                continue
            pairs.append((str(key), v, correlator(key, Strategy.KMZ)))
        return _mismatches(pairs)

    run.check("strategies_agree", agree)
    run.check("peel_position_independence", peel_positions)
    run.check("kappa1_recursion", kappa1_route)
    run.check("closed_strategy", closed_strategy)


def _suite_coefficients(run: _Run) -> None:
    b = run.bounds

    def convolution():
        # sum over L + L' = b of alpha_L/L! gamma_L' is zero for b != 0
        items = []
        for B in multi_indices_up_to_weight(b.coefficient_weight):
            if not B:
                continue
            total = sum((beta_multi(L) * gamma_coefficient(Lp) for L, Lp in splits(B, 2)),
                        Fraction(0))
            items.append((str(tuple(B)), total))
        return _zeros(items)

    betas = beta_coefficients(max(b.alpha_length, b.beta_length))
    run.check("alpha_gamma_convolution", convolution)
    run.check("alpha_single_part", lambda: _mismatches(
        (f"l={l}", alpha_coefficient(MultiIndex((l,))), math.factorial(l) * betas[l])
        for l in range(0, b.alpha_length + 1)))
    run.check("beta_two_routes", lambda: _mismatches(
        (f"b={i}", x, y) for i, (x, y) in enumerate(
            zip(beta_coefficients(b.beta_length), beta_coefficients_by_inversion(b.beta_length)))))

    def single_kappa_alpha():
        got = {l: alpha_coefficient(MultiIndex.from_counts({l: 1}))
               for l in range(1, b.alpha_length + 1)}
        # the recursion gives 1/(2l-1)!!; the competing closed form is 1/(2l+1)!!
        claim = all(v == Fraction(1, double_factorial(2 * l + 1)) for l, v in got.items())
        holds = all(v == Fraction(1, double_factorial(2 * l - 1)) for l, v in got.items())
        run.findings["alpha_single_kappa"] = {
            "values": {str(l): format_rational(v, True) for l, v in got.items()},
            "matches_1_over_(2l-1)!!": holds,
            "matches_1_over_(2l+1)!!": claim,
            "claim_status": "consistent" if claim else "inconsistent",
        }
        return holds, len(got), "" if holds else "alpha(delta_l) does not follow 1/(2l-1)!!"

    run.check("alpha_single_kappa", single_kappa_alpha)


def _identity_items(kind: str, keys: list[CorrelatorKey]):
    for key in keys:
        psi = list(key.psi)
        if kind in ("dilaton", "kdv") and key.kappa:
            continue
        if kind == "dilaton":
            if 0 not in psi:
                continue
            psi.remove(0)
        elif kind in ("kdv", "kdv_kappa"):
            if 0 not in psi or 1 not in psi:
                continue
            psi.remove(0)
            psi.remove(1)
        common = CorrelatorKey(key.genus, key.kappa, tuple(psi))
        if common.genus == 1 and not common.psi and kind in ("dilaton", "dilaton_kappa"):
            continue
        yield f"{kind} {common}", identity_residual(kind, common)


def _suite_identities(run: _Run) -> None:
    b = run.bounds
    # the identities add up to two insertions, so the outer keys get two more points
    keys = degree_valid_keys(b.identity_genus, b.cross_points + 2, b.cross_kappa)
    for kind in ("dilaton", "kdv", "kdv_kappa", "dilaton_kappa"):
        run.check(f"identity_{kind}", lambda kind=kind: _zeros(_identity_items(kind, keys)))


def _suite_volumes(run: _Run) -> None:
    b = run.bounds
    gn = [(g, n) for g in range(1, b.volume_genus + 1) for n in range(0, b.volume_points + 1)
          if (g, n) != (1, 0)]

    def normalization():
        return _mismatches((f"({g},{n})", rescale_to_normalized(volume_polynomial(g, n), g),
                            normalized_volume(g, n)) for g, n in gn)

    def shape():
        bad = []
        for g, n in gn:
            v = normalized_volume(g, n)
            if not (v.pi_free() and v.is_symmetric()):
                bad.append(f"({g},{n})")
        return not bad, len(gn), ", ".join(bad)

    def point_recursion():
        return _zeros((f"g={g},n={n},b={tuple(B)}", point_recursion_residual(g, n, B))
                      for g in range(1, b.point_recursion_genus + 1) for n in range(0, b.volume_points + 1)
                      for B in multi_indices_up_to_weight(g - 1)
                      if B.size <= b.cross_kappa and (g, n) != (1, 0))

    def kappa_only():
        cases = [(g, B) for g in range(2, b.kappa_only_genus + 1)
                 for B in multi_indices_up_to_weight(g - 1) if B]
        vanishing = []
        for variant in ("as_stated", "with_binomial"):
            if all(kappa_only_residual(g, B, variant) == 0 for g, B in cases):
                vanishing.append(variant)
        run.findings["kappa_only_recursion_variant"] = vanishing[0] if len(vanishing) == 1 \
            else vanishing
        return len(vanishing) == 1, len(cases), f"vanishing variants: {vanishing}"

    run.check("normalization_consistency", normalization)
    run.check("volume_shape", shape)
    run.check("higher_volume_point_recursion", point_recursion)
    run.check("kappa_only_recursion", kappa_only)


def _operator_cutoff(b: VerifyBounds) -> SeriesCutoff:
    return SeriesCutoff(b.operator_genus, b.operator_points, b.operator_s_weight)


def _suite_virasoro(run: _Run) -> None:
    b = run.bounds
    cut = _operator_cutoff(b)
    ks = range(0, b.operator_k + 1)
    cache = {}

    def G():
        if "G" not in cache:
            cache["G"] = exponentiate(build_free_energy(cut))
        return cache["G"]

    run.check("annihilation_hat", lambda: _zeros(
        (f"k={k}", annihilation_residual(virasoro_hat(k, cut), G())) for k in ks))
    run.check("annihilation_V", lambda: _zeros(
        (f"k={k}", annihilation_residual(virasoro_V(k, cut), G())) for k in ks))
    run.check("V_direct_form", lambda: _zeros(
        (f"k={k}", not (virasoro_V(k, cut) == virasoro_V_direct(k, cut))) for k in ks))
    pairs = [(n, m) for n in ks for m in ks if m < n]
    run.check("commutator_V", lambda: _zeros(
        (f"[{n},{m}]", not commutator_residual(n, m, cut, "V").is_zero()) for n, m in pairs))

    def hat_variants():
        vanishing = []
        for variant in ("hat", "as_stated"):
            if all(commutator_residual(n, m, cut, "hat", variant).is_zero() for n, m in pairs):
                vanishing.append(variant)
        run.findings["hat_commutator_variant"] = vanishing[0] if len(vanishing) == 1 \
            else vanishing
        return len(vanishing) == 1, len(pairs), f"vanishing variants: {vanishing}"

    run.check("commutator_hat", hat_variants)


def _suite_kdv(run: _Run) -> None:
    b = run.bounds
    cut = SeriesCutoff(b.kdv_genus, b.kdv_points, b.operator_s_weight)

    def forms():
        holding = [form for form in ("log", "as_stated") if not kdv_pde_residual(cut, form)]
        run.findings["kdv_pde_form"] = holding[0] if len(holding) == 1 else holding
        return "log" in holding and len(holding) == 1, 2, f"holding forms: {holding}"

    run.check("kdv_pde", forms)


def _suite_shift(run: _Run) -> None:
    b = run.bounds
    cut = SeriesCutoff(b.shift_genus, b.shift_points, b.shift_s_weight)

    def modes():
        zero = [m for m in ("weighted", "counted") if not shift_compare(cut, m)]
        big = cut.enlarged(1)
        zero_big = [m for m in ("weighted", "counted") if not shift_compare(big, m)]
        run.findings["shift_mode"] = zero[0] if len(zero) == 1 else zero
        ok = len(zero) == 1 and zero == zero_big
        return ok, 2, f"zero modes: {zero}; enlarged: {zero_big}"

    run.check("shift_identity", modes)


def _suite_appendix(run: _Run) -> None:
    b = run.bounds

    def calibrate():
        c = calibrate_c_D()
        run.findings["c_D"] = format_rational(c, True)
        return True, 1, f"c_D = {c}"

    run.check("calibrate_c_D", calibrate)
    run.check("kernel_recursion", lambda: _zeros(
        (f"({g},{n})", not sw_verify(g, n).is_zero()) for g, n in b.kernel_cases))


_SUITE_FUNCS = {
    "closed": _suite_closed,
    "cross": _suite_cross,
    "coefficients": _suite_coefficients,
    "identities": _suite_identities,
    "volumes": _suite_volumes,
    "virasoro": _suite_virasoro,
    "kdv": _suite_kdv,
    "shift": _suite_shift,
    "appendix": _suite_appendix,
}


def run_suite(suite: str = "all", bounds: Optional[VerifyBounds] = None, jobs: int = 1) -> dict:
    """Run a suite and return the report as a JSON-ready dict.

    ``timings`` is the only field that varies between identical runs.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    run = _Run(bounds or VerifyBounds(), jobs=jobs)
    names = [s for s in SUITES if s != "all"] if suite == "all" else [suite]
    for name in names:
        _SUITE_FUNCS[name](run)
    return {
        "suite": suite,
        "passed": all(c.passed for c in run.checks),
        "counts": {"checks": len(run.checks), "passed": sum(c.passed for c in run.checks),
                   "cases": sum(c.count for c in run.checks)},
        "checks": [{k: v for k, v in asdict(c).items() if k != "seconds"} for c in run.checks],
        "findings": run.findings,
        "bounds": {k: (list(map(list, v)) if k == "kernel_cases" else v)
                   for k, v in asdict(run.bounds).items()},
        "timings": {c.name: round(c.seconds, 3) for c in run.checks},
    }
