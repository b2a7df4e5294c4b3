import json

import pytest

from superwp.correlator import clear_caches
from superwp.verify import SUITES, VerifyBounds, run_suite


@pytest.fixture(scope="module")
def full_report():
    clear_caches()
    return run_suite("all")


def test_all_suites_pass(full_report):
    failed = [c for c in full_report["checks"] if not c["passed"]]
    assert full_report["passed"], failed
    assert all(c["count"] > 0 for c in full_report["checks"])


def test_findings(full_report):
    f = full_report["findings"]
    assert f["kappa_only_recursion_variant"] == "with_binomial"
    assert f["shift_mode"] == "weighted"
    assert f["kdv_pde_form"] == "log"
    assert f["hat_commutator_variant"] == "hat"
    assert f["c_D"] == "1/1"
    assert f["alpha_single_kappa"]["claim_status"] == "inconsistent"


def test_report_is_deterministic(full_report):
    again = run_suite("all")
    strip = lambda r: json.dumps({k: v for k, v in r.items() if k != "timings"}, sort_keys=True)
    assert strip(again) == strip(full_report)


def test_closed_suite_holds_published_values():
    report = run_suite("closed")
    names = {c["name"]: c for c in report["checks"]}
    assert names["published_constants"]["passed"] and names["published_constants"]["count"] == 5
    assert names["two_point"]["count"] == 25


@pytest.mark.parametrize("suite", [s for s in SUITES if s != "all"])
def test_each_suite_runs_alone(suite):
    # genus 4 is the smallest cap at which both readings of the kappa-only recursion differ
    report = run_suite(suite, VerifyBounds().capped(4))
    assert report["suite"] == suite and report["passed"]


def test_low_genus_cannot_resolve_the_kappa_only_reading():
    report = run_suite("volumes", VerifyBounds().capped(3))
    assert not report["passed"]
    assert report["findings"]["kappa_only_recursion_variant"] == ["as_stated", "with_binomial"]


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_a_crashing_check_fails_the_report(monkeypatch):
    import superwp.verify as v

    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(v, "calibrate_c_D", boom)
    report = run_suite("appendix")
    assert not report["passed"]
    assert "boom" in report["checks"][0]["detail"]
