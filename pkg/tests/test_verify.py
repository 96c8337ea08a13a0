"""Verification harness: fixtures, records, report format and suite spot checks."""
import json

import numpy as np
import pytest

from besselbound.errors import DomainError, FixtureError
from besselbound.verify import (
    REPORT_KEYS,
    SUITE_IDS,
    GridSpec,
    VerificationRecord,
    all_passed,
    emit_report,
    endpoint_order_slope,
    format_scalar,
    open_problem_constant,
    run_suite,
    weight_fixture,
)
from besselbound.weights import weight_class_check

SMALL = GridSpec((0.0, 1.0), (0.0, 1.0), (0.25, 0.5), x_count=20)


def test_suite_ids_unique_and_complete():
    assert len(SUITE_IDS) == len(set(SUITE_IDS)) == 25
    for sid in ("open_problem_9_2", "endpoint_order_5_4i", "lower_4_2", "main_3_2"):
        assert sid in SUITE_IDS


def test_unknown_suite():
    with pytest.raises(DomainError):
        run_suite("theorem_99", SMALL)


def test_grid_validation():
    with pytest.raises(DomainError):
        GridSpec((-1.0,), (0.0,), (0.5,))
    with pytest.raises(DomainError):
        GridSpec((0.0,), (0.0,), (1.0,))
    with pytest.raises(DomainError):
        GridSpec((0.0,), (0.0,), (0.5,), density="medium")
    with pytest.raises(DomainError):
        GridSpec.named("huge")
    assert GridSpec.fast().thetas(0.9) == [0.95, 0.97]
    assert GridSpec((0.0,), (0.0,), (0.5,), theta_rule="default").thetas(0.5) == [0.75]


def test_fixture_examples():
    w = weight_fixture("log_factor", q=0.5)
    assert weight_class_check(w, "upper_q", np.geomspace(1e-3, 1e3, 60), q=0.5).passed
    w = weight_fixture("exp_defect", q=1.0, eta=0.2)
    assert not weight_class_check(w, "upper_q", np.geomspace(1e-3, 1e3, 60), q=1.0).passed
    weight_fixture("mixture", terms=[(1, 1), (1, 2)])
    weight_fixture("bounded_factor", q=-0.5)
    weight_fixture("lower_mixture", q=0.0)


def test_fixture_claim_failure():
    with pytest.raises(FixtureError):
        weight_fixture("exp_defect", q=1.0, eta=0.2, claim="upper_q")
    with pytest.raises(DomainError):
        weight_fixture("nonsense")
    with pytest.raises(DomainError):
        weight_fixture("lower_mixture", q=-0.9)


def test_format_scalar():
    assert format_scalar(None) == "null"
    assert format_scalar(float("inf")) == "null"
    assert format_scalar(True) == "true"
    assert format_scalar(np.bool_(False)) == "false"
    assert format_scalar(0.1) == "0.10000000000000001"
    assert format_scalar(3) == "3"
    assert format_scalar('a"b') == '"a\\"b"'


def test_report_format_and_order():
    recs = run_suite("ratio_2_1", SMALL) + run_suite("power_2_2", SMALL)
    text = emit_report(reversed(recs))
    lines = text.splitlines()
    assert len(lines) == len(recs)
    for line in lines:
        d = json.loads(line)
        assert tuple(d) == REPORT_KEYS
        assert d["runtime_ms"] is None
    ids = [json.loads(line)["suite_id"] for line in lines]
    assert ids == sorted(ids)


def test_report_deterministic():
    a = emit_report(run_suite("main_3_2", SMALL))
    b = emit_report(run_suite("main_3_2", SMALL))
    assert a == b


def test_report_timings():
    recs = run_suite("ratio_2_1", SMALL)
    d = json.loads(emit_report(recs, timings=True).splitlines()[0])
    assert isinstance(d["runtime_ms"], int)


def test_empty_report_is_error():
    with pytest.raises(DomainError):
        emit_report([])


def test_failing_record():
    r = VerificationRecord("main_3_2", 3, -0.5, 2.0, False, mu=0.0)
    assert not all_passed([r])
    assert '"passed": false' in emit_report([r])


def test_tolerance_controls_pass():
    # margins of the equality case sit at rounding level, either side of zero
    loose = run_suite("power_2_2", SMALL, tol=1e-9)
    assert all_passed(loose)
    for r in loose:
        assert r.passed == (r.worst_margin >= -1e-9)


def test_open_problem_example():
    recs = run_suite("open_problem_9_2", SMALL)
    assert recs and all(r.worst_margin >= 0 for r in recs)
    nus = {r.mu for r in recs}
    assert {-0.4, 0.0, 1.0, 3.0} <= nus
    # direct arithmetic at nu = 0, gamma = 0.5, theta = 0.75
    assert open_problem_constant(0, 0.5, 0.75) == pytest.approx(max(2 * np.exp(6), 1.75 / 0.375))


def test_endpoint_order_slope_example():
    assert endpoint_order_slope(0.0, 0.0, 0.5, 1.5) == pytest.approx(-0.5, abs=0.05)


def test_lower_suite_includes_untilted():
    recs = run_suite("lower_4_2", SMALL)
    untilted = [r for r in recs if r.gamma == 0.0]
    assert untilted and all(r.worst_margin >= -1e-12 for r in untilted)


@pytest.mark.parametrize("sid", SUITE_IDS)
def test_each_suite_passes_on_small_grid(sid):
    recs = run_suite(sid, SMALL)
    assert recs
    assert all(r.suite_id == sid for r in recs)
    bad = [(r.mu, r.q, r.gamma, r.theta, r.weight, r.worst_margin) for r in recs if not r.passed]
    assert not bad
