import json
import random
from fractions import Fraction

import pytest

from bmbounds.certify import (
    EXIT_CERTIFIED,
    EXIT_INPUT_ERROR,
    EXIT_NOT_CERTIFIED,
    BracketError,
    binary_search_bound,
    certify_at,
    certify_dichotomy,
    certify_report_doc,
    dichotomy_report_doc,
    search_report_doc,
    sweep_policies,
    verify_certificate_text,
)
from bmbounds.exactlp import check_feasibility, verify_certificate
from bmbounds.systems import (
    ALL_CASES,
    CPolicy,
    DEFAULT_POLICY,
    JCase,
    Variant,
    build_case_system,
)

F = Fraction

POLICIES = [CPolicy(1, 0, 2), CPolicy(1, 1, 2), CPolicy(2, 1, 4)]


class TestCertifyAt:
    def test_all_infeasible_at_3(self):
        report = certify_at(F(3))
        assert report.all_infeasible
        for case in ALL_CASES:
            assert report.results[case].farkas is not None

    def test_feasible_at_5(self):
        report = certify_at(F(5))
        assert not report.all_infeasible
        assert len(report.feasible_cases) >= 1

    @pytest.mark.parametrize("variant", [Variant.PRINTED, Variant.SYMMETRIZED])
    def test_all_infeasible_at_113_32(self, variant):
        report = certify_at(F(113, 32), DEFAULT_POLICY, variant)
        assert report.all_infeasible

    def test_certificates_verify(self):
        report = certify_at(F(113, 32))
        for case in ALL_CASES:
            assert verify_certificate(report.systems[case], report.results[case])

    def test_guard_propagates(self):
        from bmbounds.systems import DomainError

        with pytest.raises(DomainError):
            certify_at(F(1))


class TestBinarySearch:
    def test_reproduces_113_32(self):
        bound = binary_search_bound(F(3), F(5), 6)
        assert bound.t_lo == F(113, 32)
        assert bound.t_hi == F(57, 16)
        assert float(bound.t_lo) == 3.53125

    def test_probe_sequence(self):
        bound = binary_search_bound(F(3), F(5), 6)
        probes = [(t, ok) for t, ok in bound.trace[2:]]  # skip endpoint entries
        assert probes == [
            (F(4), False),
            (F(7, 2), True),
            (F(15, 4), False),
            (F(29, 8), False),
            (F(57, 16), False),
            (F(113, 32), True),
        ]

    def test_zero_iters_keeps_bracket(self):
        bound = binary_search_bound(F(3), F(5), 0)
        assert (bound.t_lo, bound.t_hi) == (F(3), F(5))

    def test_both_variants_reach_113_32(self):
        """The headline bound reproduces under either reading of the 8d row."""
        for variant in (Variant.PRINTED, Variant.SYMMETRIZED):
            bound = binary_search_bound(F(3), F(5), 6, DEFAULT_POLICY, variant)
            assert bound.t_lo == F(113, 32), variant

    def test_inverted_bracket(self):
        with pytest.raises(BracketError, match="inverted"):
            binary_search_bound(F(5), F(3), 4)

    def test_lo_not_certified_reports_end(self):
        with pytest.raises(BracketError, match="lo = 4"):
            binary_search_bound(F(4), F(5), 2)

    def test_hi_without_feasible_case_reports_end(self):
        with pytest.raises(BracketError, match="hi = 27/8"):
            binary_search_bound(F(3), F(27, 8), 2)

    @pytest.mark.parametrize("iters", [1, 2, 3, 5, 8])
    def test_bisection_width_exact(self, iters):
        bound = binary_search_bound(F(3), F(5), iters)
        assert bound.t_hi - bound.t_lo == F(2) / 2**iters

    def test_endpoint_reports_consistent(self):
        bound = binary_search_bound(F(3), F(5), 4)
        assert bound.report_lo.all_infeasible
        assert not bound.report_hi.all_infeasible


class TestSweep:
    def test_best_policy_is_2_1_4(self):
        ranked, skipped = sweep_policies(POLICIES, F(3), F(5), 8)
        assert not skipped
        assert ranked[0][0] == CPolicy(2, 1, 4)
        best = ranked[0][1].t_lo
        assert all(best > bound.t_lo for _, bound in ranked[1:])

    def test_singleton_default_policy(self):
        ranked, _ = sweep_policies([CPolicy(2, 1, 4)], F(3), F(5), 6)
        assert ranked[0][1].t_lo == F(113, 32)

    def test_other_policies_strictly_below(self):
        ranked, _ = sweep_policies(POLICIES, F(3), F(5), 6)
        by_policy = {pol: bound.t_lo for pol, bound in ranked}
        assert by_policy[CPolicy(1, 0, 2)] < F(113, 32)
        assert by_policy[CPolicy(1, 1, 2)] < F(113, 32)

    def test_invalid_policy_skipped(self):
        # c(t) = 3t violates c <= t everywhere
        ranked, skipped = sweep_policies([CPolicy(3, 0, 1), CPolicy(2, 1, 4)], F(3), F(5), 4)
        assert len(ranked) == 1 and ranked[0][0] == CPolicy(2, 1, 4)
        assert len(skipped) == 1 and skipped[0][0] == CPolicy(3, 0, 1)


def test_monotonicity_100_random_pairs():
    """Per case: feasible at t0 implies feasible at t1 > t0 (default policy)."""
    rng = random.Random(424242)
    pairs = []
    while len(pairs) < 100:
        t0 = F(3) + F(rng.randint(1, 1999), 1000)
        t1 = F(3) + F(rng.randint(1, 1999), 1000)
        if t0 == t1:
            continue
        pairs.append((min(t0, t1), max(t0, t1)))
    for t0, t1 in pairs:
        for case in ALL_CASES:
            f0 = check_feasibility(build_case_system(case, t0, DEFAULT_POLICY)).feasible
            if not f0:
                continue
            f1 = check_feasibility(build_case_system(case, t1, DEFAULT_POLICY)).feasible
            assert f1, f"monotonicity violated for {case} at {t0} -> {t1}"


class TestDichotomy:
    def test_certified_at_113_32(self):
        report = certify_dichotomy(F(113, 32))
        assert report.certified
        assert len(report.assignments) == 8

    def test_not_certified_at_5(self):
        assert not certify_dichotomy(F(5)).certified

    def test_not_certified_at_18_5(self):
        report = certify_dichotomy(F(18, 5))
        assert not report.certified
        # every verdict still carries a verifying certificate
        for assignment in report.assignments:
            for case in ALL_CASES:
                assert verify_certificate(
                    assignment.systems[case], assignment.results[case]
                )

    def test_improves_on_base_threshold(self):
        # base certification fails between the base and dichotomy thresholds
        t = F(3540, 1000)
        assert not certify_at(t).all_infeasible
        assert certify_dichotomy(t).certified

    def test_empty_config_degenerates(self):
        report = certify_dichotomy(F(113, 32), functions=())
        assert len(report.assignments) == 1
        base = certify_at(F(113, 32))
        only = report.assignments[0]
        assert only.branches == ""
        for case in ALL_CASES:
            assert only.systems[case].inequalities == base.systems[case].inequalities


class TestCertificateFiles:
    def test_certify_doc_verifies(self):
        doc = certify_report_doc(certify_at(F(113, 32)))
        code, msg = verify_certificate_text(json.dumps(doc))
        assert code == EXIT_CERTIFIED, msg

    def test_search_doc_verifies(self):
        doc = search_report_doc(binary_search_bound(F(3), F(5), 6))
        code, msg = verify_certificate_text(json.dumps(doc))
        assert code == EXIT_CERTIFIED, msg

    def test_dichotomy_doc_verifies(self):
        doc = dichotomy_report_doc(certify_dichotomy(F(18, 5)))
        code, msg = verify_certificate_text(json.dumps(doc))
        assert code == EXIT_CERTIFIED, msg

    def test_tampered_multiplier_detected(self):
        doc = certify_report_doc(certify_at(F(113, 32)))
        text = json.dumps(doc)
        entry = doc["cases"][0]
        original = entry["farkas"][0]
        entry["farkas"][0] = "9999/7"
        code, msg = verify_certificate_text(json.dumps(doc))
        assert code == EXIT_NOT_CERTIFIED
        entry["farkas"][0] = original
        assert verify_certificate_text(text)[0] == EXIT_CERTIFIED

    def test_tampered_t_detected(self):
        doc = certify_report_doc(certify_at(F(113, 32)))
        doc["t"] = "115/32"
        code, _ = verify_certificate_text(json.dumps(doc))
        assert code in (EXIT_NOT_CERTIFIED, EXIT_INPUT_ERROR)

    def test_truncated_file_is_input_error(self):
        doc = certify_report_doc(certify_at(F(113, 32)))
        text = json.dumps(doc)
        code, _ = verify_certificate_text(text[: len(text) // 2])
        assert code == EXIT_INPUT_ERROR

    def test_search_audit_is_offline(self, monkeypatch):
        """Re-verification never calls the solver."""
        doc = search_report_doc(binary_search_bound(F(3), F(5), 4))
        import bmbounds.certify as certify_mod

        def boom(*args, **kwargs):  # pragma: no cover
            raise AssertionError("solver must not run during audit")

        monkeypatch.setattr(certify_mod, "check_feasibility", boom)
        code, msg = verify_certificate_text(json.dumps(doc))
        assert code == EXIT_CERTIFIED, msg
