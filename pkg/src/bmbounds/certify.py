"""Certification pipeline: per-t case reports, bisection, sweeps, audits.

A probe at rational t builds the four case systems, decides each exactly
and re-verifies every certificate before reporting.  Bisection over a
bracket [lo, hi] relies on the monotonicity of feasibility in t (valid
for affine c-policies) and returns a CertifiedBound whose endpoints carry
machine-checkable certificates: Farkas vectors at t_lo, a witness at
t_hi.  Certificate files are self-contained JSON documents that an
auditor can re-verify by substitution alone.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exactlp import (
    FeasibilityResult,
    LinearSystem,
    SystemError_,
    check_feasibility,
    verify_certificate,
)
from .rationals import RationalFormatError, format_rational, parse_rational
from .systems import (
    ALL_CASES,
    CPolicy,
    DEFAULT_DICHOTOMY_FUNCTIONS,
    DEFAULT_POLICY,
    JCase,
    SystemFormatError,
    Variant,
    build_all_cases,
    build_case_system,
    build_dichotomy_systems,
    parse_system_file,
    serialize_system,
)

TOOL_VERSION = "bmbounds-0.1.0"

EXIT_CERTIFIED = 0
EXIT_NOT_CERTIFIED = 1
EXIT_INPUT_ERROR = 2


class BracketError(ValueError):
    """A bisection bracket precondition failed; the message names the end."""


@dataclass(frozen=True)
class CaseReport:
    """Feasibility verdicts for all four case systems at one probe t."""

    t: Fraction
    c: Fraction
    policy: CPolicy
    variant: Variant
    results: dict[JCase, FeasibilityResult]
    systems: dict[JCase, LinearSystem]

    @property
    def all_infeasible(self) -> bool:
        return all(not r.feasible for r in self.results.values())

    @property
    def feasible_cases(self) -> tuple[JCase, ...]:
        return tuple(c for c in ALL_CASES if self.results[c].feasible)


@dataclass(frozen=True)
class CertifiedBound:
    """A bracket [t_lo, t_hi]: certified infeasible at t_lo, witnessed at t_hi."""

    t_lo: Fraction
    t_hi: Fraction
    report_lo: CaseReport
    report_hi: CaseReport
    trace: tuple[tuple[Fraction, bool], ...]
    policy: CPolicy
    variant: Variant


def certify_at(
    t: Fraction,
    policy: CPolicy = DEFAULT_POLICY,
    variant: Variant = Variant.SYMMETRIZED,
) -> CaseReport:
    """Build and decide all four case systems at t; certificates verified."""
    t = Fraction(t)
    systems = build_all_cases(t, policy, variant)
    results = {}
    for case, system in systems.items():
        result = check_feasibility(system)
        if not verify_certificate(system, result):  # pragma: no cover
            raise AssertionError(f"certificate for case {case.value} failed verification")
        results[case] = result
    return CaseReport(t, policy.c_at(t), policy, variant, results, systems)


def binary_search_bound(
    lo: Fraction,
    hi: Fraction,
    iters: int,
    policy: CPolicy = DEFAULT_POLICY,
    variant: Variant = Variant.SYMMETRIZED,
) -> CertifiedBound:
    """Bisect the feasibility threshold, keeping certificates at both ends.

    Preconditions: lo < hi, all four cases infeasible at lo, and at least
    one feasible at hi.  After ``iters`` bisections, t_hi - t_lo equals
    (hi - lo) / 2**iters exactly.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise BracketError(
            f"inverted bracket: lo = {format_rational(lo)} must be below hi = {format_rational(hi)}"
        )
    report_lo = certify_at(lo, policy, variant)
    if not report_lo.all_infeasible:
        raise BracketError(
            f"bracket end lo = {format_rational(lo)} is not all-infeasible"
            f" (feasible: {', '.join(c.value for c in report_lo.feasible_cases)})"
        )
    report_hi = certify_at(hi, policy, variant)
    if report_hi.all_infeasible:
        raise BracketError(f"bracket end hi = {format_rational(hi)} has no feasible case")
    trace = [(lo, True), (hi, False)]
    for _ in range(iters):
        mid = (lo + hi) / 2
        report_mid = certify_at(mid, policy, variant)
        trace.append((mid, report_mid.all_infeasible))
        if report_mid.all_infeasible:
            lo, report_lo = mid, report_mid
        else:
            hi, report_hi = mid, report_mid
    return CertifiedBound(lo, hi, report_lo, report_hi, tuple(trace), policy, variant)


def sweep_policies(
    policies: Sequence[CPolicy],
    lo: Fraction,
    hi: Fraction,
    iters: int,
    variant: Variant = Variant.SYMMETRIZED,
) -> tuple[list[tuple[CPolicy, CertifiedBound]], list[tuple[CPolicy, str]]]:
    """Independent bisections per policy, ranked by certified t_lo.

    Returns (ranked, skipped): ranked is sorted by t_lo descending with
    ties broken by (p, q, r) lexicographic order; policies whose guards or
    bracket preconditions fail end up in skipped with the reason.
    """
    ranked: list[tuple[CPolicy, CertifiedBound]] = []
    skipped: list[tuple[CPolicy, str]] = []
    for policy in policies:
        try:
            bound = binary_search_bound(lo, hi, iters, policy, variant)
        except (BracketError, ValueError) as exc:
            skipped.append((policy, str(exc)))
            continue
        ranked.append((policy, bound))
    ranked.sort(key=lambda item: (-item[1].t_lo, (item[0].p, item[0].q, item[0].r)))
    return ranked, skipped


# ---------------------------------------------------------------------------
# Dichotomy mode
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchReport:
    branches: str
    results: dict[JCase, FeasibilityResult]
    systems: dict[JCase, LinearSystem]

    @property
    def all_infeasible(self) -> bool:
        return all(not r.feasible for r in self.results.values())


@dataclass(frozen=True)
class DichotomyReport:
    """Feasibility over every branch assignment of the dichotomy split."""

    t: Fraction
    policy: CPolicy
    variant: Variant
    functions: tuple[int, ...]
    assignments: tuple[BranchReport, ...]

    @property
    def certified(self) -> bool:
        return all(a.all_infeasible for a in self.assignments)


def certify_dichotomy(
    t: Fraction,
    policy: CPolicy = DEFAULT_POLICY,
    functions: Sequence[int] = DEFAULT_DICHOTOMY_FUNCTIONS,
    variant: Variant = Variant.SYMMETRIZED,
) -> DichotomyReport:
    """Decide all 2**b branch assignments; certified iff all infeasible."""
    t = Fraction(t)
    assignments = []
    for combo in itertools.product("ab", repeat=len(functions)):
        branches = "".join(combo)
        systems = build_dichotomy_systems(t, policy, combo, functions, variant)
        results = {}
        by_case = {}
        for case, system in zip(ALL_CASES, systems):
            result = check_feasibility(system)
            if not verify_certificate(system, result):  # pragma: no cover
                raise AssertionError("dichotomy certificate failed verification")
            results[case] = result
            by_case[case] = system
        assignments.append(BranchReport(branches, results, by_case))
    return DichotomyReport(t, policy, variant, tuple(functions), tuple(assignments))


# ---------------------------------------------------------------------------
# Certificate files
# ---------------------------------------------------------------------------

def _result_json(result: FeasibilityResult) -> dict:
    doc: dict = {"status": result.status}
    if result.witness is not None:
        doc["witness"] = {v: format_rational(x) for v, x in result.witness.items()}
    if result.farkas is not None:
        doc["farkas"] = [format_rational(x) for x in result.farkas]
    return doc


def _case_entries(report: CaseReport) -> list[dict]:
    entries = []
    for case in ALL_CASES:
        entries.append(
            {
                "case": case.value,
                **_result_json(report.results[case]),
                "system": json.loads(serialize_system(report.systems[case])),
            }
        )
    return entries


def _report_json(report: CaseReport) -> dict:
    return {
        "t": format_rational(report.t),
        "c": format_rational(report.c),
        "cases": _case_entries(report),
    }


def certify_report_doc(report: CaseReport) -> dict:
    return {
        "tool_version": TOOL_VERSION,
        "kind": "certify",
        "variant": report.variant.value,
        "policy": report.policy.key(),
        **_report_json(report),
        "certified": report.all_infeasible,
    }


def search_report_doc(bound: CertifiedBound) -> dict:
    return {
        "tool_version": TOOL_VERSION,
        "kind": "search",
        "variant": bound.variant.value,
        "policy": bound.policy.key(),
        "t_lo": format_rational(bound.t_lo),
        "t_hi": format_rational(bound.t_hi),
        "trace": [
            {"t": format_rational(t), "all_infeasible": ok} for t, ok in bound.trace
        ],
        "lower_report": _report_json(bound.report_lo),
        "upper_report": _report_json(bound.report_hi),
    }


def dichotomy_report_doc(report: DichotomyReport) -> dict:
    return {
        "tool_version": TOOL_VERSION,
        "kind": "dichotomy",
        "variant": report.variant.value,
        "policy": report.policy.key(),
        "t": format_rational(report.t),
        "functions": list(report.functions),
        "certified": report.certified,
        "assignments": [
            {
                "branches": a.branches,
                "cases": [
                    {
                        "case": case.value,
                        **_result_json(a.results[case]),
                        "system": json.loads(serialize_system(a.systems[case])),
                    }
                    for case in ALL_CASES
                ],
            }
            for a in report.assignments
        ],
    }


def _verify_case_entry(entry: dict, *, rebuild: Optional[dict] = None) -> bool:
    """Re-verify a single case entry by substitution against its echoed system.

    ``rebuild``: optional context (t/policy/variant strings) to re-derive
    the system from the builders and compare with the echo, guarding
    against metadata tampering.  No solver is invoked either way.
    """
    system = parse_system_file(json.dumps(entry["system"]))
    status = entry["status"]
    if status == "feasible":
        witness = {v: parse_rational(s) for v, s in entry["witness"].items()}
        result = FeasibilityResult("feasible", witness=witness)
    elif status == "infeasible":
        farkas = tuple(parse_rational(s) for s in entry["farkas"])
        result = FeasibilityResult("infeasible", farkas=farkas)
    else:
        raise SystemFormatError(f"unknown status {status!r}")
    if not verify_certificate(system, result):
        return False
    if rebuild is not None:
        expected = build_case_system(
            JCase(entry["case"]),
            parse_rational(rebuild["t"]),
            rebuild["policy"],
            rebuild["variant"],
        )
        if rebuild.get("branches"):
            expected_list = build_dichotomy_systems(
                parse_rational(rebuild["t"]),
                rebuild["policy"],
                tuple(rebuild["branches"]),
                rebuild["functions"],
                rebuild["variant"],
            )
            expected = expected_list[list(ALL_CASES).index(JCase(entry["case"]))]
        if serialize_system(expected) != serialize_system(system):
            return False
    return True


def verify_certificate_text(text: str) -> tuple[int, str]:
    """Audit a certificate document; returns (exit code, message).

    0: every embedded certificate re-verifies; 1: some certificate is
    invalid; 2: the document cannot be parsed.
    """
    try:
        doc = json.loads(text)
        kind = doc["kind"]
        variant = Variant(doc["variant"])
        p, q, r = (int(x) for x in doc["policy"].split(","))
        policy = CPolicy(p, q, r)
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        return EXIT_INPUT_ERROR, f"unreadable certificate: {exc}"

    def check_report(rep: dict, expect_all_infeasible: Optional[bool]) -> tuple[bool, str]:
        ctx = {"t": rep["t"], "policy": policy, "variant": variant, "branches": None}
        statuses = []
        for entry in rep["cases"]:
            if not _verify_case_entry(entry, rebuild=ctx):
                return False, f"case {entry.get('case')} at t={rep['t']} failed re-verification"
            statuses.append(entry["status"])
        if expect_all_infeasible is True and any(s != "infeasible" for s in statuses):
            return False, f"report at t={rep['t']} is not all-infeasible"
        if expect_all_infeasible is False and all(s == "infeasible" for s in statuses):
            return False, f"report at t={rep['t']} has no feasible case"
        return True, "ok"

    try:
        if kind == "certify":
            ok, msg = check_report(doc, None)
            if ok and bool(doc.get("certified")) != all(
                e["status"] == "infeasible" for e in doc["cases"]
            ):
                ok, msg = False, "certified flag contradicts case statuses"
        elif kind == "search":
            ok, msg = check_report(doc["lower_report"], True)
            if ok:
                ok, msg = check_report(doc["upper_report"], False)
        elif kind == "dichotomy":
            ok, msg = True, "ok"
            for assignment in doc["assignments"]:
                ctx = {
                    "t": doc["t"],
                    "policy": policy,
                    "variant": variant,
                    "branches": assignment["branches"],
                    "functions": tuple(int(x) for x in doc["functions"]),
                }
                for entry in assignment["cases"]:
                    if not _verify_case_entry(entry, rebuild=ctx):
                        ok, msg = False, (
                            f"branches {assignment['branches']} case {entry.get('case')}"
                            " failed re-verification"
                        )
                        break
                if not ok:
                    break
        else:
            return EXIT_INPUT_ERROR, f"unknown certificate kind {kind!r}"
    except (KeyError, TypeError, RationalFormatError, SystemFormatError, SystemError_) as exc:
        return EXIT_INPUT_ERROR, f"malformed certificate: {exc}"

    if not ok:
        return EXIT_NOT_CERTIFIED, msg
    return EXIT_CERTIFIED, "all certificates verified"


def verify_cert_file(path: str) -> tuple[int, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return EXIT_INPUT_ERROR, f"cannot read {path}: {exc}"
    return verify_certificate_text(text)
