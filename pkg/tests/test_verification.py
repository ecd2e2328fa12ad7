"""Tests for the theory verification runner and its report renderer."""
import json
import sys
from pathlib import Path

import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from src.core.errors import VerificationError
from src.sim import verification
from src.sim.report import render_verification
from src.sim.verification import Check, Level, VerificationReport, verify_theory


def _always_fails(level, seed):
    return [Check("deliberately failing", False, 1.0, 0.0, 0.0)]


def test_exact_checks_pass():
    checks = (verification._check_constants(Level.FAST, 0)
              + verification._check_identities(Level.FAST, 0)
              + verification._check_key_identity(Level.FAST, 0))
    assert checks
    for check in checks:
        assert check.passed, check
    print("✓ Constants, telescoping and rank-gap identity checks pass")


def test_runner_collects_every_check(monkeypatch):
    monkeypatch.setattr(verification, "CHECKS",
                        [verification._check_constants, verification._check_identities])
    report = verify_theory(Level.FAST, seed=3)
    assert report.passed
    assert report.failures == []
    assert len(report.checks) == 4
    assert report.level is Level.FAST and report.seed == 3
    assert report.elapsed >= 0.0
    print("✓ Runner gathers results from each check")


def test_strict_mode_raises_on_failure(monkeypatch):
    monkeypatch.setattr(verification, "CHECKS",
                        [verification._check_constants, _always_fails])
    report = verify_theory(Level.FAST, seed=0)
    assert not report.passed
    assert [c.name for c in report.failures] == ["deliberately failing"]
    with pytest.raises(VerificationError) as excinfo:
        verify_theory(Level.FAST, seed=0, strict=True)
    assert "deliberately failing" in str(excinfo.value)
    assert len(excinfo.value.failures) == 1
    print("✓ Strict mode raises VerificationError naming the failed check")


def test_render_formats():
    report = VerificationReport(Level.FULL, 11, [
        Check("first", True, 0.5, 0.5, 1e-9),
        Check("second", False, 2.0, 0.0, 0.0, "3 cases"),
    ])
    payload = json.loads(render_verification(report, "json"))
    assert payload["level"] == "full"
    assert payload["seed"] == 11
    assert payload["passed"] is False
    assert [c["check"] for c in payload["checks"]] == ["first", "second"]

    csv = render_verification(report, "csv")
    assert csv.splitlines()[0] == "check,passed,observed,expected,tolerance,detail"

    text = render_verification(report, "text")
    assert "✓ first" in text
    assert "❌ second" in text
    assert "1 check(s) failed" in text
    print("✓ Verification report renders as json, csv and text")
