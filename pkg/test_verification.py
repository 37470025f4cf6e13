#!/usr/bin/env python3
"""
Tests for the acceptance runner behind verify-all.
"""

import logging

import numpy as np
import pytest

from src.verification import acceptance

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@pytest.mark.parametrize("check", [
    acceptance.check_spectral,
    acceptance.check_k_recursion,
    acceptance.check_derivatives,
    acceptance.check_soundness,
    acceptance.check_regions,
])
def test_fast_checks_pass(check):
    passed, detail = check(np.random.default_rng(0))
    logger.info(detail)
    assert passed, detail


def test_k_recursion_reports_floor_hits():
    passed, detail = acceptance.check_k_recursion(np.random.default_rng(1))
    assert passed, detail
    hits, draws = detail.split(", ")[1].split(" ")[0].split("/")
    assert int(draws) == 200
    assert 0 <= int(hits) <= int(draws)


def test_run_all_reports_failures(monkeypatch):
    def broken(rng):
        raise RuntimeError("boom")

    monkeypatch.setattr(acceptance, 'CHECKS', [
        ("ok", lambda rng: (True, "fine")),
        ("bad", lambda rng: (False, "off by one")),
        ("raises", broken),
    ])
    results = acceptance.run_all(seed=3)
    assert [r.name for r in results] == ["ok", "bad", "raises"]
    assert [r.passed for r in results] == [True, False, False]
    assert "RuntimeError" in results[2].detail
    assert all(r.seconds >= 0 for r in results)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
