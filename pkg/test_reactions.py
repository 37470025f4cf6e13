#!/usr/bin/env python3
"""
Tests for polynomial reaction terms, their pullback and the assumption samplers.
"""

import logging

import numpy as np
import pytest

from src.reactions import (
    ReactionSpec,
    builtin_family,
    check_A1,
    check_A2,
    check_A3,
    dump_reaction_file,
    evaluate,
    load_reaction_file,
    pullback_to_u,
    zero_reaction,
)
from src.spectral import ToeplitzSystem, decompose
from src.utils.errors import InvalidInputError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def test_builtin_family_values():
    spec = builtin_family(2, 1)
    np.testing.assert_allclose(evaluate(spec, [2.0, 3.0]), [-6.0, 6.0])
    assert spec.growth_degree == 2

    spec = builtin_family(3, 2)
    W = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(evaluate(spec, W), [-9.0, -18.0, 27.0])
    assert spec.max_degree == 3


def test_builtin_family_rejects_bad_parameters():
    with pytest.raises(InvalidInputError):
        builtin_family(1, 1)
    with pytest.raises(InvalidInputError):
        builtin_family(3, 0)


def test_evaluate_is_nodewise():
    spec = builtin_family(3, 1)
    W = np.random.default_rng(0).uniform(0, 4, size=(3, 12))
    F = evaluate(spec, W)
    for j in range(12):
        np.testing.assert_allclose(F[:, j], evaluate(spec, W[:, j]))


@pytest.mark.parametrize("m", [2, 4, 6])
@pytest.mark.parametrize("q", [1, 3])
def test_builtin_is_quasipositive(m, q):
    assert check_A1(builtin_family(m, q), n_samples=2000)


def test_quasipositivity_violation():
    spec = ReactionSpec.from_monomials(2, [(1, -1.0, (0, 0))])
    report = check_A1(spec, n_samples=100)
    assert not report
    assert report.worst_margin == pytest.approx(-1.0)
    assert check_A1(zero_reaction(3), n_samples=100)


def test_polynomial_growth():
    spec = builtin_family(3, 2)
    assert check_A2(spec, n_samples=2000)
    assert not check_A2(spec, C1=1e-6, n_samples=2000)


def test_balance_condition():
    assert check_A3(builtin_family(3, 1), D=[2.0, 2.0], C2=1.0, n_samples=2000)
    report = check_A3(builtin_family(2, 1), D=[0.5], C2=1.0, n_samples=2000)
    assert not report
    assert report.worst_margin < 0
    assert check_A3(zero_reaction(2), D=[0.7], C2=0.0, n_samples=100)
    with pytest.raises(InvalidInputError):
        check_A3(builtin_family(2, 1), D=[0.0], C2=1.0)


def test_sampler_is_reproducible():
    a = check_A3(builtin_family(2, 1), D=[0.5], C2=1.0, n_samples=500, seed=11)
    b = check_A3(builtin_family(2, 1), D=[0.5], C2=1.0, n_samples=500, seed=11)
    assert a.worst_margin == b.worst_margin
    np.testing.assert_array_equal(a.worst_point, b.worst_point)


def test_pullback_hand_value():
    dec = decompose(ToeplitzSystem(m=2, a=3.0, b=1.0))
    f = pullback_to_u(builtin_family(2, 1), dec)
    np.testing.assert_allclose(f([2.0, 1.0]), [0.0, 1.5 * np.sqrt(3.0)], atol=1e-12)


def test_pullback_roundtrip():
    dec = decompose(ToeplitzSystem(m=4, a=3.0, b=1.0))
    spec = builtin_family(4, 2)
    f = pullback_to_u(spec, dec)
    U = np.random.default_rng(2).uniform(0, 1, size=(4, 1000))
    np.testing.assert_allclose(dec.V @ f(U), evaluate(spec, dec.V @ U), atol=1e-10)
    np.testing.assert_array_equal(pullback_to_u(zero_reaction(4), dec)(U), 0.0)
    with pytest.raises(InvalidInputError):
        pullback_to_u(builtin_family(3, 1), dec)


def test_reaction_file_roundtrip(tmp_path):
    spec = builtin_family(3, 2)
    path = dump_reaction_file(spec, str(tmp_path / "reaction.txt"))
    loaded = load_reaction_file(path, 3)
    assert loaded.terms == spec.terms
    assert loaded.growth_degree == 3


def test_reaction_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("# comment\n1 1.0 2\n")
    with pytest.raises(InvalidInputError):
        load_reaction_file(str(bad), 2)
    bad.write_text("3 1.0 1 1\n")
    with pytest.raises(InvalidInputError):
        load_reaction_file(str(bad), 2)
    with pytest.raises(InvalidInputError):
        load_reaction_file(str(tmp_path / "missing.txt"), 2)


def test_spec_invariants():
    with pytest.raises(InvalidInputError):
        ReactionSpec(m=2, terms=(((1.0, (1, -1)),), ()), growth_degree=2)
    with pytest.raises(InvalidInputError):
        ReactionSpec(m=2, terms=(((1.0, (2, 1)),), ()), growth_degree=2)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
