#!/usr/bin/env python3
"""
Tests for H_{p_m}, its derivatives, the condition matrix, the K recursion and the theta search.
"""

import itertools
import logging

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import comb

from src.lyapunov import (
    LyapunovConfig,
    build_condition_matrix,
    check_condition,
    coupling_ratios,
    eval_H,
    exponent_tuples,
    factored_seed_forms,
    format_certificate,
    grad_H,
    h_from_minors,
    hess_H,
    k_recursion,
    make_certificate,
    make_config,
    theta_search,
    write_certificate,
)
from src.lyapunov.functional import binomial_table
from src.spectral import ToeplitzSystem, decompose
from src.utils.errors import ConditionNotSatisfied, InvalidInputError, PreconditionError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def cofactor_det(M) -> float:
    """Laplace expansion along the first row."""
    n = len(M)
    if n == 1:
        return float(M[0][0])
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        total += (-1) ** j * M[0][j] * cofactor_det(minor)
    return total


def leading_minors(M):
    rows = np.asarray(M).tolist()
    return [cofactor_det([r[:k] for r in rows[:k]]) for k in range(1, len(rows) + 1)]


def hadamard_bounds(M):
    """|det[k]| <= product of the row norms of the leading k x k block."""
    M = np.asarray(M)
    return [float(np.prod(np.linalg.norm(M[:k, :k], axis=1))) for k in range(1, len(M) + 1)]


def k_scale(bounds, ell):
    return bounds[ell - 1] * np.prod([bounds[k - 1] ** (2 ** (ell - k - 2)) for k in range(1, ell - 1)])


@pytest.fixture
def sys2():
    return ToeplitzSystem(m=2, a=3.0, b=1.0)


@pytest.fixture
def dec2(sys2):
    return decompose(sys2)


def test_binomial_table():
    table = binomial_table(12)
    for q in range(13):
        np.testing.assert_allclose(table[q, :q + 1], comb(q, np.arange(q + 1), exact=False), rtol=1e-14)
        assert not table[q, q + 1:].any()


def test_hand_expanded_polynomial():
    cfg = make_config(2, [2.0])
    W = np.array([1.0, 1.0])
    assert eval_H(cfg, W) == pytest.approx(21.0)
    np.testing.assert_allclose(grad_H(cfg, W), [36.0, 6.0])
    np.testing.assert_allclose(hess_H(cfg, W), [[32.0, 4.0], [4.0, 2.0]])


@pytest.mark.parametrize("m,p_m", [(2, 2), (3, 4), (4, 3), (5, 6)])
def test_theta_one_collapse(m, p_m):
    cfg = make_config(p_m, np.ones(m - 1))
    W = np.random.default_rng(m * 10 + p_m).uniform(0.0, 2.0, size=(m, 25))
    s = W.sum(axis=0)
    np.testing.assert_allclose(eval_H(cfg, W), s ** p_m, rtol=1e-10)
    np.testing.assert_allclose(grad_H(cfg, W), np.broadcast_to(p_m * s ** (p_m - 1), (m, 25)), rtol=1e-10)
    np.testing.assert_allclose(
        hess_H(cfg, W), np.broadcast_to(p_m * (p_m - 1) * s ** (p_m - 2), (m, m, 25)), rtol=1e-10
    )


@pytest.mark.parametrize("m,p_m", [(2, 3), (3, 2), (3, 5), (4, 4)])
def test_derivatives_match_finite_differences(m, p_m):
    rng = np.random.default_rng(m + 7 * p_m)
    cfg = make_config(p_m, rng.uniform(1.0, 1.5, size=m - 1))
    W = rng.uniform(0.1, 3.0, size=(m, 20))
    step = 1e-5
    grad, hess = grad_H(cfg, W), hess_H(cfg, W)
    for ell in range(m):
        e = np.zeros((m, 1))
        e[ell] = step
        fd = (eval_H(cfg, W + e) - eval_H(cfg, W - e)) / (2 * step)
        np.testing.assert_allclose(fd, grad[ell], rtol=1e-6)
        fd_h = (grad_H(cfg, W + e) - grad_H(cfg, W - e)) / (2 * step)
        np.testing.assert_allclose(fd_h, hess[:, ell], rtol=1e-5)
    np.testing.assert_allclose(hess, np.swapaxes(hess, 0, 1))


def test_zero_and_negative_points():
    cfg = make_config(3, [1.3, 2.0])
    assert eval_H(cfg, np.zeros(3)) == 0.0
    with pytest.raises(InvalidInputError):
        eval_H(cfg, [1.0, -0.5, 1.0])
    with pytest.raises(InvalidInputError):
        eval_H(cfg, [1.0, 1.0])


def test_config_validation():
    with pytest.raises(ValidationError):
        LyapunovConfig(p_m=1, thetas=(1.0,))
    with pytest.raises(ValidationError):
        LyapunovConfig(p_m=2, thetas=(1.0, 0.0))
    assert make_config(2, [1.1, 1.2]).m == 3


def test_condition_matrix_example(dec2):
    mat = build_condition_matrix(dec2, make_config(2, [1.1]), (0,))
    np.testing.assert_allclose(mat.entries, [[2 * 1.1 ** 4, 3.3], [3.3, 4.0]])
    assert mat.entries[0, 0] == pytest.approx(2.9282)


def test_condition_matrix_theta_one_and_symmetry():
    dec = decompose(ToeplitzSystem(m=4, a=3.0, b=1.0))
    lam = dec.lambdas_bar
    mat = build_condition_matrix(dec, make_config(3, np.ones(3)), (0, 1, 1))
    np.testing.assert_allclose(mat.entries, 0.5 * (lam[:, None] + lam[None, :]))

    mat = build_condition_matrix(dec, make_config(4, [1.2, 1.1, 1.4]), (0, 1, 2))
    np.testing.assert_array_equal(mat.entries, mat.entries.T)
    assert np.all(np.diag(mat.entries) > 0)


def test_condition_matrix_rejects_bad_tuples(dec2):
    cfg = make_config(2, [1.1])
    with pytest.raises(InvalidInputError):
        build_condition_matrix(dec2, cfg, (1,))
    with pytest.raises(InvalidInputError):
        build_condition_matrix(decompose(ToeplitzSystem(m=3, a=2.0, b=0.5)), make_config(4, [1.1, 1.1]), (2, 1))


def test_coupling_ratios_at_least_one():
    A = coupling_ratios(decompose(ToeplitzSystem(m=5, a=2.0, b=0.5)).lambdas_bar)
    np.testing.assert_allclose(np.diag(A), 1.0)
    off = A[~np.eye(5, dtype=bool)]
    assert np.all(off > 1.0)


def test_exponent_tuples_lexicographic():
    assert list(exponent_tuples(3, 3)) == [(0, 0), (0, 1), (1, 1)]
    assert list(exponent_tuples(2, 4)) == [(0,), (1,), (2,)]


def test_k_recursion_small_cases():
    M = np.array([[2.0, 1.0], [1.0, 3.0]])
    rec = k_recursion(M)
    assert rec.K_diag[0] == pytest.approx(np.linalg.det(M))
    assert np.all(k_recursion(np.eye(5)).K_diag > 0)


def _random_matrix(rng, m):
    dec = decompose(ToeplitzSystem(m=m, a=float(rng.uniform(2.0, 4.0)), b=float(rng.uniform(0.1, 0.8))))
    p_m = int(rng.integers(2, 4))
    cfg = make_config(p_m, rng.uniform(1.0, 1.3, size=m - 1))
    tuples = list(exponent_tuples(m, p_m))
    tup = tuples[int(rng.integers(len(tuples)))]
    return dec, cfg, tup, build_condition_matrix(dec, cfg, tup)


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_k_recursion_matches_minor_identity(m):
    rng = np.random.default_rng(100 + m)
    for _ in range(10):
        M = _random_matrix(rng, m)[3].entries
        M = M / np.max(M)
        rec = k_recursion(M)
        minors = leading_minors(M)
        bounds = hadamard_bounds(M)
        np.testing.assert_allclose(rec.minors, minors, rtol=1e-9, atol=1e-12)
        for ell in range(2, m + 1):
            expected = minors[ell - 1] * np.prod([minors[k - 1] ** (2 ** (ell - k - 2)) for k in range(1, ell - 1)])
            scale = k_scale(bounds, ell)
            assert rec.K_diag[ell - 2] == pytest.approx(expected, rel=1e-8, abs=1e-12 * scale)
            if all(d > 0 for d in minors[:ell - 1]) and abs(minors[ell - 1]) > 1e-8 * bounds[ell - 1]:
                assert np.sign(rec.K_diag[ell - 2]) == np.sign(minors[ell - 1])


@pytest.mark.parametrize("m", [3, 5])
def test_h_table_matches_determinant_definition(m):
    rng = np.random.default_rng(200 + m)
    M = _random_matrix(rng, m)[3].entries
    M = M / np.max(M)
    rec = k_recursion(M)
    bounds = hadamard_bounds(M)
    for (ell, r), value in rec.H_table.items():
        scale = k_scale(bounds, r) * np.max(np.abs(M))
        assert value == pytest.approx(h_from_minors(M, ell, r), rel=1e-8, abs=1e-12 * scale)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_factored_seeds_match_general_seeds(m):
    rng = np.random.default_rng(300 + m)
    dec, cfg, tup, mat = _random_matrix(rng, m)
    rec = k_recursion(mat)
    K2, H2 = factored_seed_forms(dec, cfg, tup)
    M = mat.entries
    atol = 1e-12 * np.max(np.abs(np.outer(M[0], M.max(axis=0))))
    np.testing.assert_allclose(K2, [rec.K_table[(ell, 2)] for ell in range(2, m + 1)], rtol=1e-9, atol=atol)
    np.testing.assert_allclose(H2, [rec.H_table[(ell, 2)] for ell in range(3, m + 1)], rtol=1e-9, atol=atol)


def test_check_condition_m2_threshold(dec2):
    assert check_condition(dec2, make_config(2, [1.1]))
    report = check_condition(dec2, make_config(2, [1.0]))
    assert not report
    assert report.failing_tuple == (0,)
    assert report.failing_l == 2


@pytest.mark.parametrize("theta", [3.0, 30.0, 1000.0])
def test_check_condition_large_theta(theta):
    dec = decompose(ToeplitzSystem(m=5, a=2.0, b=0.5))
    cfg = make_config(6, [theta] * 4)
    for tup in exponent_tuples(5, 6):
        M = build_condition_matrix(dec, cfg, tup).entries
        if np.all(np.isfinite(M)):
            d = 1.0 / np.sqrt(np.diag(M))
            assert np.linalg.eigvalsh(M * d[:, None] * d[None, :])[0] > 0
    report = check_condition(dec, cfg)
    assert report
    assert all(np.isfinite(margin) and margin > 1e-3 for _, margin, _ in report.margins)


def test_check_condition_requires_parabolicity():
    dec = decompose(ToeplitzSystem(m=9, a=1.0, b=1.0))
    with pytest.raises(PreconditionError) as excinfo:
        check_condition(dec, make_config(2, np.full(8, 2.0)))
    assert excinfo.value.reason == "parabolicity failed"


def test_theta_search_m2(dec2):
    cfg = theta_search(dec2, 2)
    assert cfg.thetas[0] == pytest.approx(1.05 ** 2)
    assert cfg.thetas[0] > coupling_ratios(dec2.lambdas_bar)[0, 1]


@pytest.mark.parametrize("m,p_m", [(3, 3), (4, 2), (5, 4)])
def test_theta_search_certificates_are_positive_definite(m, p_m):
    dec = decompose(ToeplitzSystem(m=m, a=2.0, b=0.5))
    cfg = theta_search(dec, p_m)
    for tup in itertools.combinations_with_replacement(range(p_m - 1), m - 1):
        M = build_condition_matrix(dec, cfg, tup).entries
        d = 1.0 / np.sqrt(np.diag(M))
        assert np.linalg.eigvalsh(M * d[:, None] * d[None, :])[0] > 0


def test_theta_search_budget(dec2):
    with pytest.raises(ConditionNotSatisfied) as excinfo:
        theta_search(dec2, 2, budget=1)
    assert excinfo.value.best_thetas == (1.0,)
    assert excinfo.value.tightest_margin < 0
    with pytest.raises(InvalidInputError):
        theta_search(dec2, 1)


def test_certificate_text(tmp_path, sys2, dec2):
    cert = make_certificate(sys2, dec2, theta_search(dec2, 3))
    text = format_certificate(cert)
    assert "m = 2" in text
    assert "p_m = 3" in text
    assert "theta = 1.1025" in text
    assert len(cert.margins) == 2
    path = write_certificate(cert, str(tmp_path / "cert.txt"))
    assert (tmp_path / "cert.txt").read_text() == text
    assert path.endswith("cert.txt")

    with pytest.raises(ConditionNotSatisfied):
        make_certificate(sys2, dec2, make_config(2, [1.0]))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
