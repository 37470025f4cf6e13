#!/usr/bin/env python3
"""
Tests for invariant-region enumeration, membership and boundary compatibility.
"""

import logging

import numpy as np
import pytest

from src.regions import (
    RegionSpec,
    accepting_regions,
    boundary_compat,
    enumerate_regions,
    membership,
    signed_transform,
)
from src.spectral import ToeplitzSystem, decompose
from src.utils.errors import InvalidInputError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SQRT3_2 = np.sqrt(3.0) / 2.0


@pytest.fixture
def dec2():
    return decompose(ToeplitzSystem(m=2, a=3.0, b=1.0))


def test_enumeration_order_m2():
    regions = enumerate_regions(2)
    assert [(set(r.L), set(r.Z)) for r in regions] == [
        ({1, 2}, set()),
        ({1}, {2}),
        ({2}, {1}),
        (set(), {1, 2}),
    ]


@pytest.mark.parametrize("m", [2, 3, 6, 10])
def test_enumeration_is_complete(m):
    regions = enumerate_regions(m)
    assert len(regions) == 2 ** m
    assert len({(r.L, r.Z) for r in regions}) == 2 ** m
    for r in regions:
        assert r.L | r.Z == frozenset(range(1, m + 1))
        assert not r.L & r.Z


def test_enumeration_rejects_small_m():
    with pytest.raises(InvalidInputError):
        enumerate_regions(1)


def test_membership_examples(dec2):
    full = RegionSpec.from_L(2, [1, 2])
    check = membership(full, dec2, [2.0, 1.0])
    assert check
    np.testing.assert_allclose(check.margins, [SQRT3_2, 3 * SQRT3_2], atol=1e-12)

    check = membership(full, dec2, [1.0, 2.0])
    assert not check
    assert check.margins[0] == pytest.approx(-SQRT3_2)


def test_zero_data_in_every_region(dec2):
    for spec in enumerate_regions(2):
        check = membership(spec, dec2, [0.0, 0.0])
        assert check
        np.testing.assert_array_equal(np.abs(check.margins), [0.0, 0.0])


def test_boundary_compat_examples(dec2):
    full = RegionSpec.from_L(2, [1, 2])
    assert all(boundary_compat(spec, dec2, [0.0, 0.0]) for spec in enumerate_regions(2))

    check = boundary_compat(full, dec2, [1.0, 0.0])
    assert check
    np.testing.assert_allclose(check.margins, [SQRT3_2, SQRT3_2], atol=1e-12)

    assert not boundary_compat(full, dec2, [0.0, 1.0])


def test_sign_flip_duality_and_scaling():
    rng = np.random.default_rng(3)
    dec = decompose(ToeplitzSystem(m=4, a=3.0, b=1.0))
    for _ in range(200):
        spec = RegionSpec.from_L(4, [i for i in range(1, 5) if rng.random() < 0.5])
        U0 = rng.normal(size=4)
        inside = bool(membership(spec, dec, U0))
        assert bool(membership(spec.flipped(), dec, -U0)) == inside
        assert bool(membership(spec, dec, 7.5 * U0)) == inside


def test_generic_data_has_exactly_one_region():
    rng = np.random.default_rng(4)
    dec = decompose(ToeplitzSystem(m=3, a=2.0, b=0.5))
    for _ in range(50):
        assert len(accepting_regions(dec, rng.normal(size=3), tol=0.0)) == 1


def test_zero_coordinate_belongs_to_adjacent_regions(dec2):
    # w_1 vanishes for U0 = (1, 1)
    accepted = accepting_regions(dec2, [1.0, 1.0])
    assert {r.L for r in accepted} == {frozenset({1, 2}), frozenset({2})}


def test_signed_transform_rows(dec2):
    spec = RegionSpec.from_L(2, [2])
    st = signed_transform(spec, dec2)
    np.testing.assert_allclose(st.V[0], -dec2.V[0])
    np.testing.assert_allclose(st.V[1], dec2.V[1])
    U = np.random.default_rng(5).normal(size=(2, 9))
    np.testing.assert_allclose(st.to_u(st.to_w(U)), U, atol=1e-12)
    assert bool(membership(spec, dec2, U[:, 0])) == bool(np.all(st.to_w(U[:, 0]) >= -1e-12))


def test_invalid_region_inputs(dec2):
    with pytest.raises(InvalidInputError):
        RegionSpec(m=2, L=frozenset({1}), Z=frozenset({1, 2}))
    with pytest.raises(InvalidInputError):
        RegionSpec.from_L(2, [3])
    with pytest.raises(InvalidInputError):
        membership(RegionSpec.from_L(2, [1]), dec2, [1.0, 2.0], tol=-1.0)
    with pytest.raises(InvalidInputError):
        membership(RegionSpec.from_L(2, [1]), dec2, [1.0, 2.0, 3.0])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
