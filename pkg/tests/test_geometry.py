import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from banachvi.geometry import (SpaceSpec, dual_norm, duality_map, inverse_duality_map,
                               lyapunov_phi, norm, pairing, v_functional)
from banachvi.exceptions import DimensionError

import identities

EUC2 = SpaceSpec.euclidean(2)
LP2 = SpaceSpec.lp(2, 1.5)


def test_norm_examples():
    assert norm(EUC2, [3.0, 4.0]) == pytest.approx(5.0)
    assert norm(LP2, [1.0, 1.0]) == pytest.approx(2 ** (1 / 1.5))


def test_duality_map_examples():
    np.testing.assert_allclose(duality_map(EUC2, [3.0, 4.0]), [3.0, 4.0])
    np.testing.assert_allclose(inverse_duality_map(EUC2, [3.0, 4.0]), [3.0, 4.0])
    # (Jx)_i = ||x||^{2-p} |x_i|^{p-1} sgn(x_i)
    x = np.array([1.0, -1.0])
    n = 2 ** (1 / 1.5)
    np.testing.assert_allclose(duality_map(LP2, x), [n ** 0.5, -n ** 0.5])


def test_phi_examples():
    assert lyapunov_phi(EUC2, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(2.0)
    assert v_functional(EUC2, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(2.0)
    x = np.array([0.3, -1.2])
    assert lyapunov_phi(LP2, x, x) == pytest.approx(0.0, abs=1e-14)
    assert lyapunov_phi(LP2, x, 2 * x) > 0


def test_space_validation():
    with pytest.raises(ValueError):
        SpaceSpec.lp(2, 2.5)
    with pytest.raises(ValueError):
        SpaceSpec.lp(2, 1.0)
    with pytest.raises(ValueError):
        SpaceSpec(0)
    with pytest.raises(DimensionError):
        norm(EUC2, [1.0, 2.0, 3.0])


def test_constants():
    assert SpaceSpec.euclidean(3).c == 1.0
    s = SpaceSpec.lp(2, 1.5)
    assert s.c == pytest.approx(np.sqrt(0.5))
    assert s.c_inv == pytest.approx(1 / np.sqrt(0.5))
    assert s.q == pytest.approx(3.0)


def test_phi_lower_bound_constant_is_sharp_enough(rng):
    # ||Jx - Jy|| / ||x - y|| bottoms out at p - 1 in lp(p); 2/c^2 must cover 1/(p-1)
    s = SpaceSpec.lp(2, 1.5)
    ratios = []
    for _ in range(2000):
        x, y = rng.normal(size=2), rng.normal(size=2)
        ratios.append(dual_norm(s, duality_map(s, x) - duality_map(s, y)) / norm(s, x - y))
    assert min(ratios) >= s.c ** 2 / 2


@pytest.mark.parametrize("space", identities.SPACE_FAMILIES, ids=lambda s: s.name)
def test_identities(space, rng):
    worst = identities.worst_violations(space, rng, 100)
    for key, v in worst.items():
        assert v <= 1e-9, key


def test_monotone_duality(rng):
    for _ in range(200):
        x, y = rng.normal(size=3), rng.normal(size=3)
        s = SpaceSpec.lp(3, 1.5)
        assert pairing(x - y, duality_map(s, x) - duality_map(s, y)) >= -1e-12


vec2 = arrays(np.float64, 2, elements=st.floats(-50, 50, allow_nan=False))


@settings(max_examples=200, deadline=None)
@given(vec2, vec2)
def test_phi_nonnegative_and_zero_iff_equal(x, y):
    v = lyapunov_phi(LP2, x, y)
    assert v >= 0.0
    if np.allclose(x, y, atol=0):
        assert v == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(vec2)
def test_duality_homogeneous(x):
    np.testing.assert_allclose(duality_map(LP2, 2.0 * x), 2.0 * duality_map(LP2, x),
                               rtol=1e-12, atol=1e-12)
