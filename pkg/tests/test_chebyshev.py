import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schottky_zeta.chebyshev import (
    ChebGrid,
    coefficients,
    interpolate,
    kernel,
    kernel_matrix,
    lblock,
    nodes,
)
from schottky_zeta.errors import ContainmentViolation
from schottky_zeta.geometry import Interval, MoebiusTransform

UNIT = Interval(0.0, 1.0)


def test_nodes_ordered_and_symmetric():
    x = nodes(9)
    assert np.all(np.diff(x) < 0)
    assert np.allclose(x, -x[::-1], atol=1e-15)
    assert np.allclose(x, np.cos((2 * np.arange(1, 10) - 1) * np.pi / 18), rtol=0, atol=1e-15)
    assert ChebGrid(9).weights.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("N", range(1, 17))
def test_kernel_is_delta_on_nodes(N):
    x = nodes(N)
    assert np.allclose(kernel(N, x[:, None], x[None, :]), np.eye(N), atol=1e-13)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_order_one_kernel_is_constant(x, y):
    assert kernel(1, x, y) == 1.0


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=100), st.integers(1, 30))
def test_kernel_rows_sum_to_one(xs, N):
    assert np.allclose(kernel_matrix(N, np.array(xs)).sum(axis=1), 1.0, atol=1e-12)


def test_kernel_matches_trigonometric_form():
    N, x, y = 7, 0.3, -0.8
    terms = [math.cos(k * math.acos(x)) * math.cos(k * math.acos(y)) for k in range(1, N)]
    assert kernel(N, x, y) == pytest.approx((1 + 2 * sum(terms)) / N, rel=1e-13)


@given(st.integers(2, 20), st.lists(st.floats(-1, 1), min_size=20, max_size=20), st.floats(-3, 3), st.floats(0.1, 2))
def test_polynomial_reproduction(N, raw, center, radius):
    coef = np.array(raw[:N])
    iv = Interval(center, radius)
    poly = np.polynomial.Polynomial(coef, domain=[iv.lo, iv.hi], window=[-1, 1])
    samples = poly(iv.from_unit(nodes(N)))
    x = iv.from_unit(np.linspace(-1, 1, 50))
    scale = max(1.0, np.max(np.abs(samples)))
    assert np.max(np.abs(interpolate(samples, iv, x) - poly(x))) < 1e-10 * scale


def test_interpolate_constant_and_exponential():
    iv = Interval(0.5, 0.5)
    assert interpolate(np.full(8, 3.5), iv, 0.123) == pytest.approx(3.5, rel=1e-14)
    samples = np.exp(iv.from_unit(nodes(16)))
    x = np.linspace(0, 1, 100)
    assert np.max(np.abs(interpolate(samples, iv, x) - np.exp(x))) < 1e-12


def test_interpolation_error_decays_geometrically():
    iv = Interval(0.5, 0.5)
    x = np.linspace(0, 1, 301)

    def err(N):
        return np.max(np.abs(interpolate(np.exp(iv.from_unit(nodes(N))), iv, x) - np.exp(x)))

    for N in (2, 4, 6):
        assert err(N + 4) < 0.5 * err(N)


@given(st.integers(1, 30), st.data())
def test_discrete_cosine_round_trip(N, data):
    v = np.array(data.draw(st.lists(st.floats(-10, 10), min_size=N, max_size=N)))
    mu = coefficients(v)
    j = np.arange(1, N + 1)
    k = np.arange(1, N)[:, None]
    back = mu[0] + 2 * (mu[1:, None] * np.cos(np.pi * k * (j - 0.5) / N)).sum(axis=0)
    assert np.allclose(back, v, atol=1e-12 * max(1, np.max(np.abs(v))))


def test_lblock_identity():
    res = lblock(8, UNIT, UNIT, MoebiusTransform.identity())
    assert np.allclose(res.m, np.eye(8), atol=1e-13)
    assert np.all(res.f == 1.0)
    assert np.allclose(res.block(0.7 + 2j), np.eye(8), atol=1e-13)


def test_lblock_cylinder_block(cylinder4):
    # S_1 maps I_-1 into itself, contracting toward its attracting fixed point
    g = cylinder4.generator(1)
    iv = cylinder4.interval(-1)
    res = lblock(16, iv, iv, g)
    assert np.all((res.f > 0) & (res.f < 1))
    assert np.allclose(res.m.sum(axis=1), 1.0, atol=1e-10)
    s = 0.4 - 1.5j
    assert np.allclose(res.block(s), np.exp(s * np.log(res.f))[:, None] * res.m)


def test_lblock_containment_violation(cylinder4):
    iv = cylinder4.interval(1)
    with pytest.raises(ContainmentViolation):
        lblock(8, iv, iv, MoebiusTransform(1, 0.5, 0, 1))


def test_extended_precision_nodes():
    x = nodes(12, np.longdouble)
    assert x.dtype == np.longdouble
    assert kernel_matrix(12, x).dtype == np.longdouble
    assert np.allclose(x.astype(float), nodes(12), atol=1e-16)
