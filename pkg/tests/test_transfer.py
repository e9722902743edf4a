import cmath
import math

import numpy as np
import pytest
import scipy.sparse
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_zeta.errors import DimensionCap, Overflow
from schottky_zeta.refinement import index_set, sparsity_pattern
from schottky_zeta.transfer import (
    ScaledComplex,
    assemble,
    assemble_sparse,
    log_det,
    lparts,
    operator_matrix,
    zeta,
)

# periodic-orbit expansion of X(10,10,10) in 60-digit arithmetic (truncations 12 and 14 agree)
Z_X101010_AT_03 = 0.7231404040341921
Z_X101010_AT_M05_2I = complex(11892605.907433962, -6575688.178364874)


def cylinder_product(s, length=4.0, factors=40):
    """Squared Euler product of the cylinder: two oriented orbits per closed geodesic."""
    return np.prod([(1 - np.exp(-(s + k) * length)) ** 2 for k in range(factors)])


def naive_det(a):
    """Gaussian elimination with partial pivoting, one row at a time."""
    a = np.array(a, dtype=complex)
    n = len(a)
    det = 1 + 0j
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0:
            return 0j
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= a[k, k]
        for i in range(k + 1, n):
            factor = a[i, k] / a[k, k]
            for j in range(k, n):
                a[i, j] -= factor * a[k, j]
    return det


def test_lparts_sizes(cylinder4, x101010):
    p = lparts(cylinder4, 8, 0)
    assert (p.block_count, p.dim) == (2, 16)
    p = lparts(x101010, 8, 1)
    assert (len(p.words), p.block_count, p.dim) == (12, 36, 96)
    assert np.all(np.exp(p.log_f) > 0)


def test_lparts_pattern_level0(x101010):
    p = lparts(x101010, 4, 0)
    pattern = np.zeros((4, 4), dtype=bool)
    pattern[p.rows, p.cols] = True
    assert np.array_equal(pattern, sparsity_pattern(2, 0))
    assert p.words == tuple(index_set(2, 0))


def test_dimension_cap(x101010):
    with pytest.raises(DimensionCap):
        lparts(x101010, 24, 2, max_dim=100)


def test_assemble_at_zero_uses_kernel_blocks(x101010_parts):
    p = x101010_parts
    a = operator_matrix(p, 0.0)
    N = p.N
    for i, (r, c) in enumerate(zip(p.rows, p.cols)):
        assert np.array_equal(a[r * N : (r + 1) * N, c * N : (c + 1) * N], p.m[i])


def test_assemble_real_and_conjugate(x101010_parts):
    assert np.isrealobj(assemble(x101010_parts, 0.7))
    s = 0.2 + 3.1j
    assert np.array_equal(assemble(x101010_parts, s.conjugate()), assemble(x101010_parts, s).conj())


def test_log_det_small_cases():
    assert log_det(np.eye(10)) == ScaledComplex(0.0, 0.0)
    d = log_det(np.diag([2.0, -3.0]))
    assert d.log_modulus == pytest.approx(math.log(6))
    assert d.phase == pytest.approx(math.pi)
    assert log_det(np.zeros((3, 3))).log_modulus == -math.inf


@pytest.mark.parametrize("seed", range(3))
def test_log_det_against_naive_elimination(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
    ref = naive_det(a)
    for value in (log_det(a), log_det(a.astype(np.clongdouble))):
        assert abs(value.to_complex() / ref - 1) < 1e-8
    sparse = log_det(scipy.sparse.csc_matrix(a))
    assert abs(sparse.to_complex() / ref - 1) < 1e-8


def test_zeta_far_right_is_one(cylinder_parts):
    assert abs(zeta(cylinder_parts, 30.0).to_complex() - 1) < 1e-12


@pytest.mark.parametrize("s", [0.5, 0.3 + 2j, -0.7 + 1j, -1.5 + 3j])
def test_cylinder_matches_product(cylinder_parts, s):
    assert abs(zeta(cylinder_parts, s).to_complex() / cylinder_product(s) - 1) < 1e-12


@given(s=st.floats(-1.5, 3))
def test_real_s_gives_real_zeta(x101010_parts, s):
    assert zeta(x101010_parts, s).phase in (0.0, math.pi)


@settings(max_examples=20)
@given(re=st.floats(-1, 2), im=st.floats(-10, 10))
def test_schwarz_reflection(x101010_parts, re, im):
    s = complex(re, im)
    z, zc = zeta(x101010_parts, s), zeta(x101010_parts, s.conjugate())
    assert zc.log_modulus == pytest.approx(z.log_modulus, abs=1e-10)
    assert abs(cmath.exp(1j * (zc.phase + z.phase)) - 1) < 1e-10


@pytest.mark.parametrize("s", [0.3, 0.3 + 5j, -0.5 + 2j])
def test_permutation_invariance(x101010_parts, s):
    rng = np.random.default_rng(7)
    shuffled = x101010_parts.reordered(rng.permutation(len(x101010_parts.words)))
    a, b = zeta(x101010_parts, s), zeta(shuffled, s)
    assert abs(a.log_modulus - b.log_modulus) < 1e-10
    assert abs(cmath.exp(1j * (a.phase - b.phase)) - 1) < 1e-10


@pytest.mark.parametrize("s", [0.3, -0.5 + 2j])
def test_sparse_path_matches_dense(x101010_parts, s):
    dense = zeta(x101010_parts, s)
    sparse = zeta(x101010_parts, s, dense_cutoff=0)
    assert abs(sparse.to_complex(dense.log_modulus) - dense.to_complex(dense.log_modulus)) < 1e-10
    m = assemble_sparse(x101010_parts, s).toarray()
    assert np.allclose(m, assemble(x101010_parts, s), atol=1e-15)


def test_regression_values(x101010):
    z = zeta(lparts(x101010, 24, 1), 0.3).to_complex()
    assert z == pytest.approx(Z_X101010_AT_03, abs=1e-12)
    z = zeta(lparts(x101010, 24, 1, precision="extended"), -0.5 + 2j).to_complex()
    assert abs(z / Z_X101010_AT_M05_2I - 1) < 1e-12


def test_extended_precision_agrees_with_double(x101010):
    dbl = zeta(lparts(x101010, 12, 1), 0.3 + 5j)
    ext = zeta(lparts(x101010, 12, 1, precision="extended"), 0.3 + 5j)
    assert abs(dbl.to_complex() - ext.to_complex()) < 1e-12


def test_overflow_reported(x101010_parts):
    with pytest.raises(Overflow):
        zeta(x101010_parts, -200.0)


def test_scaled_complex_helpers():
    z = ScaledComplex.from_complex(-2 + 0j)
    assert z.phase == math.pi and z.to_complex() == pytest.approx(-2)
    assert z.conjugate().phase == math.pi
    assert (z * z).to_complex() == pytest.approx(4)
    assert ScaledComplex.from_complex(0).to_complex() == 0
    assert ScaledComplex(800.0, 0.0).to_complex(offset=800.0) == 1
