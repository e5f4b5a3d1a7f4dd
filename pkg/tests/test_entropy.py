import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwtower import entropy as ent
from jwtower.mmalg import AlgebraError, algebra_from_span, standard_algebra

LOG4 = math.log(4)


# -- Perron-Frobenius ------------------------------------------------------------

def test_pf_eigen_fixed_oracles():
    beta, v = ent.pf_eigen(np.array([[2.0]]))
    assert beta == pytest.approx(2.0)
    # A_3 Dynkin adjacency: eigenvalue sqrt 2, eigenvector (1, sqrt 2, 1)/2
    beta, v = ent.pf_eigen(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))
    assert beta == pytest.approx(math.sqrt(2), abs=1e-10)
    assert v == pytest.approx(np.array([1, math.sqrt(2), 1]) / 2, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_pf_eigen_matches_dense_eigensolver(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(1, 4, size=(n, n)).astype(float)
    beta, v = ent.pf_eigen(M)
    assert beta == pytest.approx(max(abs(np.linalg.eigvals(M))), rel=1e-9)
    assert np.all(v > 0)
    assert np.linalg.norm(M @ v - beta * v) <= 1e-8 * beta


def test_pf_eigen_rejects_bad_input():
    with pytest.raises(ValueError):
        ent.pf_eigen(np.eye(2))  # reducible
    with pytest.raises(ValueError):
        ent.pf_eigen(np.array([[-1.0]]))
    with pytest.raises(ValueError):
        ent.pf_eigen(np.ones((2, 3)))


def test_primitivity():
    assert ent.is_primitive(np.array([[1, 1], [1, 0]]))
    assert not ent.is_primitive(np.array([[0, 1], [1, 0]]))
    assert ent.is_irreducible(np.array([[0, 1], [1, 0]]))


# -- algebra entropies -----------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(0, 2**32 - 1))
def test_algebra_entropy_matches_density_spectrum_and_bound(dims, seed):
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0.1, 1.0, len(dims))
    weights = list(raw / np.dot(raw, dims))
    Q = standard_algebra(dims, weights)
    h = ent.algebra_entropy(Q)
    assert h == pytest.approx(ent.density_spectrum_entropy(Q), abs=1e-12)
    assert h <= math.log(sum(dims)) + 1e-12
    assert 0.0 <= ent.center_entropy(Q) <= math.log(len(dims)) + 1e-12


def test_entropy_of_scalars_is_positive_zero():
    Q = standard_algebra([1], [1.0])
    assert ent.algebra_entropy(Q) == 0.0
    assert math.copysign(1.0, ent.algebra_entropy(Q)) == 1.0


# -- tower invariants --------------------------------------------------------------

def test_inclusion_matrices_of_the_commutant_chain(c2):
    for m, expected in ((0, [[2]]), (1, [[2]]), (2, [[2]])):
        inc = ent.inclusion_matrix(*ent.chain_step(c2, m))
        assert inc.matrix.tolist() == expected
        assert inc.connected


def test_inclusion_matrix_rejects_non_inclusion(c2):
    Q = c2.relative_commutant(-1, 2)
    R = c2.relative_commutant(0, 2)
    with pytest.raises(AlgebraError):
        ent.inclusion_matrix(Q, R)


@pytest.mark.parametrize("name", ["c2", "m4"])
def test_depth_and_stabilization(name, request):
    T = request.getfixturevalue(name)
    d = ent.depth_detect(T, 2)
    assert d.finite and d.depth == 1
    assert ent.dual_stabilization(T) == 1


@pytest.mark.parametrize("name", ["c2", "m4"])
def test_shift_entropy_is_log_index(name, request):
    T = request.getfixturevalue(name)
    se = ent.shift_entropy(T)
    assert se.beta == pytest.approx(4.0, abs=1e-10)
    assert se.eigen_residual <= 1e-10
    assert se.index_residual <= 1e-10
    assert se.inclusion.matrix.tolist() == [[2]]
    assert se.value == pytest.approx(LOG4, abs=1e-10)
    assert se.implied_relative_entropy == pytest.approx(2 * LOG4)


@pytest.mark.parametrize("name", ["c2", "m4"])
def test_entropy_growth_slope(name, request):
    T = request.getfixturevalue(name)
    g = ent.entropy_growth(T, 3)
    # A'∩A_2n ≅ M_{4^n} with normalized trace: H = n log 4 exactly
    assert g.entropy == pytest.approx((0.0, LOG4, 2 * LOG4, 3 * LOG4), abs=1e-12)
    assert g.slope == pytest.approx(LOG4, abs=1e-6)


def test_entropy_growth_needs_levels(c2):
    with pytest.raises(ValueError):
        ent.entropy_growth(c2, 4)


def test_degenerate_inclusion_has_zero_entropy(trivial):
    assert ent.dual_stabilization(trivial) == 0
    g = ent.entropy_growth(trivial, 2)
    assert g.entropy == (0.0, 0.0, 0.0)
    assert g.slope == pytest.approx(0.0, abs=1e-14)
    assert ent.shift_entropy(trivial).value == pytest.approx(0.0, abs=1e-14)


# -- partition relative entropy ----------------------------------------------------

def _m2_over_c():
    M = standard_algebra([2], [0.5])
    N = algebra_from_span([np.eye(2, dtype=complex)])
    gamma = ent.PartitionOfUnity((np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)))
    return M, N, gamma


def test_partition_entropy_m2_over_scalars():
    M, N, gamma = _m2_over_c()
    assert ent.partition_relative_entropy(M, N, gamma) == pytest.approx(math.log(2), abs=1e-12)


def test_partition_entropy_vanishes_for_trivial_cases():
    M, N, gamma = _m2_over_c()
    assert ent.partition_relative_entropy(M, M, gamma) == pytest.approx(0.0, abs=1e-14)
    unit = ent.PartitionOfUnity((np.eye(2, dtype=complex),))
    assert ent.partition_relative_entropy(M, N, unit) == pytest.approx(0.0, abs=1e-14)


def test_partition_validation():
    M, N, _ = _m2_over_c()
    with pytest.raises(AlgebraError):
        ent.partition_relative_entropy(M, N, ent.PartitionOfUnity((np.diag([1.0, 0.0]).astype(complex),)))
    with pytest.raises(AlgebraError):
        bad = ent.PartitionOfUnity((np.diag([2.0, 1.0]).astype(complex), np.diag([-1.0, 0.0]).astype(complex)))
        ent.partition_relative_entropy(M, N, bad)
