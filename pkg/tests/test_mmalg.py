import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwtower.mmalg import (
    AlgebraError,
    DimensionCapError,
    algebra_from_span,
    commutant,
    dagger,
    entropy_functional,
    fro,
    full_matrix_algebra,
    null_space,
    p_norm,
    singular_values,
    standard_algebra,
    star_closure,
    support_size,
)

block_dims = st.lists(st.integers(1, 3), min_size=1, max_size=3)


def normalized(dims):
    w = np.array(dims, dtype=float)
    return list(1.0 / (len(dims) * w))  # every block carries trace 1/len


# -- fixed oracles ------------------------------------------------------------

def test_pnorms_of_diagonal_match_hand_values():
    A = full_matrix_algebra(2)  # normalized trace 1/2 per diagonal entry
    x = np.diag([3.0, -4.0]).astype(complex)
    assert p_norm(x, A, 1) == pytest.approx((3 + 4) / 2)
    assert p_norm(x, A, 2) == pytest.approx(math.sqrt((9 + 16) / 2))
    assert p_norm(x, A, math.inf) == pytest.approx(4.0)


def test_support_and_entropy_of_a_projection():
    A = full_matrix_algebra(4)
    p = np.diag([1, 1, 0, 0]).astype(complex)
    assert support_size(p, A) == pytest.approx(0.5)
    # tr η(p) = 0 for a projection; tr η(p/2) = -(1/2) log(1/2)
    assert entropy_functional(p, A) == pytest.approx(0.0, abs=1e-15)
    assert entropy_functional(p / 2, A) == pytest.approx(0.25 * math.log(2))


def test_star_closure_of_exact_matrix_units_stays_in_span():
    # regression: products that vanish up to rounding once got rescaled into spurious directions
    units = [np.kron(np.eye(2), np.outer(np.eye(4)[a], np.eye(4)[b])) for a in range(4) for b in range(4)]
    assert len(star_closure(units)) == 16


def test_null_space_of_tall_matrix():
    M = np.vstack([np.eye(3)[:2]] * 50)
    N = null_space(M)
    assert N.shape == (3, 1)
    assert abs(abs(N[2, 0]) - 1) < 1e-12


def test_commutant_of_m2_tensor_one_is_one_tensor_m2():
    amb = full_matrix_algebra(4)
    gens = [np.kron(np.outer(np.eye(2)[a], np.eye(2)[b]), np.eye(2)) for a in range(2) for b in range(2)]
    com = commutant(gens, amb)
    assert com.block_dims == [2]
    assert com.multiplicities == [2]
    assert com.trace_weights[0] == pytest.approx(0.5)


def test_commutant_respects_cap():
    amb = full_matrix_algebra(8)
    with pytest.raises(DimensionCapError):
        commutant([np.eye(8)], amb, cap=10)


def test_zero_span_is_rejected():
    with pytest.raises(AlgebraError):
        algebra_from_span([np.zeros((2, 2))])


# -- properties ---------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(block_dims, st.integers(0, 2**32 - 1))
def test_expectation_is_idempotent_and_trace_preserving(dims, seed):
    A = standard_algebra(dims, normalized(dims))
    rng = np.random.default_rng(seed)
    D = A.ambient_dim
    x = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    y = A.expect(x)
    assert fro(A.expect(y) - y) <= 1e-12 * max(1.0, fro(y))
    assert abs(A.trace(y) - A.trace(x)) <= 1e-12 * max(1.0, abs(A.trace(x)))


@settings(max_examples=30, deadline=None)
@given(block_dims, st.integers(0, 2**32 - 1))
def test_pnorms_are_ordered_and_holder(dims, seed):
    A = standard_algebra(dims, normalized(dims))
    rng = np.random.default_rng(seed)
    x, y = A.random(rng), A.random(rng)
    # the trace is a state, so |x|_p increases with p
    ps = [1, 1.5, 2, 3, math.inf]
    norms = [p_norm(x, A, p) for p in ps]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))
    assert abs(A.trace(x @ y)) <= p_norm(x, A, 2) * p_norm(y, A, 2) * (1 + 1e-12)


@settings(max_examples=30, deadline=None)
@given(block_dims, st.integers(0, 2**32 - 1))
def test_singular_values_match_adjoint(dims, seed):
    A = standard_algebra(dims, normalized(dims))
    x = A.random(np.random.default_rng(seed))
    for a, b in zip(singular_values(x, A), singular_values(dagger(x), A)):
        assert np.allclose(np.sort(a), np.sort(b), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(block_dims, st.integers(0, 2**32 - 1))
def test_algebra_from_span_recovers_block_structure(dims, seed):
    A = standard_algebra(dims, normalized(dims))
    rng = np.random.default_rng(seed)
    gens = [A.random(rng) for _ in range(3)]
    B = algebra_from_span(gens, density=A.density)
    assert sorted(B.block_dims) == sorted(dims)
    assert sorted(np.round(B.trace_weights, 10)) == sorted(np.round(A.trace_weights, 10))
