import math

import numpy as np
import pytest

from jwtower.mmalg import AlgebraError, DimensionCapError, dagger, fro
from jwtower.tower import (
    InclusionSpec,
    build,
    composite_quasi_basis,
    expectation_chain,
    lift_algebra,
    markov_residual,
    multi_step_jones,
    pushdown_residual,
    quasi_basis_residuals,
    tl_residual,
    trace_restriction_residual,
)
from jwtower.mmalg import commutant

# Tensor models M_k ⊗ 1 ⊂ M_k ⊗ M_d: A_n ≅ M_{k d^(n+1)}, B'∩A_n ≅ M_{d^(n+1)},
# A'∩A_n ≅ M_{d^n}, each a factor with normalized trace.
FROZEN_DIMS = {
    "c2": {"A": lambda n: 2 ** (n + 1), "Bc": lambda n: 2 ** (n + 1), "Ac": lambda n: 2 ** n},
    "m4": {"A": lambda n: 2 ** (n + 2), "Bc": lambda n: 2 ** (n + 1), "Ac": lambda n: 2 ** n},
}


@pytest.mark.parametrize("name", ["c2", "m4"])
def test_level_and_commutant_dims_match_closed_forms(name, request):
    T = request.getfixturevalue(name)
    dims = FROZEN_DIMS[name]
    for n in range(0, 6):
        assert T.algebra(n).block_dims == [dims["A"](n)]
        assert T.algebra(n).trace_weights == pytest.approx([1 / dims["A"](n)])
        assert T.relative_commutant(-1, n).block_dims == [dims["Bc"](n)]
        if n > 0:
            assert T.relative_commutant(0, n).block_dims == [dims["Ac"](n)]


def test_scalars(tower):
    assert tower.index == pytest.approx(4.0)
    assert tower.tau == pytest.approx(0.25)
    assert tower.delta == pytest.approx(2.0)
    assert tower.inclusion_matrix.tolist() == [[2]]
    assert tower.simple


def test_temperley_lieb_and_markov(tower, rng):
    assert tl_residual(tower) <= 1e-12
    for n in range(1, tower.max_level + 1):
        assert markov_residual(tower, n, rng, 5) <= 1e-12
        assert trace_restriction_residual(tower, n, rng, 5) <= 1e-12
    assert pushdown_residual(tower, rng, 10) <= 1e-12


def test_quasi_basis_base_and_shifted(tower):
    for qb in (None,):
        res = quasi_basis_residuals(tower, qb)
        assert max(res.values()) <= 1e-12
    assert max(quasi_basis_residuals(tower.view(1)).values()) <= 1e-12
    assert max(quasi_basis_residuals(tower.view(2)).values()) <= 1e-12


def test_composite_quasi_basis_has_squared_index(c2):
    qb = composite_quasi_basis(c2, 1)
    s = sum(l @ dagger(l) for l in qb.elements)
    assert fro(s - 16 * c2.identity(1)) <= 1e-10


def test_multi_step_jones_is_projection_of_trace_tau_power(c2):
    for n in (0, 1, 2):
        f = multi_step_jones(c2, n)
        top = 2 * n + 1
        assert fro(f @ f - f) <= 1e-10
        # e_[-1,2n+1] is the Jones projection of B ⊂ A_n, of trace [A_n:B]^-1 = tau^(n+1)
        assert c2.trace(top, f).real == pytest.approx(0.25 ** (n + 1))


def test_expectation_chain_is_trace_on_b_commutant(c2, rng):
    x = c2.relative_commutant(-1, 3).random(rng)
    out = expectation_chain(c2, 0, 3, x)
    assert fro(out - c2.trace(3, x) * c2.identity(-1)) <= 1e-12


def test_matrix_unit_commutant_matches_nullspace(c2):
    for k, m in ((-1, 1), (0, 1), (0, 2), (1, 2)):
        fast = c2.relative_commutant(k, m)
        slow = commutant([c2.lift(g, k, m) for g in c2.algebra(k).basis()], c2.algebra(m))
        assert fast.block_dims == slow.block_dims
        assert fast.trace_weights == pytest.approx(slow.trace_weights)


def test_lift_algebra_keeps_shape(c2):
    Q = c2.relative_commutant(0, 2)
    L = lift_algebra(c2, Q, 2, 4)
    assert L.block_dims == Q.block_dims
    assert L.trace_weights == pytest.approx(Q.trace_weights)


def test_explicit_generators_reproduce_tensor_model():
    gens = tuple(np.kron(np.outer(np.eye(2)[a], np.eye(2)[b]), np.eye(2)) for a in range(2) for b in range(2))
    T = build(InclusionSpec("explicit", a_blocks=(4,), b_generators=gens), 3)
    assert T.index == pytest.approx(4.0)
    assert [T.relative_commutant(0, n).block_dims for n in (1, 2, 3)] == [[2], [4], [8]]
    assert tl_residual(T) <= 1e-10


def test_non_factor_explicit_model_builds_and_is_flagged():
    gens = (np.eye(2),)
    T = build(InclusionSpec("explicit", a_blocks=(1, 1), b_generators=gens), 3)
    assert T.index == pytest.approx(2.0)
    assert not T.simple
    assert tl_residual(T) <= 1e-10


def test_degenerate_inclusion(trivial):
    assert trivial.index == pytest.approx(1.0)
    for n in range(1, 4):
        assert trivial.relative_commutant(0, n).dim == 1


@pytest.mark.parametrize("kw", [{"k": 0}, {"d": 0}])
def test_invalid_tensor_model(kw):
    with pytest.raises(ValueError):
        InclusionSpec("tensor", **kw)


def test_generator_outside_a_is_rejected():
    g = np.ones((2, 2))  # not block diagonal for A = C ⊕ C
    with pytest.raises(AlgebraError):
        build(InclusionSpec("explicit", a_blocks=(1, 1), b_generators=(g,)), 1)


def test_cap_is_enforced():
    with pytest.raises(DimensionCapError):
        build(InclusionSpec("tensor", k=1, d=2), 12, cap=256)


def test_levels_outside_the_tower_raise(c2):
    with pytest.raises(IndexError):
        c2.algebra(c2.max_level + 1)
