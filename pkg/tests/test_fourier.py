import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwtower import fourier as fo
from jwtower.mmalg import dagger, fro, p_norm

TAU = 0.25
seeds = st.integers(0, 2**32 - 1)


def rel(a, b):
    return fro(a - b) / max(fro(a), fro(b), 1e-300)


# -- witnesses ------------------------------------------------------------------

def test_fourier_witnesses(tower):
    T = tower
    assert rel(fo.fourier(T, 0, T.identity(0)), T.identity(1)) <= 1e-12
    assert rel(fo.fourier(T, 1, T.e(1, 1)), math.sqrt(TAU) * T.identity(2)) <= 1e-12
    assert rel(fo.fourier(T, 5, T.e(1, 5)), TAU ** -1.5 * T.v(6, 3)) <= 1e-12
    assert rel(fo.inv_fourier(T, 1, T.identity(2)), TAU ** -0.5 * T.e(1, 1)) <= 1e-12


def test_rotation_is_not_an_involution(c2):
    T = c2
    e21 = T.v(2, 1)
    assert rel(fo.rho_plus(T, 2, e21), TAU * T.identity(2)) <= 1e-12
    twice = fo.iterate(lambda y: fo.rho_plus(T, 2, y), 2, e21)
    assert rel(twice, T.e(1, 2) @ T.e(2, 2)) <= 1e-12


def test_worked_convolution_example(c2):
    T = c2
    e1 = T.e(1, 5)
    c = fo.convolve_pos(T, 5, e1, e1)
    assert rel(c, TAU ** -0.5 * T.e(4, 5) @ e1 @ T.e(3, 5)) <= 1e-10
    assert p_norm(dagger(c) - c, T.algebra(5), 2) > 1e-3


def test_reflection_fixes_e1(tower):
    assert rel(fo.reflection_plus(tower, 0, tower.e(1, 1)), tower.e(1, 1)) <= 1e-12


def test_canonical_shift_unit_and_range_dims(c2):
    assert rel(fo.canonical_shift(c2, c2.identity(2), 2), c2.identity(4)) <= 1e-12
    img = fo.canonical_shift_image(c2, 2)
    assert img.block_dims == c2.relative_commutant(2, 4).block_dims


def test_shift_level():
    assert [fo.shift_level(j) for j in range(1, 7)] == [0, 0, 1, 1, 2, 2]


def test_unknown_shift_method(c2):
    with pytest.raises(ValueError):
        fo.shift_plus(c2, 0, c2.identity(1), "nope")


# -- properties over random elements ------------------------------------------

@settings(max_examples=15, deadline=None)
@given(st.integers(0, 3), seeds)
def test_fourier_inverse_and_isometry(c2, n, seed):
    rng = np.random.default_rng(seed)
    x = c2.relative_commutant(-1, n).random(rng)
    f = fo.fourier(c2, n, x)
    assert c2.relative_commutant(0, n + 1).residual(f) <= 1e-10
    assert rel(fo.inv_fourier(c2, n, f), x) <= 1e-10
    assert p_norm(f, c2.algebra(n + 1), 2) == pytest.approx(p_norm(x, c2.algebra(n), 2), rel=1e-10)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 3), seeds)
def test_rotation_period(c2, n, seed):
    rng = np.random.default_rng(seed)
    x = c2.relative_commutant(-1, n).random(rng)
    assert rel(fo.iterate(lambda y: fo.rho_plus(c2, n, y), n + 1, x), x) <= 1e-10
    w = c2.relative_commutant(0, n + 1).random(rng)
    assert rel(fo.iterate(lambda y: fo.rho_minus(c2, n, y), n + 1, w), w) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([0, 1]), seeds)
def test_reflection_is_trace_preserving_anti_automorphism(m4, n, seed):
    T, rng = m4, np.random.default_rng(seed)
    m = 2 * n + 1
    alg = T.relative_commutant(-1, m)
    x, y = alg.random(rng), alg.random(rng)
    r = lambda z: fo.reflection_plus(T, n, z)  # noqa: E731
    assert rel(r(r(x)), x) <= 1e-10
    assert rel(r(x @ y), r(y) @ r(x)) <= 1e-10
    assert rel(r(dagger(x)), dagger(r(x))) <= 1e-10
    assert abs(T.trace(m, r(x)) - T.trace(m, x)) <= 1e-10 * max(1, abs(T.trace(m, x)))
    w = T.relative_commutant(0, m + 1).random(rng)
    via_fourier = fo.fourier(T, m, fo.reflection_plus(T, n, fo.inv_fourier(T, m, w)))
    assert rel(fo.reflection_minus(T, n, w), via_fourier) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_iterated_reflection_formula(c2, seed):
    x = c2.relative_commutant(-1, 3).random(np.random.default_rng(seed))
    assert rel(fo.reflection_plus_iterated(c2, 1, x), fo.reflection_plus(c2, 1, x)) <= 1e-10


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (3, 3)]), seeds)
def test_rotation_power_closed_form(c2, nk, seed):
    n, k = nk
    x = c2.relative_commutant(-1, n).random(np.random.default_rng(seed))
    iterated = fo.iterate(lambda y: fo.rho_plus(c2, n, y), k, x)
    assert rel(fo.rho_plus_power_closed(c2, n, k, x), iterated) <= 1e-10


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([0, 1]), seeds)
def test_shift_closed_forms_match_compositions(c2, n, seed):
    rng = np.random.default_rng(seed)
    x = c2.relative_commutant(-1, 2 * n + 1).random(rng)
    assert rel(fo.shift_plus(c2, n, x, "closed"), fo.shift_plus(c2, n, x, "composition")) <= 1e-10
    w = c2.relative_commutant(0, 2 * n + 2).random(rng)
    assert rel(fo.shift_minus(c2, n, w, "closed"), fo.shift_minus(c2, n, w, "composition")) <= 1e-10


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([1, 2]), seeds)
def test_shift_odd_identity(c2, n, seed):
    w = c2.relative_commutant(0, n + 1).random(np.random.default_rng(seed))
    a, b = fo.shift_odd_sides(c2, n, w)
    assert rel(a, b) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([1, 2, 3]), seeds)
def test_canonical_shift_is_trace_preserving_homomorphism(c2, j, seed):
    rng = np.random.default_rng(seed)
    alg = c2.relative_commutant(0, j)
    x, y = alg.random(rng), alg.random(rng)
    g = lambda z: fo.canonical_shift(c2, z, j)  # noqa: E731
    assert rel(g(x @ y), g(x) @ g(y)) <= 1e-10
    assert rel(g(dagger(x)), dagger(g(x))) <= 1e-10
    assert abs(c2.trace(j + 2, g(x)) - c2.trace(j, x)) <= 1e-10 * max(1, abs(c2.trace(j, x)))
    assert c2.relative_commutant(2, j + 2).residual(g(x)) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([1, 2]), seeds)
def test_convolution_unit_and_associativity(m4, n, seed):
    rng = np.random.default_rng(seed)
    alg = m4.relative_commutant(-1, n)
    x, y, z = alg.random(rng), alg.random(rng), alg.random(rng)
    u = fo.inv_fourier(m4, n, m4.identity(n + 1))
    assert rel(fo.convolve_pos(m4, n, u, x), x) <= 1e-10
    lhs = fo.convolve_pos(m4, n, fo.convolve_pos(m4, n, x, y), z)
    rhs = fo.convolve_pos(m4, n, x, fo.convolve_pos(m4, n, y, z))
    assert rel(lhs, rhs) <= 1e-10
