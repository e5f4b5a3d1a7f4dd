import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwtower import harmonic as hm

seeds = st.integers(0, 2**32 - 1)

# least minimal-projection traces, frozen from the tensor-model closed forms:
# C ⊂ M_2 has factor commutants of normalized trace, so κ±_n = 2^-(n+1)
FROZEN_KAPPA_C2 = {0: 0.5, 1: 0.25, 2: 0.125}


@pytest.mark.parametrize("n", [0, 1, 2])
def test_kappa_frozen(c2, n):
    for sign in "+-0":
        assert hm.kappa(c2, n, sign) == pytest.approx(FROZEN_KAPPA_C2[n])


def test_kappa_degenerate_is_one(trivial):
    for n in (0, 1, 2):
        assert hm.kappa(trivial, n, "0") == pytest.approx(1.0)


def test_kappa_unknown_sign(c2):
    with pytest.raises(ValueError):
        hm.kappa(c2, 0, "x")


def test_conjugate_exponents():
    assert hm.conjugate(2) == 2
    assert hm.conjugate(math.inf) == 1
    assert hm.conjugate(1) == math.inf
    assert hm.conjugate(4) == pytest.approx(4 / 3)


def test_young_rejects_bad_exponents(c2):
    x = c2.identity(1)
    with pytest.raises(ValueError):
        hm.young_margin(c2, "+", x, x, 2, 2, 2)
    with pytest.raises(ValueError):
        hm.young_margin(c2, "?", x, x, 1, 1, 1)


def test_hausdorff_young_needs_p_at_least_two(c2):
    with pytest.raises(ValueError):
        hm.hausdorff_young_margin(c2, 1, c2.identity(1), 1.5)


def test_minimal_projection_saturates_donoho_stark(c2):
    # a minimal projection meets the bound κ_0^2 / [A:B]_0 with equality
    p = c2.relative_commutant(-1, 1).unit_matrix(0, 0, 0)
    m = hm.donoho_stark_margin(c2, 1, p)
    assert m.margin == pytest.approx(0.0, abs=1e-12)


def test_young_constant_is_attained_on_a_witness(c2):
    wits = hm.witnesses_plus(c2, 1)
    best = hm.worst(hm.young_margin(c2, "+", x, y, 1, 1, 1) for _, x in wits for _, y in wits)
    assert best.extra["max_ratio"] == pytest.approx(best.extra["constant"], rel=1e-10)


@pytest.mark.parametrize("inverse", [False, True])
@pytest.mark.parametrize("n", [1, 2])
def test_witness_margins_nonnegative(tower, n, inverse):
    wits = hm.witnesses_minus(tower, n) if inverse else hm.witnesses_plus(tower, n)
    for _, x in wits:
        for p in (2, 4, math.inf):
            assert hm.hausdorff_young_margin(tower, n, x, p, inverse).passed(1e-9)
        assert hm.donoho_stark_margin(tower, n, x, inverse).passed(1e-9)
        assert hm.hirschman_beckner_margin(tower, n, x, inverse).passed(1e-9)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([1, 2]), st.sampled_from([2.0, 3.0, 4.0, math.inf]), seeds)
def test_random_inequality_margins(m4, n, p, seed):
    rng = np.random.default_rng(seed)
    for x in hm.mixed_samples(m4.relative_commutant(-1, n), rng, 4):
        assert hm.hausdorff_young_margin(m4, n, x, p).passed(1e-9)
        assert hm.donoho_stark_margin(m4, n, x).passed(1e-9)
        assert hm.hirschman_beckner_margin(m4, n, x).passed(1e-9)
    assert hm.fourier_isometry_defect(m4, n, x) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["+", "-"]),
       st.sampled_from([(1.0, 1.0, 1.0), (2.0, 2.0, math.inf), (2.0, 1.0, 2.0), (math.inf, 1.0, math.inf)]), seeds)
def test_random_young_margins(c2, side, pqr, seed):
    rng = np.random.default_rng(seed)
    alg = c2.relative_commutant(-1, 1) if side == "+" else c2.relative_commutant(0, 2)
    xs = list(hm.mixed_samples(alg, rng, 3))
    ys = list(hm.mixed_samples(alg, rng, 3))
    for x, y in zip(xs, ys):
        assert hm.young_margin(c2, side, x, y, *pqr).passed(1e-9)


def test_sampler_normalizes(c2, rng):
    alg = c2.relative_commutant(0, 2)
    from jwtower.mmalg import p_norm
    for x in hm.mixed_samples(alg, rng, 6):
        assert p_norm(x, alg, 2) == pytest.approx(1.0)
