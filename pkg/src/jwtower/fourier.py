"""Fourier transforms, rotations, reflections, convolutions and shifts.

All maps act on plain matrices.  ``x`` arguments live in ``B' ∩ A_n`` (given
at level ``n``) and ``w`` arguments in ``A' ∩ A_{n+1}`` (given at level
``n + 1``).  Every function accepts a tower view, which is how the maps for
``A ⊂ A_1`` are obtained.
"""

from __future__ import annotations

import math

import numpy as np

from .mmalg import DimensionCapError, MultiMatrixAlgebra, algebra_from_units, block_slices, dagger
from .tower import Tower, composite_quasi_basis, multi_step_jones

CLOSED_FORM_CAP = 200_000


# ---------------------------------------------------------------------------
# Fourier transform and rotations
# ---------------------------------------------------------------------------

def fourier(T: Tower, n: int, x: np.ndarray) -> np.ndarray:
    """``F_n(x) = tau^{-(n+2)/2} E^{B'∩A_{n+1}}_{A'∩A_{n+1}}(x v_{n+1})``."""
    y = T.lift(x, n, n + 1) @ T.v(n + 1)
    return T.tau ** (-(n + 2) / 2) * T.commutant_expectation(n + 1, y)


def inv_fourier(T: Tower, n: int, w: np.ndarray) -> np.ndarray:
    """``F_n^{-1}(w) = tau^{-(n+2)/2} E_{n+1}(w v_{n+1}^*)``."""
    return T.tau ** (-(n + 2) / 2) * T.expect(n + 1, w @ dagger(T.v(n + 1)))


def rho_plus(T: Tower, n: int, x: np.ndarray) -> np.ndarray:
    return dagger(inv_fourier(T, n, dagger(fourier(T, n, x))))


def rho_minus(T: Tower, n: int, w: np.ndarray) -> np.ndarray:
    return dagger(fourier(T, n, dagger(inv_fourier(T, n, w))))


def rho_plus_single_sum(T: Tower, n: int, x: np.ndarray) -> np.ndarray:
    """``tau^{-n} sum_i E_n(v_n λ_i x) v_n λ_i^*``."""
    vn = T.v(n)
    out = 0
    for l in T.lam(n):
        out = out + T.lift(T.expect(n, vn @ l @ x), n - 1, n) @ vn @ dagger(l)
    return T.tau ** (-n) * out


def rho_minus_quasi_basis(T: Tower, n: int, w: np.ndarray) -> np.ndarray:
    """``tau^{-(n+1)} sum_i λ_i v_{n+1}^* E_{n+1}(w v_{n+1}^* λ_i^*)``."""
    vs = dagger(T.v(n + 1))
    out = 0
    for l in T.lam(n + 1):
        out = out + l @ vs @ T.lift(T.expect(n + 1, w @ vs @ dagger(l)), n, n + 1)
    return T.tau ** (-(n + 1)) * out


def rho_minus_via_view(T: Tower, n: int, w: np.ndarray) -> np.ndarray:
    """``i ∘ rho^+_n (for A ⊂ A_1) ∘ i`` with ``i`` the adjoint."""
    return dagger(rho_plus(T.view(1), n, dagger(w)))


def iterate(f, k: int, x: np.ndarray) -> np.ndarray:
    for _ in range(k):
        x = f(x)
    return x


def rho_plus_power_closed(T: Tower, n: int, k: int, x: np.ndarray, cap: int = CLOSED_FORM_CAP) -> np.ndarray:
    """Closed form of ``(rho^+_n)^k`` as a sum over quasi-basis ``k``-tuples.

    The leading word ``v_{n-k+1} λ_{i_1} ... v_n λ_{i_k}`` grows to the right and
    the trailing word ``v_{n-k+1} λ_{i_k}^* ... v_n λ_{i_1}^*`` grows to the left
    as the indices are fixed one at a time.
    """
    if not 1 <= k <= n:
        raise ValueError(f"closed form needs 1 <= k <= n, got k={k}, n={n}")
    lam = T.lam(n)
    if len(lam) ** k > cap:
        raise DimensionCapError(f"{len(lam)}^{k} quasi-basis tuples exceed cap {cap}")
    vs = [T.v(n - k + t, at=n) for t in range(1, k + 1)]
    lam_star = [dagger(l) for l in lam]
    low = n - k
    I = T.identity(n)

    def walk(depth: int, lead: np.ndarray, trail: np.ndarray) -> np.ndarray:
        if depth == k:
            top = T.descend(lead @ x, n, low)
            return T.lift(top, low, n) @ trail
        acc = 0
        for i in range(len(lam)):
            acc = acc + walk(depth + 1, lead @ vs[depth] @ lam[i], vs[k - 1 - depth] @ lam_star[i] @ trail)
        return acc

    return T.scalars.c(k, n) * walk(0, I, I)


# ---------------------------------------------------------------------------
# Reflections
# ---------------------------------------------------------------------------

def reflection_plus(T: Tower, n: int, x: np.ndarray) -> np.ndarray:
    """``r^+_{2n+1} = (rho^+_{2n+1})^{n+1}`` on ``B' ∩ A_{2n+1}``."""
    m = 2 * n + 1
    return iterate(lambda y: rho_plus(T, m, y), n + 1, x)


def reflection_minus(T: Tower, n: int, w: np.ndarray) -> np.ndarray:
    """``r^-_{2n+1} = (rho^-_{2n+1})^{n+1}`` on ``A' ∩ A_{2n+2}``."""
    m = 2 * n + 1
    return iterate(lambda y: rho_minus(T, m, y), n + 1, w)


def reflection_plus_iterated(T: Tower, n: int, x: np.ndarray) -> np.ndarray:
    """``r^+_1`` of the inclusion ``B ⊂ A_n``, evaluated on ``x ∈ B' ∩ A_{2n+1}``.

    Uses the composite quasi-basis of ``E^n_0`` and the Jones projection
    ``e_[-1,2n+1]``; the result equals ``r^+_{2n+1}(x)``.
    """
    top = 2 * n + 1
    f = multi_step_jones(T, n)
    mus = composite_quasi_basis(T, n).elements
    out = 0
    for mu in mus:
        mu_top = T.lift(mu, n, top)
        low = T.descend(f @ mu_top @ x, top, n)
        out = out + T.lift(low, n, top) @ f @ dagger(mu_top)
    return T.tau ** (-(n + 1)) * out


# ---------------------------------------------------------------------------
# Convolution
# ---------------------------------------------------------------------------

def convolve_pos(T: Tower, n: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``x * y = F^{-1}(F(y) F(x))`` on ``B' ∩ A_n``."""
    return inv_fourier(T, n, fourier(T, n, y) @ fourier(T, n, x))


def convolve_neg(T: Tower, n: int, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``w * z = F(F^{-1}(z) F^{-1}(w))`` on ``A' ∩ A_{n+1}``."""
    return fourier(T, n, inv_fourier(T, n, z) @ inv_fourier(T, n, w))


def convolve_shifted(T: Tower, n: int, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``w *_1 z``: the positive convolution of the inclusion ``A ⊂ A_1``."""
    return convolve_pos(T.view(1), n, w, z)


# ---------------------------------------------------------------------------
# Shifts
# ---------------------------------------------------------------------------

def _shift_plus_closed(T: Tower, n: int, x: np.ndarray) -> np.ndarray:
    top = 2 * n + 3
    xs = T.lift(x, 2 * n + 1, top)
    core = dagger(T.v(2 * n + 2, at=top)) @ xs @ T.v(top)
    out = sum(l @ core @ dagger(l) for l in T.lam(top))
    return T.tau ** (-(2 * n + 2)) * out


def shift_plus(T: Tower, n: int, x: np.ndarray, method: str = "closed") -> np.ndarray:
    """``S^+_n = r^+_{2n+3} ∘ r^+_{2n+1}``: ``B' ∩ A_{2n+1} → A_1' ∩ A_{2n+3}``."""
    if method == "closed":
        return _shift_plus_closed(T, n, x)
    if method == "composition":
        first = T.lift(reflection_plus(T, n, x), 2 * n + 1, 2 * n + 3)
        return reflection_plus(T, n + 1, first)
    raise ValueError(f"unknown method {method!r}")


def shift_minus(T: Tower, n: int, w: np.ndarray, method: str = "closed") -> np.ndarray:
    """``S^-_n = r^-_{2n+3} ∘ r^-_{2n+1}``: ``A' ∩ A_{2n+2} → A_2' ∩ A_{2n+4}``.

    The closed form is the one of ``S^+_n`` for ``A ⊂ A_1``.
    """
    if method == "closed":
        return _shift_plus_closed(T.view(1), n, w)
    if method == "composition":
        first = T.lift(reflection_minus(T, n, w), 2 * n + 2, 2 * n + 4)
        return reflection_minus(T, n + 1, first)
    raise ValueError(f"unknown method {method!r}")


def shift_level(j: int) -> int:
    """Smallest ``n`` with ``A' ∩ A_j ⊂ A' ∩ A_{2n+2}``."""
    return max(0, math.ceil((j - 2) / 2))


def canonical_shift(T: Tower, w: np.ndarray, j: int, method: str = "closed") -> np.ndarray:
    """``Γ(w)`` for ``w ∈ A' ∩ A_j``, returned at level ``j + 2``."""
    n = shift_level(j)
    out = shift_minus(T, n, T.lift(w, j, 2 * n + 2), method)
    return T.descend(out, 2 * n + 4, j + 2)


def canonical_shift_power(T: Tower, w: np.ndarray, j: int, k: int) -> np.ndarray:
    """``Γ^k(w)`` for ``w ∈ A' ∩ A_j``, returned at level ``j + 2k``."""
    for step in range(k):
        w = canonical_shift(T, w, j + 2 * step)
    return w


def canonical_shift_image(T: Tower, j: int, k: int = 1) -> MultiMatrixAlgebra:
    """``Γ^k(A' ∩ A_j)`` as a subalgebra of ``A_{j+2k}``, from images of matrix units."""
    src = T.relative_commutant(0, j)
    units = []
    for b, blk in enumerate(src.blocks):
        units.append([canonical_shift_power(T, src.unit_matrix(b, a, 0), j, k) for a in range(blk.size)])
    tgt = T.algebra(j + 2 * k)
    alg, _ = algebra_from_units(units, tgt.density, block_slices(tgt))
    return alg


def shift_odd_sides(T: Tower, n: int, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of ``S_{[n/2]}(F_n^{-1}(w)) = (F_n^{A⊂A_1}(w^*))^*`` at a common level."""
    k = n // 2
    x = T.lift(inv_fourier(T, n, w), n, 2 * k + 1)
    left = shift_plus(T, k, x)
    right = dagger(fourier(T.view(1), n, dagger(w)))
    top = max(2 * k + 3, n + 2)
    return T.lift(left, 2 * k + 3, top), T.lift(right, n + 2, top)
