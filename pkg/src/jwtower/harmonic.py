"""κ constants and signed margins for the Fourier-theoretic inequalities.

Every margin is oriented so that ``margin >= -tol`` means the inequality holds.
Norms, supports and entropies are taken in the level algebra that contains the
element; the trace of a relative commutant is the restriction of that level's
trace, so the values agree with the intrinsic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .fourier import convolve_neg, convolve_pos, fourier, inv_fourier
from .mmalg import MultiMatrixAlgebra, dagger, entropy_functional, p_norm, support_size
from .tower import Tower, v_word


@dataclass(frozen=True)
class InequalityMargin:
    name: str
    params: dict
    witness: str
    margin: float
    samples: int = 1
    extra: dict = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        return math.isfinite(self.margin) and self.margin >= -tol


def conjugate(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1)


# ---------------------------------------------------------------------------
# κ constants
# ---------------------------------------------------------------------------

def _min_weight(alg: MultiMatrixAlgebra) -> float:
    return float(min(alg.trace_weights))


def kappa(T: Tower, n: int, sign: str) -> float:
    """``κ^+_n``: least trace of a minimal projection of ``B'∩A_n``;
    ``κ^-_n``: the same for ``A'∩A_{n+1}``; ``sign="0"`` gives ``κ_n``."""
    if sign == "+":
        return _min_weight(T.relative_commutant(-1, n))
    if sign == "-":
        return _min_weight(T.relative_commutant(0, n + 1))
    if sign == "0":
        return math.sqrt(kappa(T, n, "+") * kappa(T, n, "-"))
    raise ValueError(f"unknown sign {sign!r}")


# ---------------------------------------------------------------------------
# Single-element margins
# ---------------------------------------------------------------------------

def hausdorff_young_margin(T: Tower, n: int, x: np.ndarray, p: float, inverse: bool = False,
                           witness: str = "sample") -> InequalityMargin:
    """``|x|_q <= |F_n(x)|_p <= (δ/κ_{n-1})^{1-2/p} |x|_q``.

    With ``inverse=True``, ``x`` is ``w ∈ A'∩A_{n+1}`` and ``F_n^{-1}`` is used.
    """
    if p < 2:
        raise ValueError("Hausdorff-Young needs p >= 2")
    q = conjugate(p)
    if inverse:
        y, src, dst = inv_fourier(T, n, x), n + 1, n
    else:
        y, src, dst = fourier(T, n, x), n, n + 1
    xq = p_norm(x, T.algebra(src), q)
    yp = p_norm(y, T.algebra(dst), p)
    expo = 1.0 if math.isinf(p) else 1.0 - 2.0 / p
    const = (T.delta / kappa(T, n - 1, "0")) ** expo
    margin = min(yp - xq, const * xq - yp)
    name = "hausdorff-young" + ("-inverse" if inverse else "")
    return InequalityMargin(name, {"n": n, "p": p, "q": q}, witness, margin,
                            extra={"lower_gap": yp - xq, "upper_gap": const * xq - yp})


def fourier_isometry_defect(T: Tower, n: int, x: np.ndarray) -> float:
    """``| |F_n(x)|_2 - |x|_2 |``."""
    return abs(p_norm(fourier(T, n, x), T.algebra(n + 1), 2) - p_norm(x, T.algebra(n), 2))


def donoho_stark_margin(T: Tower, n: int, x: np.ndarray, inverse: bool = False,
                        witness: str = "sample") -> InequalityMargin:
    """``S(x) S(F_n(x)) - κ_{n-1}^2 / [A:B]_0``."""
    if not np.any(x):
        raise ValueError("Donoho-Stark needs x != 0")
    if inverse:
        y, src, dst = inv_fourier(T, n, x), n + 1, n
    else:
        y, src, dst = fourier(T, n, x), n, n + 1
    prod = support_size(x, T.algebra(src), T.tol) * support_size(y, T.algebra(dst), T.tol)
    bound = kappa(T, n - 1, "0") ** 2 / T.index
    name = "donoho-stark" + ("-inverse" if inverse else "")
    return InequalityMargin(name, {"n": n}, witness, prod - bound, extra={"product": prod, "bound": bound})


def hirschman_beckner_margin(T: Tower, n: int, x: np.ndarray, inverse: bool = False,
                             witness: str = "sample") -> InequalityMargin:
    """``(H(|F_n x|^2) + H(|x|^2))/2 + |x|_2^2 (log(δ/κ_{n-1}) + log |x|_2^2)``."""
    if not np.any(x):
        raise ValueError("Hirschman-Beckner needs x != 0")
    if inverse:
        y, src, dst = inv_fourier(T, n, x), n + 1, n
    else:
        y, src, dst = fourier(T, n, x), n, n + 1
    As, Ad = T.algebra(src), T.algebra(dst)
    h = 0.5 * (entropy_functional(dagger(y) @ y, Ad, T.tol) + entropy_functional(dagger(x) @ x, As, T.tol))
    n2 = p_norm(x, As, 2) ** 2
    rhs = -n2 * (math.log(T.delta / kappa(T, n - 1, "0")) + math.log(n2))
    name = "hirschman-beckner" + ("-inverse" if inverse else "")
    return InequalityMargin(name, {"n": n}, witness, h - rhs, extra={"entropy": h, "bound": rhs})


def young_margin(T: Tower, side: str, x: np.ndarray, y: np.ndarray, p: float, q: float, r: float,
                 witness: str = "sample") -> InequalityMargin:
    """``C |x|_p |y|_q - |x * y|_r`` on ``B'∩A_1`` (side ``+``, ``C = δ/κ^+_0``)
    or ``A'∩A_2`` (side ``-``, ``C = δ/κ^-_0``)."""
    inv = lambda t: 0.0 if math.isinf(t) else 1.0 / t  # noqa: E731
    if min(p, q, r) < 1 or abs(inv(p) + inv(q) - inv(r) - 1.0) > 1e-12:
        raise ValueError(f"exponents ({p}, {q}, {r}) violate 1/p + 1/q = 1/r + 1")
    if side == "+":
        alg, xy, const = T.algebra(1), convolve_pos(T, 1, x, y), T.delta / kappa(T, 0, "+")
    elif side == "-":
        alg, xy, const = T.algebra(2), convolve_neg(T, 1, x, y), T.delta / kappa(T, 0, "-")
    else:
        raise ValueError(f"unknown side {side!r}")
    lhs = p_norm(xy, alg, r)
    rhs_norms = p_norm(x, alg, p) * p_norm(y, alg, q)
    ratio = lhs / rhs_norms if rhs_norms > 0 else 0.0
    return InequalityMargin("young", {"side": side, "p": p, "q": q, "r": r}, witness,
                            const * rhs_norms - lhs, extra={"ratio": ratio, "constant": const})


# ---------------------------------------------------------------------------
# Witnesses and samplers
# ---------------------------------------------------------------------------

def _jones_words(T: Tower, lo: int, hi: int, at: int) -> list[tuple[str, np.ndarray]]:
    """Descending Jones words ``e_j e_{j-1} ... e_i`` with ``lo <= i <= j <= hi``."""
    out = []
    for j in range(lo, hi + 1):
        for i in range(lo, j + 1):
            out.append((f"e{j}..e{i}" if i < j else f"e{j}", T.lift(v_word(T, j, i), j, at)))
    return out


def _minimal_projections(alg: MultiMatrixAlgebra, label: str) -> list[tuple[str, np.ndarray]]:
    return [(f"min-proj {label} block {k}", alg.unit_matrix(k, 0, 0)) for k in range(len(alg.blocks))]


def witnesses_plus(T: Tower, n: int) -> list[tuple[str, np.ndarray]]:
    """Deterministic elements of ``B'∩A_n``: 1, Jones words in ``e_1..e_n`` and minimal projections."""
    out = [("1", T.identity(n))]
    out += _jones_words(T, 1, n, n)
    out += _minimal_projections(T.relative_commutant(-1, n), "B'∩A_n")
    return out


def witnesses_minus(T: Tower, n: int) -> list[tuple[str, np.ndarray]]:
    """Deterministic elements of ``A'∩A_{n+1}``: 1, Jones words in ``e_2..e_{n+1}`` and minimal projections."""
    out = [("1", T.identity(n + 1))]
    out += _jones_words(T, 2, n + 1, n + 1)
    out += _minimal_projections(T.relative_commutant(0, n + 1), "A'∩A_n+1")
    return out


def random_rank_one(alg: MultiMatrixAlgebra, rng: np.random.Generator) -> np.ndarray:
    """``u v^*`` inside one randomly chosen block: a low-support sample."""
    k = int(rng.integers(len(alg.blocks)))
    coords = [np.zeros((b.size, b.size), dtype=complex) for b in alg.blocks]
    n = alg.blocks[k].size
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    coords[k] = np.outer(u, v.conj())
    return alg.embed(coords)


def mixed_samples(alg: MultiMatrixAlgebra, rng: np.random.Generator, count: int) -> Iterable[np.ndarray]:
    """Alternate Gaussian and rank-one samples, each normalized to unit 2-norm."""
    for i in range(count):
        x = alg.random(rng) if i % 2 == 0 else random_rank_one(alg, rng)
        yield x / p_norm(x, alg, 2)


def worst(margins: Iterable[InequalityMargin]) -> InequalityMargin:
    """The smallest margin, carrying the total sample count."""
    ms = list(margins)
    if not ms:
        raise ValueError("no margins")
    low = min(ms, key=lambda m: m.margin)
    extra = dict(low.extra)
    ratios = [m.extra["ratio"] for m in ms if "ratio" in m.extra]
    if ratios:
        extra["max_ratio"] = max(ratios)
    return InequalityMargin(low.name, low.params, low.witness, low.margin, len(ms), extra)


def sweep(fn: Callable[[np.ndarray, str], InequalityMargin], witnesses, samples) -> InequalityMargin:
    margins = [fn(x, name) for name, x in witnesses]
    margins += [fn(x, "sample") for x in samples]
    return worst(margins)
