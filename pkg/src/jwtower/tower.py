"""Basic-construction towers ``B = A_{-1} ⊂ A = A_0 ⊂ A_1 ⊂ ...``.

Every level is kept in minimal faithful form: ``A_m`` is the full
block-diagonal algebra on ``C^{D_m}`` with its Markov trace.  Going from
``A_m`` to ``A_{m+1}`` uses the Bratteli data of ``A_{m-1} ⊂ A_m``: for a
minimal projection ``f_j`` in each block of ``A_{m-1}`` the left ideal
``A_m f_j`` with the ``tr_m`` inner product carries block ``j`` of
``A_{m+1}``, left multiplication gives the embedding of ``A_m``, and the
Jones projection is the orthogonal projection onto ``A_{m-1} f_j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .mmalg import (
    DEFAULT_CAP,
    TOL,
    AlgebraError,
    DimensionCapError,
    MultiMatrixAlgebra,
    _finish,
    _selector_block,
    algebra_from_span,
    algebra_from_units,
    block_slices,
    commutant_from_units,
    dagger,
    fro,
    rel_residual,
    standard_algebra,
)


@dataclass(frozen=True)
class InclusionSpec:
    """``tensor``: ``M_k ⊗ 1_d ⊂ M_k ⊗ M_d``.  ``explicit``: generators of B inside
    the block-diagonal algebra with block sizes ``a_blocks``."""

    kind: str = "tensor"
    k: int = 1
    d: int = 2
    a_blocks: tuple[int, ...] = ()
    b_generators: tuple = ()

    def __post_init__(self):
        if self.kind == "tensor":
            if self.k < 1 or self.d < 1:
                raise ValueError(f"tensor model needs k >= 1 and d >= 1, got k={self.k}, d={self.d}")
        elif self.kind == "explicit":
            if not self.a_blocks or any(int(n) < 1 for n in self.a_blocks):
                raise ValueError("explicit model needs positive a_blocks")
            D = int(sum(self.a_blocks))
            for g in self.b_generators:
                if np.shape(g) != (D, D):
                    raise ValueError(f"generator shape {np.shape(g)} does not match ambient size {D}")
        else:
            raise ValueError(f"unknown inclusion kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "tensor":
            return f"M{self.k}(x)1_{self.d} in M{self.k * self.d}"
        return f"explicit A={list(self.a_blocks)}"


@dataclass(frozen=True)
class TowerScalars:
    index: float
    tau: float
    delta: float

    @classmethod
    def from_index(cls, index: float) -> "TowerScalars":
        return cls(index, 1.0 / index, math.sqrt(index))

    def c(self, k: int, n: int) -> float:
        """``tau^(C(k,2) - k n)``."""
        return self.tau ** (k * (k - 1) // 2 - k * n)


@dataclass(frozen=True, eq=False)
class Level:
    n: int
    algebra: MultiMatrixAlgebra
    embed_prev: MultiMatrixAlgebra | None
    jones: np.ndarray | None


@dataclass(frozen=True, eq=False)
class QuasiBasis:
    """Elements ``λ_i`` (matrices at level ``level``) for the expectation onto ``level - 1``."""

    elements: tuple[np.ndarray, ...]
    level: int

    def __len__(self) -> int:
        return len(self.elements)


# ---------------------------------------------------------------------------
# Level construction
# ---------------------------------------------------------------------------

def _copy_homes(emb: MultiMatrixAlgebra, slices: list[np.ndarray]) -> list[list[int]]:
    """For each block of ``emb`` the ambient block containing each of its copies."""
    owner = np.empty(emb.ambient_dim, dtype=int)
    for k, idx in enumerate(slices):
        owner[idx] = k
    homes = []
    for blk in emb.blocks:
        hs = []
        for c in range(blk.mult):
            col = np.abs(blk.copy(c))
            rows = np.nonzero(col.max(axis=1) > 1e-12)[0]
            ks = set(owner[rows])
            if len(ks) != 1:
                raise AlgebraError("embedding copy straddles several blocks")
            hs.append(ks.pop())
        homes.append(hs)
    return homes


def _basic_construction(Q: Level, R: Level, tau: float, cap: int) -> Level:
    """Level ``m+1`` from levels ``m-1`` (Q) and ``m`` (R)."""
    emb = R.embed_prev
    r_alg = R.algebra
    r_slices = block_slices(r_alg)
    r_dims = r_alg.block_dims
    r_weights = r_alg.trace_weights
    homes = _copy_homes(emb, r_slices)

    q_blocks = Q.algebra.blocks
    p_dims = []
    for j, blk in enumerate(q_blocks):
        p_dims.append(sum(r_dims[k] for k in homes[j]))
    new_weights = [tau * b.weight for b in q_blocks]
    dim_new = sum(p * p for p in p_dims)
    if dim_new > cap:
        raise DimensionCapError(f"level {R.n + 1} has dimension {dim_new} > cap {cap}")
    order = sorted(range(len(q_blocks)), key=lambda j: (p_dims[j], -round(new_weights[j], 12), j))

    D_new = sum(p_dims)
    jones = np.zeros((D_new, D_new), dtype=complex)
    r_index = {k: [] for k in range(len(r_dims))}
    offset = 0
    for j in order:
        blk = emb.blocks[j]
        t_j = blk.weight
        seg = offset
        vecs = np.zeros((blk.size, p_dims[j]), dtype=complex)
        for k in range(len(r_dims)):
            cs = [c for c, h in enumerate(homes[j]) if h == k]
            nk = r_dims[k]
            for b, c in enumerate(cs):
                pos = seg - offset + b * nk
                r_index[k].append(seg + b * nk + np.arange(nk))
                rows = blk.copy(c)[r_slices[k], :]
                vecs[:, pos:pos + nk] = np.sqrt(r_weights[k] / t_j) * rows.T
            seg += len(cs) * nk
        sl = slice(offset, offset + p_dims[j])
        jones[sl, sl] = vecs.T @ vecs.conj()
        offset += p_dims[j]

    dims_sorted = [p_dims[j] for j in order]
    weights_sorted = [new_weights[j] for j in order]
    alg = standard_algebra(dims_sorted, weights_sorted)
    parts = []
    for k in range(len(r_dims)):
        b = _selector_block(D_new, np.array(r_index[k]), 0.0)
        parts.append((b.size, b.isometry, b.index))
    embed = _finish(D_new, parts, alg.density, sort=False)
    return Level(R.n + 1, alg, embed, jones)


def _base_levels(spec: InclusionSpec, tol: float):
    """Levels -1 and 0, the inclusion matrix and the index."""
    if spec.kind == "tensor":
        k, d = spec.k, spec.d
        B = standard_algebra([k], [1.0 / k])
        A = standard_algebra([k * d], [1.0 / (k * d)])
        index = np.arange(k)[None, :] * d + np.arange(d)[:, None]
        blk = _selector_block(k * d, index, 0.0)
        emb = _finish(k * d, [(blk.size, blk.isometry, blk.index)], A.density, sort=False)
        return Level(-1, B, None, None), Level(0, A, emb, None), np.array([[d]]), float(d * d)

    a_blocks = [int(n) for n in spec.a_blocks]
    D = sum(a_blocks)
    gens = [np.asarray(g, dtype=complex) for g in spec.b_generators]
    if not gens:
        gens = [np.eye(D, dtype=complex)]
    a_shape = standard_algebra(a_blocks, [1.0] * len(a_blocks))
    slices = block_slices(a_shape)
    for g in gens:
        if a_shape.residual(g) > tol * 1e3:
            raise AlgebraError("generator does not lie in the block-diagonal algebra A")
    img = algebra_from_span(gens, partition=slices, unital=True, tol=tol)
    homes = _copy_homes(img, slices)
    Lam = np.zeros((len(img.blocks), len(a_blocks)), dtype=int)
    for j, hs in enumerate(homes):
        for h in hs:
            Lam[j, h] += 1
    from .entropy import pf_eigen  # local import: entropy depends on tower

    beta, s = pf_eigen((Lam.T @ Lam).astype(float))
    s = s / float(np.dot(s, a_blocks))
    A = standard_algebra(a_blocks, list(s))
    emb = img.with_density(A.density)
    B = standard_algebra(emb.block_dims, emb.trace_weights)
    if rel_residual(emb.unit, np.eye(D)) > tol * 1e3:
        raise AlgebraError("embedding of B is not unital")
    return Level(-1, B, None, None), Level(0, A, emb, None), Lam, float(beta)


def _tensor_quasi_basis(spec: InclusionSpec) -> QuasiBasis:
    k, d = spec.k, spec.d
    out = []
    for p in range(d):
        for q in range(d):
            epq = np.zeros((d, d))
            epq[p, q] = 1.0
            out.append(np.sqrt(d) * np.kron(np.eye(k), epq).astype(complex))
    return QuasiBasis(tuple(out), 0)


def _orthogonalized_quasi_basis(A: MultiMatrixAlgebra, expect, tol: float) -> QuasiBasis:
    """Gram-Schmidt for the B-valued pairing ``<x, y> = E(x^* y)``."""
    lams: list[np.ndarray] = []
    D = A.ambient_dim
    cands = []
    for k, blk in enumerate(A.blocks):
        for a in range(blk.size):
            for b in range(blk.size):
                cands.append(A.unit_matrix(k, a, b))
    for c in cands:
        r = c - sum((l @ expect(dagger(l) @ c) for l in lams), np.zeros((D, D), dtype=complex))
        h = expect(dagger(r) @ r)
        h = (h + dagger(h)) / 2
        w, U = np.linalg.eigh(h)
        if w.max() <= tol * max(1.0, fro(c)):
            continue
        keep = w > tol * w.max()
        inv_sqrt = (U[:, keep] / np.sqrt(w[keep])) @ dagger(U[:, keep])
        lams.append(r @ inv_sqrt)
    return QuasiBasis(tuple(lams), 0)


# ---------------------------------------------------------------------------
# Tower
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Tower:
    """A built tower, or a re-indexed view of one (``offset > 0``).

    Level ``m`` of a view with offset ``j`` is ``A_{m+j}`` of the underlying
    tower; all indices passed to methods are relative to the view.
    """

    spec: InclusionSpec
    scalars: TowerScalars
    levels: tuple[Level, ...]
    quasi_basis: QuasiBasis
    inclusion_matrix: np.ndarray
    offset: int = 0
    cap: int = DEFAULT_CAP
    tol: float = TOL
    cache: dict = field(default_factory=dict, repr=False)

    # -- indexing ------------------------------------------------------
    @property
    def tau(self) -> float:
        return self.scalars.tau

    @property
    def delta(self) -> float:
        return self.scalars.delta

    @property
    def index(self) -> float:
        return self.scalars.index

    @property
    def max_level(self) -> int:
        return len(self.levels) - 2 - self.offset

    @property
    def simple(self) -> bool:
        return len(self.levels[0].algebra.blocks) == 1 and len(self.levels[1].algebra.blocks) == 1

    def _abs(self, n: int) -> int:
        return n + self.offset

    def level(self, n: int) -> Level:
        if n < -1 or n > self.max_level:
            raise IndexError(f"level {n} not available (max {self.max_level})")
        return self.levels[self._abs(n) + 1]

    def algebra(self, n: int) -> MultiMatrixAlgebra:
        return self.level(n).algebra

    def dim(self, n: int) -> int:
        return self.algebra(n).ambient_dim

    def jones(self, n: int) -> np.ndarray:
        if n < 1:
            raise IndexError("Jones projections start at e_1")
        return self.level(n).jones

    def identity(self, n: int) -> np.ndarray:
        return np.eye(self.dim(n), dtype=complex)

    # -- moving between levels ----------------------------------------
    def lift(self, x: np.ndarray, src: int, dst: int) -> np.ndarray:
        """Image of ``x`` (at level ``src``) in level ``dst >= src``."""
        if dst < src:
            raise ValueError("lift goes up the tower")
        for m in range(src, dst):
            nxt = self.level(m + 1)
            x = nxt.embed_prev.embed(self.algebra(m).coords(x))
        return x

    def expect(self, n: int, x: np.ndarray) -> np.ndarray:
        """``E_n``: level ``n`` onto level ``n - 1``."""
        lev = self.level(n)
        return self.algebra(n - 1).embed(lev.embed_prev.coords(x))

    def descend(self, x: np.ndarray, src: int, dst: int) -> np.ndarray:
        """``E^{src}_{dst+1}``: level ``src`` onto level ``dst``."""
        for m in range(src, dst, -1):
            x = self.expect(m, x)
        return x

    def trace(self, n: int, x: np.ndarray) -> complex:
        return self.algebra(n).trace(x)

    # -- words ---------------------------------------------------------
    def e(self, i: int, at: int) -> np.ndarray:
        """Jones projection ``e_i`` realized at level ``at``."""
        key = ("e", self._abs(i), self._abs(at))
        if key not in self.cache:
            self.cache[key] = self.lift(self.jones(i), i, at)
        return self.cache[key]

    def v(self, n: int, k: int = 1, at: int | None = None) -> np.ndarray:
        """``v^{(k)}_n = e_n e_{n-1} ... e_k`` at level ``at`` (default ``n``)."""
        at = n if at is None else at
        if not 1 <= k <= n:
            raise IndexError(f"v-word needs 1 <= k <= n, got k={k}, n={n}")
        key = ("v", self._abs(n), self._abs(k), self._abs(at))
        if key not in self.cache:
            w = self.identity(at)
            for i in range(n, k - 1, -1):
                w = w @ self.e(i, at)
            self.cache[key] = w
        return self.cache[key]

    def lam(self, at: int) -> tuple[np.ndarray, ...]:
        """Quasi-basis of ``E_0`` realized at level ``at``."""
        key = ("lam", self.offset, at)
        if key not in self.cache:
            self.cache[key] = tuple(self.lift(l, 0, at) for l in self.quasi_basis.elements)
        return self.cache[key]

    # -- subalgebras ---------------------------------------------------
    def image(self, k: int, m: int) -> tuple[MultiMatrixAlgebra, list[list[int]]]:
        """``A_k`` as a subalgebra of ``A_m`` with partition-pure copies."""
        key = ("image", self._abs(k), self._abs(m))
        if key not in self.cache:
            src = self.algebra(k)
            units = []
            for j, blk in enumerate(src.blocks):
                units.append([self.lift(src.unit_matrix(j, a, 0), k, m) for a in range(blk.size)])
            tgt = self.algebra(m)
            self.cache[key] = algebra_from_units(units, tgt.density, block_slices(tgt), sort=False)
        return self.cache[key]

    def relative_commutant(self, k: int, m: int) -> MultiMatrixAlgebra:
        """``A_k' ∩ A_m`` (``k = -1`` is ``B``) with the trace of level ``m``."""
        if not -1 <= k < m:
            raise IndexError(f"relative commutant needs -1 <= k < m, got ({k}, {m})")
        key = ("rc", self._abs(k), self._abs(m))
        if key not in self.cache:
            alg, homes = self.image(k, m)
            rc = commutant_from_units(alg, homes, len(self.algebra(m).blocks))
            if rc.dim > self.cap:
                raise DimensionCapError(f"relative commutant dimension {rc.dim} > cap {self.cap}")
            self.cache[key] = rc
        return self.cache[key]

    def commutant_expectation(self, n: int, x: np.ndarray) -> np.ndarray:
        """``E^{B'∩A_n}_{A'∩A_n}(x) = tau * sum_i λ_i x λ_i^*``."""
        lam = self.lam(n)
        return self.tau * sum(l @ x @ dagger(l) for l in lam)

    # -- views ---------------------------------------------------------
    def view(self, j: int) -> "Tower":
        """The tower of ``A_{j-1} ⊂ A_j`` inside this one."""
        if j == 0:
            return self
        if j < 0 or j > self.max_level:
            raise IndexError(f"cannot shift by {j} with max level {self.max_level}")
        out = self
        for _ in range(j):
            e1 = out.jones(1)
            qb = tuple(out.tau ** -0.5 * out.lift(l, 0, 1) @ e1 for l in out.quasi_basis.elements)
            out = replace(out, offset=out.offset + 1, quasi_basis=QuasiBasis(qb, 0))
        return out


def build_base(spec: InclusionSpec, cap: int = DEFAULT_CAP, tol: float = TOL) -> Tower:
    """Levels -1 and 0 with the Markov trace and the quasi-basis of ``E_0``."""
    lb, la, lam, beta = _base_levels(spec, tol)
    scalars = TowerScalars.from_index(beta)
    tower = Tower(spec, scalars, (lb, la), QuasiBasis((), 0), lam, cap=cap, tol=tol)
    return replace(tower, quasi_basis=quasi_basis_build(tower))


def quasi_basis_build(tower: Tower) -> QuasiBasis:
    if tower.spec.kind == "tensor":
        qb = _tensor_quasi_basis(tower.spec)
    else:
        qb = _orthogonalized_quasi_basis(tower.algebra(0), lambda x: tower.lift(tower.expect(0, x), -1, 0),
                                         tower.tol)
    A = tower.algebra(0)
    worst = max(rel_residual(sum(l @ tower.lift(tower.expect(0, dagger(l) @ x), -1, 0) for l in qb.elements), x)
                for x in A.basis())
    if worst > 1e3 * tower.tol:
        raise AlgebraError(f"expectation not of index-finite type at tolerance (residual {worst:.2e})")
    return qb


def extend_to(tower: Tower, n: int) -> Tower:
    """Extend the tower so that level ``n`` exists."""
    if n < 1:
        raise ValueError("extend_to needs n >= 1")
    levels = list(tower.levels)
    target = n + tower.offset
    while len(levels) - 2 < target:
        levels.append(_basic_construction(levels[-2], levels[-1], tower.tau, tower.cap))
    return replace(tower, levels=tuple(levels))


def build(spec: InclusionSpec, n: int, cap: int = DEFAULT_CAP, tol: float = TOL) -> Tower:
    return extend_to(build_base(spec, cap, tol), n)


# ---------------------------------------------------------------------------
# Words and derived families
# ---------------------------------------------------------------------------

def v_word(tower: Tower, n: int, k: int = 1) -> np.ndarray:
    return tower.v(n, k)


def expectation_chain(tower: Tower, k: int, n: int, x: np.ndarray) -> np.ndarray:
    """``E^n_k = E_k ∘ ... ∘ E_n`` applied to ``x`` at level ``n``."""
    if not 0 <= k <= n:
        raise IndexError(f"expectation chain needs 0 <= k <= n, got ({k}, {n})")
    return tower.descend(x, n, k - 1)


def multi_step_jones(tower: Tower, n: int) -> np.ndarray:
    """``e_[-1,2n+1]``, the Jones projection of ``B ⊂ A_n``, at level ``2n+1``."""
    top = 2 * n + 1
    out = tower.identity(top)
    for t in range(n + 1):
        out = out @ tower.v(n + 1 + t, 1 + t, at=top)
    return tower.tau ** (-n * (n + 1) / 2) * out


def composite_quasi_basis(tower: Tower, n: int) -> QuasiBasis:
    """Quasi-basis of ``E^n_0`` built from words ``λ v_n^* λ v_{n-1}^* ... v_1^* λ``."""
    if n == 0:
        return tower.quasi_basis
    lam = tower.lam(n)
    vs = [dagger(tower.v(m, at=n)) for m in range(n, 0, -1)]
    scale = tower.tau ** (-n * (n + 1) / 4)
    out = []
    for idx in itertools.product(range(len(lam)), repeat=n + 1):
        w = lam[idx[0]]
        for vstar, i in zip(vs, idx[1:]):
            w = w @ vstar @ lam[i]
        out.append(scale * w)
    return QuasiBasis(tuple(out), n)


def shifted_view(tower: Tower, j: int) -> Tower:
    return tower.view(j)


def lift_algebra(tower: Tower, Q: MultiMatrixAlgebra, src: int, dst: int) -> MultiMatrixAlgebra:
    """A subalgebra of level ``src`` re-realized inside level ``dst``."""
    units = [[tower.lift(Q.unit_matrix(j, a, 0), src, dst) for a in range(b.size)] for j, b in enumerate(Q.blocks)]
    tgt = tower.algebra(dst)
    alg, _ = algebra_from_units(units, tgt.density, block_slices(tgt))
    return alg


# ---------------------------------------------------------------------------
# Structural checks (residuals, not assertions)
# ---------------------------------------------------------------------------

def tl_residual(tower: Tower, top: int | None = None) -> float:
    """Worst violation of the Temperley–Lieb relations among ``e_1..e_top``."""
    top = tower.max_level if top is None else top
    es = [tower.e(i, top) for i in range(1, top + 1)]
    tau = tower.tau
    worst = 0.0
    for i, ei in enumerate(es):
        worst = max(worst, rel_residual(ei @ ei, ei), rel_residual(dagger(ei), ei))
        for j, ej in enumerate(es):
            if abs(i - j) == 1:
                worst = max(worst, rel_residual(ei @ ej @ ei, tau * ei))
            elif abs(i - j) >= 2:
                worst = max(worst, rel_residual(ei @ ej, ej @ ei))
    return worst


def markov_residual(tower: Tower, n: int, rng: np.random.Generator, samples: int) -> float:
    """``tr_n(x e_n) = tau tr_{n-1}(x)`` for random ``x`` at level ``n - 1``."""
    worst = 0.0
    alg = tower.algebra(n - 1)
    for _ in range(samples):
        x = alg.random(rng)
        lhs = tower.trace(n, tower.lift(x, n - 1, n) @ tower.jones(n))
        rhs = tower.tau * tower.trace(n - 1, x)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def pushdown_residual(tower: Tower, rng: np.random.Generator, samples: int) -> float:
    """``x e_1 = tau^{-1} E_1(x e_1) e_1`` for random ``x`` in ``A_1``."""
    worst = 0.0
    e1 = tower.jones(1)
    for _ in range(samples):
        x = tower.algebra(1).random(rng)
        x0 = tower.expect(1, x @ e1) / tower.tau
        worst = max(worst, rel_residual(x @ e1, tower.lift(x0, 0, 1) @ e1))
    return worst


def trace_restriction_residual(tower: Tower, n: int, rng: np.random.Generator, samples: int) -> float:
    """``tr_n`` restricted to level ``n - 1`` equals ``tr_{n-1}``."""
    worst = 0.0
    for _ in range(samples):
        x = tower.algebra(n - 1).random(rng)
        a, b = tower.trace(n, tower.lift(x, n - 1, n)), tower.trace(n - 1, x)
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return worst


def quasi_basis_residuals(tower: Tower, qb: QuasiBasis | None = None, level: int = 0) -> dict[str, float]:
    """Reconstruction, index and ``sum λ e λ^* = 1`` residuals for a quasi-basis of ``E_level``."""
    qb = tower.quasi_basis if qb is None else qb
    lam = [tower.lift(l, qb.level, level) for l in qb.elements]
    top = level + 1
    out = {}
    worst = 0.0
    for x in tower.algebra(level).basis():
        rec = sum(l @ tower.lift(tower.expect(level, dagger(l) @ x), level - 1, level) for l in lam)
        worst = max(worst, rel_residual(rec, x))
    out["reconstruction"] = worst
    idx = sum(l @ dagger(l) for l in lam)
    out["index"] = rel_residual(idx, tower.index * tower.identity(level))
    if tower.max_level >= top:
        e = tower.jones(top)
        s = sum(tower.lift(l, level, top) @ e @ dagger(tower.lift(l, level, top)) for l in lam)
        out["jones_sum"] = rel_residual(s, tower.identity(top))
    return out
