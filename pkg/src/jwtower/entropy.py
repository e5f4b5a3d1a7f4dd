"""Entropy of finite-dimensional algebras, inclusion matrices and the growth
of the relative-commutant chain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mmalg import TOL, AlgebraError, MultiMatrixAlgebra, _finish, dagger, entropy_functional, fro
from .tower import Tower, lift_algebra



@dataclass(frozen=True)
class InclusionMatrix:
    """Multiplicities of the blocks of ``Q`` (rows) in the blocks of ``R`` (columns)."""

    matrix: np.ndarray
    connected: bool
    primitive: bool
    trace_residual: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=int))


@dataclass(frozen=True)
class PartitionOfUnity:
    elements: tuple[np.ndarray, ...]

    def validate(self, unit: np.ndarray, tol: float = TOL) -> None:
        total = sum(self.elements)
        if fro(total - unit) > tol * max(1.0, fro(unit)):
            raise AlgebraError("partition elements do not sum to the unit")
        for w in self.elements:
            if fro(w - dagger(w)) > tol * max(1.0, fro(w)):
                raise AlgebraError("partition element is not self-adjoint")
            ev = np.linalg.eigvalsh((w + dagger(w)) / 2)
            if ev.min() < -tol:
                raise AlgebraError(f"partition element has eigenvalue {ev.min():.3e} < 0")


# ---------------------------------------------------------------------------
# Algebra entropies
# ---------------------------------------------------------------------------

def algebra_entropy(Q: MultiMatrixAlgebra) -> float:
    """``-sum_k n_k s_k log s_k``: the entropy of the trace's density."""
    return float(-sum(b.size * b.weight * math.log(b.weight) for b in Q.blocks)) + 0.0


def density_spectrum_entropy(Q: MultiMatrixAlgebra) -> float:
    """Same quantity from the spectrum of the density matrix ``⊕ s_k 1_{n_k}``."""
    dens = np.diag(np.concatenate([np.full(b.size, b.weight) for b in Q.blocks]))
    w = np.linalg.eigvalsh(dens)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w))) + 0.0


def center_entropy(Q: MultiMatrixAlgebra) -> float:
    """Entropy of the center ``⊕ C z_k`` with weights ``tr(z_k) = n_k s_k``."""
    t = [b.size * b.weight for b in Q.blocks]
    return float(-sum(x * math.log(x) for x in t if x > 0)) + 0.0


# ---------------------------------------------------------------------------
# Inclusion matrices and Perron-Frobenius data
# ---------------------------------------------------------------------------

def is_irreducible(M: np.ndarray) -> bool:
    M = np.asarray(M)
    n = M.shape[0]
    reach = (np.eye(n) + (M > 0)).astype(float)
    acc = np.eye(n)
    for _ in range(max(n - 1, 1)):
        acc = np.minimum(acc @ reach, 1.0)
    return bool(np.all(acc > 0))


def is_primitive(M: np.ndarray) -> bool:
    """Some power of ``M`` is entrywise positive (Wielandt bound)."""
    M = (np.asarray(M) > 0).astype(float)
    n = M.shape[0]
    P = M.copy()
    for _ in range((n - 1) ** 2 + 1):
        if np.all(P > 0):
            return True
        P = np.minimum(P @ M, 1.0)
    return bool(np.all(P > 0))


def pf_eigen(M: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> tuple[float, np.ndarray]:
    """Perron–Frobenius eigenvalue and unit positive eigenvector by power iteration.

    Iterates with ``M + I`` so that periodic irreducible matrices converge too.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("pf_eigen needs a square matrix")
    if np.any(M < 0):
        raise ValueError("pf_eigen needs a nonnegative matrix")
    if not is_irreducible(M):
        raise ValueError("pf_eigen needs an irreducible matrix")
    n = M.shape[0]
    S = M + np.eye(n)
    v = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        u = S @ v
        u /= np.linalg.norm(u)
        if np.linalg.norm(u - v) <= tol:
            v = u
            break
        v = u
    beta = float(v @ M @ v)
    return beta, v


def inclusion_matrix(Q: MultiMatrixAlgebra, R: MultiMatrixAlgebra, tol: float = TOL) -> InclusionMatrix:
    """Multiplicity of each block of ``Q`` in each block of ``R`` (``Q ⊆ R``)."""
    G = np.zeros((len(Q.blocks), len(R.blocks)), dtype=int)
    for j in range(len(Q.blocks)):
        p = Q.unit_matrix(j, 0, 0)
        if R.residual(p) > 1e3 * tol:
            raise AlgebraError("Q is not contained in R")
        for k, c in enumerate(R.coords(p)):
            rank = float(np.real(np.trace(c)))
            G[j, k] = int(round(rank))
            if abs(rank - G[j, k]) > 1e-6:
                raise AlgebraError(f"non-integral multiplicity {rank}")
    if G.size and np.any(G.T @ np.array(Q.block_dims) > np.array(R.block_dims)):
        raise AlgebraError("inconsistent dimensions: multiplicities overflow the blocks of R")
    sq, sr = np.array(Q.trace_weights), np.array(R.trace_weights)
    resid = float(np.max(np.abs(sq - G @ sr))) if G.size else 0.0
    GG = G @ G.T
    connected = bool(G.size) and is_irreducible(GG) and is_irreducible(G.T @ G)
    primitive = connected and is_primitive(GG)
    return InclusionMatrix(G, connected, primitive, resid)


# ---------------------------------------------------------------------------
# Depth and growth
# ---------------------------------------------------------------------------

def _span_rank(mats: list[np.ndarray], tol: float) -> int:
    rows = np.array([m.ravel() for m in mats])
    s = np.linalg.svd(rows, compute_uv=False)
    return int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0


def _sandwich_rank(T: Tower, low, high, n: int, tol: float, cap: int) -> int | None:
    """Rank of ``span{x e_n y : x, y ∈ low}`` inside ``high`` at level ``n``; None if too large.

    Products are reduced to coordinates of ``high`` before the rank test, so the
    SVD has ``dim(high)`` columns rather than ``D_n^2``.
    """
    basis = [T.lift(x, n - 1, n) for x in low.basis()]
    if len(basis) ** 2 * high.dim > cap:
        return None
    e = T.jones(n)
    rows = []
    for x in basis:
        xe = x @ e
        for y in basis:
            rows.append(np.concatenate([c.ravel() for c in high.coords(xe @ y)]))
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0


@dataclass(frozen=True)
class DepthResult:
    finite: bool
    depth: int | None
    ranks: tuple[tuple[int, int, int], ...]  # (n, span rank, dim B'∩A_n)


def depth_detect(T: Tower, max_n: int = 2, tol: float = TOL, cap: int = 40_000_000) -> DepthResult:
    """Smallest ``n`` with ``(B'∩A_{n-1}) e_n (B'∩A_{n-1}) = B'∩A_n``."""
    ranks = []
    for n in range(1, min(max_n, T.max_level) + 1):
        low, high = T.relative_commutant(-1, n - 1), T.relative_commutant(-1, n)
        r = _sandwich_rank(T, low, high, n, tol, cap)
        if r is None:
            break
        ranks.append((n, r, high.dim))
        if r == high.dim:
            return DepthResult(True, n, tuple(ranks))
    return DepthResult(False, None, tuple(ranks))


def dual_stabilization(T: Tower, tol: float = TOL, cap: int = 40_000_000) -> int | None:
    """Smallest ``k0`` with ``(A'∩A_n) e_{n+1} (A'∩A_n) = A'∩A_{n+1}`` for ``n = 2k0, 2k0+1``."""
    k0 = 0
    while 2 * k0 + 2 <= T.max_level:
        ok = True
        for n in (2 * k0, 2 * k0 + 1):
            low, high = T.relative_commutant(0, n) if n > 0 else None, T.relative_commutant(0, n + 1)
            if n == 0:
                # A' ∩ A_0 is the center of A, spanned by its central projections
                A = T.algebra(0)
                mats = [T.lift(A.central_projection(k), 0, 1) for k in range(len(A.blocks))]
                e = T.jones(1)
                r = _span_rank([a @ e @ b for a in mats for b in mats], tol)
            else:
                r = _sandwich_rank(T, low, high, n + 1, tol, cap)
                if r is None:
                    return None
            if r != high.dim:
                ok = False
                break
        if ok:
            return k0
        k0 += 1
    return None


@dataclass(frozen=True)
class GrowthResult:
    n: tuple[int, ...]
    entropy: tuple[float, ...]
    slope: float


def entropy_growth(T: Tower, N: int) -> GrowthResult:
    """``H(A'∩A_{2n})`` for ``n = 0..N`` and the least-squares slope over the last
    ``ceil(N/2)`` points (at least two)."""
    if 2 * N > T.max_level:
        raise ValueError(f"entropy growth to N={N} needs level {2 * N}")
    ns, hs = [], []
    for n in range(N + 1):
        alg = T.relative_commutant(0, 2 * n) if n > 0 else _center_of_A(T)
        ns.append(n)
        hs.append(algebra_entropy(alg))
    k = max(2, math.ceil(N / 2))
    xs, ys = np.array(ns[-k:], dtype=float), np.array(hs[-k:])
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 else 0.0
    return GrowthResult(tuple(ns), tuple(hs), slope)


def _center_of_A(T: Tower) -> MultiMatrixAlgebra:
    A = T.algebra(0)
    parts = []
    for k, blk in enumerate(A.blocks):
        V = np.zeros((A.ambient_dim, blk.size))
        V[blk.index[0], np.arange(blk.size)] = 1.0
        parts.append((1, V, None))
    return _finish(A.ambient_dim, parts, A.density, sort=True)


@dataclass(frozen=True)
class ShiftEntropy:
    value: float
    beta: float
    k0: int
    inclusion: InclusionMatrix
    eigen_residual: float
    index_residual: float
    slope: float | None
    implied_relative_entropy: float
    method: str = "log Perron-Frobenius eigenvalue of G G^t at the stabilized level"


def shift_entropy(T: Tower, tol: float = TOL) -> ShiftEntropy:
    """``H_tr(Γ) = log β`` with ``β`` the Perron–Frobenius eigenvalue of ``G G^t``."""
    k0 = dual_stabilization(T, tol)
    if k0 is None:
        raise AlgebraError("finite depth not established within the available levels")
    Q, R = chain_step(T, 2 * k0)
    inc = inclusion_matrix(Q, R, tol)
    GG = (inc.matrix @ inc.matrix.T).astype(float)
    beta, vec = pf_eigen(GG)
    s = np.array(Q.trace_weights)
    eig_res = float(np.linalg.norm(GG @ vec - beta * vec))
    idx_res = float(np.linalg.norm(GG @ s - T.index * s) / np.linalg.norm(s))
    slope = None
    N = T.max_level // 2
    if N >= 1:
        slope = entropy_growth(T, N).slope
    value = math.log(beta)
    return ShiftEntropy(value, beta, k0, inc, eig_res, idx_res, slope, 2 * math.log(T.index))


def chain_step(T: Tower, m: int) -> tuple[MultiMatrixAlgebra, MultiMatrixAlgebra]:
    """``A'∩A_m ⊆ A'∩A_{m+1}``, both realized inside level ``m + 1``."""
    Q = T.relative_commutant(0, m) if m > 0 else _center_of_A(T)
    return lift_algebra(T, Q, m, m + 1), T.relative_commutant(0, m + 1)


# ---------------------------------------------------------------------------
# Relative entropy of a partition of unity
# ---------------------------------------------------------------------------

def partition_relative_entropy(M: MultiMatrixAlgebra, N: MultiMatrixAlgebra, gamma: PartitionOfUnity,
                               unit: np.ndarray | None = None, tol: float = TOL) -> float:
    """``sum_j tr η E_N(w_j) - tr η E_M(w_j)``, a lower bound for ``H(M|N)``."""
    unit = np.eye(M.ambient_dim) if unit is None else unit
    gamma.validate(unit, tol)
    total = 0.0
    for w in gamma.elements:
        total += entropy_functional(N.expect(w), N, tol) - entropy_functional(M.expect(w), M, tol)
    return total
