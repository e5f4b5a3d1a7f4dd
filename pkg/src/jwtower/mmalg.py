"""Finite-dimensional *-algebras realized inside a matrix space.

An algebra is stored in decomposed form: each simple block ``M_n`` is carried
by an isometry ``V`` of shape ``(D, mult * n)`` and embeds as
``y -> V (I_mult kron y) V^*``.  A diagonal density on the ambient space
defines the trace, ``tr(x) = sum_i density[i] * x[i, i]``.

Elements are plain ``numpy`` arrays in the ambient space; the caller keeps
track of which algebra they belong to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg as sla

TOL = 1e-9
DEFAULT_CAP = 65536


class AlgebraError(ValueError):
    """Raised when numerical input does not describe a semisimple *-algebra."""


class DimensionCapError(RuntimeError):
    """Raised when a computation would exceed the configured size cap."""


def dagger(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def fro(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def rel_residual(x: np.ndarray, y: np.ndarray) -> float:
    """Frobenius distance scaled by the larger operand (floored at 1)."""
    return fro(x - y) / max(1.0, fro(x), fro(y))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. standard complex Gaussian entries (E|z|^2 = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Block:
    """One simple summand ``M_size`` with its embedding isometry.

    ``index`` is an optional fast path: when every copy is a coordinate
    selector, ``index[c]`` lists the ambient coordinates of copy ``c``.
    """

    size: int
    isometry: np.ndarray
    weight: float
    index: np.ndarray | None = None

    @property
    def mult(self) -> int:
        return self.isometry.shape[1] // self.size

    def copy(self, c: int) -> np.ndarray:
        return self.isometry[:, c * self.size:(c + 1) * self.size]


def _selector_block(D: int, index: np.ndarray, weight: float) -> Block:
    index = np.asarray(index, dtype=int).reshape(-1, np.shape(index)[-1])
    mult, n = index.shape
    V = np.zeros((D, mult * n))
    for c in range(mult):
        V[index[c], c * n + np.arange(n)] = 1.0
    return Block(n, V, weight, index)


@dataclass(frozen=True, eq=False)
class MultiMatrixAlgebra:
    """A *-subalgebra of ``M_D`` given by its simple blocks and a trace."""

    ambient_dim: int
    blocks: tuple[Block, ...]
    density: np.ndarray

    # -- structure -----------------------------------------------------
    @property
    def block_dims(self) -> list[int]:
        return [b.size for b in self.blocks]

    @property
    def trace_weights(self) -> list[float]:
        return [b.weight for b in self.blocks]

    @property
    def multiplicities(self) -> list[int]:
        return [b.mult for b in self.blocks]

    @property
    def dim(self) -> int:
        return sum(b.size ** 2 for b in self.blocks)

    @property
    def unit(self) -> np.ndarray:
        return self.embed([np.eye(b.size) for b in self.blocks])

    def central_projection(self, k: int) -> np.ndarray:
        coords = [np.zeros((b.size, b.size)) for b in self.blocks]
        coords[k] = np.eye(self.blocks[k].size)
        return self.embed(coords)

    def unit_matrix(self, k: int, a: int, b: int) -> np.ndarray:
        """Matrix unit ``E_ab`` of block ``k`` in the ambient space."""
        coords = [np.zeros((bl.size, bl.size)) for bl in self.blocks]
        coords[k][a, b] = 1.0
        return self.embed(coords)

    # -- coordinates ---------------------------------------------------
    def embed(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        D = self.ambient_dim
        out = np.zeros((D, D), dtype=complex)
        for blk, y in zip(self.blocks, coords):
            if blk.index is not None:
                for idx in blk.index:
                    out[np.ix_(idx, idx)] += y
            else:
                V = blk.isometry
                n, mu = blk.size, blk.mult
                left = np.einsum("dca,ab->dcb", V.reshape(D, mu, n), y).reshape(D, mu * n)
                out += left @ dagger(V)
        return out

    def coords(self, x: np.ndarray) -> list[np.ndarray]:
        """Block coordinates of the trace-preserving expectation of ``x``.

        For members of the algebra this returns their exact coordinates.
        """
        out = []
        dx = self.density[:, None] * x
        for blk in self.blocks:
            n, mu = blk.size, blk.mult
            if blk.index is not None:
                acc = sum(dx[np.ix_(idx, idx)] for idx in blk.index)
            else:
                V = blk.isometry
                M = dagger(V) @ dx @ V
                acc = np.einsum("cacb->ab", M.reshape(mu, n, mu, n))
            out.append(acc / blk.weight)
        return out

    def expect(self, x: np.ndarray) -> np.ndarray:
        """Trace-preserving conditional expectation onto this algebra."""
        return self.embed(self.coords(x))

    def residual(self, x: np.ndarray) -> float:
        """Relative distance of ``x`` from the algebra."""
        return fro(x - self.expect(x)) / max(1.0, fro(x))

    def contains(self, x: np.ndarray, tol: float = TOL) -> bool:
        return self.residual(x) <= tol

    def trace(self, x: np.ndarray) -> complex:
        return complex(np.dot(self.density, np.diagonal(x)))

    # -- enumeration and sampling -------------------------------------
    def basis(self) -> list[np.ndarray]:
        """Matrix units scaled to be orthonormal for ``<x, y> = tr(x^* y)``."""
        out = []
        for k, blk in enumerate(self.blocks):
            s = 1.0 / np.sqrt(blk.weight)
            for a in range(blk.size):
                for b in range(blk.size):
                    out.append(s * self.unit_matrix(k, a, b))
        return out

    def random(self, rng: np.random.Generator) -> np.ndarray:
        """Gaussian coordinates in the orthonormal matrix-unit basis."""
        coords = [complex_gaussian(rng, (b.size, b.size)) / np.sqrt(b.weight) for b in self.blocks]
        return self.embed(coords)

    def random_hermitian(self, rng: np.random.Generator) -> np.ndarray:
        x = self.random(rng)
        return (x + dagger(x)) / 2

    def random_unitary(self, rng: np.random.Generator) -> np.ndarray:
        coords = []
        for b in self.blocks:
            q, r = np.linalg.qr(complex_gaussian(rng, (b.size, b.size)))
            coords.append(q * (np.diag(r) / np.abs(np.diag(r))))
        return self.embed(coords)

    # -- derived -------------------------------------------------------
    def with_density(self, density: np.ndarray) -> "MultiMatrixAlgebra":
        return _finish(self.ambient_dim, [(b.size, b.isometry, b.index) for b in self.blocks],
                       density, sort=False)

    def closure_residual(self, samples: int = 4, seed: int = 0) -> float:
        """Distance of random products and adjoints from the algebra."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            x, y = self.random(rng), self.random(rng)
            worst = max(worst, self.residual(x @ y), self.residual(dagger(x)))
        return worst


def _block_weight(D: int, V: np.ndarray, n: int, density: np.ndarray) -> float:
    mu = V.shape[1] // n
    first = V.reshape(D, mu, n)[:, :, 0]
    return float(np.real(np.sum(density[:, None] * np.abs(first) ** 2)))


def _finish(D: int, parts, density: np.ndarray, sort: bool = True,
            keys: Sequence | None = None) -> MultiMatrixAlgebra:
    """Assemble blocks from ``(size, isometry, index)`` triples, computing weights."""
    density = np.asarray(density, dtype=float)
    blocks = []
    for size, V, index in parts:
        blocks.append(Block(size, V, _block_weight(D, V, size, density), index))
    if sort:
        if keys is None:
            keys = [_fingerprint(b) for b in blocks]
        order = sorted(range(len(blocks)),
                       key=lambda i: (blocks[i].size, -round(blocks[i].weight, 12), keys[i]))
        blocks = [blocks[i] for i in order]
    return MultiMatrixAlgebra(D, tuple(blocks), density)


def _fingerprint(blk: Block) -> tuple:
    """Ambient support of the central projection, as a sortable tuple."""
    diag = np.sum(np.abs(blk.isometry) ** 2, axis=1)
    return tuple(-np.round(diag, 6))


def standard_algebra(block_dims: Sequence[int], weights: Sequence[float]) -> MultiMatrixAlgebra:
    """``M_{n_1} + ... + M_{n_r}`` block-diagonal on ``C^{sum n_k}``."""
    D = int(sum(block_dims))
    density = np.concatenate([np.full(n, w, dtype=float) for n, w in zip(block_dims, weights)])
    blocks = []
    off = 0
    for n in block_dims:
        blocks.append(_selector_block(D, np.arange(off, off + n)[None, :], 0.0))
        off += n
    return _finish(D, [(b.size, b.isometry, b.index) for b in blocks], density, sort=False)


def full_matrix_algebra(n: int) -> MultiMatrixAlgebra:
    """``M_n`` with its normalized trace."""
    return standard_algebra([n], [1.0 / n])


def block_slices(alg: MultiMatrixAlgebra) -> list[np.ndarray]:
    """Ambient coordinate sets of the blocks of a standard-form algebra."""
    return [blk.index[0] for blk in alg.blocks]


# ---------------------------------------------------------------------------
# Generic decomposition of a spanning set
# ---------------------------------------------------------------------------

def _orth_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return rows[:0]
    keep = s > tol * s[0]
    return vh[keep]


def star_closure(mats: Iterable[np.ndarray], tol: float = TOL, max_dim: int = 4096) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of the *-algebra generated by ``mats``."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    D = mats[0].shape[0]
    cand = [m / fro(m) for m in mats if fro(m) > 0]
    cand += [dagger(m) for m in cand]
    Q = np.zeros((0, D * D), dtype=complex)

    def absorb(batch):
        nonlocal Q
        # products of unit-norm rows that vanish up to rounding must not be rescaled into noise
        batch = [b for b in batch if fro(b) > 1e-10]
        if not batch:
            return np.zeros((0, D * D), dtype=complex)
        rows = np.array([b.ravel() / fro(b) for b in batch])
        for _ in range(2):
            if Q.shape[0]:
                rows = rows - (rows @ Q.conj().T) @ Q
        rows = rows[np.linalg.norm(rows, axis=1) > 1e-8]
        if rows.shape[0] == 0:
            return rows
        new = _orth_rows(rows, 1e-8)
        Q = np.vstack([Q, new])
        return new

    fresh = absorb(cand)
    while fresh.shape[0]:
        if Q.shape[0] > max_dim:
            raise DimensionCapError(f"generated algebra exceeds dimension {max_dim}")
        fm = [r.reshape(D, D) for r in fresh]
        allm = [r.reshape(D, D) for r in Q]
        batch = [a @ b for a in fm for b in allm] + [b @ a for a in fm for b in allm]
        fresh = absorb(batch)
    return [r.reshape(D, D) for r in Q]


def null_space(M: np.ndarray, rcond: float = TOL, atol: float = 1e-10) -> np.ndarray:
    """Orthonormal columns spanning ``ker M``, from a thin SVD (tall ``M`` stays cheap).

    Singular values below ``max(rcond * s_max, atol)`` count as zero; the floor keeps a
    matrix of pure rounding noise from being read as full rank.
    """
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > max(rcond * top, atol)))
    return vh[rank:].conj().T


def _cluster(values: np.ndarray, gap: float) -> list[np.ndarray]:
    order = np.argsort(values)
    groups, cur = [], [order[0]]
    for i, j in zip(order[:-1], order[1:]):
        if values[j] - values[i] > gap:
            groups.append(np.array(cur))
            cur = []
        cur.append(j)
    groups.append(np.array(cur))
    return groups


def _partition_basis(P: np.ndarray, partition: Sequence[np.ndarray] | None) -> list[tuple[int, np.ndarray]]:
    """Orthonormal range vectors of a projection, each supported in one part."""
    D = P.shape[0]
    parts = partition if partition is not None else [np.arange(D)]
    out = []
    for l, idx in enumerate(parts):
        sub = P[np.ix_(idx, idx)]
        sub = (sub + dagger(sub)) / 2
        w, U = np.linalg.eigh(sub)
        for col in np.nonzero(w > 0.5)[0]:
            v = np.zeros(D, dtype=complex)
            v[idx] = U[:, col]
            out.append((l, v))
    return out


def algebra_from_units(units: Sequence[Sequence[np.ndarray]], density: np.ndarray,
                       partition: Sequence[np.ndarray] | None = None,
                       sort: bool = True) -> tuple[MultiMatrixAlgebra, list[list[int]]]:
    """Algebra spanned by matrix units, given as columns ``units[j][a] = E_{a0}``.

    Returns the algebra (blocks in input order when ``sort`` is false) and,
    per block, the partition part that each copy lives in.
    """
    D = units[0][0].shape[0]
    parts, homes = [], []
    for col in units:
        n = len(col)
        P = col[0]
        vecs = _partition_basis(P, partition)
        V = np.zeros((D, n * len(vecs)), dtype=complex)
        for c, (_, w) in enumerate(vecs):
            for a in range(n):
                V[:, c * n + a] = col[a] @ w
        parts.append((n, V, None))
        homes.append([l for l, _ in vecs])
    alg = _finish(D, parts, density, sort=False)
    if not sort:
        return alg, homes
    order = sorted(range(len(alg.blocks)),
                   key=lambda i: (alg.blocks[i].size, -round(alg.blocks[i].weight, 12), i))
    alg = MultiMatrixAlgebra(D, tuple(alg.blocks[i] for i in order), alg.density)
    return alg, [homes[i] for i in order]


def commutant_from_units(alg: MultiMatrixAlgebra, homes: Sequence[Sequence[int]],
                         n_parts: int) -> MultiMatrixAlgebra:
    """Commutant of ``alg`` inside the full block-diagonal algebra of the partition.

    ``alg`` must have partition-pure copies (as produced by ``algebra_from_units``).
    Block ``(j, l)`` of the commutant has size equal to the number of copies of
    block ``j`` in part ``l`` and multiplicity ``n_j``.
    """
    D = alg.ambient_dim
    parts, keys = [], []
    for j, blk in enumerate(alg.blocks):
        n = blk.size
        for l in range(n_parts):
            cs = [c for c, h in enumerate(homes[j]) if h == l]
            if not cs:
                continue
            G = len(cs)
            V = np.zeros((D, n * G), dtype=complex)
            for a in range(n):
                for b, c in enumerate(cs):
                    V[:, a * G + b] = blk.isometry[:, c * n + a]
            parts.append((G, V, None))
            keys.append((j, l))
    return _finish(D, parts, alg.density, sort=True, keys=keys)


def algebra_from_span(mats: Sequence[np.ndarray], *, density: np.ndarray | None = None,
                      partition: Sequence[np.ndarray] | None = None, unital: bool = False,
                      tol: float = TOL, seed: int = 0) -> MultiMatrixAlgebra:
    """Block-decompose the *-algebra generated by ``mats``.

    Central projections come from the spectrum of a random self-adjoint
    central element; matrix units from a random self-adjoint element of each
    block.  ``density`` defaults to the normalized trace of the algebra's unit.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    D = mats[0].shape[0]
    if unital:
        mats = mats + [np.eye(D, dtype=complex)]
    basis = star_closure(mats, tol)
    if not basis:
        raise AlgebraError("generators span the zero algebra")
    m = len(basis)
    rng = np.random.default_rng(seed)

    rng_range = sla.orth(np.hstack(basis + [dagger(b) for b in basis]), rcond=tol)
    U = rng_range
    r = U.shape[1]
    comp = [dagger(U) @ b @ U for b in basis]

    # center: coefficient vectors c with [sum c_i b_i, b_j] = 0 for all j
    cols = [np.concatenate([(bi @ bj - bj @ bi).ravel() for bj in comp]) for bi in comp]
    Z = null_space(np.array(cols).T, tol)
    zdim = Z.shape[1]
    if zdim == 0:
        raise AlgebraError("empty center: input is not a unital *-algebra at tolerance")
    zmats = [sum(c * b for c, b in zip(Z[:, i], comp)) for i in range(zdim)]
    h = sum(rng.standard_normal() * z for z in zmats)
    h = (h + dagger(h)) / 2
    w, W = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(w))))
    groups = _cluster(w, 1e-6 * scale)
    if len(groups) != zdim:
        raise AlgebraError(f"center rank ambiguous at tolerance: {len(groups)} spectral groups "
                           f"for a {zdim}-dimensional center (eigenvalues {np.round(w, 8)})")

    if density is None:
        density = np.full(D, 1.0 / r)
    parts = []
    for g in groups:
        zc = W[:, g] @ dagger(W[:, g])
        zb = [zc @ b @ zc for b in comp]
        rows = _orth_rows(np.array([b.ravel() for b in zb]), tol)
        bdim = rows.shape[0]
        n = int(round(np.sqrt(bdim)))
        if n * n != bdim:
            raise AlgebraError(f"block of dimension {bdim} is not a full matrix algebra")
        rk = len(g)
        mu = rk // n
        if n == 1:
            cols_units = [zc]
        else:
            hb = sum(rng.standard_normal() * b for b in zb)
            hb = (hb + dagger(hb)) / 2
            Wg = W[:, g]
            wv, Ev = np.linalg.eigh(dagger(Wg) @ hb @ Wg)
            sub = _cluster(wv, 1e-6 * max(1.0, float(np.max(np.abs(wv)))))
            if len(sub) != n or any(len(s) != mu for s in sub):
                raise AlgebraError("could not split block into minimal projections at tolerance")
            projs = [Wg @ Ev[:, s] @ dagger(Wg @ Ev[:, s]) for s in sub]
            y = sum(complex_gaussian(rng, ()) * b for b in zb)
            cols_units = [projs[0]]
            for a in range(1, n):
                t = projs[a] @ y @ projs[0]
                cols_units.append(t * np.sqrt(mu) / fro(t))
        cols_units = [U @ c @ dagger(U) for c in cols_units]
        vecs = _partition_basis(cols_units[0], partition)
        if len(vecs) != mu:
            raise AlgebraError("minimal projection is not compatible with the ambient partition")
        V = np.zeros((D, n * mu), dtype=complex)
        for c, (_, v) in enumerate(vecs):
            for a in range(n):
                V[:, c * n + a] = cols_units[a] @ v
        parts.append((n, V, None))
    alg = _finish(D, parts, density, sort=True)
    if alg.dim != m:
        raise AlgebraError(f"decomposition dimension {alg.dim} does not match span dimension {m}")
    return alg


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def commutant(generators: Sequence[np.ndarray], ambient: MultiMatrixAlgebra,
              tol: float = TOL, cap: int = 4096,
              partition: Sequence[np.ndarray] | None = None) -> MultiMatrixAlgebra:
    """``{x in ambient : x g = g x for all g}`` by a nullspace computation.

    This is the brute-force route; its cost grows like ``dim(ambient)^2``
    times the ambient size, so it is capped.
    """
    if ambient.dim ** 2 > cap * cap or ambient.dim > cap:
        raise DimensionCapError(f"ambient dimension {ambient.dim} exceeds nullspace cap {cap}")
    basis = ambient.basis()
    cols = [np.concatenate([(b @ g - g @ b).ravel() for g in generators]) for b in basis]
    N = null_space(np.array(cols).T, tol)
    mats = [sum(c * b for c, b in zip(N[:, i], basis)) for i in range(N.shape[1])]
    return algebra_from_span(mats, density=ambient.density, partition=partition, tol=tol)


def block_decompose(alg: MultiMatrixAlgebra):
    """Central projections, block sizes and embedding isometries of ``alg``."""
    central = [alg.central_projection(k) for k in range(len(alg.blocks))]
    return central, alg.block_dims, [b.isometry for b in alg.blocks]


def is_subalgebra(sub: MultiMatrixAlgebra, alg: MultiMatrixAlgebra, tol: float = TOL) -> bool:
    return all(alg.residual(sub.unit_matrix(k, a, 0)) <= tol
               for k, b in enumerate(sub.blocks) for a in range(b.size))


def conditional_expectation(x: np.ndarray, sub: MultiMatrixAlgebra) -> np.ndarray:
    """Trace-preserving expectation onto ``sub`` (orthogonal projection in tr)."""
    return sub.expect(x)


def singular_values(x: np.ndarray, alg: MultiMatrixAlgebra) -> list[np.ndarray]:
    return [np.linalg.svd(y, compute_uv=False) for y in alg.coords(x)]


def p_norm(x: np.ndarray, alg: MultiMatrixAlgebra, p: float) -> float:
    """``tr(|x|^p)^(1/p)``; ``p = inf`` gives the operator norm."""
    svs = singular_values(x, alg)
    if np.isinf(p):
        return float(max(s.max() if s.size else 0.0 for s in svs))
    total = sum(blk.weight * np.sum(s ** p) for blk, s in zip(alg.blocks, svs))
    return float(total ** (1.0 / p))


def support_size(x: np.ndarray, alg: MultiMatrixAlgebra, tol: float = TOL) -> float:
    """Trace of the range projection of ``x``."""
    svs = singular_values(x, alg)
    smax = max(float(s.max()) if s.size else 0.0 for s in svs)
    if smax == 0.0:
        return 0.0
    return float(sum(blk.weight * np.count_nonzero(s > tol * smax) for blk, s in zip(alg.blocks, svs)))


def eta(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = -t[pos] * np.log(t[pos])
    return out


def entropy_functional(y: np.ndarray, alg: MultiMatrixAlgebra, tol: float = TOL) -> float:
    """``tr(eta(y))`` for positive ``y``, with ``eta(t) = -t log t``."""
    total = 0.0
    for blk, c in zip(alg.blocks, alg.coords(y)):
        w = np.linalg.eigvalsh((c + dagger(c)) / 2)
        if w.size and w.min() < -tol * max(1.0, float(np.abs(w).max())):
            raise AlgebraError(f"entropy of a non-positive element (eigenvalue {w.min():.3e})")
        total += blk.weight * float(np.sum(eta(np.clip(w, 0.0, None))))
    return total


def random_element(alg: MultiMatrixAlgebra, seed) -> np.ndarray:
    return alg.random(np.random.default_rng(seed))
