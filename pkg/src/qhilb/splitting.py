"""Splitting projections and Q-systems.

``split_projection`` realizes local orthogonal projection completeness
of the graded matrix model.  ``split_qsystem`` realizes Q-system
completeness: every Q-system ``Q`` is exhibited as ``X . Xbar`` for a
balanced dual pair over a new zero-cell, together with the unitary
``gamma : X . Xbar -> Q`` intertwining multiplication and unit.

The algorithm works on the total space of ``Q`` viewed as an
associative algebra via left/right multiplication operators: the joint
commutant of both regular representations is the center, a random
hermitian central element separates the simple blocks, and a minimal
projection in the compressed right-multiplication algebra cuts each
block down to a column space.  Compressing *left* multiplication to
those column spaces is an algebra map by construction, which is what
makes ``gamma`` multiplicative.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .cells import (
    BlockTwoCell,
    GradedOneCell,
    ZeroCell,
    hcomp_pairs,
    hcomp1,
    mask_sectors,
    projection_residual,
)
from .errors import (
    DegenerateRandomElement,
    InvalidQSystem,
    NormalizationFailure,
    NotAProjection,
)
from .linalg import Tolerance, dagger, frob, herm_part, range_isometry, spectral_projections, commutant_basis
from .qsystem import DualPair, QSystemData, check_qsystem, check_qsystem_iso, qsystem_from_dual, standard_dual_pair

__all__ = [
    "SplitResult",
    "RegularRep",
    "split_projection",
    "regular_reps",
    "central_decomposition",
    "split_qsystem",
]

_MAX_RANDOM_ATTEMPTS = 5


@dataclass(frozen=True, eq=False)
class SplitResult:
    """Output of Q-system splitting: new zero-cell ``k``, balanced dual
    pair with ``X : k -> b``, and the unitary ``gamma : X . Xbar -> Q``."""

    k: ZeroCell
    pair: DualPair
    gamma: BlockTwoCell


@dataclass(frozen=True, eq=False)
class RegularRep:
    """Left/right multiplication operators on the total space of Q,
    one per basis vector."""

    left_ops: tuple[np.ndarray, ...]
    right_ops: tuple[np.ndarray, ...]


def split_projection(x: GradedOneCell, p: BlockTwoCell,
                     tol: Tolerance = Tolerance()):
    """Split a hermitian idempotent ``p`` on ``x`` as ``u u*``.

    Returns ``(y, u)`` with ``u : y -> x`` an isometry, ``u* u = id`` and
    ``u u* = p``.  ``y`` carries one basis vector per unit of sector
    rank, graded pairs sorted by (row, col).
    """
    if p.source != x or p.target != x:
        raise NotAProjection("projection must be an endo two-cell on x")
    scale = max(1.0, frob(p.mat))
    if projection_residual(p) > 10 * tol.atol * scale:
        raise NotAProjection("two-cell is not a hermitian idempotent")

    sectors: dict[tuple[int, int], list[int]] = {}
    for idx, g in enumerate(x.grading):
        sectors.setdefault(g, []).append(idx)

    grading: list[tuple[int, int]] = []
    cols: list[np.ndarray] = []
    for g in sorted(sectors):
        idx = np.array(sectors[g], dtype=int)
        sub = herm_part(p.mat[np.ix_(idx, idx)])
        v = range_isometry(sub, tol)
        for j in range(v.shape[1]):
            grading.append(g)
            col = np.zeros(x.dim, dtype=complex)
            col[idx] = v[:, j]
            cols.append(col)
    y = GradedOneCell(x.src, x.tgt, tuple(grading))
    mat = np.stack(cols, axis=1) if cols else np.zeros((x.dim, 0), dtype=complex)
    return y, BlockTwoCell(y, x, mat)


def _pair_index(Q: GradedOneCell) -> dict[tuple[int, int], int]:
    return {pq: k for k, pq in enumerate(hcomp_pairs(Q, Q))}


def regular_reps(q: QSystemData, tol: Tolerance = Tolerance()) -> RegularRep:
    """Left and right multiplication operators of a valid Q-system."""
    rep = check_qsystem(q, tol)
    if not rep.passes(10 * tol.atol):
        name, value = rep.worst()
        raise InvalidQSystem(f"axiom {name} fails with residual {value:.3e}")
    Q, m = q.Q, q.m.mat
    n = Q.dim
    index = _pair_index(Q)
    left = []
    right = []
    for b in range(n):
        lb = np.zeros((n, n), dtype=complex)
        rb = np.zeros((n, n), dtype=complex)
        for c in range(n):
            k = index.get((b, c))
            if k is not None:
                lb[:, c] = m[:, k]
            k = index.get((c, b))
            if k is not None:
                rb[:, c] = m[:, k]
        left.append(lb)
        right.append(rb)
    return RegularRep(tuple(left), tuple(right))


def _random_hermitian_in_span(rng: np.random.Generator, basis) -> np.ndarray:
    coeff = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
    t = sum(c * b for c, b in zip(coeff, basis))
    return herm_part(t)


def central_decomposition(q: QSystemData, tol: Tolerance = Tolerance(),
                          rng: np.random.Generator | int | None = None):
    """Minimal central projections of the multiplication algebra of Q.

    Spectral projections of a random hermitian element of the joint
    commutant of left and right multiplications.  Retries with fresh
    randomness if the sampled element fails to separate the blocks.
    """
    rng = np.random.default_rng(rng)
    rep = regular_reps(q, tol)
    return _central_from_rep(rep, tol, rng)


def _central_from_rep(rep: RegularRep, tol: Tolerance, rng: np.random.Generator):
    gens = list(rep.left_ops) + list(rep.right_ops)
    gens += [dagger(g) for g in gens]
    center = commutant_basis(gens, tol)
    k = len(center)
    for _ in range(_MAX_RANDOM_ATTEMPTS):
        h = _random_hermitian_in_span(rng, center)
        clusters = spectral_projections(h, tol)
        if len(clusters) != k:
            continue
        zs = [z for _, z in clusters]
        zs.sort(key=_support_key)
        return zs
    raise DegenerateRandomElement(
        f"could not separate {k} central blocks in {_MAX_RANDOM_ATTEMPTS} attempts")


def _support_key(z: np.ndarray):
    diag = np.abs(np.diag(z))
    rank = int(round(float(np.real(np.trace(z)))))
    first = int(np.argmax(diag > diag.max() * 1e-6)) if diag.size else 0
    return (rank, first)


def _minimal_projection(ops, w, d, tol, rng):
    """Rank-``d`` spectral projection of a random hermitian element of
    the compressed operator span (columns of ``w`` = block range)."""
    comp = [dagger(w) @ g @ w for g in ops]
    comp += [dagger(c) for c in comp]
    # orthonormalize the compressed span to draw uniformly from it
    vecs = np.stack([c.reshape(-1) for c in comp], axis=1)
    u, s, _ = np.linalg.svd(vecs, full_matrices=False)
    keep = s > tol.gap_tol * max(1.0, float(s[0]) if len(s) else 1.0)
    basis = [u[:, j].reshape(comp[0].shape) for j in range(u.shape[1]) if keep[j]]
    for _ in range(_MAX_RANDOM_ATTEMPTS):
        h = _random_hermitian_in_span(rng, basis)
        clusters = spectral_projections(h, tol)
        ranks = [int(round(float(np.real(np.trace(p))))) for _, p in clusters]
        if all(r == d for r in ranks) and len(clusters) * d == w.shape[1]:
            return clusters[0][1]
    raise DegenerateRandomElement("no generic element found in a matrix block")


def split_qsystem(q: QSystemData, tol: Tolerance = Tolerance(),
                  rng: np.random.Generator | int | None = None) -> SplitResult:
    """Split a Q-system as ``X . Xbar`` over a new zero-cell.

    Steps: regular representations; central decomposition into ``k``
    simple blocks; one minimal right-multiplication projection per
    block; the column spaces, refined by the row grading, become the
    sectors of ``X``; compressed left multiplication, rescaled to be
    isometric block by block, is ``gamma*``.

    The returned data satisfies ``gamma`` unitary,
    ``gamma (id . ev . id) = m (gamma . gamma)`` and
    ``gamma coev = i`` within ``10 atol``.
    """
    rng = np.random.default_rng(rng)
    rep = regular_reps(q, tol)
    zs = _central_from_rep(rep, tol, rng)
    Q = q.Q
    n_rows = Q.tgt.n
    N = Q.dim

    row_proj = {}
    for j in range(1, n_rows + 1):
        d = np.zeros(N)
        for idx, (r, _) in enumerate(Q.grading):
            if r == j:
                d[idx] = 1.0
        row_proj[j] = np.diag(d).astype(complex)

    blocks = []  # (d_t, per-row isometries {j: columns})
    for z in zs:
        w = range_isometry(z, tol)
        m_t = w.shape[1]
        d_t = isqrt(m_t)
        if d_t * d_t != m_t:
            raise InvalidQSystem("central block dimension is not a perfect square")
        f = w @ _minimal_projection(rep.right_ops, w, d_t, tol, rng) @ dagger(w)
        per_row = {}
        for j in range(1, n_rows + 1):
            pj = f @ row_proj[j]
            v = range_isometry(herm_part(pj), tol)
            if v.shape[1]:
                per_row[j] = v
        total = sum(v.shape[1] for v in per_row.values())
        if total != d_t:
            raise InvalidQSystem("block column space does not refine the row grading")
        blocks.append((d_t, per_row))
    blocks.sort(key=lambda b: (b[0], min(b[1])))
    k = len(blocks)

    # X : k -> b, grading pairs (row j, block t) sorted lexicographically
    entries = []  # (j, t, column vector) in X basis order
    for j in range(1, n_rows + 1):
        for t, (_, per_row) in enumerate(blocks, start=1):
            v = per_row.get(j)
            if v is None:
                continue
            for c in range(v.shape[1]):
                entries.append((j, t, v[:, c]))
    X = GradedOneCell(ZeroCell(k), Q.tgt, tuple((j, t) for j, t, _ in entries))
    pair = standard_dual_pair(X)
    Xbar = pair.Xbar

    # basis of each block's column space, in X basis order
    block_cols: dict[int, np.ndarray] = {}
    block_pos: list[int] = []
    for t in range(1, k + 1):
        cols = [vec for (_, tt, vec) in entries if tt == t]
        block_cols[t] = np.stack(cols, axis=1)
    counters = {t: 0 for t in range(1, k + 1)}
    for _, t, _ in entries:
        block_pos.append(counters[t])
        counters[t] += 1

    # compressed left multiplication per block, then isometric rescale
    comp = {}
    for t in range(1, k + 1):
        v = block_cols[t]
        comp[t] = np.stack([dagger(v) @ lb @ v for lb in rep.left_ops], axis=2)
    scales = {}
    for t, stack in comp.items():
        d = stack.shape[0]
        mmat = stack.reshape(d * d, N)
        gram = mmat @ dagger(mmat)
        s2 = float(np.real(np.trace(gram))) / (d * d)
        if s2 <= 0 or frob(gram - s2 * np.eye(d * d)) > 1e-6 * max(1.0, s2) * d * d:
            raise NormalizationFailure(
                "compressed left multiplication is not a scalar multiple of an isometry")
        scales[t] = 1.0 / np.sqrt(s2)

    pairs = hcomp_pairs(X, Xbar)
    gdag = np.zeros((len(pairs), N), dtype=complex)
    for row, (p_idx, q_idx) in enumerate(pairs):
        t = X.grading[p_idx][1]
        alpha = block_pos[p_idx]
        beta = block_pos[q_idx]
        gdag[row, :] = scales[t] * comp[t][alpha, beta, :]
    gamma = mask_sectors(BlockTwoCell(hcomp1(X, Xbar), Q, dagger(gdag)))

    result = SplitResult(ZeroCell(k), pair, gamma)
    iso = check_qsystem_iso(gamma, qsystem_from_dual(pair), q, tol)
    if not iso.passes(10 * tol.atol):
        name, value = iso.worst()
        raise NormalizationFailure(
            f"splitting produced gamma with {name} residual {value:.3e}")
    return result
