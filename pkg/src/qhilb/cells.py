"""The concrete 2-category of graded complex matrices.

Zero-cells are positive integers, a one-cell ``X : a -> b`` is a
finite-dimensional space with an ordered basis graded by pairs
``(row in 1..b, col in 1..a)``, and two-cells are complex matrices
supported on matching grading sectors.

Horizontal composition of one-cells pairs basis vectors across the
middle index and orders the pairs lexicographically (left factor
major).  That convention makes horizontal composition *strictly*
associative on the nose, and it makes ``X . unit`` literally equal to
``X``; only the left unitor ``unit . X -> X`` is a nontrivial
permutation two-cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CellMismatch, EmptyColumn
from .linalg import dagger, frob

__all__ = [
    "ZeroCell",
    "GradedOneCell",
    "BlockTwoCell",
    "id1",
    "one_cell",
    "two_cell",
    "id2",
    "hcomp1",
    "hcomp_pairs",
    "hcomp2",
    "vcomp",
    "dagger2",
    "unitor_left",
    "unitor_right",
    "standard_dual",
    "sector_residual",
]


@dataclass(frozen=True)
class ZeroCell:
    """A zero-cell: the number of column indices of the graded model."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise CellMismatch("zero-cell size must be >= 1")


@dataclass(frozen=True)
class GradedOneCell:
    """One-cell ``src -> tgt``: ordered basis graded by (row, col)."""

    src: ZeroCell
    tgt: ZeroCell
    grading: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for r, c in self.grading:
            if not (1 <= r <= self.tgt.n and 1 <= c <= self.src.n):
                raise CellMismatch(f"grading pair {(r, c)} out of range")

    @property
    def dim(self) -> int:
        return len(self.grading)

    def sector_dims(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for g in self.grading:
            out[g] = out.get(g, 0) + 1
        return out

    def __repr__(self):
        return f"GradedOneCell({self.src.n}->{self.tgt.n}, dim={self.dim})"


def id1(n: ZeroCell | int) -> GradedOneCell:
    """Identity one-cell on ``n``: diagonal grading (1,1)..(n,n)."""
    n = n if isinstance(n, ZeroCell) else ZeroCell(n)
    return GradedOneCell(n, n, tuple((j, j) for j in range(1, n.n + 1)))


def one_cell(src: int, tgt: int, grading) -> GradedOneCell:
    return GradedOneCell(ZeroCell(src), ZeroCell(tgt), tuple(map(tuple, grading)))


@dataclass(frozen=True, eq=False)
class BlockTwoCell:
    """Two-cell: a matrix ``target.dim x source.dim`` between parallel
    one-cells, supported on matching grading sectors."""

    source: GradedOneCell
    target: GradedOneCell
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.source.src != self.target.src or self.source.tgt != self.target.tgt:
            raise CellMismatch("two-cell endpoints do not match")
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (self.target.dim, self.source.dim):
            raise CellMismatch(
                f"matrix shape {m.shape} != {(self.target.dim, self.source.dim)}"
            )
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __repr__(self):
        return f"BlockTwoCell({self.source!r} => {self.target!r})"


def two_cell(source: GradedOneCell, target: GradedOneCell, mat) -> BlockTwoCell:
    return BlockTwoCell(source, target, np.asarray(mat, dtype=complex))


def id2(x: GradedOneCell) -> BlockTwoCell:
    return BlockTwoCell(x, x, np.eye(x.dim, dtype=complex))


def sector_residual(f: BlockTwoCell) -> float:
    """Frobenius norm of the entries living on mismatched sectors."""
    bad = 0.0
    for p, gt in enumerate(f.target.grading):
        for q, gs in enumerate(f.source.grading):
            if gt != gs:
                bad += abs(f.mat[p, q]) ** 2
    return float(np.sqrt(bad))


@lru_cache(maxsize=None)
def hcomp_pairs(y: GradedOneCell, x: GradedOneCell) -> tuple[tuple[int, int], ...]:
    """Index pairs (p in y, q in x) of the basis of ``y . x``, in order."""
    if x.tgt != y.src:
        raise CellMismatch(f"cannot compose {y!r} . {x!r}")
    return tuple(
        (p, q)
        for p in range(y.dim)
        for q in range(x.dim)
        if y.grading[p][1] == x.grading[q][0]
    )


@lru_cache(maxsize=None)
def hcomp1(y: GradedOneCell, x: GradedOneCell) -> GradedOneCell:
    """Horizontal composite ``y . x`` (x acts first)."""
    pairs = hcomp_pairs(y, x)
    grading = tuple((y.grading[p][0], x.grading[q][1]) for p, q in pairs)
    return GradedOneCell(x.src, y.tgt, grading)


def hcomp1_many(*cells: GradedOneCell) -> GradedOneCell:
    """Left fold of ``hcomp1``; associativity is strict so any
    bracketing yields the identical cell."""
    out = cells[0]
    for c in cells[1:]:
        out = hcomp1(out, c)
    return out


def hcomp2(g: BlockTwoCell, f: BlockTwoCell) -> BlockTwoCell:
    """Horizontal composite of two-cells (g left of f)."""
    src = hcomp1(g.source, f.source)
    tgt = hcomp1(g.target, f.target)
    sp = hcomp_pairs(g.source, f.source)
    tp = hcomp_pairs(g.target, f.target)
    if not tp or not sp:
        return BlockTwoCell(src, tgt, np.zeros((tgt.dim, src.dim), dtype=complex))
    ti = np.fromiter((p for p, _ in tp), dtype=int)
    tj = np.fromiter((q for _, q in tp), dtype=int)
    si = np.fromiter((p for p, _ in sp), dtype=int)
    sj = np.fromiter((q for _, q in sp), dtype=int)
    mat = g.mat[ti[:, None], si[None, :]] * f.mat[tj[:, None], sj[None, :]]
    return BlockTwoCell(src, tgt, mat)


def hcomp2_many(*fs: BlockTwoCell) -> BlockTwoCell:
    out = fs[0]
    for f in fs[1:]:
        out = hcomp2(out, f)
    return out


def vcomp(g: BlockTwoCell, f: BlockTwoCell) -> BlockTwoCell:
    """Vertical composite ``g . f`` (f acts first)."""
    if f.target != g.source:
        raise CellMismatch("vertical composition: target/source cells differ")
    return BlockTwoCell(f.source, g.target, g.mat @ f.mat)


def vcomp_many(*fs: BlockTwoCell) -> BlockTwoCell:
    """Vertical composite of several two-cells, listed top to bottom
    (``fs[-1]`` acts first)."""
    out = fs[-1]
    for f in fs[-2::-1]:
        out = vcomp(f, out)
    return out


def dagger2(f: BlockTwoCell) -> BlockTwoCell:
    return BlockTwoCell(f.target, f.source, dagger(f.mat))


@lru_cache(maxsize=None)
def unitor_left(x: GradedOneCell) -> BlockTwoCell:
    """Unitary permutation ``unit . x -> x`` pairing (row(q), q) with q."""
    src = hcomp1(id1(x.tgt), x)
    pairs = hcomp_pairs(id1(x.tgt), x)
    mat = np.zeros((x.dim, src.dim), dtype=complex)
    for col, (_, q) in enumerate(pairs):
        mat[q, col] = 1.0
    return BlockTwoCell(src, x, mat)


@lru_cache(maxsize=None)
def unitor_right(x: GradedOneCell) -> BlockTwoCell:
    """Permutation ``x . unit -> x``; the identity matrix in this model
    because the pairing convention makes both cells literally equal."""
    src = hcomp1(x, id1(x.src))
    pairs = hcomp_pairs(x, id1(x.src))
    mat = np.zeros((x.dim, src.dim), dtype=complex)
    for col, (q, _) in enumerate(pairs):
        mat[q, col] = 1.0
    return BlockTwoCell(src, x, mat)


@lru_cache(maxsize=None)
def standard_dual(x: GradedOneCell):
    """Balanced dual ``(xbar, ev, coev)`` of a one-cell.

    ``xbar`` carries the transposed grading in the same basis order.
    ``ev : xbar . x -> unit`` pairs each basis vector with its conjugate
    at weight ``1/sqrt(d_i)`` where ``d_i`` counts basis vectors over
    source index ``i``, the unique per-column constant with
    ``ev ev* = id``.  ``coev : unit -> x . xbar`` uses the inverse
    weights so both zig-zag identities hold exactly.

    Raises ``EmptyColumn`` if some source index carries no basis vector.
    """
    counts = [0] * x.src.n
    for _, c in x.grading:
        counts[c - 1] += 1
    for i, d in enumerate(counts):
        if d == 0:
            raise EmptyColumn(i + 1)
    xbar = GradedOneCell(x.tgt, x.src, tuple((c, r) for r, c in x.grading))

    ev_src = hcomp1(xbar, x)
    ev_mat = np.zeros((x.src.n, ev_src.dim), dtype=complex)
    for col, (p, q) in enumerate(hcomp_pairs(xbar, x)):
        if p == q:
            i = x.grading[q][1]
            ev_mat[i - 1, col] = 1.0 / np.sqrt(counts[i - 1])
    ev = BlockTwoCell(ev_src, id1(x.src), ev_mat)

    coev_tgt = hcomp1(x, xbar)
    coev_mat = np.zeros((coev_tgt.dim, x.tgt.n), dtype=complex)
    for row, (q, p) in enumerate(hcomp_pairs(x, xbar)):
        if q == p:
            r, c = x.grading[q]
            coev_mat[row, r - 1] = np.sqrt(counts[c - 1])
    coev = BlockTwoCell(id1(x.tgt), coev_tgt, coev_mat)
    return xbar, ev, coev


def residual(f: BlockTwoCell, g: BlockTwoCell) -> float:
    """Frobenius distance between two parallel two-cells."""
    if f.source != g.source or f.target != g.target:
        raise CellMismatch("cannot compare two-cells with different cells")
    return frob(f.mat - g.mat)


def is_unitary_residual(f: BlockTwoCell) -> float:
    """max(|f*f - id|, |f f* - id|)."""
    a = frob(dagger(f.mat) @ f.mat - np.eye(f.source.dim))
    b = frob(f.mat @ dagger(f.mat) - np.eye(f.target.dim))
    return max(a, b)


def projection_residual(p: BlockTwoCell) -> float:
    """max(|p - p*|, |p^2 - p|) for an endo two-cell."""
    if p.source != p.target:
        raise CellMismatch("projection must be an endo two-cell")
    return max(frob(p.mat - dagger(p.mat)), frob(p.mat @ p.mat - p.mat))


def mask_sectors(f: BlockTwoCell) -> BlockTwoCell:
    """Zero out entries on mismatched sectors (removes numerical dust)."""
    mat = np.array(f.mat)
    tg = f.target.grading
    sg = f.source.grading
    for p in range(f.target.dim):
        for q in range(f.source.dim):
            if tg[p] != sg[q]:
                mat[p, q] = 0.0
    return BlockTwoCell(f.source, f.target, mat)

