"""Seeded random instances: cells, Q-systems, presentations and full
End(F) scenarios.

Everything takes a ``numpy.random.Generator`` and is deterministic for
a fixed seed.  Scenario generation samples from families that are valid
by construction (dual-pair Q-systems dressed by random unitaries, and
block Q-systems tensored with a random functor) so that the checkers
exercise dense random data while the axioms hold to machine precision.
"""

from __future__ import annotations

import numpy as np

from .cells import (
    BlockTwoCell,
    GradedOneCell,
    ZeroCell,
    dagger2,
    hcomp1,
    hcomp1_many,
    hcomp_pairs,
    id1,
    id2,
    unitor_left,
    unitor_right,
    vcomp,
    vcomp_many,
    hcomp2,
)
from .errors import CellMismatch
from .funcat import EndFQSystem, FunctorData, ModificationData, TransformationData
from .presentation import GenOneCell, GenTwoCell, Path, PresentedTwoCat
from .qsystem import DualPair, QSystemData, qsystem_from_dual, standard_dual_pair

__all__ = [
    "haar_unitary",
    "random_cell",
    "random_block_unitary",
    "random_sector_matrix",
    "random_projection_on",
    "random_dual_pair",
    "random_qsystem",
    "dress_qsystem",
    "dsum_qsystems",
    "outer_cell",
    "outer_2cell",
    "interchanger",
    "random_presentation",
    "product_scenario",
    "summed_transformation",
    "random_constant_scenario",
]


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _sectors(cell: GradedOneCell) -> dict[tuple[int, int], list[int]]:
    out: dict[tuple[int, int], list[int]] = {}
    for i, g in enumerate(cell.grading):
        out.setdefault(g, []).append(i)
    return out


def random_cell(rng: np.random.Generator, src: int, tgt: int,
                max_sector_dim: int = 2, zero_bias: float = 0.4,
                full_cols: bool = False, min_total: int = 1) -> GradedOneCell:
    """Random graded one-cell, grading sorted by (row, col)."""
    while True:
        dims = {}
        for r in range(1, tgt + 1):
            for c in range(1, src + 1):
                if rng.random() < zero_bias:
                    dims[(r, c)] = 0
                else:
                    dims[(r, c)] = int(rng.integers(1, max_sector_dim + 1))
        if full_cols:
            for c in range(1, src + 1):
                if all(dims[(r, c)] == 0 for r in range(1, tgt + 1)):
                    r = int(rng.integers(1, tgt + 1))
                    dims[(r, c)] = int(rng.integers(1, max_sector_dim + 1))
        grading = []
        for r in range(1, tgt + 1):
            for c in range(1, src + 1):
                grading.extend([(r, c)] * dims[(r, c)])
        if len(grading) >= min_total:
            return GradedOneCell(ZeroCell(src), ZeroCell(tgt), tuple(grading))


def random_block_unitary(rng: np.random.Generator, source: GradedOneCell,
                         target: GradedOneCell | None = None) -> BlockTwoCell:
    """Haar-random sector-block unitary ``source -> target`` (cells must
    have equal sector dimensions)."""
    target = source if target is None else target
    ssec, tsec = _sectors(source), _sectors(target)
    if sorted(ssec) != sorted(tsec) or any(
            len(ssec[g]) != len(tsec[g]) for g in ssec):
        raise CellMismatch("cells have different sector dimensions")
    mat = np.zeros((target.dim, source.dim), dtype=complex)
    for g in sorted(ssec):
        u = haar_unitary(rng, len(ssec[g]))
        mat[np.ix_(tsec[g], ssec[g])] = u
    return BlockTwoCell(source, target, mat)


def random_sector_matrix(rng: np.random.Generator, source: GradedOneCell,
                         target: GradedOneCell, scale: float = 1.0) -> BlockTwoCell:
    """Random sector-supported two-cell (gaussian entries)."""
    ssec, tsec = _sectors(source), _sectors(target)
    mat = np.zeros((target.dim, source.dim), dtype=complex)
    for g in sorted(set(ssec) & set(tsec)):
        block = rng.standard_normal((len(tsec[g]), len(ssec[g]))) \
            + 1j * rng.standard_normal((len(tsec[g]), len(ssec[g])))
        mat[np.ix_(tsec[g], ssec[g])] = scale * block
    return BlockTwoCell(source, target, mat)


def random_projection_on(rng: np.random.Generator,
                         cell: GradedOneCell) -> BlockTwoCell:
    """Random hermitian idempotent on ``cell`` with random sector ranks."""
    sec = _sectors(cell)
    mat = np.zeros((cell.dim, cell.dim), dtype=complex)
    for g in sorted(sec):
        idx = sec[g]
        d = len(idx)
        rank = int(rng.integers(0, d + 1))
        u = haar_unitary(rng, d)
        w = u[:, :rank]
        mat[np.ix_(idx, idx)] = w @ w.conj().T
    return BlockTwoCell(cell, cell, mat)


def random_dual_pair(rng: np.random.Generator, src: int, tgt: int,
                     max_sector_dim: int = 2) -> DualPair:
    x = random_cell(rng, src, tgt, max_sector_dim, full_cols=True)
    return standard_dual_pair(x)


def dress_qsystem(rng: np.random.Generator, q: QSystemData) -> QSystemData:
    """Conjugate the structure maps by a random sector unitary; the
    axioms are preserved exactly."""
    v = random_block_unitary(rng, q.Q)
    return QSystemData(q.Q, vcomp(v, vcomp(q.m, hcomp2(dagger2(v), dagger2(v)))),
                       vcomp(v, q.i))


def random_qsystem(rng: np.random.Generator, zero_cell: int = 1,
                   blocks: int = 2, max_sector_dim: int = 2,
                   dress: bool = True,
                   max_total: int = 24) -> tuple[QSystemData, list[int]]:
    """Random Q-system from a dual pair, optionally dressed.

    The total dimension (sum of squared block dimensions) is kept at
    most ``max_total``.  Returns the Q-system and the multiset of its
    block dimensions (per-column dimensions of the underlying one-cell).
    """
    while True:
        x = random_cell(rng, blocks, zero_cell, max_sector_dim, full_cols=True)
        counts = [0] * blocks
        for _, c in x.grading:
            counts[c - 1] += 1
        if sum(d * d for d in counts) <= max_total:
            break
    q = qsystem_from_dual(standard_dual_pair(x))
    if dress:
        q = dress_qsystem(rng, q)
    return q, sorted(counts)


def dsum_qsystems(q1: QSystemData, q2: QSystemData) -> QSystemData:
    """Direct sum of two Q-systems on the same zero-cell."""
    if q1.zero_cell != q2.zero_cell:
        raise CellMismatch("direct sum needs a common zero-cell")
    Q = GradedOneCell(q1.Q.src, q1.Q.tgt, q1.Q.grading + q2.Q.grading)
    d1 = q1.Q.dim
    emb1 = np.zeros((Q.dim, d1), dtype=complex)
    emb1[:d1, :] = np.eye(d1)
    emb2 = np.zeros((Q.dim, q2.Q.dim), dtype=complex)
    emb2[d1:, :] = np.eye(q2.Q.dim)

    pairs = hcomp_pairs(Q, Q)
    pairs1 = {pq: k for k, pq in enumerate(hcomp_pairs(q1.Q, q1.Q))}
    pairs2 = {pq: k for k, pq in enumerate(hcomp_pairs(q2.Q, q2.Q))}
    m = np.zeros((Q.dim, len(pairs)), dtype=complex)
    for col, (p, q) in enumerate(pairs):
        if p < d1 and q < d1:
            m[:, col] = emb1 @ q1.m.mat[:, pairs1[(p, q)]]
        elif p >= d1 and q >= d1:
            m[:, col] = emb2 @ q2.m.mat[:, pairs2[(p - d1, q - d1)]]
    i = emb1 @ q1.i.mat + emb2 @ q2.i.mat
    return QSystemData(Q, BlockTwoCell(hcomp1(Q, Q), Q, m),
                       BlockTwoCell(q1.i.source, Q, i))


# --------------------------------------------------------------------------
# product structure on the graded model (used only for generation)


def outer_cell(a: GradedOneCell, b: GradedOneCell) -> GradedOneCell:
    """External product: indices multiply, basis pairs a-major."""
    src = ZeroCell(a.src.n * b.src.n)
    tgt = ZeroCell(a.tgt.n * b.tgt.n)
    grading = tuple(
        ((ra - 1) * b.tgt.n + rb, (ca - 1) * b.src.n + cb)
        for ra, ca in a.grading for rb, cb in b.grading
    )
    return GradedOneCell(src, tgt, grading)


def outer_2cell(f: BlockTwoCell, g: BlockTwoCell) -> BlockTwoCell:
    return BlockTwoCell(outer_cell(f.source, g.source),
                        outer_cell(f.target, g.target),
                        np.kron(f.mat, g.mat))


def interchanger(a: GradedOneCell, b: GradedOneCell,
                 c: GradedOneCell, d: GradedOneCell) -> BlockTwoCell:
    """Permutation ``(a x b) . (c x d) -> (a . c) x (b . d)``."""
    if a.src != c.tgt or b.src != d.tgt:
        raise CellMismatch("interchanger factors are not composable")
    src = hcomp1(outer_cell(a, b), outer_cell(c, d))
    tgt = outer_cell(hcomp1(a, c), hcomp1(b, d))
    ac = {pq: k for k, pq in enumerate(hcomp_pairs(a, c))}
    bd = {pq: k for k, pq in enumerate(hcomp_pairs(b, d))}
    bd_dim = len(bd)
    mat = np.zeros((tgt.dim, src.dim), dtype=complex)
    for col, (i, j) in enumerate(hcomp_pairs(outer_cell(a, b), outer_cell(c, d))):
        p, q = divmod(i, b.dim)
        p2, q2 = divmod(j, d.dim)
        row = ac[(p, p2)] * bd_dim + bd[(q, q2)]
        mat[row, col] = 1.0
    return BlockTwoCell(src, tgt, mat)


# --------------------------------------------------------------------------
# presentations and scenarios


def random_presentation(rng: np.random.Generator, max_zero: int = 3,
                        max_gens: int = 4,
                        with_two_cell: bool = True) -> PresentedTwoCat:
    n0 = int(rng.integers(1, max_zero + 1))
    zero = tuple("abc"[:n0])
    ng = int(rng.integers(1, max_gens + 1))
    gens = []
    for k in range(ng):
        s = zero[int(rng.integers(0, n0))]
        t = zero[int(rng.integers(0, n0))]
        gens.append(GenOneCell(f"X{k + 1}", s, t))
    two = ()
    if with_two_cell and rng.random() < 0.5:
        for g in gens:
            mates = [h for h in gens
                     if h.label != g.label and (h.src, h.tgt) == (g.src, g.tgt)]
            if mates:
                h = mates[0]
                p = Path((g.label,), g.src, g.tgt)
                q = Path((h.label,), h.src, h.tgt)
                two = (GenTwoCell("f1", p, q),)
                break
    return PresentedTwoCat(zero, tuple(gens), two)


def random_free_functor(rng: np.random.Generator, cat: PresentedTwoCat,
                        max_zero_dim: int = 3,
                        max_sector_dim: int = 2) -> FunctorData:
    on0 = {a: ZeroCell(int(rng.integers(1, max_zero_dim + 1)))
           for a in cat.zero_cells}
    on1 = {}
    for g in cat.gen_one_cells:
        on1[g.label] = random_cell(rng, on0[g.src].n, on0[g.tgt].n,
                                   max_sector_dim)
    f = FunctorData(cat, on0, on1)
    on2 = {}
    for t in cat.gen_two_cells:
        on2[t.label] = random_sector_matrix(rng, f.cell(t.source), f.cell(t.target))
    f.on2 = on2
    return f


def product_scenario(rng: np.random.Generator,
                     cat: PresentedTwoCat | None = None,
                     max_composite_dim: int = 300, max_psi_dim: int = 20):
    """Random valid Q-system on End(F): a dressed block Q-system
    tensored with a random functor, with random unitary gauges on the
    generator images.

    Scenarios whose verification would touch composites above
    ``max_composite_dim`` (or Q-systems above ``max_psi_dim``) are
    resampled, keeping the downstream eigendecompositions small.

    Returns ``(cat, F, EndFQSystem)``.
    """
    for _ in range(64):
        c = cat if cat is not None else random_presentation(rng)
        out = _product_scenario_once(rng, c)
        if out is None:
            continue
        if _scenario_cost(*out) <= (max_composite_dim, max_psi_dim):
            return out
    raise RuntimeError("could not sample a scenario within the size budget")


def _scenario_cost(cat: PresentedTwoCat, f: FunctorData,
                   endf: EndFQSystem) -> tuple[int, int]:
    """(largest composite dimension, largest Q-system dimension) that
    the full verification will touch, predicted from proxy cells with
    the sector dimensions of the splitting output."""
    psi_dim = max(endf.psi.comp0[a].dim for a in cat.zero_cells)
    # psi_a has the sector profile of xbar_a . x_a, so using it in place
    # of the (unknown) splitting cells overestimates every composite
    xb_proxy = {a: endf.psi.comp0[a] for a in cat.zero_cells}
    x_proxy = xb_proxy
    worst = 0
    for p, q in cat.composable_pairs():
        a, b, c = q.src, p.src, p.tgt
        dim = hcomp1_many(x_proxy[c], f.cell(p), xb_proxy[b],
                          f.cell(q), xb_proxy[a]).dim
        worst = max(worst, dim)
    for p, q, r in cat.composable_triples():
        a, c = r.src, p.tgt
        dim = hcomp1_many(x_proxy[c], f.cell(p * q * r), xb_proxy[a]).dim
        worst = max(worst, dim)
    return worst, psi_dim


def _product_scenario_once(rng: np.random.Generator, cat: PresentedTwoCat):
    b_q = int(rng.integers(1, 3))
    k_q = int(rng.integers(1, 3))
    max_dim = 2 if k_q == 1 else 1
    y = random_cell(rng, k_q, b_q, max_dim, full_cols=True)
    if y.dim > 4:
        return None
    q0 = dress_qsystem(rng, qsystem_from_dual(standard_dual_pair(y)))
    qc = q0.Q

    m_of = {a: int(rng.integers(1, 3)) for a in cat.zero_cells}
    h1 = {}
    for g in cat.gen_one_cells:
        h1[g.label] = random_cell(rng, m_of[g.src], m_of[g.tgt],
                                  max_sector_dim=1, zero_bias=0.3)
    on0 = {a: ZeroCell(b_q * m_of[a]) for a in cat.zero_cells}
    on1 = {g.label: outer_cell(id1(b_q), h1[g.label]) for g in cat.gen_one_cells}
    f = FunctorData(cat, on0, on1)

    units = {a: id1(m_of[a]) for a in cat.zero_cells}
    psi0 = {a: outer_cell(qc, units[a]) for a in cat.zero_cells}
    dress = {a: random_block_unitary(rng, psi0[a]) for a in cat.zero_cells}
    gauges = {g.label: random_block_unitary(rng, on1[g.label])
              for g in cat.gen_one_cells}

    comp1 = {}
    for g in cat.gen_one_cells:
        a, b = g.src, g.tgt
        hx = h1[g.label]
        up = vcomp(outer_2cell(unitor_right(qc), unitor_left(hx)),
                   interchanger(qc, units[b], id1(b_q), hx))
        dn = vcomp(outer_2cell(unitor_left(qc), unitor_right(hx)),
                   interchanger(id1(b_q), hx, qc, units[a]))
        base = vcomp(dagger2(dn), up)
        w = gauges[g.label]
        cell = vcomp_many(
            hcomp2(w, id2(psi0[a])),
            hcomp2(id2(f.cell(cat.path((g.label,)))), dress[a]),
            base,
            hcomp2(dagger2(dress[b]), id2(on1[g.label])),
            hcomp2(id2(psi0[b]), dagger2(w)),
        )
        comp1[cat.path((g.label,))] = cell

    m = {}
    i = {}
    for a in cat.zero_cells:
        v = dress[a]
        base_m = vcomp(outer_2cell(q0.m, id2(units[a])),
                       interchanger(qc, units[a], qc, units[a]))
        m[a] = vcomp(v, vcomp(base_m, hcomp2(dagger2(v), dagger2(v))))
        i[a] = vcomp(v, outer_2cell(q0.i, id2(units[a])))

    on2 = {}
    for t in cat.gen_two_cells:
        hf = random_sector_matrix(rng, h1[t.source.labels[0]],
                                  h1[t.target.labels[0]])
        base = outer_2cell(id2(id1(b_q)), hf)
        on2[t.label] = vcomp_many(gauges[t.target.labels[0]], base,
                                  dagger2(gauges[t.source.labels[0]]))
    f.on2 = on2

    psi = TransformationData(f, f, psi0, comp1)
    return cat, f, EndFQSystem(psi, ModificationData(m), ModificationData(i))


def random_constant_scenario(rng: np.random.Generator,
                             cat: PresentedTwoCat | None = None,
                             zero_cell: int = 2, blocks: int = 2,
                             max_sector_dim: int = 2):
    """Presentation plus random Q-system for the constant-functor
    scenario.  Returns ``(cat, QSystemData)``."""
    from .funcat import constant_functor_scenario

    c = cat if cat is not None else random_presentation(rng)
    q, _ = random_qsystem(rng, zero_cell, blocks, max_sector_dim)
    f, endf = constant_functor_scenario(c, q)
    return c, q, f, endf


def summed_transformation(rng: np.random.Generator, cat: PresentedTwoCat,
                          summands: int = 2):
    """Random transformation assembled as a direct sum of ``summands``
    independent unitary layers over permutation-shaped components, plus
    the projection modification onto a sub-family of layers.

    Returns ``(phi, p, kept)`` where ``p`` projects onto ``kept``
    layers.
    """
    f = random_free_functor(rng, cat)
    perm = {}
    for a in cat.zero_cells:
        n = f.on0[a].n
        perm[a] = list(rng.permutation(n) + 1)

    g_on0 = {a: f.on0[a] for a in cat.zero_cells}
    g_on1 = {}
    for gen in cat.gen_one_cells:
        img = f.on1[gen.label]
        pa, pb = perm[gen.src], perm[gen.tgt]
        grading = sorted((pb[r - 1], pa[c - 1]) for r, c in img.grading)
        g_on1[gen.label] = GradedOneCell(img.src, img.tgt, tuple(grading))
    g = FunctorData(cat, g_on0, g_on1)

    layer0 = {a: GradedOneCell(f.on0[a], g.on0[a],
                               tuple(sorted((perm[a][i - 1], i)
                                            for i in range(1, f.on0[a].n + 1))))
              for a in cat.zero_cells}
    comp0 = {a: GradedOneCell(
        f.on0[a], g.on0[a],
        tuple(gp for gp in layer0[a].grading for _ in range(summands)))
        for a in cat.zero_cells}

    def embed(a: str, layer: int) -> np.ndarray:
        e = np.zeros((comp0[a].dim, layer0[a].dim), dtype=complex)
        for i in range(layer0[a].dim):
            e[i * summands + layer, i] = 1.0
        return e

    comp1 = {}
    for gen in cat.gen_one_cells:
        a, b = gen.src, gen.tgt
        path = cat.path((gen.label,))
        src1 = hcomp1(layer0[b], f.cell(path))
        tgt1 = hcomp1(g_on1[gen.label], layer0[a])
        src = hcomp1(comp0[b], f.cell(path))
        tgt = hcomp1(g_on1[gen.label], comp0[a])
        esrc = {k: _embed_left_factor(comp0[b], layer0[b], embed(b, k),
                                      f.cell(path)) for k in range(summands)}
        etgt = {k: _embed_right_factor(g_on1[gen.label], comp0[a], layer0[a],
                                       embed(a, k)) for k in range(summands)}
        mat = np.zeros((tgt.dim, src.dim), dtype=complex)
        for k in range(summands):
            u = random_block_unitary(rng, src1, tgt1)
            mat += etgt[k] @ u.mat @ esrc[k].conj().T
        comp1[path] = BlockTwoCell(src, tgt, mat)
    phi = TransformationData(f, g, comp0, comp1)

    kept = sorted(rng.choice(summands, size=max(1, summands - 1),
                             replace=False).tolist())
    p = {}
    for a in cat.zero_cells:
        mat = np.zeros((comp0[a].dim, comp0[a].dim), dtype=complex)
        for k in kept:
            e = embed(a, k)
            mat += e @ e.conj().T
        p[a] = BlockTwoCell(comp0[a], comp0[a], mat)
    return phi, ModificationData(p), kept


def _basis_mapping(embed_mat: np.ndarray) -> dict[int, int]:
    small_idx, big_idx = np.nonzero(embed_mat.T)
    return {int(s): int(b) for s, b in zip(small_idx, big_idx)}


def _embed_left_factor(big_left, small_left, embed_mat, right) -> np.ndarray:
    """Basis embedding ``small_left . right -> big_left . right``
    induced by a 0/1 embedding of the left factor's basis."""
    big_pairs = {pq: k for k, pq in enumerate(hcomp_pairs(big_left, right))}
    small_pairs = hcomp_pairs(small_left, right)
    mapping = _basis_mapping(embed_mat)
    out = np.zeros((len(big_pairs), len(small_pairs)), dtype=complex)
    for k, (p, q) in enumerate(small_pairs):
        out[big_pairs[(mapping[p], q)], k] = 1.0
    return out


def _embed_right_factor(left, big_right, small_right, embed_mat) -> np.ndarray:
    """Basis embedding ``left . small_right -> left . big_right``."""
    big_pairs = {pq: k for k, pq in enumerate(hcomp_pairs(left, big_right))}
    small_pairs = hcomp_pairs(left, small_right)
    mapping = _basis_mapping(embed_mat)
    out = np.zeros((len(big_pairs), len(small_pairs)), dtype=complex)
    for k, (p, q) in enumerate(small_pairs):
        out[big_pairs[(p, mapping[q])], k] = 1.0
    return out
