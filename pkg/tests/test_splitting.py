import numpy as np
import pytest

from qhilb.cells import dagger2, id2, one_cell, residual, two_cell, vcomp
from qhilb.errors import NotAProjection
from qhilb.generate import (
    dsum_qsystems,
    random_cell,
    random_qsystem,
)
from qhilb.linalg import Tolerance, dagger, frob
from qhilb.qsystem import (
    check_qsystem,
    check_qsystem_iso,
    qsystem_from_dual,
    standard_dual_pair,
    trivial_qsystem,
)
from qhilb.splitting import (
    central_decomposition,
    regular_reps,
    split_projection,
    split_qsystem,
)

RNG = np.random.default_rng(2718)


def block_dims(res):
    counts = [0] * res.k.n
    for _, t in res.pair.X.grading:
        counts[t - 1] += 1
    return sorted(counts)


def test_split_projection_identity():
    x = random_cell(RNG, 2, 2, 3)
    y, u = split_projection(x, id2(x))
    assert y.dim == x.dim
    assert frob(u.mat @ dagger(u.mat) - np.eye(x.dim)) < 1e-9


def test_split_projection_zero():
    x = random_cell(RNG, 2, 2, 2)
    zero = two_cell(x, x, np.zeros((x.dim, x.dim)))
    y, u = split_projection(x, zero)
    assert y.dim == 0


def test_split_projection_known_ranks():
    x = one_cell(1, 2, [(1, 1)] * 3 + [(2, 1)] * 4)
    ranks = {(1, 1): 2, (2, 1): 1}
    mat = np.zeros((7, 7), dtype=complex)
    idx = {(1, 1): [0, 1, 2], (2, 1): [3, 4, 5, 6]}
    for g, ii in idx.items():
        z = RNG.standard_normal((len(ii), ranks[g])) \
            + 1j * RNG.standard_normal((len(ii), ranks[g]))
        w = np.linalg.qr(z)[0][:, :ranks[g]]
        mat[np.ix_(ii, ii)] = w @ dagger(w)
    p = two_cell(x, x, mat)
    y, u = split_projection(x, p)
    assert sorted(y.grading) == [(1, 1)] * 2 + [(2, 1)]
    assert residual(vcomp(u, dagger2(u)), p) < 1e-8
    assert frob(dagger(u.mat) @ u.mat - np.eye(3)) < 1e-9


def test_split_projection_rejects():
    x = random_cell(RNG, 2, 2, 2)
    from qhilb.generate import random_sector_matrix
    with pytest.raises(NotAProjection):
        split_projection(x, random_sector_matrix(RNG, x, x))


def test_regular_reps_trivial():
    rep = regular_reps(trivial_qsystem(3))
    for j, l in enumerate(rep.left_ops):
        e = np.zeros((3, 3))
        e[j, j] = 1
        assert frob(l - e) < 1e-12
        assert frob(rep.right_ops[j] - e) < 1e-12


def test_regular_reps_m2_span():
    x = one_cell(1, 1, [(1, 1)] * 2)
    q = qsystem_from_dual(standard_dual_pair(x))
    rep = regular_reps(q)
    vecs = np.stack([l.reshape(-1) for l in rep.left_ops])
    assert np.linalg.matrix_rank(vecs) == 4


def test_regular_reps_homomorphism():
    from qhilb.cells import hcomp_pairs

    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2)
    rep = regular_reps(q)
    index = {pq: k for k, pq in enumerate(hcomp_pairs(q.Q, q.Q))}
    n = q.Q.dim
    worst = 0.0
    for b in range(n):
        for c in range(n):
            prod = np.zeros(n, dtype=complex)
            if (b, c) in index:
                prod = q.m.mat[:, index[(b, c)]]
            expected = sum(prod[d] * rep.left_ops[d] for d in range(n))
            worst = max(worst, frob(rep.left_ops[b] @ rep.left_ops[c] - expected))
    assert worst < 1e-9


def test_regular_reps_commute_and_star_closed():
    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2)
    rep = regular_reps(q)
    for l in rep.left_ops[:4]:
        for r in rep.right_ops[:4]:
            assert frob(l @ r - r @ l) < 1e-9
    # the span of the left operators is closed under adjoints
    vecs = np.stack([l.reshape(-1) for l in rep.left_ops], axis=1)
    proj = vecs @ np.linalg.pinv(vecs)
    for l in rep.left_ops:
        v = dagger(l).reshape(-1)
        assert np.linalg.norm(proj @ v - v) < 1e-8


def test_central_decomposition_trivial():
    zs = central_decomposition(trivial_qsystem(3), rng=np.random.default_rng(1))
    assert len(zs) == 3
    for z in zs:
        assert round(float(np.real(np.trace(z)))) == 1


def test_central_decomposition_m2():
    x = one_cell(1, 1, [(1, 1)] * 2)
    q = qsystem_from_dual(standard_dual_pair(x))
    zs = central_decomposition(q, rng=np.random.default_rng(1))
    assert len(zs) == 1
    assert frob(zs[0] - np.eye(4)) < 1e-9


def test_central_decomposition_direct_sum():
    x1 = one_cell(1, 1, [(1, 1)] * 2)
    x2 = one_cell(1, 1, [(1, 1)] * 3)
    q = dsum_qsystems(qsystem_from_dual(standard_dual_pair(x1)),
                      qsystem_from_dual(standard_dual_pair(x2)))
    assert check_qsystem(q).max_residual < 1e-12
    zs = central_decomposition(q, rng=np.random.default_rng(1))
    assert len(zs) == 2


def test_split_trivial():
    res = split_qsystem(trivial_qsystem(4), rng=np.random.default_rng(0))
    assert res.k.n == 4
    assert block_dims(res) == [1, 1, 1, 1]
    # gamma is a permutation times phases
    mags = np.abs(res.gamma.mat)
    assert np.allclose(np.sort(mags, axis=None)[-4:], 1.0)


def test_split_m2():
    x = one_cell(1, 1, [(1, 1)] * 2)
    q = qsystem_from_dual(standard_dual_pair(x))
    res = split_qsystem(q, rng=np.random.default_rng(0))
    assert res.k.n == 1 and res.pair.X.dim == 2
    assert res.gamma.mat.shape == (4, 4)
    rep = check_qsystem_iso(res.gamma, qsystem_from_dual(res.pair), q)
    assert rep.max_residual < 1e-8


def test_split_roundtrip_random():
    rng = np.random.default_rng(7)
    for _ in range(8):
        while True:
            x = random_cell(rng, 2, 3, 2, full_cols=True)
            counts = [0, 0]
            for _, c in x.grading:
                counts[c - 1] += 1
            if sum(d * d for d in counts) <= 24:
                break
        q = qsystem_from_dual(standard_dual_pair(x))
        res = split_qsystem(q, rng=rng)
        assert res.k.n == 2
        assert block_dims(res) == sorted(counts)
        rep = check_qsystem_iso(res.gamma, qsystem_from_dual(res.pair), q)
        assert rep.max_residual < 1e-8


def test_split_dressed():
    rng = np.random.default_rng(11)
    q, dims = random_qsystem(rng, zero_cell=3, blocks=3, max_sector_dim=2)
    res = split_qsystem(q, rng=rng)
    assert block_dims(res) == dims
    rep = check_qsystem_iso(res.gamma, qsystem_from_dual(res.pair), q)
    assert rep.max_residual < 1e-8


def test_split_gamma_unitary_and_separable():
    rng = np.random.default_rng(13)
    q, _ = random_qsystem(rng, zero_cell=2, blocks=2)
    res = split_qsystem(q, rng=rng)
    g = res.gamma.mat
    assert frob(g @ dagger(g) - np.eye(g.shape[0])) < 1e-8
    assert frob(dagger(g) @ g - np.eye(g.shape[1])) < 1e-8
    ev = res.pair.ev
    assert frob(ev.mat @ dagger(ev.mat) - np.eye(res.k.n)) < 1e-9


def test_degenerate_randomness_raises():
    from qhilb.errors import DegenerateRandomElement
    from qhilb.splitting import _central_from_rep
    from qhilb.linalg import Tolerance

    class ZeroRng:
        def standard_normal(self, n):
            return np.zeros(n)

    rep = regular_reps(trivial_qsystem(3))
    with pytest.raises(DegenerateRandomElement):
        _central_from_rep(rep, Tolerance(), ZeroRng())


def test_split_seed_deterministic():
    q, _ = random_qsystem(np.random.default_rng(5), zero_cell=2, blocks=2)
    r1 = split_qsystem(q, rng=np.random.default_rng(42))
    r2 = split_qsystem(q, rng=np.random.default_rng(42))
    assert np.array_equal(r1.gamma.mat, r2.gamma.mat)
    assert r1.pair.X.grading == r2.pair.X.grading
