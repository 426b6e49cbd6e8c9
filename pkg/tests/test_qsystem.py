import numpy as np
import pytest

from qhilb.cells import (
    dagger2,
    hcomp1,
    hcomp2,
    id1,
    id2,
    one_cell,
    residual,
    two_cell,
    vcomp,
)
from qhilb.errors import CellMismatch
from qhilb.generate import (
    dress_qsystem,
    random_cell,
    random_qsystem,
    random_sector_matrix,
)
from qhilb.linalg import frob
from qhilb.qsystem import (
    BimoduleData,
    canonical_pairing,
    check_bimodule,
    check_intertwiner,
    check_qsystem,
    check_qsystem_iso,
    free_bimodule,
    qsystem_from_dual,
    relative_tensor,
    standard_dual_pair,
    trivial_qsystem,
    unit_bimodule,
    zigzag_residuals,
)

RNG = np.random.default_rng(512)


def m2_qsystem():
    x = one_cell(1, 1, [(1, 1)] * 2)
    return qsystem_from_dual(standard_dual_pair(x))


def test_trivial_qsystem_exact():
    for n in (1, 4):
        rep = check_qsystem(trivial_qsystem(n))
        assert rep.max_residual == 0.0


def test_qsystem_from_dual_unit_cell():
    q = qsystem_from_dual(standard_dual_pair(id1(3)))
    t = trivial_qsystem(3)
    assert q.Q == t.Q
    assert residual(q.m, t.m) < 1e-12
    assert residual(q.i, t.i) < 1e-12


def test_m2_qsystem():
    q = m2_qsystem()
    assert q.Q.dim == 4
    assert frob(q.m.mat @ q.m.mat.conj().T - np.eye(4)) < 1e-12
    # multiplication is the matrix product scaled by 2^{-1/2}
    nonzero = np.abs(q.m.mat[q.m.mat != 0])
    assert np.allclose(nonzero, 1 / np.sqrt(2))
    rep = check_qsystem(q)
    assert rep.max_residual < 1e-12


def test_qsystem_from_random_duals():
    for _ in range(10):
        x = random_cell(RNG, 3, 2, 2, full_cols=True)
        q = qsystem_from_dual(standard_dual_pair(x))
        assert check_qsystem(q).max_residual < 1e-9


def test_perturbed_qsystem_fails():
    q = m2_qsystem()
    noise = random_sector_matrix(RNG, q.m.source, q.m.target, scale=1e-3)
    bad = type(q)(q.Q, two_cell(q.m.source, q.m.target, q.m.mat + noise.mat), q.i)
    rep = check_qsystem(bad)
    assert rep.max_residual > 1e-9


def test_unit_nonzero_and_m_full_rank():
    # unitality and separability force i != 0 and m of full row rank
    for _ in range(5):
        q, _ = random_qsystem(RNG, zero_cell=2, blocks=2)
        assert frob(q.i.mat) > 0.5
        s = np.linalg.svd(q.m.mat, compute_uv=False)
        assert s[q.Q.dim - 1] > 0.5


def test_canonical_pairing_trivial():
    q = trivial_qsystem(2)
    ev, coev = canonical_pairing(q)
    assert residual(ev, vcomp(dagger2(q.i), q.m)) == 0
    assert np.allclose(np.abs(ev.mat[ev.mat != 0]), 1.0)


def test_canonical_pairing_zigzags():
    for _ in range(5):
        x = random_cell(RNG, 2, 2, 2, full_cols=True)
        q = qsystem_from_dual(standard_dual_pair(x))
        ev, coev = canonical_pairing(q)
        r1, r2 = zigzag_residuals(q.Q, q.Q, ev, coev)
        assert max(r1, r2) < 1e-9


def test_canonical_pairing_m2_scalar():
    q = m2_qsystem()
    ev, coev = canonical_pairing(q)
    loop = vcomp(ev, coev)
    # dimension-like scalar: squared norm of the unit
    assert np.allclose(loop.mat, [[4.0]])


def test_free_bimodule_passes():
    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2)
    rep = check_bimodule(free_bimodule(q))
    assert rep.max_residual < 1e-9


def test_unit_bimodule_exact():
    x = random_cell(RNG, 2, 3, 2)
    rep = check_bimodule(unit_bimodule(x))
    assert rep.max_residual == 0.0


def test_random_action_fails():
    q = m2_qsystem()
    b = free_bimodule(q)
    lam = random_sector_matrix(RNG, b.lam.source, b.lam.target)
    bad = BimoduleData(b.P, b.Q, b.X, lam, b.rho)
    assert check_bimodule(bad).max_residual > 1e-6


def test_intertwiner_identity_and_random():
    q, _ = random_qsystem(RNG, zero_cell=1, blocks=2, dress=False)
    b = free_bimodule(q)
    rep = check_intertwiner(id2(q.Q), b, b)
    assert rep.max_residual < 1e-12
    f = random_sector_matrix(RNG, q.Q, q.Q)
    assert check_intertwiner(f, b, b).max_residual > 1e-6


def test_intertwiner_central_element():
    # multiplication by a central element intertwines both actions
    from qhilb.splitting import central_decomposition

    q, _ = random_qsystem(RNG, zero_cell=1, blocks=2, dress=False)
    z = central_decomposition(q, rng=np.random.default_rng(3))[0]
    f = two_cell(q.Q, q.Q, z)
    rep = check_intertwiner(f, free_bimodule(q), free_bimodule(q))
    assert rep.max_residual < 1e-8


def test_relative_tensor_over_trivial():
    x = random_cell(RNG, 2, 3, 2)
    y = random_cell(RNG, 1, 2, 2)
    zc, r = relative_tensor(unit_bimodule(x), unit_bimodule(y))
    prod = hcomp1(x, y)
    assert zc.dim == prod.dim
    assert frob(r.mat @ r.mat.conj().T - np.eye(zc.dim)) < 1e-9
    # r* r = p = id here: r is the unitary identifying both sides
    assert frob(r.mat.conj().T @ r.mat - np.eye(prod.dim)) < 1e-9


def test_relative_tensor_self():
    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2, dress=False)
    b = free_bimodule(q)
    zc, r = relative_tensor(b, b)
    assert zc.dim == q.Q.dim
    assert frob(r.mat @ r.mat.conj().T - np.eye(zc.dim)) < 1e-9


def _induced_actions(b, zc, r):
    """Left/right actions induced on a relative tensor product."""
    lam = vcomp(r, vcomp(hcomp2(b.lam, id2(b.X)), hcomp2(id2(b.Q.Q), dagger2(r))))
    rho = vcomp(r, vcomp(hcomp2(id2(b.X), b.rho), hcomp2(dagger2(r), id2(b.P.Q))))
    return lam, rho


def test_relative_tensor_associative_up_to_unitary():
    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2, dress=False)
    b = free_bimodule(q)
    z1, r1 = relative_tensor(b, b)
    lam1, rho1 = _induced_actions(b, z1, r1)
    left_mod = BimoduleData(q, q, z1, lam1, rho1)
    z12, r12 = relative_tensor(left_mod, b)
    t_left = vcomp(r12, hcomp2(r1, id2(q.Q)))

    z2, r2 = relative_tensor(b, b)
    lam2, rho2 = _induced_actions(b, z2, r2)
    right_mod = BimoduleData(q, q, z2, lam2, rho2)
    z21, r21 = relative_tensor(b, right_mod)
    t_right = vcomp(r21, hcomp2(id2(q.Q), r2))

    u = t_left.mat @ t_right.mat.conj().T
    assert frob(u @ u.conj().T - np.eye(z12.dim)) < 1e-8
    assert frob(u.conj().T @ u - np.eye(z21.dim)) < 1e-8


def test_check_qsystem_iso():
    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2)
    assert check_qsystem_iso(id2(q.Q), q, q).max_residual < 1e-12
    from qhilb.generate import random_block_unitary
    g = random_block_unitary(RNG, q.Q)
    rep = check_qsystem_iso(g, q, q)
    assert rep["unitary"] < 1e-12
    assert rep["multiplication"] > 1e-6


def test_dressed_qsystem_valid():
    q, _ = random_qsystem(RNG, zero_cell=2, blocks=2, dress=False)
    qd = dress_qsystem(RNG, q)
    assert check_qsystem(qd).max_residual < 1e-9


def test_qsystem_shape_validation():
    q = m2_qsystem()
    with pytest.raises(CellMismatch):
        type(q)(q.Q, q.i, q.i)
