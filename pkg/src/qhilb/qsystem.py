"""Q-systems, bimodules and intertwiners over graded matrices.

A Q-system is a one-cell ``Q : b -> b`` with multiplication
``m : Q . Q -> Q`` and unit ``i : unit -> Q`` satisfying associativity,
unitality, the Frobenius condition and separability ``m m* = id``.
Checkers report Frobenius-norm residuals per axiom and never raise on
failure: verification is the product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import (
    BlockTwoCell,
    GradedOneCell,
    ZeroCell,
    dagger2,
    hcomp1,
    hcomp2,
    id1,
    id2,
    is_unitary_residual,
    residual,
    standard_dual,
    unitor_left,
    unitor_right,
    vcomp,
    vcomp_many,
)
from .errors import CellMismatch
from .linalg import Tolerance, frob
from .report import ResidualReport

__all__ = [
    "QSystemData",
    "DualPair",
    "BimoduleData",
    "check_qsystem",
    "trivial_qsystem",
    "qsystem_from_dual",
    "canonical_pairing",
    "check_dual_pair",
    "check_bimodule",
    "check_intertwiner",
    "relative_tensor",
    "check_qsystem_iso",
]


@dataclass(frozen=True, eq=False)
class QSystemData:
    """One-cell ``Q : b -> b`` with multiplication and unit two-cells."""

    Q: GradedOneCell
    m: BlockTwoCell
    i: BlockTwoCell

    def __post_init__(self):
        if self.Q.src != self.Q.tgt:
            raise CellMismatch("a Q-system lives on a single zero-cell")
        if self.m.source != hcomp1(self.Q, self.Q) or self.m.target != self.Q:
            raise CellMismatch("multiplication must map Q.Q -> Q")
        if self.i.source != id1(self.Q.src) or self.i.target != self.Q:
            raise CellMismatch("unit must map unit -> Q")

    @property
    def zero_cell(self) -> ZeroCell:
        return self.Q.src


@dataclass(frozen=True, eq=False)
class DualPair:
    """Dual ``(x, xbar, ev, coev)`` with exact zig-zags and ``ev ev* = id``."""

    X: GradedOneCell
    Xbar: GradedOneCell
    ev: BlockTwoCell
    coev: BlockTwoCell


@dataclass(frozen=True, eq=False)
class BimoduleData:
    """One-cell with compatible left Q-action and right P-action."""

    P: QSystemData
    Q: QSystemData
    X: GradedOneCell
    lam: BlockTwoCell
    rho: BlockTwoCell

    def __post_init__(self):
        if self.lam.source != hcomp1(self.Q.Q, self.X) or self.lam.target != self.X:
            raise CellMismatch("left action must map Q.X -> X")
        if self.rho.source != hcomp1(self.X, self.P.Q) or self.rho.target != self.X:
            raise CellMismatch("right action must map X.P -> X")


def _mult_tensor(q: QSystemData) -> np.ndarray:
    """The multiplication as an N x N x N tensor: t[i, a, b] is the
    coefficient of basis vector i in the product of a and b (zero for
    non-composable pairs)."""
    from .cells import hcomp_pairs

    n = q.Q.dim
    t = np.zeros((n, n, n), dtype=complex)
    for k, (a, b) in enumerate(hcomp_pairs(q.Q, q.Q)):
        t[:, a, b] = q.m.mat[:, k]
    return t


def check_qsystem(q: QSystemData, tol: Tolerance = Tolerance()) -> ResidualReport:
    """Residuals of the four Q-system axioms.

    Keys Q1 (associativity), Q2 (unitality, both sides), Q3 (Frobenius,
    both equalities), Q4 (separability).  The unit's norm is recorded as
    info; no normalization of ``i* i`` is imposed.

    The heavy composites are contracted directly on the multiplication
    tensor; the sparsity of the whiskered two-cells makes this exactly
    equivalent to composing them and far cheaper on large cells.
    """
    Q, m, i = q.Q, q.m, q.i
    rep = ResidualReport()
    t = _mult_tensor(q)
    tc = t.conj()
    rep.add("Q1", frob(np.einsum("iuc,uab->iabc", t, t)
                       - np.einsum("iau,ubc->iabc", t, t)))
    left_unit = vcomp(m, hcomp2(i, id2(Q)))
    right_unit = vcomp(m, hcomp2(id2(Q), i))
    rep.add("Q2", max(residual(left_unit, unitor_left(Q)),
                      residual(right_unit, unitor_right(Q))))
    mid = np.einsum("ipv,iuq->pvuq", tc, t)
    rep.add("Q3", max(
        frob(np.einsum("vrq,upr->pvuq", t, tc) - mid),
        frob(np.einsum("pub,qbv->pvuq", t, tc) - mid),
    ))
    rep.add("Q4", residual(vcomp(m, dagger2(m)), id2(Q)))
    rep.add_info("unit_norm", frob(i.mat))
    return rep


def trivial_qsystem(n: ZeroCell | int) -> QSystemData:
    """The tensor unit with its obvious Q-system structure."""
    Q = id1(n)
    return QSystemData(Q, unitor_left(Q), id2(Q))


def qsystem_from_dual(d: DualPair) -> QSystemData:
    """Q-system ``x . xbar`` with ``m = id . ev . id`` and ``i = coev``."""
    Q = hcomp1(d.X, d.Xbar)
    pinch = hcomp2(id2(d.X), hcomp2(d.ev, id2(d.Xbar)))
    m = vcomp(hcomp2(id2(d.X), unitor_left(d.Xbar)), pinch)
    return QSystemData(Q, m, d.coev)


def canonical_pairing(q: QSystemData) -> tuple[BlockTwoCell, BlockTwoCell]:
    """Self-duality pairing ``ev = i* . m`` and ``coev = m* . i``."""
    ev = vcomp(dagger2(q.i), q.m)
    coev = vcomp(dagger2(q.m), q.i)
    return ev, coev


def zigzag_residuals(X: GradedOneCell, Xbar: GradedOneCell,
                     ev: BlockTwoCell, coev: BlockTwoCell) -> tuple[float, float]:
    """Residuals of the two zig-zag identities (unitors inserted)."""
    z1 = vcomp_many(
        hcomp2(id2(X), ev),
        hcomp2(coev, id2(X)),
        dagger2(unitor_left(X)),
    )
    r1 = residual(z1, dagger2(unitor_right(X)))
    z2 = vcomp_many(
        hcomp2(ev, id2(Xbar)),
        hcomp2(id2(Xbar), coev),
        dagger2(unitor_right(Xbar)),
    )
    r2 = residual(z2, dagger2(unitor_left(Xbar)))
    return r1, r2


def check_dual_pair(d: DualPair, tol: Tolerance = Tolerance()) -> ResidualReport:
    rep = ResidualReport()
    r1, r2 = zigzag_residuals(d.X, d.Xbar, d.ev, d.coev)
    rep.add("zigzag_left", r1)
    rep.add("zigzag_right", r2)
    sep = vcomp(d.ev, dagger2(d.ev))
    rep.add("ev_coisometry", residual(sep, id2(id1(d.X.src))))
    return rep


def standard_dual_pair(x: GradedOneCell) -> DualPair:
    xbar, ev, coev = standard_dual(x)
    return DualPair(x, xbar, ev, coev)


def check_bimodule(b: BimoduleData, tol: Tolerance = Tolerance()) -> ResidualReport:
    """Residuals of the bimodule axioms B1 (associativity, three
    equations), B2 (unitality), B3 (Frobenius) and B4 (separability)."""
    P, Q, X, lam, rho = b.P.Q, b.Q.Q, b.X, b.lam, b.rho
    mQ, iQ = b.Q.m, b.Q.i
    mP, iP = b.P.m, b.P.i
    rep = ResidualReport()
    rep.add("B1", max(
        residual(vcomp(lam, hcomp2(id2(Q), lam)), vcomp(lam, hcomp2(mQ, id2(X)))),
        residual(vcomp(rho, hcomp2(rho, id2(P))), vcomp(rho, hcomp2(id2(X), mP))),
        residual(vcomp(lam, hcomp2(id2(Q), rho)), vcomp(rho, hcomp2(lam, id2(P)))),
    ))
    rep.add("B2", max(
        residual(vcomp(lam, hcomp2(iQ, id2(X))), unitor_left(X)),
        residual(vcomp(rho, hcomp2(id2(X), iP)), unitor_right(X)),
    ))
    lam_mid = vcomp(dagger2(lam), lam)
    rho_mid = vcomp(dagger2(rho), rho)
    rep.add("B3", max(
        residual(vcomp(hcomp2(mQ, id2(X)), hcomp2(id2(Q), dagger2(lam))), lam_mid),
        residual(vcomp(hcomp2(id2(Q), lam), hcomp2(dagger2(mQ), id2(X))), lam_mid),
        residual(vcomp(hcomp2(rho, id2(P)), hcomp2(id2(X), dagger2(mP))), rho_mid),
        residual(vcomp(hcomp2(id2(X), mP), hcomp2(dagger2(rho), id2(P))), rho_mid),
    ))
    rep.add("B4", max(
        residual(vcomp(lam, dagger2(lam)), id2(X)),
        residual(vcomp(rho, dagger2(rho)), id2(X)),
    ))
    return rep


def free_bimodule(q: QSystemData) -> BimoduleData:
    """Q acting on itself by multiplication on both sides."""
    return BimoduleData(q, q, q.Q, q.m, q.m)


def unit_bimodule(x: GradedOneCell) -> BimoduleData:
    """Any one-cell as a bimodule over the trivial Q-systems (actions
    are the unitors)."""
    return BimoduleData(
        trivial_qsystem(x.src), trivial_qsystem(x.tgt),
        x, unitor_left(x), unitor_right(x),
    )


def check_intertwiner(f: BlockTwoCell, src: BimoduleData, dst: BimoduleData,
                      tol: Tolerance = Tolerance()) -> ResidualReport:
    """Residuals of the two bimodule-map equations for ``f : X -> Y``."""
    if f.source != src.X or f.target != dst.X:
        raise CellMismatch("intertwiner endpoints do not match the bimodules")
    rep = ResidualReport()
    rep.add("left", residual(
        vcomp(f, src.lam), vcomp(dst.lam, hcomp2(id2(src.Q.Q), f))))
    rep.add("right", residual(
        vcomp(f, src.rho), vcomp(dst.rho, hcomp2(f, id2(src.P.Q)))))
    return rep


def relative_tensor(xb: BimoduleData, yb: BimoduleData,
                    tol: Tolerance = Tolerance()):
    """Relative tensor product over the shared middle Q-system.

    Forms the separability idempotent
    ``p = (rho . lam) (id . m* i . id)`` on ``X . Y``, splits it, and
    returns ``(Z, r)`` where ``r : X . Y -> Z`` is the coisometry with
    ``r* r = p`` and ``r r* = id``.
    """
    from .splitting import split_projection

    P = xb.P
    if yb.Q is not P and yb.Q.Q != P.Q:
        raise CellMismatch("bimodules do not share the middle Q-system")
    X, Y = xb.X, yb.X
    sep = vcomp(dagger2(P.m), P.i)
    insert = hcomp2(id2(X), vcomp(hcomp2(sep, id2(Y)), dagger2(unitor_left(Y))))
    p = vcomp(hcomp2(xb.rho, yb.lam), insert)
    z, u = split_projection(hcomp1(X, Y), p, tol)
    return z, dagger2(u)


def check_qsystem_iso(g: BlockTwoCell, a: QSystemData, b: QSystemData,
                      tol: Tolerance = Tolerance()) -> ResidualReport:
    """Residuals for ``g : a -> b`` being a unitary Q-system map:
    ``g`` unitary, ``g m_a = m_b (g . g)``, ``g i_a = i_b``."""
    if g.source != a.Q or g.target != b.Q:
        raise CellMismatch("iso candidate does not match the Q-system cells")
    rep = ResidualReport()
    rep.add("unitary", is_unitary_residual(g))
    rep.add("multiplication", residual(vcomp(g, a.m), vcomp(b.m, hcomp2(g, g))))
    rep.add("unit", residual(vcomp(g, a.i), b.i))
    return rep
