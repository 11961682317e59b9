"""Exterior tensor products.

For ``A = (+)_k M_{n_k}`` and ``B = (+)_l M_{m_l}`` the product algebra is
``(+)_{k,l} M_{n_k m_l}`` with factors in lexicographic ``(k, l)`` order
(left index major).  Module entries of ``x (x) y`` are ordered the same way:
entry ``(i, j)`` sits at position ``i * rank(y) + j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape, Tolerance, as_shape
from .errors import NotInvertible, ShapeError
from .frames import (
    ConstructionResult,
    FrameBounds,
    OperatorFamily,
    ScalarBounds,
    StarBounds,
    _require_valid,
    scalar_to_star,
    verify,
)
from .hilbert_module import ModuleVector
from .operators import AdjointableOperator, adjoint_op, compose, op_norm, range_diagnostics


@dataclass(frozen=True)
class TensorShape:
    left: AlgebraShape
    right: AlgebraShape

    def __post_init__(self):
        object.__setattr__(self, "left", as_shape(self.left))
        object.__setattr__(self, "right", as_shape(self.right))

    @property
    def product(self) -> AlgebraShape:
        return AlgebraShape(tuple(n * m for n in self.left for m in self.right))

    @property
    def provenance(self) -> list[tuple[int, int]]:
        """``(k, l)`` origin of each product factor."""
        return [(k, l) for k in range(len(self.left)) for l in range(len(self.right))]


def product_shape(left, right) -> AlgebraShape:
    return TensorShape(left, right).product


def elem_tensor(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Block ``(k, l)`` is ``kron(a_k, b_l)``."""
    return AlgebraElement(
        product_shape(a.shape, b.shape),
        [np.kron(ak, bl) for ak in a.blocks for bl in b.blocks],
    )


def vector_tensor(x: ModuleVector, y: ModuleVector) -> ModuleVector:
    """Elementary tensor in ``(A (x) B)^{m1 m2}``."""
    blocks = []
    for bx in x.blocks:
        for by in y.blocks:
            m1, n, _ = bx.shape
            m2, p, _ = by.shape
            t = np.einsum("iac,jbd->ijabcd", bx, by)
            blocks.append(t.reshape(m1 * m2, n * p, n * p))
    return ModuleVector(product_shape(x.shape, y.shape), blocks)


def op_tensor(S: AdjointableOperator, T: AdjointableOperator) -> AdjointableOperator:
    """``S (x) T`` with coefficient ``((i,j),(i',j')) -> s[i][i'] (x) t[j][j']``."""
    blocks = []
    for bs in S.blocks:
        for bt in T.blocks:
            m1, m1p, n, _ = bs.shape
            m2, m2p, p, _ = bt.shape
            t = np.einsum("iIac,jJbd->ijIJabcd", bs, bt)
            blocks.append(t.reshape(m1 * m2, m1p * m2p, n * p, n * p))
    return AdjointableOperator(product_shape(S.shape, T.shape), blocks)


def family_tensor(
    fam_left: OperatorFamily,
    bounds_left: FrameBounds,
    fam_right: OperatorFamily,
    bounds_right: FrameBounds,
    tol: Tolerance = DEFAULT_TOL,
) -> ConstructionResult:
    """``{L_i (x) G_j}`` (``i`` major) with claimed bounds ``(A (x) C, B (x) D)``."""
    ab = bounds_left if isinstance(bounds_left, StarBounds) else scalar_to_star(bounds_left, fam_left.shape)
    cd = bounds_right if isinstance(bounds_right, StarBounds) else scalar_to_star(bounds_right, fam_right.shape)
    _require_valid(fam_left, ab, tol)
    _require_valid(fam_right, cd, tol)
    members = tuple(op_tensor(L, G) for L in fam_left for G in fam_right)
    out = OperatorFamily(members)
    claimed = StarBounds(elem_tensor(ab.lower, cd.lower), elem_tensor(ab.upper, cd.upper))
    return ConstructionResult(out, claimed, verify(out, claimed, tol))


def q_tensor_compose(
    fam: OperatorFamily,
    Q: AdjointableOperator,
    other: AlgebraShape,
    side: str,
    bounds: FrameBounds,
    tol: Tolerance = DEFAULT_TOL,
) -> ConstructionResult:
    """``{L_i (Q* (x) I)}`` (``left_leg``) or ``{L_i (I (x) Q*)}`` (``right_leg``).

    ``other`` is the algebra of the leg that carries the identity; its rank
    is inferred from ``fam.dom_rank / Q.dom_rank``.  Claimed bounds are
    ``(||Q*^{-1}||^{-1} A, ||Q|| B)`` and the new frame operator is
    ``(Q (x) I) S (Q* (x) I)`` (legs swapped for ``right_leg``).
    """
    other = as_shape(other)
    if Q.dom_rank != Q.cod_rank:
        raise NotInvertible("Q must be square")
    diag = range_diagnostics(Q, tol)
    if not (diag.injective and diag.surjective):
        raise NotInvertible(f"Q is not invertible (sigma_min={diag.sigma_min:.3e})")
    if fam.dom_rank % Q.dom_rank:
        raise ShapeError(f"family rank {fam.dom_rank} is not a multiple of Q's rank {Q.dom_rank}")
    ident = AdjointableOperator.identity(other, fam.dom_rank // Q.dom_rank)
    if side == "left_leg":
        lift = op_tensor(adjoint_op(Q), ident)
    elif side == "right_leg":
        lift = op_tensor(ident, adjoint_op(Q))
    else:
        raise ValueError(f"side must be left_leg or right_leg, got {side!r}")
    if lift.shape != fam.shape:
        raise ShapeError(f"lifted Q acts on {lift.shape}, family lives on {fam.shape}")
    star = scalar_to_star(bounds, fam.shape) if isinstance(bounds, ScalarBounds) else bounds
    _require_valid(fam, star, tol)
    # ||Q*^{-1}||^{-1} = sigma_min(Q)
    c_lo = diag.norm_inv_TTstar ** -0.5
    claimed = StarBounds(c_lo * star.lower, op_norm(Q) * star.upper)
    out = OperatorFamily(tuple(compose(L, lift) for L in fam))
    return ConstructionResult(out, claimed, verify(out, claimed, tol))


def lift(Q: AdjointableOperator, other: AlgebraShape, other_rank: int, side: str) -> AdjointableOperator:
    """``Q (x) I`` or ``I (x) Q``."""
    ident = AdjointableOperator.identity(other, other_rank)
    return op_tensor(Q, ident) if side == "left_leg" else op_tensor(ident, Q)
