"""Free Hilbert modules ``A^m`` with the inner product ``<x, y> = sum_j x_j y_j*``.

A vector is stored per factor as an array of shape ``(m, n_k, n_k)``.  The
factor-``k`` *row matrix* of ``x`` is the horizontal concatenation
``[x_1^k | ... | x_m^k]`` of size ``n_k x n_k m``; with it the factor-``k``
block of ``<x, y>`` is ``X Y^H``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    RngLike,
    Tolerance,
    adjoint,
    as_rng,
    as_shape,
    norm,
)
from .errors import ShapeError


class ModuleVector:
    """Element of the free module ``A^m``; immutable."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape, blocks: Sequence[np.ndarray]):
        shape = as_shape(shape)
        blocks = tuple(np.asarray(b, dtype=np.complex128) for b in blocks)
        if len(blocks) != shape.num_factors:
            raise ShapeError(f"expected {shape.num_factors} factor arrays, got {len(blocks)}")
        m = blocks[0].shape[0] if blocks[0].ndim == 3 else -1
        for k, (n, b) in enumerate(zip(shape, blocks)):
            if b.ndim != 3 or b.shape != (m, n, n):
                raise ShapeError(f"factor {k} array has shape {b.shape}, expected {(m, n, n)}")
        frozen = []
        for b in blocks:
            b = b.copy()
            b.flags.writeable = False
            frozen.append(b)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    @property
    def rank(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def entries(self) -> tuple[AlgebraElement, ...]:
        return tuple(
            AlgebraElement(self.shape, [b[j] for b in self.blocks]) for j in range(self.rank)
        )

    def __getitem__(self, j: int) -> AlgebraElement:
        return AlgebraElement(self.shape, [b[j] for b in self.blocks])

    @classmethod
    def from_entries(cls, entries: Sequence[AlgebraElement], shape=None) -> "ModuleVector":
        entries = list(entries)
        if not entries:
            if shape is None:
                raise ShapeError("shape required for an empty vector")
            shape = as_shape(shape)
            return cls(shape, [np.zeros((0, n, n)) for n in shape])
        shape = entries[0].shape
        for e in entries:
            if e.shape != shape:
                raise ShapeError("entries do not share a shape")
        return cls(shape, [np.stack([e.blocks[k] for e in entries]) for k in range(shape.num_factors)])

    @classmethod
    def zeros(cls, shape, m: int) -> "ModuleVector":
        shape = as_shape(shape)
        return cls(shape, [np.zeros((m, n, n)) for n in shape])

    @classmethod
    def unit(cls, shape, m: int, j: int) -> "ModuleVector":
        """Coordinate vector with ``1_A`` in slot ``j``."""
        shape = as_shape(shape)
        blocks = [np.zeros((m, n, n)) for n in shape]
        for b, n in zip(blocks, shape):
            b[j] = np.eye(n)
        return cls(shape, blocks)

    def __add__(self, other):
        _check_pair(self, other)
        return ModuleVector(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        _check_pair(self, other)
        return ModuleVector(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return ModuleVector(self.shape, [-b for b in self.blocks])

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return ModuleVector(self.shape, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def __rmatmul__(self, a):
        if isinstance(a, AlgebraElement):
            return module_action(a, self)
        return NotImplemented

    def allclose(self, other: "ModuleVector", atol: float = 1e-12) -> bool:
        _check_pair(self, other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"ModuleVector(shape={list(self.shape.factor_dims)}, rank={self.rank})"


def _check_pair(x: ModuleVector, y: ModuleVector):
    if x.shape != y.shape:
        raise ShapeError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.rank != y.rank:
        raise ShapeError(f"rank mismatch: {x.rank} vs {y.rank}")


def row_matrix(x: ModuleVector, k: int) -> np.ndarray:
    """Factor-``k`` row matrix ``[x_1^k | ... | x_m^k]`` (``n_k x n_k m``)."""
    b = x.blocks[k]
    m, n, _ = b.shape
    return b.transpose(1, 0, 2).reshape(n, m * n)


def from_row_matrices(shape, m: int, rows: Sequence[np.ndarray]) -> ModuleVector:
    """Inverse of :func:`row_matrix` applied to every factor."""
    shape = as_shape(shape)
    blocks = []
    for n, r in zip(shape, rows):
        r = np.asarray(r, dtype=np.complex128)
        if r.shape != (n, n * m):
            raise ShapeError(f"row matrix has shape {r.shape}, expected {(n, n * m)}")
        blocks.append(r.reshape(n, m, n).transpose(1, 0, 2))
    return ModuleVector(shape, blocks)


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    _check_pair(x, y)
    return AlgebraElement(
        x.shape,
        [np.einsum("jab,jcb->ac", bx, by.conj()) for bx, by in zip(x.blocks, y.blocks)],
    )


def module_action(a: AlgebraElement, x: ModuleVector) -> ModuleVector:
    """Left action ``(a x)_j = a x_j``."""
    if a.shape != x.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {x.shape}")
    return ModuleVector(x.shape, [np.einsum("ab,jbc->jac", ab, bx) for ab, bx in zip(a.blocks, x.blocks)])


def vector_norm(x: ModuleVector) -> float:
    return float(np.sqrt(norm(inner_product(x, x))))


def direct_sum(xs: Sequence[ModuleVector]) -> ModuleVector:
    xs = list(xs)
    if not xs:
        raise ShapeError("direct sum of nothing has no shape")
    shape = xs[0].shape
    for x in xs:
        if x.shape != shape:
            raise ShapeError("summands do not share a shape")
    return ModuleVector(shape, [np.concatenate([x.blocks[k] for x in xs]) for k in range(shape.num_factors)])


def split(x: ModuleVector, ranks: Sequence[int]) -> list[ModuleVector]:
    """Cut ``x`` into consecutive pieces of the given ranks."""
    if sum(ranks) != x.rank:
        raise ShapeError(f"ranks {list(ranks)} do not sum to {x.rank}")
    out, start = [], 0
    for r in ranks:
        out.append(ModuleVector(x.shape, [b[start:start + r] for b in x.blocks]))
        start += r
    return out


def random_vector(shape, m: int, seed: RngLike = None) -> ModuleVector:
    """Complex Gaussian vector in ``A^m``."""
    shape = as_shape(shape)
    rng = as_rng(seed)
    blocks = [
        (rng.standard_normal((m, n, n)) + 1j * rng.standard_normal((m, n, n))) / np.sqrt(2)
        for n in shape
    ]
    return ModuleVector(shape, blocks)


def verify_vector_frame(xs: Sequence[ModuleVector], bounds, tol: Tolerance = DEFAULT_TOL):
    """Frame / *-frame check for a vector family.

    Runs the operator-family check on ``T_i x = <x, x_i>`` so that the
    report is identical to the one for the induced family.
    """
    from .frames import from_vector_frame, verify

    return verify(from_vector_frame(xs), bounds, tol)


def vector_frame_sum(x: ModuleVector, xs: Sequence[ModuleVector]) -> AlgebraElement:
    """``sum_i <x, x_i><x_i, x>`` evaluated directly."""
    total = AlgebraElement.zero(x.shape)
    for xi in xs:
        c = inner_product(x, xi)
        total = total + c @ adjoint(c)
    return total
