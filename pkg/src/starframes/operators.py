"""Adjointable maps between free modules ``A^{m1} -> A^{m2}``.

An operator is a coefficient matrix ``c[i][j]`` over ``A`` acting by right
contraction, ``(T x)_j = sum_i x_i c[i][j]``; every left-``A``-linear map
between free left modules has exactly this form.  Coefficients are stored per
factor as arrays of shape ``(m1, m2, n_k, n_k)``.

Flattening.  Factor ``k`` of ``T`` flattens to the ``n_k m1 x n_k m2``
complex matrix ``F_k`` whose ``(i, j)`` sub-block is ``c[i][j]^k``.  With the
row matrices of :mod:`starframes.hilbert_module`, ``row(T x) = row(x) F_k``,
so that

* ``flatten(T*) = flatten(T)^H``,
* ``flatten(T o U) = flatten(U) flatten(T)`` (apply ``U`` first),
* the factor-``k`` block of ``<T x, y>`` is ``X F_k Y^H``.

Because every ``n_k m1 x n_k m2`` matrix arises this way, operator
positivity reduces to per-factor PSD of ``F_k``: the rows of ``X`` sweep all
of ``C^{n_k m}``, and ``X F X^H >= 0`` for every ``X`` iff ``F >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    RngLike,
    Tolerance,
    as_rng,
    as_shape,
)
from .errors import NotInvertible, NotPositive, PatternError, ShapeError
from .hilbert_module import ModuleVector


class AdjointableOperator:
    """Coefficient-matrix operator ``A^{dom_rank} -> A^{cod_rank}``; immutable."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape, blocks: Sequence[np.ndarray]):
        shape = as_shape(shape)
        blocks = tuple(np.asarray(b, dtype=np.complex128) for b in blocks)
        if len(blocks) != shape.num_factors:
            raise ShapeError(f"expected {shape.num_factors} factor arrays, got {len(blocks)}")
        if blocks[0].ndim != 4:
            raise ShapeError("coefficient arrays must be 4-dimensional")
        m1, m2 = blocks[0].shape[:2]
        frozen = []
        for k, (n, b) in enumerate(zip(shape, blocks)):
            if b.shape != (m1, m2, n, n):
                raise ShapeError(f"factor {k} array has shape {b.shape}, expected {(m1, m2, n, n)}")
            b = b.copy()
            b.flags.writeable = False
            frozen.append(b)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("AdjointableOperator is immutable")

    @property
    def dom_rank(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def cod_rank(self) -> int:
        return self.blocks[0].shape[1]

    def coeff(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement(self.shape, [b[i, j] for b in self.blocks])

    @property
    def coeffs(self) -> tuple[tuple[AlgebraElement, ...], ...]:
        return tuple(
            tuple(self.coeff(i, j) for j in range(self.cod_rank)) for i in range(self.dom_rank)
        )

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Sequence[AlgebraElement]], shape=None) -> "AdjointableOperator":
        rows = [list(r) for r in coeffs]
        if not rows or not rows[0]:
            raise ShapeError("coefficient matrix must be nonempty")
        shape = rows[0][0].shape if shape is None else as_shape(shape)
        m2 = len(rows[0])
        for r in rows:
            if len(r) != m2:
                raise ShapeError("ragged coefficient matrix")
            for c in r:
                if c.shape != shape:
                    raise ShapeError(f"coefficient shape {c.shape} differs from {shape}")
        blocks = [
            np.array([[c.blocks[k] for c in r] for r in rows]) for k in range(shape.num_factors)
        ]
        return cls(shape, blocks)

    @classmethod
    def identity(cls, shape, m: int) -> "AdjointableOperator":
        return cls.scalar(shape, m, 1.0)

    @classmethod
    def scalar(cls, shape, m: int, c: complex) -> "AdjointableOperator":
        shape = as_shape(shape)
        return cls(shape, [c * np.einsum("ij,ab->ijab", np.eye(m), np.eye(n)) for n in shape])

    @classmethod
    def zero(cls, shape, m1: int, m2: int) -> "AdjointableOperator":
        shape = as_shape(shape)
        return cls(shape, [np.zeros((m1, m2, n, n)) for n in shape])

    @classmethod
    def multiplication(cls, a: AlgebraElement) -> "AdjointableOperator":
        """Right multiplication ``x -> x a`` on ``A^1``."""
        return cls(a.shape, [b[None, None] for b in a.blocks])

    def _check(self, other: "AdjointableOperator"):
        if not isinstance(other, AdjointableOperator):
            raise TypeError(f"expected AdjointableOperator, got {type(other).__name__}")
        if other.shape != self.shape or (other.dom_rank, other.cod_rank) != (self.dom_rank, self.cod_rank):
            raise ShapeError("operator shapes differ")

    def __add__(self, other):
        self._check(other)
        return AdjointableOperator(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AdjointableOperator(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AdjointableOperator(self.shape, [-b for b in self.blocks])

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return AdjointableOperator(self.shape, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, AdjointableOperator):
            return compose(self, other)
        if isinstance(other, ModuleVector):
            return apply(self, other)
        return NotImplemented

    @property
    def H(self) -> "AdjointableOperator":
        return adjoint_op(self)

    def allclose(self, other: "AdjointableOperator", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return (
            f"AdjointableOperator(shape={list(self.shape.factor_dims)}, "
            f"dom_rank={self.dom_rank}, cod_rank={self.cod_rank})"
        )


def apply(T: AdjointableOperator, x: ModuleVector) -> ModuleVector:
    if T.shape != x.shape:
        raise ShapeError(f"shape mismatch: {T.shape} vs {x.shape}")
    if T.dom_rank != x.rank:
        raise ShapeError(f"operator domain rank {T.dom_rank} != vector rank {x.rank}")
    return ModuleVector(T.shape, [np.einsum("iab,ijbc->jac", bx, bt) for bx, bt in zip(x.blocks, T.blocks)])


def adjoint_op(T: AdjointableOperator) -> AdjointableOperator:
    """``c*[j][i] = (c[i][j])*``."""
    return AdjointableOperator(T.shape, [b.transpose(1, 0, 3, 2).conj() for b in T.blocks])


def compose(T: AdjointableOperator, U: AdjointableOperator) -> AdjointableOperator:
    """``T o U`` (apply ``U`` first)."""
    if T.shape != U.shape:
        raise ShapeError(f"shape mismatch: {T.shape} vs {U.shape}")
    if U.cod_rank != T.dom_rank:
        raise ShapeError(f"cannot compose: U maps into rank {U.cod_rank}, T expects {T.dom_rank}")
    return AdjointableOperator(T.shape, [np.einsum("ijab,jlbc->ilac", bu, bt) for bu, bt in zip(U.blocks, T.blocks)])


def flatten(T: AdjointableOperator) -> list[np.ndarray]:
    out = []
    for n, b in zip(T.shape, T.blocks):
        m1, m2 = b.shape[:2]
        out.append(b.transpose(0, 2, 1, 3).reshape(m1 * n, m2 * n))
    return out


def unflatten(F: Sequence[np.ndarray], shape, m1: int, m2: int, tol: Tolerance = DEFAULT_TOL) -> AdjointableOperator:
    """Inverse of :func:`flatten`.

    Every ``n_k m1 x n_k m2`` complex matrix is the flattening of some
    coefficient matrix over ``M_{n_k}``, so the only pattern check is on the
    sizes; non-finite entries are also rejected.
    """
    shape = as_shape(shape)
    F = list(F)
    if len(F) != shape.num_factors:
        raise PatternError(f"expected {shape.num_factors} flat factors, got {len(F)}")
    blocks = []
    for k, (n, f) in enumerate(zip(shape, F)):
        f = np.asarray(f, dtype=np.complex128)
        if f.shape != (n * m1, n * m2):
            raise PatternError(f"flat factor {k} has shape {f.shape}, expected {(n * m1, n * m2)}")
        if not np.all(np.isfinite(f)):
            raise PatternError(f"flat factor {k} has non-finite entries")
        blocks.append(f.reshape(m1, n, m2, n).transpose(0, 2, 1, 3))
    return AdjointableOperator(shape, blocks)


def op_norm(T: AdjointableOperator) -> float:
    return max(float(np.linalg.norm(f, 2)) if f.size else 0.0 for f in flatten(T))


def _require_square(T: AdjointableOperator):
    if T.dom_rank != T.cod_rank:
        raise ShapeError(f"operator is not square ({T.dom_rank} -> {T.cod_rank})")


def flat_spectra(T: AdjointableOperator) -> list[np.ndarray]:
    """Ascending eigenvalues of the Hermitian part of each flat factor."""
    _require_square(T)
    return [np.linalg.eigvalsh((f + f.conj().T) / 2) for f in flatten(T)]


def is_self_adjoint_op(T: AdjointableOperator, tol: Tolerance = DEFAULT_TOL) -> bool:
    _require_square(T)
    scale = tol.scale(op_norm(T))
    return all(np.linalg.norm(f - f.conj().T, 2) <= scale for f in flatten(T))


def is_positive_op(T: AdjointableOperator, tol: Tolerance = DEFAULT_TOL) -> bool:
    _require_square(T)
    if not is_self_adjoint_op(T, tol):
        return False
    scale = tol.scale(op_norm(T))
    return all(ev[0] >= -scale for ev in flat_spectra(T))


def op_calculus(T: AdjointableOperator, f: str, tol: Tolerance = DEFAULT_TOL) -> AdjointableOperator:
    """``sqrt``, ``inv`` or ``inv_sqrt`` of a positive operator via its flattening."""
    if not is_positive_op(T, tol):
        raise NotPositive("operator is not positive")
    scale = tol.scale(op_norm(T))
    if f == "sqrt":
        fn = lambda w: np.sqrt(np.clip(w, 0.0, None))
    elif f in ("inv", "inv_sqrt"):
        fn = (lambda w: 1.0 / w) if f == "inv" else (lambda w: 1.0 / np.sqrt(w))
    else:
        raise ValueError(f"unknown function {f!r}")
    out = []
    for k, flat in enumerate(flatten(T)):
        w, v = np.linalg.eigh((flat + flat.conj().T) / 2)
        if f != "sqrt" and w[0] < scale:
            raise NotInvertible(f"factor {k} has lambda_min={w[0]:.3e}", factor=k, sigma_min=float(w[0]))
        out.append((v * fn(w)) @ v.conj().T)
    return unflatten(out, T.shape, T.dom_rank, T.cod_rank, tol)


@dataclass(frozen=True)
class RangeDiagnostics:
    sigma_min: float
    sigma_max: float
    injective: bool
    surjective: bool
    norm_inv_TstarT: float | None
    norm_inv_TTstar: float | None
    ill_conditioned: bool


def range_diagnostics(T: AdjointableOperator, tol: Tolerance = DEFAULT_TOL) -> RangeDiagnostics:
    """Injectivity/surjectivity of ``T`` from the singular values of its flattening.

    ``T`` is injective iff every ``F_k F_k^H`` (the flattening of ``T* T``) is
    nonsingular, and surjective iff every ``F_k^H F_k`` (that of ``T T*``) is.
    Ranges are closed automatically in finite dimension.
    """
    flats = flatten(T)
    smax = op_norm(T)
    scale = tol.scale(smax)
    inj_min, surj_min, smin = np.inf, np.inf, np.inf
    for f in flats:
        rows, cols = f.shape
        s_last = float(np.linalg.svd(f, compute_uv=False)[-1])
        smin = min(smin, s_last)
        # a wide/square F_k can have full row rank (injective), tall/square full column rank
        inj_min = min(inj_min, s_last if rows <= cols else 0.0)
        surj_min = min(surj_min, s_last if cols <= rows else 0.0)
    injective = inj_min >= scale
    surjective = surj_min >= scale
    ill = any(scale <= v < 10 * scale for v in (inj_min, surj_min))
    return RangeDiagnostics(
        sigma_min=float(smin),
        sigma_max=smax,
        injective=bool(injective),
        surjective=bool(surjective),
        norm_inv_TstarT=1.0 / inj_min**2 if injective else None,
        norm_inv_TTstar=1.0 / surj_min**2 if surjective else None,
        ill_conditioned=bool(ill),
    )


def random_operator(shape, m1: int, m2: int, seed: RngLike = None, kind: str = "general") -> AdjointableOperator:
    """Seeded random operator.

    ``kind`` is one of ``general``, ``injective``, ``surjective``,
    ``invertible`` (square only).  The last three are regenerated until every
    flat factor has singular values at least 0.2 on the relevant side.
    """
    shape = as_shape(shape)
    rng = as_rng(seed)
    if kind == "invertible" and m1 != m2:
        raise ShapeError("invertible operators must be square")
    if kind == "injective" and m1 > m2 or kind == "surjective" and m1 < m2:
        raise ShapeError(f"no {kind} operator A^{m1} -> A^{m2}")
    for _ in range(100):
        blocks = [
            (rng.standard_normal((m1, m2, n, n)) + 1j * rng.standard_normal((m1, m2, n, n))) / np.sqrt(2)
            for n in shape
        ]
        if kind in ("invertible",):
            blocks = [b + 1.5 * np.einsum("ij,ab->ijab", np.eye(m1), np.eye(n)) for b, n in zip(blocks, shape)]
        T = AdjointableOperator(shape, blocks)
        if kind == "general":
            return T
        d = range_diagnostics(T)
        ok = {
            "injective": d.injective and d.norm_inv_TstarT <= 25.0,
            "surjective": d.surjective and d.norm_inv_TTstar <= 25.0,
            "invertible": d.injective and d.surjective and d.norm_inv_TstarT <= 25.0,
        }.get(kind)
        if ok is None:
            raise ValueError(f"unknown kind {kind!r}")
        if ok:
            return T
    raise RuntimeError(f"could not generate {kind} operator")  # pragma: no cover
