"""Finite-dimensional C*-algebras ``A = M_{n_1}(C) + ... + M_{n_K}(C)``.

Elements are stored as a tuple of dense complex blocks, one per factor.
Every finite-dimensional C*-algebra is of this form, which makes positivity,
inversion and the continuous functional calculus decidable through dense
Hermitian eigendecompositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import NotInvertible, NotPositive, ShapeError

RngLike = Union[int, np.random.Generator, None]


def as_rng(seed: RngLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute tolerance pair.

    Comparisons against a quantity of size ``mag`` use
    ``abs + rel * (1 + mag)`` as the slack.
    """

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be nonnegative")

    def scale(self, mag: float = 0.0) -> float:
        return self.abs + self.rel * (1.0 + float(mag))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class AlgebraShape:
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.factor_dims)
        if not dims or any(n < 1 for n in dims):
            raise ShapeError(f"factor dims must be a nonempty list of positive ints, got {self.factor_dims!r}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def num_factors(self) -> int:
        return len(self.factor_dims)

    @property
    def dim(self) -> int:
        """Ambient matrix size ``sum n_k``."""
        return sum(self.factor_dims)

    def __iter__(self):
        return iter(self.factor_dims)

    def __len__(self):
        return len(self.factor_dims)

    def __repr__(self):
        return f"AlgebraShape({list(self.factor_dims)})"


def as_shape(shape) -> AlgebraShape:
    if isinstance(shape, AlgebraShape):
        return shape
    return AlgebraShape(tuple(shape))


class AlgebraElement:
    """Block-diagonal element of ``A``; immutable.

    Arithmetic: ``a + b``, ``a - b``, ``a @ b`` (algebra product), ``c * a``
    for a complex scalar ``c``, ``-a``.
    """

    __slots__ = ("shape", "blocks")

    def __init__(self, shape, blocks: Sequence[np.ndarray]):
        shape = as_shape(shape)
        blocks = tuple(blocks)
        if len(blocks) != shape.num_factors:
            raise ShapeError(f"expected {shape.num_factors} blocks, got {len(blocks)}")
        frozen = []
        for k, (n, b) in enumerate(zip(shape.factor_dims, blocks)):
            b = np.asarray(b, dtype=np.complex128)
            if b.shape != (n, n):
                raise ShapeError(f"block {k} has shape {b.shape}, expected {(n, n)}")
            frozen.append(_frozen(b))
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # constructors
    @classmethod
    def identity(cls, shape) -> "AlgebraElement":
        shape = as_shape(shape)
        return cls(shape, [np.eye(n) for n in shape])

    @classmethod
    def zero(cls, shape) -> "AlgebraElement":
        shape = as_shape(shape)
        return cls(shape, [np.zeros((n, n)) for n in shape])

    @classmethod
    def scalar(cls, shape, c: complex) -> "AlgebraElement":
        shape = as_shape(shape)
        return cls(shape, [c * np.eye(n) for n in shape])

    @classmethod
    def central(cls, shape, values: Sequence[complex]) -> "AlgebraElement":
        """Element whose block ``k`` is ``values[k] * I``."""
        shape = as_shape(shape)
        values = list(values)
        if len(values) != shape.num_factors:
            raise ShapeError("one scalar per factor required")
        return cls(shape, [v * np.eye(n) for v, n in zip(values, shape)])

    # arithmetic
    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __matmul__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented  # lets ModuleVector handle ``a @ x``
        self._check(other)
        return AlgebraElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            return self @ c
        if not np.isscalar(c):
            return NotImplemented
        return AlgebraElement(self.shape, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return AlgebraElement(self.shape, [a / c for a in self.blocks])

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        inner = ", ".join(np.array2string(b, precision=4, suppress_small=True) for b in self.blocks)
        return f"AlgebraElement({list(self.shape.factor_dims)}, [{inner}])"


def arithmetic(a: AlgebraElement, b, op: str) -> AlgebraElement:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scalar_mul`` (``b`` a complex)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a @ b
    if op == "scalar_mul":
        return complex(b) * a
    raise ValueError(f"unknown op {op!r}")


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.shape, [b.conj().T for b in a.blocks])


def norm(a: AlgebraElement) -> float:
    """C*-norm: largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) for b in a.blocks)


def hermitian_part(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.shape, [(b + b.conj().T) / 2 for b in a.blocks])


def spectrum(a: AlgebraElement) -> list[np.ndarray]:
    """Sorted eigenvalues of each block of the Hermitian part of ``a``."""
    return [np.linalg.eigvalsh(b) for b in hermitian_part(a).blocks]


def is_hermitian(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    return norm(a - adjoint(a)) <= tol.scale(norm(a))


def is_positive(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    scale = tol.scale(norm(a))
    if norm(a - adjoint(a)) > scale:
        return False
    return all(ev[0] >= -scale for ev in spectrum(a))


def leq(a: AlgebraElement, b: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``a <= b`` in the order of ``A`` (i.e. ``b - a`` positive)."""
    return is_positive(b - a, tol)


def sigma_min(a: AlgebraElement) -> tuple[float, int]:
    """Smallest singular value over all blocks and the factor attaining it."""
    vals = [float(np.linalg.svd(b, compute_uv=False)[-1]) for b in a.blocks]
    k = int(np.argmin(vals))
    return vals[k], k


def invert(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> AlgebraElement:
    smin, k = sigma_min(a)
    if smin < tol.scale(norm(a)):
        raise NotInvertible(f"factor {k} has sigma_min={smin:.3e}", factor=k, sigma_min=smin)
    return AlgebraElement(a.shape, [np.linalg.inv(b) for b in a.blocks])


def _eigen_map(block: np.ndarray, fn) -> np.ndarray:
    h = (block + block.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return (v * fn(w)) @ v.conj().T


def psd_calculus(a: AlgebraElement, f: str, tol: Tolerance = DEFAULT_TOL) -> AlgebraElement:
    """Apply ``sqrt``, ``inv`` or ``inv_sqrt`` to a positive element."""
    if not is_positive(a, tol):
        raise NotPositive("element is not positive")
    if f == "sqrt":
        fn = lambda w: np.sqrt(np.clip(w, 0.0, None))
    elif f in ("inv", "inv_sqrt"):
        scale = tol.scale(norm(a))
        for k, ev in enumerate(spectrum(a)):
            if ev[0] < scale:
                raise NotInvertible(f"factor {k} has lambda_min={ev[0]:.3e}", factor=k, sigma_min=float(ev[0]))
        fn = (lambda w: 1.0 / w) if f == "inv" else (lambda w: 1.0 / np.sqrt(w))
    else:
        raise ValueError(f"unknown function {f!r}")
    return AlgebraElement(a.shape, [_eigen_map(b, fn) for b in a.blocks])


def absolute_value(a: AlgebraElement) -> AlgebraElement:
    """``|a| = (a* a)^{1/2}``."""
    return psd_calculus(adjoint(a) @ a, "sqrt")


def central_part(a: AlgebraElement) -> tuple[AlgebraElement, float]:
    """Projection onto the center (trace average per block) and the distance to it."""
    c = AlgebraElement(a.shape, [np.trace(b) / b.shape[0] * np.eye(b.shape[0]) for b in a.blocks])
    return c, norm(a - c)


def central_scalars(a: AlgebraElement) -> np.ndarray:
    """Per-factor trace averages ``tr(a_k) / n_k``."""
    return np.array([np.trace(b) / b.shape[0] for b in a.blocks])


def _gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


ELEMENT_KINDS = ("general", "hermitian", "psd", "invertible", "central_positive_invertible")


def random_element(shape, seed: RngLike = None, kind: str = "general") -> AlgebraElement:
    """Seeded random element of the requested kind.

    ``invertible`` elements have every singular value at least 0.25 and
    ``central_positive_invertible`` ones have block scalars in ``[0.5, 2]``.
    """
    shape = as_shape(shape)
    rng = as_rng(seed)
    if kind not in ELEMENT_KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    for _ in range(100):
        if kind == "central_positive_invertible":
            a = AlgebraElement.central(shape, rng.uniform(0.5, 2.0, size=shape.num_factors))
        else:
            gs = [_gaussian(rng, n) for n in shape]
            if kind == "general":
                blocks = gs
            elif kind == "hermitian":
                blocks = [(g + g.conj().T) / 2 for g in gs]
            elif kind == "psd":
                blocks = [g @ g.conj().T for g in gs]
            else:
                blocks = [g + 2.0 * np.eye(g.shape[0]) for g in gs]
            a = AlgebraElement(shape, blocks)
        if _satisfies(a, kind):
            return a
    raise RuntimeError(f"could not generate element of kind {kind}")  # pragma: no cover


def _satisfies(a: AlgebraElement, kind: str) -> bool:
    if kind == "general":
        return True
    if kind == "hermitian":
        return is_hermitian(a)
    if kind == "psd":
        return is_positive(a)
    smin = sigma_min(a)[0]
    if kind == "invertible":
        return smin >= 0.25
    return central_part(a)[1] <= 1e-14 and smin > 0 and is_positive(a)
