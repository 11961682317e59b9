"""*-homomorphisms between finite-dimensional C*-algebras and frame transport.

Every *-homomorphism ``(+)_k M_{n_k} -> (+)_l M_{m_l}`` is, up to a unitary
twist on each target factor, block-diagonal repetition:

    phi(a)_l = U_l diag(a_1 (x mu[l][1]), ..., a_K (x mu[l][K]), 0) U_l^H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    RngLike,
    Tolerance,
    adjoint,
    as_rng,
    as_shape,
    norm,
    random_element,
)
from .errors import NotSurjective, ShapeError
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
from .operators import AdjointableOperator

_LAW_SAMPLES = 32


@dataclass(frozen=True, eq=False)
class StarHomomorphism:
    source: AlgebraShape
    target: AlgebraShape
    multiplicity: tuple[tuple[int, ...], ...]
    twists: tuple[np.ndarray, ...]

    def __post_init__(self):
        src, tgt = as_shape(self.source), as_shape(self.target)
        mu = tuple(tuple(int(v) for v in row) for row in self.multiplicity)
        if len(mu) != tgt.num_factors or any(len(r) != src.num_factors for r in mu):
            raise ShapeError(f"multiplicity must be {tgt.num_factors} x {src.num_factors}")
        if any(v < 0 for r in mu for v in r):
            raise ShapeError("multiplicities must be nonnegative")
        for l, (row, ml) in enumerate(zip(mu, tgt)):
            used = sum(v * n for v, n in zip(row, src))
            if used > ml:
                raise ShapeError(f"target factor {l} of size {ml} cannot hold {used} rows")
        twists = self.twists
        if twists is None:
            twists = [np.eye(ml) for ml in tgt]
        frozen = []
        for l, (U, ml) in enumerate(zip(twists, tgt)):
            U = np.array(U, dtype=np.complex128)
            if U.shape != (ml, ml) or not np.allclose(U.conj().T @ U, np.eye(ml), atol=1e-10):
                raise ShapeError(f"twist {l} is not a {ml}x{ml} unitary")
            U.flags.writeable = False
            frozen.append(U)
        if len(frozen) != tgt.num_factors:
            raise ShapeError("one twist per target factor required")
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "multiplicity", mu)
        object.__setattr__(self, "twists", tuple(frozen))
        _check_laws(self)

    @classmethod
    def identity(cls, shape) -> "StarHomomorphism":
        shape = as_shape(shape)
        K = shape.num_factors
        return cls(shape, shape, tuple(tuple(int(k == l) for k in range(K)) for l in range(K)), None)

    @classmethod
    def selection(cls, source, picks: Sequence[int], twists=None) -> "StarHomomorphism":
        """Target factor ``l`` is source factor ``picks[l]`` (a surjection)."""
        source = as_shape(source)
        target = AlgebraShape(tuple(source.factor_dims[k] for k in picks))
        mu = tuple(tuple(int(k == p) for k in range(source.num_factors)) for p in picks)
        return cls(source, target, mu, twists)


def hom_apply(phi: StarHomomorphism, a: AlgebraElement) -> AlgebraElement:
    if a.shape != phi.source:
        raise ShapeError(f"element shape {a.shape} is not the source {phi.source}")
    blocks = []
    for row, ml, U in zip(phi.multiplicity, phi.target, phi.twists):
        parts = [a.blocks[k] for k, mult in enumerate(row) for _ in range(mult)]
        used = sum(p.shape[0] for p in parts)
        if used < ml:
            parts.append(np.zeros((ml - used, ml - used)))
        D = block_diag(*parts) if parts else np.zeros((ml, ml))
        blocks.append(U @ D @ U.conj().T)
    return AlgebraElement(phi.target, blocks)


def _check_laws(phi: StarHomomorphism):
    """Multiplicativity, additivity and *-preservation on seeded samples."""
    rng = np.random.default_rng(0x5EED)
    for _ in range(_LAW_SAMPLES):
        a = random_element(phi.source, rng)
        b = random_element(phi.source, rng)
        fa, fb = hom_apply(phi, a), hom_apply(phi, b)
        scale = 1e-9 * (1 + norm(a) * norm(b))
        if (
            norm(hom_apply(phi, a @ b) - fa @ fb) > scale
            or norm(hom_apply(phi, a + b) - fa - fb) > scale
            or norm(hom_apply(phi, adjoint(a)) - adjoint(fa)) > scale
        ):
            raise ShapeError("map fails the *-homomorphism laws")


def is_surjective_hom(phi: StarHomomorphism) -> bool:
    """True iff ``phi`` is factor selection up to unitary twists."""
    fed = set()
    for row, ml in zip(phi.multiplicity, phi.target):
        nz = [k for k, v in enumerate(row) if v]
        if len(nz) != 1:
            return False
        k = nz[0]
        if row[k] != 1 or phi.source.factor_dims[k] != ml or k in fed:
            return False
        fed.add(k)
    return True


def module_transport(phi: StarHomomorphism, x: ModuleVector) -> ModuleVector:
    """Entrywise ``phi``; satisfies ``<theta x, theta y> = phi(<x, y>)``."""
    if x.shape != phi.source:
        raise ShapeError(f"vector shape {x.shape} is not the source {phi.source}")
    return ModuleVector.from_entries([hom_apply(phi, e) for e in x.entries], shape=phi.target)


def hom_on_operator(phi: StarHomomorphism, T: AdjointableOperator) -> AdjointableOperator:
    if T.shape != phi.source:
        raise ShapeError(f"operator shape {T.shape} is not the source {phi.source}")
    return AdjointableOperator.from_coeffs(
        [[hom_apply(phi, c) for c in row] for row in T.coeffs], shape=phi.target
    )


def transport_family(
    phi: StarHomomorphism,
    fam: OperatorFamily,
    bounds: FrameBounds,
    tol: Tolerance = DEFAULT_TOL,
) -> ConstructionResult:
    """Push a frame through a surjective ``phi``; claimed bounds ``(phi(A), phi(B))``."""
    if not is_surjective_hom(phi):
        raise NotSurjective("transport is implemented for surjective homomorphisms only")
    star = scalar_to_star(bounds, fam.shape) if isinstance(bounds, ScalarBounds) else bounds
    _require_valid(fam, star, tol)
    out = OperatorFamily(tuple(hom_on_operator(phi, T) for T in fam))
    claimed = StarBounds(hom_apply(phi, star.lower), hom_apply(phi, star.upper))
    return ConstructionResult(out, claimed, verify(out, claimed, tol))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_surjective_hom(source, seed: RngLike = None) -> StarHomomorphism:
    """Random selection of a nonempty subset of source factors, permuted and twisted."""
    source = as_shape(source)
    rng = as_rng(seed)
    K = source.num_factors
    size = int(rng.integers(1, K + 1))
    picks = [int(p) for p in rng.permutation(K)[:size]]
    twists = [random_unitary(source.factor_dims[p], rng) for p in picks]
    return StarHomomorphism.selection(source, picks, twists)


def random_hom(source, target_extra: int = 1, seed: RngLike = None) -> StarHomomorphism:
    """Random, generally non-surjective homomorphism with multiplicities 0..2."""
    source = as_shape(source)
    rng = as_rng(seed)
    L = int(rng.integers(1, 3))
    mu = rng.integers(0, 3, size=(L, source.num_factors))
    mu[:, 0] = np.maximum(mu[:, 0], 1)
    dims = tuple(int(sum(v * n for v, n in zip(row, source)) + rng.integers(0, target_extra + 1)) for row in mu)
    twists = [random_unitary(d, rng) for d in dims]
    return StarHomomorphism(source, AlgebraShape(dims), tuple(map(tuple, mu.tolist())), twists)
