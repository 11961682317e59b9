"""Operator frames and *-operator frames over free Hilbert modules.

A family ``{T_i}`` with common domain ``A^m`` is an operator frame with
scalar bounds ``0 < a <= b`` when

    a <x, x> <= sum_i <T_i x, T_i x> <= b <x, x>        for all x,

and a *-operator frame with invertible algebra-valued bounds ``A, B`` when

    A <x, x> A* <= sum_i <T_i x, T_i x> <= B <x, x> B*   for all x.

The middle term equals ``<S x, x>`` for the frame operator ``S = sum T_i* T_i``.
See ``docs/decision_procedure.md`` for why algebra-valued bounds reduce to
per-factor eigenvalue checks on the flattening of ``S``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    RngLike,
    Tolerance,
    adjoint,
    as_rng,
    as_shape,
    central_scalars,
    norm,
    sigma_min,
)
from .errors import (
    MalformedBounds,
    NoLowerBound,
    NotInjective,
    NotInvertible,
    NotSurjective,
    ShapeError,
)
from .hilbert_module import ModuleVector, from_row_matrices, inner_product
from .operators import (
    AdjointableOperator,
    adjoint_op,
    apply,
    compose,
    flatten,
    op_calculus,
    op_norm,
    random_operator,
    range_diagnostics,
)


@dataclass(frozen=True)
class OperatorFamily:
    """Finite nonempty family of operators sharing the domain ``A^m``.

    Codomains may differ between members; the frame inequalities only involve
    ``<T_i x, T_i x>``.
    """

    members: tuple[AdjointableOperator, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ShapeError("an operator family must be nonempty")
        shape, m = members[0].shape, members[0].dom_rank
        for i, T in enumerate(members):
            if T.shape != shape:
                raise ShapeError(f"member {i} has shape {T.shape}, expected {shape}")
            if T.dom_rank != m:
                raise ShapeError(f"member {i} has domain rank {T.dom_rank}, expected {m}")
        object.__setattr__(self, "members", members)

    @property
    def shape(self) -> AlgebraShape:
        return self.members[0].shape

    @property
    def dom_rank(self) -> int:
        return self.members[0].dom_rank

    @property
    def cod_ranks(self) -> tuple[int, ...]:
        return tuple(T.cod_rank for T in self.members)

    @property
    def common_codomain(self) -> bool:
        return all(r == self.dom_rank for r in self.cod_ranks)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


@dataclass(frozen=True)
class ScalarBounds:
    lower: float
    upper: float


@dataclass(frozen=True)
class StarBounds:
    lower: AlgebraElement
    upper: AlgebraElement


FrameBounds = Union[ScalarBounds, StarBounds]


@dataclass
class VerificationReport:
    """Outcome of a frame check.

    ``margins`` maps ``"lower"``/``"upper"`` to one number per factor.  For a
    central (or scalar) bound these are ``lambda_min(S_k) - |lambda_k|^2`` and
    ``|mu_k|^2 - lambda_max(S_k)``; for a non-central factor the entry is the
    smallest eigenvalue of the defect evaluated at the constructed witness.
    """

    verdict: str
    side: str
    margins: dict[str, list[float]]
    witness: Optional[ModuleVector] = None
    witness_defect: Optional[AlgebraElement] = None
    witness_side: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"


class ConstructionResult(NamedTuple):
    family: OperatorFamily
    claimed: StarBounds
    report: VerificationReport


# ---------------------------------------------------------------------------
# frame operator and transform


def frame_operator(fam: OperatorFamily) -> AdjointableOperator:
    """``S = sum_i T_i* T_i``."""
    S = AdjointableOperator.zero(fam.shape, fam.dom_rank, fam.dom_rank)
    for T in fam:
        S = S + compose(adjoint_op(T), T)
    return S


def frame_transform(fam: OperatorFamily) -> AdjointableOperator:
    """Analysis operator ``R x = (T_1 x, ..., T_N x)`` into ``A^{sum cod_ranks}``."""
    blocks = [np.concatenate([T.blocks[k] for T in fam], axis=1) for k in range(fam.shape.num_factors)]
    return AdjointableOperator(fam.shape, blocks)


def synthesis(fam: OperatorFamily, ys: Sequence[ModuleVector]) -> ModuleVector:
    """``R*(y_1, ..., y_N) = sum_i T_i* y_i``."""
    ys = list(ys)
    if len(ys) != len(fam):
        raise ShapeError(f"expected {len(fam)} components, got {len(ys)}")
    out = ModuleVector.zeros(fam.shape, fam.dom_rank)
    for T, y in zip(fam, ys):
        out = out + apply(adjoint_op(T), y)
    return out


def _hermitian_eigh(F: np.ndarray):
    return np.linalg.eigh((F + F.conj().T) / 2)


def frame_spectra(fam: OperatorFamily) -> list[np.ndarray]:
    """Ascending eigenvalues of each flat factor of the frame operator."""
    return [_hermitian_eigh(F)[0] for F in flatten(frame_operator(fam))]


def optimal_scalar_bounds(fam: OperatorFamily, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """Best scalar bounds ``(min lambda_min, max lambda_max)`` over factors.

    The lower value is reported as ``0.0`` when the frame operator is
    singular (no lower frame bound exists).
    """
    spectra = frame_spectra(fam)
    b = max(float(ev[-1]) for ev in spectra)
    a = min(float(ev[0]) for ev in spectra)
    if a < tol.scale(b):
        a = 0.0
    return a, b


def optimal_star_bounds(fam: OperatorFamily, tol: Tolerance = DEFAULT_TOL) -> StarBounds:
    """Best central bounds: block ``k`` is ``sqrt(lambda_min/max(S_k)) I``."""
    spectra = frame_spectra(fam)
    mag = max(float(ev[-1]) for ev in spectra)
    for k, ev in enumerate(spectra):
        if ev[0] < tol.scale(mag):
            raise NoLowerBound(f"frame operator is singular in factor {k} (lambda_min={ev[0]:.3e})")
    lo = AlgebraElement.central(fam.shape, [np.sqrt(ev[0]) for ev in spectra])
    hi = AlgebraElement.central(fam.shape, [np.sqrt(ev[-1]) for ev in spectra])
    return StarBounds(lo, hi)


def scalar_to_star(bounds: ScalarBounds, shape) -> StarBounds:
    """``(a, b) -> (sqrt(a) 1_A, sqrt(b) 1_A)``."""
    _check_scalar(bounds)
    shape = as_shape(shape)
    return StarBounds(
        AlgebraElement.scalar(shape, np.sqrt(bounds.lower)),
        AlgebraElement.scalar(shape, np.sqrt(bounds.upper)),
    )


# ---------------------------------------------------------------------------
# verification


def _check_scalar(bounds: ScalarBounds):
    a, b = bounds.lower, bounds.upper
    if not (np.isfinite(a) and np.isfinite(b)) or a <= 0 or a > b:
        raise MalformedBounds(f"scalar bounds need 0 < a <= b, got ({a}, {b})")


def _check_star_elem(e: AlgebraElement, shape: AlgebraShape, name: str, tol: Tolerance):
    if not isinstance(e, AlgebraElement):
        raise MalformedBounds(f"{name} bound must be an AlgebraElement")
    if e.shape != shape:
        raise ShapeError(f"{name} bound has shape {e.shape}, family has {shape}")
    smin, k = sigma_min(e)
    if smin < tol.scale(norm(e)):
        raise MalformedBounds(f"{name} bound is not invertible (factor {k}, sigma_min={smin:.3e})")


def _bound_matrices(bounds: FrameBounds, shape: AlgebraShape, side: str) -> list[np.ndarray]:
    """Per-factor matrices ``M_k`` so that the bound term is ``M g M^H``."""
    if isinstance(bounds, ScalarBounds):
        val = bounds.lower if side == "lower" else bounds.upper
        return [np.sqrt(val) * np.eye(n) for n in shape]
    e = bounds.lower if side == "lower" else bounds.upper
    return [np.asarray(b) for b in e.blocks]


def bound_term(bounds: FrameBounds, side: str, g: AlgebraElement) -> AlgebraElement:
    """``A g A*`` (star) or ``a g`` (scalar) for the requested side."""
    if isinstance(bounds, ScalarBounds):
        return (bounds.lower if side == "lower" else bounds.upper) * g
    e = bounds.lower if side == "lower" else bounds.upper
    return e @ g @ adjoint(e)


def frame_sum(fam: OperatorFamily, x: ModuleVector) -> AlgebraElement:
    """``sum_i <T_i x, T_i x>`` evaluated directly (no frame operator)."""
    total = AlgebraElement.zero(fam.shape)
    for T in fam:
        y = apply(T, x)
        total = total + inner_product(y, y)
    return total


def evaluate_defect(fam: OperatorFamily, bounds: FrameBounds, side: str, x: ModuleVector) -> AlgebraElement:
    """Defect of one side of the frame inequality at ``x``; PSD iff that side holds at ``x``."""
    g = inner_product(x, x)
    mid = frame_sum(fam, x)
    if side == "lower":
        return mid - bound_term(bounds, "lower", g)
    return bound_term(bounds, "upper", g) - mid


def _defect_min_eig(defect: AlgebraElement) -> float:
    return min(float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in defect.blocks)


def _defect_scale(fam, bounds, side, x, tol: Tolerance) -> float:
    g = inner_product(x, x)
    return tol.scale(max(norm(frame_sum(fam, x)), norm(bound_term(bounds, side, g))))


def _probe_vectors(n: int):
    """Deterministic unit test vectors: basis vectors and pairwise mixtures."""
    eye = np.eye(n, dtype=np.complex128)
    yield from eye
    for i, j in itertools.combinations(range(n), 2):
        yield (eye[i] + eye[j]) / np.sqrt(2)
        yield (eye[i] + 1j * eye[j]) / np.sqrt(2)


def _orth_component(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Component of ``v`` orthogonal to ``w``."""
    ww = np.vdot(w, w).real
    if ww == 0:
        return v.copy()
    return v - (np.vdot(w, v) / ww) * w


def _embed(shape: AlgebraShape, m: int, k: int, X: np.ndarray) -> ModuleVector:
    rows = [np.zeros((n, n * m), dtype=np.complex128) for n in shape]
    rows[k] = X
    return from_row_matrices(shape, m, rows)


def _noncentral_witness(M: np.ndarray, e: np.ndarray, side: str) -> np.ndarray:
    """Row matrix ``X`` exposing a non-central bound block ``M``.

    Lower side: pick ``u`` with ``M^H u`` far from ``span{u}`` and build ``X``
    with ``X^H u = 0``, ``X^H M^H u != 0``; then ``u^H (X S X^H) u = 0`` while
    ``u^H (M X X^H M^H) u > 0``.  Upper side: pick ``v`` likewise and build
    ``X`` with ``X^H M^H v = 0``, ``X^H v = e`` (a top eigenvector of ``S_k``).
    """
    best, best_score = None, -1.0
    for p in _probe_vectors(M.shape[0]):
        w = M.conj().T @ p
        if side == "lower":
            h = _orth_component(w, p)
            score = np.vdot(h, h).real
        else:
            h = _orth_component(p, w)
            score = np.vdot(h, h).real
        if score > best_score + 1e-15:
            best, best_score = h, score
    h = best / np.linalg.norm(best)
    return np.outer(h, e.conj())


def verify(
    fam: OperatorFamily,
    bounds: FrameBounds,
    tol: Tolerance = DEFAULT_TOL,
    sides: Sequence[str] = ("lower", "upper"),
) -> VerificationReport:
    """Decide the frame inequality exactly (up to ``tol``) and certify failures.

    Scalar bounds compare against the extreme eigenvalues of each flat
    factor of ``S``.  For algebra-valued bounds a block that is not a
    multiple of the identity (in a factor with ``n_k >= 2``) makes the lower
    inequality fail outright, and the upper one fail unless ``S_k = 0``; a
    central bound with block scalars ``lambda_k`` reduces to
    ``|lambda_k|^2 <= lambda_min(S_k)`` (resp. ``lambda_max(S_k) <= |mu_k|^2``).
    Every invalid verdict carries a witness whose directly evaluated defect
    has an eigenvalue below ``-tol``.
    """
    shape, m = fam.shape, fam.dom_rank
    notes: list[str] = []
    if isinstance(bounds, ScalarBounds):
        if "lower" in sides:
            _check_scalar(bounds)
        elif not (np.isfinite(bounds.upper) and bounds.upper > 0):
            raise MalformedBounds(f"upper scalar bound must be positive, got {bounds.upper}")
    elif isinstance(bounds, StarBounds):
        for side in sides:
            _check_star_elem(getattr(bounds, side), shape, side, tol)
    else:
        raise MalformedBounds(f"unsupported bounds {type(bounds).__name__}")
    if not fam.common_codomain:
        notes.append("members map into different free modules (codomain relaxed)")

    eig = [_hermitian_eigh(F) for F in flatten(frame_operator(fam))]
    s_norm = max(float(w[-1]) for w, _ in eig)

    bound_info = {}
    mag = s_norm
    for side in sides:
        mats = _bound_matrices(bounds, shape, side)
        if isinstance(bounds, StarBounds):
            e = getattr(bounds, side)
            scalars = central_scalars(e)
            bscale = tol.scale(norm(e))
            central = [
                n == 1 or np.linalg.norm(M - s * np.eye(n), 2) <= bscale
                for n, M, s in zip(shape, mats, scalars)
            ]
        else:
            scalars = np.array([np.sqrt(getattr(bounds, side))] * shape.num_factors)
            central = [True] * shape.num_factors
        sq = np.abs(scalars) ** 2
        mag = max(mag, float(sq.max()))
        bound_info[side] = (mats, sq, central)
    scale = tol.scale(mag)

    margins: dict[str, list[float]] = {}
    failures = []  # (side, factor, row matrix)
    for side in sides:
        mats, sq, central = bound_info[side]
        col = []
        for k, (w, v) in enumerate(eig):
            if central[k]:
                if side == "lower":
                    margin = float(w[0] - sq[k])
                    X = np.outer(np.eye(shape.factor_dims[k])[0], v[:, 0].conj())
                else:
                    margin = float(sq[k] - w[-1])
                    X = np.outer(np.eye(shape.factor_dims[k])[0], v[:, -1].conj())
                col.append(margin)
                if margin < -scale:
                    failures.append((side, k, X))
                continue
            if side == "upper" and w[-1] <= scale:
                col.append(float(-w[-1]))
                notes.append(f"upper bound non-central in factor {k} but S vanishes there")
                continue
            e_vec = v[:, 0] if side == "lower" else v[:, -1]
            X = _noncentral_witness(mats[k], e_vec, side)
            x = _embed(shape, m, k, X)
            d = evaluate_defect(fam, bounds, side, x)
            col.append(float(np.linalg.eigvalsh((d.blocks[k] + d.blocks[k].conj().T) / 2)[0]))
            notes.append(f"{side} bound is not central in factor {k}")
            failures.append((side, k, X))
        margins[side] = col

    confirmed = []
    for side, k, X in failures:
        x = _embed(shape, m, k, X)
        d = evaluate_defect(fam, bounds, side, x)
        if _defect_min_eig(d) < -_defect_scale(fam, bounds, side, x, tol):
            confirmed.append((side, k, x, d))
        else:
            notes.append(f"{side} violation in factor {k} is below evaluation tolerance")

    if not confirmed:
        return VerificationReport("valid", "none", margins, notes=notes)
    failed_sides = {c[0] for c in confirmed}
    side = "both" if len(failed_sides) == 2 else failed_sides.pop()
    wside, k, x, d = confirmed[0]
    return VerificationReport(
        "invalid", side, margins, witness=x, witness_defect=d, witness_side=wside, notes=notes
    )


def is_bessel(fam: OperatorFamily, upper: Union[float, AlgebraElement], tol: Tolerance = DEFAULT_TOL) -> bool:
    """Upper half of :func:`verify` only."""
    if isinstance(upper, AlgebraElement):
        bounds = StarBounds(AlgebraElement.identity(fam.shape), upper)
    else:
        bounds = ScalarBounds(float(upper), float(upper))
    return verify(fam, bounds, tol, sides=("upper",)).valid


# ---------------------------------------------------------------------------
# sampling oracle


class Falsification(NamedTuple):
    trial: int
    side: str
    witness: ModuleVector
    defect: AlgebraElement


_CHUNK = 1024


def sampling_falsifier(
    fam: OperatorFamily,
    bounds: FrameBounds,
    seed: RngLike = 0,
    trials: int = 10_000,
    tol: Tolerance = DEFAULT_TOL,
) -> Optional[Falsification]:
    """Search random vectors for a violation of either frame inequality.

    Independent of the frame operator: ``<T_i x, T_i x>`` is computed from
    the member coefficients.  Even trials draw Gaussian vectors, odd trials
    rank-one row matrices (which probe non-central bounds far better).
    Returns the lowest-index violating trial, or ``None``.
    """
    rng = as_rng(seed)
    shape, m = fam.shape, fam.dom_rank
    lo = _bound_matrices(bounds, shape, "lower")
    hi = _bound_matrices(bounds, shape, "upper")
    done = 0
    while done < trials:
        t = min(_CHUNK, trials - done)
        xs, worst, mags = [], [], []
        for k, n in enumerate(shape):
            X = (rng.standard_normal((t, n, n * m)) + 1j * rng.standard_normal((t, n, n * m))) / np.sqrt(2)
            g = rng.standard_normal((t, n)) + 1j * rng.standard_normal((t, n))
            e = rng.standard_normal((t, n * m)) + 1j * rng.standard_normal((t, n * m))
            rank1 = np.einsum("ta,tb->tab", g, e.conj())
            X[1::2] = rank1[1::2]
            x = X.reshape(t, n, m, n).transpose(0, 2, 1, 3)  # (t, m, n, n)
            xs.append(x)
            gram = np.einsum("tjab,tjcb->tac", x, x.conj())
            mid = np.zeros_like(gram)
            for T in fam:
                y = np.einsum("tiab,ijbc->tjac", x, T.blocks[k])
                mid += np.einsum("tjab,tjcb->tac", y, y.conj())
            low_term = lo[k] @ gram @ lo[k].conj().T
            up_term = hi[k] @ gram @ hi[k].conj().T
            d_lo = np.linalg.eigvalsh(_herm(mid - low_term))[:, 0]
            d_hi = np.linalg.eigvalsh(_herm(up_term - mid))[:, 0]
            worst.append(np.stack([d_lo, d_hi]))
            mags.append(np.max(np.abs(np.stack([
                np.linalg.eigvalsh(_herm(mid))[:, -1],
                np.linalg.eigvalsh(_herm(low_term))[:, -1],
                np.linalg.eigvalsh(_herm(up_term))[:, -1],
            ])), axis=0))
        worst = np.min(np.stack(worst), axis=0)  # (2, t)
        scale = tol.abs + tol.rel * (1.0 + np.max(np.stack(mags), axis=0))
        bad = worst < -scale
        hits = np.flatnonzero(bad.any(axis=0))
        if hits.size:
            i = int(hits[0])
            side = "lower" if bad[0, i] else "upper"
            x = ModuleVector(shape, [xk[i] for xk in xs])
            return Falsification(done + i, side, x, evaluate_defect(fam, bounds, side, x))
        done += t
    return None


def _herm(a: np.ndarray) -> np.ndarray:
    return (a + np.swapaxes(a, -1, -2).conj()) / 2


# ---------------------------------------------------------------------------
# constructions


def from_vector_frame(xs: Sequence[ModuleVector]) -> OperatorFamily:
    """Family ``T_i x = <x, x_i>`` mapping ``A^m`` into ``A^1``."""
    xs = list(xs)
    if not xs:
        raise ShapeError("vector family must be nonempty")
    shape, m = xs[0].shape, xs[0].rank
    members = []
    for i, xi in enumerate(xs):
        if xi.shape != shape or xi.rank != m:
            raise ShapeError(f"vector {i} does not match shape/rank of vector 0")
        # coefficient c[j][0] = (x_i)_j^*
        members.append(AdjointableOperator(shape, [b.conj().transpose(0, 2, 1)[:, None] for b in xi.blocks]))
    return OperatorFamily(tuple(members))


def _inverse_power(fam: OperatorFamily, f: str, tol: Tolerance) -> AdjointableOperator:
    try:
        return op_calculus(frame_operator(fam), f, tol)
    except NotInvertible as exc:
        raise NoLowerBound(str(exc)) from exc


def canonical_parseval(fam: OperatorFamily, tol: Tolerance = DEFAULT_TOL) -> OperatorFamily:
    """``{T_i S^{-1/2}}``, whose frame operator is the identity."""
    root = _inverse_power(fam, "inv_sqrt", tol)
    return OperatorFamily(tuple(compose(T, root) for T in fam))


def canonical_dual_type(fam: OperatorFamily, tol: Tolerance = DEFAULT_TOL) -> OperatorFamily:
    """``{T_i S^{-1}}``, whose frame operator is ``S^{-1}``."""
    inv = _inverse_power(fam, "inv", tol)
    return OperatorFamily(tuple(compose(T, inv) for T in fam))


def _as_star(bounds: FrameBounds, shape) -> StarBounds:
    return scalar_to_star(bounds, shape) if isinstance(bounds, ScalarBounds) else bounds


def _require_valid(fam: OperatorFamily, bounds: FrameBounds, tol: Tolerance):
    rep = verify(fam, bounds, tol)
    if not rep.valid:
        raise MalformedBounds(f"input bounds do not hold for the family ({rep.side} side fails)")


def compose_right(fam: OperatorFamily, theta: AdjointableOperator, bounds: FrameBounds, tol: Tolerance = DEFAULT_TOL) -> ConstructionResult:
    """``{T_i theta}`` for injective ``theta`` with claimed bounds
    ``(||(theta* theta)^{-1}||^{-1/2} A, ||theta|| B)``."""
    if theta.shape != fam.shape or theta.cod_rank != fam.dom_rank:
        raise ShapeError("theta must map into the family's domain")
    diag = range_diagnostics(theta, tol)
    if not diag.injective:
        raise NotInjective(f"theta is not injective (sigma_min={diag.sigma_min:.3e})")
    star = _as_star(bounds, fam.shape)
    _require_valid(fam, star, tol)
    c_lo = diag.norm_inv_TstarT ** -0.5
    claimed = StarBounds(c_lo * star.lower, op_norm(theta) * star.upper)
    out = OperatorFamily(tuple(compose(T, theta) for T in fam))
    return ConstructionResult(out, claimed, verify(out, claimed, tol))


def compose_left(fam: OperatorFamily, theta: AdjointableOperator, bounds: FrameBounds, tol: Tolerance = DEFAULT_TOL) -> ConstructionResult:
    """``{theta T_i}`` for surjective ``theta`` in ``End*(A^r)`` with claimed
    bounds ``(||(theta theta*)^{-1}||^{-1/2} A, ||theta|| B)``.

    ``theta`` must be square: the lower bound rests on
    ``theta* theta >= ||(theta theta*)^{-1}||^{-1}``, which holds for
    surjective endomorphisms of a finite-dimensional module but not for
    surjections between modules of different rank.
    """
    ranks = set(fam.cod_ranks)
    if len(ranks) != 1:
        raise ShapeError("members must share a codomain to be composed on the left")
    r = ranks.pop()
    if theta.shape != fam.shape or theta.dom_rank != r or theta.cod_rank != r:
        raise ShapeError(f"theta must be an endomorphism of A^{r}")
    diag = range_diagnostics(theta, tol)
    if not diag.surjective:
        raise NotSurjective(f"theta is not surjective (sigma_min={diag.sigma_min:.3e})")
    star = _as_star(bounds, fam.shape)
    _require_valid(fam, star, tol)
    c_lo = diag.norm_inv_TTstar ** -0.5
    claimed = StarBounds(c_lo * star.lower, op_norm(theta) * star.upper)
    out = OperatorFamily(tuple(compose(theta, T) for T in fam))
    return ConstructionResult(out, claimed, verify(out, claimed, tol))


def random_family(
    shape,
    m: int,
    N: int,
    seed: RngLike = None,
    kind: str = "random",
    cod_rank: Optional[int] = None,
) -> OperatorFamily:
    """Seeded family of ``N`` members on ``A^m``.

    ``random``: Gaussian members rescaled so the frame operator has
    ``lambda_min >= 0.1``; ``near_parseval``: ``(I + 0.1 G_i) / sqrt(N)`` with
    ``||S - I|| <= 0.5`` checked.
    """
    shape = as_shape(shape)
    rng = as_rng(seed)
    r = m if cod_rank is None else cod_rank
    for _ in range(100):
        if kind == "random":
            fam = OperatorFamily(tuple(random_operator(shape, m, r, rng) for _ in range(N)))
            ev = frame_spectra(fam)
            lam = min(float(w[0]) for w in ev)
            if lam < 1e-3:
                continue
            if lam < 0.1:
                fam = OperatorFamily(tuple(np.sqrt(0.1 / lam) * T for T in fam))
            return fam
        if kind == "near_parseval":
            if r != m:
                raise ShapeError("near_parseval families map A^m to itself")
            ident = AdjointableOperator.identity(shape, m)
            fam = OperatorFamily(tuple(
                (1 / np.sqrt(N)) * (ident + 0.1 * random_operator(shape, m, m, rng)) for _ in range(N)
            ))
            S = frame_operator(fam)
            if op_norm(S - AdjointableOperator.identity(shape, m)) <= 0.5:
                return fam
            continue
        raise ValueError(f"unknown family kind {kind!r}")
    raise RuntimeError("could not generate family")  # pragma: no cover
