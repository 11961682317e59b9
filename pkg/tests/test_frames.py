import numpy as np
import pytest
from hypothesis import given

from conftest import ranks, seeds, shapes
from starframes.algebra import AlgebraElement, AlgebraShape, Tolerance, invert, norm, random_element
from starframes.errors import MalformedBounds, NoLowerBound, NotInjective, ShapeError
from starframes.frames import (
    OperatorFamily,
    ScalarBounds,
    StarBounds,
    canonical_dual_type,
    canonical_parseval,
    compose_left,
    compose_right,
    evaluate_defect,
    frame_operator,
    frame_spectra,
    frame_sum,
    frame_transform,
    from_vector_frame,
    is_bessel,
    optimal_scalar_bounds,
    optimal_star_bounds,
    random_family,
    sampling_falsifier,
    scalar_to_star,
    synthesis,
    verify,
)
from starframes.hilbert_module import (
    ModuleVector,
    direct_sum,
    inner_product,
    random_vector,
    vector_frame_sum,
)
from starframes.operators import AdjointableOperator, adjoint_op, apply, compose, op_norm, random_operator

S2 = AlgebraShape((2,))
S11 = AlgebraShape((1, 1))
S21 = AlgebraShape((2, 1))


def identity_family(shape, m=1):
    return OperatorFamily((AdjointableOperator.identity(shape, m),))


def desk_family():
    return OperatorFamily((AdjointableOperator.multiplication(AlgebraElement.central(S11, [1, 2])),))


def one(shape):
    return AlgebraElement.identity(shape)


def geometric_family(N):
    return OperatorFamily(tuple(2.0 ** -i * AdjointableOperator.identity(S2, 1) for i in range(1, N + 1)))


# --- family construction


def test_family_validation():
    with pytest.raises(ShapeError):
        OperatorFamily(())
    with pytest.raises(ShapeError):
        OperatorFamily((AdjointableOperator.identity(S2, 1), AdjointableOperator.identity(S2, 2)))
    with pytest.raises(ShapeError):
        OperatorFamily((AdjointableOperator.identity(S2, 1), AdjointableOperator.identity(S21, 1)))


# --- frame operator and transform


def test_frame_operator_examples():
    assert frame_operator(identity_family(S21, 2)).allclose(AdjointableOperator.identity(S21, 2))
    c = sum(4.0 ** -i for i in range(1, 8))
    assert frame_operator(geometric_family(7)).allclose(c * AdjointableOperator.identity(S2, 1), 1e-15)
    S = frame_operator(desk_family())
    assert S.coeff(0, 0) == AlgebraElement.central(S11, [1, 4])


def test_desk_frame_operator_against_sampling():
    fam = desk_family()
    S = frame_operator(fam)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = random_vector(S11, 1, rng)
        assert inner_product(apply(S, x), x).allclose(frame_sum(fam, x), 1e-12)


@given(shapes, ranks, seeds)
def test_transform_and_synthesis(shape, m, seed):
    rng = np.random.default_rng(seed)
    fam = random_family(shape, m, 3, rng)
    S = frame_operator(fam)
    R = frame_transform(fam)
    assert op_norm(compose(adjoint_op(R), R) - S) <= Tolerance().scale(op_norm(S))
    ys = [random_vector(shape, T.cod_rank, rng) for T in fam]
    assert apply(adjoint_op(R), direct_sum(ys)).allclose(synthesis(fam, ys), 1e-11)
    x = random_vector(shape, m, rng)
    assert inner_product(apply(S, x), x).allclose(frame_sum(fam, x), 1e-10)


def test_identity_transform():
    R = frame_transform(identity_family(S21, 2))
    assert R.allclose(AdjointableOperator.identity(S21, 2))


# --- optimal bounds


def test_optimal_bounds_examples():
    assert optimal_scalar_bounds(identity_family(S21)) == pytest.approx((1.0, 1.0))
    c = sum(4.0 ** -i for i in range(1, 21))
    assert optimal_scalar_bounds(geometric_family(20)) == pytest.approx((c, c), abs=1e-15)
    assert optimal_scalar_bounds(desk_family()) == pytest.approx((1.0, 4.0))

    star = optimal_star_bounds(identity_family(S21))
    assert star.lower.allclose(one(S21)) and star.upper.allclose(one(S21))
    star = optimal_star_bounds(desk_family())
    assert star.lower.allclose(AlgebraElement.central(S11, [1, 2]))
    assert star.upper.allclose(AlgebraElement.central(S11, [1, 2]))
    star = optimal_star_bounds(geometric_family(20))
    assert star.lower.allclose(np.sqrt(c) * one(S2), 1e-15)


def test_singular_family_has_no_lower_bound():
    fam = OperatorFamily((AdjointableOperator.zero(S2, 1, 1),))
    assert optimal_scalar_bounds(fam)[0] == 0.0
    with pytest.raises(NoLowerBound):
        optimal_star_bounds(fam)
    with pytest.raises(NoLowerBound):
        canonical_parseval(fam)


@given(shapes, ranks, seeds)
def test_optimal_bounds_match_eigen_oracle(shape, m, seed):
    fam = random_family(shape, m, 2, seed)
    S = frame_operator(fam)
    lam = []
    for k, n in enumerate(shape):
        F = np.block([[S.blocks[k][i, j] for j in range(m)] for i in range(m)])
        lam.append(np.linalg.eigvalsh(F))
    a, b = optimal_scalar_bounds(fam)
    assert a == pytest.approx(min(v[0] for v in lam)) and b == pytest.approx(max(v[-1] for v in lam))
    rep = verify(fam, optimal_star_bounds(fam))
    assert rep.valid
    assert is_bessel(fam, optimal_star_bounds(fam).upper)


# --- verify


def test_verify_examples():
    rep = verify(identity_family(S21), ScalarBounds(1.0, 1.0))
    assert rep.valid and all(v == 0 for v in rep.margins["lower"] + rep.margins["upper"])
    a = AlgebraElement.central(S11, [1, 2])
    rep = verify(desk_family(), StarBounds(a, a))
    assert rep.valid and rep.margins == {"lower": [0.0, 0.0], "upper": [0.0, 0.0]}


def test_noncentral_lower_bound_is_refuted():
    A = AlgebraElement(S2, [np.array([[1.0, 1.0], [1.0, 0.0]])])
    rep = verify(identity_family(S2), StarBounds(A, 2 * one(S2)))
    assert not rep.valid and rep.side == "lower" and rep.witness_side == "lower"
    d = evaluate_defect(identity_family(S2), StarBounds(A, 2 * one(S2)), "lower", rep.witness)
    assert np.linalg.eigvalsh(d.blocks[0])[0] < -1e-3
    assert any("not central" in n for n in rep.notes)


def test_noncentral_upper_bound():
    B = AlgebraElement(S2, [np.array([[3.0, 1.0], [0.0, 3.0]])])
    rep = verify(identity_family(S2), StarBounds(0.5 * one(S2), B))
    assert not rep.valid and rep.side == "upper"
    # where S vanishes a non-central upper bound is harmless
    zero_there = OperatorFamily((AdjointableOperator.multiplication(AlgebraElement(S21, [np.zeros((2, 2)), np.eye(1)])),))
    B2 = AlgebraElement(S21, [np.array([[3.0, 1.0], [0.0, 3.0]]), np.eye(1)])
    assert verify(zero_there, StarBounds(one(S21), B2), sides=("upper",)).valid


def test_malformed_bounds():
    fam = identity_family(S2)
    with pytest.raises(MalformedBounds):
        verify(fam, ScalarBounds(2.0, 1.0))
    with pytest.raises(MalformedBounds):
        verify(fam, ScalarBounds(0.0, 1.0))
    with pytest.raises(MalformedBounds):
        verify(fam, StarBounds(AlgebraElement(S2, [np.diag([1.0, 0.0])]), one(S2)))
    with pytest.raises(ShapeError):
        verify(fam, StarBounds(one(S21), one(S21)))


@given(shapes, ranks, seeds)
def test_verify_report_invariants(shape, m, seed):
    rng = np.random.default_rng(seed)
    fam = random_family(shape, m, 2, rng)
    bounds = StarBounds(random_element(shape, rng, "invertible"), 2 * random_element(shape, rng, "invertible"))
    rep = verify(fam, bounds)
    tol = Tolerance()
    if rep.valid:
        S = frame_operator(fam)
        scale = tol.scale(max(op_norm(S), norm(bounds.upper) ** 2))
        assert all(v >= -scale for v in rep.margins["lower"] + rep.margins["upper"])
        assert norm(invert(bounds.lower)) ** -2 <= op_norm(S) + scale
        assert op_norm(S) <= norm(bounds.upper) ** 2 + scale
    else:
        d = evaluate_defect(fam, bounds, rep.witness_side, rep.witness)
        assert min(np.linalg.eigvalsh(b)[0] for b in d.blocks) < -tol.abs


# --- sampling falsifier


def test_falsifier_examples():
    assert sampling_falsifier(geometric_family(10), ScalarBounds(*optimal_scalar_bounds(geometric_family(10)))) is None
    hit = sampling_falsifier(OperatorFamily((AdjointableOperator.zero(S2, 1, 1),)), ScalarBounds(1.0, 2.0))
    assert hit is not None and hit.trial < 3 and hit.side == "lower"


def test_falsifier_is_deterministic():
    fam = random_family(S21, 2, 2, 1)
    bounds = StarBounds(1.1 * optimal_star_bounds(fam).lower, optimal_star_bounds(fam).upper)
    a, b = sampling_falsifier(fam, bounds, seed=3), sampling_falsifier(fam, bounds, seed=3)
    assert a is not None and a.trial == b.trial and a.witness.allclose(b.witness, 0)


def test_invalid_verdicts_are_confirmed_by_some_oracle():
    rng = np.random.default_rng(11)
    for _ in range(30):
        fam = random_family(S21, 1, 2, rng)
        bounds = StarBounds(random_element(S21, rng, "invertible"), random_element(S21, rng, "invertible"))
        rep = verify(fam, bounds)
        if rep.valid:
            continue
        hit = sampling_falsifier(fam, bounds, seed=0, trials=2000)
        d = evaluate_defect(fam, bounds, rep.witness_side, rep.witness)
        assert hit is not None or min(np.linalg.eigvalsh(b)[0] for b in d.blocks) < 0


# --- Bessel


def test_is_bessel_examples():
    fam = random_family(S21, 2, 3, 2)
    b = optimal_scalar_bounds(fam)[1]
    assert is_bessel(fam, b + 1)
    assert not is_bessel(identity_family(S2), 0.5)
    rep = verify(fam, optimal_star_bounds(fam), sides=("upper",))
    assert max(abs(v) for v in rep.margins["upper"]) <= 1e-12


# --- vector frames


def test_vector_frame_examples():
    units = [ModuleVector.unit(S21, 2, j) for j in range(2)]
    assert frame_operator(from_vector_frame(units)).allclose(AdjointableOperator.identity(S21, 2), 1e-15)
    desk = [ModuleVector.from_entries([AlgebraElement.central(S11, [1, 2])])]
    assert frame_operator(from_vector_frame(desk)).coeff(0, 0) == AlgebraElement.central(S11, [1, 4])


def test_vector_frame_dual_path():
    rng = np.random.default_rng(7)
    for _ in range(50):
        shape = [S21, S2, AlgebraShape((1, 2))][int(rng.integers(0, 3))]
        xs = [random_vector(shape, 2, rng) for _ in range(int(rng.integers(1, 4)))]
        fam = from_vector_frame(xs)
        x = random_vector(shape, 2, rng)
        assert vector_frame_sum(x, xs).allclose(frame_sum(fam, x), 1e-10)
        bounds = StarBounds(random_element(shape, rng, "central_positive_invertible"),
                            3 * random_element(shape, rng, "central_positive_invertible"))
        rep = verify(fam, bounds)
        if not rep.valid:
            # the same witness breaks the vector-frame inequality when evaluated directly
            w = rep.witness
            g = inner_product(w, w)
            e = bounds.lower if rep.witness_side == "lower" else bounds.upper
            bound = e @ g @ e.H
            mid = vector_frame_sum(w, xs)
            d = mid - bound if rep.witness_side == "lower" else bound - mid
            assert min(np.linalg.eigvalsh(b)[0] for b in d.blocks) < 0


# --- canonical constructions


def test_canonical_parseval_examples():
    units = from_vector_frame([ModuleVector.unit(S21, 2, j) for j in range(2)])
    for a, b in zip(canonical_parseval(units), units):
        assert a.allclose(b, 1e-14)
    (T,) = canonical_parseval(desk_family())
    assert T.coeff(0, 0).allclose(one(S11), 1e-15)


@given(shapes, ranks, seeds)
def test_canonical_parseval_properties(shape, m, seed):
    fam = random_family(shape, m, 3, seed)
    P = canonical_parseval(fam)
    ident = AdjointableOperator.identity(shape, m)
    assert op_norm(frame_operator(P) - ident) <= 10 * Tolerance().scale(1.0) + 1e-8
    assert verify(P, ScalarBounds(1.0, 1.0)).valid
    for a, b in zip(canonical_parseval(P), P):
        assert a.allclose(b, 1e-9)


def test_canonical_dual_examples():
    units = from_vector_frame([ModuleVector.unit(S2, 1, 0)])
    for a, b in zip(canonical_dual_type(units), units):
        assert a.allclose(b, 1e-14)
    fam = OperatorFamily((2 * AdjointableOperator.identity(S2, 1),))
    (T,) = canonical_dual_type(fam)
    assert T.allclose(0.5 * AdjointableOperator.identity(S2, 1), 1e-15)
    assert frame_operator(canonical_dual_type(fam)).allclose(0.25 * AdjointableOperator.identity(S2, 1))


# --- composition


def test_compose_right_examples():
    fam = random_family(S21, 2, 3, 0)
    star = optimal_star_bounds(fam)
    new, claimed, rep = compose_right(fam, AdjointableOperator.identity(S21, 2), star)
    assert all(a.allclose(b) for a, b in zip(new, fam))
    assert claimed.lower.allclose(star.lower) and claimed.upper.allclose(star.upper) and rep.valid

    I1 = identity_family(S2)
    new, claimed, rep = compose_right(I1, 2 * AdjointableOperator.identity(S2, 1), ScalarBounds(1.0, 1.0))
    assert frame_operator(new).allclose(4 * AdjointableOperator.identity(S2, 1))
    assert claimed.lower.allclose(2 * one(S2)) and claimed.upper.allclose(2 * one(S2)) and rep.valid


def test_compose_right_errors():
    fam = identity_family(S2, 2)
    with pytest.raises(NotInjective):
        compose_right(fam, AdjointableOperator.zero(S2, 2, 2), ScalarBounds(1.0, 1.0))
    with pytest.raises(NotInjective):
        compose_right(fam, random_operator(S2, 3, 2, 0), ScalarBounds(1.0, 1.0))
    with pytest.raises(MalformedBounds):
        compose_right(fam, AdjointableOperator.identity(S2, 2), ScalarBounds(2.0, 2.0))


def test_compose_left_examples():
    P = canonical_parseval(random_family(S21, 2, 3, 1))
    new, claimed, rep = compose_left(P, AdjointableOperator.identity(S21, 2), ScalarBounds(1.0, 1.0))
    assert all(a.allclose(b) for a, b in zip(new, P)) and rep.valid
    new, claimed, rep = compose_left(P, 3 * AdjointableOperator.identity(S21, 2), ScalarBounds(1.0, 1.0))
    assert claimed.lower.allclose(3 * one(S21)) and claimed.upper.allclose(3 * one(S21))
    assert op_norm(frame_operator(new) - 9 * AdjointableOperator.identity(S21, 2)) <= 1e-12
    with pytest.raises(ShapeError):
        compose_left(P, random_operator(S21, 2, 1, 0, kind="surjective"), ScalarBounds(1.0, 1.0))


# --- scalar bounds as star bounds


def test_scalar_to_star_examples():
    s = scalar_to_star(ScalarBounds(1.0, 1.0), S21)
    assert s.lower == one(S21) and s.upper == one(S21)
    s = scalar_to_star(ScalarBounds(4.0, 9.0), S21)
    assert s.lower.allclose(2 * one(S21)) and s.upper.allclose(3 * one(S21))


def test_scalar_and_star_paths_agree():
    rng = np.random.default_rng(12)
    for _ in range(50):
        fam = random_family(S21, int(rng.integers(1, 3)), 2, rng)
        a, b = optimal_scalar_bounds(fam)
        bounds = ScalarBounds(a * rng.uniform(0.8, 1.2), b * rng.uniform(0.8, 1.2))
        if bounds.lower > bounds.upper:
            continue
        assert verify(fam, bounds).verdict == verify(fam, scalar_to_star(bounds, S21)).verdict


# --- monotonicity and generators


@given(shapes, ranks, seeds)
def test_adding_a_member_never_shrinks_spectra(shape, m, seed):
    rng = np.random.default_rng(seed)
    fam = random_family(shape, m, 2, rng)
    bigger = OperatorFamily(fam.members + (random_operator(shape, m, m, rng),))
    for small, big in zip(frame_spectra(fam), frame_spectra(bigger)):
        assert big[0] >= small[0] - 1e-12 and big[-1] >= small[-1] - 1e-12


def test_random_family_kinds():
    fam = random_family(AlgebraShape((2, 3)), 2, 5, 0, kind="near_parseval")
    assert op_norm(frame_operator(fam) - AdjointableOperator.identity(fam.shape, 2)) <= 0.5
    fam = random_family(S21, 2, 1, 3)
    assert optimal_scalar_bounds(fam)[0] >= 0.1 - 1e-12
    fam = random_family(S21, 2, 2, 3, cod_rank=3)
    assert fam.cod_ranks == (3, 3)
    with pytest.raises(ValueError):
        random_family(S21, 1, 1, 0, kind="nope")


def test_relaxed_codomains_are_flagged():
    fam = OperatorFamily((AdjointableOperator.identity(S2, 1), random_operator(S2, 1, 2, 0)))
    assert not fam.common_codomain
    rep = verify(fam, ScalarBounds(0.5, 100.0))
    assert any("codomain" in n for n in rep.notes)
