import numpy as np
import pytest
from hypothesis import given

from conftest import seeds, shapes
from starframes.algebra import AlgebraElement, AlgebraShape, is_positive, leq, norm, random_element
from starframes.errors import NotInvertible, ShapeError
from starframes.frames import (
    OperatorFamily,
    ScalarBounds,
    canonical_parseval,
    frame_operator,
    optimal_star_bounds,
    random_family,
)
from starframes.hilbert_module import ModuleVector, inner_product, random_vector
from starframes.operators import AdjointableOperator, apply, op_norm, random_operator
from starframes.tensor import (
    TensorShape,
    elem_tensor,
    family_tensor,
    op_tensor,
    product_shape,
    q_tensor_compose,
    vector_tensor,
)

L, R = AlgebraShape((2,)), AlgebraShape((1, 2))


def test_product_shape_order():
    assert product_shape(AlgebraShape((2, 3)), AlgebraShape((1, 4))) == AlgebraShape((2, 8, 3, 12))
    assert TensorShape(AlgebraShape((2, 3)), R).provenance == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_elem_tensor_examples():
    assert elem_tensor(AlgebraElement.identity(L), AlgebraElement.identity(R)) == AlgebraElement.identity(product_shape(L, R))
    c = elem_tensor(AlgebraElement.central(AlgebraShape((1,)), [2]), AlgebraElement.central(AlgebraShape((1,)), [3]))
    assert c == AlgebraElement.central(AlgebraShape((1,)), [6])


def test_elem_tensor_matches_double_loop():
    a, b = random_element(L, 0), random_element(R, 1)
    t = elem_tensor(a, b)
    for idx, (ak, bl) in enumerate((ak, bl) for ak in a.blocks for bl in b.blocks):
        n, p = len(ak), len(bl)
        brute = np.zeros((n * p, n * p), dtype=complex)
        for i in range(n):
            for j in range(n):
                for r in range(p):
                    for s in range(p):
                        brute[i * p + r, j * p + s] = ak[i, j] * bl[r, s]
        np.testing.assert_allclose(t.blocks[idx], brute, atol=0)


@given(shapes, shapes, seeds)
def test_elem_tensor_algebraic_laws(left, right, seed):
    rng = np.random.default_rng(seed)
    a, a2 = random_element(left, rng), random_element(left, rng)
    b, b2 = random_element(right, rng), random_element(right, rng)
    assert abs(norm(elem_tensor(a, b)) - norm(a) * norm(b)) <= 1e-9 * (1 + norm(a) * norm(b))
    assert elem_tensor(a + a2, b).allclose(elem_tensor(a, b) + elem_tensor(a2, b), 1e-12)
    assert elem_tensor(a, b + b2).allclose(elem_tensor(a, b) + elem_tensor(a, b2), 1e-12)
    assert (elem_tensor(a, b) @ elem_tensor(a2, b2)).allclose(elem_tensor(a @ a2, b @ b2), 1e-11)


@given(shapes, shapes, seeds)
def test_tensor_positivity_and_order(left, right, seed):
    rng = np.random.default_rng(seed)
    p, q = random_element(left, rng, "psd"), random_element(right, rng, "psd")
    assert is_positive(elem_tensor(p, q))
    b = random_element(left, rng, "hermitian")
    a = b + random_element(left, rng, "psd")
    assert leq(elem_tensor(b, q), elem_tensor(a, q))


def test_vector_tensor_examples():
    u = vector_tensor(ModuleVector.unit(L, 1, 0), ModuleVector.unit(R, 1, 0))
    assert u.allclose(ModuleVector.unit(product_shape(L, R), 1, 0))
    z = vector_tensor(ModuleVector.zeros(L, 2), random_vector(R, 3, 0))
    assert z.rank == 6 and z.allclose(ModuleVector.zeros(product_shape(L, R), 6))


@given(shapes, shapes, seeds)
def test_inner_product_multiplicative(left, right, seed):
    rng = np.random.default_rng(seed)
    x, x2 = random_vector(left, 2, rng), random_vector(left, 2, rng)
    y, y2 = random_vector(right, 1, rng), random_vector(right, 1, rng)
    lhs = inner_product(vector_tensor(x, y), vector_tensor(x2, y2))
    rhs = elem_tensor(inner_product(x, x2), inner_product(y, y2))
    assert lhs.allclose(rhs, 1e-10)


def test_op_tensor_examples():
    P = product_shape(L, R)
    assert op_tensor(AdjointableOperator.identity(L, 2), AdjointableOperator.identity(R, 1)).allclose(
        AdjointableOperator.identity(P, 2)
    )
    six = op_tensor(2 * AdjointableOperator.identity(L, 1), 3 * AdjointableOperator.identity(R, 2))
    assert six.allclose(6 * AdjointableOperator.identity(P, 2), 1e-15)


@given(shapes, shapes, seeds)
def test_op_tensor_on_elementary_tensors(left, right, seed):
    rng = np.random.default_rng(seed)
    S, T = random_operator(left, 2, 1, rng), random_operator(right, 1, 2, rng)
    x, y = random_vector(left, 2, rng), random_vector(right, 1, rng)
    lhs = apply(op_tensor(S, T), vector_tensor(x, y))
    assert lhs.allclose(vector_tensor(apply(S, x), apply(T, y)), 1e-10)


def test_family_tensor_examples():
    I_L = OperatorFamily((AdjointableOperator.identity(L, 1),))
    I_R = OperatorFamily((AdjointableOperator.identity(R, 1),))
    new, claimed, rep = family_tensor(I_L, ScalarBounds(1.0, 1.0), I_R, ScalarBounds(1.0, 1.0))
    P = product_shape(L, R)
    assert len(new) == 1 and new[0].allclose(AdjointableOperator.identity(P, 1))
    assert claimed.lower.allclose(AlgebraElement.identity(P)) and rep.valid

    one = AlgebraShape((1,))
    lam = OperatorFamily((AdjointableOperator.identity(one, 1),) * 2)
    s11 = AlgebraShape((1, 1))
    gam = OperatorFamily((AdjointableOperator.multiplication(AlgebraElement.central(s11, [1, 2])),))
    new, claimed, rep = family_tensor(lam, optimal_star_bounds(lam), gam, optimal_star_bounds(gam))
    assert frame_operator(new).coeff(0, 0).allclose(AlgebraElement.central(s11, [2, 8]))
    assert rep.valid


def test_q_tensor_examples():
    P = product_shape(L, R)
    fam = canonical_parseval(random_family(P, 2, 3, 0))
    new, claimed, rep = q_tensor_compose(fam, AdjointableOperator.identity(L, 2), R, "left_leg", ScalarBounds(1.0, 1.0))
    assert all(a.allclose(b, 1e-12) for a, b in zip(new, fam)) and rep.valid
    new, claimed, rep = q_tensor_compose(fam, 2 * AdjointableOperator.identity(R, 1), L, "right_leg", ScalarBounds(1.0, 1.0))
    assert op_norm(frame_operator(new) - 4 * AdjointableOperator.identity(P, 2)) <= 1e-10
    assert claimed.lower.allclose(2 * AlgebraElement.identity(P), 1e-12) and rep.valid


def test_q_tensor_errors():
    P = product_shape(L, R)
    fam = random_family(P, 2, 2, 1)
    with pytest.raises(NotInvertible):
        q_tensor_compose(fam, AdjointableOperator.zero(L, 1, 1), R, "left_leg", optimal_star_bounds(fam))
    with pytest.raises(ShapeError):
        q_tensor_compose(fam, AdjointableOperator.identity(L, 1), L, "left_leg", optimal_star_bounds(fam))
    with pytest.raises(ValueError):
        q_tensor_compose(fam, AdjointableOperator.identity(L, 1), R, "middle", optimal_star_bounds(fam))
