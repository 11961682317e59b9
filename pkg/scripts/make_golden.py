"""Regenerate the golden instance corpus under tests/golden/.

    python3 scripts/make_golden.py [--out tests/golden]

Every file is produced from fixed seeds, so rerunning is a no-op unless
the generators change.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from starframes.algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape
from starframes.cli import cmd_generate, make_instance
from starframes.frames import OperatorFamily, ScalarBounds, StarBounds, optimal_star_bounds, random_family
from starframes.morphisms import StarHomomorphism
from starframes.operators import AdjointableOperator, random_operator
from starframes.serialize import (
    dumps,
    family_to_json,
    hom_to_json,
    operator_to_json,
)


def desk_pair():
    """``{(1,2)}`` on ``C (+) C`` and ``{1, 1}`` on ``C``."""
    s11 = AlgebraShape((1, 1))
    fam = OperatorFamily((AdjointableOperator.multiplication(AlgebraElement.central(s11, [1, 2])),))
    s1 = AlgebraShape((1,))
    one = AdjointableOperator.identity(s1, 1)
    other = OperatorFamily((one, one))
    return fam, other


def corpus() -> dict[str, dict]:
    tol = DEFAULT_TOL
    out = {}

    fam, other = desk_pair()
    a = AlgebraElement.central(fam.shape, [1, 2])
    out["desk_c2"] = make_instance(
        fam,
        StarBounds(a, a),
        tol,
        0,
        directives={
            "tensor": {"family": family_to_json(other), "bounds": {"type": "scalar", "lower": 2.0, "upper": 2.0}},
            "transport": {"homomorphism": hom_to_json(StarHomomorphism.selection(fam.shape, [0]))},
            "parseval": {},
        },
    )

    s2 = AlgebraShape((2,))
    out["parseval_identity"] = make_instance(
        OperatorFamily((AdjointableOperator.identity(s2, 1),)), ScalarBounds(1.0, 1.0), tol, 0
    )
    out["zero_family"] = make_instance(
        OperatorFamily((AdjointableOperator.zero(s2, 1, 1),)), ScalarBounds(1.0, 1.0), tol, 0
    )

    tight = OperatorFamily(tuple(2.0 ** -i * AdjointableOperator.identity(s2, 1) for i in range(1, 21)))
    c = sum(4.0 ** -i for i in range(1, 21))
    out["tight_geometric"] = make_instance(tight, ScalarBounds(c, c), tol, 0)

    rng = np.random.default_rng(20240601)
    shape = AlgebraShape((2, 1))
    fam = random_family(shape, 2, 3, rng)
    star = optimal_star_bounds(fam, tol)
    lo = star.lower.blocks
    noncentral = AlgebraElement(shape, [lo[0] + np.array([[0, 0.3], [0, 0]]), lo[1]])
    out["noncentral_lower"] = make_instance(fam, StarBounds(noncentral, star.upper), tol, 11)

    q_shape = AlgebraShape((1, 2))
    q = random_operator(q_shape, 1, 1, rng, kind="invertible")
    prod = AlgebraShape((2, 4))  # [2] x [1,2]
    out["random_star"] = make_instance(
        fam,
        star,
        tol,
        5,
        directives={
            "compose_right": {"theta": operator_to_json(random_operator(shape, 1, 2, rng, kind="injective"))},
            "compose_left": {"theta": operator_to_json(random_operator(shape, 2, 2, rng, kind="invertible"))},
            "dual": {},
            "parseval": {},
        },
    )
    qfam = random_family(prod, 1, 3, rng)
    out["q_tensor"] = make_instance(
        qfam,
        optimal_star_bounds(qfam, tol),
        tol,
        3,
        directives={"q_tensor": {"left": [2], "right": [1, 2], "side": "right_leg", "Q": operator_to_json(q)}},
    )

    out["near_parseval"] = cmd_generate(AlgebraShape((2, 3)), 2, 5, 42, "near_parseval", tol)
    out["vector_frame"] = cmd_generate(AlgebraShape((3,)), 1, 4, 9, "vector_frame", tol)
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "golden"))
    args = p.parse_args(argv)
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    for name, inst in corpus().items():
        (dest / f"{name}.json").write_text(dumps(inst), encoding="utf-8")
        print(f"wrote {dest / name}.json")


if __name__ == "__main__":
    main()
