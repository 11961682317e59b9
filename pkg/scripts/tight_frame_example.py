"""The geometric tight frame T_i = 2^-i I on M_2(C), i = 1..N.

    python3 scripts/tight_frame_example.py [--members 20]

Prints the exact frame constant sum 4^-i, the computed optimal bounds and
the outcome of the frame check.
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from starframes.algebra import AlgebraShape
from starframes.frames import OperatorFamily, ScalarBounds, frame_operator, optimal_scalar_bounds, verify
from starframes.operators import AdjointableOperator, op_norm


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description="geometric tight frame")
    p.add_argument("--members", type=int, default=20)
    n = p.parse_args(argv).members

    shape = AlgebraShape((2,))
    one = AdjointableOperator.identity(shape, 1)
    fam = OperatorFamily(tuple(2.0 ** -i * one for i in range(1, n + 1)))
    exact = sum(Fraction(1, 4**i) for i in range(1, n + 1))
    c = float(exact)

    a, b = optimal_scalar_bounds(fam)
    print(f"exact constant   {exact} = {c!r}")
    print(f"optimal bounds   a={a!r}  b={b!r}")
    print(f"||S - cI||       {op_norm(frame_operator(fam) - c * one):.3e}")
    print(f"verify (c, c)    {verify(fam, ScalarBounds(c, c)).verdict}")
    print(f"verify (c+1e-6)   {verify(fam, ScalarBounds(c + 1e-6, c + 1e-6)).verdict}")


if __name__ == "__main__":
    main()
