"""Cross-check the exact frame-inequality decision against random sampling.

    python3 scripts/cross_validate.py [--instances 240] [--trials 10000] [--seed 5]

For each random instance the bounds are decided with ``verify``.  A valid
verdict must survive the sampling falsifier; an invalid one must come with a
witness whose directly evaluated defect is negative.  Exits 1 on any
disagreement.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import dataclass

import numpy as np

from starframes.algebra import AlgebraElement, AlgebraShape, random_element
from starframes.frames import StarBounds, evaluate_defect, optimal_star_bounds, random_family, sampling_falsifier, verify

SHAPES = [AlgebraShape(s) for s in ((2,), (2, 1), (1, 2), (3,), (1, 1))]
KINDS = [
    "optimal", "loose", "lower_too_big", "upper_too_small",
    "central_random", "noncentral_lower", "noncentral_upper", "general",
]


@dataclass(frozen=True)
class Config:
    instances: int = 240
    trials: int = 10_000
    seed: int = 5
    witness_margin: float = 1e-12


def candidate(fam, rng, kind):
    opt = optimal_star_bounds(fam)
    shape = fam.shape
    if kind == "optimal":
        return opt
    if kind == "loose":
        return StarBounds(0.9 * opt.lower, 1.1 * opt.upper)
    if kind == "lower_too_big":
        return StarBounds(1.05 * opt.lower, opt.upper)
    if kind == "upper_too_small":
        return StarBounds(opt.lower, 0.95 * opt.upper)
    if kind == "central_random":
        lo = AlgebraElement.central(shape, rng.uniform(0.2, 1.5, shape.num_factors))
        hi = AlgebraElement.central(shape, rng.uniform(1.0, 5.0, shape.num_factors))
        return StarBounds(lo, hi)
    if kind == "noncentral_lower":
        return StarBounds(0.5 * opt.lower + 0.3 * random_element(shape, rng, "invertible"), opt.upper)
    if kind == "noncentral_upper":
        return StarBounds(0.5 * opt.lower, 2 * opt.upper + 0.3 * random_element(shape, rng, "invertible"))
    return StarBounds(random_element(shape, rng, "invertible"), 3 * random_element(shape, rng, "invertible"))


def run(cfg: Config) -> int:
    rng = np.random.default_rng(cfg.seed)
    tally = Counter()
    bad = []
    for idx in range(cfg.instances):
        shape = SHAPES[idx % len(SHAPES)]
        fam = random_family(shape, int(rng.integers(1, 3)), int(rng.integers(1, 4)), rng)
        kind = KINDS[idx % len(KINDS)]
        bounds = candidate(fam, rng, kind)
        rep = verify(fam, bounds)
        tally[(kind, rep.verdict)] += 1
        if rep.valid:
            hit = sampling_falsifier(fam, bounds, seed=idx, trials=cfg.trials)
            if hit is not None:
                bad.append(f"#{idx} {kind}: valid verdict falsified at trial {hit.trial}")
        else:
            d = evaluate_defect(fam, bounds, rep.witness_side, rep.witness)
            worst = min(float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in d.blocks)
            if worst > -cfg.witness_margin:
                bad.append(f"#{idx} {kind}: witness defect only {worst:.3g}")

    for kind in KINDS:
        print(f"{kind:18s} valid={tally[(kind, 'valid')]:3d}  invalid={tally[(kind, 'invalid')]:3d}")
    for line in bad:
        print(line)
    print(f"{cfg.instances} instances, {len(bad)} disagreements")
    return 1 if bad else 0


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=Config.instances)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args(argv)
    return run(Config(a.instances, a.trials, a.seed))


if __name__ == "__main__":
    sys.exit(main())
