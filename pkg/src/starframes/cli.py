"""Command-line front end: ``verify``, ``analyze``, ``construct``, ``generate``.

Exit codes: 0 valid/success, 1 invalid verdict, 2 malformed input,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape, Tolerance, invert, norm
from .errors import NoLowerBound, StarFrameError
from .frames import (
    FrameBounds,
    OperatorFamily,
    ScalarBounds,
    StarBounds,
    VerificationReport,
    _require_valid,
    canonical_dual_type,
    canonical_parseval,
    compose_left,
    compose_right,
    frame_operator,
    frame_spectra,
    frame_transform,
    from_vector_frame,
    optimal_scalar_bounds,
    optimal_star_bounds,
    random_family,
    sampling_falsifier,
    scalar_to_star,
    verify,
)
from .hilbert_module import random_vector
from .morphisms import hom_apply
from .operators import AdjointableOperator, adjoint_op, compose, op_calculus, op_norm
from .serialize import (
    FORMAT,
    FormatError,
    bounds_from_json,
    bounds_to_json,
    dumps,
    element_to_json,
    family_from_json,
    family_to_json,
    hom_from_json,
    operator_from_json,
    operator_to_json,
    shape_from_json,
    tolerance_from_json,
    tolerance_to_json,
    vector_to_json,
)
from .tensor import TensorShape, family_tensor, lift, op_tensor, q_tensor_compose

EXIT_OK, EXIT_INVALID, EXIT_MALFORMED, EXIT_NUMERIC = 0, 1, 2, 3

DIRECTIVES = ("parseval", "dual", "compose_left", "compose_right", "tensor", "transport", "q_tensor")
GENERATE_KINDS = ("random", "near_parseval", "vector_frame")


class UsageError(Exception):
    pass


@dataclass
class Instance:
    raw: dict
    family: OperatorFamily
    bounds: Optional[FrameBounds]
    tol: Tolerance
    seed: int


def load_instance(path: str) -> Instance:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_instance(raw)


def parse_instance(raw: dict) -> Instance:
    if not isinstance(raw, dict):
        raise FormatError("instance must be an object")
    if "family" not in raw:
        raise FormatError("missing key 'family'")
    fam = family_from_json(raw["family"], "$.family")
    bounds = bounds_from_json(raw["bounds"], "$.bounds", fam.shape) if raw.get("bounds") is not None else None
    tol = tolerance_from_json(raw["tolerance"]) if "tolerance" in raw else DEFAULT_TOL
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise FormatError("seed must be a nonnegative integer", "$.seed")
    return Instance(raw, fam, bounds, tol, seed)


def make_instance(fam: OperatorFamily, bounds: Optional[FrameBounds], tol: Tolerance, seed: int, **extra) -> dict:
    out = {
        "format": FORMAT,
        "algebra": list(fam.shape.factor_dims),
        "family": family_to_json(fam),
        "tolerance": tolerance_to_json(tol),
        "seed": seed,
    }
    if bounds is not None:
        out["bounds"] = bounds_to_json(bounds)
    out.update(extra)
    return out


def _effective(inst: Instance, args) -> tuple[Tolerance, int]:
    tol = Tolerance(
        inst.tol.rel if args.tol_rel is None else args.tol_rel,
        inst.tol.abs if args.tol_abs is None else args.tol_abs,
    )
    seed = inst.seed if args.seed is None else args.seed
    return tol, seed


def _header(command: str, args, tol: Tolerance, seed: int) -> dict:
    echo = {"command": command, "instance": args.instance, "trials": args.trials}
    if getattr(args, "directive", None):
        echo["directive"] = args.directive
    return {"tool": "starframes", "version": __version__, "echo": echo, "seed": seed, "tolerance": tolerance_to_json(tol)}


def report_to_json(rep: VerificationReport) -> dict:
    out = {
        "verdict": rep.verdict,
        "side": rep.side,
        "margins": {k: list(v) for k, v in rep.margins.items()},
        "notes": list(rep.notes),
    }
    if rep.witness is not None:
        out["witness"] = vector_to_json(rep.witness)
        out["witness_side"] = rep.witness_side
        out["witness_defect"] = element_to_json(rep.witness_defect)
    return out


def _spectra(fam: OperatorFamily) -> list[list[float]]:
    return [[float(v) for v in ev] for ev in frame_spectra(fam)]


def _optimal(fam: OperatorFamily, tol: Tolerance) -> dict:
    a, b = optimal_scalar_bounds(fam, tol)
    out = {"scalar": {"lower": a, "upper": b}}
    try:
        out["star"] = bounds_to_json(optimal_star_bounds(fam, tol))
    except NoLowerBound as exc:
        out["star"] = None
        out["note"] = f"no lower bound: {exc}"
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_verify(inst: Instance, args) -> tuple[dict, int]:
    tol, seed = _effective(inst, args)
    if inst.bounds is None:
        raise FormatError("verify needs candidate bounds", "$.bounds")
    rep = verify(inst.family, inst.bounds, tol)
    hit = sampling_falsifier(inst.family, inst.bounds, seed, args.trials, tol)
    out = _header("verify", args, tol, seed)
    out.update(report_to_json(rep))
    out["spectra"] = _spectra(inst.family)
    fals = {"trials": args.trials, "found": hit is not None}
    if hit is not None:
        fals.update(trial=hit.trial, side=hit.side, witness=vector_to_json(hit.witness))
    out["falsifier"] = fals
    if rep.valid and hit is not None:
        out["cross_check"] = "disagree"
        return out, EXIT_INVALID
    out["cross_check"] = "confirmed" if (hit is not None) == (not rep.valid) else "witness-only"
    return out, EXIT_OK if rep.valid else EXIT_INVALID


def _sandwich(fam: OperatorFamily, bounds: Optional[FrameBounds], tol: Tolerance) -> dict:
    """``||A^{-1}||^{-2} <= ||S|| <= ||B||^2`` for the given (or optimal) bounds."""
    source = "declared"
    if bounds is None or not verify(fam, bounds, tol).valid:
        source = "optimal"
        try:
            bounds = optimal_star_bounds(fam, tol)
        except NoLowerBound:
            return {"source": "none", "holds": False}
    star = scalar_to_star(bounds, fam.shape) if isinstance(bounds, ScalarBounds) else bounds
    lo = norm(invert(star.lower, tol)) ** -2
    hi = norm(star.upper) ** 2
    s = op_norm(frame_operator(fam))
    scale = tol.scale(max(s, hi))
    return {"source": source, "lower": lo, "norm_S": s, "upper": hi, "holds": bool(lo <= s + scale and s <= hi + scale)}


def cmd_analyze(inst: Instance, args) -> tuple[dict, int]:
    tol, seed = _effective(inst, args)
    fam = inst.family
    S = frame_operator(fam)
    out = _header("analyze", args, tol, seed)
    out.update(
        frame_operator=operator_to_json(S),
        spectra=_spectra(fam),
        optimal=_optimal(fam, tol),
        norm_R=op_norm(frame_transform(fam)),
        norm_S=op_norm(S),
        sandwich=_sandwich(fam, inst.bounds, tol),
    )
    return out, EXIT_OK


def _input_star(inst: Instance, tol: Tolerance) -> StarBounds:
    if inst.bounds is None:
        return optimal_star_bounds(inst.family, tol)
    b = inst.bounds
    return scalar_to_star(b, inst.family.shape) if isinstance(b, ScalarBounds) else b


def _directive_args(inst: Instance, name: str) -> dict:
    d = inst.raw.get("directives", {}).get(name)
    if d is None:
        raise FormatError(f"directive {name!r} is not declared", "$.directives")
    return d


def cmd_construct(inst: Instance, args) -> tuple[dict, int, dict]:
    tol, seed = _effective(inst, args)
    name = args.directive
    if name not in DIRECTIVES:
        raise UsageError(f"--directive must be one of {', '.join(DIRECTIVES)}")
    fam = inst.family
    star = _input_star(inst, tol)
    _require_valid(fam, star, tol)
    S = frame_operator(fam)
    checks: dict = {}
    extra: dict = {}
    path = f"$.directives.{name}"

    if name == "parseval":
        new = canonical_parseval(fam, tol)
        claimed = StarBounds(AlgebraElement.identity(fam.shape), AlgebraElement.identity(fam.shape))
        checks["residual_S_minus_I"] = op_norm(frame_operator(new) - AdjointableOperator.identity(fam.shape, fam.dom_rank))
    elif name == "dual":
        S_inv = op_calculus(S, "inv", tol)
        new, claimed, _ = compose_right(fam, S_inv, star, tol)
        alt = canonical_dual_type(fam, tol)
        checks["residual_S_minus_S_inv"] = op_norm(frame_operator(new) - S_inv)
        checks["matches_canonical_dual"] = all(a.allclose(b, 1e-12) for a, b in zip(new, alt))
    elif name in ("compose_left", "compose_right"):
        d = _directive_args(inst, name)
        theta = operator_from_json(d.get("theta"), f"{path}.theta", fam.shape)
        fn = compose_right if name == "compose_right" else compose_left
        new, claimed, _ = fn(fam, theta, star, tol)
        if name == "compose_right":
            expect = compose(adjoint_op(theta), compose(S, theta))
            checks["residual_S_minus_thetaStarSTheta"] = op_norm(frame_operator(new) - expect)
    elif name == "tensor":
        d = _directive_args(inst, name)
        other = family_from_json(d.get("family"), f"{path}.family")
        ob = d.get("bounds")
        other_bounds = bounds_from_json(ob, f"{path}.bounds", other.shape) if ob is not None else optimal_star_bounds(other, tol)
        new, claimed, _ = family_tensor(fam, star, other, other_bounds, tol)
        expect = op_tensor(S, frame_operator(other))
        checks["residual_S_minus_tensor"] = op_norm(frame_operator(new) - expect)
        extra["provenance"] = [list(p) for p in TensorShape(fam.shape, other.shape).provenance]
    elif name == "q_tensor":
        d = _directive_args(inst, name)
        left = shape_from_json(d.get("left"), f"{path}.left")
        right = shape_from_json(d.get("right"), f"{path}.right")
        side = d.get("side", "left_leg")
        if side not in ("left_leg", "right_leg"):
            raise FormatError("side must be left_leg or right_leg", f"{path}.side")
        q_shape, other = (left, right) if side == "left_leg" else (right, left)
        Q = operator_from_json(d.get("Q"), f"{path}.Q", q_shape)
        new, claimed, _ = q_tensor_compose(fam, Q, other, side, star, tol)
        L = lift(Q, other, fam.dom_rank // Q.dom_rank, side)
        expect = compose(L, compose(S, adjoint_op(L)))
        checks["residual_S_minus_QSQstar"] = op_norm(frame_operator(new) - expect)
        extra["provenance"] = [list(p) for p in TensorShape(left, right).provenance]
    else:  # transport
        from .morphisms import transport_family

        d = _directive_args(inst, name)
        phi = hom_from_json(d.get("homomorphism"), f"{path}.homomorphism")
        new, claimed, _ = transport_family(phi, fam, star, tol)
        checks["phi_lower"] = element_to_json(hom_apply(phi, star.lower))

    rep = verify(new, claimed, tol)
    out = _header("construct", args, tol, seed)
    out.update(report_to_json(rep))
    out.update(
        claimed=bounds_to_json(claimed),
        checks=checks,
        spectra=_spectra(new),
        optimal=_optimal(new, tol),
        **extra,
    )
    constructed = make_instance(new, claimed, tol, seed, **extra)
    return out, EXIT_OK if rep.valid else EXIT_INVALID, constructed


def cmd_generate(shape: AlgebraShape, m: int, N: int, seed: int, kind: str, tol: Tolerance = DEFAULT_TOL) -> dict:
    rng = np.random.default_rng(seed)
    extra = {"generator": {"kind": kind, "rank": m, "members": N}}
    if kind == "vector_frame":
        for _ in range(100):
            xs = [random_vector(shape, m, rng) for _ in range(N)]
            fam = from_vector_frame(xs)
            if min(ev[0] for ev in frame_spectra(fam)) >= 0.1:
                break
        else:  # pragma: no cover
            raise StarFrameError("could not generate a vector frame with lambda_min >= 0.1")
        extra["vectors"] = [vector_to_json(x) for x in xs]
    elif kind in ("random", "near_parseval"):
        fam = random_family(shape, m, N, rng, kind=kind)
    else:
        raise UsageError(f"--kind must be one of {', '.join(GENERATE_KINDS)}")
    return make_instance(fam, optimal_star_bounds(fam, tol), tol, seed, **extra)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starframes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"starframes {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_instance=True):
        if needs_instance:
            sp.add_argument("--instance", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        sp.add_argument("--tol-rel", type=float, default=None)
        sp.add_argument("--tol-abs", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--trials", type=int, default=10_000)
        sp.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte determinism)")

    common(sub.add_parser("verify", help="decide the frame inequality for declared bounds"))
    common(sub.add_parser("analyze", help="frame operator, spectra and optimal bounds"))
    c = sub.add_parser("construct", help="build a new family from a theorem")
    common(c)
    c.add_argument("--directive", required=True, choices=DIRECTIVES)
    c.add_argument("--report", metavar="PATH", help="write the report here (default stdout)")
    g = sub.add_parser("generate", help="seeded random instance")
    common(g, needs_instance=False)
    g.add_argument("--shape", required=True, help="comma-separated factor sizes, e.g. 2,3")
    g.add_argument("--rank", type=int, default=1)
    g.add_argument("--members", type=int, default=3)
    g.add_argument("--kind", choices=GENERATE_KINDS, default="random")
    return p


def _write(text: str, dest: Optional[str]):
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "generate":
            try:
                shape = AlgebraShape(tuple(int(s) for s in args.shape.split(",")))
            except ValueError as exc:
                raise UsageError(f"bad --shape {args.shape!r}") from exc
            if args.rank < 1 or args.members < 1:
                raise UsageError("--rank and --members must be positive")
            tol = Tolerance(
                DEFAULT_TOL.rel if args.tol_rel is None else args.tol_rel,
                DEFAULT_TOL.abs if args.tol_abs is None else args.tol_abs,
            )
            inst = cmd_generate(shape, args.rank, args.members, args.seed or 0, args.kind, tol)
            _write(dumps(inst), args.out)
            return EXIT_OK
        inst = load_instance(args.instance)
        if args.command == "verify":
            report, code = cmd_verify(inst, args)
        elif args.command == "analyze":
            report, code = cmd_analyze(inst, args)
        else:
            report, code, constructed = cmd_construct(inst, args)
            if args.out:
                _write(dumps(constructed), args.out)
        if args.timing:
            report["timing_s"] = time.perf_counter() - t0
        dest = args.report if args.command == "construct" else args.out
        _write(dumps(report), dest)
        return code
    except (FormatError, UsageError, OSError) as exc:
        print(f"starframes: error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except np.linalg.LinAlgError as exc:
        print(f"starframes: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StarFrameError as exc:
        print(f"starframes: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
