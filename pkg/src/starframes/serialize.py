"""JSON instance/report format.

Canonical form: UTF-8 JSON, keys sorted, no insignificant whitespace, floats
written with 17 significant digits (``-0`` normalised to ``0``), one trailing
newline.  Complex numbers are ``[re, im]`` pairs and matrices are row-major
lists of rows.

Objects::

    element   {"shape": [n_1, ...], "blocks": [matrix, ...]}
    vector    {"rank": m, "entries": [element, ...]}
    operator  {"dom_rank": m1, "cod_rank": m2, "coeffs": [[element, ...], ...]}
    family    {"algebra": [n_1, ...], "dom_rank": m, "members": [operator, ...]}
    bounds    {"type": "scalar", "lower": a, "upper": b}
            | {"type": "star", "lower": element, "upper": element}
    hom       {"source": [...], "target": [...], "multiplicity": [[...]],
               "twists": [matrix, ...]}
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, Tolerance
from .errors import StarFrameError
from .frames import FrameBounds, OperatorFamily, ScalarBounds, StarBounds
from .hilbert_module import ModuleVector
from .morphisms import StarHomomorphism
from .operators import AdjointableOperator

FORMAT = "starframes/instance-v1"


class FormatError(StarFrameError, ValueError):
    """Malformed instance file; ``path`` locates the offending object."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# canonical text


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise FormatError(f"non-finite number {x!r}")
    if x == 0:
        return "0"
    return format(x, ".17g")


def dumps(obj: Any) -> str:
    return _dump(obj) + "\n"


def _dump(obj: Any) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(str(k), ensure_ascii=False) + ":" + _dump(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def loads(text: str) -> Any:
    return json.loads(text)


# ---------------------------------------------------------------------------
# encoders


def matrix_to_json(M: np.ndarray) -> list:
    M = np.asarray(M, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def element_to_json(a: AlgebraElement) -> dict:
    return {"shape": list(a.shape.factor_dims), "blocks": [matrix_to_json(b) for b in a.blocks]}


def vector_to_json(x: ModuleVector) -> dict:
    return {"rank": x.rank, "entries": [element_to_json(e) for e in x.entries]}


def operator_to_json(T: AdjointableOperator) -> dict:
    return {
        "dom_rank": T.dom_rank,
        "cod_rank": T.cod_rank,
        "coeffs": [[element_to_json(c) for c in row] for row in T.coeffs],
    }


def family_to_json(fam: OperatorFamily) -> dict:
    return {
        "algebra": list(fam.shape.factor_dims),
        "dom_rank": fam.dom_rank,
        "members": [operator_to_json(T) for T in fam],
    }


def bounds_to_json(b: FrameBounds) -> dict:
    if isinstance(b, ScalarBounds):
        return {"type": "scalar", "lower": float(b.lower), "upper": float(b.upper)}
    return {"type": "star", "lower": element_to_json(b.lower), "upper": element_to_json(b.upper)}


def hom_to_json(phi: StarHomomorphism) -> dict:
    return {
        "source": list(phi.source.factor_dims),
        "target": list(phi.target.factor_dims),
        "multiplicity": [list(r) for r in phi.multiplicity],
        "twists": [matrix_to_json(U) for U in phi.twists],
    }


# ---------------------------------------------------------------------------
# decoders


def _get(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise FormatError("expected an object", path)
    if key not in obj:
        raise FormatError(f"missing key {key!r}", path)
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise FormatError(f"{key!r} has wrong type {type(val).__name__}", f"{path}.{key}")
    return val


def _int(val, path, minimum=1) -> int:
    if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
        raise FormatError(f"expected an integer >= {minimum}", path)
    return val


def shape_from_json(val, path) -> AlgebraShape:
    if not isinstance(val, list) or not val:
        raise FormatError("algebra shape must be a nonempty list", path)
    return AlgebraShape(tuple(_int(v, f"{path}[{i}]") for i, v in enumerate(val)))


def matrix_from_json(val, n, path) -> np.ndarray:
    if not isinstance(val, list) or len(val) != n:
        raise FormatError(f"expected {n} rows", path)
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(val):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError(f"expected {n} columns", f"{path}[{i}]")
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in z)
            ):
                raise FormatError("complex entries are [re, im] pairs", f"{path}[{i}][{j}]")
            out[i, j] = complex(float(z[0]), float(z[1]))
    return out


def element_from_json(val, path="$", shape: AlgebraShape | None = None) -> AlgebraElement:
    sh = shape_from_json(_get(val, "shape", path), f"{path}.shape")
    if shape is not None and sh != shape:
        raise FormatError(f"shape {list(sh.factor_dims)} differs from {list(shape.factor_dims)}", f"{path}.shape")
    blocks = _get(val, "blocks", path, list)
    if len(blocks) != sh.num_factors:
        raise FormatError(f"expected {sh.num_factors} blocks", f"{path}.blocks")
    return AlgebraElement(sh, [matrix_from_json(b, n, f"{path}.blocks[{k}]") for k, (b, n) in enumerate(zip(blocks, sh))])


def vector_from_json(val, path="$", shape: AlgebraShape | None = None) -> ModuleVector:
    m = _int(_get(val, "rank", path), f"{path}.rank", minimum=0)
    entries = _get(val, "entries", path, list)
    if len(entries) != m:
        raise FormatError(f"rank {m} but {len(entries)} entries", f"{path}.entries")
    elems = [element_from_json(e, f"{path}.entries[{j}]", shape) for j, e in enumerate(entries)]
    if not elems:
        if shape is None:
            raise FormatError("empty vector needs an algebra", path)
        return ModuleVector.zeros(shape, 0)
    first = elems[0].shape
    for j, e in enumerate(elems):
        if e.shape != first:
            raise FormatError("entries do not share a shape", f"{path}.entries[{j}]")
    return ModuleVector.from_entries(elems)


def operator_from_json(val, path="$", shape: AlgebraShape | None = None) -> AdjointableOperator:
    m1 = _int(_get(val, "dom_rank", path), f"{path}.dom_rank")
    m2 = _int(_get(val, "cod_rank", path), f"{path}.cod_rank")
    rows = _get(val, "coeffs", path, list)
    if len(rows) != m1:
        raise FormatError(f"expected {m1} coefficient rows", f"{path}.coeffs")
    coeffs = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m2:
            raise FormatError(f"expected {m2} coefficients", f"{path}.coeffs[{i}]")
        coeffs.append([element_from_json(c, f"{path}.coeffs[{i}][{j}]", shape) for j, c in enumerate(row)])
    sh = coeffs[0][0].shape
    for i, row in enumerate(coeffs):
        for j, c in enumerate(row):
            if c.shape != sh:
                raise FormatError("coefficient shapes differ", f"{path}.coeffs[{i}][{j}].shape")
    return AdjointableOperator.from_coeffs(coeffs)


def family_from_json(val, path="$") -> OperatorFamily:
    shape = shape_from_json(_get(val, "algebra", path), f"{path}.algebra")
    m = _int(_get(val, "dom_rank", path), f"{path}.dom_rank")
    members = _get(val, "members", path, list)
    if not members:
        raise FormatError("family must have at least one member", f"{path}.members")
    ops = []
    for i, T in enumerate(members):
        op = operator_from_json(T, f"{path}.members[{i}]", shape)
        if op.dom_rank != m:
            raise FormatError(f"domain rank {op.dom_rank} != family rank {m}", f"{path}.members[{i}].dom_rank")
        ops.append(op)
    return OperatorFamily(tuple(ops))


def bounds_from_json(val, path="$", shape: AlgebraShape | None = None) -> FrameBounds:
    kind = _get(val, "type", path, str)
    if kind == "scalar":
        lo, hi = _get(val, "lower", path), _get(val, "upper", path)
        for key, v in (("lower", lo), ("upper", hi)):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise FormatError("scalar bound must be a number", f"{path}.{key}")
        return ScalarBounds(float(lo), float(hi))
    if kind == "star":
        return StarBounds(
            element_from_json(_get(val, "lower", path), f"{path}.lower", shape),
            element_from_json(_get(val, "upper", path), f"{path}.upper", shape),
        )
    raise FormatError(f"unknown bounds type {kind!r}", f"{path}.type")


def hom_from_json(val, path="$") -> StarHomomorphism:
    src = shape_from_json(_get(val, "source", path), f"{path}.source")
    tgt = shape_from_json(_get(val, "target", path), f"{path}.target")
    mu = _get(val, "multiplicity", path, list)
    twists = _get(val, "twists", path, list)
    if len(twists) != tgt.num_factors:
        raise FormatError("one twist per target factor", f"{path}.twists")
    mats = [matrix_from_json(U, n, f"{path}.twists[{l}]") for l, (U, n) in enumerate(zip(twists, tgt))]
    for l, row in enumerate(mu):
        if not isinstance(row, list):
            raise FormatError("multiplicity rows must be lists", f"{path}.multiplicity[{l}]")
        for k, v in enumerate(row):
            _int(v, f"{path}.multiplicity[{l}][{k}]", minimum=0)
    try:
        return StarHomomorphism(src, tgt, tuple(tuple(r) for r in mu), mats)
    except StarFrameError as exc:
        raise FormatError(str(exc), path) from exc


def tolerance_from_json(val, path="$.tolerance") -> Tolerance:
    rel = _get(val, "rel", path)
    ab = _get(val, "abs", path)
    for key, v in (("rel", rel), ("abs", ab)):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0:
            raise FormatError("tolerance must be a nonnegative number", f"{path}.{key}")
    return Tolerance(float(rel), float(ab))


def tolerance_to_json(tol: Tolerance) -> dict:
    return {"rel": tol.rel, "abs": tol.abs}
