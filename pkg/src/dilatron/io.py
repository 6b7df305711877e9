"""JSON (de)serialization for every dilatron object.

All loaders validate structure, shapes and finiteness before returning and
raise :class:`~dilatron.errors.InputError` with a field path such as
``ops[1].data[0][2]``. Writers emit sorted keys and Python's shortest
round-trip float repr, so parse -> dump reproduces our own files byte for
byte.

Schemas::

    CMatrix      {"rows": n, "cols": m, "data": [[[re, im], ...], ...]}
    tuple        {"ops": [CMatrix, ...]}
    NDilation    {"h_dim": n, "order": N, "construction": "...", "unitaries": [CMatrix, ...]}
    polynomial   {"vars": k, "terms": [{"exps": [e1, ..., ek], "coef": [re, im]}, ...]}
    point        {"point": [[re, im], ...]}  (a bare list is accepted too)
    rule         {"order": N, "points": [[[re, im], ...k], ...m], "weights": [a1, ...]}
    certificate  rule + {"weight_ops": [CMatrix, ...]}
    CP map       {"dim": n, "kraus": [CMatrix, ...]} or {"dim": n, "unit_images": [CMatrix x n^2]}
"""

import json
import math
from pathlib import Path
from typing import Any, List, Union

import numpy as np

from .cpmap import CPMap
from .dilation import CONSTRUCTIONS, NDilation
from .errors import DilatronError, InputError
from .multi import ContractionTuple
from .polynomial import MultiPoly
from .spectral import CubatureRule, VNCertificate

PathLike = Union[str, Path]


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_json(path: PathLike) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _reject_constant(name):
    raise ValueError(f"non-finite literal {name} is not allowed")


def _complex_pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _real(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{path}: expected a number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"{path}: non-finite value")
    return x


def _int(x, path, minimum=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{path}: expected an integer")
    if minimum is not None and x < minimum:
        raise InputError(f"{path}: must be >= {minimum}")
    return x


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise InputError(f"{path or '<root>'}: expected an object")
    if key not in obj:
        raise InputError(f"{path + '.' if path else ''}{key}: missing field")
    return obj[key]


def _list(x, path, length=None) -> list:
    if not isinstance(x, list):
        raise InputError(f"{path}: expected a list")
    if length is not None and len(x) != length:
        raise InputError(f"{path}: expected {length} entries, got {len(x)}")
    return x


def _complex(x, path) -> complex:
    pair = _list(x, path, 2)
    return complex(_real(pair[0], f"{path}[0]"), _real(pair[1], f"{path}[1]"))


def _join(path, key):
    return f"{path}.{key}" if path else key


# CMatrix


def cmatrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[_complex_pair(z) for z in row] for row in a],
    }


def cmatrix_from_json(obj, path: str = "") -> np.ndarray:
    rows = _int(_field(obj, "rows", path), _join(path, "rows"), 1)
    cols = _int(_field(obj, "cols", path), _join(path, "cols"), 1)
    dpath = _join(path, "data")
    data = _list(_field(obj, "data", path), dpath, rows)
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        _list(row, f"{dpath}[{i}]", cols)
        for j, z in enumerate(row):
            out[i, j] = _complex(z, f"{dpath}[{i}][{j}]")
    return out


def _matrix_list(obj, key, path) -> List[np.ndarray]:
    lpath = _join(path, key)
    items = _list(_field(obj, key, path), lpath)
    if not items:
        raise InputError(f"{lpath}: must not be empty")
    return [cmatrix_from_json(x, f"{lpath}[{i}]") for i, x in enumerate(items)]


def _same_square(mats, path):
    n = mats[0].shape[0]
    for i, a in enumerate(mats):
        if a.shape != (n, n):
            raise InputError(f"{path}[{i}]: shape {a.shape} does not match {(n, n)}")


# tuples and dilations


def tuple_to_json(t) -> dict:
    ops = getattr(t, "ops", t)
    return {"ops": [cmatrix_to_json(a) for a in ops]}


def tuple_from_json(obj, path: str = "") -> ContractionTuple:
    ops = _matrix_list(obj, "ops", path)
    _same_square(ops, _join(path, "ops"))
    try:
        return ContractionTuple(tuple(ops))
    except DilatronError as exc:
        raise InputError(f"{_join(path, 'ops')}: {exc}") from exc


def dilation_to_json(dil: NDilation) -> dict:
    return {
        "h_dim": dil.h_dim,
        "order": dil.order,
        "construction": dil.construction,
        "unitaries": [cmatrix_to_json(u) for u in dil.unitaries],
    }


def dilation_from_json(obj, path: str = "") -> NDilation:
    h_dim = _int(_field(obj, "h_dim", path), _join(path, "h_dim"), 1)
    order = _int(_field(obj, "order", path), _join(path, "order"), 0)
    construction = obj.get("construction", "external")
    if construction not in CONSTRUCTIONS:
        raise InputError(f"{_join(path, 'construction')}: unknown value {construction!r}")
    us = _matrix_list(obj, "unitaries", path)
    _same_square(us, _join(path, "unitaries"))
    if h_dim > us[0].shape[0]:
        raise InputError(f"{_join(path, 'h_dim')}: exceeds dilation dimension {us[0].shape[0]}")
    return NDilation(tuple(us), h_dim=h_dim, order=order, construction=construction)


# polynomials and points


def poly_to_json(p: MultiPoly) -> dict:
    return {
        "vars": p.num_vars,
        "terms": [{"exps": list(e), "coef": _complex_pair(c)} for e, c in p.terms.items()],
    }


def poly_from_json(obj, path: str = "") -> MultiPoly:
    k = _int(_field(obj, "vars", path), _join(path, "vars"), 1)
    tpath = _join(path, "terms")
    terms = {}
    for i, term in enumerate(_list(_field(obj, "terms", path), tpath)):
        ipath = f"{tpath}[{i}]"
        exps = _list(_field(term, "exps", ipath), f"{ipath}.exps", k)
        exps = tuple(_int(e, f"{ipath}.exps[{j}]", 0) for j, e in enumerate(exps))
        coef = _complex(_field(term, "coef", ipath), f"{ipath}.coef")
        terms[exps] = terms.get(exps, 0) + coef
    return MultiPoly(k, terms)


def point_from_json(obj, path: str = "") -> np.ndarray:
    coords = obj if isinstance(obj, list) else _field(obj, "point", path)
    ppath = _join(path, "point") if not isinstance(obj, list) else (path or "point")
    coords = _list(coords, ppath)
    if not coords:
        raise InputError(f"{ppath}: must not be empty")
    return np.array([_complex(z, f"{ppath}[{i}]") for i, z in enumerate(coords)])


def point_to_json(t) -> dict:
    return {"point": [_complex_pair(complex(z)) for z in np.atleast_1d(t)]}


# cubature rules and certificates


def _points_to_json(points: np.ndarray) -> list:
    return [[_complex_pair(z) for z in row] for row in points]


def _points_from_json(obj, path) -> np.ndarray:
    ppath = _join(path, "points")
    rows = _list(_field(obj, "points", path), ppath)
    if not rows:
        raise InputError(f"{ppath}: must not be empty")
    k = len(_list(rows[0], f"{ppath}[0]"))
    return np.array(
        [[_complex(z, f"{ppath}[{i}][{j}]") for j, z in enumerate(_list(r, f"{ppath}[{i}]", k))]
         for i, r in enumerate(rows)]
    )


def rule_to_json(rule: CubatureRule) -> dict:
    return {
        "order": rule.order,
        "points": _points_to_json(rule.points),
        "weights": [float(a) for a in rule.weights],
    }


def rule_from_json(obj, path: str = "") -> CubatureRule:
    points = _points_from_json(obj, path)
    wpath = _join(path, "weights")
    weights = _list(_field(obj, "weights", path), wpath, points.shape[0])
    weights = np.array([_real(a, f"{wpath}[{i}]") for i, a in enumerate(weights)])
    order = _int(obj.get("order", 0), _join(path, "order"), 0)
    return CubatureRule(points, weights, order)


def certificate_to_json(cert: VNCertificate) -> dict:
    out = {
        "order": cert.order,
        "points": _points_to_json(cert.points),
        "weights": [float(np.trace(a).real) for a in cert.weights],
        "weight_ops": [cmatrix_to_json(a) for a in cert.weights],
    }
    return out


def certificate_from_json(obj, path: str = "") -> VNCertificate:
    points = _points_from_json(obj, path)
    ops = _matrix_list(obj, "weight_ops", path)
    _same_square(ops, _join(path, "weight_ops"))
    if len(ops) != points.shape[0]:
        raise InputError(f"{_join(path, 'weight_ops')}: expected {points.shape[0]} operators")
    order = _int(_field(obj, "order", path), _join(path, "order"), 0)
    return VNCertificate(points, np.array(ops), order)


# CP maps


def cpmap_to_json(phi: CPMap) -> dict:
    if phi.kraus is not None:
        return {"dim": phi.dim, "kraus": [cmatrix_to_json(a) for a in phi.kraus]}
    return {"dim": phi.dim, "unit_images": [cmatrix_to_json(a) for a in phi.unit_images()]}


def cpmap_from_json(obj, path: str = "") -> CPMap:
    n = _int(_field(obj, "dim", path), _join(path, "dim"), 1)
    if isinstance(obj, dict) and "kraus" in obj:
        ks = _matrix_list(obj, "kraus", path)
        for i, a in enumerate(ks):
            if a.shape != (n, n):
                raise InputError(f"{_join(path, 'kraus')}[{i}]: shape {a.shape} does not match dim {n}")
        return CPMap.from_kraus(ks)
    if isinstance(obj, dict) and "unit_images" in obj:
        imgs = _matrix_list(obj, "unit_images", path)
        if len(imgs) != n * n:
            raise InputError(f"{_join(path, 'unit_images')}: expected {n * n} images, got {len(imgs)}")
        for i, a in enumerate(imgs):
            if a.shape != (n, n):
                raise InputError(f"{_join(path, 'unit_images')}[{i}]: shape {a.shape} does not match dim {n}")
        return CPMap.from_unit_images(imgs, n)
    raise InputError(f"{path or '<root>'}: expected a 'kraus' or 'unit_images' field")
