"""JSON scenes and reports.

Encoding conventions
--------------------
* complex number: ``[re, im]`` (a bare real number is also accepted);
* point or line: three complex numbers;
* conic: six complex coefficients ``[a, b, c, d, e, f]`` of
  ``ax^2 + bxy + cy^2 + dxz + eyz + fz^2``;
* member parameter: a bare number ``t`` means ``(1 : t)``; ``[lam, mu]``
  with real entries or ``[[re, im], [re, im]]`` give the pair explicitly;
* extended complex value: ``[re, im]`` or the string ``"inf"``.

A scene document looks like::

    {"pencil": {"conics": [C1, C2]}          # or {"base_points": [P, P, P, P]}
     "members": [m1, m2, m3, m4],
     "aux": {"point": P, "line": l, "conic": C, "labeling": [0, 1, 2, 3],
             "secant": l, "aux2": C, "aux3": C, "lines": [l, l, l, l]}}

Every key of ``aux`` is optional. ``line`` and ``conic`` are routed to the
methods whose preconditions they satisfy; ``secant``, ``aux2`` and
``aux3`` pin a specific method. Parse errors carry the JSON path of the
offending value (``$.pencil.conics[1][3]``) or the line/column of a
syntax error.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .conics import Conic
from .errors import SceneError
from .numeric import DEFAULT_TOL, INF, HomPair, Tolerance
from .pencil import Pencil, pencil_from_base_points, pencil_from_conics
from .projective import ProjLine, ProjPoint, _Homogeneous
from .xratio import AuxConfig, MethodResult, XRReport

__all__ = [
    "Scene",
    "parse_scene",
    "load_scene",
    "scene_to_json",
    "dumps",
    "encode",
    "encode_complex",
    "encode_ext",
    "report_to_json",
]

_AUX_POINTS = {"point"}
_AUX_LINES = {"line", "secant"}
_AUX_CONICS = {"conic", "aux2", "aux3"}
_AUX_KEYS = _AUX_POINTS | _AUX_LINES | _AUX_CONICS | {"labeling", "lines"}


# -- encoding -----------------------------------------------------------------


def _num(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x  # drop negative zero


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def encode_ext(z) -> list[float] | str:
    return "inf" if z is INF else encode_complex(z)


def encode(obj) -> Any:
    """Recursively turn domain objects into JSON-ready values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if obj is INF:
        return "inf"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, _Homogeneous):
        return [encode_complex(z) for z in obj.coords]
    if isinstance(obj, Conic):
        return [encode_complex(z) for z in obj.coeffs]
    if isinstance(obj, HomPair):
        return [encode_complex(obj.first), encode_complex(obj.second)]
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _is_leafy(x, depth: int = 3) -> bool:
    if isinstance(x, list):
        return depth > 0 and all(_is_leafy(v, depth - 1) for v in x)
    return not isinstance(x, dict)


def _format(x, indent: int) -> str:
    pad = "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_format(x[k], indent + 1)}" for k in sorted(x)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(x, list) and x and not _is_leafy(x):
        items = [pad + _format(v, indent + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return json.dumps(x, allow_nan=False, separators=(", ", ": "))


def dumps(doc) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats,
    numeric arrays (points, conics, parameters) kept on one line."""
    return _format(doc, 0) + "\n"


# -- decoding -----------------------------------------------------------------


def _fail(path: str, msg: str):
    raise SceneError(f"{path}: {msg}")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _complex(x, path: str) -> complex:
    if _is_number(x):
        z = complex(x)
    elif isinstance(x, list) and len(x) == 2 and all(_is_number(v) for v in x):
        z = complex(x[0], x[1])
    else:
        _fail(path, f"expected a number or [re, im], got {json.dumps(x)}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        _fail(path, "non-finite number")
    return z


def _vector(x, n: int, path: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != n:
        _fail(path, f"expected a list of {n} complex numbers")
    v = np.array([_complex(c, f"{path}[{i}]") for i, c in enumerate(x)])
    if not np.any(v):
        _fail(path, "zero vector")
    return v


def _point(x, path):
    return ProjPoint(_vector(x, 3, path))


def _line(x, path):
    return ProjLine(_vector(x, 3, path))


def _conic(x, path):
    return Conic(_vector(x, 6, path))


def _param(x, path) -> HomPair:
    if _is_number(x):
        return HomPair.of(float(x))
    if isinstance(x, list) and len(x) == 2:
        p = HomPair(_complex(x[0], f"{path}[0]"), _complex(x[1], f"{path}[1]"))
        if p.first == 0 and p.second == 0:
            _fail(path, "parameter pair (0:0)")
        return p
    _fail(path, f"expected t, [lam, mu] or [[re, im], [re, im]], got {json.dumps(x)}")


def _list(x, n: int | None, path: str) -> list:
    if not isinstance(x, list) or (n is not None and len(x) != n):
        _fail(path, f"expected a list of {n} entries" if n else "expected a list")
    return x


@dataclass
class Scene:
    """A pencil (given by two conics or four base points), optionally a
    quadruple of members, and auxiliary objects."""

    conics: tuple[Conic, Conic] | None = None
    base_points: tuple[ProjPoint, ...] | None = None
    members: tuple[HomPair, ...] | None = None
    aux: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if (self.conics is None) == (self.base_points is None):
            raise SceneError("$.pencil: give exactly one of 'conics' and 'base_points'")

    def pencil(self, tol: Tolerance = DEFAULT_TOL) -> Pencil:
        if self.conics is not None:
            return pencil_from_conics(*self.conics, tol=tol)
        return pencil_from_base_points(*self.base_points, tol=tol)

    def aux_config(self, F: Pencil) -> AuxConfig:
        a = self.aux
        cfg = AuxConfig.from_generic(
            F,
            point=a.get("point"),
            line=a.get("line"),
            conic=a.get("conic"),
            labeling=a.get("labeling"),
            lines=a.get("lines"),
        )
        if "secant" in a:
            cfg.secant_line = a["secant"]
        if "aux2" in a:
            cfg.aux2 = a["aux2"]
        if "aux3" in a:
            cfg.aux3 = a["aux3"]
        return cfg

    def to_json(self) -> dict:
        return scene_to_json(self)


def parse_scene(doc) -> Scene:
    """Build a :class:`Scene` from a decoded JSON document."""
    if not isinstance(doc, dict):
        _fail("$", "scene must be a JSON object")
    unknown = set(doc) - {"pencil", "members", "aux"}
    if unknown:
        _fail("$", f"unknown keys {sorted(unknown)}")
    if "pencil" not in doc:
        _fail("$", "missing 'pencil'")
    pen = doc["pencil"]
    if not isinstance(pen, dict) or len(pen) != 1 or next(iter(pen)) not in ("conics", "base_points"):
        _fail("$.pencil", "expected {'conics': [C1, C2]} or {'base_points': [P, P, P, P]}")
    conics = base = None
    if "conics" in pen:
        raw = _list(pen["conics"], 2, "$.pencil.conics")
        conics = tuple(_conic(c, f"$.pencil.conics[{i}]") for i, c in enumerate(raw))
    else:
        raw = _list(pen["base_points"], 4, "$.pencil.base_points")
        base = tuple(_point(p, f"$.pencil.base_points[{i}]") for i, p in enumerate(raw))

    members = None
    if doc.get("members") is not None:
        raw = _list(doc["members"], 4, "$.members")
        members = tuple(_param(m, f"$.members[{i}]") for i, m in enumerate(raw))

    aux: dict[str, Any] = {}
    raw_aux = doc.get("aux") or {}
    if not isinstance(raw_aux, dict):
        _fail("$.aux", "expected an object")
    for key, val in raw_aux.items():
        path = f"$.aux.{key}"
        if key not in _AUX_KEYS:
            _fail(path, f"unknown aux key (allowed: {sorted(_AUX_KEYS)})")
        if key in _AUX_POINTS:
            aux[key] = _point(val, path)
        elif key in _AUX_LINES:
            aux[key] = _line(val, path)
        elif key in _AUX_CONICS:
            aux[key] = _conic(val, path)
        elif key == "lines":
            aux[key] = [_line(l, f"{path}[{i}]") for i, l in enumerate(_list(val, 4, path))]
        elif key == "labeling":
            val = _list(val, 4, path)
            if all(isinstance(i, int) and not isinstance(i, bool) for i in val):
                if sorted(val) != [0, 1, 2, 3]:
                    _fail(path, "index labeling must be a permutation of 0..3")
                aux[key] = list(val)
            else:
                aux[key] = [_point(p, f"{path}[{i}]") for i, p in enumerate(val)]
    return Scene(conics=conics, base_points=base, members=members, aux=aux)


def load_scene(text: str) -> Scene:
    """Parse scene JSON text; syntax errors report line and column."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scene(doc)


def scene_to_json(scene: Scene) -> dict:
    doc: dict[str, Any] = {}
    if scene.conics is not None:
        doc["pencil"] = {"conics": encode(list(scene.conics))}
    else:
        doc["pencil"] = {"base_points": encode(list(scene.base_points))}
    if scene.members is not None:
        doc["members"] = encode(list(scene.members))
    if scene.aux:
        doc["aux"] = encode(scene.aux)
    return doc


# -- reports ------------------------------------------------------------------


def _method_json(r: MethodResult) -> dict:
    return {
        "value": None if r.value is None else encode_ext(r.value),
        "skipped": r.skipped,
        "aux": encode(r.aux),
        "diagnostics": encode(r.diagnostics),
    }


def report_to_json(report: XRReport, eps: float | None = None) -> dict:
    """XRReport as a JSON object; with ``eps`` the per-method deviation from
    the consensus and the overall agreement flag are included."""
    doc = {
        "methods": {name: _method_json(r) for name, r in report.methods.items()},
        "consensus": None if report.consensus is None else encode_ext(report.consensus),
        "max_pairwise_deviation": report.max_pairwise_deviation,
    }
    if eps is not None:
        devs = report.deviations()
        for name, d in devs.items():
            doc["methods"][name]["deviation"] = d
        doc["agree"] = report.agree(eps)
        doc["tolerance"] = eps
    return doc
