"""SVG figures of real pencils.

The real affine locus of each real member is drawn in a window of the
plane ``z = 1``. Conics are put in principal axes (eigen-decomposition of
the quadratic part) and parametrized accordingly -- ellipses by angle,
hyperbola branches by ``cosh/sinh``, parabolas by the coordinate along the
axis -- then sampled adaptively until every chord is within half a pixel
of the curve, and clipped to the window. Degenerate members are drawn as
their real lines.

Points at infinity cannot be placed in the window; they are drawn on the
window edge in their direction, with the extra class ``at-infinity``.
Output is fully deterministic: fixed drawing order and ``%.3f`` numbers.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .conics import Conic, _line_basis, conic_rank, second_intersection, split_degenerate
from .errors import GeometryError, NotRenderable
from .numeric import DEFAULT_TOL, HomPair, Tolerance, adjugate3
from .pencil import Pencil, conjugate_point
from .projective import ProjLine, ProjPoint, _coords, incidence_residual
from .xratio import xr_aux_conic_two_base

__all__ = ["Window", "classify_conic", "render_pencil", "render_scene", "real_locus"]

Window = tuple[float, float, float, float]

# chord-to-curve tolerance in device pixels
PIXEL_TOL = 0.5
_MAX_DEPTH = 18
_INITIAL_SEGMENTS = 64


# -- real conics ----------------------------------------------------------------


def _real(v, tol: Tolerance) -> np.ndarray | None:
    v = np.asarray(v, dtype=complex)
    if np.abs(v.imag).max() > tol.residual_eps * max(1.0, np.abs(v).max()):
        return None
    return v.real.copy()


def _real_matrix(C: Conic, tol: Tolerance) -> np.ndarray | None:
    # canonical scaling makes a real conic's coefficients real
    c = _real(C.coeffs, tol)
    if c is None:
        return None
    a, b, cc, d, e, f = c
    return np.array([[a, b / 2, d / 2], [b / 2, cc, e / 2], [d / 2, e / 2, f]])


def _principal(M: np.ndarray):
    """Eigen-decomposition of the quadratic part, eigenvalues sorted by
    decreasing modulus."""
    lam, R = np.linalg.eigh(M[:2, :2])
    order = np.argsort(-np.abs(lam))
    return lam[order], R[:, order]


def classify_conic(C: Conic, tol: Tolerance = DEFAULT_TOL) -> str:
    """Affine type of a conic.

    One of ``"complex"`` (no real representative), ``"ellipse"``,
    ``"imaginary ellipse"``, ``"hyperbola"``, ``"parabola"``,
    ``"line pair"``, ``"parallel lines"``, ``"conjugate line pair"``
    (a single real point) or ``"double line"``.
    """
    M = _real_matrix(C, tol)
    if M is None:
        return "complex"
    rank = conic_rank(C, tol)
    if rank == 1:
        return "double line"
    if rank == 2:
        l, m = split_degenerate(C, tol)
        if _real(l.coords, tol) is None:
            return "conjugate line pair"
        la, ma = l.coords.real, m.coords.real
        if abs(la[0] * ma[1] - la[1] * ma[0]) <= tol.residual_eps:
            return "parallel lines"
        return "line pair"
    lam, _ = _principal(M)
    if abs(lam[1]) <= tol.residual_eps * abs(lam[0]):
        return "parabola"
    if lam[0] * lam[1] < 0:
        return "hyperbola"
    # definite quadratic part: real iff the constant after centering has the opposite sign
    center = np.linalg.solve(M[:2, :2], -M[:2, 2])
    const = M[2, 2] + M[:2, 2] @ center
    return "ellipse" if const * lam[0] < 0 else "imaginary ellipse"


# -- device geometry --------------------------------------------------------------


class _Canvas:
    def __init__(self, window: Window, width: int):
        x0, y0, x1, y1 = (float(v) for v in window)
        if not (x1 > x0 and y1 > y0):
            raise ValueError("window must satisfy x0 < x1 and y0 < y1")
        if width < 1:
            raise ValueError("width must be positive")
        self.x0, self.y0, self.x1, self.y1 = x0, y0, x1, y1
        self.width = int(width)
        self.height = max(1, int(round(width * (y1 - y0) / (x1 - x0))))
        self.sx = self.width / (x1 - x0)
        self.sy = self.height / (y1 - y0)

    def dev(self, x: float, y: float) -> tuple[float, float]:
        return (x - self.x0) * self.sx, (self.y1 - y) * self.sy

    @property
    def center(self) -> tuple[float, float]:
        return (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2

    def radius_from(self, c) -> float:
        """Largest distance from ``c`` to a window corner."""
        return max(math.hypot(x - c[0], y - c[1]) for x in (self.x0, self.x1) for y in (self.y0, self.y1))

    def inside_dev(self, p, margin: float = 0.0) -> bool:
        return -margin <= p[0] <= self.width + margin and -margin <= p[1] <= self.height + margin


def _clip(p, q, w: float, h: float):
    """Liang-Barsky clipping of segment ``pq`` to ``[0,w] x [0,h]``."""
    t0, t1 = 0.0, 1.0
    dx, dy = q[0] - p[0], q[1] - p[1]
    for pk, qk in ((-dx, p[0]), (dx, w - p[0]), (-dy, p[1]), (dy, h - p[1])):
        if pk == 0:
            if qk < 0:
                return None
            continue
        r = qk / pk
        if pk < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return None
    return (p[0] + t0 * dx, p[1] + t0 * dy), (p[0] + t1 * dx, p[1] + t1 * dy)


def _runs(points: Sequence, cv: _Canvas) -> list[list]:
    """Split a device polyline into clipped runs inside the canvas."""
    runs: list[list] = []
    cur: list = []
    for p, q in zip(points, points[1:]):
        if not all(map(math.isfinite, (*p, *q))):
            cur = []
            continue
        seg = _clip(p, q, cv.width, cv.height)
        if seg is None:
            if cur:
                runs.append(cur)
            cur = []
            continue
        a, b = seg
        if cur and cur[-1] == a:
            cur.append(b)
        else:
            if cur:
                runs.append(cur)
            cur = [a, b]
        if b != q:  # left the window
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return [r for r in runs if len(r) >= 2 and any(q != r[0] for q in r)]


def _sample(fn: Callable[[float], tuple[float, float]], s0: float, s1: float, cv: _Canvas) -> list:
    """Adaptive sampling of a parametric curve in device space."""
    ts = np.linspace(s0, s1, _INITIAL_SEGMENTS + 1)
    pts = [cv.dev(*fn(t)) for t in ts]
    out = [pts[0]]
    for i in range(_INITIAL_SEGMENTS):
        stack = [(ts[i], pts[i], ts[i + 1], pts[i + 1], 0)]
        seg = []
        while stack:
            a, pa, b, pb, depth = stack.pop()
            m = 0.5 * (a + b)
            pm = cv.dev(*fn(m))
            dev = math.hypot(pm[0] - 0.5 * (pa[0] + pb[0]), pm[1] - 0.5 * (pa[1] + pb[1]))
            # only refine pieces that may come near the window
            reach = dev + math.hypot(pb[0] - pa[0], pb[1] - pa[1])
            near = cv.inside_dev(pm, reach) or cv.inside_dev(pa, reach) or cv.inside_dev(pb, reach)
            if depth < _MAX_DEPTH and near and dev > PIXEL_TOL:
                # push right half first so the left half is emitted first
                stack.append((m, pm, b, pb, depth + 1))
                stack.append((a, pa, m, pm, depth + 1))
            else:
                seg.append(pb)
        out.extend(seg)
    return out


def _line_runs(l, cv: _Canvas, tol: Tolerance) -> list[list]:
    v = _real(_coords(l), tol)
    if v is None:
        return []
    a, b, c = v
    n = math.hypot(a, b)
    if n <= tol.residual_eps * abs(c):
        return []  # line at infinity
    cx, cy = cv.center
    t = -(a * cx + b * cy + c) / n**2
    foot = (cx + a * t, cy + b * t)
    R = cv.radius_from(foot) + 1.0
    p = cv.dev(foot[0] - b / n * R, foot[1] + a / n * R)
    q = cv.dev(foot[0] + b / n * R, foot[1] - a / n * R)
    seg = _clip(p, q, cv.width, cv.height)
    return [list(seg)] if seg is not None and seg[0] != seg[1] else []


def real_locus(C: Conic, cv: _Canvas, tol: Tolerance = DEFAULT_TOL) -> list[list]:
    """Device-space polylines of the real affine locus of ``C`` in the window."""
    M = _real_matrix(C, tol)
    if M is None:
        return []
    rank = conic_rank(C, tol)
    if rank < 3:
        l, m = split_degenerate(C, tol)
        runs = _line_runs(l, cv, tol)
        if rank == 2 and not l.same(m, tol):
            runs += _line_runs(m, cv, tol)
        return runs

    lam, R = _principal(M)
    b = M[:2, 2]
    f = M[2, 2]
    curves: list[tuple[Callable, float, float]] = []
    if abs(lam[1]) <= tol.residual_eps * abs(lam[0]):
        # parabola: lam0*u^2 + 2*b0*u + 2*b1*v + f = 0 in axis coordinates
        bu, bv = R.T @ b
        l0 = lam[0]

        def fn(u, l0=l0, bu=bu, bv=bv):
            v = -(l0 * u * u + 2 * bu * u + f) / (2 * bv)
            p = R @ np.array([u, v])
            return p[0], p[1]

        u0 = -bu / l0
        vertex = fn(u0)
        span = cv.radius_from(vertex) + 1.0
        curves.append((fn, u0 - span, u0 + span))
    else:
        c = np.linalg.solve(M[:2, :2], -b)
        const = f + b @ c
        ra, rb = -const / lam[0], -const / lam[1]
        if ra > 0 and rb > 0:
            A, B = math.sqrt(ra), math.sqrt(rb)

            def fn(t, A=A, B=B):
                p = c + R @ np.array([A * math.cos(t), B * math.sin(t)])
                return p[0], p[1]

            curves.append((fn, 0.0, 2 * math.pi))
        elif ra * rb < 0:
            # transverse axis along the positive one
            if ra > 0:
                A, B, Rt = math.sqrt(ra), math.sqrt(-rb), R
            else:
                A, B, Rt = math.sqrt(rb), math.sqrt(-ra), R[:, ::-1]
            S = math.asinh((cv.radius_from(c) + 1.0) / B)
            for sign in (1.0, -1.0):

                def fn(s, sign=sign, A=A, B=B, Rt=Rt):
                    p = c + Rt @ np.array([sign * A * math.cosh(s), B * math.sinh(s)])
                    return p[0], p[1]

                curves.append((fn, -S, S))
    runs = []
    for fn, s0, s1 in curves:
        runs += _runs(_sample(fn, s0, s1, cv), cv)
    return runs


# -- SVG assembly ---------------------------------------------------------------


def _f(x: float) -> str:
    s = "%.3f" % x
    return "0.000" if s == "-0.000" else s


def _path_d(runs: Iterable[list]) -> str:
    parts = []
    for run in runs:
        head, *rest = run
        parts.append("M" + _f(head[0]) + " " + _f(head[1]) + "".join(" L" + _f(x) + " " + _f(y) for x, y in rest))
    return " ".join(parts)


_STYLE = """
    .frame { fill: white; stroke: #888; stroke-width: 1 }
    .axis { stroke: #ccc; stroke-width: 0.5 }
    .member { fill: none; stroke: #1f4e9c; stroke-width: 1.2 }
    .aux-conic { fill: none; stroke: #b35900; stroke-width: 1; stroke-dasharray: 4 2 }
    .aux-line, .polar, .secant { fill: none; stroke: #777; stroke-width: 0.8; stroke-dasharray: 2 2 }
    .base-point { fill: #c00; stroke: black; stroke-width: 0.5 }
    .double-point { fill: #2a2; stroke: black; stroke-width: 0.5 }
    .aux-point, .pole, .secant-point, .conjugate-point, .concurrency-point { fill: #fa0; stroke: black; stroke-width: 0.5 }
    .at-infinity { fill-opacity: 0.4 }
"""


class _SVG:
    def __init__(self, cv: _Canvas, tol: Tolerance):
        self.cv, self.tol = cv, tol
        self.items: list[str] = []

    def path(self, runs, cls: str) -> bool:
        d = _path_d(runs)
        if d:
            self.items.append(f'  <path class="{cls}" d="{d}"/>')
        return bool(d)

    def line(self, l, cls: str):
        self.path(_line_runs(l, self.cv, self.tol), cls)

    def _place(self, P) -> tuple[tuple[float, float], bool] | None:
        v = _real(_coords(P), self.tol)
        if v is None:
            return None
        cv = self.cv
        x, y, z = v
        if abs(z) > self.tol.residual_eps * max(abs(x), abs(y), abs(z)):
            p = cv.dev(x / z, y / z)
            return (p, False) if cv.inside_dev(p) else None
        # direction at infinity: where the ray from the window center leaves the window
        cx, cy = cv.center
        ts = []
        if x != 0:
            ts.append(((cv.x1 if x > 0 else cv.x0) - cx) / x)
        if y != 0:
            ts.append(((cv.y1 if y > 0 else cv.y0) - cy) / y)
        t = min(ts)
        return cv.dev(cx + t * x, cy + t * y), True

    def point(self, P, cls: str, shape: str = "circle"):
        placed = self._place(P)
        if placed is None:
            return
        (px, py), at_inf = placed
        cls = cls + (" at-infinity" if at_inf else "")
        if shape == "square":
            self.items.append(f'  <rect class="{cls}" x="{_f(px - 4)}" y="{_f(py - 4)}" width="8.000" height="8.000"/>')
        else:
            self.items.append(f'  <circle class="{cls}" cx="{_f(px)}" cy="{_f(py)}" r="4.000"/>')

    def document(self, title: str) -> str:
        cv = self.cv
        head = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{cv.width}" height="{cv.height}" '
            f'viewBox="0 0 {cv.width} {cv.height}">',
            f"  <title>{title}</title>",
            f"  <style type=\"text/css\">{_STYLE}  </style>",
            f'  <rect class="frame" x="0" y="0" width="{cv.width}" height="{cv.height}"/>',
        ]
        for l in (ProjLine(1, 0, 0), ProjLine(0, 1, 0)):
            for run in _line_runs(l, cv, self.tol):
                (ax, ay), (bx, by) = run
                head.append(f'  <line class="axis" x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}"/>')
        return "\n".join(head + self.items + ["</svg>", ""])


def _check_real(F: Pencil, members, tol: Tolerance):
    for name, C in (("first generator", F.gen1), ("second generator", F.gen2)):
        if _real_matrix(C, tol) is None:
            raise NotRenderable(f"{name} has no real representative")
    for p in members:
        if _real_matrix(F.member(p), tol) is None:
            raise NotRenderable(f"member {tuple(p)} has no real representative")


def render_pencil(
    F: Pencil,
    members: Sequence | None = None,
    aux: dict | None = None,
    window: Window = (-3.0, -3.0, 3.0, 3.0),
    width: int = 600,
) -> str:
    """SVG document showing members of a real pencil, its real base and
    double points, and the auxiliary objects in ``aux`` (keys as in a
    scene file)."""
    tol = F.tol
    members = [HomPair.of(p) if not isinstance(p, HomPair) else p for p in (members or [(1, 0), (0, 1)])]
    _check_real(F, members, tol)
    cv = _Canvas(window, width)
    svg = _SVG(cv, tol)
    aux = aux or {}
    Gs = [F.member(p) for p in members]

    for key in ("aux2", "aux3", "conic"):
        if key in aux and _real_matrix(aux[key], tol) is not None:
            svg.path(real_locus(aux[key], cv, tol), "aux-conic")
    for G in Gs:
        svg.path(real_locus(G, cv, tol), "member")

    if "point" in aux:
        P = aux["point"]
        for G in Gs:
            try:
                svg.line(ProjLine(G.m @ _coords(P)), "polar")
            except GeometryError:
                pass
        svg.point(P, "aux-point")
        try:
            svg.point(conjugate_point(F, P), "conjugate-point")
        except GeometryError:
            pass
    if "line" in aux:
        d = aux["line"]
        svg.line(d, "aux-line")
        for G in Gs:
            v = adjugate3(G.m) @ _coords(d)
            if np.linalg.norm(v) > tol.residual_eps:
                svg.point(ProjPoint(v), "pole")
    if "secant" in aux:
        d = aux["secant"]
        svg.line(d, "secant")
        on = [X for X in F.base if incidence_residual(X, d) <= tol.match_eps]
        if len(on) == 1:
            u, v = _line_basis(d)
            X = max((u, v), key=lambda w: ProjPoint(w).distance(on[0]))
            for G in Gs:
                try:
                    svg.point(ProjPoint(second_intersection(G, on[0], X)), "secant-point")
                except GeometryError:
                    pass
    if "aux2" in aux:
        try:
            _, X = xr_aux_conic_two_base(F, members, aux["aux2"])
            svg.point(X, "concurrency-point")
        except (GeometryError, ValueError):
            pass
    for l in aux.get("lines", []):
        svg.line(l, "aux-line")

    for X in F.base:
        svg.point(X, "base-point")
    for R in F.doubles:
        svg.point(R, "double-point", shape="square")
    return svg.document("pencil of conics")


def render_scene(scene, window: Window = (-3.0, -3.0, 3.0, 3.0), width: int = 600, tol: Tolerance = DEFAULT_TOL) -> str:
    F = scene.pencil(tol)
    return render_pencil(F, scene.members, scene.aux, window, width)
