"""Points, lines and collineations of the complex projective plane, and the
cross ratio of collinear points and concurrent lines."""
from __future__ import annotations

import itertools

import numpy as np

from .errors import (
    DegenerateFrame,
    DegenerateHarmonic,
    DegenerateJoin,
    DegenerateMeet,
    IndeterminateCrossRatio,
    NotCollinear,
    NotConcurrent,
    SingularMap,
)
from .numeric import (
    DEFAULT_TOL,
    ExtComplex,
    Tolerance,
    as_vector,
    chordal_distance,
    cross_ratio_pairs,
    proj_normalize,
    singular_ratios,
)

__all__ = [
    "ProjPoint",
    "ProjLine",
    "ProjMap",
    "join",
    "meet",
    "incident",
    "cross_ratio_points",
    "cross_ratio_lines",
    "harmonic_conjugate",
    "apply_map",
    "apply_map_line",
    "map_from_quad",
]


class _Homogeneous:
    __slots__ = ("coords",)

    def __init__(self, *coords):
        if len(coords) == 1:
            coords = coords[0]
        v = proj_normalize(as_vector(coords, 3))
        v.setflags(write=False)
        self.coords = v

    def __repr__(self):
        def fmt(z):
            z = complex(z)
            re = 0.0 if abs(z.real) < 1e-14 else z.real
            im = 0.0 if abs(z.imag) < 1e-14 else z.imag
            return f"{re:.6g}" if im == 0 else f"{complex(re, im):.6g}"

        return f"{type(self).__name__}[{':'.join(fmt(z) for z in self.coords)}]"

    def __iter__(self):
        return iter(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def same(self, other, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Projective equality within ``match_eps``."""
        return chordal_distance(self.coords, _coords(other)) <= tol.match_eps

    def distance(self, other) -> float:
        return chordal_distance(self.coords, _coords(other))

    def is_real(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return bool(np.all(np.abs(self.coords.imag) <= tol.residual_eps))


class ProjPoint(_Homogeneous):
    """Point ``[x:y:z]``; stored with its largest entry scaled to 1."""

    __slots__ = ()

    @classmethod
    def affine(cls, x, y) -> "ProjPoint":
        return cls(x, y, 1)

    def to_affine(self, tol: Tolerance = DEFAULT_TOL):
        """``(x/z, y/z)`` or ``None`` for a point at infinity."""
        x, y, z = self.coords
        if abs(z) <= tol.residual_eps:
            return None
        return x / z, y / z


class ProjLine(_Homogeneous):
    """Line with dual coordinates ``(a, b, c)``: ``ax + by + cz = 0``."""

    __slots__ = ()


INFINITY_LINE = ProjLine(0, 0, 1)


def _coords(obj) -> np.ndarray:
    if isinstance(obj, _Homogeneous):
        return obj.coords
    return as_vector(obj, 3)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def join(P: ProjPoint, Q: ProjPoint, tol: Tolerance = DEFAULT_TOL) -> ProjLine:
    p, q = _unit(_coords(P)), _unit(_coords(Q))
    if chordal_distance(p, q) <= tol.match_eps:
        raise DegenerateJoin(f"points coincide: {P!r}, {Q!r}")
    return ProjLine(np.cross(p, q))


def meet(l: ProjLine, m: ProjLine, tol: Tolerance = DEFAULT_TOL) -> ProjPoint:
    a, b = _unit(_coords(l)), _unit(_coords(m))
    if chordal_distance(a, b) <= tol.match_eps:
        raise DegenerateMeet(f"lines coincide: {l!r}, {m!r}")
    return ProjPoint(np.cross(a, b))


def incidence_residual(P, l) -> float:
    """``|l.P| / (|l||P|)``: sine-like distance of ``P`` from ``l``."""
    p, a = _coords(P), _coords(l)
    return float(abs(a @ p) / (np.linalg.norm(a) * np.linalg.norm(p)))


def incident(P: ProjPoint, l: ProjLine, tol: Tolerance = DEFAULT_TOL) -> bool:
    return incidence_residual(P, l) <= tol.match_eps


def _widest_pair(vectors: list[np.ndarray]) -> tuple[int, int, float]:
    best = (0, 1, -1.0)
    for i, j in itertools.combinations(range(len(vectors)), 2):
        d = chordal_distance(vectors[i], vectors[j])
        if d > best[2]:
            best = (i, j, d)
    return best


def _line_coordinates(vectors: list[np.ndarray], tol: Tolerance, err=NotCollinear):
    """Express vectors lying in a common 2-dimensional subspace as pairs
    ``(alpha, beta)`` with ``x = alpha*u + beta*v``, where ``u, v`` are the
    two most separated inputs."""
    vectors = [_unit(v) for v in vectors]
    i, j, d = _widest_pair(vectors)
    if d <= tol.match_eps:
        raise IndeterminateCrossRatio("all inputs coincide")
    u, v = vectors[i], vectors[j]
    w = np.cross(u, v)
    ww = np.vdot(w, w).real
    wn = np.sqrt(ww)
    pairs = []
    for x in vectors:
        if abs(w @ x) / wn > tol.match_eps:
            raise err("inputs do not share a common line/point")
        alpha = np.vdot(w, np.cross(x, v)) / ww
        beta = np.vdot(w, np.cross(u, x)) / ww
        pairs.append(np.array([alpha, beta]))
    return pairs, (u, v)


def cross_ratio_points(A, B, C, D, tol: Tolerance = DEFAULT_TOL) -> ExtComplex:
    """Cross ratio ``(A,B,C,D) = ((A-C)(B-D)) / ((B-C)(A-D))`` of four
    collinear points.

    The common line is charted by the two most separated inputs, which
    gives the best conditioned coordinates; the value does not depend on
    the chart.
    """
    pairs, _ = _line_coordinates([_coords(X) for X in (A, B, C, D)], tol)
    return cross_ratio_pairs(*pairs, tol=tol)


def cross_ratio_lines(a, b, c, d, tol: Tolerance = DEFAULT_TOL) -> ExtComplex:
    """Cross ratio of four concurrent lines, read off on a transversal.

    The transversal is the coordinate line farthest from the common point,
    which never belongs to the pencil.
    """
    lines = [_unit(_coords(l)) for l in (a, b, c, d)]
    i, j, sep = _widest_pair(lines)
    if sep <= tol.match_eps:
        raise IndeterminateCrossRatio("all lines coincide")
    vertex = _unit(np.cross(lines[i], lines[j]))
    for l in lines:
        if abs(l @ vertex) > tol.match_eps:
            raise NotConcurrent("lines are not concurrent")
    k = int(np.argmax(np.abs(vertex)))
    # l x e_k has zero k-th entry; the other two entries chart the line e_k
    rest = [r for r in range(3) if r != k]
    pairs = []
    for l in lines:
        e = np.zeros(3)
        e[k] = 1.0
        pairs.append(np.cross(l, e)[rest])
    return cross_ratio_pairs(*pairs, tol=tol)


def harmonic_conjugate(X, Y, P, tol: Tolerance = DEFAULT_TOL) -> ProjPoint:
    """The point ``Q`` on ``XY`` with ``(P, Q, X, Y) = -1``."""
    x, y, p = (_unit(_coords(V)) for V in (X, Y, P))
    if chordal_distance(x, y) <= tol.match_eps:
        raise DegenerateHarmonic("X and Y coincide")
    if min(chordal_distance(p, x), chordal_distance(p, y)) <= tol.match_eps:
        raise DegenerateHarmonic("P coincides with X or Y")
    w = np.cross(x, y)
    ww = np.vdot(w, w).real
    if abs(w @ p) / np.sqrt(ww) > tol.match_eps:
        raise NotCollinear("P is not on the line XY")
    alpha = np.vdot(w, np.cross(p, y)) / ww
    beta = np.vdot(w, np.cross(x, p)) / ww
    return ProjPoint(alpha * x - beta * y)


class ProjMap:
    """Invertible collineation ``P -> m @ P``."""

    __slots__ = ("m",)

    def __init__(self, m, tol: Tolerance = DEFAULT_TOL):
        m = np.array(m, dtype=complex).reshape(3, 3)
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite matrix entry")
        if singular_ratios(m)[2] < tol.conditioning_floor:
            raise SingularMap("projective map is numerically singular")
        m = m / np.abs(m).max()
        m.setflags(write=False)
        self.m = m

    def __repr__(self):
        return f"ProjMap({np.array2string(self.m, precision=4)})"

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(self.m @ other.m)

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.m))


def apply_map(T: ProjMap, P: ProjPoint) -> ProjPoint:
    return ProjPoint(T.m @ _coords(P))


def apply_map_line(T: ProjMap, l: ProjLine) -> ProjLine:
    # inverse transpose up to scale
    return ProjLine(np.linalg.solve(T.m.T, _coords(l)))


def _check_frame(points, tol: Tolerance):
    vecs = [_unit(_coords(P)) for P in points]
    for a, b, c in itertools.combinations(vecs, 3):
        if abs(np.linalg.det(np.array([a, b, c]))) < tol.conditioning_floor:
            raise DegenerateFrame("three of the four points are (nearly) collinear")
    return vecs


def _frame_matrix(vecs) -> np.ndarray:
    basis = np.column_stack(vecs[:3])
    scales = np.linalg.solve(basis, vecs[3])
    return basis * scales


def map_from_quad(sources, targets, tol: Tolerance = DEFAULT_TOL) -> ProjMap:
    """The collineation sending four points in general position to four others."""
    if len(sources) != 4 or len(targets) != 4:
        raise ValueError("need exactly four source and four target points")
    fs = _frame_matrix(_check_frame(sources, tol))
    ft = _frame_matrix(_check_frame(targets, tol))
    return ProjMap(ft @ np.linalg.inv(fs), tol)
