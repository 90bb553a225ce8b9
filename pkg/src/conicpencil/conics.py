"""Conics as symmetric 3x3 matrices.

A conic ``a x^2 + b xy + c y^2 + d xz + e yz + f z^2 = 0`` is stored by its
coefficient vector ``(a, b, c, d, e, f)``, scaled so the largest entry is 1;
its matrix is ``[[a, b/2, d/2], [b/2, c, e/2], [d/2, e/2, f]]``.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateConic,
    DegenerateJoin,
    DegeneratePencil,
    IdenticalConics,
    IndeterminateEquation,
    LineOnConic,
    NotDegenerate,
    NotOnConic,
    NotTangent,
    PoleSingular,
    UnderdeterminedConic,
)
from .numeric import (
    DEFAULT_TOL,
    ExtComplex,
    Tolerance,
    adjugate3,
    as_vector,
    chordal_distance,
    numerical_rank,
    proj_normalize,
    solve_cubic_homogeneous,
    solve_quadratic_homogeneous,
)
from .projective import (
    ProjLine,
    ProjPoint,
    _coords,
    _unit,
    cross_ratio_lines,
    cross_ratio_points,
    join,
    meet,
)

__all__ = [
    "Conic",
    "ConicIntersection",
    "line_pair",
    "evaluate",
    "on_conic",
    "polar_line",
    "pole_point",
    "intersect_line",
    "line_roots",
    "conic_rank",
    "split_degenerate",
    "conic_through_5",
    "point_on_conic",
    "second_intersection",
    "cross_ratio_on_conic",
    "cross_ratio_tangents",
    "involution_through_point",
    "intersect_conics",
    "center",
]


class Conic:
    __slots__ = ("coeffs", "m", "_norm")

    def __init__(self, coeffs):
        c = proj_normalize(as_vector(coeffs, 6))
        c.setflags(write=False)
        a, b, cc, d, e, f = c
        m = np.array([[a, b / 2, d / 2], [b / 2, cc, e / 2], [d / 2, e / 2, f]], dtype=complex)
        m.setflags(write=False)
        self.coeffs = c
        self.m = m
        self._norm = float(np.linalg.norm(m, 2))

    @classmethod
    def from_matrix(cls, M) -> "Conic":
        M = np.asarray(M, dtype=complex).reshape(3, 3)
        return cls(
            [M[0, 0], M[0, 1] + M[1, 0], M[1, 1], M[0, 2] + M[2, 0], M[1, 2] + M[2, 1], M[2, 2]]
        )

    @property
    def norm(self) -> float:
        """Spectral norm of the matrix."""
        return self._norm

    def __repr__(self):
        names = ["x^2", "xy", "y^2", "xz", "yz", "z^2"]
        terms = []
        for z, n in zip(self.coeffs, names):
            if abs(z) < 1e-14:
                continue
            z = complex(z)
            s = f"{z.real:.6g}" if abs(z.imag) < 1e-14 else f"({z:.6g})"
            terms.append(f"{s}*{n}")
        return f"Conic({' + '.join(terms)})"

    def same(self, other: "Conic", tol: Tolerance = DEFAULT_TOL) -> bool:
        return chordal_distance(self.coeffs, other.coeffs) <= tol.match_eps

    def is_real(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol.residual_eps))

    def rank(self, tol: Tolerance = DEFAULT_TOL) -> int:
        return conic_rank(self, tol)


class ConicIntersection(NamedTuple):
    """Intersection points with multiplicities summing to 4."""

    points: list[tuple[ProjPoint, int]]

    def expanded(self) -> list[ProjPoint]:
        return [P for P, k in self.points for _ in range(k)]

    def simple(self) -> bool:
        return len(self.points) == 4


def line_pair(l, m) -> Conic:
    """The degenerate conic ``l * m = 0``."""
    a, b = _coords(l), _coords(m)
    return Conic.from_matrix((np.outer(a, b) + np.outer(b, a)) / 2)


def _raw(C: Conic, P) -> complex:
    p = _coords(P)
    return complex(p @ C.m @ p)


def evaluate(C: Conic, P) -> complex:
    """``P^T m P / (|m| |P|^2)``; vanishes iff ``P`` lies on ``C``."""
    p = _coords(P)
    return complex(p @ C.m @ p) / (C.norm * np.vdot(p, p).real)


def on_conic(C: Conic, P, tol: Tolerance = DEFAULT_TOL) -> bool:
    return abs(evaluate(C, P)) <= tol.match_eps


def conic_rank(C: Conic, tol: Tolerance = DEFAULT_TOL) -> int:
    return numerical_rank(C.m, tol)


def polar_line(C: Conic, P, tol: Tolerance = DEFAULT_TOL) -> ProjLine:
    """Polar of ``P``; the tangent at ``P`` when ``P`` is on ``C``."""
    p = _unit(_coords(P))
    v = C.m @ p
    if np.linalg.norm(v) <= tol.residual_eps * C.norm:
        raise PoleSingular("point is a singular point of the conic")
    return ProjLine(v)


def _require_nondegenerate(C: Conic, tol: Tolerance):
    if conic_rank(C, tol) < 3:
        raise DegenerateConic(f"{C!r} is degenerate")


def pole_point(C: Conic, l, tol: Tolerance = DEFAULT_TOL) -> ProjPoint:
    _require_nondegenerate(C, tol)
    return ProjPoint(adjugate3(C.m) @ _unit(_coords(l)))


def center(C: Conic, tol: Tolerance = DEFAULT_TOL) -> ProjPoint:
    """Pole of the line at infinity (a point at infinity for parabolas)."""
    return pole_point(C, (0, 0, 1), tol)


def _line_basis(l) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the points of ``l`` (kernel of ``x -> l.x``)."""
    _, _, vh = np.linalg.svd(_coords(l).reshape(1, 3))
    return vh[1].conj(), vh[2].conj()


def line_roots(C: Conic, l, tol: Tolerance = DEFAULT_TOL) -> list[ProjPoint]:
    """Both intersections of ``l`` with ``C`` (equal at a tangency)."""
    u, v = _line_basis(l)
    mu, mv = C.m @ u, C.m @ v
    c2, c1, c0 = u @ mu, 2 * (u @ mv), v @ mv
    if max(abs(c2), abs(c1), abs(c0)) <= tol.residual_eps * C.norm:
        raise LineOnConic("line is a component of the conic")
    return [ProjPoint(r.first * u + r.second * v) for r in solve_quadratic_homogeneous(c2, c1, c0)]


def intersect_line(C: Conic, l, tol: Tolerance = DEFAULT_TOL) -> list[tuple[ProjPoint, int]]:
    """Intersections of a line with a conic, tagged with multiplicity."""
    X, Y = line_roots(C, l, tol)
    if X.distance(Y) <= tol.match_eps:
        return [(ProjPoint(X.coords + Y.coords), 2)]
    return [(X, 1), (Y, 1)]


def second_intersection(C: Conic, A, X) -> np.ndarray:
    """Second point where the line through ``A`` (on ``C``) and ``X`` meets ``C``.

    Writing points of the line as ``s A + t X`` the restricted quadratic has
    the root ``t = 0``; the other root gives the closed form below. Returns
    raw coordinates, zero when ``X`` coincides with ``A``.
    """
    a = _unit(_coords(A))
    x = _unit(_coords(X))
    return -(x @ C.m @ x) * a + 2 * (a @ C.m @ x) * x


def split_degenerate(C: Conic, tol: Tolerance = DEFAULT_TOL) -> tuple[ProjLine, ProjLine]:
    """Lines ``l, m`` with ``C = l * m`` for a conic of rank at most 2.

    For rank 2 the adjugate is ``-p p^T`` for the double point ``p``; adding
    the skew matrix of ``p`` leaves a rank-one matrix ``l m^T`` whose row and
    column give the two lines.
    """
    rank = conic_rank(C, tol)
    A = C.m
    if rank == 3:
        raise NotDegenerate(f"{C!r} has rank 3")
    if rank == 1:
        i = int(np.argmax(np.abs(np.diag(A))))
        l = ProjLine(A[i])
        return l, l
    B = adjugate3(A)
    i = int(np.argmax(np.abs(np.diag(B))))
    p = B[:, i] / np.sqrt(-B[i, i])
    skew = np.array([[0, -p[2], p[1]], [p[2], 0, -p[0]], [-p[1], p[0], 0]])
    R = A + skew
    i, j = np.unravel_index(np.argmax(np.abs(R)), R.shape)
    return ProjLine(R[i, :]), ProjLine(R[:, j])


def _monomials(p: np.ndarray) -> np.ndarray:
    x, y, z = p
    return np.array([x * x, x * y, y * y, x * z, y * z, z * z])


def conic_through_5(points: Sequence, tol: Tolerance = DEFAULT_TOL) -> Conic:
    """The unique conic through five points."""
    if len(points) != 5:
        raise ValueError("need exactly five points")
    rows = np.array([_monomials(_unit(_coords(P))) for P in points])
    _, s, vh = np.linalg.svd(rows)
    if s[0] == 0 or s[4] / s[0] < tol.conditioning_floor:
        raise UnderdeterminedConic("five points do not determine a unique conic")
    return Conic(vh[5].conj())


# seeds and directions used by point_on_conic; fixed so results are reproducible
_SEEDS = [(0, 0, 1), (1, 0, 0), (0, 1, 0), (1, 1, 1), (1, -2, 3), (-3, 1, 2)]
_DIRECTIONS = [
    (np.cos(a), np.sin(a), 0.5 * np.cos(3 * a)) for a in np.arange(12) * np.pi / 12 + 0.1
]


def point_on_conic(C: Conic, avoid: Sequence = (), tol: Tolerance = DEFAULT_TOL) -> ProjPoint:
    """A point of ``C`` far from every point in ``avoid``.

    Candidates are the intersections of ``C`` with a fixed fan of lines
    through the seed point farthest off the conic; the candidate maximizing
    the smallest chordal distance to ``avoid`` wins.
    """
    _require_nondegenerate(C, tol)
    avoid = [_coords(P) for P in avoid]
    seed = max((np.array(s, dtype=complex) for s in _SEEDS), key=lambda s: abs(evaluate(C, s)))
    best, best_score = None, -1.0
    for d in _DIRECTIONS:
        d = np.array(d, dtype=complex)
        if chordal_distance(seed, d) < 0.1:
            continue
        for P in line_roots(C, np.cross(seed, d), tol):
            score = min((P.distance(a) for a in avoid), default=1.0)
            if score > best_score:
                best, best_score = P, score
    if best_score < tol.conditioning_floor:
        raise UnderdeterminedConic("no conic point far enough from the excluded points")
    return best


def _check_on(C: Conic, points, tol: Tolerance):
    for P in points:
        if abs(evaluate(C, P)) > tol.match_eps:
            raise NotOnConic(f"{P!r} is not on {C!r}")


def cross_ratio_on_conic(C: Conic, A, B, Cpt, D, via=None, tol: Tolerance = DEFAULT_TOL) -> ExtComplex:
    """Cross ratio ``(A,B,C,D)_C`` of four points on a nondegenerate conic,
    seen from a fifth conic point ``via`` (chosen automatically if omitted)."""
    _require_nondegenerate(C, tol)
    pts = [ProjPoint(_coords(X)) for X in (A, B, Cpt, D)]
    _check_on(C, pts, tol)
    if via is None:
        P = point_on_conic(C, pts, tol)
    else:
        P = ProjPoint(_coords(via))
        _check_on(C, [P], tol)
    lines = []
    for X in pts:
        try:
            lines.append(join(P, X, tol))
        except DegenerateJoin:
            # the chord PX degenerates to the tangent at P
            lines.append(polar_line(C, P, tol))
    return cross_ratio_lines(*lines, tol=tol)


def cross_ratio_tangents(C: Conic, tA, tB, tC, tD, via=None, tol: Tolerance = DEFAULT_TOL) -> ExtComplex:
    """Cross ratio of four tangents, read on a fifth tangent."""
    _require_nondegenerate(C, tol)
    tangents = [ProjLine(_coords(t)) for t in (tA, tB, tC, tD)]
    touch = [pole_point(C, t, tol) for t in tangents]
    for t, P in zip(tangents, touch):
        if abs(evaluate(C, P)) > tol.match_eps:
            raise NotTangent(f"{t!r} is not tangent to {C!r}")
    P = point_on_conic(C, touch, tol) if via is None else ProjPoint(_coords(via))
    tP = polar_line(C, P, tol)
    return cross_ratio_points(*(meet(t, tP, tol) for t in tangents), tol=tol)


def involution_through_point(C: Conic, X, A, tol: Tolerance = DEFAULT_TOL) -> ProjPoint:
    """Second intersection of the line ``XA`` with ``C``; ``A`` itself when
    ``XA`` is tangent at ``A``."""
    A = ProjPoint(_coords(A))
    _check_on(C, [A], tol)
    v = second_intersection(C, A, X)
    if np.linalg.norm(v) <= tol.residual_eps * C.norm:
        return A
    return ProjPoint(v)


def _pencil_cubic(m1: np.ndarray, m2: np.ndarray) -> tuple[complex, complex, complex, complex]:
    """Coefficients of ``det(lam m1 + mu m2)`` in descending powers of lam."""
    return (
        np.linalg.det(m1),
        np.trace(adjugate3(m1) @ m2),
        np.trace(m1 @ adjugate3(m2)),
        np.linalg.det(m2),
    )


def _point_key(P: ProjPoint):
    return tuple(x for z in P.coords for x in (round(z.real, 9), round(z.imag, 9)))


def _merge_points(points: list[ProjPoint], tol: Tolerance) -> list[tuple[ProjPoint, int]]:
    groups: list[list[ProjPoint]] = []
    for P in points:
        for g in groups:
            if g[0].distance(P) <= tol.match_eps:
                g.append(P)
                break
        else:
            groups.append([P])
    merged = [(ProjPoint(sum(Q.coords for Q in g)) if len(g) > 1 else g[0], len(g)) for g in groups]
    return sorted(merged, key=lambda pk: _point_key(pk[0]))


def intersect_conics(C1: Conic, C2: Conic, tol: Tolerance = DEFAULT_TOL) -> ConicIntersection:
    """Common points of two conics with multiplicities.

    Splits the best separated degenerate member of the pencil spanned by
    ``C1, C2`` into two lines and cuts each line with whichever conic does
    not contain it.
    """
    if C1.same(C2, tol):
        raise IdenticalConics("conics coincide")
    try:
        roots = solve_cubic_homogeneous(*_pencil_cubic(C1.m, C2.m), tol=tol)
    except IndeterminateEquation:
        raise DegeneratePencil("every member is degenerate: the conics share a component")
    best = None
    for r in roots:
        D = Conic(r.first * C1.coeffs + r.second * C2.coeffs)
        try:
            l, m = split_degenerate(D, tol)
        except NotDegenerate:
            continue
        sep = l.distance(m)
        if best is None or sep > best[0]:
            best = (sep, l, m)
    if best is None:
        raise DegeneratePencil("no degenerate member could be split")
    points = []
    for line in best[1:]:
        cut = max((C1, C2), key=lambda C: _restricted_norm(C, line))
        try:
            points.extend(line_roots(cut, line, tol))
        except LineOnConic:
            raise DegeneratePencil("the conics share a common line")
    return ConicIntersection(_merge_points(points, tol))


def _restricted_norm(C: Conic, l) -> float:
    u, v = _line_basis(l)
    return float(max(abs(u @ C.m @ u), abs(u @ C.m @ v), abs(v @ C.m @ v)) / C.norm)
