"""Pencils of conics ``lam*E1 + mu*E2 = 0``: base points, degenerate
members, double points, the Desargues involution and conjugation."""
from __future__ import annotations

import itertools

import numpy as np

from .conics import (
    Conic,
    _line_basis,
    _merge_points,
    _pencil_cubic,
    _point_key,
    conic_rank,
    conic_through_5,
    evaluate,
    intersect_conics,
    line_pair,
    second_intersection,
)
from .errors import (
    BasePointIndeterminate,
    ConditioningFailure,
    DegenerateJoin,
    DegenerateMeet,
    DegeneratePencil,
    DoublePointExcluded,
    IdenticalConics,
    LineThroughBasePoint,
    NotCollinear,
    UnderdeterminedConic,
)
from .numeric import (
    DEFAULT_TOL,
    HomPair,
    Tolerance,
    chordal_distance,
    kernel_vector,
    pairwise_chordal,
    solve_cubic_homogeneous,
)
from .projective import ProjPoint, _coords, _unit, incidence_residual, join, meet

__all__ = [
    "Pencil",
    "MemberParam",
    "pencil_from_conics",
    "pencil_from_base_points",
    "member",
    "member_through",
    "desargues_involution",
    "conjugate_point",
    "conjugate_line_conic",
    "lemma_fixed_point",
    "resolve_labeling",
]

MemberParam = HomPair


def _as_param(p) -> HomPair:
    return p if isinstance(p, HomPair) else HomPair.of(p)


class Pencil:
    """Pencil spanned by two conics, with its base points (sorted), the
    parameters of its three degenerate members and their double points
    (in the same order).

    Only non-degenerate pencils are accepted: four distinct base points,
    no three of them collinear.
    """

    __slots__ = ("gen1", "gen2", "tol", "base", "degenerate_params", "doubles")

    def __init__(self, gen1: Conic, gen2: Conic, tol: Tolerance = DEFAULT_TOL, base=None):
        if gen1.same(gen2, tol):
            raise IdenticalConics("generators coincide")
        self.gen1, self.gen2, self.tol = gen1, gen2, tol

        if base is None:
            inter = intersect_conics(gen1, gen2, tol)
            if not inter.simple():
                raise DegeneratePencil("base points are not four simple points")
            pts = [P for P, _ in inter.points]
        else:
            pts = [ProjPoint(_coords(P)) for P in base]
            for P in pts:
                if max(abs(evaluate(gen1, P)), abs(evaluate(gen2, P))) > tol.match_eps:
                    raise DegeneratePencil(f"{P!r} is not on both generators")
            if len(_merge_points(pts, tol)) != 4:
                raise DegeneratePencil("base points are not distinct")
        for a, b, c in itertools.combinations(pts, 3):
            M = np.array([_unit(a.coords), _unit(b.coords), _unit(c.coords)])
            if abs(np.linalg.det(M)) < tol.conditioning_floor:
                raise DegeneratePencil("three base points are (nearly) collinear")
        self.base = tuple(sorted(pts, key=_point_key))

        params = solve_cubic_homogeneous(*_pencil_cubic(gen1.m, gen2.m), tol=tol)
        doubles = []
        for p in params:
            D = self.member(p)
            if conic_rank(D, tol) != 2:
                raise DegeneratePencil(f"degenerate member {p} does not have rank 2")
            doubles.append(ProjPoint(kernel_vector(D.m, tol)))
        for R, S in itertools.combinations(doubles, 2):
            if R.same(S, tol):
                raise DegeneratePencil("double points coincide")
        self.degenerate_params = tuple(params)
        self.doubles = tuple(doubles)

    def __repr__(self):
        return f"Pencil({self.gen1!r}, {self.gen2!r})"

    def member(self, p) -> Conic:
        p = _as_param(p)
        return Conic(p.first * self.gen1.coeffs + p.second * self.gen2.coeffs)

    def is_degenerate_param(self, p, floor: float | None = None) -> bool:
        floor = self.tol.conditioning_floor if floor is None else floor
        p = _as_param(p)
        return any(chordal_distance(p.array(), q.array()) < floor for q in self.degenerate_params)


def pencil_from_conics(C1: Conic, C2: Conic, tol: Tolerance = DEFAULT_TOL) -> Pencil:
    return Pencil(C1, C2, tol)


def pencil_from_base_points(A, B, C, D, tol: Tolerance = DEFAULT_TOL) -> Pencil:
    """Pencil of conics through four points, generated by the line pairs
    ``AB*CD`` and ``AC*BD``."""
    pts = [ProjPoint(_coords(P)) for P in (A, B, C, D)]
    for a, b, c in itertools.combinations(pts, 3):
        M = np.array([_unit(a.coords), _unit(b.coords), _unit(c.coords)])
        if abs(np.linalg.det(M)) < tol.conditioning_floor:
            raise DegeneratePencil("three base points are (nearly) collinear")
    A, B, C, D = pts
    gen1 = line_pair(join(A, B, tol), join(C, D, tol))
    gen2 = line_pair(join(A, C, tol), join(B, D, tol))
    return Pencil(gen1, gen2, tol, base=pts)


def member(F: Pencil, p) -> Conic:
    return F.member(p)


def member_through(F: Pencil, P) -> HomPair:
    """Parameter of the unique member through a non-base point."""
    tol = F.tol
    p = _unit(_coords(P))
    if abs(evaluate(F.gen1, p)) <= tol.match_eps and abs(evaluate(F.gen2, p)) <= tol.match_eps:
        raise BasePointIndeterminate(f"{P!r} is a base point")
    e1 = p @ F.gen1.m @ p
    e2 = p @ F.gen2.m @ p
    return HomPair(complex(e2), complex(-e1)).canonical()


def _check_line_avoids_base(F: Pencil, d):
    for X in F.base:
        if incidence_residual(X, d) <= F.tol.match_eps:
            raise LineThroughBasePoint(f"line passes through base point {X!r}")


def _far_point_on_line(d, P) -> np.ndarray:
    u, v = _line_basis(d)
    return max((u, v), key=lambda w: chordal_distance(w, _coords(P)))


def desargues_involution(F: Pencil, d, P) -> ProjPoint:
    """Image of ``P`` under the involution a pencil induces on a line ``d``:
    the second intersection of ``d`` with the member through ``P``."""
    tol = F.tol
    _check_line_avoids_base(F, d)
    if incidence_residual(P, d) > tol.match_eps:
        raise NotCollinear(f"{P!r} is not on the line")
    G = F.member(member_through(F, P))
    X = _far_point_on_line(d, P)
    return ProjPoint(second_intersection(G, P, X))


def conjugate_point(F: Pencil, P) -> ProjPoint:
    """Common point of the polars of ``P`` with respect to all members.

    Polars depend linearly on the member, so they form the pencil of lines
    spanned by the two generator polars; its vertex is the null vector of
    the stacked polars. ``P`` must not be a double point.
    """
    tol = F.tol
    p = _unit(_coords(P))
    for R in F.doubles:
        if R.same(p, tol):
            raise DoublePointExcluded(f"{P!r} is a double point of the pencil")
    polars = np.array([F.gen1.m @ p, F.gen2.m @ p])
    _, s, vh = np.linalg.svd(polars)
    if s[0] == 0 or s[1] / s[0] <= tol.residual_eps:
        raise DoublePointExcluded(f"all polars of {P!r} coincide")
    return ProjPoint(vh[2].conj())


def _candidates_on_line(d) -> list[np.ndarray]:
    u, v = _line_basis(d)
    return [u, v, u + v, u - v, u + 2 * v, 2 * u - v, u + 1j * v, u - 1j * v]


def conjugate_line_conic(F: Pencil, d) -> Conic:
    """Image of the line ``d`` under conjugation: a conic through the three
    double points, equal to the locus of poles of ``d``.

    Fitted through the double points and the conjugates of the two points
    of ``d`` that give the best separated five-point configuration.
    """
    tol = F.tol
    for X in F.doubles + F.base:
        if incidence_residual(X, d) < tol.conditioning_floor:
            raise UnderdeterminedConic(f"line passes (nearly) through {X!r}")
    images = []
    for q in _candidates_on_line(d):
        try:
            images.append(conjugate_point(F, q))
        except DoublePointExcluded:
            continue
    pts = list(F.doubles) + images
    dist = pairwise_chordal([P.coords for P in pts])
    # separation among the doubles, and of each image from the doubles
    base_sep = min(dist[0, 1], dist[0, 2], dist[1, 2])
    to_doubles = dist[3:, :3].min(axis=1) if images else np.array([])
    best, best_sep = None, -1.0
    for i, j in itertools.combinations(range(len(images)), 2):
        sep = min(base_sep, to_doubles[i], to_doubles[j], dist[3 + i, 3 + j])
        if sep > best_sep:
            best, best_sep = list(F.doubles) + [images[i], images[j]], sep
    if best is None or best_sep < tol.conditioning_floor:
        raise UnderdeterminedConic("conjugated points collapse onto the double points")
    return conic_through_5(best, tol)


_PROBE_MEMBERS = [HomPair.of(p) for p in [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1), (1, 3), (3, -1)]]


def resolve_labeling(F: Pencil, labeling=None) -> tuple[ProjPoint, ProjPoint, ProjPoint, ProjPoint]:
    """Base points in the order given by ``labeling``: either four
    0-based indices into ``F.base`` or four points; default is ``F.base``."""
    if labeling is None:
        return F.base
    labeling = list(labeling)
    if len(labeling) != 4:
        raise ValueError("a labeling names four base points")
    if all(isinstance(i, (int, np.integer)) for i in labeling):
        if sorted(labeling) != [0, 1, 2, 3]:
            raise ValueError("labeling must be a permutation of 0..3")
        return tuple(F.base[i] for i in labeling)
    pts = []
    for X in labeling:
        X = ProjPoint(_coords(X))
        match = [B for B in F.base if B.same(X, F.tol)]
        if not match:
            raise ValueError(f"{X!r} is not a base point")
        pts.append(match[0])
    if len(_merge_points(pts, F.tol)) != 4:
        raise ValueError("labeling repeats a base point")
    return tuple(pts)


def lemma_fixed_point(F: Pencil, P, labeling=None, member=None) -> ProjPoint:
    """The fixed point ``X`` on ``CD`` through which every line ``MN`` passes,
    where ``M, N`` are the second intersections of ``PA, PB`` with a member.

    ``member`` pins the member used; otherwise a fixed list of members is
    probed until one gives a well-defined line ``MN``.
    """
    tol = F.tol
    A, B, C, D = resolve_labeling(F, labeling)
    P = ProjPoint(_coords(P))
    CD = join(C, D, tol)
    if incidence_residual(P, CD) <= tol.match_eps:
        raise ConditioningFailure("P lies on CD")
    if any(P.same(X, tol) for X in (A, B)):
        raise ConditioningFailure("P coincides with A or B")
    probes = [_as_param(member)] if member is not None else _PROBE_MEMBERS
    for p in probes:
        if member is None and F.is_degenerate_param(p):
            continue
        G = F.member(p)
        M = second_intersection(G, A, P)
        N = second_intersection(G, B, P)
        if min(np.linalg.norm(M), np.linalg.norm(N)) <= tol.residual_eps:
            continue
        try:
            MN = join(ProjPoint(M), ProjPoint(N), tol)
            return meet(MN, CD, tol)
        except (DegenerateJoin, DegenerateMeet):
            continue
    raise ConditioningFailure("no member gave a well-defined line MN")
