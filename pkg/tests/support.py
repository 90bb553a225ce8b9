"""Shared helpers for the test suite: fixtures as plain data, random
generators for well-conditioned instances, and independent oracles."""
from __future__ import annotations

import itertools
import numpy as np

from conicpencil import (
    INF,
    Conic,
    ProjLine,
    ProjPoint,
    pencil_from_base_points,
    pencil_from_conics,
)
from conicpencil.errors import GeometryError

# fixture CP1: unit circle and the conic xy
CIRCLE = [1, 0, 1, 0, 0, -1]
XY = [0, 1, 0, 0, 0, 0]
DIAMOND = [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)]
CP1_DOUBLES = [(0, 0, 1), (1, -1, 0), (1, 1, 0)]
CP1_DEGENERATE = [(0, 1), (1, 2), (1, -2)]
# fixture CP2: generic base points
CP2_BASE = [(0, 0, 1), (1, 0, 1), (0, 1, 1), (2, 3, 1)]

FLOOR = 1e-3

# acceptance criterion number -> "ACCEPTANCE n: PASS|FAIL ..." line, filled by
# test_acceptance and printed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def cp1():
    return pencil_from_conics(Conic(CIRCLE), Conic(XY))


def cp2():
    return pencil_from_base_points(*(ProjPoint(p) for p in CP2_BASE))


# -- distances --------------------------------------------------------------


def proj_residual(u, v) -> float:
    """|u x v| / (|u| |v|): zero iff u and v are proportional over C."""
    u = np.asarray(getattr(u, "coords", u), dtype=complex)
    v = np.asarray(getattr(v, "coords", v), dtype=complex)
    if u.shape == (2,):
        cross = abs(u[0] * v[1] - u[1] * v[0])
    elif u.shape == (3,):
        cross = np.linalg.norm(np.cross(u, v))
    else:  # any length: distance of v from the complex line through u
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        return float(np.linalg.norm(v - np.vdot(u, v) * u))
    return float(cross / (np.linalg.norm(u) * np.linalg.norm(v)))


def chordal(z, w) -> float:
    """Chordal distance on the Riemann sphere, written out independently
    of the library (INF is the north pole)."""

    def lift(x):
        if x is INF:
            return np.array([0.0, 0.0, 1.0])
        x = complex(x)
        r = 1 + abs(x) ** 2
        return np.array([2 * x.real / r, 2 * x.imag / r, (abs(x) ** 2 - 1) / r])

    return float(np.linalg.norm(lift(z) - lift(w))) / 2


def close(z, w, eps=1e-6) -> bool:
    return chordal(z, w) <= eps


# -- oracles ----------------------------------------------------------------


def cr(a, b, c, d):
    """Cross ratio of four finite numbers by the defining formula."""
    num = (a - c) * (b - d)
    den = (b - c) * (a - d)
    if den == 0:
        return INF
    return num / den


def cr_hom(p, q, r, s):
    """Cross ratio of four homogeneous pairs (x : y), by 2x2 determinants."""

    def det(u, v):
        return u[0] * v[1] - u[1] * v[0]

    num = det(p, r) * det(q, s)
    den = det(q, r) * det(p, s)
    if den == 0:
        return INF
    return num / den


def conic_value(coeffs, P) -> complex:
    """Raw ``ax^2 + bxy + cy^2 + dxz + eyz + fz^2`` (no normalization)."""
    a, b, c, d, e, f = coeffs
    x, y, z = P
    return a * x * x + b * x * y + c * y * y + d * x * z + e * y * z + f * z * z


def sym(coeffs) -> np.ndarray:
    a, b, c, d, e, f = np.asarray(coeffs, dtype=complex)
    return np.array([[a, b / 2, d / 2], [b / 2, c, e / 2], [d / 2, e / 2, f]])


def line_param(P, base0, base1):
    """Affine coordinate of a point ``P = base0 + s*base1`` on a line, by
    least squares (s = INF when P is proportional to base1)."""
    P = np.asarray(getattr(P, "coords", P), dtype=complex)
    M = np.column_stack([base0, base1])
    coef, *_ = np.linalg.lstsq(M, P, rcond=None)
    if abs(coef[0]) < 1e-14 * abs(coef[1]):
        return INF
    return coef[1] / coef[0]


# -- random instances -------------------------------------------------------


def cvec(rng, n=3) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def general_position(vectors, floor=0.05) -> bool:
    """No two vectors nearly proportional, no three nearly dependent."""
    us = [unit(v) for v in vectors]
    for a, b in itertools.combinations(us, 2):
        if np.linalg.norm(np.cross(a, b)) < floor:
            return False
    for a, b, c in itertools.combinations(us, 3):
        if abs(np.linalg.det(np.array([a, b, c]))) < floor:
            return False
    return True


def random_pencil(rng, real=False, floor=0.05):
    """A pencil on four random base points in general position whose double
    points are well separated."""
    while True:
        pts = [rng.normal(size=3) if real else cvec(rng) for _ in range(4)]
        if not general_position(pts, floor):
            continue
        try:
            F = pencil_from_base_points(*(ProjPoint(p) for p in pts))
        except GeometryError:
            continue
        if general_position([d.coords for d in F.doubles], floor):
            return F


def random_params(rng, F, n=4, floor=0.05, tries=200):
    """``n`` member parameters t, pairwise apart and away from the
    degenerate members, with the member matrices well conditioned; ``None``
    when the pencil offers no such members (callers redraw the pencil)."""
    for _ in range(tries):
        ts = [complex(*rng.normal(size=2)) for _ in range(n)]
        if min((abs(a - b) for a, b in itertools.combinations(ts, 2)), default=1) < floor:
            continue
        if any(F.is_degenerate_param(t, floor) for t in ts):
            continue
        if any(np.linalg.svd(F.member(t).m, compute_uv=False)[2] < floor * np.linalg.norm(F.member(t).m, 2) for t in ts):
            continue
        return ts
    return None


def far_from(v, points, floor=0.05) -> bool:
    v = unit(v)
    return all(np.linalg.norm(np.cross(v, unit(getattr(P, "coords", P)))) >= floor for P in points)


def clear_of(l, points, floor=0.05) -> bool:
    l = unit(getattr(l, "coords", l))
    return all(abs(np.vdot(l.conj(), unit(getattr(P, "coords", P)))) >= floor for P in points)


def random_point_avoiding(rng, points, floor=0.05, real=False):
    while True:
        v = rng.normal(size=3) if real else cvec(rng)
        if far_from(v, points, floor):
            return ProjPoint(v)


def random_line_avoiding(rng, points, floor=0.05, real=False):
    while True:
        v = rng.normal(size=3) if real else cvec(rng)
        if clear_of(v, points, floor):
            return ProjLine(v)


def random_nondegenerate_conic(rng, real=False, floor=0.05):
    while True:
        v = rng.normal(size=6) if real else cvec(rng, 6)
        s = np.linalg.svd(sym(v), compute_uv=False)
        if s[2] >= floor * s[0]:
            return Conic(v)


def random_map(rng, floor=0.05):
    while True:
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        s = np.linalg.svd(m, compute_uv=False)
        if s[2] >= floor * s[0]:
            return m


def points_on_conic(rng, C, n, real=False):
    """``n`` random points of ``C``: cut by random lines and solve the
    restricted quadratic with ``numpy.roots`` (independent of the library's
    own line intersection)."""
    M = sym(C.coeffs)
    out = []
    while len(out) < n:
        u = rng.normal(size=3) if real else cvec(rng)
        v = rng.normal(size=3) if real else cvec(rng)
        a, b, c = v @ M @ v, 2 * (u @ M @ v), u @ M @ u
        roots = np.roots([a, b, c])
        if real:
            roots = roots[np.abs(roots.imag) < 1e-12].real
        for s in roots[:1]:
            out.append(ProjPoint(u + s * v))
    return out


def tangency_points(F, d):
    """Points where members of F touch d: the members whose restriction to d
    has a double root (discriminant quadratic in the member parameter)."""
    u = np.cross(d.coords, [1, 0, 0] if abs(d.coords[0]) < 0.9 * np.linalg.norm(d.coords) else [0, 1, 0])
    v = np.cross(d.coords, u)
    M1, M2 = sym(F.gen1.coeffs), sym(F.gen2.coeffs)

    def restricted(M):
        return np.array([v @ M @ v, 2 * (u @ M @ v), u @ M @ u])

    r1, r2 = restricted(M1), restricted(M2)
    # discriminant of (r1 + t r2) in t
    disc = [r2[1] ** 2 - 4 * r2[0] * r2[2],
            2 * r1[1] * r2[1] - 4 * (r1[0] * r2[2] + r2[0] * r1[2]),
            r1[1] ** 2 - 4 * r1[0] * r1[2]]
    out = []
    for t in np.roots(disc):
        a, b, _ = r1 + t * r2
        out.append(ProjPoint(u - b / (2 * a) * v))
    return out
