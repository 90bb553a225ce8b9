"""Complex scalar kernel: tolerances, homogeneous pairs, the extended
complex line, small 3x3 linear algebra and homogeneous root finding.

Everything downstream works with ``numpy`` complex128 arrays. Projective
objects are never compared with ``==``; use :func:`proj_eq` or
:func:`chordal_distance`.
"""
from __future__ import annotations

import math

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import IndeterminateCrossRatio, IndeterminateEquation, NotSingular, ZeroVector

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "INF",
    "ExtComplex",
    "HomPair",
    "as_vector",
    "proj_normalize",
    "proj_eq",
    "chordal_distance",
    "pairwise_chordal",
    "ext_chordal",
    "ext_from_pair",
    "cross_ratio_pairs",
    "solve_quadratic_homogeneous",
    "solve_cubic_homogeneous",
    "adjugate3",
    "kernel_vector",
    "singular_ratios",
    "numerical_rank",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by the whole kernel.

    residual_eps
        Bound for algebraic residuals (root residuals, incidence of
        constructed objects).
    match_eps
        Bound for deciding that two computed objects are the same
        (projective equality, agreement of cross ratios).
    conditioning_floor
        Singular-value ratio below which a matrix counts as rank
        deficient; governs every degeneracy test.
    """

    residual_eps: float = 1e-9
    match_eps: float = 1e-6
    conditioning_floor: float = 1e-3

    def __post_init__(self):
        if min(self.residual_eps, self.match_eps, self.conditioning_floor) <= 0:
            raise ValueError("tolerances must be positive")
        if self.residual_eps > self.match_eps:
            raise ValueError("residual_eps must not exceed match_eps")


DEFAULT_TOL = Tolerance()


class _Infinity:
    """The point at infinity of the complex projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtComplex = Union[complex, _Infinity]


class HomPair(NamedTuple):
    """Homogeneous coordinates ``(first : second)`` on the projective line."""

    first: complex
    second: complex

    @classmethod
    def of(cls, value) -> "HomPair":
        """Build from a number ``t`` (meaning ``(1 : t)``), ``INF`` or a pair."""
        if value is INF:
            return cls(0j, 1 + 0j)
        if isinstance(value, (tuple, list, np.ndarray)):
            a, b = value
            return cls(complex(a), complex(b))
        return cls(1 + 0j, complex(value))

    @classmethod
    def from_ext(cls, z: ExtComplex) -> "HomPair":
        """Point ``z`` of the extended line as ``(z : 1)``; ``INF`` is ``(1 : 0)``."""
        if z is INF:
            return cls(1 + 0j, 0j)
        return cls(complex(z), 1 + 0j)

    def canonical(self) -> "HomPair":
        v = proj_normalize(np.array(self, dtype=complex))
        return HomPair(complex(v[0]), complex(v[1]))

    def ratio(self) -> ExtComplex:
        """``first / second`` as an extended complex number."""
        return ext_from_pair(self.first, self.second)

    def array(self) -> np.ndarray:
        return np.array(self, dtype=complex)


def as_vector(v, n: int | None = None) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if n is not None and arr.shape != (n,):
        raise ValueError(f"expected {n} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entry")
    return arr


def proj_normalize(v, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Scale ``v`` so its largest-modulus entry is exactly ``1+0j``.

    Among entries whose modulus ties with the maximum (within
    ``residual_eps``) the first one is chosen.

    >>> proj_normalize([2, -4, 2])
    array([-0.5+0.j,  1. +0.j, -0.5+0.j])
    """
    arr = as_vector(v)
    mod = np.abs(arr)
    top = mod.max()
    if top == 0:
        raise ZeroVector("cannot normalize the zero vector")
    k = int(np.flatnonzero(mod >= top * (1 - tol.residual_eps))[0])
    out = arr / arr[k]
    out[k] = 1.0
    return out


def chordal_distance(u, v) -> float:
    """Sine of the Hermitian angle between two nonzero vectors.

    Zero iff ``u`` and ``v`` are proportional over C; for 3-vectors it
    equals ``|u x v| / (|u||v|)``, for pairs it is the chordal metric of
    the projective line.
    """
    # hot path: skip validation for complex arrays, non-finite input still
    # shows up in the norms
    if not (isinstance(u, np.ndarray) and u.dtype == complex):
        u = as_vector(u)
    if not (isinstance(v, np.ndarray) and v.dtype == complex):
        v = as_vector(v)
    nu = math.sqrt(np.vdot(u, u).real)
    nv = math.sqrt(np.vdot(v, v).real)
    if not (math.isfinite(nu) and math.isfinite(nv)):
        raise ValueError("non-finite entry")
    if nu == 0 or nv == 0:
        raise ZeroVector("zero vector has no projective class")
    u = u / nu
    v = v / nv
    resid = v - np.vdot(u, v) * u
    return min(1.0, math.sqrt(np.vdot(resid, resid).real))


def pairwise_chordal(vectors) -> np.ndarray:
    """Matrix of chordal distances between the rows of ``vectors``.

    Computed from the Gram matrix, so distances below ~1e-8 lose relative
    accuracy; meant for choosing well separated configurations.
    """
    V = np.asarray(vectors, dtype=complex)
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    g = np.abs(V.conj() @ V.T)
    return np.sqrt(np.clip(1.0 - g**2, 0.0, 1.0))


def proj_eq(u, v, tol: Tolerance = DEFAULT_TOL) -> bool:
    return chordal_distance(u, v) <= tol.match_eps


def ext_from_pair(num: complex, den: complex, tol: Tolerance = DEFAULT_TOL) -> ExtComplex:
    """``num / den`` with ``INF`` when the denominator vanishes relative to
    the numerator."""
    num = complex(num)
    den = complex(den)
    if num == 0 and den == 0:
        raise IndeterminateEquation("0/0")
    if abs(den) < tol.residual_eps * abs(num):
        return INF
    return num / den


def ext_chordal(z: ExtComplex, w: ExtComplex) -> float:
    """Chordal distance ``|z-w| / sqrt((1+|z|^2)(1+|w|^2))`` on C u {INF}."""
    return chordal_distance(HomPair.from_ext(z).array(), HomPair.from_ext(w).array())


def _det2(p, q) -> complex:
    return p[0] * q[1] - p[1] * q[0]


def cross_ratio_pairs(a, b, c, d, tol: Tolerance = DEFAULT_TOL) -> ExtComplex:
    """Cross ratio ``((a-c)(b-d)) / ((b-c)(a-d))`` of four homogeneous pairs.

    With affine coordinates ``(x : 1)`` the determinant ``[p, q]`` equals
    ``x_p - x_q`` so this is the usual convention. Pairs are scaled to unit
    norm first so the INF threshold is scale free.

    Two coincident pairs still give a value (``(a,b,a,b) = 0``,
    ``(a,b,b,a) = INF``, ``(a,a,b,b) = 1``); three or four coincident
    entries make it ``0/0`` and raise ``IndeterminateCrossRatio``.
    """
    pts = []
    for p in (a, b, c, d):
        p = as_vector(p, 2)
        n = np.linalg.norm(p)
        if n == 0:
            raise ZeroVector("zero homogeneous pair")
        pts.append(p / n)
    for p in pts:
        if sum(abs(_det2(p, q)) <= tol.match_eps for q in pts) >= 3:
            raise IndeterminateCrossRatio("three of the four entries coincide")
    a, b, c, d = pts
    num = _det2(a, c) * _det2(b, d)
    den = _det2(b, c) * _det2(a, d)
    return ext_from_pair(num, den, tol)


# -- homogeneous polynomials ------------------------------------------------


def _hom_eval(coeffs: np.ndarray, lam: complex, mu: complex) -> complex:
    """Evaluate sum c_k lam^(n-k) mu^k with coefficients in descending lam degree."""
    n = len(coeffs) - 1
    return complex(sum(c * lam ** (n - k) * mu**k for k, c in enumerate(coeffs)))


def _hom_residual(coeffs: np.ndarray, pair: HomPair) -> float:
    return abs(_hom_eval(coeffs, pair.first, pair.second)) / np.abs(coeffs).max()


def _sort_key(pair: HomPair):
    r = pair.ratio()
    if r is INF:
        return (1, 0.0, 0.0)
    return (0, round(r.real, 9), round(r.imag, 9))


def _finish(coeffs: np.ndarray, roots: list[HomPair]) -> list[HomPair]:
    roots = [r.canonical() for r in roots]
    return sorted(roots, key=_sort_key)


def solve_quadratic_homogeneous(c2, c1, c0, tol: Tolerance = DEFAULT_TOL) -> list[HomPair]:
    """Roots ``(lam : mu)`` of ``c2 lam^2 + c1 lam mu + c0 mu^2``.

    Uses the cancellation-free form of the quadratic formula, so a root at
    infinity (``c2 = 0``) comes out as ``(1 : 0)`` without special casing.

    >>> [r.ratio() for r in solve_quadratic_homogeneous(0, 1, -2)]
    [(2+0j), INF]
    """
    coeffs = np.array([c2, c1, c0], dtype=complex)
    scale = np.abs(coeffs).max()
    if scale == 0:
        raise IndeterminateEquation("all coefficients vanish")
    c2, c1, c0 = coeffs / scale
    sq = np.sqrt(c1 * c1 - 4 * c2 * c0)
    if abs(c1 + sq) < abs(c1 - sq):
        sq = -sq
    q = -(c1 + sq) / 2
    if q == 0:
        # c1 = 0 and c2*c0 = 0: a double root at 0 or at infinity
        root = HomPair(0j, 1 + 0j) if c2 != 0 else HomPair(1 + 0j, 0j)
        return _finish(coeffs, [root, root])
    return _finish(coeffs, [HomPair(q, c2), HomPair(c0, q)])


# candidate unitary substitutions for making the leading coefficient large
_ROTATIONS = [(np.cos(a), np.sin(a)) for a in np.arange(8) * np.pi / 8]


def _rotated_poly(coeffs: np.ndarray, c: float, s: float) -> np.ndarray:
    """Coefficients (ascending in x) of p(c x - s, s x + c) for p given descending."""
    P = np.polynomial.polynomial
    n = len(coeffs) - 1
    out = np.zeros(n + 1, dtype=complex)
    for k, ck in enumerate(coeffs):
        term = P.polymul(P.polypow([-s, c], n - k), P.polypow([c, s], k))
        out[: len(term)] += ck * term
    return out


def _polish(asc: np.ndarray, x: complex) -> complex:
    P = np.polynomial.polynomial
    d = P.polyder(asc)
    fx = P.polyval(x, asc)
    dfx = P.polyval(x, d)
    if dfx == 0:
        return x
    y = x - fx / dfx
    return y if abs(P.polyval(y, asc)) < abs(fx) else x


def _merge_clusters(asc: np.ndarray, xs: list[complex], radius: float) -> tuple[list[complex], set[int]]:
    """Replace clusters of near-equal roots by their mean when that does not
    worsen the residual. Eigenvalues of a k-fold root scatter like eps^(1/k)
    while their mean stays accurate. Returns the roots and the merged indices."""
    P = np.polynomial.polynomial
    xs = list(xs)
    n = len(xs)
    merged: set[int] = set()
    scale = np.abs(asc).max()
    for i in range(n):
        if i in merged:
            continue
        group = [j for j in range(n) if abs(xs[j] - xs[i]) <= radius * max(1.0, abs(xs[i]))]
        if len(group) < 2:
            continue
        mean = sum(xs[j] for j in group) / len(group)
        worst = max(abs(P.polyval(xs[j], asc)) for j in group)
        if abs(P.polyval(mean, asc)) <= max(worst * 10, 1e-15 * scale):
            for j in group:
                xs[j] = mean
            merged.update(group)
    return xs, merged


def solve_cubic_homogeneous(c3, c2, c1, c0, tol: Tolerance = DEFAULT_TOL) -> list[HomPair]:
    """Three roots (with multiplicity) of ``c3 lam^3 + c2 lam^2 mu + c1 lam mu^2 + c0 mu^3``.

    The coefficients are scaled by the largest modulus; if the leading
    coefficient is then small, a unitary substitution of ``(lam, mu)`` is
    applied first so the companion matrix stays well conditioned and roots
    at infinity need no special treatment. Each eigenvalue gets one Newton
    step, and clusters of a multiple root are averaged.

    Output is sorted by the affine ratio ``lam/mu`` (real part, then
    imaginary part), with ``(1 : 0)`` last.
    """
    coeffs = np.array([c3, c2, c1, c0], dtype=complex)
    scale = np.abs(coeffs).max()
    if scale == 0:
        raise IndeterminateEquation("all coefficients vanish")
    coeffs = coeffs / scale

    if abs(coeffs[0]) >= 0.1:
        c, s = 1.0, 0.0
    else:
        c, s = max(_ROTATIONS, key=lambda cs: abs(_hom_eval(coeffs, *cs)))
    asc = _rotated_poly(coeffs, c, s)

    monic = asc / asc[-1]
    companion = np.zeros((3, 3), dtype=complex)
    companion[1, 0] = companion[2, 1] = 1.0
    companion[:, 2] = -monic[:3]
    xs, merged = _merge_clusters(asc, list(np.linalg.eigvals(companion)), tol.conditioning_floor)
    xs = [x if i in merged else _polish(asc, x) for i, x in enumerate(xs)]

    roots = [HomPair(c * x - s, s * x + c) for x in xs]
    return _finish(coeffs, roots)


# -- 3x3 linear algebra -----------------------------------------------------


def adjugate3(M) -> np.ndarray:
    """Adjugate of a 3x3 matrix, so that ``adj(M) @ M == det(M) * I``."""
    M = np.asarray(M, dtype=complex)
    a, b, c = M
    return np.column_stack([np.cross(b, c), np.cross(c, a), np.cross(a, b)])


def singular_ratios(M) -> np.ndarray:
    """``sigma_i / sigma_1`` for the singular values of ``M`` (descending)."""
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    if s[0] == 0:
        return np.zeros_like(s)
    return s / s[0]


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    return int(np.count_nonzero(singular_ratios(M) >= tol.conditioning_floor))


def kernel_vector(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Null vector of a rank-deficient 3x3 matrix, canonically normalized."""
    M = np.asarray(M, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    if s[0] == 0:
        raise ZeroVector("zero matrix")
    if s[2] / s[0] >= tol.conditioning_floor:
        raise NotSingular(f"matrix has full numerical rank (sigma3/sigma1 = {s[2] / s[0]:.3g})")
    return proj_normalize(vh[2].conj(), tol)
