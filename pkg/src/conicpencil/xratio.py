"""Geometric characterizations of the cross ratio of four members of a
pencil of conics, and a report comparing them.

Every ``xr_*`` function takes a :class:`~conicpencil.pencil.Pencil` and four
member parameters and returns an extended complex number. The parameter
cross ratio :func:`xr_abstract` is the reference value.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .conics import (
    Conic,
    _line_basis,
    conic_rank,
    conic_through_5,
    cross_ratio_on_conic,
    evaluate,
    intersect_conics,
    polar_line,
    second_intersection,
    split_degenerate,
)
from .errors import (
    BadAuxConic,
    BadSecant,
    CentersDegenerate,
    ConditioningFailure,
    DegenerateConic,
    DegenerateMember,
    DegenerateTangent,
    DoublePointExcluded,
    GeometryError,
    IndeterminateCrossRatio,
    NotConcurrent,
    PoleSingular,
    UnderdeterminedConic,
)
from .numeric import (
    ExtComplex,
    HomPair,
    Tolerance,
    adjugate3,
    chordal_distance,
    cross_ratio_pairs,
    ext_chordal,
)
from .pencil import (
    Pencil,
    _as_param,
    conjugate_line_conic,
    conjugate_point,
    resolve_labeling,
)
from .projective import (
    INFINITY_LINE,
    ProjLine,
    ProjPoint,
    _coords,
    _unit,
    _widest_pair,
    cross_ratio_lines,
    cross_ratio_points,
    incidence_residual,
    join,
)

__all__ = [
    "MemberQuad",
    "xr_abstract",
    "xr_polars_at_point",
    "xr_tangents_at_base",
    "xr_poles_on_line",
    "xr_centers",
    "xr_secant_through_base",
    "characteristic_constant",
    "xr_characteristic_constants",
    "xr_aux_conic_two_base",
    "xr_aux_conic_three_base",
    "xr_conjugate_lines",
    "lines_from_params",
    "AuxConfig",
    "MethodResult",
    "XRReport",
    "METHODS",
    "compare_all",
    "run_method",
]


MemberQuad = tuple[HomPair, HomPair, HomPair, HomPair]


def as_quad(Q) -> MemberQuad:
    Q = tuple(_as_param(p) for p in Q)
    if len(Q) != 4:
        raise ValueError("a member quad has four entries")
    return Q


def _members(F: Pencil, Q) -> list[Conic]:
    return [F.member(p) for p in as_quad(Q)]


def _nondegenerate_members(F: Pencil, Q) -> list[Conic]:
    members = _members(F, Q)
    for p, G in zip(as_quad(Q), members):
        if conic_rank(G, F.tol) < 3:
            raise DegenerateMember(f"member {p} is degenerate")
    return members


def xr_abstract(F: Pencil, Q) -> ExtComplex:
    """Cross ratio of the four parameters ``(lam_i : mu_i)`` on the
    parameter line of the pencil."""
    return cross_ratio_pairs(*(p.array() for p in as_quad(Q)), tol=F.tol)


def xr_polars_at_point(F: Pencil, Q, P) -> ExtComplex:
    """Cross ratio of the four polars of ``P`` (they are concurrent)."""
    conjugate_point(F, P)  # rejects double points
    try:
        polars = [polar_line(G, P, F.tol) for G in _members(F, Q)]
    except PoleSingular as exc:
        raise DoublePointExcluded(str(exc)) from exc
    return cross_ratio_lines(*polars, tol=F.tol)


def xr_tangents_at_base(F: Pencil, Q, base_index: int) -> ExtComplex:
    """Cross ratio of the four tangents at ``F.base[base_index]``."""
    X = F.base[base_index]
    try:
        tangents = [polar_line(G, X, F.tol) for G in _members(F, Q)]
    except PoleSingular as exc:
        raise DegenerateTangent(f"a member is singular at {X!r}") from exc
    return cross_ratio_lines(*tangents, tol=F.tol)


def _pole(G: Conic, d, tol: Tolerance) -> ProjPoint:
    # adj(m) d; for a line pair this is its double point, still on the image conic
    v = adjugate3(G.m) @ _unit(_coords(d))
    if np.linalg.norm(v) <= tol.residual_eps * G.norm**2:
        raise DegenerateMember(f"pole of the line with respect to {G!r} is undefined")
    return ProjPoint(v)


def xr_poles_on_line(F: Pencil, Q, d) -> ExtComplex:
    """Cross ratio, on the conjugate conic of ``d``, of the poles of ``d``."""
    image = conjugate_line_conic(F, d)
    poles = [_pole(G, d, F.tol) for G in _members(F, Q)]
    return cross_ratio_on_conic(image, *poles, tol=F.tol)


def xr_centers(F: Pencil, Q) -> ExtComplex:
    """Cross ratio of the four centers on the conic of centers."""
    try:
        image = conjugate_line_conic(F, INFINITY_LINE)
        if conic_rank(image, F.tol) < 3:
            raise CentersDegenerate("conic of centers is degenerate")
        return xr_poles_on_line(F, Q, INFINITY_LINE)
    except (UnderdeterminedConic, DegenerateConic, IndeterminateCrossRatio) as exc:
        raise CentersDegenerate(f"conic of centers is degenerate ({exc})") from exc


def xr_secant_through_base(F: Pencil, Q, d) -> ExtComplex:
    """Cross ratio of the second intersections of a line through exactly
    one base point with the four members."""
    tol = F.tol
    on = [X for X in F.base if incidence_residual(X, d) <= tol.match_eps]
    if len(on) != 1:
        raise BadSecant(f"line passes through {len(on)} base points, need exactly one")
    A = on[0]
    u, v = _line_basis(d)
    X = max((u, v), key=lambda w: chordal_distance(w, A.coords))
    points = [ProjPoint(second_intersection(G, A, X)) for G in _members(F, Q)]
    return cross_ratio_points(*points, tol=tol)


def characteristic_constant(F: Pencil, labeling, p, via=None) -> ExtComplex:
    """``(A,B,C,D)`` on the member ``p``: the number fixing the member among
    conics through the labelled base points.

    For a line pair the lines from a point of one component still give a
    well-defined value (0, 1 or INF, the limit along the pencil).
    """
    A, B, C, D = resolve_labeling(F, labeling)
    G = F.member(p)
    # the line-pair branch is taken only for (numerically) the exact
    # degenerate members; a badly scaled proper member is not split
    if not F.is_degenerate_param(p, F.tol.match_eps):
        return cross_ratio_on_conic(G, A, B, C, D, via=via, tol=F.tol)
    if via is None:
        l, _ = split_degenerate(G, F.tol)
        u, v = _line_basis(l)
        special = [A, B, C, D, *F.doubles]
        via = max(
            (ProjPoint(w) for w in (u, v, u + v, u - v, u + 2 * v, 2 * u - v)),
            key=lambda P: min(P.distance(X) for X in special),
        )
    lines = [join(via, X, F.tol) for X in (A, B, C, D)]
    return cross_ratio_lines(*lines, tol=F.tol)


def xr_characteristic_constants(F: Pencil, Q, labeling=None) -> ExtComplex:
    """Cross ratio of the four characteristic constants ``k_i``."""
    Q = as_quad(Q)
    ks = [characteristic_constant(F, labeling, p) for p in Q]
    return cross_ratio_pairs(*(HomPair.from_ext(k).array() for k in ks), tol=F.tol)


def _base_on(F: Pencil, aux: Conic) -> tuple[list[ProjPoint], list[ProjPoint]]:
    on, off = [], []
    for X in F.base:
        (on if abs(evaluate(aux, X)) <= F.tol.match_eps else off).append(X)
    return on, off


def _residual_points(F: Pencil, aux: Conic, G: Conic, shared: list[ProjPoint]) -> list[ProjPoint]:
    """Intersections of ``aux`` and ``G`` with one copy of each shared base
    point removed."""
    pts = intersect_conics(aux, G, F.tol).expanded()
    for X in shared:
        k = min(range(len(pts)), key=lambda i: pts[i].distance(X))
        pts.pop(k)
    return pts


def _concurrency_point(lines: list[ProjLine]) -> tuple[ProjPoint, float]:
    L = np.array([_unit(l.coords) for l in lines])
    _, s, vh = np.linalg.svd(L)
    X = vh[2].conj()
    return ProjPoint(X), float(np.abs(L @ X).max())


def xr_aux_conic_two_base(F: Pencil, Q, aux: Conic) -> tuple[ExtComplex, ProjPoint]:
    """Cross ratio of the four lines ``M_i N_i`` where ``M_i, N_i`` are the
    intersections of ``aux`` with member ``i`` besides the two base points
    on ``aux``. Returns the value and the common point of the lines."""
    tol = F.tol
    on, off = _base_on(F, aux)
    if len(on) != 2:
        raise BadAuxConic(f"auxiliary conic passes through {len(on)} base points, need two")
    lines = []
    for G in _members(F, Q):
        M, N = _residual_points(F, aux, G, on)
        if M.distance(N) <= tol.match_eps:
            # aux touches the member: the chord becomes the common tangent
            try:
                lines.append(polar_line(aux, M, tol))
            except PoleSingular as exc:
                raise ConditioningFailure("auxiliary conic is singular at a contact point") from exc
            continue
        lines.append(join(M, N, tol))
    X, resid = _concurrency_point(lines)
    if resid > tol.match_eps:
        raise ConditioningFailure(f"lines M_iN_i are not concurrent (residual {resid:.2e})")
    return cross_ratio_lines(*lines, tol=tol), X


def xr_aux_conic_three_base(F: Pencil, Q, aux: Conic) -> ExtComplex:
    """Cross ratio on ``aux`` of its fourth intersections with the members."""
    on, _ = _base_on(F, aux)
    if len(on) != 3:
        raise BadAuxConic(f"auxiliary conic passes through {len(on)} base points, need three")
    points = [_residual_points(F, aux, G, on)[0] for G in _members(F, Q)]
    return cross_ratio_on_conic(aux, *points, tol=F.tol)


@dataclass(frozen=True)
class ConjugateLinesResult:
    value: ExtComplex
    lines_value: ExtComplex
    conjugate_vertex: ProjPoint
    membership_residual: float
    incidence_residual: float
    conics: tuple[Conic, ...]


def xr_conjugate_lines(F: Pencil, lines: Sequence) -> ConjugateLinesResult:
    """Conjugate four concurrent lines into conics and compare the cross
    ratio of those conics (which share the double points and the conjugate
    of the common point, hence lie in one pencil) with that of the lines."""
    tol = F.tol
    lines = [ProjLine(_coords(l)) for l in lines]
    if len(lines) != 4:
        raise ValueError("need four lines")
    unit = [_unit(l.coords) for l in lines]
    i, j, sep = _widest_pair(unit)
    if sep <= tol.match_eps:
        raise IndeterminateCrossRatio("all lines coincide")
    vertex = ProjPoint(np.cross(unit[i], unit[j]))
    if max(incidence_residual(vertex, l) for l in lines) > tol.match_eps:
        raise NotConcurrent("lines are not concurrent")
    lines_value = cross_ratio_lines(*lines, tol=tol)

    conics = [conjugate_line_conic(F, l) for l in lines]
    vprime = conjugate_point(F, vertex)
    anchors = list(F.doubles) + [vprime]
    inc = max(abs(evaluate(C, X)) for C in conics for X in anchors)
    if inc > tol.match_eps:
        raise ConditioningFailure(f"conjugate conics miss the double points ({inc:.2e})")

    vecs = [_unit(C.coeffs) for C in conics]
    a, b, _ = _widest_pair(vecs)
    basis = np.column_stack([vecs[a], vecs[b]])
    pairs, resid = [], 0.0
    for v in vecs:
        coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
        resid = max(resid, float(np.linalg.norm(basis @ coef - v)))
        pairs.append(coef)
    value = cross_ratio_pairs(*pairs, tol=tol)
    return ConjugateLinesResult(value, lines_value, vprime, resid, inc, tuple(conics))


def lines_from_params(l1, l2, Q) -> list[ProjLine]:
    """Lines ``lam*l1 + mu*l2`` of the pencil of lines spanned by ``l1, l2``."""
    a, b = _unit(_coords(l1)), _unit(_coords(l2))
    return [ProjLine(p.first * a + p.second * b) for p in as_quad(Q)]


# -- comparison report ------------------------------------------------------


@dataclass
class AuxConfig:
    """Auxiliary objects for the characterizations; ``None`` means build a
    deterministic default from the pencil itself."""

    point: Any = None
    line: Any = None
    secant_line: Any = None
    aux2: Conic | None = None
    aux3: Conic | None = None
    labeling: Any = None
    lines: Any = None

    @classmethod
    def from_generic(cls, F: Pencil, point=None, line=None, conic=None, labeling=None, lines=None):
        """Route a generic line/conic to the methods whose preconditions it meets:
        a line through exactly one base point is a secant, any other line is
        used for the poles; a conic is used according to how many base points
        it contains."""
        cfg = cls(point=point, labeling=labeling, lines=lines)
        if line is not None:
            n = sum(incidence_residual(X, line) <= F.tol.match_eps for X in F.base)
            if n == 1:
                cfg.secant_line = line
            else:
                cfg.line = line
        if conic is not None:
            n = len(_base_on(F, conic)[0])
            if n == 2:
                cfg.aux2 = conic
            elif n == 3:
                cfg.aux3 = conic
        return cfg


@dataclass
class MethodResult:
    value: ExtComplex | None = None
    skipped: str | None = None
    aux: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


@dataclass
class XRReport:
    methods: dict[str, MethodResult]
    consensus: ExtComplex | None
    max_pairwise_deviation: float

    def values(self) -> dict[str, ExtComplex]:
        return {k: r.value for k, r in self.methods.items() if r.value is not None}

    def deviations(self) -> dict[str, float]:
        """Chordal distance of each computed value from the consensus."""
        if self.consensus is None:
            return {}
        return {k: ext_chordal(v, self.consensus) for k, v in self.values().items()}

    def agree(self, eps: float) -> bool:
        return self.consensus is not None and all(d <= eps for d in self.deviations().values())


# combination weights for points built from the base points
_WEIGHTS = [
    (1, 2, 3, 5), (2, -1, 3, 1), (1, 1, -2, 3), (3, 1, 1, -1), (-1, 3, 2, 2),
    (1, -3, 1, 4), (2, 5, -1, 1), (4, 1, -3, 2), (1, 4, 2, -3), (-2, 1, 5, 1),
]
# minimal chordal clearance of default auxiliaries from special points
AUX_MARGIN = 0.02


def _combo(F: Pencil, w) -> ProjPoint:
    return ProjPoint(sum(wi * _unit(B.coords) for wi, B in zip(w, F.base)))


def _combo_points(F: Pencil) -> list[ProjPoint]:
    special = list(F.base) + list(F.doubles)
    out = []
    for w in _WEIGHTS:
        P = _combo(F, w)
        if min(P.distance(X) for X in special) >= AUX_MARGIN:
            out.append(P)
    return out


def default_point(F: Pencil) -> ProjPoint:
    pts = _combo_points(F)
    if not pts:
        raise ConditioningFailure("no admissible default point")
    return pts[0]


def _line_clear(F: Pencil, l, points) -> bool:
    return all(incidence_residual(X, l) >= AUX_MARGIN for X in points)


def default_line(F: Pencil) -> ProjLine:
    pts = _combo_points(F)
    for P, R in itertools.combinations(pts, 2):
        l = join(P, R, F.tol)
        if _line_clear(F, l, F.base + F.doubles):
            return l
    raise ConditioningFailure("no admissible default line")


def default_secant(F: Pencil) -> ProjLine:
    A = F.base[0]
    for P in _combo_points(F):
        l = join(A, P, F.tol)
        if _line_clear(F, l, F.base[1:]):
            return l
    raise ConditioningFailure("no admissible default secant")


def _default_aux(F: Pencil, n_base: int) -> Conic:
    shared = list(F.base[:n_base])
    rest = F.base[n_base:]
    for extra in itertools.combinations(_combo_points(F), 5 - n_base):
        try:
            C = conic_through_5(shared + list(extra), F.tol)
        except UnderdeterminedConic:
            continue
        if conic_rank(C, F.tol) < 3:
            continue
        if all(abs(evaluate(C, X)) >= AUX_MARGIN for X in rest):
            return C
    raise ConditioningFailure("no admissible default auxiliary conic")


def default_aux2(F: Pencil) -> Conic:
    return _default_aux(F, 2)


def default_aux3(F: Pencil) -> Conic:
    return _default_aux(F, 3)


def default_lines(F: Pencil, Q) -> list[ProjLine]:
    """Four lines through a default vertex whose parameters in a pencil of
    lines are the member parameters, so their cross ratio equals the
    reference value; each is checked to be admissible for conjugation."""
    pts = _combo_points(F)
    special = list(F.base) + list(F.doubles)
    for V in pts[1:] + pts[:1]:
        others = [P for P in pts if P is not V]
        for P1, P2 in itertools.combinations(others, 2):
            try:
                lines = lines_from_params(join(V, P1, F.tol), join(V, P2, F.tol), Q)
            except GeometryError:
                continue
            if all(_line_clear(F, l, special) for l in lines):
                return lines
    raise ConditioningFailure("no admissible default line quadruple")


def _method_table(F: Pencil, Q, cfg: AuxConfig) -> dict[str, Callable[[], tuple[ExtComplex, dict, dict]]]:
    def polars():
        P = cfg.point if cfg.point is not None else default_point(F)
        return xr_polars_at_point(F, Q, P), {"point": ProjPoint(_coords(P))}, {}

    def tangents(i):
        def run():
            return xr_tangents_at_base(F, Q, i), {"base_index": i}, {}

        return run

    def poles():
        d = cfg.line if cfg.line is not None else default_line(F)
        return xr_poles_on_line(F, Q, d), {"line": ProjLine(_coords(d))}, {}

    def centers():
        return xr_centers(F, Q), {}, {}

    def secant():
        d = cfg.secant_line if cfg.secant_line is not None else default_secant(F)
        return xr_secant_through_base(F, Q, d), {"line": ProjLine(_coords(d))}, {}

    def characteristic():
        lab = resolve_labeling(F, cfg.labeling)
        return xr_characteristic_constants(F, Q, lab), {"labeling": list(lab)}, {}

    def aux2():
        C = cfg.aux2 if cfg.aux2 is not None else default_aux2(F)
        value, X = xr_aux_conic_two_base(F, Q, C)
        return value, {"conic": C}, {"concurrency_point": X}

    def aux3():
        C = cfg.aux3 if cfg.aux3 is not None else default_aux3(F)
        return xr_aux_conic_three_base(F, Q, C), {"conic": C}, {}

    def conjugate_lines():
        lines = cfg.lines if cfg.lines is not None else default_lines(F, Q)
        res = xr_conjugate_lines(F, lines)
        diag = {
            "lines_value": res.lines_value,
            "conjugate_vertex": res.conjugate_vertex,
            "membership_residual": res.membership_residual,
        }
        return res.value, {"lines": [ProjLine(_coords(l)) for l in lines]}, diag

    table = {"abstract": lambda: (xr_abstract(F, Q), {}, {}), "polars": polars}
    for i in range(4):
        table[f"tangents_{i}"] = tangents(i)
    table.update(
        poles=poles,
        centers=centers,
        secant=secant,
        characteristic=characteristic,
        aux2=aux2,
        aux3=aux3,
        conjugate_lines=conjugate_lines,
    )
    return table


METHODS = (
    "abstract", "polars", "tangents_0", "tangents_1", "tangents_2", "tangents_3",
    "poles", "centers", "secant", "characteristic", "aux2", "aux3", "conjugate_lines",
)


def run_method(F: Pencil, Q, name: str, config: AuxConfig | None = None) -> MethodResult:
    """Run one method by name; precondition failures propagate."""
    Q = as_quad(Q)
    table = _method_table(F, Q, config or AuxConfig())
    if name not in table:
        raise KeyError(f"unknown method {name!r}")
    value, aux, diag = table[name]()
    return MethodResult(value=value, aux=aux, diagnostics=diag)


def compare_all(F: Pencil, Q, config: AuxConfig | None = None, methods: Sequence[str] = METHODS) -> XRReport:
    """Run every characterization; failed preconditions are recorded as
    skips instead of raised."""
    Q = as_quad(Q)
    table = _method_table(F, Q, config or AuxConfig())
    results: dict[str, MethodResult] = {}
    for name in methods:
        try:
            value, aux, diag = table[name]()
            results[name] = MethodResult(value=value, aux=aux, diagnostics=diag)
        except GeometryError as exc:
            results[name] = MethodResult(skipped=f"{type(exc).__name__}: {exc}")
    consensus = results["abstract"].value if "abstract" in results else None
    values = [r.value for r in results.values() if r.value is not None]
    dev = max((ext_chordal(a, b) for a, b in itertools.combinations(values, 2)), default=0.0)
    return XRReport(results, consensus, dev)
