"""Randomized cross-checking of all cross-ratio constructions.

Each trial draws a pencil, four members and auxiliary objects from small
integer rationals ``p/q`` (``p, q`` in ``[-9, 9]``), using its own random
stream derived from ``(seed, trial)``. The scene is serialized to JSON and
parsed back *before* anything is computed, so the record stored for a
failing trial reproduces its deviation exactly.
"""
from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .conics import Conic, _line_basis, conic_rank, conic_through_5, evaluate
from .errors import GeometryError
from .numeric import DEFAULT_TOL, HomPair, Tolerance, chordal_distance, ext_chordal, singular_ratios
from .pencil import Pencil, conjugate_line_conic, conjugate_point, desargues_involution
from .projective import ProjLine, ProjPoint, incidence_residual, join
from .scene import Scene, encode, parse_scene
from .xratio import compare_all, lines_from_params

__all__ = ["FuzzReport", "generate_scene", "run_trial", "check_scene", "fuzz"]

# number of redraws before a trial gives up on finding admissible data
MAX_DRAWS = 200
# methods allowed to skip: their precondition depends on the pencil alone
# (the line at infinity is not an auxiliary choice)
MAY_SKIP = ("centers",)
# pencil invariants checked next to the cross-ratio methods
INVARIANTS = ("base_membership", "conjugation_involution", "desargues_involution")


def _rational(rng: np.random.Generator) -> float:
    p = int(rng.integers(-9, 10))
    q = int(rng.integers(1, 10)) * (1 if rng.random() < 0.5 else -1)
    return p / q


def _gaussian(rng) -> complex:
    return complex(_rational(rng), _rational(rng))


def _point(rng, complex_coords: bool = False) -> np.ndarray:
    draw = _gaussian if complex_coords else _rational
    v = np.array([draw(rng), draw(rng), 1.0], dtype=complex)
    if rng.random() < 0.1:
        v[2] = 0.0  # occasionally a point at infinity
        if not v.any():
            v[0] = 1.0
    return v


def _far(v, points, floor) -> bool:
    return all(chordal_distance(v, P) >= floor for P in points)


def _clear(l, points, floor) -> bool:
    return all(incidence_residual(P, l) >= floor for P in points)


def _conjugable(F: Pencil, d, tol: Tolerance) -> bool:
    """The conic conjugate to ``d`` is fitted and well conditioned."""
    try:
        return conic_rank(conjugate_line_conic(F, d), tol) == 3
    except GeometryError:
        return False


def _draw_pencil(rng, tol: Tolerance) -> Scene:
    mode = int(rng.integers(3))
    if mode == 2:
        conics = tuple(Conic([_rational(rng) for _ in range(6)]) for _ in range(2))
        return Scene(conics=conics)
    pts = tuple(ProjPoint(_point(rng, complex_coords=mode == 1)) for _ in range(4))
    return Scene(base_points=pts)


def _draw_members(rng, F: Pencil, tol: Tolerance) -> tuple[HomPair, ...] | None:
    floor = tol.conditioning_floor
    complex_params = rng.random() < 0.25
    Q = []
    for _ in range(4):
        t = _gaussian(rng) if complex_params else _rational(rng)
        Q.append(HomPair.of(t) if rng.random() < 0.9 else HomPair(0j, 1 + 0j))
    arrays = [p.array() for p in Q]
    if any(chordal_distance(a, b) < floor for a, b in itertools.combinations(arrays, 2)):
        return None
    if any(F.is_degenerate_param(p) for p in Q):
        return None
    if any(singular_ratios(F.member(p).m)[2] < floor for p in Q):
        return None  # numerically indistinguishable from a line pair
    return tuple(Q)


def _draw_aux(rng, F: Pencil, Q, tol: Tolerance) -> dict | None:
    floor = tol.conditioning_floor
    base, doubles = list(F.base), list(F.doubles)
    special = base + doubles

    P = ProjPoint(_point(rng))
    if not _far(P.coords, special, floor):
        return None

    d = ProjLine(_point(rng))
    if not (_clear(d, special, floor) and _conjugable(F, d, tol)):
        return None

    i = int(rng.integers(4))
    secant = join(base[i], ProjPoint(_point(rng)), tol)
    others = base[:i] + base[i + 1:]
    if not _clear(secant, others, floor):
        return None

    def aux_conic(n):
        shared = [base[j] for j in rng.permutation(4)[:n]]
        extra = [ProjPoint(_point(rng)) for _ in range(5 - n)]
        if not all(_far(X.coords, special + extra[:k], floor) for k, X in enumerate(extra)):
            return None
        try:
            C = conic_through_5(shared + extra, tol)
        except GeometryError:
            return None
        if conic_rank(C, tol) < 3:
            return None
        rest = [X for X in base if not any(X is S for S in shared)]
        if any(abs(evaluate(C, X)) < floor for X in rest):
            return None
        return C

    aux2, aux3 = aux_conic(2), aux_conic(3)
    if aux2 is None or aux3 is None:
        return None

    V = ProjPoint(_point(rng))
    if not _far(V.coords, special, floor):
        return None
    try:
        l1 = join(V, ProjPoint(_point(rng)), tol)
        l2 = join(V, ProjPoint(_point(rng)), tol)
    except GeometryError:
        return None
    if chordal_distance(l1.coords, l2.coords) < floor:
        return None
    lines = lines_from_params(l1, l2, Q)
    if not all(_clear(l, special, floor) and _conjugable(F, l, tol) for l in lines):
        return None

    labeling = [int(j) for j in rng.permutation(4)]
    return {
        "point": P,
        "line": d,
        "secant": secant,
        "aux2": aux2,
        "aux3": aux3,
        "lines": lines,
        "labeling": labeling,
    }


def generate_scene(seed: int, trial: int, tol: Tolerance = DEFAULT_TOL) -> tuple[dict, int]:
    """Draw an admissible scene for ``trial``; returns its JSON document and
    the number of rejected draws."""
    rng = np.random.default_rng([seed, trial])
    for draw in range(MAX_DRAWS):
        scene = _draw_pencil(rng, tol)
        try:
            F = scene.pencil(tol)
        except GeometryError:
            continue
        if min(chordal_distance(a.coords, b.coords) for a, b in itertools.combinations(F.base, 2)) < tol.conditioning_floor:
            continue
        Q = _draw_members(rng, F, tol)
        if Q is None:
            continue
        aux = _draw_aux(rng, F, Q, tol)
        if aux is None:
            continue
        scene.members, scene.aux = Q, aux
        return scene.to_json(), draw
    raise RuntimeError(f"trial {trial}: no admissible scene in {MAX_DRAWS} draws")


def _invariants(F: Pencil, scene: Scene) -> dict[str, float]:
    out = {}
    out["base_membership"] = max(abs(evaluate(F.member(p), X)) for p in scene.members for X in F.base)
    P = scene.aux["point"]
    out["conjugation_involution"] = conjugate_point(F, conjugate_point(F, P)).distance(P)
    d = scene.aux["line"]
    X = ProjPoint(_line_basis(d)[0])
    out["desargues_involution"] = desargues_involution(F, d, desargues_involution(F, d, X)).distance(X)
    return out


def check_scene(doc: dict, tol: Tolerance = DEFAULT_TOL) -> tuple[dict[str, float], dict[str, str]]:
    """Deviation of every method from the reference value (and residual of
    every pencil invariant) for a scene document; methods whose
    preconditions fail are returned separately with their reason."""
    scene = parse_scene(json.loads(json.dumps(doc)))
    F = scene.pencil(tol)
    report = compare_all(F, scene.members, scene.aux_config(F))
    devs: dict[str, float] = {}
    skipped: dict[str, str] = {}
    for name, r in report.methods.items():
        if r.value is None:
            skipped[name] = r.skipped
        else:
            devs[name] = ext_chordal(r.value, report.consensus)
    try:
        devs.update(_invariants(F, scene))
    except GeometryError as exc:
        skipped["invariants"] = f"{type(exc).__name__}: {exc}"
    return devs, skipped


@dataclass
class TrialResult:
    trial: int
    scene: dict | None
    deviations: dict[str, float]
    skipped: dict[str, str]
    rejected_draws: int


def run_trial(seed: int, trial: int, tol: Tolerance = DEFAULT_TOL) -> TrialResult:
    """One trial; an exception anywhere in it is recorded (under the key
    ``"trial"``) instead of aborting the whole run."""
    try:
        doc, rejected = generate_scene(seed, trial, tol)
    except Exception as exc:  # noqa: BLE001 - reported as a failed trial
        return TrialResult(trial, None, {}, {"trial": f"{type(exc).__name__}: {exc}"}, 0)
    try:
        devs, skipped = check_scene(doc, tol)
    except Exception as exc:  # noqa: BLE001
        devs, skipped = {}, {"trial": f"{type(exc).__name__}: {exc}"}
    return TrialResult(trial, doc, devs, skipped, rejected)


def _run_chunk(args):
    seed, trials, tol = args
    return [run_trial(seed, k, tol) for k in trials]


@dataclass
class FuzzReport:
    trials: int
    seed: int
    threshold: float
    failures: list[dict] = field(default_factory=list)
    worst_deviation: float = 0.0
    worst: dict | None = None
    skipped: dict[str, int] = field(default_factory=dict)
    checks: int = 0
    rejected_draws: int = 0
    elapsed: float | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, timing: bool = False) -> dict:
        doc = {
            "trials": self.trials,
            "seed": self.seed,
            "threshold": self.threshold,
            "checks": self.checks,
            "failures": self.failures,
            "worst_deviation": self.worst_deviation,
            "worst": self.worst,
            "skipped": dict(sorted(self.skipped.items())),
            "rejected_draws": self.rejected_draws,
        }
        if timing:
            doc["elapsed"] = self.elapsed
        return doc


def fuzz(trials: int, seed: int, threshold: float | None = None, tol: Tolerance = DEFAULT_TOL, jobs: int = 1) -> FuzzReport:
    """Run ``trials`` random trials; a check fails when its deviation
    exceeds ``threshold`` (default ``tol.match_eps``)."""
    if trials < 1:
        raise ValueError("trials must be positive")
    threshold = tol.match_eps if threshold is None else threshold
    start = time.perf_counter()
    indices = list(range(trials))
    if jobs > 1:
        chunks = [indices[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            results = [r for chunk in pool.map(_run_chunk, [(seed, c, tol) for c in chunks]) for r in chunk]
        results.sort(key=lambda r: r.trial)
    else:
        results = [run_trial(seed, k, tol) for k in indices]

    report = FuzzReport(trials=trials, seed=seed, threshold=threshold)
    for r in results:
        report.rejected_draws += r.rejected_draws
        for name, why in r.skipped.items():
            report.skipped[name] = report.skipped.get(name, 0) + 1
            if name not in MAY_SKIP:
                # every auxiliary object was drawn admissible, so a skip is a defect
                report.failures.append({"trial": r.trial, "method": name, "deviation": 1.0, "reason": why, "scene": encode(r.scene)})
        for name, dev in r.deviations.items():
            report.checks += 1
            if dev > report.worst_deviation or report.worst is None:
                report.worst_deviation = dev
                report.worst = {"trial": r.trial, "method": name}
            if not dev <= threshold:
                report.failures.append({"trial": r.trial, "method": name, "deviation": dev, "scene": encode(r.scene)})
    report.elapsed = time.perf_counter() - start
    return report
