"""``pencil`` command line tool.

Subcommands
-----------
info        base points, degenerate members, double points, member types
xratio      cross ratio of four members by one or all methods
fuzz        randomized cross-checking of all methods
render      SVG figure of a real scene
conjugate   conjugate of a point, or the conic conjugate to a line

Exit codes: 0 success / agreement, 1 fuzz failures, 2 input or
precondition error, 3 methods disagree.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .conics import conic_rank
from .errors import GeometryError, SceneError
from .fuzz import fuzz
from .numeric import DEFAULT_TOL, INF, HomPair, ext_chordal
from .pencil import conjugate_line_conic, conjugate_point
from .projective import ProjLine, ProjPoint
from .render import classify_conic, render_scene
from .scene import Scene, dumps, encode, encode_ext, load_scene, report_to_json
from .xratio import METHODS, MethodResult, XRReport, compare_all, run_method, xr_abstract

EXIT_OK, EXIT_FUZZ, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _complex_token(tok: str) -> complex:
    try:
        return complex(tok.strip().replace("i", "j"))
    except ValueError:
        raise InputError(f"not a complex number: {tok!r}") from None


def _parse_members(text: str) -> tuple[HomPair, ...]:
    toks = text.split(",")
    if len(toks) != 4:
        raise InputError("--members needs four comma-separated values")
    out = []
    for tok in toks:
        if tok.strip().lower() in ("inf", "infinity"):
            out.append(HomPair.of(INF))
        elif ":" in tok:
            lam, mu = tok.split(":")
            out.append(HomPair(_complex_token(lam), _complex_token(mu)))
        else:
            out.append(HomPair.of(_complex_token(tok)))
    return tuple(out)


def _parse_vec3(text: str) -> list[complex]:
    toks = text.split(",")
    if len(toks) != 3:
        raise InputError(f"expected three comma-separated coordinates, got {text!r}")
    return [_complex_token(t) for t in toks]


def _parse_window(text: str):
    toks = text.split(",")
    if len(toks) != 4:
        raise InputError("--window needs x0,y0,x1,y1")
    try:
        x0, y0, x1, y1 = (float(t) for t in toks)
    except ValueError:
        raise InputError(f"bad --window {text!r}") from None
    if not (x1 > x0 and y1 > y0):
        raise InputError("--window must satisfy x0 < x1 and y0 < y1")
    return x0, y0, x1, y1


def _load(args) -> Scene:
    if args.scene is None:
        raise InputError("--scene is required")
    if args.scene == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.scene, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read scene: {exc}") from None
    scene = load_scene(text)
    if getattr(args, "members", None):
        scene.members = _parse_members(args.members)
    return scene


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threshold(args) -> float:
    eps = DEFAULT_TOL.match_eps if args.tol is None else args.tol
    if not eps >= 0:
        raise InputError("--tol must be non-negative")
    return eps


# -- subcommands ------------------------------------------------------------------


def cmd_info(args) -> int:
    scene = _load(args)
    F = scene.pencil()
    members = []
    for p in scene.members or ():
        G = F.member(p)
        members.append({
            "param": encode(p.canonical()),
            "conic": encode(G),
            "rank": conic_rank(G, F.tol),
            "type": classify_conic(G, F.tol),
        })
    doc = {
        "generators": encode([F.gen1, F.gen2]),
        "base_points": encode(list(F.base)),
        "degenerate_params": encode([p.canonical() for p in F.degenerate_params]),
        # the same members as t in gen1 + t*gen2
        "degenerate_t": [encode_ext(HomPair(p.second, p.first).ratio()) for p in F.degenerate_params],
        "double_points": encode(list(F.doubles)),
        "members": members,
    }
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_xratio(args) -> int:
    scene = _load(args)
    if scene.members is None:
        raise InputError("no members: give them in the scene or with --members")
    eps = _threshold(args)
    F = scene.pencil()
    cfg = scene.aux_config(F)
    method = args.method
    if method == "all":
        report = compare_all(F, scene.members, cfg)
    else:
        names = [f"tangents_{i}" for i in range(4)] if method == "tangents" else [method]
        if any(n not in METHODS for n in names):
            raise InputError(f"unknown method {method!r}; choose from all, tangents, {', '.join(METHODS)}")
        # a single method reports its precondition failure as an error
        results = {n: run_method(F, scene.members, n, cfg) for n in names}
        ref = xr_abstract(F, scene.members)
        results.setdefault("abstract", MethodResult(value=ref))
        values = [r.value for r in results.values()]
        dev = max((ext_chordal(a, b) for a in values for b in values), default=0.0)
        report = XRReport(results, ref, dev)
    doc = report_to_json(report, eps)
    doc["members"] = encode(list(scene.members))
    _emit(dumps(doc), args.out)
    return EXIT_OK if report.agree(eps) else EXIT_DISAGREE


def cmd_fuzz(args) -> int:
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    if args.jobs < 1:
        raise InputError("--jobs must be at least 1")
    report = fuzz(args.trials, args.seed, threshold=_threshold(args), jobs=args.jobs)
    _emit(dumps(report.to_json(timing=args.timing)), args.out)
    return EXIT_OK if report.ok else EXIT_FUZZ


def cmd_render(args) -> int:
    scene = _load(args)
    window = _parse_window(args.window)
    if args.width < 1:
        raise InputError("--width must be positive")
    svg = render_scene(scene, window=window, width=args.width)
    _emit(svg, args.out)
    return EXIT_OK


def cmd_conjugate(args) -> int:
    scene = _load(args)
    F = scene.pencil()
    point = ProjPoint(_parse_vec3(args.point)) if args.point else None
    line = ProjLine(_parse_vec3(args.line)) if args.line else None
    if point is None and line is None:
        point, line = scene.aux.get("point"), scene.aux.get("line")
    if point is None and line is None:
        raise InputError("give --point or --line (or aux.point / aux.line in the scene)")
    doc = {}
    if point is not None:
        doc["point"] = encode(point)
        doc["conjugate_point"] = encode(conjugate_point(F, point))
    if line is not None:
        C = conjugate_line_conic(F, line)
        doc["line"] = encode(line)
        doc["conjugate_conic"] = encode(C)
        doc["double_points"] = encode(list(F.doubles))
    _emit(dumps(doc), args.out)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pencil", description="Pencils of conics and the cross ratio of four members.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def scene_args(sp, members=True):
        sp.add_argument("--scene", metavar="FILE", help="scene JSON file ('-' for stdin)")
        if members:
            sp.add_argument("--members", metavar="a,b,c,d", help="member parameters t (or lam:mu), overriding the scene")
        sp.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")

    sp = sub.add_parser("info", help="base points, degenerate members and double points")
    scene_args(sp)
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("xratio", help="cross ratio of four members")
    scene_args(sp)
    sp.add_argument("--method", default="all", metavar="NAME", help="'all' (default), 'tangents', or one of: " + ", ".join(METHODS))
    sp.add_argument("--tol", type=float, metavar="EPS", help="agreement threshold (chordal), default 1e-6")
    sp.set_defaults(func=cmd_xratio)

    sp = sub.add_parser("fuzz", help="randomized cross-checking of all methods")
    sp.add_argument("--trials", type=int, default=500, metavar="N")
    sp.add_argument("--seed", type=int, default=0, metavar="S")
    sp.add_argument("--tol", type=float, metavar="EPS", help="failure threshold (chordal), default 1e-6")
    sp.add_argument("--jobs", type=int, default=1, metavar="J", help="worker processes")
    sp.add_argument("--timing", action="store_true", help="include elapsed seconds (breaks byte-identical output)")
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("render", help="SVG figure of a real scene")
    scene_args(sp)
    sp.add_argument("--window", default="-3,-3,3,3", metavar="x0,y0,x1,y1")
    sp.add_argument("--width", type=int, default=600, metavar="PX")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("conjugate", help="conjugate point / conjugate conic of a line")
    scene_args(sp, members=False)
    sp.add_argument("--point", metavar="x,y,z")
    sp.add_argument("--line", metavar="a,b,c")
    sp.set_defaults(func=cmd_conjugate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, SceneError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
