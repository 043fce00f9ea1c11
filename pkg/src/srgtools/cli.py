"""Command-line front door and the JSON API behind the web console.

Five offline commands (bound, margin, sensitivity, sample, render) plus
``serve``, a stateless HTTP server exposing the same computations. Every
response body is produced by the payload builders the CLI prints, through
one canonical JSON encoder, so a shell pipeline and the console see
byte-identical output for identical inputs.

Exit codes: 0 success, 2 input validation failure, 3 numeric or geometry
failure during computation. Failures print a machine-readable JSON
diagnostic to stderr.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import regions as rg
from .analysis import (
    margin_report_to_dict,
    robustness_margin,
    sensitivity_margin,
    sensitivity_srg,
)
from .operators import Inverse, expr_from_dict
from .sampling import sample_srg, sample_to_csv, sample_to_dict
from .signals import SignalClass
from .srg import srg_bound_to_dict, srg_of_expr

__all__ = ["JobSpec", "run", "main", "build_app", "canonical_json", "render_svg"]


def canonical_json(payload):
    """The one JSON shape used everywhere: sorted keys, two-space indent,
    trailing newline, non-finite floats rejected (sentinels are explicit)."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _error_payload(code, exc):
    return {
        "schema_version": rg.SCHEMA_VERSION,
        "error": {"code": code, "type": type(exc).__name__, "message": str(exc)},
    }


# ---------------------------------------------------------------------------
# Input parsing (phase 1: failures here are validation errors)
# ---------------------------------------------------------------------------


def _load_json_arg(text, what):
    """Accept inline JSON or a path to a JSON file."""
    if text is None:
        return None
    stripped = text.strip()
    if not stripped.startswith(("{", "[")):
        if not os.path.exists(text):
            raise ValueError("%s: no such file: %s" % (what, text))
        with open(text, "r", encoding="utf-8") as fh:
            stripped = fh.read()
    try:
        return json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise ValueError("%s is not valid JSON: %s" % (what, exc)) from exc


def _parse_expr(d, what):
    if d is None:
        raise ValueError("missing required field: %s" % what)
    try:
        return expr_from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("%s: %s" % (what, exc)) from exc


def _parse_class(d):
    if d is None:
        return None
    try:
        return SignalClass.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("class: %s" % exc) from exc


def _parse_resolution(v):
    if v is None:
        return rg.DEFAULT_RESOLUTION
    res = float(v)
    if not (res > 0.0) or not np.isfinite(res):
        raise ValueError("resolution must be a positive finite number")
    return res


def _parse_count(v, what, default):
    if v is None:
        return default
    n = int(v)
    if n < 1:
        raise ValueError("%s must be a positive integer" % what)
    return n


def sampled_refiner(n_pairs, seed, resolution):
    """Static-SRG refinement hook: hull of sampled operator z-points.

    Uncertified by construction; only wired in behind --trust-sampled.
    """

    def refine(nl, cls):
        cls_eff = cls if cls is not None else SignalClass()
        sample = sample_srg(nl, cls_eff, n_pairs, seed)
        if len(sample.points) == 0:
            return None
        return rg.h_convex_hull(sample.points, resolution=resolution)

    return refine


# ---------------------------------------------------------------------------
# Payload builders (phase 2: failures here are geometry/numeric errors)
# ---------------------------------------------------------------------------


def bound_payload(expr, cls, resolution, refiner=None):
    return srg_bound_to_dict(srg_of_expr(expr, cls, resolution, static_refiner=refiner))


def margin_payload(controller, plant, cls, resolution, refiner=None):
    report = robustness_margin(controller, plant, cls=cls, resolution=resolution,
                               static_refiner=refiner)
    return margin_report_to_dict(report)


def sensitivity_payload(plant, controller, cls, resolution, refiner=None):
    report = sensitivity_margin(plant, controller, cls=cls, resolution=resolution,
                                static_refiner=refiner)
    bound = sensitivity_srg(plant, controller, cls=cls, resolution=resolution,
                            static_refiner=refiner)
    return {
        "schema_version": rg.SCHEMA_VERSION,
        "report": margin_report_to_dict(report),
        "srg": srg_bound_to_dict(bound),
    }


def sample_payload(expr, cls, n_pairs, seed):
    return sample_to_dict(sample_srg(expr, cls, n_pairs, seed))


# ---------------------------------------------------------------------------
# SVG rendering
# ---------------------------------------------------------------------------

_CANVAS_W = 640
_CANVAS_H = 480
_FILL_COLORS = ("#2b6fb3", "#c0392b")
_POLY_CAP = 2048


def _f(x):
    return "%.8g" % float(x)


class _View:
    """World-to-pixel map; drawn inside one uniform matrix() group so the
    test side can recover world coordinates from element attributes."""

    __slots__ = ("s", "tx", "ty")

    def __init__(self, box):
        x0, x1, y0, y1 = box
        self.s = min(_CANVAS_W / (x1 - x0), _CANVAS_H / (y1 - y0))
        self.tx = 0.5 * _CANVAS_W - self.s * 0.5 * (x0 + x1)
        self.ty = 0.5 * _CANVAS_H + self.s * 0.5 * (y0 + y1)

    def px(self, z):
        z = complex(z)
        return self.tx + self.s * z.real, self.ty - self.s * z.imag

    def matrix(self):
        return "matrix(%s 0 0 %s %s %s)" % (_f(self.s), _f(-self.s), _f(self.tx), _f(self.ty))

    def world_box(self):
        x0 = (0.0 - self.tx) / self.s
        x1 = (_CANVAS_W - self.tx) / self.s
        y0 = (self.ty - _CANVAS_H) / self.s
        y1 = self.ty / self.s
        return x0, x1, y0, y1


def _extent_points(region):
    pts = []
    for p in region.primitives:
        if isinstance(p, rg.Disc):
            c, r = p.center, p.radius
            pts += [c - r, c + r, c - 1j * r, c + 1j * r]
        elif isinstance(p, rg.Segment):
            pts += [p.a, p.b]
        elif isinstance(p, rg.ConvexPolygon):
            pts += list(p.vertices)
        elif isinstance(p, rg.PointSet):
            q, d = p.points, p.dilation
            pts += [
                complex(q.real.min() - d, q.imag.min() - d),
                complex(q.real.max() + d, q.imag.max() + d),
            ]
        elif isinstance(p, rg.HalfPlaneRe):
            pts.append(complex(p.c, 0.0))
        else:
            m = p.max_modulus()
            if np.isfinite(m):
                pts += [complex(m, m), complex(-m, -m)]
    return pts


def _view_for(regions, extra=()):
    cand = [complex(-1.0), complex(1.0)]
    for region in regions:
        cand += _extent_points(region)
    cand += [complex(w) for w in extra]
    # Truncation-capped geometry would zoom the frame out to nothing.
    cand = [z for z in cand if np.isfinite(z) and abs(z) <= 1e3]
    if not cand:
        cand = [complex(-2, -2), complex(2, 2)]
    xs = [z.real for z in cand]
    ys = [z.imag for z in cand]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    w = max(x1 - x0, 1e-6)
    h = max(y1 - y0, 1e-6)
    pad = 0.1
    return _View((x0 - pad * w, x1 + pad * w, y0 - pad * h - 0.05 * h, y1 + pad * h + 0.05 * h))


def _decimate(arr, cap=_POLY_CAP):
    if len(arr) <= cap:
        return arr
    step = int(np.ceil(len(arr) / cap))
    return arr[::step]


def _poly_attr(zs):
    return " ".join("%s,%s" % (_f(z.real), _f(z.imag)) for z in zs)


def _sector_outlines(p):
    mask = np.isfinite(p.lo) & np.isfinite(p.hi) & (p.hi >= p.lo)
    if not np.any(mask):
        return []
    h = 2.0 * np.pi / p.n
    mids = -np.pi + (np.arange(p.n) + 0.5) * h
    idx = np.nonzero(mask)[0]
    # Contiguous index runs, merged across the -pi/pi seam.
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    runs = np.split(idx, breaks + 1)
    if len(runs) > 1 and idx[0] == 0 and idx[-1] == p.n - 1:
        runs[0] = np.concatenate([runs[-1] - p.n, runs[0]])
        runs = runs[:-1]
    polys = []
    for run in runs:
        k = run % p.n
        ang = mids[k] + np.where(run < 0, -2.0 * np.pi, 0.0)
        outer = np.exp(p.hi[k]) * np.exp(1j * ang)
        inner = np.exp(p.lo[k]) * np.exp(1j * ang)
        polys.append(np.concatenate([_decimate(outer), _decimate(inner)[::-1]]))
    return polys


def _prim_svg(p, view, out):
    hair = 1.5 / view.s
    if isinstance(p, rg.Disc):
        out.append(
            '<circle cx="%s" cy="%s" r="%s" stroke-width="%s"/>'
            % (_f(p.center.real), _f(p.center.imag), _f(p.radius), _f(hair))
        )
    elif isinstance(p, rg.Segment):
        out.append(
            '<line x1="%s" y1="%s" x2="%s" y2="%s" stroke-width="%s"/>'
            % (_f(p.a.real), _f(p.a.imag), _f(p.b.real), _f(p.b.imag), _f(hair))
        )
    elif isinstance(p, rg.ConvexPolygon):
        out.append(
            '<polygon points="%s" stroke-width="%s"/>'
            % (_poly_attr(_decimate(p.vertices)), _f(hair))
        )
    elif isinstance(p, rg.HalfPlaneRe):
        x0, x1, y0, y1 = view.world_box()
        if p.side == ">=":
            xa, xb = p.c, max(x1, p.c) + 1.0
        else:
            xa, xb = min(x0, p.c) - 1.0, p.c
        out.append(
            '<rect x="%s" y="%s" width="%s" height="%s" stroke-width="%s"/>'
            % (_f(xa), _f(y0 - 1.0), _f(xb - xa), _f(y1 - y0 + 2.0), _f(hair))
        )
    elif isinstance(p, rg.PointSet):
        q = _decimate(p.points, 4096)
        width = max(2.0 * p.dilation, hair)
        if len(q) == 1:
            out.append(
                '<circle cx="%s" cy="%s" r="%s" stroke-width="%s"/>'
                % (_f(q[0].real), _f(q[0].imag), _f(max(p.dilation, 2.0 / view.s)), _f(hair))
            )
        else:
            d = "M " + " L ".join("%s %s" % (_f(z.real), _f(z.imag)) for z in q)
            out.append(
                '<path d="%s" fill="none" stroke-width="%s" '
                'stroke-linecap="round" stroke-linejoin="round"/>' % (d, _f(width))
            )
    elif isinstance(p, rg.SectorEnvelope):
        for poly in _sector_outlines(p):
            out.append(
                '<polygon points="%s" stroke-width="%s"/>' % (_poly_attr(poly), _f(hair))
            )
    elif isinstance(p, rg.HPolygon):
        chain = np.concatenate([p.boundary, np.conj(p.boundary)[::-1]])
        out.append(
            '<polygon points="%s" stroke-width="%s"/>'
            % (_poly_attr(_decimate(chain, 4096)), _f(hair))
        )
    elif isinstance(p, rg.LogPolarBox):
        th = np.linspace(p.theta_lo, p.theta_hi, 64)
        outer = np.exp(p.rho_hi) * np.exp(1j * th)
        inner = np.exp(p.rho_lo) * np.exp(1j * th)
        poly = np.concatenate([outer, inner[::-1]])
        out.append('<polygon points="%s" stroke-width="%s"/>' % (_poly_attr(poly), _f(hair)))


def _region_group(region, color, view, out):
    out.append('<g fill="%s" fill-opacity="0.4" stroke="%s" stroke-opacity="0.9">' % (color, color))
    for p in region.primitives:
        _prim_svg(p, view, out)
    out.append("</g>")


def render_svg(regions, labels=(), witness=None, title="srg"):
    """Regions on the complex plane: real axis rightward, imaginary upward,
    unit markers at -1 and +1, optional dashed witness labeled with its
    length. Geometry lives in one matrix() group in world coordinates."""
    view = _view_for(regions, extra=witness or ())
    x0, x1, y0, y1 = view.world_box()
    hair = 1.0 / view.s
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_CANVAS_W, _CANVAS_H, _CANVAS_W, _CANVAS_H),
        "<title>%s</title>" % title,
        '<rect width="%d" height="%d" fill="white"/>' % (_CANVAS_W, _CANVAS_H),
        '<g transform="%s">' % view.matrix(),
        '<g stroke="#888888" stroke-width="%s">' % _f(hair),
        '<line x1="%s" y1="0" x2="%s" y2="0"/>' % (_f(x0), _f(x1)),
        '<line x1="0" y1="%s" x2="0" y2="%s"/>' % (_f(y0), _f(y1)),
        "</g>",
        '<g fill="#333333">',
        '<circle cx="-1" cy="0" r="%s"/>' % _f(3.0 / view.s),
        '<circle cx="1" cy="0" r="%s"/>' % _f(3.0 / view.s),
        "</g>",
    ]
    for region, color in zip(regions, _FILL_COLORS):
        _region_group(region, color, view, out)
    if witness is not None:
        wa, wb = complex(witness[0]), complex(witness[1])
        out.append(
            '<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#222222" '
            'stroke-width="%s" stroke-dasharray="%s %s"/>'
            % (
                _f(wa.real), _f(wa.imag), _f(wb.real), _f(wb.imag),
                _f(hair * 1.5), _f(6.0 / view.s), _f(4.0 / view.s),
            )
        )
    out.append("</g>")
    # Text outside the flipped group so it is not mirrored.
    font = 'font-family="sans-serif" font-size="12"'
    for val in (-1.0, 1.0):
        px, py = view.px(complex(val))
        out.append('<text x="%s" y="%s" %s fill="#333333">%+g</text>' % (_f(px + 5), _f(py + 14), font, val))
    px, py = view.px(complex(x1))
    out.append('<text x="%s" y="%s" %s fill="#888888">Re</text>' % (_f(px - 22), _f(py - 6), font))
    px, py = view.px(complex(0, y1))
    out.append('<text x="%s" y="%s" %s fill="#888888">Im</text>' % (_f(px + 6), _f(py + 14), font))
    for i, label in enumerate(labels):
        out.append(
            '<text x="10" y="%d" %s fill="%s">%s</text>'
            % (20 + 16 * i, font, _FILL_COLORS[i % len(_FILL_COLORS)], label)
        )
    if witness is not None:
        wa, wb = complex(witness[0]), complex(witness[1])
        px, py = view.px(0.5 * (wa + wb))
        out.append(
            '<text x="%s" y="%s" %s fill="#222222">d = %.6g</text>'
            % (_f(px + 6), _f(py - 6), font, abs(wa - wb))
        )
    if any(region.contains_infinity for region in regions):
        out.append(
            '<text x="10" y="%d" %s fill="#555555">region extends to infinity</text>'
            % (_CANVAS_H - 10, font)
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _render_text(job, parsed):
    cls, res, refiner = parsed["cls"], parsed["resolution"], parsed["refiner"]
    if parsed.get("system") is not None:
        bound = srg_of_expr(parsed["system"], cls, res, static_refiner=refiner)
        return render_svg(
            [bound.region],
            labels=["SRG bound (%s)" % bound.exactness],
            title="srgtools bound",
        )
    controller, plant = parsed["controller"], parsed["plant"]
    report = robustness_margin(controller, plant, cls=cls, resolution=res,
                               static_refiner=refiner)
    a = srg_of_expr(Inverse(controller), cls, res, static_refiner=refiner)
    b = srg_of_expr(plant, cls, res, static_refiner=refiner)
    neg_closure = rg.neg(rg.chord_closure(b.region))
    labels = [
        "SRG(controller^-1)",
        "-SRG(plant), chord closure | separated: %s" % report.separated,
    ]
    return render_svg([a.region, neg_closure], labels=labels, witness=report.witness,
                      title="srgtools margin")


# ---------------------------------------------------------------------------
# Jobs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JobSpec:
    command: str
    system: str | None = None
    plant: str | None = None
    controller: str | None = None
    cls: str | None = None
    resolution: float | None = None
    seed: int = 0
    pairs: int | None = None
    out: str | None = None
    port: int = 8000
    trust_sampled: bool = False


def _parse_inputs(job):
    parsed = {
        "system": None,
        "plant": None,
        "controller": None,
        "cls": _parse_class(_load_json_arg(job.cls, "class")),
        "resolution": _parse_resolution(job.resolution),
        "seed": int(job.seed),
    }
    need_system = job.command in ("bound", "sample")
    need_pair = job.command in ("margin", "sensitivity")
    if job.command == "render":
        if job.system is None and (job.plant is None or job.controller is None):
            raise ValueError("render needs --system, or --plant with --controller")
        need_system = job.system is not None
        need_pair = not need_system
    if need_system:
        parsed["system"] = _parse_expr(_load_json_arg(job.system, "system"), "system")
    if need_pair:
        parsed["plant"] = _parse_expr(_load_json_arg(job.plant, "plant"), "plant")
        parsed["controller"] = _parse_expr(_load_json_arg(job.controller, "controller"), "controller")
    if job.command == "sample":
        parsed["pairs"] = _parse_count(job.pairs, "pairs", 100)
        if parsed["cls"] is None:
            parsed["cls"] = SignalClass()
    refiner = None
    if job.trust_sampled:
        refiner = sampled_refiner(
            _parse_count(job.pairs, "pairs", 400), parsed["seed"], parsed["resolution"]
        )
    parsed["refiner"] = refiner
    if job.command == "serve" and not (1024 <= int(job.port) <= 65535):
        raise ValueError("port must lie in [1024, 65535]")
    return parsed


def _job_text(job, parsed):
    cls, res, refiner = parsed["cls"], parsed["resolution"], parsed["refiner"]
    if job.command == "bound":
        return canonical_json(bound_payload(parsed["system"], cls, res, refiner))
    if job.command == "margin":
        return canonical_json(
            margin_payload(parsed["controller"], parsed["plant"], cls, res, refiner)
        )
    if job.command == "sensitivity":
        return canonical_json(
            sensitivity_payload(parsed["plant"], parsed["controller"], cls, res, refiner)
        )
    if job.command == "sample":
        sample = sample_srg(parsed["system"], cls, parsed["pairs"], parsed["seed"])
        if job.out is not None and job.out.endswith(".csv"):
            return sample_to_csv(sample)
        return canonical_json(sample_to_dict(sample))
    if job.command == "render":
        return _render_text(job, parsed)
    raise ValueError("unknown command: %s" % job.command)


def run(job):
    """Execute one job; returns the process exit code."""
    try:
        parsed = _parse_inputs(job)
    except (ValueError, TypeError, KeyError, OSError) as exc:
        sys.stderr.write(canonical_json(_error_payload("validation", exc)))
        return 2
    if job.command == "serve":
        import uvicorn

        uvicorn.run(build_app(), host="127.0.0.1", port=int(job.port), log_level="warning")
        return 0
    try:
        text = _job_text(job, parsed)
    except Exception as exc:
        sys.stderr.write(canonical_json(_error_payload("geometry", exc)))
        return 3
    if job.out is not None:
        with open(job.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# HTTP API
# ---------------------------------------------------------------------------


def build_app():
    """FastAPI application with the four compute endpoints plus health.

    Handlers run the geometry inline on the event loop, so requests
    serialize; that keeps the process-wide truncation-box state safe
    without locks, and every request stays independent of the last.
    """
    from fastapi import FastAPI, Request
    from fastapi.responses import Response

    app = FastAPI(title="srgtools", version=__version__)

    def reply(payload, status=200):
        return Response(canonical_json(payload), status_code=status,
                        media_type="application/json")

    async def body_of(request):
        try:
            body = await request.json()
        except Exception as exc:
            raise ValueError("request body is not valid JSON: %s" % exc) from exc
        if not isinstance(body, dict):
            raise ValueError("request body must be a JSON object")
        return body

    def compute(fn):
        try:
            return reply(fn())
        except Exception as exc:
            return reply(_error_payload("geometry", exc), status=422)

    @app.get("/api/health")
    async def health():
        return reply({"status": "ok", "version": __version__})

    @app.post("/api/srg")
    async def api_srg(request: Request):
        try:
            body = await body_of(request)
            expr = _parse_expr(body.get("system"), "system")
            cls = _parse_class(body.get("class"))
            res = _parse_resolution(body.get("resolution"))
        except (ValueError, TypeError, KeyError) as exc:
            return reply(_error_payload("validation", exc), status=400)
        return compute(lambda: bound_payload(expr, cls, res))

    @app.post("/api/margin")
    async def api_margin(request: Request):
        try:
            body = await body_of(request)
            controller = _parse_expr(body.get("controller"), "controller")
            plant = _parse_expr(body.get("plant"), "plant")
            cls = _parse_class(body.get("class"))
            res = _parse_resolution(body.get("resolution"))
        except (ValueError, TypeError, KeyError) as exc:
            return reply(_error_payload("validation", exc), status=400)
        return compute(lambda: margin_payload(controller, plant, cls, res))

    @app.post("/api/sensitivity")
    async def api_sensitivity(request: Request):
        try:
            body = await body_of(request)
            plant = _parse_expr(body.get("plant"), "plant")
            controller = _parse_expr(body.get("controller"), "controller")
            cls = _parse_class(body.get("class"))
            res = _parse_resolution(body.get("resolution"))
        except (ValueError, TypeError, KeyError) as exc:
            return reply(_error_payload("validation", exc), status=400)
        return compute(lambda: sensitivity_payload(plant, controller, cls, res))

    @app.post("/api/sample")
    async def api_sample(request: Request):
        try:
            body = await body_of(request)
            expr = _parse_expr(body.get("system"), "system")
            cls = _parse_class(body.get("class")) or SignalClass()
            n_pairs = _parse_count(body.get("n_pairs"), "n_pairs", 100)
            seed = int(body.get("seed", 0))
        except (ValueError, TypeError, KeyError) as exc:
            return reply(_error_payload("validation", exc), status=400)
        return compute(lambda: sample_payload(expr, cls, n_pairs, seed))

    return app


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(
        prog="srgtools",
        description="Scaled-relative-graph bounds, separation margins and sampling.",
    )
    p.add_argument("--version", action="version", version="srgtools %s" % __version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        if "system" in flags:
            sp.add_argument("--system", help="operator expression (JSON or file)")
        if "pair" in flags:
            sp.add_argument("--plant", help="plant expression (JSON or file)")
            sp.add_argument("--controller", help="controller expression (JSON or file)")
        sp.add_argument("--class", dest="cls", help="signal class (JSON or file)")
        sp.add_argument("--resolution", type=float, help="geometric resolution (default 1e-3)")
        sp.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
        sp.add_argument("--pairs", type=int, help="number of signal pairs")
        sp.add_argument(
            "--trust-sampled",
            action="store_true",
            help="refine static blocks with sampled hulls (uncertified)",
        )
        sp.add_argument("--out", help="output file (default stdout)")
        return sp

    add("bound", "SRG outer bound of an operator expression", "system")
    add("margin", "robustness separation margin and gain bound", "pair")
    add("sensitivity", "sensitivity margin and sensitivity SRG", "pair")
    add("sample", "empirical SRG point cloud (.csv output supported)", "system")
    add("render", "SVG picture of a bound or a margin test", "system", "pair")
    sp = sub.add_parser("serve", help="stateless JSON API server")
    sp.add_argument("--port", type=int, default=8000, help="TCP port (default 8000)")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    job = JobSpec(
        command=args.command,
        system=getattr(args, "system", None),
        plant=getattr(args, "plant", None),
        controller=getattr(args, "controller", None),
        cls=getattr(args, "cls", None),
        resolution=getattr(args, "resolution", None),
        seed=getattr(args, "seed", 0),
        pairs=getattr(args, "pairs", None),
        out=getattr(args, "out", None),
        port=getattr(args, "port", 8000),
        trust_sampled=getattr(args, "trust_sampled", False),
    )
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
