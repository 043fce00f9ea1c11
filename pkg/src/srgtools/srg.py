"""Analytic SRG outer bounds for primitive systems and expression trees.

LTI bounds follow the h-convex-hull characterization: sample the frequency
response on an adaptive grid (restricted to the signal-class band when one
is present), fold into the upper half-plane, and hull hyperbolically. Static
nonlinearities get the incremental-sector disc. Expression nodes map to the
four region rules: sum, product, inversion, scaling. All-LTI subtrees are
first collapsed to a single rational function, which is exact arithmetic and
avoids compounding per-node outer slack.
"""

from dataclasses import dataclass

import numpy as np

from . import regions as rg
from .operators import (
    Compose,
    Feedback,
    Inverse,
    Lti,
    NormalMatrix,
    Scale,
    StaticNL,
    Sum,
    chord_slope_bounds,
    count_nodes,
    rational_of,
    _strip,
)

__all__ = [
    "NoAnalyticBoundError",
    "SrgBound",
    "UnboundedNyquistError",
    "srg_bound_to_dict",
    "srg_of_expr",
    "srg_of_lti",
    "srg_of_normal_matrix",
    "srg_of_sector",
    "srg_of_static",
]


class UnboundedNyquistError(ValueError):
    """A pole sits on the imaginary axis, so |G(jw)| blows up at finite w."""

    def __init__(self, omega):
        self.omega = float(omega)
        super().__init__(
            "pole on the imaginary axis near omega = %g rad/s; the frequency "
            "response is unbounded there" % self.omega
        )


class NoAnalyticBoundError(ValueError):
    """A leaf has no analytic SRG constructor (sampling may still apply)."""


@dataclass(frozen=True)
class SrgBound:
    region: rg.Region
    signal_class: object
    exactness: str
    rule_trace: tuple


def srg_bound_to_dict(b):
    d = rg.region_to_dict(b.region)
    d["class"] = None if b.signal_class is None else b.signal_class.to_dict()
    d["exactness"] = b.exactness
    d["rule_trace"] = list(b.rule_trace)
    return d


# ---------------------------------------------------------------------------
# LTI bounds
# ---------------------------------------------------------------------------

GRID_POINTS_PER_DECADE = 2000
_TURN_LIMIT = np.deg2rad(2.0)


def _tf_eval(num, den, w):
    s = 1j * np.asarray(w, dtype=float)
    return np.polyval(num[::-1], s) / np.polyval(den[::-1], s)


def _log_grid(w_lo, w_hi, per_decade=GRID_POINTS_PER_DECADE):
    decades = max(np.log10(w_hi / w_lo), 1e-9)
    n = max(int(np.ceil(decades * per_decade)), 16)
    return np.logspace(np.log10(w_lo), np.log10(w_hi), min(n, 60000))

def _refine_by_turning(w, g, num, den, max_pts=120000):
    """Bisect (log-midpoint) wherever the response curve turns faster than
    the 2-degree budget per step; hull accuracy is set by turning angle."""
    for _ in range(14):
        v = np.diff(g)
        keep = np.abs(v) > 0
        ang = np.zeros(len(v) - 1)
        both = keep[:-1] & keep[1:]
        ang[both] = np.abs(np.angle(v[1:][both] * np.conj(v[:-1][both])))
        bad = np.nonzero(ang > _TURN_LIMIT)[0]
        if len(bad) == 0 or len(w) >= max_pts:
            break
        cut = np.unique(np.concatenate([bad, bad + 1]))
        mids = np.sqrt(w[cut] * w[cut + 1])
        w = np.unique(np.concatenate([w, mids]))
        g = _tf_eval(num, den, w)
    return w, g


def _nyquist_samples(num, den, band):
    """Frequency-response samples plus the real ideal endpoints.

    Returns (samples, endpoints, unbounded) where endpoints are the finite
    real limit values included as ideal hull vertices and unbounded reports
    |G| -> infinity along the sampled set.
    """
    improper = len(num) > len(den)
    g0 = num[0] / den[0]
    if band is None:
        w_lo, w_hi = 1e-3, 1e3
    else:
        lo, hi = band
        w_hi = hi
        w_lo = max(lo, hi * 1e-8)
    w = _log_grid(w_lo, w_hi)

    endpoints = []
    unbounded = False
    if band is None:
        # Walk outward until the response settles (proper) or leaves the
        # truncation annulus (improper).
        if improper:
            while abs(_tf_eval(num, den, w[-1])) < rg.TRUNC_HI and w[-1] < 1e12:
                ext = _log_grid(w[-1], w[-1] * 10.0, per_decade=200)[1:]
                w = np.concatenate([w, ext])
            unbounded = True
        else:
            ginf = (num[-1] / den[-1]) if len(num) == len(den) else 0.0
            while (
                abs(_tf_eval(num, den, w[-1]) - ginf) > 1e-9 * max(1.0, abs(ginf))
                and w[-1] < 1e12
            ):
                ext = _log_grid(w[-1], w[-1] * 10.0, per_decade=200)[1:]
                w = np.concatenate([w, ext])
            endpoints.append(complex(ginf))
        while abs(_tf_eval(num, den, w[0]) - g0) > 1e-9 * max(1.0, abs(g0)) and w[0] > 1e-12:
            ext = _log_grid(w[0] / 10.0, w[0], per_decade=200)[:-1]
            w = np.concatenate([ext, w])
        endpoints.append(complex(g0))
    elif band[0] == 0.0:
        endpoints.append(complex(g0))

    g = _tf_eval(num, den, w)
    w, g = _refine_by_turning(w, g, num, den)
    return g, np.array(endpoints, dtype=complex), unbounded


def _circle_fit(samples, endpoints):
    """Detect a response lying exactly on a circle through two real ideal
    points; the enclosed disc is then the hull of the closed contour."""
    if len(endpoints) != 2:
        return None
    x1, x2 = sorted([endpoints[0].real, endpoints[1].real])
    c, r = 0.5 * (x1 + x2), 0.5 * (x2 - x1)
    if r <= 0:
        return None
    dev = float(np.max(np.abs(np.abs(samples - c) - r)))
    if dev > 1e-7 * max(1.0, r):
        return None
    return c, r, dev


def _lti_region(num, den, band, resolution):
    num, den = _strip(num, den)
    if len(num) == 1 and len(den) == 1:
        k = num[0] / den[0]
        region = rg.make_region([rg.PointSet(np.array([k], dtype=complex))], False, 0.0)
        return region, True, "static gain %g" % k
    poles = np.roots(den[::-1])
    for p in poles:
        if abs(p.real) <= 1e-9 * max(1.0, abs(p)):
            raise UnboundedNyquistError(abs(p.imag))
    samples, endpoints, unbounded = _nyquist_samples(num, den, band)

    fit = _circle_fit(samples, endpoints)
    if fit is not None and not unbounded:
        c, r, dev = fit
        gap = float(np.max(np.abs(np.diff(samples)))) if len(samples) > 1 else 0.0
        res = dev + gap * gap / (8.0 * r) + 1e-12
        region = rg.make_region([rg.Disc(complex(c), r)], False, res)
        return region, False, "closed Nyquist contour on a real-anchored circle"

    pts = np.concatenate([samples, endpoints])
    region = rg.h_convex_hull(pts, resolution=resolution)
    prims = region.primitives
    if prims and all(isinstance(p, rg.Segment) for p in prims):
        # Vertical-line response: the hull is exact up to the measured
        # line-fit residual, not the requested resolution.
        x = prims[0].a.real
        res = float(np.max(np.abs(pts[np.isfinite(pts)].real - x))) + 1e-12
        region = rg.Region(prims, region.contains_infinity, res)
    if unbounded:
        region = rg.Region(region.primitives, True, region.resolution)
    note = "Nyquist hull over %s" % ("the class band" if band is not None else "the full line")
    return region, False, note


def srg_of_lti(num, den, cls=None, resolution=rg.DEFAULT_RESOLUTION):
    """Outer SRG bound of a rational transfer function over the class band."""
    band = None if cls is None else cls.band
    region, exact, note = _lti_region(num, den, band, resolution)
    return SrgBound(
        region, cls, "exact" if exact else "outer", ("lti: " + note,)
    )


# ---------------------------------------------------------------------------
# Other leaves
# ---------------------------------------------------------------------------


def srg_of_sector(bounds, cls=None):
    """Theorem-style incremental sector disc: center (mu+lam)/2, radius (lam-mu)/2."""
    c = 0.5 * (bounds.mu + bounds.lam)
    r = 0.5 * (bounds.lam - bounds.mu)
    if r == 0.0:
        prim = rg.PointSet(np.array([c], dtype=complex))
    else:
        prim = rg.Disc(complex(c), r)
    region = rg.make_region([prim], False, 0.0)
    return SrgBound(region, cls, "outer", ("sector disc [%g, %g]" % (bounds.mu, bounds.lam),))


def srg_of_static(nl, cls=None):
    """Certified sector disc of a static nonlinearity over the class amplitude."""
    amp = None if cls is None else cls.amplitude
    b = chord_slope_bounds(nl, amp)
    out = srg_of_sector(b, cls)
    return SrgBound(
        out.region,
        cls,
        "outer",
        ("static %s: sector disc [%g, %g]" % (nl.kind, b.mu, b.lam),),
    )


def srg_of_normal_matrix(eigenvalues, cls=None, resolution=rg.DEFAULT_RESOLUTION):
    """SRG of a normal operator: the h-convex hull of its spectrum."""
    eig = np.asarray([complex(z) for z in eigenvalues], dtype=complex)
    if len(eig) == 0:
        raise ValueError("need at least one eigenvalue")
    if len(np.unique(eig)) == 1:
        region = rg.make_region([rg.PointSet(eig[:1])], False, 0.0)
    else:
        region = rg.h_convex_hull(eig, resolution=resolution)
    return SrgBound(region, cls, "exact", ("normal matrix: h-hull of the spectrum",))


# ---------------------------------------------------------------------------
# Expression recursion
# ---------------------------------------------------------------------------


def _fmt_rational(num, den):
    return "num=%s den=%s" % ([float(c) for c in num], [float(c) for c in den])


def srg_of_expr(expr, cls=None, resolution=rg.DEFAULT_RESOLUTION, static_refiner=None):
    """Recursive outer bound; one rule-trace entry per expression node.

    ``static_refiner`` optionally replaces the certified sector disc of a
    static leaf with a caller-supplied region (the uncertified sampled
    refinement path); margins stay sound only for the certified default.
    """
    region, exact, trace = _srg_node(expr, cls, resolution, static_refiner)
    return SrgBound(region, cls, "exact" if exact else "outer", tuple(trace))


def _absorbed(expr):
    return ["absorbed into the enclosing rational form"] * (count_nodes(expr) - 1)


def _srg_node(expr, cls, res, refiner):
    band = None if cls is None else cls.band
    if isinstance(expr, Lti):
        region, exact, note = _lti_region(expr.num, expr.den, band, res)
        return region, exact, ["lti: " + note]

    if not isinstance(expr, (StaticNL, NormalMatrix)):
        rat = rational_of(expr)
        if rat is not None:
            region, exact, note = _lti_region(rat[0], rat[1], band, res)
            head = "%s: collapsed exactly to %s; %s" % (
                type(expr).__name__.lower(),
                _fmt_rational(*rat),
                note,
            )
            return region, exact, [head] + _absorbed(expr)

    if isinstance(expr, StaticNL):
        if refiner is not None:
            refined = refiner(expr, cls)
            if refined is not None:
                return refined, False, ["static %s: sampled refinement (uncertified)" % expr.kind]
        b = srg_of_static(expr, cls)
        return b.region, False, list(b.rule_trace)

    if isinstance(expr, NormalMatrix):
        b = srg_of_normal_matrix(expr.eigenvalues, cls, res)
        return b.region, True, list(b.rule_trace)

    if isinstance(expr, Sum):
        regions, exacts, traces = [], [], []
        for c in expr.children:
            r_c, e_c, t_c = _srg_node(c, cls, res, refiner)
            regions.append(r_c)
            exacts.append(e_c)
            traces.extend(t_c)
        acc = regions[0]
        for r_c in regions[1:]:
            acc = rg.minkowski_sum(acc, r_c)
        return acc, False, ["sum: Minkowski sum of child bounds"] + traces

    if isinstance(expr, Compose):
        r_o, e_o, t_o = _srg_node(expr.outer, cls, res, refiner)
        r_i, e_i, t_i = _srg_node(expr.inner, cls, res, refiner)
        prod = rg.minkowski_product(r_o, r_i, n=rg.grid_size(res))
        return prod, False, ["compose: Minkowski product of child bounds"] + t_o + t_i

    if isinstance(expr, Inverse):
        r_c, e_c, t_c = _srg_node(expr.child, cls, res, refiner)
        return rg.invert(r_c), False, ["inverse: region inversion"] + t_c

    if isinstance(expr, Scale):
        r_c, e_c, t_c = _srg_node(expr.child, cls, res, refiner)
        exact = e_c and expr.alpha.imag == 0.0
        return rg.scale(r_c, expr.alpha), exact, ["scale by %s" % (expr.alpha,)] + t_c

    if isinstance(expr, Feedback):
        r_p, e_p, t_p = _srg_node(expr.plant, cls, res, refiner)
        r_c, e_c, t_c = _srg_node(expr.controller, cls, res, refiner)
        loop = rg.invert(rg.minkowski_sum(rg.invert(r_c), r_p))
        head = "feedback: invert(sum(invert(controller), plant))"
        return loop, False, [head] + t_p + t_c

    raise NoAnalyticBoundError(
        "no analytic SRG constructor for %r" % (type(expr).__name__,)
    )
