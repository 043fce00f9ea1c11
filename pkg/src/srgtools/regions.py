"""Conjugate-symmetric plane regions and the algebra that combines them.

A region is a finite union of geometric primitives, closed under complex
conjugation, together with two bits of bookkeeping: whether the set is meant
to include the point at infinity, and an outer ``resolution`` recording how
far the stored geometry may over-reach the exact set it stands for. Every
operation in this module preserves the outer guarantee: the returned region
always contains the true image set, and ``resolution`` grows by a bound on
the slack the operation introduced.

Geometry lives inside the annulus TRUNC_LO <= |z| <= TRUNC_HI. Membership of
0 is carried by primitives that actually reach it; membership of infinity is
carried by the ``contains_infinity`` flag. Unbounded primitives (half planes)
are clipped to the annulus wherever a bounded description is required.

The workhorse for products and inversions is a log-polar sector envelope:
a uniform angular grid over [-pi, pi) holding, per sector, one interval of
log-modulus that covers everything the region contains in that sector.
Radial gaps inside a sector are filled (an outer step); angular structure is
kept exactly at grid granularity.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np

from ._geom import (
    TWO_PI,
    convex_hull,
    geodesic_chain,
    geodesic_chains_batch,
    klein_to_uhp,
    point_poly_dist,
    point_seg_dist,
    poly_area,
    poly_contains,
    poly_minkowski,
    seg_seg_dist,
    uhp_to_klein,
    wrap_angle,
)

SCHEMA_VERSION = "1"

DEFAULT_RESOLUTION = 1e-3
TRUNC_LO = 1e-6
TRUNC_HI = 1e6

_LOG_LO = math.log(TRUNC_LO)
_LOG_HI = math.log(TRUNC_HI)
_SYM_TOL = 1e-9


class UnsupportedGeometryError(ValueError):
    """The requested operation has no sound implementation for this geometry."""


class IndeterminateProductError(ValueError):
    """A product would multiply 0 by infinity, which has no outer cover."""


@contextlib.contextmanager
def truncation_box(hi):
    """Temporarily widen the truncation annulus to |z| <= hi.

    Regions must be rebuilt inside the context to benefit; existing objects
    keep their clipped geometry. Mutates module state, so not safe under
    concurrent region construction.
    """
    global TRUNC_HI, _LOG_HI
    old = TRUNC_HI
    TRUNC_HI = float(hi)
    _LOG_HI = math.log(TRUNC_HI)
    try:
        yield
    finally:
        TRUNC_HI = old
        _LOG_HI = math.log(old)


def _logc(r):
    """log of a modulus, clipped to the truncation annulus."""
    return np.log(np.clip(r, TRUNC_LO, TRUNC_HI))


def _multiset_conj_equal(pts, tol):
    """Whether a point multiset equals its conjugate within tol (sorted match)."""
    a = np.sort_complex(np.asarray(pts, dtype=complex))
    b = np.sort_complex(np.conj(pts))
    return bool(np.all(np.abs(a - b) <= tol))


def _grid_h(n):
    return TWO_PI / n


def _sector_index(theta, n):
    h = _grid_h(n)
    k = np.floor((wrap_angle(theta) + np.pi) / h).astype(int)
    return np.clip(k, 0, n - 1)


def grid_size(resolution):
    """Angular grid size whose sector width keeps smear below ``resolution``.

    The product backend smears each operand by one sector, so the combined
    angular blur is below 3 * h; h <= resolution / 3 on the unit circle
    keeps the modulus error budget consistent with the declared resolution.
    """
    res = max(float(resolution), 1e-6)
    n = 2 ** int(math.ceil(math.log2(4.0 * np.pi / res)))
    return int(min(max(n, 256), 65536))


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    kind = "disc"

    def mirror(self):
        return Disc(np.conj(self.center), self.radius)

    def is_self_symmetric(self):
        return abs(self.center.imag) <= _SYM_TOL * (abs(self.center) + self.radius + 1.0)

    def is_bounded(self):
        return True

    def max_modulus(self):
        return abs(self.center) + self.radius

    def min_modulus(self):
        return max(0.0, abs(self.center) - self.radius)

    def re_range(self):
        return self.center.real - self.radius, self.center.real + self.radius

    def point_distances(self, z):
        return np.maximum(0.0, np.abs(np.asarray(z, dtype=complex) - self.center) - self.radius)

    def scaled(self, alpha):
        return Disc(alpha * self.center, abs(alpha) * self.radius)

    def translated(self, w):
        return Disc(self.center + w, self.radius)

    def paint(self, n, lo, hi):
        c, r = complex(self.center), float(self.radius)
        absc = abs(c)
        if absc + r < TRUNC_LO:
            return
        ac = math.atan2(c.imag, c.real) if absc > 0.0 else 0.0
        if absc < r:
            phimax = np.pi
        elif absc == r:
            phimax = np.pi / 2
        else:
            phimax = math.asin(min(1.0, r / absc))
        h = _grid_h(n)
        edges = -np.pi + h * np.arange(n + 1)
        da = wrap_angle(edges[:-1] - ac)
        db = da + h
        contains0 = (da <= 0.0) & (db >= 0.0)
        # |phi| is monotone away from the center direction, so both radial
        # extrema over a sector sit at the angle nearest that direction.
        phi_close = np.where(contains0, 0.0, np.minimum(np.abs(da), np.abs(wrap_angle(db))))
        sel = phi_close <= phimax
        if not np.any(sel):
            return
        phi = phi_close[sel]
        s = absc * np.sin(phi)
        root = np.sqrt(np.maximum(r * r - s * s, 0.0))
        base = absc * np.cos(phi)
        r_lo = np.maximum(base - root, 0.0)
        r_hi = base + root
        ok = r_hi >= TRUNC_LO
        idx = np.nonzero(sel)[0][ok]
        np.minimum.at(lo, idx, _logc(r_lo[ok]))
        np.maximum.at(hi, idx, _logc(r_hi[ok]))

    def outer_vertices(self, eps):
        r, c = self.radius, self.center
        if r <= 0.0:
            return np.array([c])
        m = int(np.clip(np.ceil(np.pi * np.sqrt(r / (2.0 * max(eps, 1e-9)))), 8, 4096))
        ang = TWO_PI * np.arange(m) / m
        return c + (r / np.cos(np.pi / m)) * np.exp(1j * ang)

    def boundary_cloud(self, spacing):
        m = int(np.clip(np.ceil(TWO_PI * self.radius / max(spacing, 1e-9)), 8, 200000))
        ang = TWO_PI * np.arange(m) / m
        return self.center + self.radius * np.exp(1j * ang)

    def sample(self, k, rng):
        u = np.sqrt(rng.uniform(size=k))
        ang = rng.uniform(0.0, TWO_PI, size=k)
        return self.center + self.radius * u * np.exp(1j * ang)

    def to_dict(self):
        return {"kind": "disc", "center": [self.center.real, self.center.imag], "radius": float(self.radius)}


@dataclass(frozen=True)
class HalfPlaneRe:
    """Closed half plane bounded by a vertical line: Re z >= c or Re z <= c."""

    c: float
    side: str = ">="

    kind = "half_plane_re"

    def __post_init__(self):
        if self.side not in (">=", "<="):
            raise ValueError("side must be '>=' or '<='")

    def mirror(self):
        return self

    def is_self_symmetric(self):
        return True

    def is_bounded(self):
        return False

    def max_modulus(self):
        return np.inf

    def min_modulus(self):
        if self.side == ">=":
            return max(0.0, self.c)
        return max(0.0, -self.c)

    def re_range(self):
        if self.side == ">=":
            return self.c, np.inf
        return -np.inf, self.c

    def point_distances(self, z):
        re = np.asarray(z, dtype=complex).real
        if self.side == ">=":
            return np.maximum(0.0, self.c - re)
        return np.maximum(0.0, re - self.c)

    def scaled(self, alpha):
        if alpha == 0:
            return PointSet(np.zeros(1, dtype=complex))
        if np.isreal(alpha):
            a = float(np.real(alpha))
            side = self.side if a > 0 else (">=" if self.side == "<=" else "<=")
            return HalfPlaneRe(a * self.c, side)
        return ConvexPolygon(self._clip_polygon() * complex(alpha))

    def translated(self, w):
        return HalfPlaneRe(self.c + complex(w).real, self.side)

    def _clip_polygon(self):
        s = 1.0 if self.side == ">=" else -1.0
        x0 = s * self.c
        box = np.array(
            [x0 - 1j * TRUNC_HI, TRUNC_HI - 1j * TRUNC_HI, TRUNC_HI + 1j * TRUNC_HI, x0 + 1j * TRUNC_HI]
        )
        return box * s

    def paint(self, n, lo, hi):
        h = _grid_h(n)
        edges = -np.pi + h * np.arange(n + 1)
        da, db = edges[:-1], edges[1:]
        contains0 = (da <= 0.0) & (db >= 0.0)
        phi_close = np.where(contains0, 0.0, np.minimum(np.abs(da), np.abs(wrap_angle(db))))
        c = self.c if self.side == ">=" else -self.c
        shift = 0 if self.side == ">=" else n // 2
        if c > 0:
            theta_m = math.acos(min(1.0, c / TRUNC_HI))
            sel = phi_close <= theta_m
            idx = (np.nonzero(sel)[0] + shift) % n
            entry = c / np.cos(phi_close[sel])
            np.minimum.at(lo, idx, _logc(entry))
            np.maximum.at(hi, idx, _LOG_HI)
        else:
            idx = (np.arange(n) + shift) % n
            right = phi_close < np.pi / 2
            r_hi = np.full(n, TRUNC_HI)
            if c < 0:
                cosv = np.abs(np.cos(phi_close[~right]))
                r_hi[~right] = np.minimum(-c / np.maximum(cosv, 1e-300), TRUNC_HI)
            np.minimum.at(lo, idx, _LOG_LO)
            np.maximum.at(hi, idx, _logc(r_hi))

    def outer_vertices(self, eps):
        return None

    def boundary_cloud(self, spacing):
        raise UnsupportedGeometryError("half plane has no bounded boundary cloud")

    def sample(self, k, rng, span=10.0):
        width = span * (1.0 + abs(self.c))
        x = rng.uniform(0.0, width, size=k)
        y = rng.uniform(-width, width, size=k)
        s = 1.0 if self.side == ">=" else -1.0
        return self.c * 1.0 + s * x + 1j * y

    def to_dict(self):
        return {"kind": "half_plane_re", "c": float(self.c), "side": self.side}


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    kind = "segment"

    def mirror(self):
        return Segment(np.conj(self.a), np.conj(self.b))

    def is_self_symmetric(self):
        aa, bb = complex(self.a), complex(self.b)
        scale = abs(aa) + abs(bb) + 1.0
        if abs(aa.imag) <= _SYM_TOL * scale and abs(bb.imag) <= _SYM_TOL * scale:
            return True
        return abs(aa - np.conj(bb)) <= _SYM_TOL * scale

    def is_bounded(self):
        return True

    def max_modulus(self):
        return max(abs(self.a), abs(self.b))

    def min_modulus(self):
        d, _ = point_seg_dist(np.array([0j]), self.a, self.b)
        return float(d[0])

    def re_range(self):
        return min(self.a.real, self.b.real), max(self.a.real, self.b.real)

    def point_distances(self, z):
        d, _ = point_seg_dist(np.asarray(z, dtype=complex), self.a, self.b)
        return d

    def scaled(self, alpha):
        return Segment(alpha * self.a, alpha * self.b)

    def translated(self, w):
        return Segment(self.a + w, self.b + w)

    def paint(self, n, lo, hi):
        _paint_segment(n, lo, hi, complex(self.a), complex(self.b))

    def outer_vertices(self, eps):
        return np.array([self.a, self.b])

    def boundary_cloud(self, spacing):
        m = int(np.clip(np.ceil(abs(self.b - self.a) / max(spacing, 1e-9)), 2, 200000))
        t = np.linspace(0.0, 1.0, m + 1)
        return self.a + t * (self.b - self.a)

    def sample(self, k, rng):
        t = rng.uniform(size=k)
        return self.a + t * (self.b - self.a)

    def to_dict(self):
        return {
            "kind": "segment",
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
        }


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon, complex vertices in ccw order."""

    vertices: tuple

    kind = "convex_polygon"

    def __init__(self, vertices):
        v = convex_hull(np.asarray(vertices, dtype=complex))
        object.__setattr__(self, "vertices", tuple(complex(x) for x in v))

    def _v(self):
        return np.array(self.vertices, dtype=complex)

    def mirror(self):
        return ConvexPolygon(np.conj(self._v())[::-1])

    def is_self_symmetric(self):
        v = self._v()
        scale = float(np.max(np.abs(v))) + 1.0
        return _multiset_conj_equal(v, _SYM_TOL * scale)

    def is_bounded(self):
        return True

    def max_modulus(self):
        return float(np.max(np.abs(self._v())))

    def min_modulus(self):
        d, _ = point_poly_dist(np.array([0j]), self._v())
        return float(d[0])

    def re_range(self):
        v = self._v()
        return float(np.min(v.real)), float(np.max(v.real))

    def point_distances(self, z):
        d, _ = point_poly_dist(np.asarray(z, dtype=complex), self._v())
        return d

    def scaled(self, alpha):
        return ConvexPolygon(alpha * self._v())

    def translated(self, w):
        return ConvexPolygon(self._v() + w)

    def contains0(self):
        return bool(poly_contains(np.array([0j]), self._v(), tol=0.0)[0])

    def paint(self, n, lo, hi):
        v = self._v()
        if len(v) == 1:
            PointSet(v).paint(n, lo, hi)
            return
        w = np.roll(v, -1)
        scratch_lo = np.full(n, np.inf)
        scratch_hi = np.full(n, -np.inf)
        for aa, bb in zip(v, w):
            _paint_segment(n, scratch_lo, scratch_hi, complex(aa), complex(bb))
        if len(v) >= 3 and self.contains0():
            covered = scratch_hi > -np.inf
            scratch_lo[covered] = _LOG_LO
        np.minimum(lo, scratch_lo, out=lo)
        np.maximum(hi, scratch_hi, out=hi)

    def outer_vertices(self, eps):
        return self._v()

    def boundary_cloud(self, spacing):
        v = self._v()
        w = np.roll(v, -1)
        pts = [Segment(aa, bb).boundary_cloud(spacing) for aa, bb in zip(v, w)]
        return np.concatenate(pts)

    def sample(self, k, rng):
        v = self._v()
        if len(v) == 1:
            return np.full(k, v[0])
        if len(v) == 2:
            return Segment(v[0], v[1]).sample(k, rng)
        anchor = v[0]
        t1 = v[1:-1] - anchor
        t2 = v[2:] - anchor
        areas = 0.5 * np.abs(t1.real * t2.imag - t1.imag * t2.real)
        total = areas.sum()
        if total <= 0.0:
            idx = rng.integers(0, len(v), size=k)
            return v[idx]
        tri = rng.choice(len(areas), size=k, p=areas / total)
        r1 = np.sqrt(rng.uniform(size=k))
        r2 = rng.uniform(size=k)
        return anchor + t1[tri] * r1 * (1.0 - r2) + t2[tri] * r1 * r2

    def to_dict(self):
        return {"kind": "convex_polygon", "vertices": [[z.real, z.imag] for z in self.vertices]}


@dataclass(frozen=True)
class PointSet:
    """Finite point cloud, optionally dilated by a closed disc of radius ``dilation``."""

    points: tuple
    dilation: float = 0.0

    kind = "point_set"

    def __init__(self, points, dilation=0.0):
        p = np.atleast_1d(np.asarray(points, dtype=complex))
        object.__setattr__(self, "points", tuple(complex(x) for x in p))
        object.__setattr__(self, "dilation", float(dilation))

    def _p(self):
        return np.array(self.points, dtype=complex)

    def mirror(self):
        return PointSet(np.conj(self._p()), self.dilation)

    def is_self_symmetric(self):
        p = self._p()
        scale = float(np.max(np.abs(p))) + 1.0
        tol = max(_SYM_TOL * scale, 0.1 * self.dilation)
        if np.all(np.abs(p.imag) <= tol):
            return True
        return _multiset_conj_equal(p, tol)

    def is_bounded(self):
        return True

    def max_modulus(self):
        return float(np.max(np.abs(self._p()))) + self.dilation

    def min_modulus(self):
        return max(0.0, float(np.min(np.abs(self._p()))) - self.dilation)

    def re_range(self):
        p = self._p()
        return float(np.min(p.real)) - self.dilation, float(np.max(p.real)) + self.dilation

    def point_distances(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        p = self._p()
        out = np.full(z.shape, np.inf)
        step = max(1, int(2e7) // max(len(p), 1))
        for i in range(0, len(z), step):
            chunk = z[i : i + step]
            d = np.abs(chunk[:, None] - p[None, :]).min(axis=1)
            out[i : i + step] = d
        return np.maximum(0.0, out - self.dilation)

    def scaled(self, alpha):
        return PointSet(alpha * self._p(), abs(alpha) * self.dilation)

    def translated(self, w):
        return PointSet(self._p() + w, self.dilation)

    def paint(self, n, lo, hi):
        p = self._p()
        d = self.dilation
        mods = np.abs(p)
        if d <= 0.0:
            keep = mods >= TRUNC_LO
            if not np.any(keep):
                return
            k = _sector_index(np.angle(p[keep]), n)
            val = _logc(mods[keep])
            np.minimum.at(lo, k, val)
            np.maximum.at(hi, k, val)
            return
        near0 = mods < max(TRUNC_LO, 4.0 * d)
        if np.any(near0):
            top = float(np.max(mods[near0])) + d
            if top >= TRUNC_LO:
                np.minimum.at(lo, np.arange(n), _LOG_LO)
                np.maximum.at(hi, np.arange(n), _logc(top))
            p = p[~near0]
            mods = mods[~near0]
            if len(p) == 0:
                return
        h = _grid_h(n)
        ang = np.angle(p)
        half = np.arcsin(np.minimum(1.0, d / mods))
        k0 = _sector_index(ang - half, n)
        span = np.floor((2.0 * half) / h).astype(int) + 2
        r_lo = _logc(np.maximum(mods - d, TRUNC_LO))
        r_hi = _logc(mods + d)
        for off in range(int(span.max())):
            m = off < span
            idx = (k0[m] + off) % n
            np.minimum.at(lo, idx, r_lo[m])
            np.maximum.at(hi, idx, r_hi[m])

    def outer_vertices(self, eps):
        p = self._p()
        if self.dilation <= 0.0:
            return p
        corners = self.dilation * np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])
        return (p[:, None] + corners[None, :]).ravel()

    def boundary_cloud(self, spacing):
        p = self._p()
        if self.dilation <= spacing:
            return p
        m = int(np.clip(np.ceil(TWO_PI * self.dilation / spacing), 4, 64))
        ring = self.dilation * np.exp(1j * TWO_PI * np.arange(m) / m)
        return (p[:, None] + ring[None, :]).ravel()

    def sample(self, k, rng):
        p = self._p()
        idx = rng.integers(0, len(p), size=k)
        out = p[idx]
        if self.dilation > 0.0:
            u = np.sqrt(rng.uniform(size=k))
            ang = rng.uniform(0.0, TWO_PI, size=k)
            out = out + self.dilation * u * np.exp(1j * ang)
        return out

    def to_dict(self):
        return {
            "kind": "point_set",
            "points": [[z.real, z.imag] for z in self.points],
            "dilation": float(self.dilation),
        }


@dataclass(frozen=True)
class LogPolarBox:
    """Annular sector: rho_lo <= log|z| <= rho_hi, theta_lo <= arg z <= theta_hi."""

    rho_lo: float
    rho_hi: float
    theta_lo: float
    theta_hi: float

    kind = "log_polar_box"

    def __post_init__(self):
        if self.rho_hi < self.rho_lo:
            raise ValueError("rho_hi < rho_lo")
        if not (0.0 < self.theta_hi - self.theta_lo <= TWO_PI + 1e-12):
            raise ValueError("theta interval must have width in (0, 2*pi]")

    def _full_circle(self):
        return self.theta_hi - self.theta_lo >= TWO_PI - 1e-12

    def mirror(self):
        return LogPolarBox(self.rho_lo, self.rho_hi, -self.theta_hi, -self.theta_lo)

    def is_self_symmetric(self):
        if self._full_circle():
            return True
        lo = wrap_angle(self.theta_lo)
        hi = wrap_angle(self.theta_hi)
        return abs(lo + hi) <= _SYM_TOL or abs(abs(lo) - np.pi) + abs(abs(hi) - np.pi) <= _SYM_TOL

    def is_bounded(self):
        return True

    def max_modulus(self):
        return math.exp(self.rho_hi)

    def min_modulus(self):
        return math.exp(self.rho_lo)

    def _corner_arc(self, m=64):
        t = np.linspace(self.theta_lo, self.theta_hi, m)
        return np.concatenate([np.exp(self.rho_lo) * np.exp(1j * t), np.exp(self.rho_hi) * np.exp(1j * t)])

    def re_range(self):
        pts = self._corner_arc(256)
        return float(np.min(pts.real)), float(np.max(pts.real))

    def point_distances(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _box_point_dist(z, self.rho_lo, self.rho_hi, self.theta_lo, self.theta_hi)[0]

    def scaled(self, alpha):
        la = math.log(abs(alpha))
        aa = np.angle(complex(alpha))
        return LogPolarBox(self.rho_lo + la, self.rho_hi + la, self.theta_lo + aa, self.theta_hi + aa)

    def translated(self, w):
        return None

    def paint(self, n, lo, hi):
        h = _grid_h(n)
        if self._full_circle():
            idx = np.arange(n)
        else:
            a = wrap_angle(self.theta_lo)
            span = self.theta_hi - self.theta_lo
            k0 = int(np.floor((a + np.pi) / h))
            m = int(np.floor((a + span + np.pi) / h)) - k0 + 1
            idx = (k0 + np.arange(m)) % n
        np.minimum.at(lo, idx, max(self.rho_lo, _LOG_LO))
        np.maximum.at(hi, idx, min(self.rho_hi, _LOG_HI))

    def outer_vertices(self, eps):
        r_hi = math.exp(self.rho_hi)
        m = int(np.clip(np.ceil((self.theta_hi - self.theta_lo) / (2.0 * np.sqrt(2.0 * max(eps, 1e-9) / r_hi))), 4, 4096))
        t = np.linspace(self.theta_lo, self.theta_hi, m + 1)
        outer = (r_hi / np.cos(0.5 * (t[1] - t[0]))) * np.exp(1j * 0.5 * (t[:-1] + t[1:]))
        ends = r_hi * np.exp(1j * np.array([self.theta_lo, self.theta_hi]))
        inner = math.exp(self.rho_lo) * np.exp(1j * t)
        return np.concatenate([outer, ends, inner])

    def boundary_cloud(self, spacing):
        r1, r2 = math.exp(self.rho_lo), math.exp(self.rho_hi)
        m = int(np.clip(np.ceil((self.theta_hi - self.theta_lo) * r2 / max(spacing, 1e-9)), 4, 100000))
        t = np.linspace(self.theta_lo, self.theta_hi, m + 1)
        arcs = np.concatenate([r1 * np.exp(1j * t), r2 * np.exp(1j * t)])
        kr = int(np.clip(np.ceil((r2 - r1) / max(spacing, 1e-9)), 1, 100000))
        rr = np.linspace(r1, r2, kr + 1)
        sides = np.concatenate([rr * np.exp(1j * self.theta_lo), rr * np.exp(1j * self.theta_hi)])
        return np.concatenate([arcs, sides])

    def sample(self, k, rng):
        rho = rng.uniform(self.rho_lo, self.rho_hi, size=k)
        th = rng.uniform(self.theta_lo, self.theta_hi, size=k)
        return np.exp(rho + 1j * th)

    def to_dict(self):
        return {
            "kind": "log_polar_box",
            "rho_lo": float(self.rho_lo),
            "rho_hi": float(self.rho_hi),
            "theta_lo": float(self.theta_lo),
            "theta_hi": float(self.theta_hi),
        }


class SectorEnvelope:
    """Union of one log-modulus interval per angular sector on a uniform grid.

    Sector k covers angles [-pi + k*h, -pi + (k+1)*h], h = 2*pi/n. Empty
    sectors hold lo = +inf, hi = -inf.
    """

    kind = "sector_envelope"

    __slots__ = ("n", "lo", "hi")

    def __init__(self, n, lo, hi):
        self.n = int(n)
        self.lo = np.asarray(lo, dtype=float).copy()
        self.hi = np.asarray(hi, dtype=float).copy()
        if self.lo.shape != (self.n,) or self.hi.shape != (self.n,):
            raise ValueError("envelope arrays must have length n")

    def __eq__(self, other):
        return (
            isinstance(other, SectorEnvelope)
            and self.n == other.n
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __hash__(self):
        return hash((self.n, self.lo.tobytes(), self.hi.tobytes()))

    def _nonempty(self):
        return self.hi > -np.inf

    def mirror(self):
        return SectorEnvelope(self.n, self.lo[::-1].copy(), self.hi[::-1].copy())

    def is_self_symmetric(self):
        ne = self._nonempty()
        if not np.array_equal(ne, ne[::-1]):
            return False
        return np.allclose(self.lo[ne], self.lo[::-1][ne], atol=1e-12) and np.allclose(
            self.hi[ne], self.hi[::-1][ne], atol=1e-12
        )

    def is_bounded(self):
        return True

    def max_modulus(self):
        ne = self._nonempty()
        if not np.any(ne):
            return 0.0
        return math.exp(float(np.max(self.hi[ne])))

    def min_modulus(self):
        ne = self._nonempty()
        if not np.any(ne):
            return np.inf
        return math.exp(float(np.min(self.lo[ne])))

    def _sectors(self):
        ne = np.nonzero(self._nonempty())[0]
        h = _grid_h(self.n)
        t0 = -np.pi + ne * h
        return ne, t0, t0 + h

    def re_range(self):
        ne, t0, t1 = self._sectors()
        if len(ne) == 0:
            return np.inf, -np.inf
        r_lo = np.exp(self.lo[ne])
        r_hi = np.exp(self.hi[ne])
        cs = np.stack([np.cos(t0), np.cos(t1)])
        # cos extrema: also 1 or -1 if the sector crosses angle 0 or pi.
        cmax = np.max(cs, axis=0)
        cmin = np.min(cs, axis=0)
        cross0 = (t0 <= 0.0) & (t1 >= 0.0)
        cmax[cross0] = 1.0
        res = np.concatenate([r_lo * cmin, r_lo * cmax, r_hi * cmin, r_hi * cmax])
        return float(np.min(res)), float(np.max(res))

    def quick_within(self, z, slack):
        """Sufficient own-column test: True guarantees distance <= slack.

        A point whose modulus lies within slack of its own angular column's
        radial interval can reach the box radially, so the bound is exact for
        hits; misses stay undecided and need the full distance.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape, dtype=bool)
        mods = np.abs(z)
        pos = mods > 0.0
        if not np.any(pos):
            return out
        k = _sector_index(np.angle(z[pos]), self.n)
        lo_k, hi_k = self.lo[k], self.hi[k]
        r_lo = np.exp(np.clip(lo_k, _LOG_LO, _LOG_HI))
        r_hi = np.exp(np.clip(hi_k, _LOG_LO, _LOG_HI))
        m = mods[pos]
        s = np.broadcast_to(np.asarray(slack, dtype=float), z.shape)[pos]
        out[pos] = (lo_k <= hi_k) & (m >= r_lo - s) & (m <= r_hi + s)
        return out

    def point_distances(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ne, t0, t1 = self._sectors()
        if len(ne) == 0:
            return np.full(z.shape, np.inf)
        out = np.full(z.shape, np.inf)
        # A point whose own sector's radial interval covers it is at distance
        # zero; resolving that per point first keeps the all-pairs sector scan
        # for the (typically few) exterior points.
        mods = np.abs(z)
        inside = np.zeros(z.shape, dtype=bool)
        pos = mods > 0.0
        if np.any(pos):
            k = _sector_index(np.angle(z[pos]), self.n)
            rho = np.log(mods[pos])
            lo_c = np.clip(self.lo[k], _LOG_LO, _LOG_HI)
            hi_c = np.clip(self.hi[k], _LOG_LO, _LOG_HI)
            # Slack absorbs the log/exp roundtrip of boundary points; the
            # induced distance error is ~1e-13 relative, below the envelope's
            # own storage noise.
            slack = 1e-13 * (1.0 + np.abs(rho))
            inside[pos] = (lo_c - slack <= rho) & (rho <= hi_c + slack)
        out[inside] = 0.0
        zr = z[~inside]
        res = np.empty(zr.shape)
        step = max(1, int(5e6) // max(len(ne), 1))
        for i in range(0, len(zr), step):
            chunk = zr[i : i + step]
            res[i : i + step] = _box_point_dist_many(chunk, self.lo[ne], self.hi[ne], t0, t1)
        out[~inside] = res
        return out

    def scaled(self, alpha):
        la = math.log(abs(alpha))
        aa = float(np.angle(complex(alpha)))
        h = _grid_h(self.n)
        shift = aa / h
        k = int(round(shift))
        lo = np.roll(self.lo, k) + la
        hi = np.roll(self.hi, k) + la
        if abs(shift - k) > 1e-9:
            # Off-grid rotation: smear one sector each way to stay outer.
            lo = np.minimum(lo, np.minimum(np.roll(lo, 1), np.roll(lo, -1)))
            hi = np.maximum(hi, np.maximum(np.roll(hi, 1), np.roll(hi, -1)))
        return SectorEnvelope(self.n, lo, hi)

    def translated(self, w):
        return None

    def paint(self, n, lo, hi):
        ne = self._nonempty()
        src_lo = np.where(ne, np.clip(self.lo, _LOG_LO, _LOG_HI), np.inf)
        src_hi = np.where(ne, np.clip(self.hi, _LOG_LO, _LOG_HI), -np.inf)
        if n == self.n:
            np.minimum(lo, src_lo, out=lo)
            np.maximum(hi, src_hi, out=hi)
            return
        if self.n % n == 0:
            f = self.n // n
            np.minimum(lo, src_lo.reshape(n, f).min(axis=1), out=lo)
            np.maximum(hi, src_hi.reshape(n, f).max(axis=1), out=hi)
        elif n % self.n == 0:
            f = n // self.n
            np.minimum(lo, np.repeat(src_lo, f), out=lo)
            np.maximum(hi, np.repeat(src_hi, f), out=hi)
        else:
            ne, t0, t1 = self._sectors()
            for j, k in enumerate(ne):
                box = LogPolarBox(max(self.lo[k], _LOG_LO), min(self.hi[k], _LOG_HI), t0[j], t1[j])
                box.paint(n, lo, hi)

    def invert_exact(self):
        lo = -self.hi[::-1]
        hi = -self.lo[::-1]
        lo[~np.isfinite(lo)] = np.inf
        hi[~np.isfinite(hi)] = -np.inf
        return SectorEnvelope(self.n, lo, hi)

    def outer_vertices(self, eps):
        ne, t0, t1 = self._sectors()
        if len(ne) == 0:
            return np.empty(0, dtype=complex)
        h = _grid_h(self.n)
        r_hi = np.exp(np.clip(self.hi[ne], _LOG_LO, _LOG_HI)) / math.cos(h / 2.0)
        r_lo = np.exp(np.clip(self.lo[ne], _LOG_LO, _LOG_HI))
        mid = 0.5 * (t0 + t1)
        outer = r_hi * np.exp(1j * mid)
        inner = np.concatenate([r_lo * np.exp(1j * t0), r_lo * np.exp(1j * t1)])
        return np.concatenate([outer, inner])

    def boundary_cloud(self, spacing):
        ne, t0, t1 = self._sectors()
        r_lo = np.exp(np.clip(self.lo[ne], _LOG_LO, _LOG_HI))
        r_hi = np.exp(np.clip(self.hi[ne], _LOG_LO, _LOG_HI))
        mid = 0.5 * (t0 + t1)
        return np.concatenate(
            [r_lo * np.exp(1j * t0), r_hi * np.exp(1j * t0), r_lo * np.exp(1j * mid), r_hi * np.exp(1j * mid)]
        )

    def sample(self, k, rng):
        ne, t0, t1 = self._sectors()
        if len(ne) == 0:
            return np.empty(0, dtype=complex)
        pick = rng.integers(0, len(ne), size=k)
        lo = np.clip(self.lo[ne][pick], _LOG_LO, _LOG_HI)
        hi = np.clip(self.hi[ne][pick], _LOG_LO, _LOG_HI)
        rho = rng.uniform(size=k) * (hi - lo) + lo
        th = t0[pick] + rng.uniform(size=k) * (t1[pick] - t0[pick])
        return np.exp(rho + 1j * th)

    def to_dict(self):
        def enc(arr):
            return [None if not np.isfinite(v) else float(v) for v in arr]

        return {"kind": "sector_envelope", "n": self.n, "rho_lo": enc(self.lo), "rho_hi": enc(self.hi)}


class HPolygon:
    """Hyperbolic-convex region: geodesic polygon in the upper half plane,
    taken together with its conjugate mirror image.

    Stored as the vertex polygon of its image in the Klein disk, where
    geodesics are straight chords and membership is a convex polygon test.
    Ideal vertices (real axis, infinity) sit on the unit circle. A cached
    boundary chain in the plane supports painting, distance queries and
    rendering; ``boundary_gap`` bounds the spacing of that chain.
    """

    kind = "h_polygon"

    __slots__ = ("klein", "boundary", "boundary_gap")

    def __init__(self, klein_vertices, boundary=None, boundary_gap=DEFAULT_RESOLUTION):
        k = np.asarray(klein_vertices, dtype=complex)
        self.klein = k
        self.boundary_gap = float(boundary_gap)
        if boundary is None:
            boundary = self._trace_boundary()
        self.boundary = np.asarray(boundary, dtype=complex)

    def __eq__(self, other):
        return isinstance(other, HPolygon) and len(other.klein) == len(self.klein) and np.allclose(
            other.klein, self.klein
        )

    def __hash__(self):
        return hash(self.klein.tobytes())

    def _trace_boundary(self):
        zs = klein_to_uhp(self.klein)
        m = len(zs)
        if m <= 1:
            out = zs.copy()
        else:
            # Dense hulls have mostly micro-edges that need no interior
            # samples; only chase the geodesic on edges wider than the gap.
            nxt = np.roll(zs, -1)
            finite = np.isfinite(zs) & np.isfinite(nxt)
            short = np.zeros(m, dtype=bool)
            tol = np.maximum(
                self.boundary_gap,
                1e-3 * np.maximum(np.abs(zs[finite]), np.abs(nxt[finite])),
            )
            short[finite] = np.abs(zs[finite] - nxt[finite]) <= tol
            wide = np.nonzero(~short)[0]
            if len(wide) == 0:
                out = zs.copy()
            else:
                knxt = np.roll(self.klein, -1)
                eid, zm = geodesic_chains_batch(
                    self.klein[wide], knxt[wide], zs[wide], nxt[wide], self.boundary_gap
                )
                counts = np.zeros(m, dtype=int)
                counts[wide] = np.bincount(eid, minlength=len(wide))
                at = np.concatenate([[0], np.cumsum(counts[:-1] + 1)])
                out = np.empty(m + int(counts.sum()), dtype=complex)
                out[at] = zs
                hole = np.ones(len(out), dtype=bool)
                hole[at] = False
                out[hole] = zm
        out = out[np.isfinite(out)]
        big = np.abs(out) > TRUNC_HI
        out[big] = out[big] / np.abs(out[big]) * TRUNC_HI
        return out

    def mirror(self):
        return self

    def is_self_symmetric(self):
        return True

    def is_bounded(self):
        return True

    def max_modulus(self):
        return float(np.max(np.abs(self.boundary)))

    def min_modulus(self):
        d = self.point_distances(np.array([0j]))
        return float(d[0])

    def re_range(self):
        return float(np.min(self.boundary.real)), float(np.max(self.boundary.real))

    def contains_points(self, z, tol=0.0):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zu = np.where(z.imag >= 0.0, z, np.conj(z))
        k = uhp_to_klein(zu)
        tol = np.broadcast_to(np.asarray(tol, dtype=float), z.shape)
        # Klein vertices are quantized; keep a floor so exact boundary points pass.
        if np.any(tol > 0.0):
            jac = 4.0 / np.abs(zu + 1j) ** 2
            out = np.zeros(z.shape, dtype=bool)
            ktol = np.maximum(np.minimum(jac * tol, 1.0), 1e-12)
            bands = np.round(np.log10(ktol))
            for frac in np.unique(bands):
                band = bands == frac
                out[band] = poly_contains(k[band], self.klein, tol=float(10.0**frac))
            return out
        return poly_contains(k, self.klein, tol=1e-12)

    def point_distances(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        inside = self.contains_points(z)
        out = np.zeros(z.shape)
        rest = ~inside
        if np.any(rest):
            out[rest] = PointSet(self.boundary).point_distances(z[rest])
        return out

    def scaled(self, alpha):
        if np.isreal(alpha) and alpha != 0:
            a = float(np.real(alpha))
            zs = klein_to_uhp(self.klein)
            if a > 0:
                zs2 = a * zs
            else:
                zs2 = a * np.conj(zs)
            k2 = uhp_to_klein(zs2)
            if a < 0:
                k2 = k2[::-1]
            return HPolygon(k2, boundary_gap=self.boundary_gap * abs(a))
        return None

    def translated(self, w):
        return None

    def invert_exact(self):
        """Image under z -> 1/z. Together with the mirror this is an
        isometry of the half-plane model, so the result is again a geodesic
        polygon with mapped vertices."""
        zs = klein_to_uhp(self.klein)
        with np.errstate(divide="ignore", invalid="ignore"):
            zt = np.where(np.isfinite(zs) & (zs != 0), 1.0 / np.conj(zs), np.where(zs == 0, np.inf, 0.0))
        k2 = uhp_to_klein(zt)
        return HPolygon(k2[::-1], boundary_gap=self.boundary_gap)

    def paint(self, n, lo, hi):
        b = self.boundary
        p1 = b
        p2 = np.roll(b, -1)
        mods = np.stack([np.abs(p1), np.abs(p2)])
        r_lo = _logc(mods.min(axis=0))
        r_hi = _logc(mods.max(axis=0))
        k1 = _sector_index(np.angle(p1), n)
        k2 = _sector_index(np.angle(p2), n)
        d = (k2 - k1) % n
        d = np.where(d > n // 2, d - n, d)
        span = np.abs(d) + 1
        k0 = np.where(d >= 0, k1, k2)
        for off in range(int(span.max())):
            m = off < span
            idx = (k0[m] + off) % n
            np.minimum.at(lo, idx, r_lo[m])
            np.maximum.at(hi, idx, r_hi[m])

    def outer_vertices(self, eps):
        return self.boundary

    def boundary_cloud(self, spacing):
        return np.concatenate([self.boundary, np.conj(self.boundary)])

    def sample(self, k, rng):
        out = np.empty(0, dtype=complex)
        kl = self.klein
        cx = kl.real
        cy = kl.imag
        for _ in range(64):
            if len(out) >= k:
                break
            x = rng.uniform(cx.min(), cx.max(), size=4 * k)
            y = rng.uniform(cy.min(), cy.max(), size=4 * k)
            cand = x + 1j * y
            good = poly_contains(cand, kl) & (np.abs(cand) < 1.0 - 1e-12)
            z = klein_to_uhp(cand[good])
            flip = rng.uniform(size=len(z)) < 0.5
            z = np.where(flip, np.conj(z), z)
            out = np.concatenate([out, z])
        if len(out) == 0:
            # Hull too thin for rejection sampling: fall back to the boundary.
            idx = rng.integers(0, len(self.boundary), size=k)
            return self.boundary[idx]
        return out[:k]

    def to_dict(self):
        return {
            "kind": "h_polygon",
            "klein_vertices": [[z.real, z.imag] for z in self.klein],
            "boundary_gap": float(self.boundary_gap),
        }


_PRIMS = {
    "disc": Disc,
    "half_plane_re": HalfPlaneRe,
    "segment": Segment,
    "convex_polygon": ConvexPolygon,
    "point_set": PointSet,
    "log_polar_box": LogPolarBox,
    "sector_envelope": SectorEnvelope,
    "h_polygon": HPolygon,
}


# ---------------------------------------------------------------------------
# Segment painting kernel (shared by Segment, ConvexPolygon)
# ---------------------------------------------------------------------------


def _paint_segment(n, lo, hi, a, b):
    if abs(b - a) <= 1e-300:
        PointSet(np.array([a])).paint(n, lo, hi)
        return
    d = b - a
    t_star = -(a.real * d.real + a.imag * d.imag) / (d.real * d.real + d.imag * d.imag)
    foot = a + t_star * d
    d0 = abs(foot)
    mmax = max(abs(a), abs(b))
    if mmax < TRUNC_LO:
        return
    h = _grid_h(n)
    if d0 <= 1e-14 * mmax:
        # Line through the origin: one or two purely radial pieces.
        pieces = []
        if 0.0 < t_star < 1.0:
            pieces = [(a, TRUNC_LO), (b, TRUNC_LO)]
        else:
            pieces = [(a if abs(a) > abs(b) else b, max(min(abs(a), abs(b)), TRUNC_LO))]
        for tip, rmin in pieces:
            if abs(tip) < TRUNC_LO:
                continue
            k = int(_sector_index(np.array([np.angle(tip)]), n)[0])
            lo[k] = min(lo[k], _logc(rmin))
            hi[k] = max(hi[k], float(_logc(abs(tip))))
        return
    theta_f = math.atan2(foot.imag, foot.real)
    ra = wrap_angle(np.angle(a) - theta_f)
    rb = wrap_angle(np.angle(b) - theta_f)
    rel0, rel1 = (ra, rb) if ra <= rb else (rb, ra)
    base = wrap_angle(theta_f + rel0)
    span = rel1 - rel0
    k0 = int(np.floor((base + np.pi) / h))
    m = int(np.floor((base + span + np.pi) / h)) - k0 + 1
    ks = (k0 + np.arange(m)) % n
    sec_lo = (-np.pi + k0 * h) + np.arange(m) * h
    c0 = np.maximum(sec_lo, base) - (base - rel0)
    c1 = np.minimum(sec_lo + h, base + span) - (base - rel0)
    valid = c1 >= c0
    ks, c0, c1 = ks[valid], c0[valid], c1[valid]
    inside0 = (c0 <= 0.0) & (c1 >= 0.0)
    phi_close = np.where(inside0, 0.0, np.minimum(np.abs(c0), np.abs(c1)))
    phi_far = np.maximum(np.abs(c0), np.abs(c1))
    cos_close = np.cos(phi_close)
    cos_far = np.maximum(np.cos(phi_far), 1e-300)
    r_near = d0 / np.maximum(cos_close, 1e-300)
    r_far = np.minimum(d0 / cos_far, mmax)
    np.minimum.at(lo, ks, _logc(r_near))
    np.maximum.at(hi, ks, _logc(r_far))


# ---------------------------------------------------------------------------
# Point-to-annular-sector distances (SectorEnvelope, LogPolarBox queries)
# ---------------------------------------------------------------------------


def _box_point_dist(z, rho_lo, rho_hi, t0, t1):
    """Distance from points z to one annular sector; returns (dist, witness)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    r1, r2 = math.exp(max(rho_lo, _LOG_LO)), math.exp(min(rho_hi, _LOG_HI))
    mid = 0.5 * (t0 + t1)
    halfw = 0.5 * (t1 - t0)
    dth = wrap_angle(np.angle(z) - mid)
    inside_ang = np.abs(dth) <= halfw
    mods = np.abs(z)
    radial = np.maximum(np.maximum(r1 - mods, mods - r2), 0.0)
    wit_r = np.clip(mods, r1, r2) * np.exp(1j * np.angle(z))
    e1a, e1b = r1 * np.exp(1j * t0), r2 * np.exp(1j * t0)
    e2a, e2b = r1 * np.exp(1j * t1), r2 * np.exp(1j * t1)
    d1, w1 = point_seg_dist(z, e1a, e1b)
    d2, w2 = point_seg_dist(z, e2a, e2b)
    edge_d = np.where(d1 <= d2, d1, d2)
    edge_w = np.where(d1 <= d2, w1, w2)
    dist = np.where(inside_ang, radial, edge_d)
    wit = np.where(inside_ang, wit_r, edge_w)
    return dist, wit


def _box_point_dist_many(z, rho_lo, rho_hi, t0, t1):
    """Min distance from each point to a family of annular sectors."""
    z = z[:, None]
    r1 = np.exp(np.clip(rho_lo, _LOG_LO, _LOG_HI))[None, :]
    r2 = np.exp(np.clip(rho_hi, _LOG_LO, _LOG_HI))[None, :]
    mid = (0.5 * (t0 + t1))[None, :]
    halfw = (0.5 * (t1 - t0))[None, :]
    dth = wrap_angle(np.angle(z) - mid)
    inside_ang = np.abs(dth) <= halfw
    mods = np.abs(z)
    radial = np.maximum(np.maximum(r1 - mods, mods - r2), 0.0)
    d1, _ = point_seg_dist(z, r1 * np.exp(1j * t0[None, :]), r2 * np.exp(1j * t0[None, :]))
    d2, _ = point_seg_dist(z, r1 * np.exp(1j * t1[None, :]), r2 * np.exp(1j * t1[None, :]))
    edge_d = np.minimum(d1, d2)
    dist = np.where(inside_ang, radial, edge_d)
    return dist.min(axis=1)


# ---------------------------------------------------------------------------
# Region container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Conjugate-symmetric union of primitives with outer resolution tracking."""

    primitives: tuple = ()
    contains_infinity: bool = False
    resolution: float = DEFAULT_RESOLUTION

    def is_empty(self):
        return len(self.primitives) == 0 and not self.contains_infinity

    def is_bounded(self):
        return not self.contains_infinity and all(p.is_bounded() for p in self.primitives)

    def __iter__(self):
        return iter(self.primitives)


def make_region(primitives, contains_infinity=False, resolution=DEFAULT_RESOLUTION):
    """Assemble a region, adding conjugate mirrors where a primitive needs one."""
    prims = [p for p in primitives if p is not None and not _prim_empty(p)]
    out = []
    for p in prims:
        if any(q == p for q in out):
            continue
        out.append(p)
        if not p.is_self_symmetric():
            m = p.mirror()
            if not any(q == m for q in out):
                out.append(m)
    return Region(tuple(out), bool(contains_infinity), float(max(resolution, 0.0)))


def _prim_empty(p):
    if isinstance(p, PointSet):
        return len(p.points) == 0
    if isinstance(p, SectorEnvelope):
        return not np.any(p.hi > -np.inf)
    if isinstance(p, ConvexPolygon):
        return len(p.vertices) == 0
    return False


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def point_distance(region, z):
    """Distance from complex points to the region's finite part (0 inside)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if region.is_empty() or len(region.primitives) == 0:
        return np.full(z.shape, np.inf)
    out = np.full(z.shape, np.inf)
    for p in region.primitives:
        np.minimum(out, p.point_distances(z), out=out)
    return out


def contains(region, z, tol=0.0):
    """Membership of complex points, with an optional distance tolerance."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.shape, dtype=bool)
    tol = np.broadcast_to(np.asarray(tol, dtype=float), z.shape)
    # Distance to a far boundary point carries roundoff of order eps * |z|;
    # without this floor exact boundary members fail at tol = 0.
    floor = tol + 64.0 * np.finfo(float).eps * (1.0 + np.abs(z))
    # Cheap passes first; the all-sector envelope scan runs last and only on
    # points every cheap test rejected.
    envelopes = []
    for p in region.primitives:
        rest = np.flatnonzero(~out)
        if len(rest) == 0:
            return out
        zr, fr = z[rest], floor[rest]
        if isinstance(p, HPolygon):
            hit = p.contains_points(zr, tol=tol[rest])
        elif isinstance(p, SectorEnvelope):
            envelopes.append(p)
            hit = p.quick_within(zr, fr)
        else:
            hit = p.point_distances(zr) <= fr
        out[rest[hit]] = True
    for p in envelopes:
        rest = np.flatnonzero(~out)
        if len(rest) == 0:
            break
        out[rest[p.point_distances(z[rest]) <= floor[rest]]] = True
    return out


def contains_zero(region, tol=1e-12):
    return bool(contains(region, np.array([0j]), tol=tol)[0])

def max_modulus(region):
    """Largest modulus in the region; inf when unbounded or infinity is included."""
    if region.is_empty():
        return 0.0
    if region.contains_infinity:
        return np.inf
    vals = [p.max_modulus() for p in region.primitives]
    return float(max(vals)) if vals else 0.0


def min_modulus(region):
    if region.is_empty():
        return np.inf
    vals = [p.min_modulus() for p in region.primitives]
    return float(min(vals)) if vals else np.inf


def re_range(region):
    los, his = np.inf, -np.inf
    for p in region.primitives:
        a, b = p.re_range()
        los, his = min(los, a), max(his, b)
    return los, his


def sample_points(region, n, rng):
    """Draw n points from the region (coverage-oriented, not uniform)."""
    prims = region.primitives
    if len(prims) == 0:
        return np.empty(0, dtype=complex)
    per = int(np.ceil(n / len(prims)))
    chunks = [p.sample(per, rng) for p in prims]
    out = np.concatenate(chunks)
    idx = rng.permutation(len(out))[:n]
    return out[idx]


def boundary_cloud(region, spacing):
    """Points covering every primitive's boundary to within ``spacing``."""
    if any(not p.is_bounded() for p in region.primitives):
        raise UnsupportedGeometryError("boundary cloud requires a bounded region")
    parts = [p.boundary_cloud(spacing) for p in region.primitives]
    if not parts:
        return np.empty(0, dtype=complex)
    return np.concatenate(parts)


def hausdorff_gap(region_a, region_b, spacing=1e-3):
    """Estimated Hausdorff distance between two bounded regions.

    Sampled on boundary clouds, so the estimate can be low by about one
    ``spacing``; adequate for tolerance checks well above that scale.
    """
    ca = boundary_cloud(region_a, spacing)
    cb = boundary_cloud(region_b, spacing)
    d_ab = float(np.max(point_distance(region_b, ca))) if len(ca) else 0.0
    d_ba = float(np.max(point_distance(region_a, cb))) if len(cb) else 0.0
    return max(d_ab, d_ba)


# ---------------------------------------------------------------------------
# Envelope construction
# ---------------------------------------------------------------------------


def envelope_of(region, n):
    """Paint every primitive into one log-polar envelope on an n-sector grid.

    Radial gaps within a sector are merged into a single interval, which is
    the one outer step this representation takes beyond grid granularity.
    """
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    for p in region.primitives:
        p.paint(n, lo, hi)
    return SectorEnvelope(n, lo, hi)


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------


def scale(region, alpha):
    """Image of the region under z -> alpha * z.

    For non-real alpha the exact image is not conjugate symmetric; the result
    is then the symmetrized union over alpha and its conjugate, which is the
    tightest symmetric outer cover.
    """
    alpha = complex(alpha)
    if region.is_empty():
        return region
    if alpha == 0:
        return make_region([PointSet(np.zeros(1, dtype=complex))], False, 0.0)
    prims = []
    for p in region.primitives:
        q = p.scaled(alpha)
        if q is None:
            q = _scaled_generic(p, alpha, region.resolution)
            prims.extend(q)
        else:
            prims.append(q)
    inf_flag = region.contains_infinity
    return make_region(prims, inf_flag, abs(alpha) * region.resolution + _scale_slack(region, alpha))


def neg(region):
    """Reflection through the origin; exact, since -1 is real."""
    return scale(region, -1.0)


def _scale_slack(region, alpha):
    if np.isreal(alpha):
        return 0.0
    # Envelope regrids under rotation smear by up to one sector.
    ns = [p.n for p in region.primitives if isinstance(p, SectorEnvelope)]
    if not ns:
        return 0.0
    mm = max_modulus(region)
    mm = mm if np.isfinite(mm) else TRUNC_HI
    return abs(alpha) * mm * _grid_h(min(ns))


def _scaled_generic(p, alpha, resolution):
    n = grid_size(max(resolution, 1e-4))
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    p.paint(n, lo, hi)
    env = SectorEnvelope(n, lo, hi).scaled(alpha)
    parts = [env]
    if hasattr(p, "boundary"):
        parts.append(PointSet(alpha * p.boundary))
    return parts


# ---------------------------------------------------------------------------
# Minkowski sum
# ---------------------------------------------------------------------------


def minkowski_sum(region_a, region_b):
    """Outer cover of {a + b : a in A, b in B}.

    Exact for point translates, disc pairs, polygon pairs and half-plane
    against bounded sets; disc-polygon and envelope-backed pairs polygonize
    with tracked slack. At most one operand may be unbounded.
    """
    if region_a.is_empty() or region_b.is_empty():
        return Region((), False, region_a.resolution + region_b.resolution)
    a_unbounded = not region_a.is_bounded()
    b_unbounded = not region_b.is_bounded()
    if a_unbounded and b_unbounded:
        raise UnsupportedGeometryError("sum of two unbounded regions")
    prims = []
    slack = 0.0
    for p in region_a.primitives:
        for q in region_b.primitives:
            got, s = _prim_sum(p, q, region_a.resolution + region_b.resolution)
            prims.extend(got)
            slack = max(slack, s)
    inf_flag = region_a.contains_infinity or region_b.contains_infinity
    res = region_a.resolution + region_b.resolution + slack
    return make_region(prims, inf_flag, res)


_SUM_RANK = {
    "point_set": 0,
    "disc": 1,
    "segment": 2,
    "convex_polygon": 3,
    "half_plane_re": 4,
    "log_polar_box": 5,
    "sector_envelope": 6,
    "h_polygon": 7,
}


def _prim_sum(p, q, budget):
    if _SUM_RANK[p.kind] > _SUM_RANK[q.kind]:
        p, q = q, p
    if isinstance(p, PointSet) and p.dilation == 0.0:
        out = []
        ok = True
        for w in p.points:
            if w == 0:
                out.append(q)
                continue
            t = q.translated(w)
            if t is None:
                ok = False
                break
            out.append(t)
        if ok:
            return out, 0.0
    if isinstance(p, PointSet) and p.dilation > 0.0:
        inner, s1 = _prim_sum(PointSet(np.array(p.points)), Disc(0j, p.dilation), budget)
        out = []
        smax = s1
        for prim in inner:
            got, s2 = _prim_sum(prim, q, budget)
            out.extend(got)
            smax = max(smax, s2)
        return out, smax
    if isinstance(p, Disc) and isinstance(q, Disc):
        return [Disc(p.center + q.center, p.radius + q.radius)], 0.0
    if isinstance(q, HalfPlaneRe):
        lo_re, hi_re = p.re_range()
        if q.side == ">=":
            return [HalfPlaneRe(q.c + lo_re, ">=")], 0.0
        return [HalfPlaneRe(q.c + hi_re, "<=")], 0.0
    eps = max(0.25 * budget, 1e-9)
    env_like = ("log_polar_box", "sector_envelope", "h_polygon")
    if q.kind in env_like:
        if p.kind == "sector_envelope" and q.kind == "sector_envelope":
            raise UnsupportedGeometryError("sum of two sector envelopes")
        if p.kind == "sector_envelope":
            return _generic_env_sum(p, q, eps)
        return _generic_env_sum(q, p, eps)
    # Remaining convex pairs: hull of pairwise vertex sums, exact except for
    # the disc polygonization slack already folded into outer_vertices.
    va = p.outer_vertices(eps)
    vb = q.outer_vertices(eps)
    if va is None or vb is None:
        raise UnsupportedGeometryError("sum not supported for this geometry pair")
    merged = poly_minkowski(va, vb)
    slack = eps if (isinstance(p, Disc) or isinstance(q, Disc) or p.kind == "point_set" or q.kind == "point_set") else 0.0
    if len(merged) == 1:
        return [PointSet(merged)], slack
    if len(merged) == 2:
        return [Segment(merged[0], merged[1])], slack
    return [ConvexPolygon(merged)], slack


def _generic_env_sum(env_prim, other, eps, n=2048):
    """Sum an envelope-backed primitive with a bounded convex one.

    Each nonempty sector is treated as its outer vertex quad; pairwise sums
    with the other primitive's vertex cloud are covered per sector by a
    log-polar box. The box step trades tightness for speed; the slack is of
    the order of the other primitive's diameter and is returned to the caller.
    """
    vo = other.outer_vertices(eps)
    if vo is None:
        raise UnsupportedGeometryError("sum not supported for this geometry pair")
    vo = convex_hull(vo)
    if len(vo) > 48:
        # Replace a fine hull with its circumscribed 24-gon to stay outer.
        c0 = vo.mean()
        rad = float(np.max(np.abs(vo - c0)))
        ang = TWO_PI * np.arange(24) / 24
        vo = c0 + (rad / math.cos(np.pi / 24)) * np.exp(1j * ang)
    lo_env = np.full(n, np.inf)
    hi_env = np.full(n, -np.inf)
    env_prim.paint(n, lo_env, hi_env)
    env = SectorEnvelope(n, lo_env, hi_env)
    ne, t0, t1 = env._sectors()
    if len(ne) == 0:
        return [], 0.0
    r_lo = np.exp(env.lo[ne])
    r_hi = np.exp(env.hi[ne]) / math.cos(_grid_h(n) / 2.0)
    corners = np.stack(
        [r_lo * np.exp(1j * t0), r_hi * np.exp(1j * t0), r_lo * np.exp(1j * t1), r_hi * np.exp(1j * t1)],
        axis=1,
    )
    sums = corners[:, :, None] + vo[None, None, :]
    sums = sums.reshape(len(ne), -1)
    mods = np.abs(sums)
    out_lo = np.full(n, np.inf)
    out_hi = np.full(n, -np.inf)
    tiny = mods.min(axis=1) < 10.0 * TRUNC_LO
    ref = np.angle(np.exp(1j * np.angle(sums)).sum(axis=1))
    spread = np.max(np.abs(wrap_angle(np.angle(sums) - ref[:, None])), axis=1)
    wild = tiny | (spread > np.pi / 2)
    if np.any(wild):
        # A sector cloud straddling the origin covers every direction.
        top = float(np.max(mods[wild]))
        out_lo[:] = _LOG_LO
        np.maximum(out_hi, _logc(top), out=out_hi)
    ok = ~wild
    if np.any(ok):
        b_lo = _logc(mods[ok].min(axis=1))
        b_hi = _logc(mods[ok].max(axis=1))
        a0 = ref[ok] - spread[ok]
        h = _grid_h(n)
        k0 = _sector_index(a0, n)
        span = np.floor(2.0 * spread[ok] / h).astype(int) + 2
        for off in range(int(span.max())):
            m = off < span
            idx = (k0[m] + off) % n
            np.minimum.at(out_lo, idx, b_lo[m])
            np.maximum.at(out_hi, idx, b_hi[m])
    rad = float(np.max(np.abs(vo[:, None] - vo[None, :]))) if len(vo) > 1 else 0.0
    slack = eps + rad + _grid_h(n) * float(np.max(r_hi))
    return [SectorEnvelope(n, out_lo, out_hi)], slack


# ---------------------------------------------------------------------------
# Minkowski product
# ---------------------------------------------------------------------------


def minkowski_product(region_a, region_b, n=None):
    """Outer cover of {a * b}: log-polar envelope convolution.

    Each operand is painted into per-sector log-modulus intervals; the
    product envelope is their (max,+)/(min,+) convolution over angle, with
    every pairing smeared across the two sectors its angular sum can touch.
    Point sets of moderate size multiply exactly instead.

    Raises IndeterminateProductError when 0 in one operand meets the point
    at infinity in the other.
    """
    res_a, res_b = region_a.resolution, region_b.resolution
    if region_a.is_empty() or region_b.is_empty():
        return Region((), False, res_a + res_b)
    zero_a = contains_zero(region_a)
    zero_b = contains_zero(region_b)
    if (region_a.contains_infinity and zero_b) or (region_b.contains_infinity and zero_a):
        raise IndeterminateProductError("product pairs 0 with infinity")

    exact = _product_exact(region_a, region_b)
    if exact is not None:
        return exact

    ma = max_modulus(region_a)
    mb = max_modulus(region_b)
    ma_f = min(ma, TRUNC_HI)
    mb_f = min(mb, TRUNC_HI)
    if n is None:
        n = grid_size(max(min(res_a, res_b), 2.5e-4))
    env_a = envelope_of(region_a, n)
    env_b = envelope_of(region_b, n)
    lo, hi, clipped = _convolve_envelopes(env_a, env_b, n)
    prims = [SectorEnvelope(n, lo, hi)]
    if zero_a or zero_b:
        delta = TRUNC_LO * max(mb_f if zero_a else 0.0, ma_f if zero_b else 0.0)
        prims.append(PointSet(np.zeros(1, dtype=complex), dilation=delta))
    inf_flag = region_a.contains_infinity or region_b.contains_infinity or clipped
    out_max = float(np.max(hi[np.isfinite(hi)])) if np.any(np.isfinite(hi)) else _LOG_LO
    smear = 3.0 * _grid_h(n) * math.exp(min(out_max, _LOG_HI))
    res = res_a * mb_f + res_b * ma_f + res_a * res_b + smear
    return make_region(prims, inf_flag, res)


def _product_exact(region_a, region_b):
    def as_points(region):
        pts = []
        for p in region.primitives:
            if not isinstance(p, PointSet) or p.dilation != 0.0:
                return None
            pts.extend(p.points)
        return np.array(pts, dtype=complex) if pts else None

    def all_boxes(region):
        out = []
        for p in region.primitives:
            if not isinstance(p, LogPolarBox):
                return None
            out.append(p)
        return out or None

    pa = as_points(region_a)
    pb = as_points(region_b)
    res = region_a.resolution + region_b.resolution
    if pa is not None and pb is not None and len(pa) * len(pb) <= 4096:
        prod = (pa[:, None] * pb[None, :]).ravel()
        inf_flag = region_a.contains_infinity or region_b.contains_infinity
        return make_region([PointSet(prod)], inf_flag, res)
    for pts, other, other_region in ((pa, region_b, region_b), (pb, region_a, region_a)):
        if pts is None or len(pts) > 32:
            continue
        prims = []
        ok = True
        for w in pts:
            for q in other_region.primitives:
                s = q if w == 1 else q.scaled(w)
                if s is None:
                    ok = False
                    break
                prims.append(s)
            if not ok:
                break
        if ok:
            inf_flag = region_a.contains_infinity or region_b.contains_infinity
            mw = float(np.max(np.abs(pts)))
            return make_region(prims, inf_flag, res * max(mw, 1.0))
    ba = all_boxes(region_a)
    bb = all_boxes(region_b)
    if ba is not None and bb is not None and len(ba) * len(bb) <= 256:
        prims = []
        for u in ba:
            for v in bb:
                t_lo = u.theta_lo + v.theta_lo
                t_hi = u.theta_hi + v.theta_hi
                if t_hi - t_lo >= TWO_PI:
                    t_lo, t_hi = -np.pi, np.pi
                prims.append(LogPolarBox(u.rho_lo + v.rho_lo, u.rho_hi + v.rho_hi, t_lo, t_hi))
        inf_flag = region_a.contains_infinity or region_b.contains_infinity
        return make_region(prims, inf_flag, region_a.resolution + region_b.resolution)
    return None


def _convolve_envelopes(env_a, env_b, n):
    lo_a = np.clip(env_a.lo, _LOG_LO, _LOG_HI)
    hi_a = np.clip(env_a.hi, _LOG_LO, _LOG_HI)
    lo_b = np.clip(env_b.lo, _LOG_LO, _LOG_HI)
    hi_b = np.clip(env_b.hi, _LOG_LO, _LOG_HI)
    ne_a = env_a.hi > -np.inf
    ne_b = env_b.hi > -np.inf
    hi2 = np.full(2 * n + 1, -np.inf)
    lo2 = np.full(2 * n + 1, np.inf)
    js = np.nonzero(ne_b)[0]
    if len(js) == 0 or not np.any(ne_a):
        return np.full(n, np.inf), np.full(n, -np.inf), False
    jmin, jmax = int(js.min()), int(js.max())
    width = jmax - jmin + 1
    lo_bs = lo_b[jmin : jmax + 1]
    hi_bs = hi_b[jmin : jmax + 1]
    empt = ~ne_b[jmin : jmax + 1]
    lo_bs = lo_bs.copy()
    hi_bs = hi_bs.copy()
    lo_bs[empt] = np.inf
    hi_bs[empt] = -np.inf
    for i in np.nonzero(ne_a)[0]:
        k = i + jmin
        h_row = hi_a[i] + hi_bs
        l_row = lo_a[i] + lo_bs
        seg_h = hi2[k : k + width]
        np.maximum(seg_h, h_row, out=seg_h)
        seg_h = hi2[k + 1 : k + 1 + width]
        np.maximum(seg_h, h_row, out=seg_h)
        seg_l = lo2[k : k + width]
        np.minimum(seg_l, l_row, out=seg_l)
        seg_l = lo2[k + 1 : k + 1 + width]
        np.minimum(seg_l, l_row, out=seg_l)
    lo_out = np.full(n, np.inf)
    hi_out = np.full(n, -np.inf)
    m_idx = np.arange(2 * n + 1)
    fold = (m_idx - n // 2) % n
    np.minimum.at(lo_out, fold, lo2)
    np.maximum.at(hi_out, fold, hi2)
    clipped = bool(np.any(hi_out[np.isfinite(hi_out)] > _LOG_HI - 1e-9))
    hi_out = np.clip(hi_out, None, _LOG_HI)
    lo_out = np.clip(lo_out, _LOG_LO, None)
    lo_out[~np.isfinite(hi_out) | (hi_out == -np.inf)] = np.inf
    return lo_out, hi_out, clipped


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------


def invert(region):
    """Outer cover of {1/z : z in region}, elementwise.

    Exact for discs and half planes in the standard Moebius pairs, for
    point sets, log-polar geometry and geodesic polygons (1/z composed with
    conjugation is an isometry of the upper half plane). Other shapes go
    through the sector envelope, which inverts exactly sector by sector.
    """
    if region.is_empty():
        return region
    prims = []
    inf_flag = contains_zero(region)
    add_zero = region.contains_infinity or not region.is_bounded()
    res_out = 0.0
    for p in region.primitives:
        got, res_p = _prim_invert(p, region.resolution)
        prims.extend(got)
        res_out = max(res_out, res_p)
    if add_zero:
        prims.append(PointSet(np.zeros(1, dtype=complex)))
    return make_region(prims, inf_flag, res_out)


def _prim_invert(p, res):
    if isinstance(p, PointSet) and p.dilation == 0.0:
        pts = np.array(p.points, dtype=complex)
        nz = np.abs(pts) > TRUNC_LO
        out = []
        if np.any(nz):
            out.append(PointSet(1.0 / pts[nz]))
        return out, res / max(TRUNC_LO, float(np.min(np.abs(pts[nz]))) if np.any(nz) else 1.0) ** 2

    if isinstance(p, Disc):
        c, r = complex(p.center), float(p.radius)
        absc = abs(c)
        scale_ = absc + r
        if abs(absc - r) <= 1e-9 * max(scale_, 1e-12):
            # Boundary through 0: image is a half plane (vertical when the
            # center is real, else represented by a clipped polygon).
            if abs(c.imag) <= 1e-12 * max(absc, 1e-12):
                cc = c.real
                side = ">=" if cc > 0 else "<="
                return [HalfPlaneRe(1.0 / (2.0 * cc), side)], res / max(r, TRUNC_LO) ** 2
            # |z - c| <= |c| maps to Re(w e^{i arg c}) >= 1/(2|c|).
            half = HalfPlaneRe(1.0 / (2.0 * absc), ">=")
            rot = np.exp(-1j * np.angle(c))
            return [ConvexPolygon(half._clip_polygon() * rot)], res / max(r, TRUNC_LO) ** 2
        d = absc * absc - r * r
        c2 = np.conj(c) / d
        r2 = abs(r / d)
        if d > 0:
            if abs(c2) + r2 <= TRUNC_HI:
                return [Disc(c2, r2)], res / max(absc - r, TRUNC_LO) ** 2
            return _exterior_cover(None), res
        # 0 interior: image is the exterior of the disc (c2, r2).
        return _exterior_cover((c2, r2)), res / max(r - absc, TRUNC_LO) ** 2

    if isinstance(p, HalfPlaneRe):
        c = p.c if p.side == ">=" else -p.c
        sgn = 1.0 if p.side == ">=" else -1.0
        if c > 0:
            cc = sgn * 1.0 / (2.0 * c)
            return [Disc(cc, 1.0 / (2.0 * c))], res / c**2
        if c == 0:
            return [HalfPlaneRe(0.0, p.side)], res
        # Contains 0: exterior of the disc through 0 with center 1/(2c).
        cc = sgn / (2.0 * c)
        return _exterior_cover((cc, abs(1.0 / (2.0 * c)))), res

    if isinstance(p, LogPolarBox):
        return [
            LogPolarBox(-p.rho_hi, -p.rho_lo, -p.theta_hi, -p.theta_lo)
        ], res * math.exp(-2.0 * p.rho_lo)

    if isinstance(p, SectorEnvelope):
        return [p.invert_exact()], res * math.exp(-2.0 * np.clip(p.lo, _LOG_LO, _LOG_HI).min())

    if isinstance(p, HPolygon):
        return [p.invert_exact()], res / max(p.min_modulus(), TRUNC_LO) ** 2

    if isinstance(p, Segment):
        a, b = complex(p.a), complex(p.b)
        cross = a.real * b.imag - a.imag * b.real
        span = abs(b - a)
        if abs(cross) <= 1e-14 * max(abs(a), abs(b), 1e-12) * span:
            # Radial segment: inverse is radial again, pointing the same way.
            out = []
            mn = min(abs(a), abs(b))
            crosses0 = (a.real * b.real + a.imag * b.imag) < 0 or mn <= TRUNC_LO
            if crosses0:
                for tip in (a, b):
                    if abs(tip) > TRUNC_LO:
                        out.append(Segment(1.0 / tip, _radial_far(tip)))
                return out, res / TRUNC_LO**2
            return [Segment(1.0 / a, 1.0 / b)], res / mn**2
        # Generic segment: inverse is a circular arc through 0; sample it.
        samples = _inverse_arc(a, b, res)
        return [PointSet(samples, dilation=max(res, 1e-9))], res / max(p.min_modulus(), TRUNC_LO) ** 2

    # ConvexPolygon and anything else: exact sector mirror of its envelope.
    n = grid_size(max(res, 2.5e-4))
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    p.paint(n, lo, hi)
    env = SectorEnvelope(n, lo, hi)
    mm = p.min_modulus()
    return [env.invert_exact()], (res + _grid_h(n) * p.max_modulus()) / max(mm, TRUNC_LO) ** 2


def _radial_far(tip):
    # 1/z negates the argument, so the image ray points along conj(tip).
    return (np.conj(tip) / abs(tip)) * TRUNC_HI


def _exterior_cover(disc):
    """Envelope covering the complement of an open disc (or the whole annulus)."""
    n = grid_size(2.5e-4)
    lo = np.full(n, _LOG_LO)
    hi = np.full(n, _LOG_HI)
    if disc is not None:
        c2, r2 = disc
        hole_lo = np.full(n, np.inf)
        hole_hi = np.full(n, -np.inf)
        Disc(c2, r2).paint(n, hole_lo, hole_hi)
        covered = hole_hi > -np.inf
        # Keep what lies beyond the far crossing of the excluded disc;
        # sectors whose rays miss the disc keep the full radial range.
        lo[covered] = hole_hi[covered]
    return [SectorEnvelope(n, lo, hi)]


def _inverse_arc(a, b, res):
    gap = max(res, 1e-6)
    pts = [a]
    stack = [(a, b)]
    guard = 0
    while stack and guard < 100000:
        guard += 1
        u, v = stack.pop()
        wu, wv = 1.0 / u, 1.0 / v
        if abs(wu - wv) <= gap * max(1.0, abs(wu), abs(wv)) or abs(u - v) < 1e-14:
            pts.append(v)
            continue
        m = 0.5 * (u + v)
        if abs(m) < TRUNC_LO:
            m = m + (v - u) * 1e-3
        stack.append((m, v))
        stack.append((u, m))
    zs = np.array(pts, dtype=complex)
    zs = zs[np.abs(zs) > TRUNC_LO]
    return 1.0 / zs


# ---------------------------------------------------------------------------
# Radial hull and chord closure
# ---------------------------------------------------------------------------


def radial_hull(region):
    """Outer cover of {t * z : z in region, 0 < t <= 1} (cone toward the origin)."""
    if region.is_empty():
        return region
    prims = []
    for p in region.primitives:
        prims.extend(_prim_radial_hull(p))
    return make_region(prims, region.contains_infinity, region.resolution)


def _prim_radial_hull(p):
    if isinstance(p, Disc):
        c, r = complex(p.center), float(p.radius)
        if abs(c) <= r:
            return [p]
        L = math.sqrt(abs(c) ** 2 - r**2)
        t1 = c * (L**2 / abs(c) ** 2) + 1j * c * (r * L / abs(c) ** 2)
        t2 = c * (L**2 / abs(c) ** 2) - 1j * c * (r * L / abs(c) ** 2)
        return [p, ConvexPolygon(np.array([0j, t1, t2]))]
    if isinstance(p, HalfPlaneRe):
        if p.side == ">=":
            return [HalfPlaneRe(min(p.c, 0.0), ">=")]
        return [HalfPlaneRe(max(p.c, 0.0), "<=")]
    if isinstance(p, Segment):
        return [ConvexPolygon(np.array([0j, p.a, p.b]))]
    if isinstance(p, ConvexPolygon):
        return [ConvexPolygon(np.concatenate([np.array([0j]), p._v()]))]
    if isinstance(p, PointSet):
        if p.dilation == 0.0:
            return [Segment(0j, w) for w in p.points]
        return [ConvexPolygon(np.array([0j, w + p.dilation * u, w + p.dilation * v]))
                for w in p.points
                for u, v in [_tangent_dirs(w, p.dilation)]] + [p]
    if isinstance(p, LogPolarBox):
        return [LogPolarBox(_LOG_LO, p.rho_hi, p.theta_lo, p.theta_hi)]
    if isinstance(p, SectorEnvelope):
        lo = np.where(p.hi > -np.inf, _LOG_LO, np.inf)
        return [SectorEnvelope(p.n, lo, p.hi.copy())]
    if isinstance(p, HPolygon):
        n = grid_size(2.5e-4)
        lo = np.full(n, np.inf)
        hi = np.full(n, -np.inf)
        p.paint(n, lo, hi)
        lo[hi > -np.inf] = _LOG_LO
        return [SectorEnvelope(n, lo, hi)]
    raise UnsupportedGeometryError(f"radial hull of {p.kind}")


def _tangent_dirs(w, r):
    aw = abs(w)
    if aw <= r:
        return 1.0 + 0j, -1.0 + 0j
    L = math.sqrt(aw * aw - r * r)
    u = w / aw
    t1 = u * (L / aw) * L + 1j * u * (r * L / aw)
    t2 = u * (L / aw) * L - 1j * u * (r * L / aw)
    return (t1 - w) / r, (t2 - w) / r


def chord_closure(region, resolution=None):
    """Euclidean convex hull as a single primitive (disc, segment or polygon)."""
    if region.is_empty():
        return region
    if not region.is_bounded():
        raise UnsupportedGeometryError("chord closure of an unbounded region")
    prims = list(region.primitives)
    if len(prims) == 1 and isinstance(prims[0], Disc):
        return Region((prims[0],), False, region.resolution)
    eps = resolution if resolution is not None else max(region.resolution * 0.5, 1e-9)
    clouds = [p.outer_vertices(eps) for p in prims]
    pts = np.concatenate(clouds)
    hull = convex_hull(pts)
    hull, dec_slack = _decimate_hull_outer(hull, eps)
    if len(hull) == 1:
        prim = PointSet(hull)
    elif len(hull) == 2:
        prim = Segment(hull[0], hull[1])
    else:
        prim = ConvexPolygon(hull)
    return make_region([prim], False, region.resolution + eps + dec_slack)


def _decimate_hull_outer(verts, eps, target=1024):
    """Thin a convex hull to ~target vertices without losing coverage.

    Kept vertices are pushed outward from the centroid far enough to cover
    the worst chord sagitta of the dropped ones; the introduced slack is
    returned so callers can fold it into the resolution.
    """
    m = len(verts)
    if m <= target:
        return verts, 0.0
    stride = int(np.ceil(m / target))
    keep = verts[::stride].copy()
    dev = 0.0
    for i in range(len(keep)):
        a = keep[i]
        b = keep[(i + 1) % len(keep)]
        mid = verts[i * stride : min((i + 1) * stride + 1, m)]
        if len(mid):
            d, _ = point_seg_dist(mid, a, b)
            dev = max(dev, float(d.max()))
    if dev == 0.0:
        return keep, 0.0
    c0 = keep.mean()
    edges_a = keep - c0
    edges_b = np.roll(keep, -1) - c0
    dd, _ = point_seg_dist(np.zeros(1, dtype=complex), edges_a, edges_b)
    rin = float(np.min(dd))
    lam = 1.0 + dev / max(rin, 1e-12)
    out = c0 + (keep - c0) * lam
    slack = dev + (lam - 1.0) * float(np.max(np.abs(keep - c0)))
    return out, slack


# ---------------------------------------------------------------------------
# Hyperbolic convex hull
# ---------------------------------------------------------------------------


def h_convex_hull(points, resolution=DEFAULT_RESOLUTION, dilation=0.0):
    """Geodesic convex hull of a conjugate-symmetric point cloud.

    Points are folded to the closed upper half plane (real points are ideal;
    infinity is allowed) and hulled in the Klein disk, where hyperbolic
    convexity is ordinary convexity. Nondegenerate hulls return a geodesic
    polygon; collinear clouds return the covered arc of the common geodesic
    (a vertical segment when the geodesic is a vertical line, otherwise a
    dense sampled curve with matching dilation).

    Args:
        points: complex array; np.inf entries mark the ideal point at infinity.
        resolution: target spacing control for sampled boundaries.
        dilation: extra radius already attached to the input points; folded
            into the returned region's resolution.

    Returns:
        Region covering the hyperbolic hull of the input and its mirror.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    has_inf = bool(np.any(~np.isfinite(z)))
    z = z[np.isfinite(z)]
    if len(z) == 0 and not has_inf:
        return Region((), False, resolution)
    zu = np.where(z.imag >= 0.0, z, np.conj(z))
    k_raw = uhp_to_klein(zu)
    z_full = zu
    if has_inf:
        k_raw = np.concatenate([k_raw, np.array([1.0 + 0j])])
        z_full = np.concatenate([z_full, np.array([complex(np.inf)])])
    k = np.unique(np.round(k_raw / 1e-14) * 1e-14)
    base_res = float(resolution + dilation)
    if len(k) == 1:
        if not np.isfinite(z_full[0]):
            return Region((), True, base_res)
        return make_region([PointSet(z_full[:1], dilation=dilation)], False, base_res)

    hull = convex_hull(k)
    if len(hull) >= 3:
        area = poly_area(hull)
        # Bounding-box diagonal; within sqrt(2) of the true diameter, which
        # is all the degeneracy test needs.
        diam = float(np.hypot(np.ptp(hull.real), np.ptp(hull.imag)))
        if area > 1e-9 * max(diam, 1e-12) ** 2:
            hp = HPolygon(hull, boundary_gap=max(resolution, 1e-6))
            inf_flag = bool(np.any(np.abs(hull - 1.0) < 1e-12))
            return make_region([hp], inf_flag, base_res)

    # Degenerate: all points on one geodesic, i.e. a vertical line or a
    # half-circle centered on the real axis. Endpoints are ranked in the
    # plane along that geodesic; Klein projections of near-ideal points
    # collapse below double precision and cannot break the tie.
    zf = z_full[np.isfinite(z_full)]
    scale_z = 1.0 + float(np.max(np.abs(zf)))
    vertical = float(np.ptp(zf.real)) <= 1e-9 * scale_z
    if vertical:
        x = float(np.median(zf.real))
        lo = float(np.min(zf.imag))
        hi = TRUNC_HI if has_inf else float(np.max(zf.imag))
        seg = Segment(complex(x, lo), complex(x, hi))
        return make_region([seg], has_inf, base_res)
    z_lo = zf[np.argmin(zf.real)]
    z_hi = complex(np.inf) if has_inf else zf[np.argmax(zf.real)]
    samples = geodesic_chain(z_lo, z_hi, max_gap=max(resolution, 1e-6), rel_gap=1e-3)
    samples = samples[np.isfinite(samples)]
    big = np.abs(samples) > TRUNC_HI
    samples[big] = samples[big] / np.abs(samples[big]) * TRUNC_HI
    return make_region(
        [PointSet(samples, dilation=dilation + 0.6 * max(resolution, 1e-6))], has_inf, base_res
    )


# ---------------------------------------------------------------------------
# Distance with witnesses
# ---------------------------------------------------------------------------


def nearest_points(region_a, region_b):
    """Euclidean distance between the finite parts, with a witness pair.

    Returns (distance, z_a, z_b). Zero distance reports a point in the
    overlap as both witnesses. Distances never underestimate by more than
    the boundary discretization of envelope-backed primitives.
    """
    if region_a.is_empty() or region_b.is_empty():
        return np.inf, complex(np.nan), complex(np.nan)
    best = (np.inf, complex(np.nan), complex(np.nan))
    reps_a = _rep_points(region_a)
    reps_b = _rep_points(region_b)
    in_b = contains(region_b, reps_a)
    if np.any(in_b):
        w = reps_a[np.nonzero(in_b)[0][0]]
        return 0.0, complex(w), complex(w)
    in_a = contains(region_a, reps_b)
    if np.any(in_a):
        w = reps_b[np.nonzero(in_a)[0][0]]
        return 0.0, complex(w), complex(w)
    for p in region_a.primitives:
        for q in region_b.primitives:
            d, wa, wb = _prim_pair_dist(p, q)
            if d < best[0]:
                best = (float(d), complex(wa), complex(wb))
                if best[0] == 0.0:
                    return best
    return best


def distance(region_a, region_b):
    return nearest_points(region_a, region_b)[0]


def intersects(region_a, region_b, tol=0.0):
    d, _, _ = nearest_points(region_a, region_b)
    return bool(d <= tol)


def _rep_points(region, per_prim=96):
    rng = np.random.default_rng(0)
    pts = []
    for p in region.primitives:
        if isinstance(p, PointSet):
            arr = p._p()
            pts.append(arr[:: max(1, len(arr) // per_prim)])
        elif isinstance(p, HalfPlaneRe):
            pts.append(np.array([complex(p.c, 0.0)]))
        elif isinstance(p, SectorEnvelope):
            pts.append(p.boundary_cloud(0.0)[:: max(1, p.n // per_prim)])
        else:
            pts.append(p.sample(per_prim, rng))
    out = np.concatenate(pts) if pts else np.empty(0, dtype=complex)
    return out[np.isfinite(out)]


def _geom_segments(p):
    """Boundary of a primitive as batched segments (a, b); None if unsupported."""
    if isinstance(p, Segment):
        return np.array([p.a]), np.array([p.b])
    if isinstance(p, ConvexPolygon):
        v = p._v()
        if len(v) == 1:
            return v, v
        return v, np.roll(v, -1)
    if isinstance(p, HPolygon):
        b = p.boundary
        a = np.concatenate([b, np.conj(b)])
        bb = np.concatenate([np.roll(b, -1), np.conj(np.roll(b, -1))])
        return a, bb
    if isinstance(p, LogPolarBox):
        cloud = p.boundary_cloud(max((p.max_modulus()) * 1e-3, 1e-6))
        return cloud, cloud
    return None


def _prim_pair_dist(p, q):
    swap = False
    rank = {"disc": 0, "point_set": 1, "half_plane_re": 2, "sector_envelope": 3}
    rp = rank.get(p.kind, 9)
    rq = rank.get(q.kind, 9)
    if rp > rq:
        p, q, swap = q, p, True
    d, wa, wb = _prim_pair_dist_ordered(p, q)
    if swap:
        return d, wb, wa
    return d, wa, wb


def _prim_pair_dist_ordered(p, q):
    # Disc against anything: distance from the center minus the radius.
    if isinstance(p, Disc):
        d, w = _point_to_prim(np.array([p.center]), q)
        gap = max(0.0, float(d[0]) - p.radius)
        direction = w[0] - p.center
        nd = abs(direction)
        wa = p.center + (p.radius if nd > 0 else 0.0) * (direction / nd if nd > 0 else 0.0)
        if gap == 0.0:
            return 0.0, w[0], w[0]
        return gap, wa, w[0]
    if isinstance(p, PointSet):
        pts = p._p()
        d, w = _point_to_prim(pts, q)
        i = int(np.argmin(d))
        gap = max(0.0, float(d[i]) - p.dilation)
        wa = pts[i]
        if p.dilation > 0.0 and gap > 0.0:
            direction = (w[i] - pts[i]) / abs(w[i] - pts[i])
            wa = pts[i] + p.dilation * direction
        return gap, wa, w[i]
    if isinstance(p, HalfPlaneRe):
        lo_re, hi_re = q.re_range()
        if p.side == ">=":
            gap = max(0.0, p.c - hi_re)
            x = hi_re
        else:
            gap = max(0.0, lo_re - p.c)
            x = lo_re
        wb = _re_extreme_point(q, x)
        return gap, complex(p.c, wb.imag), wb
    if isinstance(p, SectorEnvelope):
        cb = _prim_dense_cloud(q)
        d = p.point_distances(cb)
        i = int(np.argmin(d))
        ne, t0, t1 = p._sectors()
        dd, wit = _box_point_dist_vec(cb[i], p, ne, t0, t1)
        return float(d[i]), wit, cb[i]
    # Segment-backed pairs.
    sp = _geom_segments(p)
    sq = _geom_segments(q)
    if sp is None or sq is None:
        ca = _prim_dense_cloud(p)
        d, w = _point_to_prim(ca, q)
        i = int(np.argmin(d))
        return float(d[i]), ca[i], w[i]
    a1, b1 = sp
    a2, b2 = sq
    if len(a1) * len(a2) > 4e6:
        ca = _prim_dense_cloud(p)
        d, w = _point_to_prim(ca, q)
        i = int(np.argmin(d))
        return float(d[i]), ca[i], w[i]
    d, w1, w2 = seg_seg_dist(
        a1[:, None].repeat(len(a2), 1).ravel(),
        b1[:, None].repeat(len(a2), 1).ravel(),
        a2[None, :].repeat(len(a1), 0).ravel(),
        b2[None, :].repeat(len(a1), 0).ravel(),
    )
    i = int(np.argmin(d))
    return float(d[i]), w1[i], w2[i]


def _box_point_dist_vec(z, env, ne, t0, t1):
    zz = np.full(1, z, dtype=complex)
    best = (np.inf, z)
    for j, k in enumerate(ne):
        d, w = _box_point_dist(zz, env.lo[k], env.hi[k], t0[j], t1[j])
        if d[0] < best[0]:
            best = (float(d[0]), complex(w[0]))
    return best


def _prim_dense_cloud(p, cap=20000):
    if isinstance(p, PointSet):
        return p._p()
    if isinstance(p, HalfPlaneRe):
        y = np.linspace(-TRUNC_HI, TRUNC_HI, 4097)
        return p.c + 1j * y
    spacing = max(p.max_modulus() / 2000.0, 1e-6) if p.is_bounded() else 1.0
    cloud = p.boundary_cloud(spacing)
    if len(cloud) > cap:
        cloud = cloud[:: len(cloud) // cap + 1]
    return cloud


def _point_to_prim(pts, q):
    """Distances and nearest-point witnesses from points to a primitive."""
    pts = np.asarray(pts, dtype=complex)
    if isinstance(q, Disc):
        vec = pts - q.center
        mod = np.abs(vec)
        d = np.maximum(0.0, mod - q.radius)
        safe = np.where(mod > 0, mod, 1.0)
        w = q.center + np.where(mod > 0, vec / safe, 1.0) * np.minimum(mod, q.radius)
        return d, w
    if isinstance(q, HalfPlaneRe):
        d = q.point_distances(pts)
        w = np.where(d > 0, complex(q.c, 0) + 1j * pts.imag, pts)
        return d, w
    if isinstance(q, Segment):
        return point_seg_dist(pts, q.a, q.b)
    if isinstance(q, ConvexPolygon):
        return point_poly_dist(pts, q._v())
    if isinstance(q, PointSet):
        qq = q._p()
        d = np.abs(pts[:, None] - qq[None, :])
        j = np.argmin(d, axis=1)
        ar = np.arange(len(pts))
        w = qq[j]
        dd = d[ar, j]
        if q.dilation > 0.0:
            vec = pts - w
            mod = np.abs(vec)
            w = w + np.where(mod > 0, vec / np.where(mod > 0, mod, 1), 0) * np.minimum(mod, q.dilation)
            dd = np.maximum(0.0, dd - q.dilation)
        return dd, w
    if isinstance(q, LogPolarBox):
        return _box_point_dist(pts, q.rho_lo, q.rho_hi, q.theta_lo, q.theta_hi)
    if isinstance(q, SectorEnvelope):
        d = q.point_distances(pts)
        ne, t0, t1 = q._sectors()
        w = np.empty(len(pts), dtype=complex)
        for i, z in enumerate(pts):
            _, w[i] = _box_point_dist_vec(z, q, ne, t0, t1)
        return d, w
    if isinstance(q, HPolygon):
        inside = q.contains_points(pts)
        cloud = np.concatenate([q.boundary, np.conj(q.boundary)])
        d = np.abs(pts[:, None] - cloud[None, :])
        j = np.argmin(d, axis=1)
        ar = np.arange(len(pts))
        w = np.where(inside, pts, cloud[j])
        dd = np.where(inside, 0.0, d[ar, j])
        return dd, w
    raise UnsupportedGeometryError(f"distance to {q.kind}")


def _re_extreme_point(q, x):
    if isinstance(q, Disc):
        return complex(x, q.center.imag)
    if isinstance(q, ConvexPolygon):
        v = q._v()
        i = int(np.argmin(np.abs(v.real - x)))
        return v[i]
    if isinstance(q, Segment):
        return q.a if abs(q.a.real - x) < abs(q.b.real - x) else q.b
    cloud = _prim_dense_cloud(q)
    i = int(np.argmin(np.abs(cloud.real - x)))
    return cloud[i]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def region_to_dict(region):
    return {
        "schema_version": SCHEMA_VERSION,
        "contains_infinity": bool(region.contains_infinity),
        "resolution": float(region.resolution),
        "primitives": [p.to_dict() for p in region.primitives],
    }


def _prim_from_dict(d):
    kind = d["kind"]
    if kind == "disc":
        return Disc(complex(d["center"][0], d["center"][1]), float(d["radius"]))
    if kind == "half_plane_re":
        return HalfPlaneRe(float(d["c"]), d["side"])
    if kind == "segment":
        return Segment(complex(*d["a"]), complex(*d["b"]))
    if kind == "convex_polygon":
        return ConvexPolygon(np.array([complex(x, y) for x, y in d["vertices"]]))
    if kind == "point_set":
        return PointSet(np.array([complex(x, y) for x, y in d["points"]]), float(d.get("dilation", 0.0)))
    if kind == "log_polar_box":
        return LogPolarBox(d["rho_lo"], d["rho_hi"], d["theta_lo"], d["theta_hi"])
    if kind == "sector_envelope":
        lo = np.array([np.inf if v is None else v for v in d["rho_lo"]], dtype=float)
        hi = np.array([-np.inf if v is None else v for v in d["rho_hi"]], dtype=float)
        return SectorEnvelope(int(d["n"]), lo, hi)
    if kind == "h_polygon":
        k = np.array([complex(x, y) for x, y in d["klein_vertices"]])
        return HPolygon(k, boundary_gap=float(d.get("boundary_gap", DEFAULT_RESOLUTION)))
    raise ValueError(f"unknown primitive kind: {kind}")


def region_from_dict(d):
    if str(d.get("schema_version")) != SCHEMA_VERSION:
        raise ValueError("unsupported schema_version")
    prims = tuple(_prim_from_dict(pd) for pd in d.get("primitives", []))
    return Region(prims, bool(d.get("contains_infinity", False)), float(d.get("resolution", DEFAULT_RESOLUTION)))
