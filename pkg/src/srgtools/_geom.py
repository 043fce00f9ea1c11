"""Planar geometry kernels shared by the region algebra.

Pure numpy helpers with no region semantics or tolerance policy. Angles are
radians; polygons are complex vertex arrays in counterclockwise order.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_angle(theta):
    """Wrap angles to [-pi, pi)."""
    return np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi


def convex_hull(points):
    """Convex hull of complex points, ccw, via monotone chain.

    Collinear inputs collapse to their two extreme points; a single
    (possibly repeated) point collapses to one vertex.
    """
    pts = np.unique(np.asarray(points, dtype=complex))
    pts = pts[np.lexsort((pts.imag, pts.real))]
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                a, b = out[-2], out[-1]
                cross = (b.real - a.real) * (p.imag - a.imag) - (b.imag - a.imag) * (p.real - a.real)
                if cross <= 0.0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) == 0:
        hull = pts[:1]
    return hull


def poly_area(verts):
    v = np.asarray(verts)
    w = np.roll(v, -1)
    return 0.5 * float(np.sum(v.real * w.imag - v.imag * w.real))


def poly_minkowski(p_verts, q_verts):
    """Minkowski sum of two convex vertex sets (hull of pairwise sums)."""
    p = np.asarray(p_verts, dtype=complex)
    q = np.asarray(q_verts, dtype=complex)
    if len(p) == 0 or len(q) == 0:
        return np.empty(0, dtype=complex)
    sums = (p[:, None] + q[None, :]).ravel()
    return convex_hull(sums)


def point_seg_dist(p, a, b):
    """Distance from points p to segments (a, b), all complex, broadcastable.

    Returns (dist, foot) where foot is the nearest point on the segment.
    """
    p = np.asarray(p, dtype=complex)
    d = b - a
    denom = (d.real * d.real + d.imag * d.imag)
    ap = p - a
    t = np.where(denom > 0.0, (ap.real * d.real + ap.imag * d.imag) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    foot = a + t * d
    return np.abs(p - foot), foot


def seg_seg_dist(a1, b1, a2, b2):
    """Distance between segment batches; returns (dist, p_on_1, p_on_2)."""
    a1 = np.asarray(a1, dtype=complex)
    b1 = np.asarray(b1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    # Proper intersection test via orientations.
    def orient(p, q, r):
        return (q.real - p.real) * (r.imag - p.imag) - (q.imag - p.imag) * (r.real - p.real)

    d1 = orient(a2, b2, a1)
    d2 = orient(a2, b2, b1)
    d3 = orient(a1, b1, a2)
    d4 = orient(a1, b1, b2)
    crossing = ((d1 * d2) < 0) & ((d3 * d4) < 0)

    cands = []
    for p, sa, sb in ((a1, a2, b2), (b1, a2, b2)):
        dist, foot = point_seg_dist(p, sa, sb)
        cands.append((dist, p, foot))
    for p, sa, sb in ((a2, a1, b1), (b2, a1, b1)):
        dist, foot = point_seg_dist(p, sa, sb)
        cands.append((dist, foot, p))
    dists = np.stack([c[0] for c in cands])
    best = np.argmin(dists, axis=0)
    idx = np.arange(best.shape[-1]) if best.ndim else ...
    if best.ndim == 0:
        dist = dists[best]
        w1, w2 = cands[int(best)][1], cands[int(best)][2]
        if crossing:
            dist = np.zeros_like(dist)
        return dist, w1, w2
    dist = np.take_along_axis(dists, best[None, :], axis=0)[0]
    w1 = np.stack([np.broadcast_to(c[1], dist.shape) for c in cands])
    w2 = np.stack([np.broadcast_to(c[2], dist.shape) for c in cands])
    w1 = np.take_along_axis(w1, best[None, :], axis=0)[0]
    w2 = np.take_along_axis(w2, best[None, :], axis=0)[0]
    dist = np.where(crossing, 0.0, dist)
    return dist, w1, w2


def poly_contains(points, verts, tol=0.0):
    """Membership of complex points in a ccw convex polygon (boundary inside)."""
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    v = np.asarray(verts, dtype=complex)
    if len(v) == 0:
        return np.zeros(p.shape, dtype=bool)
    if len(v) == 1:
        return np.abs(p - v[0]) <= tol
    if len(v) == 2:
        d, _ = point_seg_dist(p, v[0], v[1])
        return d <= tol
    w = np.roll(v, -1)
    e = w - v
    scale = np.abs(e)
    inside = np.ones(p.shape, dtype=bool)
    for i in range(len(v)):
        cross = e[i].real * (p.imag - v[i].imag) - e[i].imag * (p.real - v[i].real)
        inside &= cross >= -tol * max(scale[i], 1.0)
    return inside


def point_poly_dist(points, verts):
    """Distance from complex points to a convex polygon region (0 inside)."""
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    v = np.asarray(verts, dtype=complex)
    if len(v) == 1:
        d = np.abs(p - v[0])
        return d, np.broadcast_to(v[0], p.shape)
    w = np.roll(v, -1)
    dists = np.empty((len(v), len(p)))
    feet = np.empty((len(v), len(p)), dtype=complex)
    for i in range(len(v)):
        dists[i], feet[i] = point_seg_dist(p, v[i], w[i])
    k = np.argmin(dists, axis=0)
    ar = np.arange(len(p))
    d = dists[k, ar]
    foot = feet[k, ar]
    if len(v) >= 3:
        inside = poly_contains(p, v)
        d = np.where(inside, 0.0, d)
        foot = np.where(inside, p, foot)
    return d, foot


# ---------------------------------------------------------------------------
# Upper-half-plane hyperbolic model maps.
#
# Cayley transform sends the closed upper half-plane (plus the point at
# infinity) onto the closed Poincare disk; the Klein map straightens
# geodesics into chords. Ideal points (real axis, infinity) land on the
# unit circle.
# ---------------------------------------------------------------------------

_INF_THRESH = 1e300


def uhp_to_klein(z):
    """Map upper-half-plane points (complex; inf allowed) to Klein disk points."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    k = np.empty(z.shape, dtype=complex)
    big = ~np.isfinite(z) | (np.abs(z) > _INF_THRESH)
    w = np.empty(z.shape, dtype=complex)
    w[big] = 1.0
    zb = z[~big]
    w[~big] = (zb - 1j) / (zb + 1j)
    k = 2.0 * w / (1.0 + np.abs(w) ** 2)
    return k


def klein_to_uhp(k):
    """Inverse of uhp_to_klein; |k| = 1 maps to the real axis (or inf at k=1)."""
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    mag2 = np.minimum(np.abs(k) ** 2, 1.0)
    w = k / (1.0 + np.sqrt(np.maximum(0.0, 1.0 - mag2)))
    z = np.empty(k.shape, dtype=complex)
    denom = 1.0 - w
    at_inf = np.abs(denom) < 1e-18
    z[at_inf] = np.inf
    z[~at_inf] = 1j * (1.0 + w[~at_inf]) / denom[~at_inf]
    # Kill numerical dust on the imaginary part of ideal points.
    ideal = np.abs(np.abs(k) - 1.0) < 1e-15
    z[ideal & ~at_inf] = z[ideal & ~at_inf].real + 0j
    return z


def geodesic_chains_batch(k1, k2, z1, z2, max_gap, rel_gap=1e-3, max_depth=48):
    """Interior samples for many Klein chords at once, bisected in lockstep.

    Same refinement rule as geodesic_chain, but one array op per depth level
    instead of a Python recursion per edge. Returns (edge, z) with entries
    sorted by edge index then chord parameter; chord endpoints are not
    repeated in the output.
    """
    m = len(k1)
    eid = np.arange(m)
    t_a = np.zeros(m)
    t_b = np.ones(m)
    z_a = np.asarray(z1, dtype=complex).copy()
    z_b = np.asarray(z2, dtype=complex).copy()
    mid_e, mid_t, mid_z = [], [], []
    for _ in range(max_depth):
        fin = np.isfinite(z_a) & np.isfinite(z_b)
        za0 = np.where(np.isfinite(z_a), z_a, 0.0)
        zb0 = np.where(np.isfinite(z_b), z_b, 0.0)
        gap = np.abs(za0 - zb0)
        tol = np.maximum(max_gap, rel_gap * np.maximum(np.abs(za0), np.abs(zb0)))
        live = ~(fin & (gap <= tol))
        if not np.any(live):
            break
        eid, t_a, t_b = eid[live], t_a[live], t_b[live]
        z_a, z_b = z_a[live], z_b[live]
        t_m = 0.5 * (t_a + t_b)
        k_m = k1[eid] * (1.0 - t_m) + k2[eid] * t_m
        z_m = klein_to_uhp(k_m)
        mid_e.append(eid)
        mid_t.append(t_m)
        mid_z.append(z_m)
        eid = np.concatenate([eid, eid])
        t_a, t_b = np.concatenate([t_a, t_m]), np.concatenate([t_m, t_b])
        z_a, z_b = np.concatenate([z_a, z_m]), np.concatenate([z_m, z_b])
    if not mid_e:
        return np.empty(0, dtype=int), np.empty(0, dtype=complex)
    e = np.concatenate(mid_e)
    t = np.concatenate(mid_t)
    z = np.concatenate(mid_z)
    order = np.lexsort((t, e))
    return e[order], z[order]


def geodesic_chain(z1, z2, max_gap, rel_gap=1e-3, max_depth=48):
    """Sample the hyperbolic geodesic from z1 to z2 (closed UHP, inf allowed).

    Returns complex samples including both endpoints, spaced so consecutive
    points are within max(max_gap, rel_gap * local modulus) of each other.
    Infinite endpoints are clipped implicitly by the caller's truncation.
    """
    k1 = uhp_to_klein(z1)[0]
    k2 = uhp_to_klein(z2)[0]

    out = []

    def z_of(t):
        return klein_to_uhp(np.array([k1 + t * (k2 - k1)]))[0]

    def emit(t_a, z_a, t_b, z_b, depth):
        finite = np.isfinite(z_a) and np.isfinite(z_b)
        if finite:
            gap = abs(z_a - z_b)
            tol = max(max_gap, rel_gap * max(abs(z_a), abs(z_b)))
            if gap <= tol or depth >= max_depth:
                out.append(z_b)
                return
        elif depth >= max_depth:
            out.append(z_b)
            return
        t_m = 0.5 * (t_a + t_b)
        z_m = z_of(t_m)
        emit(t_a, z_a, t_m, z_m, depth + 1)
        emit(t_m, z_m, t_b, z_b, depth + 1)

    z_a = z_of(0.0)
    z_b = z_of(1.0)
    out.append(z_a)
    emit(0.0, z_a, 1.0, z_b, 0)
    return np.array(out, dtype=complex)
